use super::{ParseError, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Open,
    Close,
    Symbol(String),
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || matches!(
            c,
            '-' | '_' | '?' | ':' | '=' | '.' | '+' | '*' | '/' | '<' | '>'
        )
}

/// Letters first, then letters, digits, `-` or `_`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Splits `text` into parentheses and lowercased symbols, dropping
/// whitespace and `;` comments.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(Token, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                out.push((Token::Open, pos));
            }
            ')' => {
                chars.next();
                col += 1;
                out.push((Token::Close, pos));
            }
            c if is_symbol_char(c) => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_symbol_char(c) {
                        break;
                    }
                    sym.push(c.to_ascii_lowercase());
                    chars.next();
                    col += 1;
                }
                out.push((Token::Symbol(sym), pos));
            }
            other => {
                return Err(ParseError::Lex {
                    pos,
                    msg: format!("illegal character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Sexp {
    Symbol(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub(crate) fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub(crate) fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Symbol(..) => None,
        }
    }

    /// The head symbol of a list, if any.
    pub(crate) fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|l| l.first())
            .and_then(Sexp::as_symbol)
    }
}

/// Reads exactly one top-level s-expression.
pub(crate) fn read(text: &str) -> Result<Sexp, ParseError> {
    let tokens = tokenize(text)?;
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut done: Option<Sexp> = None;
    for (tok, pos) in tokens {
        if done.is_some() {
            return Err(ParseError::Lex {
                pos,
                msg: "trailing input after top-level expression".into(),
            });
        }
        match tok {
            Token::Open => stack.push((Vec::new(), pos)),
            Token::Close => {
                let (items, open) = stack.pop().ok_or(ParseError::Lex {
                    pos,
                    msg: "unbalanced `)`".into(),
                })?;
                let list = Sexp::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => done = Some(list),
                }
            }
            Token::Symbol(s) => match stack.last_mut() {
                Some((parent, _)) => parent.push(Sexp::Symbol(s, pos)),
                None => {
                    return Err(ParseError::Lex {
                        pos,
                        msg: format!("symbol `{s}` outside of any expression"),
                    })
                }
            },
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(ParseError::Lex {
            pos: *open,
            msg: "unbalanced `(`: expression never closed".into(),
        });
    }
    done.ok_or(ParseError::Lex {
        pos: Pos { line: 1, col: 1 },
        msg: "empty input".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_positions_and_comments() {
        let toks = tokenize("; header\n (Foo ?x)").unwrap();
        assert_eq!(toks[0], (Token::Open, Pos { line: 2, col: 2 }));
        assert_eq!(
            toks[1],
            (Token::Symbol("foo".into()), Pos { line: 2, col: 3 })
        );
        assert_eq!(toks.len(), 4);
    }

    #[test]
    fn rejects_illegal_character() {
        let err = tokenize("(a #b)").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Lex {
                pos: Pos { line: 1, col: 4 },
                ..
            }
        ));
    }

    #[test]
    fn unbalanced() {
        assert!(matches!(read("(a (b)"), Err(ParseError::Lex { .. })));
        assert!(matches!(read("(a))"), Err(ParseError::Lex { .. })));
        assert!(matches!(read(""), Err(ParseError::Lex { .. })));
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("truck-1_a"));
        assert!(!is_identifier("1truck"));
        assert!(!is_identifier("?x"));
        assert!(!is_identifier("(a"));
        assert!(!is_identifier(""));
    }
}
