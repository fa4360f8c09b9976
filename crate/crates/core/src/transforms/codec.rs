use std::fmt::Write;

use crate::pddl::{is_identifier, TimedPlan};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot decode line {line}: {msg}")]
pub struct DecodeFailure {
    pub line: usize,
    pub msg: String,
}

/// One `action arg ...` line per step; no timestamps, parentheses or `END`.
pub fn encode_plan(plan: &TimedPlan) -> String {
    let lines: Vec<String> = plan
        .steps
        .iter()
        .map(|s| {
            let mut line = s.action.to_string();
            for a in &s.args {
                line.push(' ');
                line.push_str(a.as_str());
            }
            line
        })
        .collect();
    lines.join("\n")
}

/// Inverse of [`encode_plan`]: numbers non-blank lines from 1 and appends
/// `END`. Tolerates arbitrary text, reporting the first unusable line.
pub fn decode_plan(compact: &str) -> Result<String, DecodeFailure> {
    let mut out = String::new();
    let mut k = 0;
    for (i, line) in compact.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if let Some(bad) = tokens.iter().find(|t| !is_identifier(t)) {
            return Err(DecodeFailure {
                line: i + 1,
                msg: format!("`{bad}` is not an identifier"),
            });
        }
        k += 1;
        writeln!(out, "{k:05}: ({})", tokens.join(" ")).unwrap();
    }
    out.push_str("END");
    Ok(out)
}
