use super::{is_identifier, Name, ParseError, PlanStep, TimedPlan};

/// Parses a sequential plan: `<digits>: (<action> <args>...)` lines, blank
/// lines, `;` comments and an optional final `END`.
pub fn parse_plan(text: &str) -> Result<TimedPlan, ParseError> {
    let mut plan = TimedPlan::default();
    let mut prev: Option<u64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ParseError::PlanFormat { line: line_no, msg };
        if plan.terminated {
            return Err(err(format!("content after END: `{line}`")));
        }
        if line.eq_ignore_ascii_case("end") {
            plan.terminated = true;
            continue;
        }
        let (stamp, rest) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected `<time>: (<action> ...)`, found `{line}`")))?;
        let stamp = stamp.trim();
        if stamp.is_empty() || !stamp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(format!(
                "timestamp `{stamp}` is not a non-negative integer"
            )));
        }
        let time: u64 = stamp
            .parse()
            .map_err(|_| err(format!("timestamp `{stamp}` out of range")))?;
        let body = rest
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| {
                err(format!(
                    "expected parenthesised action, found `{}`",
                    rest.trim()
                ))
            })?;
        let mut tokens = body.split_whitespace();
        let action = tokens
            .next()
            .ok_or_else(|| err("empty action".to_string()))?;
        let mut names = Vec::new();
        for tok in std::iter::once(action).chain(tokens) {
            if !is_identifier(tok) {
                return Err(err(format!("`{tok}` is not a legal identifier")));
            }
            names.push(Name::new(tok));
        }
        if let Some(p) = prev {
            if time <= p {
                return Err(ParseError::NonMonotonicTimestamps {
                    line: line_no,
                    prev: p,
                    time,
                });
            }
        }
        prev = Some(time);
        let action = names.remove(0);
        plan.steps.push(PlanStep {
            time,
            action,
            args: names,
        });
    }
    Ok(plan)
}
