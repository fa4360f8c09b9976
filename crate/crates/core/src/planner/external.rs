//! Adapters for third-party planners and validators run as subprocesses.
//!
//! The command template may reference `{domain}`, `{problem}` and `{plan}`.
//! When `{plan}` is present the plan is read from that file, otherwise from
//! stdout.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::pddl::{is_identifier, parse_domain, parse_problem, Name, ParseError, TimedPlan};
use crate::validator::{self, Outcome, ValidationReport};

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error("external planner failed: {reason}\n{stderr}")]
    ExternalFailure { reason: String, stderr: String },
    #[error("cannot convert planner output (line {line}): {msg}")]
    ConversionFailure { line: usize, msg: String },
    #[error("external planner returned an invalid plan ({})", .0.outcome)]
    InvalidExternalPlan(Box<ValidationReport>),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Inputs(#[from] validator::ValidatorError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Accepts VAL-style `t: (a args) [d]` lines and bare `(a args)` lines.
/// Comments, blank lines and a trailing END are skipped. Timestamps are
/// renumbered sequentially; VAL lines must still be strictly increasing.
pub fn parse_planner_output(text: &str) -> Result<TimedPlan, ExternalError> {
    let mut actions = Vec::new();
    let mut last: Option<f64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fail = |msg: &str| ExternalError::ConversionFailure {
            line: line_no,
            msg: msg.to_string(),
        };
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case("end") {
            break;
        }
        let body = match line.find('(') {
            Some(0) => line,
            Some(p) => {
                let stamp = line[..p].trim();
                let stamp = stamp
                    .strip_suffix(':')
                    .ok_or_else(|| fail("expected `time: (action ...)`"))?;
                let t: f64 = stamp
                    .trim()
                    .parse()
                    .map_err(|_| fail("timestamp is not a number"))?;
                if last.is_some_and(|l| t <= l) {
                    return Err(fail("timestamps must increase"));
                }
                last = Some(t);
                &line[p..]
            }
            None => return Err(fail("no action found")),
        };
        let close = body
            .find(')')
            .ok_or_else(|| fail("unbalanced parentheses"))?;
        let rest = body[close + 1..].trim();
        // an optional `[duration]` suffix is tolerated
        if !(rest.is_empty() || rest.starts_with('[') && rest.ends_with(']')) {
            return Err(fail("trailing content after action"));
        }
        let tokens: Vec<&str> = body[1..close].split_whitespace().collect();
        if tokens.is_empty() || !tokens.iter().all(|t| is_identifier(t)) {
            return Err(fail("malformed action"));
        }
        let args = tokens[1..].iter().map(Name::new).collect();
        actions.push((Name::new(tokens[0]), args));
    }
    Ok(TimedPlan::from_actions(actions))
}

fn substitute(template: &str, domain: &Path, problem: &Path, plan: &Path) -> String {
    template
        .replace("{domain}", &domain.display().to_string())
        .replace("{problem}", &problem.display().to_string())
        .replace("{plan}", &plan.display().to_string())
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut out = String::new();
        if let Some(mut r) = r {
            let mut buf = Vec::new();
            let _ = r.read_to_end(&mut buf);
            out = String::from_utf8_lossy(&buf).into_owned();
        }
        out
    })
}

/// Output of a finished subprocess.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub success: bool,
    pub status: String,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `command` through `sh -c` in `workdir`, killing it after `timeout`.
/// Spawn failures and timeouts are `ExternalFailure`; a nonzero exit is
/// reported in the output.
pub fn run_command(
    command: &str,
    workdir: &Path,
    timeout: Duration,
) -> Result<CommandOutput, ExternalError> {
    log::debug!("running external command: {command}");
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .current_dir(workdir)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| ExternalError::ExternalFailure {
            reason: format!("cannot start `{command}`: {e}"),
            stderr: String::new(),
        })?;
    let out = drain(child.stdout.take());
    let err = drain(child.stderr.take());

    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        thread::sleep(Duration::from_millis(10));
    };
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    match status {
        None => Err(ExternalError::ExternalFailure {
            reason: format!("timed out after {:.1}s", timeout.as_secs_f64()),
            stderr,
        }),
        Some(s) => Ok(CommandOutput {
            success: s.success(),
            status: s.to_string(),
            stdout,
            stderr,
        }),
    }
}

/// Runs an external planner and returns its plan after converting and
/// validating it.
pub fn external_solve(
    command_template: &str,
    domain_file: &Path,
    problem_file: &Path,
    timeout: Duration,
) -> Result<TimedPlan, ExternalError> {
    let domain = parse_domain(&std::fs::read_to_string(domain_file)?)?;
    let problem = parse_problem(&std::fs::read_to_string(problem_file)?, &domain)?;
    validator::check_inputs(&domain, &problem)?;

    let workdir = tempfile::tempdir()?;
    let plan_path = workdir.path().join("plan.out");
    let cmd = substitute(
        command_template,
        &std::path::absolute(domain_file)?,
        &std::path::absolute(problem_file)?,
        &plan_path,
    );
    let out = run_command(&cmd, workdir.path(), timeout)?;
    if !out.success {
        return Err(ExternalError::ExternalFailure {
            reason: format!("exit status {}", out.status),
            stderr: out.stderr,
        });
    }
    let text = if command_template.contains("{plan}") {
        std::fs::read_to_string(&plan_path).map_err(|e| ExternalError::ExternalFailure {
            reason: format!("no plan file written: {e}"),
            stderr: out.stderr.clone(),
        })?
    } else {
        out.stdout
    };
    let plan = parse_planner_output(&text)?;
    let report = validator::validate_plan(&domain, &problem, &plan)?;
    if report.outcome != Outcome::Valid {
        return Err(ExternalError::InvalidExternalPlan(Box::new(report)));
    }
    Ok(plan)
}

/// Asks an external validator (VAL's `Validate` or compatible) whether a
/// plan is valid. The template takes `{domain}`, `{problem}` and `{plan}`;
/// the verdict is read from a `Plan valid` line on stdout.
pub fn external_validate(
    command_template: &str,
    domain_file: &Path,
    problem_file: &Path,
    plan_file: &Path,
    timeout: Duration,
) -> Result<bool, ExternalError> {
    let workdir = tempfile::tempdir()?;
    let cmd = substitute(
        command_template,
        &std::path::absolute(domain_file)?,
        &std::path::absolute(problem_file)?,
        &std::path::absolute(plan_file)?,
    );
    let out = run_command(&cmd, workdir.path(), timeout)?;
    Ok(out.stdout.lines().any(|l| l.trim() == "Plan valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::render_plan;

    #[test]
    fn converts_bare_and_val_lines() {
        let p = parse_planner_output("(board c1 l1)\n(sail l1 l2)\n").unwrap();
        assert_eq!(
            render_plan(&p),
            "00001: (board c1 l1)\n00002: (sail l1 l2)\nEND"
        );
        let p = parse_planner_output("0.000: (board c1 l1) [1]\n1.5: (SAIL l1 l2)\n; cost 2\n")
            .unwrap();
        assert_eq!(
            render_plan(&p),
            "00001: (board c1 l1)\n00002: (sail l1 l2)\nEND"
        );
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["hello", "(board c1", "1: (x) junk", "2: (a)\n1: (b)", "()"] {
            assert!(
                matches!(
                    parse_planner_output(bad),
                    Err(ExternalError::ConversionFailure { .. })
                ),
                "{bad}"
            );
        }
    }
}
