use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::os::unix::process::CommandExt;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

/// Relative optimality gap handed to the solver through `{gap}`.
pub const DEFAULT_OPT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Optimal,
    FeasibleLimit,
    TimeLimit,
    Infeasible,
    Error,
}

impl SolverStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolverStatus::Optimal | SolverStatus::FeasibleLimit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::FeasibleLimit => "feasible-limit",
            SolverStatus::TimeLimit => "time-limit",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::Error => "error",
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to spawn `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("PARSE_FAILURE: {reason}: {line:?}")]
    ParseFailure { reason: String, line: String },
    #[error("invalid pattern {pattern:?}: {message}")]
    Pattern { pattern: String, message: String },
}

/// Regexes applied to the solver log. Each needs one capture group; status
/// captures are lowercased and looked up in `status_words`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverPatterns {
    pub status: String,
    pub objective: String,
    pub bound: String,
    pub status_words: BTreeMap<String, SolverStatus>,
}

impl Default for SolverPatterns {
    fn default() -> Self {
        let words = [
            ("optimal", SolverStatus::Optimal),
            ("feasible", SolverStatus::FeasibleLimit),
            ("feasible-limit", SolverStatus::FeasibleLimit),
            ("time-limit", SolverStatus::TimeLimit),
            ("timeout", SolverStatus::TimeLimit),
            ("infeasible", SolverStatus::Infeasible),
            ("error", SolverStatus::Error),
        ];
        SolverPatterns {
            status: r"(?im)^\s*status\s*[:=]\s*(\S.*?)\s*$".into(),
            objective: r"(?im)^\s*objective\s*[:=]\s*(\S+)\s*$".into(),
            bound: r"(?im)^\s*(?:best\s+)?bound\s*[:=]\s*(\S+)\s*$".into(),
            status_words: words.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

/// `command` is run through `sh -c` after substituting `{file}`,
/// `{time_limit}` and `{gap}`. The log is stdout, or `log_file` (same
/// placeholders) when set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverRun {
    pub command: String,
    pub time_limit_s: f64,
    #[serde(default = "default_tol")]
    pub optimality_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_file: Option<String>,
    #[serde(default)]
    pub patterns: SolverPatterns,
}

fn default_tol() -> f64 {
    DEFAULT_OPT_TOL
}

impl SolverRun {
    pub fn new(command: impl Into<String>, time_limit_s: f64) -> Self {
        SolverRun {
            command: command.into(),
            time_limit_s,
            optimality_tol: DEFAULT_OPT_TOL,
            log_file: None,
            patterns: SolverPatterns::default(),
        }
    }

    fn expand(&self, template: &str, file: &Path, quote: bool) -> String {
        let path = file.to_string_lossy();
        let path = if quote { shell_quote(&path) } else { path.into_owned() };
        template
            .replace("{file}", &path)
            .replace("{time_limit}", &format!("{:?}", self.time_limit_s))
            .replace("{gap}", &format!("{:?}", self.optimality_tol))
    }
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub status: SolverStatus,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub wall_seconds: f64,
}

fn compile(p: &str) -> Result<Regex, SolverError> {
    Regex::new(p).map_err(|e| SolverError::Pattern {
        pattern: p.to_string(),
        message: e.to_string(),
    })
}

fn capture_number(re: &Regex, log: &str) -> Result<Option<f64>, SolverError> {
    let Some(caps) = re.captures_iter(log).last() else {
        return Ok(None);
    };
    let line = caps.get(0).map_or("", |m| m.as_str()).trim().to_string();
    let raw = caps.get(1).map_or("", |m| m.as_str());
    raw.parse::<f64>().map(Some).map_err(|_| SolverError::ParseFailure {
        reason: format!("not a number: {raw:?}"),
        line,
    })
}

/// Reads status, objective and bound from a log. `timed_out` forces the
/// time-limit status unless the log reports a solution.
pub fn parse_solver_log(log: &str, patterns: &SolverPatterns, timed_out: bool) -> Result<(SolverStatus, Option<f64>, Option<f64>), SolverError> {
    let status_re = compile(&patterns.status)?;
    let objective = capture_number(&compile(&patterns.objective)?, log)?;
    let bound = capture_number(&compile(&patterns.bound)?, log)?;
    let status = match status_re.captures_iter(log).last() {
        Some(caps) => {
            let word = caps.get(1).map_or("", |m| m.as_str()).to_lowercase();
            match patterns.status_words.get(&word) {
                Some(&s) => s,
                None => {
                    return Err(SolverError::ParseFailure {
                        reason: format!("unknown status {word:?}"),
                        line: caps.get(0).map_or("", |m| m.as_str()).trim().to_string(),
                    })
                }
            }
        }
        None if timed_out => SolverStatus::TimeLimit,
        None => {
            let line = log.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("<empty log>");
            return Err(SolverError::ParseFailure {
                reason: "no status line".into(),
                line: line.to_string(),
            });
        }
    };
    let status = if timed_out && !status.has_solution() { SolverStatus::TimeLimit } else { status };
    if status.has_solution() {
        if objective.is_none() {
            return Err(SolverError::ParseFailure {
                reason: format!("status {} without an objective", status.as_str()),
                line: log.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("").to_string(),
            });
        }
        Ok((status, objective, bound))
    } else {
        Ok((status, None, bound))
    }
}

/// Runs the solver on `file`. A timeout kills the process and is reported
/// as [`SolverStatus::TimeLimit`], keeping any bound already printed.
pub fn run_external_solver(file: &Path, run: &SolverRun) -> Result<SolverResult, SolverError> {
    let command = run.expand(&run.command, file, true);
    let start = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0)
        .spawn()
        .map_err(|source| SolverError::Spawn {
            command: command.clone(),
            source,
        })?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let limit = Duration::from_secs_f64(run.time_limit_s.max(0.0));
    let timed_out = match child.wait_timeout(limit) {
        Ok(Some(_)) => false,
        Ok(None) => {
            // The shell may have forked; take down the whole group.
            let _ = Command::new("kill")
                .args(["-KILL", "--", &format!("-{}", child.id())])
                .stderr(Stdio::null())
                .status();
            let _ = child.kill();
            let _ = child.wait();
            true
        }
        Err(source) => return Err(SolverError::Spawn { command, source }),
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    let stdout_text = reader.join().unwrap_or_default();
    let log = match &run.log_file {
        Some(t) => std::fs::read_to_string(run.expand(t, file, false)).unwrap_or_default(),
        None => stdout_text,
    };
    let (status, objective, bound) = parse_solver_log(&log, &run.patterns, timed_out)?;
    Ok(SolverResult {
        status,
        objective,
        bound,
        wall_seconds,
    })
}
