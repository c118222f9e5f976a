//! Runs an external verifier on program files, enforces timeouts, and
//! classifies outcomes.
//!
//! Verdict classification is driven by two configurable patterns so that
//! verifier-version differences stay configuration, not code:
//!
//! * `Verified` — exit status 0 and the success pattern matches;
//! * `VerificationFailure` — the success pattern is absent but the failure
//!   pattern matches (regardless of exit status: some verifier versions exit
//!   0 on verification errors);
//! * `Timeout` — the process was killed at the deadline;
//! * `ToolError` — everything else (parse/type/usage errors, unrecognized
//!   output).
//!
//! Timeouts are confirmed by repetition: a timeout is only reported if every
//! one of `timeout_confirm_runs` runs times out; the first non-timeout run
//! wins otherwise.

use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default success pattern: a Boogie-style summary line with zero errors.
pub const DEFAULT_SUCCESS_PATTERN: &str = r"(\d+) verified, 0 errors";
/// Default failure pattern: a nonzero error count or an explicit
/// postcondition complaint.
pub const DEFAULT_FAILURE_PATTERN: &str = r", [1-9][0-9]* error|postcondition .* not hold";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("failed to launch `{command}`: {source}")]
    Launch {
        command: String,
        #[source]
        source: io::Error,
    },
    #[error("unreadable input file {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid tool command template: {0}")]
    BadTemplate(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed results file {path} (line {line}): {message}")]
    MalformedResults { path: PathBuf, line: usize, message: String },
}

/// How to invoke one verifier.
#[derive(Debug, Clone)]
pub struct ToolSpec {
    pub name: String,
    /// Whitespace-separated command where the standalone token `{files}`
    /// expands to the input paths in order.
    pub command_template: String,
    pub timeout: Duration,
    pub timeout_confirm_runs: u32,
    pub success_pattern: Regex,
    pub failure_pattern: Regex,
}

impl ToolSpec {
    /// Builds a spec with the defaults of the experimental setup: a 20 s
    /// timeout confirmed over 10 repetitions, Boogie-style output patterns.
    pub fn new(name: impl Into<String>, command_template: impl Into<String>) -> Result<Self, HarnessError> {
        let command_template = command_template.into();
        let placeholders =
            command_template.split_whitespace().filter(|t| *t == "{files}").count();
        if placeholders != 1 {
            return Err(HarnessError::BadTemplate(format!(
                "`{command_template}` must contain the standalone token {{files}} exactly once"
            )));
        }
        Ok(ToolSpec {
            name: name.into(),
            command_template,
            timeout: Duration::from_secs(20),
            timeout_confirm_runs: 10,
            success_pattern: Regex::new(DEFAULT_SUCCESS_PATTERN).expect("default pattern compiles"),
            failure_pattern: Regex::new(DEFAULT_FAILURE_PATTERN).expect("default pattern compiles"),
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_confirm_runs(mut self, runs: u32) -> Self {
        self.timeout_confirm_runs = runs.max(1);
        self
    }

    pub fn with_patterns(mut self, success: Regex, failure: Regex) -> Self {
        self.success_pattern = success;
        self.failure_pattern = failure;
        self
    }

    fn argv(&self, files: &[PathBuf]) -> Vec<String> {
        let mut argv = Vec::new();
        for token in self.command_template.split_whitespace() {
            if token == "{files}" {
                argv.extend(files.iter().map(|p| p.display().to_string()));
            } else {
                argv.push(token.to_string());
            }
        }
        argv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    Verified,
    VerificationFailure,
    ToolError,
    Timeout,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VerdictKind::Verified => "Verified",
            VerdictKind::VerificationFailure => "VerificationFailure",
            VerdictKind::ToolError => "ToolError",
            VerdictKind::Timeout => "Timeout",
        };
        f.write_str(s)
    }
}

/// Classified outcome of one verifier run.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub wall_time_seconds: f64,
    /// Exit status; `None` marks a timeout kill (or death by signal).
    pub raw_exit: Option<i32>,
    pub captured_output: String,
}

/// Spawns the tool once on `files` and classifies the outcome. The whole
/// process tree is killed at the deadline (verifiers spawn solver children).
pub fn run_one(tool: &ToolSpec, files: &[PathBuf]) -> Result<Verdict, HarnessError> {
    for path in files {
        if let Err(source) = std::fs::metadata(path) {
            return Err(HarnessError::UnreadableFile { path: path.clone(), source });
        }
    }
    let argv = tool.argv(files);
    let (program, args) = argv.split_first().ok_or_else(|| {
        HarnessError::BadTemplate("command template expands to an empty command".into())
    })?;

    let mut command = Command::new(program);
    command.args(args).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        command.process_group(0);
    }

    let start = Instant::now();
    let mut child = command
        .spawn()
        .map_err(|source| HarnessError::Launch { command: argv.join(" "), source })?;

    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let stdout_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let stderr_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let mut timed_out = false;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() >= tool.timeout {
            timed_out = true;
            kill_process_group(&child);
            break child.wait()?;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let wall_time_seconds = start.elapsed().as_secs_f64();

    let stdout_buf = stdout_reader.join().unwrap_or_default();
    let stderr_buf = stderr_reader.join().unwrap_or_default();
    let mut captured_output = String::from_utf8_lossy(&stdout_buf).into_owned();
    if !stderr_buf.is_empty() {
        if !captured_output.is_empty() && !captured_output.ends_with('\n') {
            captured_output.push('\n');
        }
        captured_output.push_str(&String::from_utf8_lossy(&stderr_buf));
    }

    let raw_exit = if timed_out { None } else { status.code() };
    let kind = classify(tool, timed_out, raw_exit, &captured_output);
    Ok(Verdict { kind, wall_time_seconds, raw_exit, captured_output })
}

fn kill_process_group(child: &std::process::Child) {
    #[cfg(unix)]
    {
        // The child was put in its own process group at spawn time.
        unsafe {
            libc::killpg(child.id() as libc::pid_t, libc::SIGKILL);
        }
    }
    #[cfg(not(unix))]
    {
        let _ = child; // best effort elsewhere is not supported
    }
}

/// The total classification table. Every (timeout, exit, output) combination
/// maps to exactly one verdict kind.
fn classify(tool: &ToolSpec, timed_out: bool, raw_exit: Option<i32>, output: &str) -> VerdictKind {
    if timed_out {
        return VerdictKind::Timeout;
    }
    let success = tool.success_pattern.is_match(output);
    if raw_exit == Some(0) && success {
        return VerdictKind::Verified;
    }
    if !success && tool.failure_pattern.is_match(output) {
        return VerdictKind::VerificationFailure;
    }
    VerdictKind::ToolError
}

/// Runs with timeout confirmation: a non-timeout first run is returned as
/// is; otherwise the run is repeated up to `timeout_confirm_runs` total
/// executions, and `Timeout` stands only if every one of them timed out.
pub fn run_confirmed(tool: &ToolSpec, files: &[PathBuf]) -> Result<Verdict, HarnessError> {
    let first = run_one(tool, files)?;
    if first.kind != VerdictKind::Timeout {
        return Ok(first);
    }
    for _ in 1..tool.timeout_confirm_runs {
        let verdict = run_one(tool, files)?;
        if verdict.kind != VerdictKind::Timeout {
            return Ok(verdict);
        }
    }
    Ok(first)
}

/// One program to verify within a batch: the seed itself (`mutant_id` is
/// `"SEED"`) or a mutant.
#[derive(Debug, Clone)]
pub struct ProgramRun {
    pub seed: String,
    pub mutant_id: String,
    pub lineage: String,
    /// Input files in invocation order (primary before companion for split
    /// mutants).
    pub files: Vec<PathBuf>,
}

pub const SEED_MARKER: &str = "SEED";

/// One line of the newline-delimited JSON results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub seed: String,
    pub mutant_id: String,
    pub lineage: String,
    pub tool: String,
    pub kind: VerdictKind,
    pub wall_time_seconds: f64,
    pub raw_exit: Option<i32>,
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub rows: Vec<ResultRow>,
    /// Rows that never produced a verdict because the tool failed to launch.
    pub launch_failures: Vec<(String, HarnessError)>,
}

/// Runs every program of a batch with up to `workers` concurrent rows and
/// collects one row per program. Row results are a pure function of the
/// individual runs, so the outcome is independent of scheduling; rows come
/// back sorted (seed, then SEED first, then mutants in numeric order).
pub fn check_batch(tool: &ToolSpec, runs: &[ProgramRun], workers: usize) -> BatchOutcome {
    let workers = workers.max(1).min(runs.len().max(1));
    let results: Mutex<Vec<Option<Result<Verdict, HarnessError>>>> =
        Mutex::new((0..runs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= runs.len() {
                    break;
                }
                let outcome = run_confirmed(tool, &runs[index].files);
                results.lock().expect("results mutex")[index] = Some(outcome);
            });
        }
    });

    let mut rows = Vec::new();
    let mut launch_failures = Vec::new();
    for (run, outcome) in runs.iter().zip(results.into_inner().expect("results mutex")) {
        match outcome.expect("every run was executed") {
            Ok(verdict) => rows.push(ResultRow {
                seed: run.seed.clone(),
                mutant_id: run.mutant_id.clone(),
                lineage: run.lineage.clone(),
                tool: tool.name.clone(),
                kind: verdict.kind,
                wall_time_seconds: verdict.wall_time_seconds,
                raw_exit: verdict.raw_exit,
            }),
            Err(err) => launch_failures.push((run.mutant_id.clone(), err)),
        }
    }
    rows.sort_by_key(row_order_key);
    BatchOutcome { rows, launch_failures }
}

#[allow(clippy::ptr_arg)]
fn row_order_key(row: &ResultRow) -> (String, u8, usize, String) {
    let (rank, number) = if row.mutant_id == SEED_MARKER {
        (0u8, 0usize)
    } else {
        let number = row
            .mutant_id
            .trim_start_matches(|c: char| !c.is_ascii_digit())
            .parse::<usize>()
            .unwrap_or(usize::MAX);
        (1u8, number)
    };
    (row.seed.clone(), rank, number, row.mutant_id.clone())
}

/// Serializes rows as newline-delimited JSON.
pub fn render_results(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("rows serialize"));
        out.push('\n');
    }
    out
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    std::fs::write(path, render_results(rows))?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    parse_results(&text, path)
}

pub fn parse_results(text: &str, path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: ResultRow =
            serde_json::from_str(line).map_err(|e| HarnessError::MalformedResults {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(command: &str) -> ToolSpec {
        ToolSpec::new("test-tool", command).unwrap()
    }

    #[test]
    fn template_must_contain_files_once() {
        assert!(ToolSpec::new("t", "boogie").is_err());
        assert!(ToolSpec::new("t", "boogie {files} {files}").is_err());
        assert!(ToolSpec::new("t", "boogie /opt:x {files}").is_ok());
    }

    #[test]
    fn argv_expands_files_in_order() {
        let tool = spec("verify --fast {files}");
        let argv = tool.argv(&[PathBuf::from("a.bpl"), PathBuf::from("b.bpl")]);
        assert_eq!(argv, vec!["verify", "--fast", "a.bpl", "b.bpl"]);
    }

    #[test]
    fn classification_table_is_total() {
        let tool = spec("x {files}");
        // Verified: exit 0 plus summary.
        assert_eq!(
            classify(&tool, false, Some(0), "Boogie program verifier finished with 2 verified, 0 errors"),
            VerdictKind::Verified
        );
        // Verification failure even at exit 0.
        assert_eq!(
            classify(&tool, false, Some(0), "finished with 1 verified, 2 errors"),
            VerdictKind::VerificationFailure
        );
        assert_eq!(
            classify(&tool, false, Some(1), "x.bpl(3,1): Error: postcondition might not hold"),
            VerdictKind::VerificationFailure
        );
        // Type errors and unrecognized output.
        assert_eq!(
            classify(&tool, false, Some(1), "x.bpl(2,4): Error: invalid type"),
            VerdictKind::ToolError
        );
        assert_eq!(classify(&tool, false, Some(0), "鸡同鸭讲"), VerdictKind::ToolError);
        // Success text with nonzero exit is not trusted.
        assert_eq!(classify(&tool, false, Some(3), "1 verified, 0 errors"), VerdictKind::ToolError);
        // Timeout beats everything.
        assert_eq!(classify(&tool, true, None, "1 verified, 0 errors"), VerdictKind::Timeout);
    }

    #[test]
    fn missing_binary_is_a_launch_error_not_a_verdict() {
        let tool = spec("/nonexistent/tool-binary-xyz {files}");
        let dir = std::env::temp_dir();
        let file = dir.join("mugie-harness-launch-test.bpl");
        std::fs::write(&file, "const c: int;\n").unwrap();
        let err = run_one(&tool, std::slice::from_ref(&file)).unwrap_err();
        assert!(matches!(err, HarnessError::Launch { .. }));
        std::fs::remove_file(file).ok();
    }

    #[test]
    fn unreadable_file_is_reported() {
        let tool = spec("true-dummy {files}");
        let err = run_one(&tool, &[PathBuf::from("/nonexistent/input.bpl")]).unwrap_err();
        assert!(matches!(err, HarnessError::UnreadableFile { .. }));
    }

    #[test]
    fn result_rows_round_trip_through_ndjson() {
        let rows = vec![
            ResultRow {
                seed: "ex.bpl".into(),
                mutant_id: SEED_MARKER.into(),
                lineage: String::new(),
                tool: "mock".into(),
                kind: VerdictKind::Verified,
                wall_time_seconds: 0.25,
                raw_exit: Some(0),
            },
            ResultRow {
                seed: "ex.bpl".into(),
                mutant_id: "m1".into(),
                lineage: "S1(0,2)".into(),
                tool: "mock".into(),
                kind: VerdictKind::Timeout,
                wall_time_seconds: 20.0,
                raw_exit: None,
            },
        ];
        let text = render_results(&rows);
        assert_eq!(text.lines().count(), 2);
        let parsed = parse_results(&text, Path::new("results.ndjson")).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn row_sorting_is_numeric_with_seed_first() {
        let mk = |id: &str| ResultRow {
            seed: "s.bpl".into(),
            mutant_id: id.into(),
            lineage: String::new(),
            tool: "t".into(),
            kind: VerdictKind::Verified,
            wall_time_seconds: 0.0,
            raw_exit: Some(0),
        };
        let mut rows = [mk("m10"), mk("m2"), mk(SEED_MARKER), mk("m1")];
        rows.sort_by_key(row_order_key);
        let ids: Vec<&str> = rows.iter().map(|r| r.mutant_id.as_str()).collect();
        assert_eq!(ids, vec![SEED_MARKER, "m1", "m2", "m10"]);
    }
}
