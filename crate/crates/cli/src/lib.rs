//! Run records, instance loading and the benchmark harness behind the
//! `skolemfc` binary.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use skolemfc::{
    baseline, brute_force_skolem_count, parse_dimacs_annotated, parse_qdimacs, skolemfc,
    AbortCheck, Budget, Error, ExternalCounter, ExternalSampler, LimitKind, Limits, LogBase,
    LogCount, Oracles, Outcome, RunStats, SkolemConfig, Specification,
};

/// Exit codes of the `count`, `baseline` and `brute` commands.
pub mod exit {
    pub const ESTIMATE: i32 = 0;
    pub const INPUT_ERROR: i32 = 1;
    pub const ABORT: i32 = 2;
    pub const LIMIT: i32 = 3;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleChoice {
    Exact,
    Hash,
    /// A command run as `<cmd> count` and `<cmd> sample`.
    External(String),
}

impl OracleChoice {
    pub fn build(&self) -> anyhow::Result<Oracles> {
        Ok(match self {
            OracleChoice::Exact => Oracles::exact(),
            OracleChoice::Hash => Oracles::hashing(),
            OracleChoice::External(cmd) => Oracles {
                counter: Box::new(ExternalCounter::from_command_line(&format!("{cmd} count"))?),
                sampler: Box::new(ExternalSampler::from_command_line(&format!(
                    "{cmd} sample"
                ))?),
            },
        })
    }
}

impl FromStr for OracleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(OracleChoice::Exact),
            "hash" => Ok(OracleChoice::Hash),
            _ => match s.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(OracleChoice::External(cmd.to_string())),
                _ => Err(format!(
                    "unknown oracle `{s}` (expected exact, hash or external:<cmd>)"
                )),
            },
        }
    }
}

impl fmt::Display for OracleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleChoice::Exact => f.write_str("exact"),
            OracleChoice::Hash => f.write_str("hash"),
            OracleChoice::External(cmd) => write!(f, "external:{cmd}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Skolemfc,
    Baseline,
    Brute,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skolemfc" => Ok(Mode::Skolemfc),
            "baseline" => Ok(Mode::Baseline),
            "brute" => Ok(Mode::Brute),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Skolemfc => "skolemfc",
            Mode::Baseline => "baseline",
            Mode::Brute => "brute",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub oracle: OracleChoice,
    pub log_base: LogBase,
    pub abort_check: AbortCheck,
    pub limits: Limits,
    /// Cap on the inputs the baseline enumerates.
    pub max_inputs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            epsilon: 0.8,
            delta: 0.4,
            seed: 0,
            oracle: OracleChoice::Exact,
            log_base: LogBase::E,
            abort_check: AbortCheck::Effective,
            limits: Limits::unlimited(),
            max_inputs: Some(10_000),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunResult {
    Estimate(LogCount),
    Abort(LogCount),
    Limit(LimitKind),
    /// The instance could not be read or the run failed.
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub mode: Mode,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub result: RunResult,
    pub stats: RunStats,
}

impl RunRecord {
    pub fn status(&self) -> &'static str {
        match self.result {
            RunResult::Estimate(_) => "ok",
            RunResult::Abort(_) => "abort",
            RunResult::Limit(_) => "limit",
            RunResult::Error(_) => "error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.result {
            RunResult::Estimate(_) => exit::ESTIMATE,
            RunResult::Abort(_) => exit::ABORT,
            RunResult::Limit(_) => exit::LIMIT,
            RunResult::Error(_) => exit::INPUT_ERROR,
        }
    }

    pub fn estimate(&self) -> Option<&LogCount> {
        match &self.result {
            RunResult::Estimate(e) | RunResult::Abort(e) => Some(e),
            _ => None,
        }
    }

    fn csv_row(&self) -> CsvRow<'_> {
        let est = match &self.result {
            RunResult::Estimate(e) => Some(e),
            _ => None,
        };
        CsvRow {
            instance: &self.instance,
            mode: self.mode,
            status: self.status(),
            estimate_ln: est.map(LogCount::ln),
            estimate_log2: est.map(LogCount::log2),
            t: self.stats.t,
            sat_calls: self.stats.sat_calls,
            count_calls: self.stats.count_calls,
            sample_calls: self.stats.sample_calls,
            wall_time_s: self.stats.wall_time_s,
            seed: self.seed,
        }
    }

    /// Structured form for `--json`.
    pub fn to_json(&self) -> JsonRecord<'_> {
        let est = self.estimate();
        JsonRecord {
            instance: &self.instance,
            mode: self.mode,
            status: self.status(),
            epsilon: self.epsilon,
            delta: self.delta,
            seed: self.seed,
            estimate_ln: est.map(LogCount::ln),
            estimate_log2: est.map(LogCount::log2),
            exact: est.and_then(|e| e.exact.as_ref()).map(|n| n.to_string()),
            detail: match &self.result {
                RunResult::Limit(kind) => Some(kind.to_string()),
                RunResult::Error(msg) => Some(msg.clone()),
                RunResult::Abort(_) => self.stats.aborted.clone(),
                RunResult::Estimate(_) => None,
            },
            t: self.stats.t,
            x: self.stats.x,
            sat_calls: self.stats.sat_calls,
            count_calls: self.stats.count_calls,
            sample_calls: self.stats.sample_calls,
            clamp_events: self.stats.clamp_events,
            wall_time_s: self.stats.wall_time_s,
        }
    }
}

impl fmt::Display for RunRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance      {}", self.instance)?;
        writeln!(f, "mode          {}", self.mode)?;
        writeln!(f, "status        {}", self.status())?;
        match &self.result {
            RunResult::Estimate(e) | RunResult::Abort(e) => {
                if matches!(self.result, RunResult::Abort(_)) {
                    writeln!(
                        f,
                        "note          counting error check failed; estimate not certified"
                    )?;
                }
                writeln!(f, "estimate ln   {:.6}", e.ln())?;
                writeln!(f, "estimate log2 {:.6}", e.log2())?;
                if let Some(n) = &e.exact {
                    writeln!(f, "exact count   {n}")?;
                }
            }
            RunResult::Limit(kind) => writeln!(f, "limit         {kind}")?,
            RunResult::Error(msg) => writeln!(f, "error         {msg}")?,
        }
        if self.mode == Mode::Skolemfc {
            writeln!(f, "t             {}", self.stats.t)?;
            writeln!(f, "sample calls  {}", self.stats.sample_calls)?;
            writeln!(f, "clamp events  {}", self.stats.clamp_events)?;
        }
        writeln!(f, "count calls   {}", self.stats.count_calls)?;
        writeln!(f, "sat calls     {}", self.stats.sat_calls)?;
        write!(f, "wall time     {:.3}s", self.stats.wall_time_s)
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    mode: Mode,
    status: &'static str,
    estimate_ln: Option<f64>,
    estimate_log2: Option<f64>,
    t: u64,
    sat_calls: u64,
    count_calls: u64,
    sample_calls: u64,
    wall_time_s: f64,
    seed: u64,
}

#[derive(Serialize)]
pub struct JsonRecord<'a> {
    instance: &'a str,
    mode: Mode,
    status: &'static str,
    epsilon: f64,
    delta: f64,
    seed: u64,
    estimate_ln: Option<f64>,
    estimate_log2: Option<f64>,
    exact: Option<String>,
    detail: Option<String>,
    t: u64,
    x: f64,
    sat_calls: u64,
    count_calls: u64,
    sample_calls: u64,
    clamp_events: u64,
    wall_time_s: f64,
}

/// Parses a specification, as QDIMACS if it has quantifier lines and as
/// DIMACS with `c x`/`c y` annotations otherwise.
pub fn parse_spec(text: &str) -> skolemfc::Result<Specification> {
    let quantified = text
        .lines()
        .any(|l| matches!(l.split_whitespace().next(), Some("a" | "e")));
    if quantified {
        parse_qdimacs(text)
    } else {
        parse_dimacs_annotated(text)
    }
}

pub fn load_spec(path: &Path) -> anyhow::Result<Specification> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("parsing {}", path.display()))
}

fn record(
    name: &str,
    mode: Mode,
    opts: &RunOptions,
    result: RunResult,
    stats: RunStats,
) -> RunRecord {
    RunRecord {
        instance: name.to_string(),
        mode,
        epsilon: opts.epsilon,
        delta: opts.delta,
        seed: opts.seed,
        result,
        stats,
    }
}

fn from_outcome(outcome: Outcome) -> RunResult {
    match outcome {
        Outcome::Estimate(e) => RunResult::Estimate(e),
        Outcome::Abort { estimate } => RunResult::Abort(estimate),
        Outcome::Limit(kind) => RunResult::Limit(kind),
    }
}

pub fn run_skolemfc(
    name: &str,
    spec: &Specification,
    opts: &RunOptions,
) -> anyhow::Result<RunRecord> {
    let config = SkolemConfig {
        epsilon: opts.epsilon,
        delta: opts.delta,
        seed: opts.seed,
        log_base: opts.log_base,
        abort_check: opts.abort_check,
    };
    let mut oracles = opts.oracle.build()?;
    let budget = Budget::new(opts.limits);
    let run = skolemfc(spec, &config, &mut oracles, &budget)?;
    Ok(record(
        name,
        Mode::Skolemfc,
        opts,
        from_outcome(run.outcome),
        run.stats,
    ))
}

pub fn run_baseline(
    name: &str,
    spec: &Specification,
    opts: &RunOptions,
) -> anyhow::Result<RunRecord> {
    let budget = Budget::new(opts.limits);
    let run = baseline(spec, opts.max_inputs, opts.log_base, &budget)?;
    Ok(record(
        name,
        Mode::Baseline,
        opts,
        from_outcome(run.outcome),
        run.stats,
    ))
}

pub fn run_brute(name: &str, spec: &Specification, opts: &RunOptions) -> anyhow::Result<RunRecord> {
    let start = std::time::Instant::now();
    let result = match brute_force_skolem_count(spec) {
        Ok(n) => RunResult::Estimate(LogCount::from_exact(n, opts.log_base)),
        Err(Error::Parameter(_)) => RunResult::Limit(LimitKind::Enumeration),
        Err(e) => return Err(e.into()),
    };
    let stats = RunStats {
        wall_time_s: start.elapsed().as_secs_f64(),
        ..RunStats::default()
    };
    Ok(record(name, Mode::Brute, opts, result, stats))
}

pub fn run_mode(
    mode: Mode,
    name: &str,
    spec: &Specification,
    opts: &RunOptions,
) -> anyhow::Result<RunRecord> {
    match mode {
        Mode::Skolemfc => run_skolemfc(name, spec, opts),
        Mode::Baseline => run_baseline(name, spec, opts),
        Mode::Brute => run_brute(name, spec, opts),
    }
}

const INSTANCE_EXTENSIONS: [&str; 3] = ["qdimacs", "cnf", "dimacs"];

/// Instance files in `dir`, sorted by file name.
pub fn list_instances(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let known = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| INSTANCE_EXTENSIONS.contains(&e));
        if path.is_file() && known {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Runs every (instance, mode) pair on a pool of `jobs` workers. Records
/// come back in instance order, then mode order; failures become `error`
/// rows.
pub fn bench(
    paths: &[PathBuf],
    modes: &[Mode],
    opts: &RunOptions,
    jobs: usize,
) -> anyhow::Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building worker pool")?;
    let tasks: Vec<(&PathBuf, Mode)> = paths
        .iter()
        .flat_map(|p| modes.iter().map(move |&m| (p, m)))
        .collect();
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|&(path, mode)| {
                let name = path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                load_spec(path)
                    .and_then(|spec| run_mode(mode, &name, &spec, opts))
                    .unwrap_or_else(|e| {
                        record(
                            &name,
                            mode,
                            opts,
                            RunResult::Error(format!("{e:#}")),
                            RunStats::default(),
                        )
                    })
            })
            .collect()
    }))
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "instance",
            "mode",
            "status",
            "estimate_ln",
            "estimate_log2",
            "t",
            "sat_calls",
            "count_calls",
            "sample_calls",
            "wall_time_s",
            "seed",
        ])?;
    }
    for r in records {
        w.serialize(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_choice_parses() {
        assert_eq!("exact".parse(), Ok(OracleChoice::Exact));
        assert_eq!("hash".parse(), Ok(OracleChoice::Hash));
        assert_eq!(
            "external:mc --fast".parse(),
            Ok(OracleChoice::External("mc --fast".into()))
        );
        assert!("external:".parse::<OracleChoice>().is_err());
        assert!("approx".parse::<OracleChoice>().is_err());
    }

    #[test]
    fn detects_format() {
        let q = "p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n";
        let d = "p cnf 2 1\nc x 1 0\nc y 2 0\n1 2 0\n";
        assert_eq!(parse_spec(q).unwrap(), parse_spec(d).unwrap());
    }

    #[test]
    fn header_only_csv() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "instance,mode,status,estimate_ln,estimate_log2,t,sat_calls,count_calls,sample_calls,wall_time_s,seed\n"
        );
    }

    #[test]
    fn records_for_factorization() {
        let spec = skolemfc::instances::factorization(5);
        let opts = RunOptions::default();
        let b = run_baseline("f5", &spec, &opts).unwrap();
        assert_eq!(b.status(), "ok");
        assert!((b.estimate().unwrap().ln() - 288f64.ln()).abs() < 1e-9);
        let s = run_skolemfc("f5", &spec, &opts).unwrap();
        assert_eq!(s.exit_code(), exit::ESTIMATE);
        let r = run_brute("f5", &spec, &opts).unwrap();
        assert_eq!(
            r.estimate().unwrap().exact.as_ref().unwrap().to_string(),
            "288"
        );
    }
}
