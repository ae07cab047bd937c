use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use skolemfc::count::HashCounter;
use skolemfc::parse::to_projected_dimacs;
use skolemfc::{
    build_g, instances, parse_projected_dimacs, to_qdimacs, AbortCheck, Budget, Counter, Error,
    Limits, LogBase, Sampler, SelfReducibleSampler,
};
use skolemfc_cli::{
    bench, exit, list_instances, load_spec, run_mode, write_csv, Mode, OracleChoice, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "skolemfc",
    version,
    about = "Count Skolem functions of Boolean specifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the log of the Skolem function count.
    Count {
        path: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact count by enumerating inputs with several outputs.
    Baseline {
        path: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact count from the full truth table (small instances only).
    Brute {
        path: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every instance of a directory and write one CSV row per
    /// instance and mode.
    Bench {
        dir: PathBuf,
        /// Comma-separated modes: skolemfc, baseline, brute.
        #[arg(long, default_value = "skolemfc,baseline", value_delimiter = ',')]
        modes: Vec<Mode>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a generated specification as QDIMACS.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Print the doubled formula as DIMACS projected on the inputs.
    Doubled { path: PathBuf },
    /// Oracle process protocol over projected DIMACS on stdin.
    #[command(hide = true)]
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 0.8)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// exact, hash or external:<cmd>
    #[arg(long, default_value = "exact")]
    oracle: OracleChoice,
    /// e or 2; both are always printed, this sets the reported base.
    #[arg(long, default_value = "e")]
    log_base: LogBase,
    #[arg(long)]
    max_sat_calls: Option<u64>,
    #[arg(long)]
    timeout_s: Option<f64>,
    /// Inputs the baseline may enumerate before giving up.
    #[arg(long, default_value_t = 10_000)]
    max_inputs: usize,
    /// Check the counting error against the nominal per-input tolerance
    /// instead of the one the counter achieved.
    #[arg(long)]
    nominal_abort_check: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Print the record as JSON.
    #[arg(long)]
    json: bool,
}

impl RunArgs {
    fn options(&self) -> anyhow::Result<RunOptions> {
        let timeout = self
            .timeout_s
            .map(Duration::try_from_secs_f64)
            .transpose()
            .context("--timeout-s must be a non-negative number of seconds")?;
        Ok(RunOptions {
            epsilon: self.epsilon,
            delta: self.delta,
            seed: self.seed,
            oracle: self.oracle.clone(),
            log_base: self.log_base,
            abort_check: if self.nominal_abort_check {
                AbortCheck::Nominal
            } else {
                AbortCheck::Effective
            },
            limits: Limits {
                max_sat_calls: self.max_sat_calls,
                timeout,
            },
            max_inputs: Some(self.max_inputs),
        })
    }
}

#[derive(Subcommand)]
enum Family {
    /// X = Y0·Y1 with 2 ≤ Y0 ≤ Y1.
    Factorization {
        #[arg(long, default_value_t = 5)]
        bits: u32,
    },
    /// Outputs are prefix parities of the inputs; one Skolem function.
    Xor {
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
    /// A contradiction.
    Unsat,
    /// n inputs, two outputs, nearly unconstrained.
    Wide {
        #[arg(long, default_value_t = 14)]
        n: u32,
    },
    /// Random k-CNF.
    Random {
        #[arg(long, default_value_t = 5)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, default_value_t = 10)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Print the projected model count.
    Count,
    /// Print one uniformly drawn projected model.
    Sample,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::INPUT_ERROR as u8)
        }
    }
}

fn single(mode: Mode, path: &Path, args: &RunArgs) -> anyhow::Result<i32> {
    let spec = load_spec(path)?;
    let name = path.display().to_string();
    let record = run_mode(mode, &name, &spec, &args.options()?)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&record.to_json())?);
    } else {
        println!("{record}");
    }
    Ok(record.exit_code())
}

fn write_output(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Count { path, run } => single(Mode::Skolemfc, &path, &run),
        Command::Baseline { path, run } => single(Mode::Baseline, &path, &run),
        Command::Brute { path, run } => single(Mode::Brute, &path, &run),
        Command::Bench {
            dir,
            modes,
            output,
            run,
        } => {
            let paths = list_instances(&dir)?;
            let records = bench(&paths, &modes, &run.options()?, run.jobs)?;
            match output {
                Some(p) => {
                    let file = fs::File::create(&p)
                        .with_context(|| format!("creating {}", p.display()))?;
                    write_csv(&records, file)?;
                }
                None => write_csv(&records, io::stdout().lock())?,
            }
            Ok(exit::ESTIMATE)
        }
        Command::Gen { family, output } => {
            let spec = match family {
                Family::Factorization { bits } => {
                    anyhow::ensure!((1..=8).contains(&bits), "--bits must be between 1 and 8");
                    instances::factorization(bits)
                }
                Family::Xor { n } => instances::xor_chain(n.max(1)),
                Family::Unsat => instances::unsat(),
                Family::Wide { n } => instances::wide(n.max(2)),
                Family::Random {
                    n,
                    m,
                    clauses,
                    width,
                    seed,
                } => {
                    anyhow::ensure!(m >= 1, "--m must be positive");
                    anyhow::ensure!(
                        (1..=(n + m) as usize).contains(&width),
                        "--width must be between 1 and n + m"
                    );
                    instances::random_spec(n, m, clauses, width, seed)
                }
            };
            write_output(output.as_deref(), &to_qdimacs(&spec))?;
            Ok(exit::ESTIMATE)
        }
        Command::Doubled { path } => {
            let spec = load_spec(&path)?;
            print!("{}", to_projected_dimacs(&build_g(&spec).formula));
            Ok(exit::ESTIMATE)
        }
        Command::Oracle { op } => oracle(op),
    }
}

/// Answers one oracle query: exit 0 with a count or model on stdout, or 20
/// when there is nothing to sample.
fn oracle(op: OracleOp) -> anyhow::Result<i32> {
    let mut text = String::new();
    io::stdin().read_to_string(&mut text)?;
    let pf = parse_projected_dimacs(&text)?;
    let budget = Budget::unlimited();
    let mut rng = rand::rng();
    match op {
        OracleOp::Count => {
            let r = HashCounter::new().count(&pf, 0.8, 0.2, &mut rng, &budget)?;
            println!("{}", r.count);
            Ok(0)
        }
        OracleOp::Sample => match SelfReducibleSampler::new().sample(&pf, 0.0, &mut rng, &budget) {
            Ok(s) => {
                let lits: Vec<String> = s.assignment.literals().map(|l| l.to_string()).collect();
                println!("v {} 0", lits.join(" "));
                Ok(0)
            }
            Err(Error::Unsatisfiable) => Ok(20),
            Err(e) => Err(e.into()),
        },
    }
}
