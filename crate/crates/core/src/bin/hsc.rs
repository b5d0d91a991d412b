use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use hsc::bench::{generate_benchmark, sweep, time_trend_violations, write_csv, BenchmarkParams, SweepConfig};
use hsc::checkers::{CheckOptions, Engine, Limits};
use hsc::encoding::EncodingLayout;
use hsc::model::Environment;
use hsc::run::{run_with, Abstraction, OutputFormat, RunConfig, RunError, EXIT_ERROR};
use hsc::smt::{default_solver_command, SolverConfig};

#[derive(Parser)]
#[command(name = "hsc", version, about = "Symbolic safety checking of hierarchical statecharts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that no error configuration is reachable.
    Check(CheckArgs),
    /// Print the state encoding of a model.
    Layout {
        #[arg(long)]
        model: PathBuf,
    },
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct SolverArgs {
    /// Solver command line; defaults to $HSC_SOLVER or `z3 -in`.
    #[arg(long)]
    solver: Option<String>,
    /// Wall-clock limit per run, in seconds.
    #[arg(long, default_value_t = 300)]
    timeout: u64,
    #[arg(long, default_value_t = 1_000_000)]
    config_limit: usize,
    #[arg(long, default_value_t = 50)]
    kmax: usize,
    #[arg(long, value_enum, default_value = "closed")]
    env: EnvArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum EnvArg {
    Closed,
    Open,
}

impl SolverArgs {
    fn options(&self, transcript: Option<PathBuf>) -> CheckOptions {
        CheckOptions {
            env: match self.env {
                EnvArg::Closed => Environment::Closed,
                EnvArg::Open => Environment::Open,
            },
            limits: Limits {
                timeout: Duration::from_secs(self.timeout),
                config_limit: self.config_limit,
                k_max: self.kmax,
            },
            solver: SolverConfig {
                command: self.solver.clone().unwrap_or_else(default_solver_command),
                transcript,
                ..SolverConfig::default()
            },
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "oao")]
    engine: Engine,
    #[arg(long, default_value = "gen")]
    abstraction: Abstraction,
    #[command(flatten)]
    solver: SolverArgs,
    /// Machine-readable report on stdout and errors on stderr.
    #[arg(long)]
    json: bool,
    /// Per-iteration progress as JSON lines on stderr.
    #[arg(long)]
    progress: bool,
    /// Write the solver conversation of the last session to this file.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Write a family member and its two error specs.
    Generate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run engines over a range of counter maxima and print CSV.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        /// Inclusive range such as `1..4`.
        #[arg(long, default_value = "1..4")]
        range: String,
        #[arg(long, value_delimiter = ',', default_value = "mon,mop,oao,bmc")]
        engines: Vec<Engine>,
        #[arg(long, value_delimiter = ',', default_value = "stt,gen")]
        abstractions: Vec<Abstraction>,
        #[arg(long)]
        reachable: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 2)]
    counter_max: u32,
    #[arg(long, default_value_t = 3)]
    regions: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ParamArgs {
    fn params(&self) -> BenchmarkParams {
        BenchmarkParams {
            counter_max: self.counter_max,
            parallel_regions: self.regions,
            hierarchy_depth: self.depth,
            seed: self.seed,
        }
    }
}

fn parse_range(s: &str) -> Result<Vec<u32>, String> {
    let (a, b) = s.split_once("..").ok_or("expected a range like 1..4")?;
    let lo: u32 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let hi: u32 = b.trim_start_matches('=').trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    Ok((lo..=hi).collect())
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_ERROR as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check(a) => {
            let config = RunConfig {
                model: a.model,
                spec: a.spec,
                engine: a.engine,
                abstraction: a.abstraction,
                limits: a.solver.options(None).limits,
                solver: a.solver.options(a.transcript).solver,
                env: a.solver.options(None).env,
                format: if a.json { OutputFormat::Json } else { OutputFormat::Text },
            };
            let progress = a.progress;
            let mut on_iter = |r: &hsc::cegar::IterationRecord| {
                if progress {
                    eprintln!("{}", serde_json::to_string(r).expect("record serializes"));
                }
            };
            match run_with(&config, &mut on_iter) {
                Ok(report) => {
                    match config.format {
                        OutputFormat::Json => println!("{}", report.to_json()),
                        OutputFormat::Text => print!("{}", report.to_text()),
                    }
                    ExitCode::from(report.exit_code as u8)
                }
                Err(e) => {
                    if a.json {
                        eprintln!("{}", e.to_json());
                    } else if matches!(e, RunError::Parse { .. }) {
                        eprintln!("{e}");
                    } else {
                        eprintln!("error: {e}");
                    }
                    ExitCode::from(EXIT_ERROR as u8)
                }
            }
        }
        Command::Layout { model } => {
            let text = match std::fs::read_to_string(&model) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", model.display())),
            };
            match hsc::parser::parse_statechart(&text) {
                Ok(sc) => {
                    print!("{}", EncodingLayout::build(&sc).dump());
                    ExitCode::SUCCESS
                }
                Err(d) => {
                    let file = model.display().to_string();
                    for x in &d {
                        eprintln!("{}", x.located(&file));
                    }
                    ExitCode::from(EXIT_ERROR as u8)
                }
            }
        }
        Command::Bench(BenchCommand::Generate { params, out }) => {
            let b = match generate_benchmark(params.params()) {
                Ok(b) => b,
                Err(e) => return fail(e),
            };
            let stem = out.join(b.file_stem());
            let files = [
                (stem.with_extension("hsc"), &b.model),
                (out.join(format!("{}_reachable.spec", b.file_stem())), &b.reachable_spec),
                (out.join(format!("{}_unreachable.spec", b.file_stem())), &b.unreachable_spec),
            ];
            for (path, text) in files {
                if let Err(e) = std::fs::write(&path, text) {
                    return fail(format!("{}: {e}", path.display()));
                }
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Command::Bench(BenchCommand::Sweep {
            params,
            range,
            engines,
            abstractions,
            reachable,
            jobs,
            solver,
        }) => {
            let counter_max = match parse_range(&range) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let cfg = SweepConfig {
                base: params.params(),
                counter_max,
                engines,
                abstractions,
                reachable,
                options: solver.options(None),
                jobs,
            };
            let rows = sweep(&cfg);
            for w in time_trend_violations(&rows) {
                eprintln!("warning: time not monotone: {w}");
            }
            match write_csv(&rows, std::io::stdout()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
    }
}
