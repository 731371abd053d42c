//! Configuration-driven entry point: single optimization runs, the
//! benchmark experiments, the sequential-EI baseline, and a built-in mock
//! evaluator demonstrating the external subprocess protocol.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure.

mod config;
mod output;

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use amrpbs::amr::AmrConfig;
use amrpbs::benchmarks::{
    self, experiment1, experiment2, riblet_mock_objective, run_bego, BenchmarkSpec,
};
use amrpbs::optimizer::{run_amr_pbs, RunConfig, RunError};
use amrpbs::problem::{DesignSpace, ExternalEvaluator, Problem};

use config::{parse_config, CliConfig, Command, ConfigError, ConstraintSet};

const USAGE: &str = "usage: amrpbs [run|experiment1|experiment2|bego] [--config FILE] [--seed N] [--out DIR]
       amrpbs mock-riblet-evaluator

The config file is line-oriented `key = value`; see README for the keys.
The AMRPBS_OUT environment variable overrides the configured output
directory; --out overrides both.";

const OUT_ENV: &str = "AMRPBS_OUT";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.first().map(String::as_str) == Some("mock-riblet-evaluator") {
        return run_mock_evaluator();
    }
    match drive(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn drive(args: &[String]) -> Result<(), Failure> {
    let mut command_arg: Option<Command> = None;
    let mut config_path: Option<PathBuf> = None;
    let mut seed_arg: Option<u64> = None;
    let mut out_arg: Option<PathBuf> = None;

    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--help" | "-h" => {
                println!("{USAGE}");
                return Ok(());
            }
            "--config" => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::Config("--config needs a file path".into()))?;
                config_path = Some(PathBuf::from(v));
            }
            "--seed" => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::Config("--seed needs an integer".into()))?;
                seed_arg = Some(
                    v.parse()
                        .map_err(|_| Failure::Config(format!("malformed seed {v:?}")))?,
                );
            }
            "--out" => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::Config("--out needs a directory".into()))?;
                out_arg = Some(PathBuf::from(v));
            }
            other if !other.starts_with('-') && command_arg.is_none() => {
                command_arg = Some(Command::parse(other).ok_or_else(|| {
                    Failure::Config(format!("unknown command {other:?}\n{USAGE}"))
                })?);
            }
            other => {
                return Err(Failure::Config(format!(
                    "unknown argument {other:?}\n{USAGE}"
                )))
            }
        }
    }

    let text = match &config_path {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            Failure::Config(format!("cannot read config {}: {e}", path.display()))
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(c) = command_arg {
        cfg.command = c;
    }
    if let Some(s) = seed_arg {
        cfg.seed = s;
    }
    if let Ok(env_out) = std::env::var(OUT_ENV) {
        cfg.out_dir = PathBuf::from(env_out);
    }
    if let Some(out) = out_arg {
        cfg.out_dir = out;
    }

    match cfg.command {
        Command::Run => run_single(&cfg),
        Command::Bego => bego(&cfg),
        Command::Experiment1 => exp1(&cfg),
        Command::Experiment2 => exp2(&cfg),
    }
}

/// Record the effective configuration next to the outputs so a run can be
/// reproduced from its directory alone.
fn persist_config(cfg: &CliConfig) -> Result<(), Failure> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join("config.used"), config::render_config(cfg))?;
    Ok(())
}

fn build_problem(cfg: &CliConfig) -> Result<Problem, Failure> {
    if cfg.problem == "external" {
        let cmdline = cfg.external_cmd.as_ref().expect("validated");
        let mut parts = cmdline.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| Failure::Config("external_cmd is empty".into()))?;
        let args: Vec<String> = parts.map(str::to_string).collect();
        let evaluator = ExternalEvaluator::spawn(program, &args)
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        let space = DesignSpace::new(
            cfg.external_lower.clone().expect("validated"),
            cfg.external_upper.clone().expect("validated"),
        )
        .map_err(|e| Failure::Config(e.to_string()))?;
        let mut problem = Problem::external("external", space, evaluator);
        if cfg.external_constraints == ConstraintSet::Riblet {
            problem = problem
                .with_constraint(|x| 6.0 * x[2] - x[1])
                .with_constraint(|x| x[1] - 6.0 * x[0])
                .with_constraint(|x| x[2] - 0.6 * x[0]);
        }
        Ok(problem)
    } else {
        benchmarks::problem_by_name(&cfg.problem).ok_or_else(|| {
            Failure::Config(format!(
                "unknown problem {:?} (three-hump|branin|hartmann6|riblet-mock|external)",
                cfg.problem
            ))
        })
    }
}

fn run_config_of(cfg: &CliConfig) -> RunConfig {
    let mut amr = AmrConfig::new(cfg.p_cr, cfg.tau);
    amr.eta = cfg.eta;
    RunConfig {
        n_initial: cfg.n_initial,
        budget: cfg.budget,
        n_pop: cfg.n_pop,
        max_iter: cfg.max_iter,
        delta_f: cfg.delta_f,
        amr,
        seed: cfg.seed,
        penalty_weight: cfg.penalty_weight,
    }
}

fn run_single(cfg: &CliConfig) -> Result<(), Failure> {
    persist_config(cfg)?;
    let problem = build_problem(cfg)?;
    let run_cfg = run_config_of(cfg);
    match run_amr_pbs(&problem, &run_cfg) {
        Ok(trace) => {
            let files = output::emit_run_outputs(&trace, &cfg.out_dir)?;
            if let Some(f) = &trace.final_result {
                println!(
                    "optimum {:?} surrogate {} true {:?} after {} evaluations",
                    f.point, f.surrogate_value, f.true_value, trace.evals_used
                );
            }
            println!("wrote {} files to {}", files.len(), cfg.out_dir.display());
            Ok(())
        }
        Err(RunError::Config(msg)) => Err(Failure::Config(msg)),
        Err(RunError::Aborted { cause, trace }) => {
            // Persist what we have before reporting the failure.
            let _ = output::emit_run_outputs(&trace, &cfg.out_dir);
            Err(Failure::Runtime(format!(
                "{cause} (partial trace written to {})",
                cfg.out_dir.display()
            )))
        }
    }
}

fn bego(cfg: &CliConfig) -> Result<(), Failure> {
    persist_config(cfg)?;
    let problem = build_problem(cfg)?;
    match run_bego(&problem, cfg.n_initial, cfg.budget, cfg.seed) {
        Ok(result) => {
            output::emit_bego_outputs(&result, &cfg.out_dir)?;
            println!(
                "bego optimum {:?} value {} after {} evaluations",
                result.final_point, result.final_value, result.evaluations_used
            );
            Ok(())
        }
        Err(RunError::Config(msg)) => Err(Failure::Config(msg)),
        Err(RunError::Aborted { cause, .. }) => Err(Failure::Runtime(cause)),
    }
}

fn exp1(cfg: &CliConfig) -> Result<(), Failure> {
    persist_config(cfg)?;
    let mut specs = Vec::new();
    for name in &cfg.functions {
        let mut spec = BenchmarkSpec::table_row(name).ok_or_else(|| {
            Failure::Config(format!("{name:?} is not a benchmark function"))
        })?;
        if let Some(n) = cfg.n_runs {
            spec.n_runs = n;
        }
        specs.push(spec);
    }
    let rows = match experiment1(&specs, None) {
        Ok(rows) => rows,
        Err(RunError::Config(msg)) => return Err(Failure::Config(msg)),
        Err(RunError::Aborted { cause, .. }) => return Err(Failure::Runtime(cause)),
    };
    output::emit_experiment1_outputs(&rows, &cfg.out_dir)?;
    print!("{}", benchmarks::render_markdown_table(&rows));
    Ok(())
}

fn exp2(cfg: &CliConfig) -> Result<(), Failure> {
    persist_config(cfg)?;
    let table = match experiment2(&cfg.n0_values, cfg.exp2_budget, cfg.exp2_runs, cfg.seed) {
        Ok(t) => t,
        Err(RunError::Config(msg)) => return Err(Failure::Config(msg)),
        Err(RunError::Aborted { cause, .. }) => return Err(Failure::Runtime(cause)),
    };
    output::emit_experiment2_outputs(&table, &cfg.out_dir)?;
    print!("{}", benchmarks::render_experiment2_summary(&table));
    Ok(())
}

/// Stand-in for an expensive simulation: one design point per input line
/// (h s sigma), one objective value per output line. Demonstrates the
/// subprocess protocol end to end.
fn run_mock_evaluator() -> ExitCode {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in stdin.lock().lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                eprintln!("mock evaluator: {e}");
                return ExitCode::from(2);
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        let coords: Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        match coords {
            Ok(x) if x.len() == 3 => {
                let value = riblet_mock_objective(&x);
                if writeln!(out, "{value}").and_then(|_| out.flush()).is_err() {
                    return ExitCode::from(2);
                }
            }
            _ => {
                eprintln!("mock evaluator: expected 3 decimals per line, got {line:?}");
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::SUCCESS
}
