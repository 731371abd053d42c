//! Line-oriented `key = value` run configuration.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Experiment1,
    Experiment2,
    Bego,
}

impl Command {
    pub fn parse(token: &str) -> Option<Command> {
        match token {
            "run" => Some(Command::Run),
            "experiment1" => Some(Command::Experiment1),
            "experiment2" => Some(Command::Experiment2),
            "bego" => Some(Command::Bego),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Experiment1 => "experiment1",
            Command::Experiment2 => "experiment2",
            Command::Bego => "bego",
        }
    }
}

/// Named constraint sets for external evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSet {
    None,
    Riblet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    /// Registered problem name, or "external" for a subprocess evaluator.
    pub problem: String,
    pub external_cmd: Option<String>,
    pub external_lower: Option<Vec<f64>>,
    pub external_upper: Option<Vec<f64>>,
    pub external_constraints: ConstraintSet,
    pub n_initial: usize,
    pub budget: usize,
    pub n_pop: usize,
    pub max_iter: usize,
    pub delta_f: f64,
    pub p_cr: f64,
    pub tau: usize,
    pub eta: Option<f64>,
    pub seed: u64,
    pub penalty_weight: f64,
    pub out_dir: PathBuf,
    /// Benchmark functions for experiment1.
    pub functions: Vec<String>,
    /// Override of the per-function run counts in experiment1.
    pub n_runs: Option<usize>,
    /// Initial sample sizes swept in experiment2.
    pub n0_values: Vec<usize>,
    pub exp2_budget: usize,
    pub exp2_runs: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            command: Command::Run,
            problem: "branin".into(),
            external_cmd: None,
            external_lower: None,
            external_upper: None,
            external_constraints: ConstraintSet::None,
            n_initial: 20,
            budget: 30,
            n_pop: 30,
            max_iter: 100,
            delta_f: 1e-4,
            p_cr: 0.3,
            tau: 3,
            eta: None,
            seed: 0,
            penalty_weight: 1e3,
            out_dir: PathBuf::from("out"),
            functions: vec!["three-hump".into(), "branin".into(), "hartmann6".into()],
            n_runs: None,
            n0_values: vec![60, 90, 120, 150, 180],
            exp2_budget: 210,
            exp2_runs: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "config line {}: {}", self.line, self.message)
        } else {
            write!(f, "config: {}", self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Parse a `key = value` configuration; `#` starts a comment, unknown keys
/// are rejected, missing keys keep their documented defaults.
pub fn parse_config(text: &str) -> Result<CliConfig, ConfigError> {
    let mut cfg = CliConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected `key = value`, got {raw:?}")))?;
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value, line_no)?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn apply_key(
    cfg: &mut CliConfig,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    match key {
        "command" => {
            cfg.command = Command::parse(value).ok_or_else(|| {
                err(
                    line,
                    format!("unknown command {value:?} (run|experiment1|experiment2|bego)"),
                )
            })?;
        }
        "problem" => cfg.problem = value.to_string(),
        "external_cmd" => cfg.external_cmd = Some(value.to_string()),
        "external_lower" => cfg.external_lower = Some(parse_floats(value, line)?),
        "external_upper" => cfg.external_upper = Some(parse_floats(value, line)?),
        "external_constraints" => {
            cfg.external_constraints = match value {
                "none" => ConstraintSet::None,
                "riblet" => ConstraintSet::Riblet,
                other => {
                    return Err(err(
                        line,
                        format!("unknown constraint set {other:?} (none|riblet)"),
                    ))
                }
            };
        }
        "n_initial" => cfg.n_initial = parse_num(value, line)?,
        "budget" => cfg.budget = parse_num(value, line)?,
        "n_pop" => cfg.n_pop = parse_num(value, line)?,
        "max_iter" => cfg.max_iter = parse_num(value, line)?,
        "delta_f" => cfg.delta_f = parse_float(value, line)?,
        "p_cr" => cfg.p_cr = parse_float(value, line)?,
        "tau" => cfg.tau = parse_num(value, line)?,
        "eta" => cfg.eta = Some(parse_float(value, line)?),
        "seed" => cfg.seed = parse_num(value, line)?,
        "penalty_weight" => cfg.penalty_weight = parse_float(value, line)?,
        "out_dir" => cfg.out_dir = PathBuf::from(value),
        "functions" => {
            cfg.functions = value.split_whitespace().map(str::to_string).collect();
        }
        "n_runs" => cfg.n_runs = Some(parse_num(value, line)?),
        "n0_values" => {
            cfg.n0_values = value
                .split_whitespace()
                .map(|t| parse_num(t, line))
                .collect::<Result<_, _>>()?;
        }
        "exp2_budget" => cfg.exp2_budget = parse_num(value, line)?,
        "exp2_runs" => cfg.exp2_runs = parse_num(value, line)?,
        other => return Err(err(line, format!("unknown key {other:?}"))),
    }
    Ok(())
}

fn parse_float(token: &str, line: usize) -> Result<f64, ConfigError> {
    token
        .parse()
        .map_err(|_| err(line, format!("malformed number {token:?}")))
}

fn parse_floats(tokens: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    tokens
        .split_whitespace()
        .map(|t| parse_float(t, line))
        .collect()
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, ConfigError> {
    token
        .parse()
        .map_err(|_| err(line, format!("malformed integer {token:?}")))
}

fn validate(cfg: &CliConfig) -> Result<(), ConfigError> {
    if !(cfg.p_cr > 0.0 && cfg.p_cr < 1.0) {
        return Err(err(
            0,
            format!("p_cr must lie strictly inside (0,1), got {}", cfg.p_cr),
        ));
    }
    if cfg.tau < 1 {
        return Err(err(0, "tau must be at least 1"));
    }
    if !(cfg.delta_f > 0.0) {
        return Err(err(0, format!("delta_f must be positive, got {}", cfg.delta_f)));
    }
    if cfg.n_pop < 2 {
        return Err(err(0, format!("n_pop must be at least 2, got {}", cfg.n_pop)));
    }
    if cfg.max_iter < 1 {
        return Err(err(0, "max_iter must be at least 1"));
    }
    if cfg.budget < cfg.n_initial {
        return Err(err(
            0,
            format!(
                "budget ({}) must cover the initial sample size ({})",
                cfg.budget, cfg.n_initial
            ),
        ));
    }
    if cfg.penalty_weight < 0.0 {
        return Err(err(
            0,
            format!("penalty_weight must be nonnegative, got {}", cfg.penalty_weight),
        ));
    }
    if let Some(eta) = cfg.eta {
        if !(eta > 0.0) {
            return Err(err(0, format!("eta must be positive, got {eta}")));
        }
    }
    if cfg.problem == "external" {
        if cfg.external_cmd.is_none() {
            return Err(err(0, "problem = external requires external_cmd"));
        }
        match (&cfg.external_lower, &cfg.external_upper) {
            (Some(lo), Some(hi)) if lo.len() == hi.len() && !lo.is_empty() => {}
            _ => {
                return Err(err(
                    0,
                    "problem = external requires matching external_lower/external_upper bounds",
                ))
            }
        }
    }
    Ok(())
}

/// Render every field back to the `key = value` form; the result parses to
/// an equal config.
pub fn render_config(cfg: &CliConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("command = {}\n", cfg.command.as_str()));
    out.push_str(&format!("problem = {}\n", cfg.problem));
    if let Some(cmd) = &cfg.external_cmd {
        out.push_str(&format!("external_cmd = {cmd}\n"));
    }
    if let Some(lo) = &cfg.external_lower {
        out.push_str(&format!("external_lower = {}\n", join_floats(lo)));
    }
    if let Some(hi) = &cfg.external_upper {
        out.push_str(&format!("external_upper = {}\n", join_floats(hi)));
    }
    out.push_str(&format!(
        "external_constraints = {}\n",
        match cfg.external_constraints {
            ConstraintSet::None => "none",
            ConstraintSet::Riblet => "riblet",
        }
    ));
    out.push_str(&format!("n_initial = {}\n", cfg.n_initial));
    out.push_str(&format!("budget = {}\n", cfg.budget));
    out.push_str(&format!("n_pop = {}\n", cfg.n_pop));
    out.push_str(&format!("max_iter = {}\n", cfg.max_iter));
    out.push_str(&format!("delta_f = {}\n", cfg.delta_f));
    out.push_str(&format!("p_cr = {}\n", cfg.p_cr));
    out.push_str(&format!("tau = {}\n", cfg.tau));
    if let Some(eta) = cfg.eta {
        out.push_str(&format!("eta = {eta}\n"));
    }
    out.push_str(&format!("seed = {}\n", cfg.seed));
    out.push_str(&format!("penalty_weight = {}\n", cfg.penalty_weight));
    out.push_str(&format!("out_dir = {}\n", cfg.out_dir.display()));
    out.push_str(&format!("functions = {}\n", cfg.functions.join(" ")));
    if let Some(n) = cfg.n_runs {
        out.push_str(&format!("n_runs = {n}\n"));
    }
    let n0: Vec<String> = cfg.n0_values.iter().map(|v| v.to_string()).collect();
    out.push_str(&format!("n0_values = {}\n", n0.join(" ")));
    out.push_str(&format!("exp2_budget = {}\n", cfg.exp2_budget));
    out.push_str(&format!("exp2_runs = {}\n", cfg.exp2_runs));
    out
}

fn join_floats(vals: &[f64]) -> String {
    vals.iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let cfg = parse_config("p_cr = 0.3\nproblem = branin\n").unwrap();
        assert_eq!(cfg.problem, "branin");
        assert_eq!(cfg.tau, 3);
        assert_eq!(cfg.n_pop, 30);
        assert_eq!(cfg.delta_f, 1e-4);
        assert_eq!(cfg.command, Command::Run);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = parse_config("tau = 2\n# full comment\n\nseed = 9 # trailing\n").unwrap();
        assert_eq!(cfg.tau, 2);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn p_cr_bound_cited() {
        let e = parse_config("p_cr = 1.5\n").unwrap_err();
        assert!(e.message.contains("(0,1)"), "{e}");
    }

    #[test]
    fn unknown_key_rejected_with_line_number() {
        let e = parse_config("tau = 2\nnot_a_key = 5\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("not_a_key"));
    }

    #[test]
    fn malformed_value_names_line() {
        let e = parse_config("n_pop = banana\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn budget_must_cover_initial() {
        let e = parse_config("n_initial = 50\nbudget = 30\n").unwrap_err();
        assert!(e.message.contains("budget"));
    }

    #[test]
    fn external_requires_bounds() {
        let e = parse_config("problem = external\nexternal_cmd = ./sim\n").unwrap_err();
        assert!(e.message.contains("bounds"), "{e}");
        let ok = parse_config(
            "problem = external\nexternal_cmd = ./sim\nexternal_lower = 0 0\nexternal_upper = 1 1\n",
        )
        .unwrap();
        assert_eq!(ok.external_lower, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn roundtrip_default_and_custom() {
        let cfg = CliConfig::default();
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);

        let custom = parse_config(
            "command = experiment2\nproblem = hartmann6\nn_initial = 60\nbudget = 90\n\
             n_pop = 60\nmax_iter = 100\ndelta_f = 0.001\np_cr = 0.2\ntau = 2\neta = 0.05\n\
             seed = 17\npenalty_weight = 10000\nout_dir = results/exp2\n\
             functions = branin hartmann6\nn_runs = 4\nn0_values = 60 120 180\n\
             exp2_budget = 210\nexp2_runs = 10\n",
        )
        .unwrap();
        assert_eq!(parse_config(&render_config(&custom)).unwrap(), custom);
    }
}
