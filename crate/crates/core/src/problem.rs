//! Design spaces, objective problems, constraint penalization, Latin
//! hypercube sampling, and the adaptive sampling-range bounds.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Two points are considered duplicates when every coordinate agrees within
/// this tolerance; duplicate samples make the kernel systems singular.
pub const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("duplicate sample point (matches existing point {existing} within {tol:e} per coordinate)")]
    DuplicatePoint { existing: usize, tol: f64 },
    #[error("evaluator failure: {0}")]
    EvaluatorFailure(String),
}

/// A box-bounded continuous design space.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DesignSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ProblemError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(ProblemError::InvalidArgument(format!(
                "bound vectors must be non-empty and of equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(ProblemError::InvalidArgument(format!(
                    "dimension {j}: lower bound {lo} must be strictly below upper bound {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Unit hypercube [0,1]^dims.
    pub fn unit(dims: usize) -> Self {
        Self::new(vec![0.0; dims], vec![1.0; dims]).expect("unit cube")
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Clip `x` to the box in place; returns the indices that were clipped.
    pub fn clip(&self, x: &mut [f64]) -> Vec<usize> {
        let mut clipped = Vec::new();
        for (j, v) in x.iter_mut().enumerate() {
            if *v < self.lower[j] {
                *v = self.lower[j];
                clipped.push(j);
            } else if *v > self.upper[j] {
                *v = self.upper[j];
                clipped.push(j);
            }
        }
        clipped
    }
}

/// Paired design points and high-fidelity responses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    responses: Vec<f64>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(
        points: Vec<Vec<f64>>,
        responses: Vec<f64>,
    ) -> Result<Self, ProblemError> {
        if points.len() != responses.len() {
            return Err(ProblemError::InvalidArgument(format!(
                "{} points but {} responses",
                points.len(),
                responses.len()
            )));
        }
        let mut set = Self::new();
        for (p, y) in points.into_iter().zip(responses) {
            set.push(p, y)?;
        }
        Ok(set)
    }

    /// Append a sample, rejecting near-duplicates of existing points.
    pub fn push(&mut self, point: Vec<f64>, response: f64) -> Result<(), ProblemError> {
        if let Some(first) = self.points.first() {
            if point.len() != first.len() {
                return Err(ProblemError::InvalidArgument(format!(
                    "point has {} coordinates, expected {}",
                    point.len(),
                    first.len()
                )));
            }
        }
        if let Some(existing) = self.find_duplicate(&point) {
            return Err(ProblemError::DuplicatePoint {
                existing,
                tol: DUPLICATE_TOL,
            });
        }
        self.points.push(point);
        self.responses.push(response);
        Ok(())
    }

    /// Index of an existing point matching `x` within [`DUPLICATE_TOL`] per
    /// coordinate, if any.
    pub fn find_duplicate(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| {
            p.len() == x.len()
                && p.iter()
                    .zip(x)
                    .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL)
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// Sub-selection by index, preserving order.
    pub fn subset(&self, indices: &[usize]) -> SampleSet {
        SampleSet {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            responses: indices.iter().map(|&i| self.responses[i]).collect(),
        }
    }
}

/// How costly the objective is to evaluate; drives batching and logging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModel {
    CheapAnalytic,
    ExpensiveExternal,
}

type AnalyticFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Objective {
    Analytic(AnalyticFn),
    External(Arc<Mutex<ExternalEvaluator>>),
}

/// An optimization problem: space, objective, optional inequality
/// constraints g_i(x) <= 0 and a known optimum for benchmarking.
#[derive(Clone)]
pub struct Problem {
    name: String,
    space: DesignSpace,
    objective: Objective,
    constraints: Vec<AnalyticFn>,
    known_optimum: Option<(Vec<f64>, f64)>,
    cost: CostModel,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("constraints", &self.constraints.len())
            .field("known_optimum", &self.known_optimum)
            .field("cost", &self.cost)
            .finish()
    }
}

impl Problem {
    pub fn analytic(
        name: impl Into<String>,
        space: DesignSpace,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            space,
            objective: Objective::Analytic(Arc::new(objective)),
            constraints: Vec::new(),
            known_optimum: None,
            cost: CostModel::CheapAnalytic,
        }
    }

    pub fn external(
        name: impl Into<String>,
        space: DesignSpace,
        evaluator: ExternalEvaluator,
    ) -> Self {
        Self {
            name: name.into(),
            space,
            objective: Objective::External(Arc::new(Mutex::new(evaluator))),
            constraints: Vec::new(),
            known_optimum: None,
            cost: CostModel::ExpensiveExternal,
        }
    }

    pub fn with_constraint(
        mut self,
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.constraints.push(Arc::new(g));
        self
    }

    /// Attach the known optimum; checks objective(argmin) against `f_star`
    /// within 1e-6 relative for analytic objectives.
    pub fn with_known_optimum(
        mut self,
        argmin: Vec<f64>,
        f_star: f64,
    ) -> Result<Self, ProblemError> {
        if let Objective::Analytic(f) = &self.objective {
            let got = f(&argmin);
            let denom = f_star.abs().max(1.0);
            if (got - f_star).abs() / denom > 1e-6 {
                return Err(ProblemError::InvalidArgument(format!(
                    "objective at claimed argmin is {got}, expected {f_star}"
                )));
            }
        }
        self.known_optimum = Some((argmin, f_star));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    pub fn constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn known_optimum(&self) -> Option<(&[f64], f64)> {
        self.known_optimum.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }

    pub fn cost_model(&self) -> CostModel {
        self.cost
    }

    /// One true (high-fidelity) evaluation of the raw objective.
    pub fn eval(&self, x: &[f64]) -> Result<f64, ProblemError> {
        match &self.objective {
            Objective::Analytic(f) => Ok(f(x)),
            Objective::External(ev) => {
                let mut guard = ev.lock().expect("evaluator mutex poisoned");
                let mut out = guard.eval_batch(std::slice::from_ref(&x.to_vec()))?;
                Ok(out.pop().expect("one response per point"))
            }
        }
    }

    /// Evaluate a batch of points. Analytic objectives fan out across
    /// threads; external evaluators receive the whole batch at once so the
    /// child process can parallelize internally. Either way responses come
    /// back in input order.
    pub fn eval_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>, ProblemError> {
        match &self.objective {
            Objective::Analytic(f) => {
                use rayon::prelude::*;
                Ok(xs.par_iter().map(|x| f(x)).collect())
            }
            Objective::External(ev) => {
                let mut guard = ev.lock().expect("evaluator mutex poisoned");
                guard.eval_batch(xs)
            }
        }
    }

    /// Sum of squared constraint violations scaled by `weight`.
    pub fn constraint_penalty(&self, x: &[f64], weight: f64) -> f64 {
        weight
            * self
                .constraints
                .iter()
                .map(|g| g(x).max(0.0).powi(2))
                .sum::<f64>()
    }

    /// Largest constraint violation max_i g_i(x)^+ (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|g| g(x).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// f(x) + weight * Σ max(0, g_i(x))²; equals f(x) whenever every constraint
/// is satisfied.
pub fn penalized_objective(
    problem: &Problem,
    x: &[f64],
    penalty_weight: f64,
) -> Result<f64, ProblemError> {
    assert!(penalty_weight >= 0.0, "penalty weight must be nonnegative");
    Ok(problem.eval(x)? + problem.constraint_penalty(x, penalty_weight))
}

/// Latin hypercube sample: `n` points, one per equal-width stratum in every
/// dimension. Deterministic given `seed`.
pub fn lhs_sample(space: &DesignSpace, n: usize, seed: u64) -> Result<Vec<Vec<f64>>, ProblemError> {
    if n == 0 {
        return Err(ProblemError::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = space.dims();
    let mut coords = vec![vec![0.0; n]; dims];
    for (j, col) in coords.iter_mut().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            col[i] = space.lower[j] + (s as f64 + u) / n as f64 * space.width(j);
        }
    }
    Ok((0..n)
        .map(|i| (0..dims).map(|j| coords[j][i]).collect())
        .collect())
}

/// The region currently spanned by the search, used to bound infill
/// placement.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRange {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SamplingRange {
    pub fn full(space: &DesignSpace) -> Self {
        Self {
            lower: space.lower.clone(),
            upper: space.upper.clone(),
        }
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    /// True when every dimension has (numerically) zero width.
    pub fn is_degenerate(&self) -> bool {
        (0..self.dims()).all(|j| self.width(j) <= 0.0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }
}

/// Per dimension, the min/max over the union of population coordinates and
/// existing sample coordinates, clipped to the design space.
pub fn update_sampling_range(
    space: &DesignSpace,
    population: &[Vec<f64>],
    samples: &SampleSet,
) -> Result<SamplingRange, ProblemError> {
    if population.is_empty() {
        return Err(ProblemError::InvalidArgument(
            "population must be non-empty".into(),
        ));
    }
    let dims = space.dims();
    let mut lower = vec![f64::INFINITY; dims];
    let mut upper = vec![f64::NEG_INFINITY; dims];
    for p in population.iter().chain(samples.points()) {
        for j in 0..dims {
            lower[j] = lower[j].min(p[j]);
            upper[j] = upper[j].max(p[j]);
        }
    }
    for j in 0..dims {
        lower[j] = lower[j].clamp(space.lower[j], space.upper[j]);
        upper[j] = upper[j].clamp(space.lower[j], space.upper[j]);
    }
    Ok(SamplingRange { lower, upper })
}

/// A long-lived child process speaking the line protocol: one design point
/// per input line (space-separated decimals), one response per output line.
pub struct ExternalEvaluator {
    child: Child,
    stdin: std::process::ChildStdin,
    stdout: BufReader<std::process::ChildStdout>,
    command: String,
}

impl std::fmt::Debug for ExternalEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ExternalEvaluator({})", self.command)
    }
}

impl ExternalEvaluator {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self, ProblemError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| {
                ProblemError::EvaluatorFailure(format!("cannot spawn `{program}`: {e}"))
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            child,
            stdin,
            stdout,
            command: program.to_string(),
        })
    }

    /// Send the whole batch, then read one response line per point.
    pub fn eval_batch(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>, ProblemError> {
        let mut request = String::new();
        for x in xs {
            let line: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
            request.push_str(&line.join(" "));
            request.push('\n');
        }
        self.stdin
            .write_all(request.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|e| {
                ProblemError::EvaluatorFailure(format!("write to {}: {e}", self.command))
            })?;
        let mut out = Vec::with_capacity(xs.len());
        for _ in 0..xs.len() {
            let mut line = String::new();
            let n = self.stdout.read_line(&mut line).map_err(|e| {
                ProblemError::EvaluatorFailure(format!("read from {}: {e}", self.command))
            })?;
            if n == 0 {
                return Err(ProblemError::EvaluatorFailure(format!(
                    "{} closed its output after {} of {} responses",
                    self.command,
                    out.len(),
                    xs.len()
                )));
            }
            let value: f64 = line.trim().parse().map_err(|_| {
                ProblemError::EvaluatorFailure(format!(
                    "{} produced a non-numeric response line: {:?}",
                    self.command,
                    line.trim()
                ))
            })?;
            out.push(value);
        }
        Ok(out)
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
