//! RBF and Kriging (Gaussian-process) surrogates with cross-validated model
//! selection.
//!
//! Training data lives in a [`SampleSet`]; a fitted model is an immutable
//! [`TrainedSurrogate`] safe to share across threads. The Kriging variant
//! additionally exposes the posterior variance and the analytic gradient of
//! the posterior mean, both needed by the batch sampler.

mod kriging;
mod rbf;
mod select;

pub use select::{default_candidates, select_model};

use crate::problem::SampleSet;
use thiserror::Error;

/// Default nugget for numerical stability.
pub const DEFAULT_NUGGET: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "ill-conditioned training data: points {i} and {j} are {dist:e} apart \
         (kernel matrix singular after nugget {nugget:e})"
    )]
    IllConditioned {
        i: usize,
        j: usize,
        dist: f64,
        nugget: f64,
    },
    #[error("operation requires a kriging surrogate, got {0:?}")]
    UnsupportedOperation(SurrogateKind),
    #[error("all candidate models failed training: {0}")]
    AllCandidatesFailed(String),
    #[error("malformed surrogate checkpoint: {0}")]
    MalformedCheckpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    Rbf,
    Kriging,
}

impl SurrogateKind {
    fn as_str(self) -> &'static str {
        match self {
            SurrogateKind::Rbf => "rbf",
            SurrogateKind::Kriging => "kriging",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gaussian,
    Multiquadric,
    Cubic,
}

impl KernelFamily {
    fn as_str(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Multiquadric => "multiquadric",
            KernelFamily::Cubic => "cubic",
        }
    }
}

/// Length-scale specification. `Auto` resolves from the data: Kriging fits it
/// by maximizing the log marginal likelihood over a log-spaced grid, RBF uses
/// a mean-pairwise-distance heuristic.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthScale {
    Auto,
    Iso(f64),
    PerDim(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub length_scale: LengthScale,
    pub regularization: f64,
}

impl KernelSpec {
    pub fn auto(family: KernelFamily) -> Self {
        Self {
            family,
            length_scale: LengthScale::Auto,
            regularization: DEFAULT_NUGGET,
        }
    }

    pub fn with_nugget(mut self, nugget: f64) -> Self {
        self.regularization = nugget;
        self
    }

    fn validate(&self, dims: usize) -> Result<(), SurrogateError> {
        match &self.length_scale {
            LengthScale::Auto => {}
            LengthScale::Iso(l) => {
                if !(*l > 0.0) {
                    return Err(SurrogateError::InvalidArgument(format!(
                        "length scale must be positive, got {l}"
                    )));
                }
            }
            LengthScale::PerDim(ls) => {
                if ls.len() != dims {
                    return Err(SurrogateError::InvalidArgument(format!(
                        "{} length scales for {dims}-dimensional data",
                        ls.len()
                    )));
                }
                if ls.iter().any(|l| !(*l > 0.0)) {
                    return Err(SurrogateError::InvalidArgument(
                        "length scales must all be positive".into(),
                    ));
                }
            }
        }
        if self.regularization < 0.0 {
            return Err(SurrogateError::InvalidArgument(format!(
                "regularization must be nonnegative, got {}",
                self.regularization
            )));
        }
        Ok(())
    }
}

/// Parameters specific to the Kriging posterior.
#[derive(Debug, Clone)]
pub(crate) struct KrigingParts {
    pub trend_mean: f64,
    pub process_variance: f64,
    /// Cholesky factor of K = process_variance * R + nugget * I.
    pub chol: crate::linalg::Cholesky,
}

/// A fitted predictor; immutable after training.
#[derive(Debug, Clone)]
pub struct TrainedSurrogate {
    kind: SurrogateKind,
    family: KernelFamily,
    /// Resolved per-dimension length scales.
    scales: Vec<f64>,
    regularization: f64,
    training: SampleSet,
    weights: Vec<f64>,
    kriging: Option<KrigingParts>,
}

/// Anything that maps a design point to a scalar prediction.
pub trait Predictor {
    fn predict(&self, x: &[f64]) -> f64;
}

impl Predictor for TrainedSurrogate {
    fn predict(&self, x: &[f64]) -> f64 {
        TrainedSurrogate::predict(self, x)
    }
}

/// Posterior statistics of a Kriging model at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior {
    pub mean: f64,
    pub variance: f64,
    pub mean_gradient: Vec<f64>,
}

/// Fit a surrogate of the requested kind to the data.
///
/// Kriging hyperparameters (length scale, process variance) are fitted by
/// maximizing the log marginal likelihood over a log-uniform grid unless the
/// kernel supplies them.
pub fn train(
    kind: SurrogateKind,
    kernel: &KernelSpec,
    data: &SampleSet,
) -> Result<TrainedSurrogate, SurrogateError> {
    let dims = data.dims();
    if dims == 0 || data.len() < dims + 1 {
        return Err(SurrogateError::InvalidArgument(format!(
            "need at least dims+1 = {} samples, got {}",
            dims + 1,
            data.len()
        )));
    }
    kernel.validate(dims)?;
    match kind {
        SurrogateKind::Rbf => rbf::train_rbf(kernel, data),
        SurrogateKind::Kriging => {
            if kernel.family != KernelFamily::Gaussian {
                return Err(SurrogateError::InvalidArgument(format!(
                    "kriging supports the gaussian kernel only, got {}",
                    kernel.family.as_str()
                )));
            }
            kriging::train_kriging(kernel, data)
        }
    }
}

impl TrainedSurrogate {
    pub(crate) fn new(
        kind: SurrogateKind,
        family: KernelFamily,
        scales: Vec<f64>,
        regularization: f64,
        training: SampleSet,
        weights: Vec<f64>,
        kriging: Option<KrigingParts>,
    ) -> Self {
        Self {
            kind,
            family,
            scales,
            regularization,
            training,
            weights,
            kriging,
        }
    }

    pub fn kind(&self) -> SurrogateKind {
        self.kind
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn training(&self) -> &SampleSet {
        &self.training
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn trend_mean(&self) -> Option<f64> {
        self.kriging.as_ref().map(|k| k.trend_mean)
    }

    pub fn process_variance(&self) -> Option<f64> {
        self.kriging.as_ref().map(|k| k.process_variance)
    }

    /// Deterministic point prediction. The dimension contract is checked by
    /// [`TrainedSurrogate::predict_checked`]; this variant asserts it.
    pub fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.scales.len(), "dimension mismatch");
        match self.kind {
            SurrogateKind::Rbf => rbf::predict(self, x),
            SurrogateKind::Kriging => kriging::predict(self, x),
        }
    }

    pub fn predict_checked(&self, x: &[f64]) -> Result<f64, SurrogateError> {
        if x.len() != self.scales.len() {
            return Err(SurrogateError::InvalidArgument(format!(
                "point has {} coordinates, model expects {}",
                x.len(),
                self.scales.len()
            )));
        }
        Ok(self.predict(x))
    }

    /// Posterior mean and standard deviation; `None` for non-Kriging models.
    pub fn posterior_mean_std(&self, x: &[f64]) -> Option<(f64, f64)> {
        self.kriging.as_ref().map(|parts| {
            let mean = kriging::predict(self, x);
            let var = kriging::posterior_variance(self, parts, x);
            (mean, var.sqrt())
        })
    }

    /// Analytic gradient of the posterior mean; `None` for non-Kriging
    /// models.
    pub fn posterior_mean_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.kriging
            .as_ref()
            .map(|_| kriging::mean_gradient(self, x))
    }

    pub(crate) fn kriging_parts(&self) -> Option<&KrigingParts> {
        self.kriging.as_ref()
    }

    /// Kriging-only: condition the posterior on one extra observation,
    /// keeping trend, process variance and length scales fixed.
    pub fn conditioned_on(
        &self,
        point: Vec<f64>,
        response: f64,
    ) -> Result<TrainedSurrogate, SurrogateError> {
        let parts = self
            .kriging
            .as_ref()
            .ok_or(SurrogateError::UnsupportedOperation(self.kind))?;
        let mut training = self.training.clone();
        training
            .push(point, response)
            .map_err(|e| SurrogateError::InvalidArgument(e.to_string()))?;
        let new_parts = kriging::rebuild_parts(
            &training,
            &self.scales,
            self.regularization,
            parts.trend_mean,
            parts.process_variance,
        )?;
        let centered: Vec<f64> = training
            .responses()
            .iter()
            .map(|y| y - parts.trend_mean)
            .collect();
        let weights = new_parts.chol.solve(&centered);
        Ok(TrainedSurrogate {
            kind: self.kind,
            family: self.family,
            scales: self.scales.clone(),
            regularization: self.regularization,
            training,
            weights,
            kriging: Some(new_parts),
        })
    }

    /// Retrain on new data keeping the resolved hyperparameters fixed.
    /// Used by the error-estimation resampling, where refitting the length
    /// scales for every sub-model would dominate the cost.
    pub fn refit(&self, data: &SampleSet) -> Result<TrainedSurrogate, SurrogateError> {
        let dims = data.dims();
        if dims != self.scales.len() {
            return Err(SurrogateError::InvalidArgument(format!(
                "refit data has {dims} dimensions, model expects {}",
                self.scales.len()
            )));
        }
        if data.len() < dims + 1 {
            return Err(SurrogateError::InvalidArgument(format!(
                "need at least dims+1 = {} samples, got {}",
                dims + 1,
                data.len()
            )));
        }
        let spec = KernelSpec {
            family: self.family,
            length_scale: LengthScale::PerDim(self.scales.clone()),
            regularization: self.regularization,
        };
        match self.kind {
            SurrogateKind::Rbf => rbf::train_rbf(&spec, data),
            SurrogateKind::Kriging => kriging::train_kriging(&spec, data),
        }
    }
}

/// Posterior mean, variance and mean-gradient of a Kriging surrogate.
pub fn gp_posterior(
    model: &TrainedSurrogate,
    x: &[f64],
) -> Result<GpPosterior, SurrogateError> {
    if model.kind != SurrogateKind::Kriging {
        return Err(SurrogateError::UnsupportedOperation(model.kind));
    }
    if x.len() != model.scales.len() {
        return Err(SurrogateError::InvalidArgument(format!(
            "point has {} coordinates, model expects {}",
            x.len(),
            model.scales.len()
        )));
    }
    let parts = model.kriging.as_ref().expect("kriging parts");
    Ok(GpPosterior {
        mean: kriging::predict(model, x),
        variance: kriging::posterior_variance(model, parts, x),
        mean_gradient: kriging::mean_gradient(model, x),
    })
}

/// Closest pair of points (by scaled euclidean distance), used to name the
/// culprits when a kernel matrix turns out singular.
pub(crate) fn closest_pair(data: &SampleSet, scales: &[f64]) -> (usize, usize, f64) {
    let pts = data.points();
    let mut best = (0, 1.min(pts.len().saturating_sub(1)), f64::INFINITY);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d: f64 = pts[i]
                .iter()
                .zip(&pts[j])
                .zip(scales)
                .map(|((a, b), s)| ((a - b) / s).powi(2))
                .sum::<f64>()
                .sqrt();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// Per-dimension data ranges with a floor of 1 for degenerate dimensions;
/// the reference frame for relative length scales.
pub(crate) fn data_ranges(data: &SampleSet) -> Vec<f64> {
    let dims = data.dims();
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for p in data.points() {
        for j in 0..dims {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    (0..dims)
        .map(|j| {
            let w = hi[j] - lo[j];
            if w > 1e-12 {
                w
            } else {
                1.0
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Checkpoint text format
// ---------------------------------------------------------------------------

impl TrainedSurrogate {
    /// Self-describing text form for checkpointing between refinement
    /// events. Floats round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::from("surrogate v1\n");
        out.push_str(&format!("kind {}\n", self.kind.as_str()));
        out.push_str(&format!("family {}\n", self.family.as_str()));
        out.push_str(&format!("regularization {}\n", self.regularization));
        out.push_str(&format!(
            "scales {}\n",
            join_floats(&self.scales)
        ));
        if let Some(parts) = &self.kriging {
            out.push_str(&format!("trend_mean {}\n", parts.trend_mean));
            out.push_str(&format!("process_variance {}\n", parts.process_variance));
        }
        out.push_str(&format!(
            "samples {} {}\n",
            self.training.len(),
            self.training.dims()
        ));
        for (p, y) in self.training.points().iter().zip(self.training.responses()) {
            out.push_str(&join_floats(p));
            out.push(' ');
            out.push_str(&format!("{y}\n"));
        }
        out.push_str(&format!("weights {}\n", join_floats(&self.weights)));
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self, SurrogateError> {
        let malformed = |msg: &str| SurrogateError::MalformedCheckpoint(msg.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| malformed("empty checkpoint"))?;
        if header.trim() != "surrogate v1" {
            return Err(malformed(&format!("unknown header {header:?}")));
        }
        let mut kind = None;
        let mut family = None;
        let mut regularization = None;
        let mut scales: Option<Vec<f64>> = None;
        let mut trend_mean = None;
        let mut process_variance = None;
        let mut samples: Option<SampleSet> = None;
        let mut weights: Option<Vec<f64>> = None;

        while let Some(line) = lines.next() {
            let line = line.trim();
            if line == "end" {
                break;
            }
            let (key, rest) = line
                .split_once(' ')
                .ok_or_else(|| malformed(&format!("bad line {line:?}")))?;
            match key {
                "kind" => {
                    kind = Some(match rest {
                        "rbf" => SurrogateKind::Rbf,
                        "kriging" => SurrogateKind::Kriging,
                        other => return Err(malformed(&format!("unknown kind {other:?}"))),
                    })
                }
                "family" => {
                    family = Some(match rest {
                        "gaussian" => KernelFamily::Gaussian,
                        "multiquadric" => KernelFamily::Multiquadric,
                        "cubic" => KernelFamily::Cubic,
                        other => return Err(malformed(&format!("unknown family {other:?}"))),
                    })
                }
                "regularization" => regularization = Some(parse_float(rest)?),
                "scales" => scales = Some(parse_floats(rest)?),
                "trend_mean" => trend_mean = Some(parse_float(rest)?),
                "process_variance" => process_variance = Some(parse_float(rest)?),
                "samples" => {
                    let mut it = rest.split_whitespace();
                    let n: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| malformed("bad sample count"))?;
                    let d: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| malformed("bad sample dimension"))?;
                    let mut set = SampleSet::new();
                    for _ in 0..n {
                        let row = lines
                            .next()
                            .ok_or_else(|| malformed("truncated sample block"))?;
                        let vals = parse_floats(row)?;
                        if vals.len() != d + 1 {
                            return Err(malformed(&format!(
                                "sample row has {} values, expected {}",
                                vals.len(),
                                d + 1
                            )));
                        }
                        let y = vals[d];
                        set.push(vals[..d].to_vec(), y).map_err(|e| {
                            SurrogateError::MalformedCheckpoint(format!("bad sample: {e}"))
                        })?;
                    }
                    samples = Some(set);
                }
                "weights" => weights = Some(parse_floats(rest)?),
                other => return Err(malformed(&format!("unknown key {other:?}"))),
            }
        }

        let kind = kind.ok_or_else(|| malformed("missing kind"))?;
        let family = family.ok_or_else(|| malformed("missing family"))?;
        let regularization = regularization.ok_or_else(|| malformed("missing regularization"))?;
        let scales = scales.ok_or_else(|| malformed("missing scales"))?;
        let training = samples.ok_or_else(|| malformed("missing samples"))?;
        let weights = weights.ok_or_else(|| malformed("missing weights"))?;
        let expected = match kind {
            // RBF carries an extra constant-term weight.
            SurrogateKind::Rbf => training.len() + 1,
            SurrogateKind::Kriging => training.len(),
        };
        if weights.len() != expected {
            return Err(malformed("weight count does not match sample count"));
        }

        let kriging = if kind == SurrogateKind::Kriging {
            let trend_mean = trend_mean.ok_or_else(|| malformed("missing trend_mean"))?;
            let process_variance =
                process_variance.ok_or_else(|| malformed("missing process_variance"))?;
            Some(kriging::rebuild_parts(
                &training,
                &scales,
                regularization,
                trend_mean,
                process_variance,
            )?)
        } else {
            None
        };

        Ok(TrainedSurrogate {
            kind,
            family,
            scales,
            regularization,
            training,
            weights,
            kriging,
        })
    }
}

fn join_floats(vals: &[f64]) -> String {
    vals.iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_float(token: &str) -> Result<f64, SurrogateError> {
    token
        .trim()
        .parse()
        .map_err(|_| SurrogateError::MalformedCheckpoint(format!("bad float {token:?}")))
}

fn parse_floats(tokens: &str) -> Result<Vec<f64>, SurrogateError> {
    tokens.split_whitespace().map(parse_float).collect()
}

#[cfg(test)]
mod tests;
