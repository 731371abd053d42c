//! Greedy batch selection: maximize an expected-improvement acquisition on a
//! freshly fitted GP, multiplying in a local penalizer around each point
//! already picked so the batch spreads out.
//!
//! Everything here works in a maximization convention g = -f: the GP is
//! fitted to negated responses, the incumbent is max(-y), and the extremum M
//! is the best observed g value. This keeps the improvement formula and the
//! penalizer on the same sign convention.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::euclidean;
use crate::problem::{SampleSet, SamplingRange};
use crate::stats::{norm_cdf, norm_pdf};
use crate::surrogate::{
    train, KernelFamily, KernelSpec, SurrogateError, SurrogateKind, TrainedSurrogate,
};

/// Points closer than this to an existing sample would poison the next
/// kernel system.
const MIN_SEPARATION: f64 = 1e-9;

/// Probe batches for the Lipschitz estimate come in blocks of this size, so
/// a larger probe count strictly extends a smaller one.
const LIPSCHITZ_BLOCK: usize = 100;

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sampling range is degenerate in every dimension")]
    CannotSample,
    #[error("acquisition GP training failed: {0}")]
    Training(#[from] SurrogateError),
}

/// Expected improvement of a GP over `incumbent` (maximization convention):
/// (u Φ(u) + φ(u))·σ with u = (μ(x) − incumbent)/σ; zero where the
/// posterior is certain.
pub fn expected_improvement(gp: &TrainedSurrogate, x: &[f64], incumbent: f64) -> f64 {
    let (mean, std) = gp
        .posterior_mean_std(x)
        .expect("expected_improvement needs a kriging surrogate");
    if std < 1e-12 {
        return 0.0;
    }
    let u = (mean - incumbent) / std;
    ((u * norm_cdf(u) + norm_pdf(u)) * std).max(0.0)
}

/// Identity for positive acquisitions, ln(1 + e^α) otherwise; strictly
/// positive for finite input so a multiplicative penalizer cannot zero the
/// argmax out.
pub fn softplus_floor(alpha: f64) -> f64 {
    if alpha > 0.0 {
        alpha
    } else {
        alpha.exp().ln_1p().max(f64::MIN_POSITIVE)
    }
}

/// ln(1 + e^z), stable across the whole range. Monotone, so it preserves
/// the acquisition argmax while making the function strictly positive.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p().max(f64::MIN_POSITIVE)
    }
}

/// Max posterior-mean gradient norm over LHS-distributed probes, floored at
/// 1e-6. Probes are drawn in blocks so the estimate never decreases as
/// `probes` grows.
pub fn estimate_lipschitz(
    gp: &TrainedSurrogate,
    range: &SamplingRange,
    probes: usize,
    seed: u64,
) -> f64 {
    assert!(probes >= 100, "need at least 100 probes, got {probes}");
    let blocks = probes.div_ceil(LIPSCHITZ_BLOCK);
    let mut best = 0.0f64;
    for b in 0..blocks {
        for p in lhs_in_range(range, LIPSCHITZ_BLOCK, seed.wrapping_add(b as u64)) {
            let grad = gp
                .posterior_mean_gradient(&p)
                .expect("lipschitz estimate needs a kriging surrogate");
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            best = best.max(norm);
        }
    }
    best.max(1e-6)
}

/// γ(x; x_i) = ½ erfc(−z), z = (L‖x − x_i‖ − M + mean_i)/√(2 std_i²):
/// the probability that x falls outside the exclusion ball around x_i.
pub fn local_penalizer(
    x: &[f64],
    x_i: &[f64],
    mean_i: f64,
    std_i: f64,
    lipschitz: f64,
    extremum: f64,
) -> f64 {
    let std = std_i.max(1e-9);
    let z = (lipschitz * euclidean(x, x_i) - extremum + mean_i)
        / (std::f64::consts::SQRT_2 * std);
    0.5 * libm::erfc(-z)
}

/// The running state of one greedy batch: the acquisition GP, incumbent and
/// extremum (both in the maximization convention), the Lipschitz constant,
/// and the points already chosen with their posterior statistics.
pub struct AcquisitionState {
    gp: TrainedSurrogate,
    incumbent: f64,
    lipschitz: f64,
    extremum: f64,
    chosen: Vec<(Vec<f64>, f64, f64)>,
}

impl AcquisitionState {
    pub fn new(gp: TrainedSurrogate, incumbent: f64, lipschitz: f64, extremum: f64) -> Self {
        assert!(lipschitz > 0.0, "lipschitz constant must be positive");
        Self {
            gp,
            incumbent,
            lipschitz,
            extremum,
            chosen: Vec::new(),
        }
    }

    pub fn gp(&self) -> &TrainedSurrogate {
        &self.gp
    }

    pub fn incumbent(&self) -> f64 {
        self.incumbent
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn extremum(&self) -> f64 {
        self.extremum
    }

    pub fn chosen(&self) -> &[(Vec<f64>, f64, f64)] {
        &self.chosen
    }

    /// Softplus-transformed expected improvement, before any penalization.
    ///
    /// EI is zero wherever the posterior is certain (every training point),
    /// so it is not strictly positive and the transform branch applies to
    /// the function as a whole. Being monotone it keeps the EI argmax; a
    /// pointwise branch would instead spike the zeros up to ln 2 and turn
    /// the training points themselves into argmaxes.
    pub fn base_acquisition(&self, x: &[f64]) -> f64 {
        softplus(expected_improvement(&self.gp, x, self.incumbent))
    }

    /// Base acquisition times the penalizer of every chosen point.
    pub fn penalized_acquisition(&self, x: &[f64]) -> f64 {
        let mut acq = self.base_acquisition(x);
        for (xi, mean_i, std_i) in &self.chosen {
            acq *= local_penalizer(x, xi, *mean_i, *std_i, self.lipschitz, self.extremum);
        }
        acq
    }

    /// Record a picked point; its posterior statistics feed the penalizer.
    pub fn push_chosen(&mut self, point: Vec<f64>) {
        let (mean, std) = self
            .gp
            .posterior_mean_std(&point)
            .expect("kriging surrogate");
        self.chosen.push((point, mean, std));
    }
}

/// Pick `batch_size` infill locations inside `range` by greedily maximizing
/// the locally-penalized expected improvement of a GP fitted to the data.
/// Points come back at least 1e-9 apart from the samples and each other.
pub fn select_batch(
    data: &SampleSet,
    range: &SamplingRange,
    batch_size: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, BatchError> {
    select_batch_with_values(data, range, batch_size, seed).map(|(points, _)| points)
}

/// As [`select_batch`], also returning each point's penalized acquisition
/// value at the step it was picked (for run traces).
pub(crate) fn select_batch_with_values(
    data: &SampleSet,
    range: &SamplingRange,
    batch_size: usize,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>), BatchError> {
    if batch_size == 0 {
        return Err(BatchError::InvalidArgument(
            "batch size must be at least 1".into(),
        ));
    }
    if range.is_degenerate() {
        return Err(BatchError::CannotSample);
    }
    let dims = data.dims();
    if range.dims() != dims {
        return Err(BatchError::InvalidArgument(format!(
            "range has {} dimensions, data has {dims}",
            range.dims()
        )));
    }

    // Fit the acquisition GP to g = -f.
    let negated = SampleSet::from_pairs(
        data.points().to_vec(),
        data.responses().iter().map(|y| -y).collect(),
    )
    .expect("negating responses preserves validity");
    let gp = train(
        SurrogateKind::Kriging,
        &KernelSpec::auto(KernelFamily::Gaussian),
        &negated,
    )?;
    let incumbent = negated
        .responses()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lipschitz_seed: u64 = rng.random();
    let probes = 100.max(50 * dims);
    let lipschitz = estimate_lipschitz(&gp, range, probes, lipschitz_seed);
    let mut state = AcquisitionState::new(gp, incumbent, lipschitz, incumbent);

    let n_starts = 10 * dims.max(1);
    let mut picked: Vec<Vec<f64>> = Vec::with_capacity(batch_size);
    let mut values: Vec<f64> = Vec::with_capacity(batch_size);
    for _ in 0..batch_size {
        let start_seed: u64 = rng.random();
        let (mut best_x, _) = maximize(
            |x| state.penalized_acquisition(x),
            range,
            n_starts,
            start_seed,
        );
        // Keep a workable distance from everything already known.
        let mut attempts = 0;
        while too_close(&best_x, data, &picked) {
            if attempts == 0 {
                eprintln!(
                    "select_batch: argmax within {MIN_SEPARATION:e} of an existing point; perturbing"
                );
            }
            for (j, v) in best_x.iter_mut().enumerate() {
                let width = range.width(j);
                if width > 0.0 {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *v = (*v + sign * 1e-6 * width).clamp(range.lower()[j], range.upper()[j]);
                }
            }
            attempts += 1;
            assert!(attempts < 64, "cannot separate batch point from samples");
        }
        values.push(state.penalized_acquisition(&best_x));
        state.push_chosen(best_x.clone());
        picked.push(best_x);
    }
    Ok((picked, values))
}

fn too_close(x: &[f64], data: &SampleSet, picked: &[Vec<f64>]) -> bool {
    data.points()
        .iter()
        .chain(picked)
        .any(|p| euclidean(x, p) < MIN_SEPARATION)
}

/// Multi-start maximizer: LHS starts screened by their raw acquisition,
/// the leading half refined by coordinate-wise golden-section sweeps
/// with shrinking brackets, to 1e-6 of range width.
fn maximize(
    f: impl Fn(&[f64]) -> f64,
    range: &SamplingRange,
    n_starts: usize,
    seed: u64,
) -> (Vec<f64>, f64) {
    let starts = lhs_in_range(range, n_starts, seed);
    let mut scored: Vec<(f64, Vec<f64>)> =
        starts.into_iter().map(|x| (f(&x), x)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite acquisition"));
    let keep = n_starts.div_ceil(2).max(2).min(scored.len());

    let mut best: Option<(Vec<f64>, f64)> = None;
    for (_, start) in scored.into_iter().take(keep) {
        let mut x = start;
        for half_width in [0.25, 0.08, 0.02] {
            for j in 0..range.dims() {
                let width = range.width(j);
                if width <= 0.0 {
                    continue;
                }
                let lo = (x[j] - half_width * width).max(range.lower()[j]);
                let hi = (x[j] + half_width * width).min(range.upper()[j]);
                x[j] = golden_section_max(
                    |v| {
                        let mut probe = x.clone();
                        probe[j] = v;
                        f(&probe)
                    },
                    lo,
                    hi,
                    1e-6 * width,
                );
            }
        }
        let value = f(&x);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((x, value));
        }
    }
    best.expect("at least one start")
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    if f(mid) >= fc.max(fd) {
        mid
    } else if fc > fd {
        c
    } else {
        d
    }
}

/// Stratified sample inside a possibly partly-degenerate range; degenerate
/// dimensions stay pinned at their single value.
fn lhs_in_range(range: &SamplingRange, n: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = range.dims();
    let mut coords = vec![vec![0.0; n]; dims];
    for (j, col) in coords.iter_mut().enumerate() {
        let width = range.width(j);
        if width <= 0.0 {
            col.fill(range.lower()[j]);
            continue;
        }
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            col[i] = range.lower()[j] + (s as f64 + u) / n as f64 * width;
        }
    }
    (0..n)
        .map(|i| (0..dims).map(|j| coords[j][i]).collect())
        .collect()
}
