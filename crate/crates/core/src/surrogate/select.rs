//! Cross-validated surrogate selection over a small candidate pool.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{train, KernelFamily, KernelSpec, SurrogateError, SurrogateKind, TrainedSurrogate};
use crate::problem::SampleSet;

const FOLDS: usize = 5;
/// Fold shuffling is part of the selection contract, not of the caller's
/// seed stream.
const SHUFFLE_SEED: u64 = 0x434f_534d;

/// The default candidate pool: three RBF kernels plus gaussian Kriging.
pub fn default_candidates() -> Vec<(SurrogateKind, KernelSpec)> {
    vec![
        (
            SurrogateKind::Kriging,
            KernelSpec::auto(KernelFamily::Gaussian),
        ),
        (SurrogateKind::Rbf, KernelSpec::auto(KernelFamily::Gaussian)),
        (
            SurrogateKind::Rbf,
            KernelSpec::auto(KernelFamily::Multiquadric),
        ),
        (SurrogateKind::Rbf, KernelSpec::auto(KernelFamily::Cubic)),
    ]
}

/// Pick the candidate minimizing the median absolute held-out error over
/// 5 folds of size ⌈N/5⌉ (fixed shuffle seed), ties broken by candidate
/// order; the winner is retrained on the full data.
pub fn select_model(
    data: &SampleSet,
    candidates: &[(SurrogateKind, KernelSpec)],
) -> Result<TrainedSurrogate, SurrogateError> {
    if candidates.is_empty() {
        return Err(SurrogateError::InvalidArgument(
            "candidate list must be non-empty".into(),
        ));
    }
    let n = data.len();
    let dims = data.dims();
    if n < 2 * (dims + 1) {
        return Err(SurrogateError::InvalidArgument(format!(
            "model selection needs at least 2*(dims+1) = {} samples, got {n}",
            2 * (dims + 1)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED);
    order.shuffle(&mut rng);
    let fold_size = n.div_ceil(FOLDS);
    let folds: Vec<&[usize]> = order.chunks(fold_size).collect();

    let scored: Vec<Result<f64, SurrogateError>> = candidates
        .par_iter()
        .map(|(kind, spec)| cv_median_error(data, &folds, *kind, spec))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut failures = Vec::new();
    for (idx, res) in scored.iter().enumerate() {
        match res {
            Ok(score) => {
                if best.is_none_or(|(_, b)| *score < b) {
                    best = Some((idx, *score));
                }
            }
            Err(e) => failures.push(format!("candidate {idx}: {e}")),
        }
    }
    match best {
        Some((idx, _)) => {
            let (kind, spec) = &candidates[idx];
            train(*kind, spec, data)
        }
        None => Err(SurrogateError::AllCandidatesFailed(failures.join("; "))),
    }
}

fn cv_median_error(
    data: &SampleSet,
    folds: &[&[usize]],
    kind: SurrogateKind,
    spec: &KernelSpec,
) -> Result<f64, SurrogateError> {
    let n = data.len();
    let mut errors = Vec::with_capacity(n);
    for fold in folds {
        let held: Vec<usize> = fold.to_vec();
        let train_idx: Vec<usize> = (0..n).filter(|i| !held.contains(i)).collect();
        let model = train(kind, spec, &data.subset(&train_idx))?;
        for &i in &held {
            let pred = model.predict(&data.points()[i]);
            errors.push((pred - data.responses()[i]).abs());
        }
    }
    Ok(median(&mut errors))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
