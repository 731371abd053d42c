use super::*;
use crate::problem::{lhs_sample, DesignSpace, SampleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set_1d(pairs: &[(f64, f64)]) -> SampleSet {
    SampleSet::from_pairs(
        pairs.iter().map(|(x, _)| vec![*x]).collect(),
        pairs.iter().map(|(_, y)| *y).collect(),
    )
    .unwrap()
}

fn zero_nugget(family: KernelFamily) -> KernelSpec {
    KernelSpec::auto(family).with_nugget(0.0)
}

#[test]
fn rbf_interpolates_training_points() {
    let data = set_1d(&[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
    let m = train(SurrogateKind::Rbf, &zero_nugget(KernelFamily::Gaussian), &data).unwrap();
    assert!((m.predict(&[1.0]) - 1.0).abs() < 1e-6);
    assert!((m.predict(&[0.0]) - 0.0).abs() < 1e-6);
    assert!((m.predict(&[2.0]) - 4.0).abs() < 1e-6);
}

#[test]
fn constant_responses_reproduced_everywhere() {
    let points: Vec<Vec<f64>> = vec![
        vec![0.0, 0.1],
        vec![0.4, 0.9],
        vec![0.8, 0.3],
        vec![0.2, 0.6],
        vec![0.9, 0.8],
    ];
    let data = SampleSet::from_pairs(points, vec![5.0; 5]).unwrap();
    for kind in [SurrogateKind::Rbf, SurrogateKind::Kriging] {
        let m = train(kind, &zero_nugget(KernelFamily::Gaussian), &data).unwrap();
        for x in [[0.5, 0.5], [0.3, 0.2], [0.7, 0.7]] {
            assert!(
                (m.predict(&x) - 5.0).abs() < 1e-6,
                "{kind:?} at {x:?}: {}",
                m.predict(&x)
            );
        }
    }
}

#[test]
fn kriging_tracks_sine_closely() {
    let n = 10;
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| vec![std::f64::consts::PI * i as f64 / (n - 1) as f64])
        .collect();
    let ys: Vec<f64> = pts.iter().map(|p| p[0].sin()).collect();
    let data = SampleSet::from_pairs(pts, ys).unwrap();
    let m = train(
        SurrogateKind::Kriging,
        &KernelSpec::auto(KernelFamily::Gaussian),
        &data,
    )
    .unwrap();
    // Oracle: the analytic sine on a dense grid.
    let mut worst = 0.0f64;
    for i in 0..100 {
        let x = std::f64::consts::PI * i as f64 / 99.0;
        worst = worst.max((m.predict(&[x]) - x.sin()).abs());
    }
    assert!(worst < 1e-2, "max abs error {worst}");
}

#[test]
fn predict_far_from_data_reverts_to_trend() {
    let data = set_1d(&[(0.0, 1.0), (0.5, 3.0), (1.0, 2.0)]);
    let m = train(
        SurrogateKind::Kriging,
        &KernelSpec::auto(KernelFamily::Gaussian),
        &data,
    )
    .unwrap();
    let mu = m.trend_mean().unwrap();
    assert!((m.predict(&[1e4]) - mu).abs() < 1e-3);
}

#[test]
fn midpoint_of_two_equal_responses_is_that_response() {
    let data = set_1d(&[(-1.0, 2.0), (1.0, 2.0)]);
    let rbf = train(SurrogateKind::Rbf, &zero_nugget(KernelFamily::Gaussian), &data).unwrap();
    assert!((rbf.predict(&[0.0]) - 2.0).abs() < 1e-9);
    let krig = train(SurrogateKind::Kriging, &zero_nugget(KernelFamily::Gaussian), &data).unwrap();
    assert!((krig.predict(&[0.0]) - 2.0).abs() < 1e-9);
}

#[test]
fn train_requires_enough_samples() {
    let data = set_1d(&[(0.0, 0.0)]);
    assert!(matches!(
        train(SurrogateKind::Rbf, &KernelSpec::auto(KernelFamily::Gaussian), &data),
        Err(SurrogateError::InvalidArgument(_))
    ));
}

#[test]
fn predict_checked_rejects_dimension_mismatch() {
    let data = set_1d(&[(0.0, 0.0), (1.0, 1.0)]);
    let m = train(SurrogateKind::Rbf, &KernelSpec::auto(KernelFamily::Gaussian), &data).unwrap();
    assert!(matches!(
        m.predict_checked(&[0.0, 1.0]),
        Err(SurrogateError::InvalidArgument(_))
    ));
}

#[test]
fn ill_conditioned_error_names_closest_pair() {
    // Points 1 and 3 nearly coincide; with zero nugget the kernel matrix is
    // numerically singular.
    let data = SampleSet::from_pairs(
        vec![vec![0.0], vec![0.5], vec![1.0], vec![0.5 + 1e-11]],
        vec![0.0, 1.0, 2.0, 1.0],
    )
    .unwrap();
    match train(SurrogateKind::Rbf, &zero_nugget(KernelFamily::Gaussian), &data) {
        Err(SurrogateError::IllConditioned { i, j, .. }) => {
            assert_eq!((i, j), (1, 3));
        }
        other => panic!("expected ill-conditioned error, got {other:?}"),
    }
}

// --- gp_posterior -----------------------------------------------------------

#[test]
fn posterior_variance_vanishes_at_training_points() {
    let data = set_1d(&[(0.0, 1.0), (0.4, 2.0), (0.9, 0.5)]);
    let m = train(SurrogateKind::Kriging, &zero_nugget(KernelFamily::Gaussian), &data).unwrap();
    for p in data.points() {
        let post = gp_posterior(&m, p).unwrap();
        assert!(post.variance <= 1e-9, "variance {} at {:?}", post.variance, p);
    }
}

#[test]
fn posterior_variance_at_training_bounded_by_nugget() {
    let data = set_1d(&[(0.0, 1.0), (0.4, 2.0), (0.9, 0.5), (0.6, 1.4)]);
    let nugget = 1e-8;
    let m = train(
        SurrogateKind::Kriging,
        &KernelSpec::auto(KernelFamily::Gaussian).with_nugget(nugget),
        &data,
    )
    .unwrap();
    for p in data.points() {
        let post = gp_posterior(&m, p).unwrap();
        assert!(post.variance <= nugget + 1e-9);
    }
}

#[test]
fn posterior_variance_far_away_equals_process_variance() {
    let data = set_1d(&[(0.0, 1.0), (0.3, 2.5), (0.7, 0.2), (1.0, 1.7)]);
    let m = train(SurrogateKind::Kriging, &KernelSpec::auto(KernelFamily::Gaussian), &data)
        .unwrap();
    let post = gp_posterior(&m, &[1e4]).unwrap();
    assert!((post.variance - m.process_variance().unwrap()).abs() < 1e-6);
}

#[test]
fn gp_posterior_rejects_rbf_models() {
    let data = set_1d(&[(0.0, 0.0), (1.0, 1.0)]);
    let m = train(SurrogateKind::Rbf, &KernelSpec::auto(KernelFamily::Gaussian), &data).unwrap();
    assert!(matches!(
        gp_posterior(&m, &[0.5]),
        Err(SurrogateError::UnsupportedOperation(SurrogateKind::Rbf))
    ));
}

#[test]
fn mean_gradient_matches_central_differences() {
    // Oracle: central finite differences of the posterior mean.
    let space = DesignSpace::unit(2);
    let pts = lhs_sample(&space, 15, 5).unwrap();
    let ys: Vec<f64> = pts
        .iter()
        .map(|p| (3.0 * p[0]).sin() + p[1] * p[1])
        .collect();
    let data = SampleSet::from_pairs(pts, ys).unwrap();
    let m = train(SurrogateKind::Kriging, &KernelSpec::auto(KernelFamily::Gaussian), &data)
        .unwrap();

    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = [rng.random::<f64>(), rng.random::<f64>()];
        let grad = gp_posterior(&m, &x).unwrap().mean_gradient;
        let mut fd = [0.0; 2];
        for d in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            fd[d] = (m.predict(&xp) - m.predict(&xm)) / (2.0 * h);
        }
        let norm = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt().max(1e-6);
        for d in 0..2 {
            assert!(
                (grad[d] - fd[d]).abs() / norm <= 1e-4,
                "at {x:?} dim {d}: analytic {} vs fd {}",
                grad[d],
                fd[d]
            );
        }
    }
}

// --- invariants -------------------------------------------------------------

#[test]
fn predictions_invariant_under_sample_reordering() {
    let space = DesignSpace::unit(2);
    let pts = lhs_sample(&space, 12, 9).unwrap();
    let ys: Vec<f64> = pts.iter().map(|p| p[0] * p[0] + (4.0 * p[1]).cos()).collect();
    let data = SampleSet::from_pairs(pts.clone(), ys.clone()).unwrap();
    let mut rev_pts = pts;
    let mut rev_ys = ys;
    rev_pts.reverse();
    rev_ys.reverse();
    let rev = SampleSet::from_pairs(rev_pts, rev_ys).unwrap();
    for kind in [SurrogateKind::Rbf, SurrogateKind::Kriging] {
        let a = train(kind, &KernelSpec::auto(KernelFamily::Gaussian), &data).unwrap();
        let b = train(kind, &KernelSpec::auto(KernelFamily::Gaussian), &rev).unwrap();
        for x in [[0.5, 0.5], [0.1, 0.8], [0.9, 0.2]] {
            assert!(
                (a.predict(&x) - b.predict(&x)).abs() <= 1e-10,
                "{kind:?} at {x:?}"
            );
        }
    }
}

#[test]
fn posterior_variance_stable_under_near_duplicate() {
    let spec = KernelSpec {
        family: KernelFamily::Gaussian,
        length_scale: LengthScale::Iso(0.4),
        regularization: 1e-8,
    };
    let base = set_1d(&[(0.0, 0.3), (0.5, 0.9), (1.0, 0.1)]);
    let m1 = train(SurrogateKind::Kriging, &spec, &base).unwrap();
    let m2 = m1.conditioned_on(vec![0.5 + 1e-9], 0.9).unwrap();
    for x in [[0.25], [0.75], [0.5]] {
        let v1 = gp_posterior(&m1, &x).unwrap().variance;
        let v2 = gp_posterior(&m2, &x).unwrap().variance;
        assert!((v1 - v2).abs() <= 1e-8, "at {x:?}: {v1} vs {v2}");
    }
}

#[test]
fn posterior_variance_shrinks_when_point_added_there() {
    let spec = KernelSpec {
        family: KernelFamily::Gaussian,
        length_scale: LengthScale::Iso(0.3),
        regularization: 1e-8,
    };
    let base = set_1d(&[(0.0, 0.3), (0.4, 0.9), (1.0, 0.1)]);
    let m1 = train(SurrogateKind::Kriging, &spec, &base).unwrap();
    let x = [0.7];
    let v1 = gp_posterior(&m1, &x).unwrap().variance;
    let mut extended = base.clone();
    extended.push(x.to_vec(), m1.predict(&x)).unwrap();
    let m2 = train(SurrogateKind::Kriging, &spec, &extended).unwrap();
    let v2 = gp_posterior(&m2, &x).unwrap().variance;
    assert!(v2 <= v1 + 1e-9, "variance rose from {v1} to {v2}");
}

// --- select_model -----------------------------------------------------------

#[test]
fn select_model_recovers_planted_gaussian_rbf() {
    // Plant an exact gaussian-RBF function (known length scale) and check
    // the CV picks that kernel when the candidates share the scale.
    let space = DesignSpace::unit(2);
    let scale = 0.3;
    let centers = [[0.2, 0.3], [0.7, 0.8], [0.5, 0.1]];
    let truth = move |x: &[f64]| -> f64 {
        centers
            .iter()
            .zip([1.0, -2.0, 1.5])
            .map(|(c, w)| {
                let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                w * (-r2 / (scale * scale)).exp()
            })
            .sum()
    };
    let pts = lhs_sample(&space, 30, 17).unwrap();
    let ys: Vec<f64> = pts.iter().map(|p| truth(p)).collect();
    let data = SampleSet::from_pairs(pts, ys).unwrap();
    let spec_with = |family| KernelSpec {
        family,
        length_scale: LengthScale::Iso(scale),
        regularization: DEFAULT_NUGGET,
    };
    let candidates = vec![
        (SurrogateKind::Rbf, spec_with(KernelFamily::Gaussian)),
        (SurrogateKind::Rbf, spec_with(KernelFamily::Multiquadric)),
        (SurrogateKind::Rbf, spec_with(KernelFamily::Cubic)),
    ];
    let winner = select_model(&data, &candidates).unwrap();
    assert_eq!(winner.family(), KernelFamily::Gaussian);
}

#[test]
fn select_model_single_candidate_wins_by_default() {
    let data = set_1d(&[(0.0, 0.0), (0.3, 1.0), (0.6, 0.5), (1.0, 2.0)]);
    let candidates = vec![(SurrogateKind::Rbf, KernelSpec::auto(KernelFamily::Cubic))];
    let winner = select_model(&data, &candidates).unwrap();
    assert_eq!(winner.family(), KernelFamily::Cubic);
}

#[test]
fn select_model_tie_breaks_by_order() {
    let data = set_1d(&[(0.0, 0.0), (0.3, 1.0), (0.6, 0.5), (1.0, 2.0)]);
    let candidates = vec![
        (SurrogateKind::Rbf, KernelSpec::auto(KernelFamily::Multiquadric)),
        (SurrogateKind::Rbf, KernelSpec::auto(KernelFamily::Multiquadric)),
    ];
    // Identical candidates tie exactly; the first one is retrained.
    let winner = select_model(&data, &candidates).unwrap();
    assert_eq!(winner.family(), KernelFamily::Multiquadric);
}

#[test]
fn select_model_requires_enough_data() {
    let data = set_1d(&[(0.0, 0.0), (1.0, 1.0), (0.5, 0.5)]);
    assert!(matches!(
        select_model(&data, &default_candidates()),
        Err(SurrogateError::InvalidArgument(_))
    ));
}

// --- checkpoint format ------------------------------------------------------

#[test]
fn checkpoint_roundtrip_preserves_predictions() {
    let space = DesignSpace::unit(2);
    let pts = lhs_sample(&space, 10, 23).unwrap();
    let ys: Vec<f64> = pts.iter().map(|p| p[0] - p[1] * p[1]).collect();
    let data = SampleSet::from_pairs(pts, ys).unwrap();
    for kind in [SurrogateKind::Rbf, SurrogateKind::Kriging] {
        let m = train(kind, &KernelSpec::auto(KernelFamily::Gaussian), &data).unwrap();
        let text = m.to_text();
        let restored = TrainedSurrogate::from_text(&text).unwrap();
        for x in [[0.5, 0.5], [0.2, 0.9], [0.8, 0.1]] {
            assert_eq!(m.predict(&x), restored.predict(&x), "{kind:?}");
        }
        if kind == SurrogateKind::Kriging {
            let a = gp_posterior(&m, &[0.33, 0.66]).unwrap();
            let b = gp_posterior(&restored, &[0.33, 0.66]).unwrap();
            assert!((a.variance - b.variance).abs() < 1e-12);
        }
        // Serialization is stable.
        assert_eq!(text, restored.to_text());
    }
}

#[test]
fn checkpoint_rejects_garbage() {
    assert!(TrainedSurrogate::from_text("not a checkpoint").is_err());
    assert!(TrainedSurrogate::from_text("surrogate v1\nkind rbf\nend\n").is_err());
}

#[test]
fn refit_keeps_hyperparameters() {
    let data = set_1d(&[(0.0, 0.0), (0.25, 0.8), (0.5, 1.0), (0.75, 0.4), (1.0, 0.1)]);
    let m = train(SurrogateKind::Kriging, &KernelSpec::auto(KernelFamily::Gaussian), &data)
        .unwrap();
    let sub = data.subset(&[0, 1, 3, 4]);
    let refit = m.refit(&sub).unwrap();
    assert_eq!(refit.scales(), m.scales());
    assert_eq!(refit.training().len(), 4);
    // Still interpolates its own training set.
    for (p, y) in sub.points().iter().zip(sub.responses()) {
        assert!((refit.predict(p) - y).abs() < 1e-5);
    }
}
