//! Inertia-weight particle swarm over a cheap fitness function, with
//! identity-preserving particles (index = identity) and a stagnation
//! re-initialization rule.

use rand::Rng;

use crate::linalg::euclidean;
use crate::problem::{lhs_sample, DesignSpace};

pub const INERTIA: f64 = 0.729;
pub const COGNITIVE: f64 = 1.494;
pub const SOCIAL: f64 = 1.494;

/// A particle sitting within this distance of the global best for
/// [`STAGNATION_LIMIT`] consecutive iterations gets re-seeded.
const STAGNATION_DIST: f64 = 1e-9;
const STAGNATION_LIMIT: u32 = 10;

#[derive(Debug, Clone)]
pub struct SwarmState {
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    values: Vec<f64>,
    personal_best_points: Vec<Vec<f64>>,
    personal_best_values: Vec<f64>,
    global_best_point: Vec<f64>,
    global_best_value: f64,
    iteration: usize,
    stagnation: Vec<u32>,
}

impl SwarmState {
    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    /// Fitness of each particle at its current position.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn personal_best_values(&self) -> &[f64] {
        &self.personal_best_values
    }

    pub fn global_best(&self) -> (&[f64], f64) {
        (&self.global_best_point, self.global_best_value)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Re-score personal and global bests after the fitness function
    /// changed (stale beliefs from the previous surrogate are dropped).
    pub fn recompute_bests(&mut self, fitness: impl Fn(&[f64]) -> f64) {
        for k in 0..self.len() {
            self.values[k] = fitness(&self.positions[k]);
            self.personal_best_values[k] = fitness(&self.personal_best_points[k]);
        }
        let best = (0..self.len())
            .min_by(|a, b| {
                self.personal_best_values[*a]
                    .partial_cmp(&self.personal_best_values[*b])
                    .expect("finite fitness")
            })
            .expect("non-empty swarm");
        self.global_best_point = self.personal_best_points[best].clone();
        self.global_best_value = self.personal_best_values[best];
    }
}

/// LHS-initialized swarm at iteration 1, zero velocities.
pub fn init_swarm(
    space: &DesignSpace,
    n_pop: usize,
    fitness: impl Fn(&[f64]) -> f64,
    rng: &mut impl Rng,
) -> SwarmState {
    assert!(n_pop >= 1, "swarm needs at least one particle");
    let positions = lhs_sample(space, n_pop, rng.random()).expect("n_pop >= 1");
    let values: Vec<f64> = positions.iter().map(|p| fitness(p)).collect();
    let best = (0..n_pop)
        .min_by(|a, b| values[*a].partial_cmp(&values[*b]).expect("finite fitness"))
        .expect("non-empty swarm");
    SwarmState {
        velocities: vec![vec![0.0; space.dims()]; n_pop],
        personal_best_points: positions.clone(),
        personal_best_values: values.clone(),
        global_best_point: positions[best].clone(),
        global_best_value: values[best],
        positions,
        values,
        iteration: 1,
        stagnation: vec![0; n_pop],
    }
}

/// One synchronous PSO iteration: velocity/position update against the
/// current global best, bound clipping with velocity zeroing, fitness
/// re-evaluation, personal/global best updates.
pub fn pso_step(
    swarm: &mut SwarmState,
    fitness: impl Fn(&[f64]) -> f64,
    space: &DesignSpace,
    rng: &mut impl Rng,
) {
    let dims = space.dims();
    for k in 0..swarm.len() {
        for d in 0..dims {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let v = INERTIA * swarm.velocities[k][d]
                + COGNITIVE * r1 * (swarm.personal_best_points[k][d] - swarm.positions[k][d])
                + SOCIAL * r2 * (swarm.global_best_point[d] - swarm.positions[k][d]);
            swarm.velocities[k][d] = v;
            swarm.positions[k][d] += v;
        }
        for d in space.clip(&mut swarm.positions[k]) {
            swarm.velocities[k][d] = 0.0;
        }

        // Diversity preservation: particles glued to the global best get
        // re-seeded after STAGNATION_LIMIT consecutive iterations.
        if euclidean(&swarm.positions[k], &swarm.global_best_point) < STAGNATION_DIST {
            swarm.stagnation[k] += 1;
        } else {
            swarm.stagnation[k] = 0;
        }
        if swarm.stagnation[k] >= STAGNATION_LIMIT {
            for d in 0..dims {
                swarm.positions[k][d] =
                    space.lower()[d] + rng.random::<f64>() * space.width(d);
                swarm.velocities[k][d] = 0.0;
            }
            swarm.stagnation[k] = 0;
        }

        let value = fitness(&swarm.positions[k]);
        swarm.values[k] = value;
        if value < swarm.personal_best_values[k] {
            swarm.personal_best_values[k] = value;
            swarm.personal_best_points[k] = swarm.positions[k].clone();
        }
    }
    for k in 0..swarm.len() {
        if swarm.personal_best_values[k] < swarm.global_best_value {
            swarm.global_best_value = swarm.personal_best_values[k];
            swarm.global_best_point = swarm.personal_best_points[k].clone();
        }
    }
    swarm.iteration += 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn swarm_converges_on_sphere() {
        let space = DesignSpace::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut swarm = init_swarm(&space, 30, sphere, &mut rng);
        let initial = swarm.global_best().1;
        for _ in 0..100 {
            pso_step(&mut swarm, sphere, &space, &mut rng);
        }
        let final_best = swarm.global_best().1;
        assert!(
            final_best < 1e-3 * initial,
            "no contraction: {initial} -> {final_best}"
        );
    }

    #[test]
    fn global_best_monotone_under_fixed_fitness() {
        let space = DesignSpace::new(vec![-2.0], vec![2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut swarm = init_swarm(&space, 10, sphere, &mut rng);
        let mut prev = swarm.global_best().1;
        for _ in 0..50 {
            pso_step(&mut swarm, sphere, &space, &mut rng);
            let now = swarm.global_best().1;
            assert!(now <= prev, "global best rose from {prev} to {now}");
            prev = now;
        }
    }

    #[test]
    fn single_particle_pbest_equals_gbest() {
        let space = DesignSpace::unit(2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut swarm = init_swarm(&space, 1, sphere, &mut rng);
        for _ in 0..20 {
            pso_step(&mut swarm, sphere, &space, &mut rng);
            assert_eq!(swarm.personal_best_values()[0], swarm.global_best().1);
        }
    }

    #[test]
    fn stagnant_swarm_reinitializes_after_ten_iterations() {
        let space = DesignSpace::unit(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut swarm = init_swarm(&space, 4, sphere, &mut rng);
        // Glue every particle to the global best with zero velocity.
        let g = swarm.global_best_point.clone();
        for k in 0..swarm.len() {
            swarm.positions[k] = g.clone();
            swarm.velocities[k] = vec![0.0; 2];
            swarm.personal_best_points[k] = g.clone();
            swarm.personal_best_values[k] = sphere(&g);
        }
        swarm.global_best_value = sphere(&g);
        for step in 1..=9 {
            pso_step(&mut swarm, sphere, &space, &mut rng);
            assert!(
                swarm.positions.iter().all(|p| euclidean(p, &g) < 1e-12),
                "positions moved early at step {step}"
            );
        }
        pso_step(&mut swarm, sphere, &space, &mut rng);
        assert!(
            swarm.positions.iter().any(|p| euclidean(p, &g) > 1e-6),
            "re-initialization did not trigger at the 10th stagnant step"
        );
    }

    #[test]
    fn positions_respect_bounds() {
        let space = DesignSpace::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut swarm = init_swarm(&space, 8, |x| -sphere(x), &mut rng);
        for _ in 0..40 {
            pso_step(&mut swarm, |x| -sphere(x), &space, &mut rng);
            for p in swarm.positions() {
                assert!(space.contains(p), "escaped: {p:?}");
            }
        }
    }

    #[test]
    fn recompute_bests_reflects_new_fitness() {
        let space = DesignSpace::unit(1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut swarm = init_swarm(&space, 6, sphere, &mut rng);
        for _ in 0..5 {
            pso_step(&mut swarm, sphere, &space, &mut rng);
        }
        // Flip the landscape: minima become maxima.
        let flipped = |x: &[f64]| -sphere(x);
        swarm.recompute_bests(flipped);
        let (gp, gv) = swarm.global_best();
        assert_eq!(gv, flipped(gp));
        assert!(swarm
            .personal_best_values()
            .iter()
            .all(|v| *v >= gv));
    }
}
