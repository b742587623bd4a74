//! Benchmark instance generation and the line-oriented instance file format.
//!
//! Parameters are drawn uniformly from `N in {2..38}`, `lambda in {5..99}`,
//! `mu in {1..49}` and `B_l in {1..4}`. A draw is kept only if it is
//! non-trivial: the lazy policy is feasible but not optimal and the eager
//! policy is infeasible.

pub mod io;
pub mod rng;

pub use io::{format_instances, parse_instances, read_instances, write_instances, InstanceFileError};
pub use rng::SeededRng;

use thiserror::Error;

use crate::queue::{evaluate_closed_form, Instance, Policy};

pub const WORKER_RANGE: (u64, u64) = (2, 38);
pub const ARRIVAL_RANGE: (u64, u64) = (5, 99);
pub const SERVICE_RANGE: (u64, u64) = (1, 49);
pub const MIN_BACK_ROOM_RANGE: (u64, u64) = (1, 4);

/// What to generate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub s_values: Vec<usize>,
    pub per_s_count: usize,
    pub seed: u64,
    /// Draws allowed per capacity value before giving up on it.
    pub max_attempts: usize,
}

impl GenSpec {
    pub fn new(s_values: Vec<usize>, per_s_count: usize, seed: u64) -> Self {
        Self { s_values, per_s_count, seed, max_attempts: 1_000_000 }
    }

    /// The standard suite: `S in {10, 20, .., 100}`, thirty instances each.
    pub fn standard(seed: u64) -> Self {
        Self::new((1..=10).map(|i| i * 10).collect(), 30, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenSpecError {
    #[error("per-S count must be at least 1")]
    ZeroCount,
    #[error("capacity {0} outside [1, 100]")]
    CapacityOutOfRange(usize),
}

/// Generated instances plus any capacity values that ran out of attempts.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub instances: Vec<Instance>,
    pub shortfalls: Vec<Shortfall>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shortfall {
    pub capacity: usize,
    pub produced: usize,
    pub requested: usize,
}

impl std::fmt::Display for Shortfall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "S={}: only {} of {} instances after exhausting attempts",
            self.capacity, self.produced, self.requested
        )
    }
}

/// Deterministic rejection sampling. One generator stream covers every
/// requested capacity, in the order given.
pub fn generate(spec: &GenSpec) -> Result<Generated, GenSpecError> {
    if spec.per_s_count == 0 {
        return Err(GenSpecError::ZeroCount);
    }
    if let Some(&bad) = spec.s_values.iter().find(|&&s| !(1..=100).contains(&s)) {
        return Err(GenSpecError::CapacityOutOfRange(bad));
    }

    let mut rng = SeededRng::new(spec.seed);
    let mut instances = Vec::with_capacity(spec.s_values.len() * spec.per_s_count);
    let mut shortfalls = Vec::new();
    for &capacity in &spec.s_values {
        let mut produced = 0;
        let mut attempts = 0;
        while produced < spec.per_s_count && attempts < spec.max_attempts {
            attempts += 1;
            if let Some(inst) = draw(&mut rng, capacity).filter(is_nontrivial) {
                instances.push(inst);
                produced += 1;
            }
        }
        if produced < spec.per_s_count {
            shortfalls.push(Shortfall { capacity, produced, requested: spec.per_s_count });
        }
    }
    Ok(Generated { instances, shortfalls })
}

/// One parameter draw; `None` when it violates an instance invariant
/// (`N > S` or `B_l > N`).
fn draw(rng: &mut SeededRng, capacity: usize) -> Option<Instance> {
    let workers = rng.uniform(WORKER_RANGE.0, WORKER_RANGE.1) as usize;
    let arrival = rng.uniform(ARRIVAL_RANGE.0, ARRIVAL_RANGE.1) as f64;
    let service = rng.uniform(SERVICE_RANGE.0, SERVICE_RANGE.1) as f64;
    let min_back = rng.uniform(MIN_BACK_ROOM_RANGE.0, MIN_BACK_ROOM_RANGE.1) as f64;
    Instance::new(capacity, workers, arrival, service, min_back).ok()
}

/// Lazy feasible, lazy not optimal, eager infeasible.
///
/// Every policy other than the lazy one has `k_0 <= S-N-1` and lies
/// componentwise below `(S-N-1, S-N+1, .., S-1, S)`, so by monotonicity of
/// the back-room staffing some non-lazy policy is feasible iff that one is.
/// It then also beats the lazy policy on waiting time.
pub fn is_nontrivial(inst: &Instance) -> bool {
    let lazy = Policy::lazy(inst);
    let lazy_metrics = evaluate_closed_form(inst, &lazy);
    if !lazy_metrics.is_feasible(inst) {
        return false;
    }
    if evaluate_closed_form(inst, &Policy::eager(inst)).is_feasible(inst) {
        return false;
    }
    match lazy_improvement_witness(inst) {
        Some(witness) => {
            let m = evaluate_closed_form(inst, &witness);
            m.is_feasible(inst) && m.wait < lazy_metrics.wait
        }
        None => false,
    }
}

/// The lazy policy with `k_0` lowered by one, if that exists.
pub fn lazy_improvement_witness(inst: &Instance) -> Option<Policy> {
    let mut points = Policy::lazy(inst).into_points();
    if points[0] == 0 {
        return None;
    }
    points[0] -= 1;
    Some(Policy::from_points_unchecked(inst, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy_space::brute_force_optimum;
    use crate::queue::evaluate_direct;

    #[test]
    fn generates_requested_count_with_filter() {
        let out = generate(&GenSpec::new(vec![10], 30, 42)).unwrap();
        assert!(out.shortfalls.is_empty());
        assert_eq!(out.instances.len(), 30);
        for inst in &out.instances {
            assert_eq!(inst.capacity(), 10);
            assert!((2..=10).contains(&inst.workers()));
            assert!(!evaluate_direct(inst, &Policy::eager(inst)).is_feasible(inst));
            assert!(evaluate_direct(inst, &Policy::lazy(inst)).is_feasible(inst));
            // the optimum is strictly between the extremes
            let best = brute_force_optimum(inst).unwrap().unwrap();
            assert_ne!(best.policy, Policy::lazy(inst));
            assert_ne!(best.policy, Policy::eager(inst));
        }
    }

    #[test]
    fn same_seed_same_instances() {
        let spec = GenSpec::new(vec![10, 20], 5, 9);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = GenSpec { seed: 10, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap().instances, generate(&other).unwrap().instances);
    }

    #[test]
    fn draws_violating_invariants_are_resampled() {
        // S = 3 forces many N > S draws; all kept instances still satisfy N <= S
        let out = generate(&GenSpec::new(vec![3], 3, 1)).unwrap();
        for inst in &out.instances {
            assert!(inst.workers() <= 3);
            assert!(inst.min_back_room() <= inst.workers() as f64);
        }
    }

    #[test]
    fn reports_shortfall() {
        // with S = 2 only N = 2 is drawable, whose lone policy is both extremes
        let spec = GenSpec { max_attempts: 500, ..GenSpec::new(vec![2], 1, 3) };
        let out = generate(&spec).unwrap();
        assert!(out.instances.is_empty());
        assert_eq!(out.shortfalls, vec![Shortfall { capacity: 2, produced: 0, requested: 1 }]);
    }

    #[test]
    fn rejects_bad_spec() {
        assert_eq!(generate(&GenSpec::new(vec![10], 0, 1)), Err(GenSpecError::ZeroCount));
        assert_eq!(generate(&GenSpec::new(vec![101], 1, 1)), Err(GenSpecError::CapacityOutOfRange(101)));
    }

    #[test]
    fn witness_test_agrees_with_brute_force() {
        let mut rng = SeededRng::new(5);
        let mut checked = 0;
        for _ in 0..400 {
            let capacity = rng.uniform(2, 12) as usize;
            let workers = rng.uniform(1, capacity as u64) as usize;
            let arrival = rng.uniform(5, 99) as f64;
            let service = rng.uniform(1, 49) as f64;
            let min_back = rng.unit() * workers as f64;
            let inst = Instance::new(capacity, workers, arrival, service, min_back).unwrap();
            let lazy = Policy::lazy(&inst);
            if !evaluate_direct(&inst, &lazy).is_feasible(&inst) {
                continue;
            }
            let best = brute_force_optimum(&inst).unwrap().unwrap();
            let witness_ok = lazy_improvement_witness(&inst)
                .map(|w| evaluate_direct(&inst, &w).is_feasible(&inst))
                .unwrap_or(false);
            assert_eq!(witness_ok, best.policy != lazy, "{inst}");
            checked += 1;
        }
        assert!(checked > 50);
    }
}
