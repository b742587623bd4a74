//! Helpers shared by the integration suites.
#![allow(dead_code)]

use qswitch::instances::{generate, GenSpec, SeededRng};
use qswitch::policy_space::enumerate;
use qswitch::queue::{evaluate_direct, Instance, Policy};

pub fn example() -> Instance {
    Instance::new(6, 3, 15.0, 3.0, 0.32).unwrap()
}

/// Generated instances with at most `10^5` policies.
pub fn desk_suite(seed: u64, wanted: usize) -> Vec<Instance> {
    let spec = GenSpec::new((6..=24).collect(), 16, seed);
    let mut out: Vec<Instance> = generate(&spec)
        .unwrap()
        .instances
        .into_iter()
        .filter(|i| i.policy_count() <= 100_000)
        .collect();
    out.truncate(wanted);
    out
}

/// A random valid instance with real-valued rates.
pub fn random_instance(rng: &mut SeededRng, max_capacity: usize) -> Instance {
    let capacity = rng.uniform(1, max_capacity as u64) as usize;
    let workers = rng.uniform(1, capacity as u64) as usize;
    let arrival = 0.1 + 99.9 * rng.unit();
    let service = 0.1 + 49.9 * rng.unit();
    let min_back = rng.unit() * workers as f64;
    Instance::new(capacity, workers, arrival, service, min_back).unwrap()
}

/// `|a - b| <= tol * max(|a|, |b|, scale)`: relative agreement, with `scale`
/// the magnitude of the terms a quantity is computed from.
pub fn agree(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}

/// Exact optimum by enumeration plus the gap to the runner-up value.
pub struct BruteForce {
    pub best: Option<(Policy, f64)>,
    /// `Wq` of the second-best feasible policy minus the best.
    pub gap: f64,
}

pub fn brute_with_gap(inst: &Instance) -> BruteForce {
    let mut first: Option<(Policy, f64)> = None;
    let mut second = f64::INFINITY;
    for p in enumerate(inst) {
        let m = evaluate_direct(inst, &p);
        if !m.is_feasible(inst) {
            continue;
        }
        match &first {
            Some((_, w)) if m.wait >= *w => second = second.min(m.wait),
            _ => {
                if let Some((_, w)) = &first {
                    second = second.min(*w);
                }
                first = Some((p, m.wait));
            }
        }
    }
    let gap = first.as_ref().map_or(f64::INFINITY, |(_, w)| second - w);
    BruteForce { best: first, gap }
}
