//! Exhaustive enumeration of the policy family and the brute-force optimum
//! built on it.

use thiserror::Error;

use crate::queue::{evaluate, Instance, Method, Policy};

/// Refuse brute force above this many policies unless explicitly forced.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instance has {count} policies, above the brute-force limit of {limit}")]
pub struct TooManyPolicies {
    pub count: u128,
    pub limit: u128,
}

/// Lexicographic stream over all policies of an instance.
///
/// Holds only the current combination; memory is `O(N)`.
#[derive(Debug, Clone)]
pub struct Policies {
    inst: Instance,
    current: Option<Vec<usize>>,
}

impl Policies {
    pub fn new(inst: &Instance) -> Self {
        let mut first = Policy::eager(inst).into_points();
        first.truncate(inst.workers());
        Self { inst: *inst, current: Some(first) }
    }
}

impl Iterator for Policies {
    type Item = Policy;

    fn next(&mut self) -> Option<Policy> {
        let current = self.current.as_mut()?;
        let mut out = current.clone();
        out.push(self.inst.capacity());

        // advance to the next N-combination of {0, .., S-1}
        let n = current.len();
        let top = self.inst.capacity() - n;
        match (0..n).rev().find(|&i| current[i] < top + i) {
            Some(i) => {
                current[i] += 1;
                for j in i + 1..n {
                    current[j] = current[j - 1] + 1;
                }
            }
            None => self.current = None,
        }
        Some(Policy::from_points_unchecked(&self.inst, out))
    }
}

/// All policies of `inst` in lexicographic order.
pub fn enumerate(inst: &Instance) -> Policies {
    Policies::new(inst)
}

/// The best feasible policy and its waiting time.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub policy: Policy,
    pub wait: f64,
}

/// Brute-force optimum, refusing instances with more than
/// [`BRUTE_FORCE_LIMIT`] policies. `Ok(None)` means infeasible.
pub fn brute_force_optimum(inst: &Instance) -> Result<Option<Optimum>, TooManyPolicies> {
    let count = inst.policy_count();
    if count > BRUTE_FORCE_LIMIT {
        return Err(TooManyPolicies { count, limit: BRUTE_FORCE_LIMIT });
    }
    Ok(brute_force_optimum_forced(inst, Method::Direct))
}

/// Evaluates every policy regardless of count. Ties on `Wq` go to the
/// lexicographically smallest policy.
pub fn brute_force_optimum_forced(inst: &Instance, method: Method) -> Option<Optimum> {
    let mut best: Option<Optimum> = None;
    for policy in enumerate(inst) {
        let m = evaluate(inst, &policy, method);
        if !m.is_feasible(inst) {
            continue;
        }
        if best.as_ref().is_none_or(|b| m.wait < b.wait) {
            best = Some(Optimum { policy, wait: m.wait });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::evaluate_direct;

    fn inst(s: usize, n: usize, bl: f64) -> Instance {
        Instance::new(s, n, 15.0, 3.0, bl).unwrap()
    }

    #[test]
    fn counts_and_order() {
        let all: Vec<_> = enumerate(&inst(6, 3, 0.0)).collect();
        assert_eq!(all.len(), 20);
        assert!(all.windows(2).all(|w| w[0] < w[1]));

        let single: Vec<_> = enumerate(&inst(1, 1, 0.0)).collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].points(), &[0, 1]);

        let pairs: Vec<_> = enumerate(&inst(10, 2, 0.0)).collect();
        assert_eq!(pairs.len(), 45);
        assert_eq!(pairs[0].points(), &[0, 1, 10]);
        assert_eq!(pairs[44].points(), &[8, 9, 10]);
    }

    #[test]
    fn count_matches_binomial_at_desk_scale() {
        for s in 1..=16 {
            for n in 1..=s {
                let i = inst(s, n, 0.0);
                let mut count = 0u128;
                for p in enumerate(&i) {
                    Policy::new(&i, p.points().to_vec()).expect("valid");
                    count += 1;
                }
                assert_eq!(count, i.policy_count(), "S={s} N={n}");
            }
        }
    }

    #[test]
    fn worked_example_optimum() {
        let best = brute_force_optimum(&inst(6, 3, 0.32)).unwrap().unwrap();
        assert_eq!(best.policy.points(), &[0, 3, 4, 6]);
        assert!((best.wait - 0.306323).abs() < 1e-5);
    }

    #[test]
    fn no_requirement_picks_eager() {
        let i = inst(8, 3, 0.0);
        let best = brute_force_optimum(&i).unwrap().unwrap();
        assert_eq!(best.policy, Policy::eager(&i));
        assert_eq!(best.wait, evaluate_direct(&i, &Policy::eager(&i)).wait);
    }

    #[test]
    fn infeasible_when_lazy_is() {
        let i = inst(6, 3, 0.7);
        assert!(!evaluate_direct(&i, &Policy::lazy(&i)).is_feasible(&i));
        assert_eq!(brute_force_optimum(&i).unwrap(), None);
    }

    #[test]
    fn refuses_large_spaces() {
        let i = Instance::new(60, 20, 15.0, 3.0, 1.0).unwrap();
        assert!(matches!(brute_force_optimum(&i), Err(TooManyPolicies { .. })));
    }
}
