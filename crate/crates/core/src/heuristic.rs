//! The greedy decrement/increment heuristic for the switching problem.
//!
//! Starting from the lazy policy, the heuristic repeatedly lowers the
//! smallest-index switching point that can be lowered. When a move breaks the
//! back-room requirement it caps the movable indices below that point and
//! raises switching points until the policy is feasible again. The best
//! feasible policy seen is returned.
//!
//! Taken literally, those rules can loop forever: a raise in the repair phase
//! may be undone by the next lowering, which lands back in the same state. The
//! control flow depends only on `(policy, cap, phase)`, so a repeated state
//! proves a cycle and the run stops there, returning the best policy found.

use rustc_hash::FxHashSet;

use crate::queue::{ClosedForm, Instance, Policy};

/// Improvement threshold on `Wq`.
pub const IMPROVEMENT_TOL: f64 = 1e-12;

/// True iff `k_i` can be lowered by one without breaking the strict order.
pub fn type1_eligible(pol: &Policy, i: usize) -> bool {
    assert!(i < pol.workers(), "index {i} out of range");
    can_lower(pol.points(), i)
}

/// True iff `k_i` can be raised by one without breaking the strict order.
pub fn type2_eligible(pol: &Policy, i: usize) -> bool {
    assert!(i < pol.workers(), "index {i} out of range");
    can_raise(pol.points(), i)
}

fn can_lower(k: &[usize], i: usize) -> bool {
    if i == 0 {
        k[0] > 0
    } else {
        k[i] - k[i - 1] > 1
    }
}

fn can_raise(k: &[usize], i: usize) -> bool {
    k[i + 1] - k[i] > 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicStatus {
    Infeasible,
    Solved,
}

/// How a traced policy was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Start,
    Lower(usize),
    Raise(usize),
}

impl std::fmt::Display for Move {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Move::Start => write!(f, "start"),
            Move::Lower(i) => write!(f, "lower k{i}"),
            Move::Raise(i) => write!(f, "raise k{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub policy: Policy,
    pub back: f64,
    pub wait: f64,
    pub action: Move,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicResult {
    pub status: HeuristicStatus,
    /// Best feasible policy found (the lazy policy when infeasible).
    pub policy: Policy,
    pub wait: f64,
    /// Number of policy evaluations.
    pub evaluations: usize,
    pub trace: Vec<TraceEntry>,
    /// Set when the run stopped on a repeated state rather than running out
    /// of moves.
    pub cycle_detected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Phase {
    Lower,
    Repair,
}

struct Run<'a> {
    inst: &'a Instance,
    evaluator: ClosedForm,
    points: Vec<usize>,
    best: (Vec<usize>, f64),
    trace: Vec<TraceEntry>,
}

impl Run<'_> {
    /// Evaluates the current policy, records it, and returns `(feasible, wait)`.
    fn visit(&mut self, action: Move) -> (bool, f64) {
        let m = self.evaluator.summary(&self.points);
        let feasible = m.is_feasible(self.inst);
        let policy = Policy::from_points_unchecked(self.inst, self.points.clone());
        self.trace.push(TraceEntry { policy, back: m.back, wait: m.wait, action });
        (feasible, m.wait)
    }

    fn offer(&mut self, wait: f64) {
        if wait < self.best.1 - IMPROVEMENT_TOL {
            self.best = (self.points.clone(), wait);
        }
    }
}

pub fn run_p1(inst: &Instance) -> HeuristicResult {
    let workers = inst.workers();
    let mut run = Run {
        inst,
        evaluator: ClosedForm::new(inst),
        points: Policy::lazy(inst).into_points(),
        best: (Vec::new(), f64::INFINITY),
        trace: Vec::new(),
    };

    let (feasible, wait) = run.visit(Move::Start);
    if !feasible {
        return HeuristicResult {
            status: HeuristicStatus::Infeasible,
            policy: Policy::lazy(inst),
            wait,
            evaluations: 1,
            trace: run.trace,
            cycle_detected: false,
        };
    }
    run.best = (run.points.clone(), wait);

    let mut cap = workers;
    let mut phase = Phase::Lower;
    let mut seen: FxHashSet<(Vec<usize>, usize, Phase)> = FxHashSet::default();
    let mut cycle_detected = false;

    loop {
        if !seen.insert((run.points.clone(), cap, phase)) {
            cycle_detected = true;
            break;
        }
        match phase {
            Phase::Lower => {
                let Some(j) = (0..cap).find(|&j| can_lower(&run.points, j)) else {
                    phase = Phase::Repair;
                    continue;
                };
                run.points[j] -= 1;
                let (feasible, wait) = run.visit(Move::Lower(j));
                if feasible {
                    run.offer(wait);
                } else {
                    cap = j;
                    phase = Phase::Repair;
                }
            }
            Phase::Repair => {
                let Some(j) = (0..cap).find(|&j| can_raise(&run.points, j)) else {
                    break;
                };
                run.points[j] += 1;
                let (feasible, wait) = run.visit(Move::Raise(j));
                if feasible {
                    run.offer(wait);
                    phase = Phase::Lower;
                }
            }
        }
    }

    let (points, wait) = run.best;
    HeuristicResult {
        status: HeuristicStatus::Solved,
        policy: Policy::from_points_unchecked(inst, points),
        wait,
        evaluations: run.trace.len(),
        trace: run.trace,
        cycle_detected,
    }
}
