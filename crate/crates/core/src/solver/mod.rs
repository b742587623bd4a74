//! Exact minimisation of `Wq` subject to the back-room requirement.
//!
//! Every bound in this module comes from one monotonicity fact: lowering a
//! single switching point never increases `Wq` and never increases the
//! back-room staffing `B`. Hence over any box of policies the componentwise
//! smallest member (its *gmin completion*) has the smallest `Wq` and the
//! componentwise largest member (its *gmax completion*) the largest `B`.
//!
//! [`Solver`] owns a [`DomainStore`] and an incumbent and offers the building
//! blocks:
//!
//! * single shaving probes ([`Solver::gmin_case`], [`Solver::gmax_case`],
//!   [`Solver::wq_case`]) and their fixpoints ([`Solver::bl_shave`],
//!   [`Solver::wq_shave`], [`Solver::alternating_shave`]);
//! * depth-first branch-and-bound ([`Solver::search`]).
//!
//! [`solve`] combines them according to a [`Strategy`].
//!
//! Shrinking is relative to the incumbent: after a shave the box still holds
//! every feasible policy that beats the incumbent by more than `eps_wq`, but
//! the incumbent itself may have been cut away. An empty box therefore proves
//! the incumbent optimal.

mod domain;
mod dominance;
mod search;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use domain::{DomainStore, Emptied};
pub use dominance::{record_dominance, DominanceCut};

use crate::heuristic::{run_p1, HeuristicStatus};
use crate::queue::{ClosedForm, Instance, Policy, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Search only.
    None,
    /// Back-room shaving fixpoint, then search.
    BlShave,
    /// Waiting-time shaving fixpoint, then search.
    WqShave,
    /// Both shaving procedures alternately to a joint fixpoint, then search.
    AltShave,
    /// Alternating shaving, re-run after every improving solution found by
    /// search.
    #[default]
    AltSearchShave,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::None,
        Strategy::BlShave,
        Strategy::WqShave,
        Strategy::AltShave,
        Strategy::AltSearchShave,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::BlShave => "bl-shave",
            Strategy::WqShave => "wq-shave",
            Strategy::AltShave => "alt-shave",
            Strategy::AltSearchShave => "alt-search-shave",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| {
            format!("unknown strategy {s:?} (expected none|bl-shave|wq-shave|alt-shave|alt-search-shave)")
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub strategy: Strategy,
    pub dominance: bool,
    pub hybrid: bool,
    /// Wall-clock budget in seconds.
    pub time_limit: f64,
    /// Minimum `Wq` gain that counts as an improvement; also the pruning
    /// margin.
    pub eps_wq: f64,
    /// Absolute slack on `B >= B_l`.
    pub eps_b: f64,
    /// Optional cap on search nodes, a deterministic alternative to the
    /// clock.
    pub node_limit: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::default(),
            dominance: false,
            hybrid: false,
            time_limit: 600.0,
            eps_wq: 1e-9,
            eps_b: crate::queue::FEASIBILITY_TOL,
            node_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self { strategy, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.time_limit.is_nan() || self.time_limit <= 0.0 {
            return Err(ConfigError::TimeLimit(self.time_limit));
        }
        if [self.eps_wq, self.eps_b].iter().any(|e| e.is_nan() || *e <= 0.0) {
            return Err(ConfigError::Tolerance);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("time limit must be positive, got {0}")]
    TimeLimit(f64),
    #[error("tolerances must be positive")]
    Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    /// Stopped by the node budget with an incumbent.
    Feasible,
    Infeasible,
    TimeoutWithIncumbent,
    TimeoutNone,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::TimeoutWithIncumbent => "timeout-with-incumbent",
            Status::TimeoutNone => "timeout-none",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Status::Optimal,
            Status::Feasible,
            Status::Infeasible,
            Status::TimeoutWithIncumbent,
            Status::TimeoutNone,
        ]
        .into_iter()
        .find(|st| st.name() == s)
        .ok_or_else(|| format!("unknown status {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub shave_probes: u64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub incumbent: Option<Policy>,
    pub wait: Option<f64>,
    /// Optimality (or infeasibility) was proved.
    pub proof: bool,
    /// `(elapsed seconds, Wq)` at every incumbent improvement.
    pub incumbent_trace: Vec<(f64, f64)>,
    pub stats: SolveStats,
    pub elapsed: f64,
}

impl SolveResult {
    /// Equality on every field that does not depend on the wall clock.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let waits = |r: &Self| r.incumbent_trace.iter().map(|&(_, w)| w).collect::<Vec<_>>();
        self.status == other.status
            && self.incumbent == other.incumbent
            && self.wait == other.wait
            && self.proof == other.proof
            && self.stats == other.stats
            && waits(self) == waits(other)
    }
}

/// Why a solver stage stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    /// The box holds no feasible policy better than the incumbent.
    Proved,
    /// Even the lazy policy violates the back-room requirement.
    Infeasible,
    Timeout,
    /// The node budget ran out.
    Budget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub policy: Policy,
    pub wait: f64,
}

/// Mutable state of one solve.
#[derive(Debug)]
pub struct Solver {
    inst: Instance,
    evaluator: ClosedForm,
    cfg: SolverConfig,
    domains: DomainStore,
    best: Option<Incumbent>,
    cuts: Vec<DominanceCut>,
    stats: SolveStats,
    trace: Vec<(f64, f64)>,
    started: Instant,
    deadline: Option<Instant>,
}

impl Solver {
    pub fn new(inst: &Instance, cfg: SolverConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let started = Instant::now();
        let deadline = Duration::try_from_secs_f64(cfg.time_limit)
            .ok()
            .and_then(|d| started.checked_add(d));
        Ok(Self {
            inst: *inst,
            evaluator: ClosedForm::new(inst),
            cfg,
            domains: DomainStore::new(inst),
            best: None,
            cuts: Vec::new(),
            stats: SolveStats::default(),
            trace: Vec::new(),
            started,
            deadline,
        })
    }

    pub fn domains(&self) -> &DomainStore {
        &self.domains
    }

    pub fn incumbent(&self) -> Option<&Incumbent> {
        self.best.as_ref()
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn cuts(&self) -> &[DominanceCut] {
        &self.cuts
    }

    fn tick(&self) -> Result<(), Halt> {
        match self.deadline {
            Some(deadline) if Instant::now() >= deadline => Err(Halt::Timeout),
            _ => Ok(()),
        }
    }

    fn evaluate(&mut self, pol: &Policy) -> Summary {
        self.stats.evaluations += 1;
        self.evaluator.summary(pol.points())
    }

    fn feasible(&self, m: &Summary) -> bool {
        m.back >= self.inst.min_back_room() - self.cfg.eps_b
    }

    fn improves(&self, wait: f64) -> bool {
        self.best.as_ref().is_none_or(|b| wait < b.wait - self.cfg.eps_wq)
    }

    /// Makes `pol` the incumbent if it improves on it. The caller vouches for
    /// feasibility.
    pub fn offer(&mut self, pol: &Policy, wait: f64) -> bool {
        if !self.improves(wait) {
            return false;
        }
        self.trace.push((self.started.elapsed().as_secs_f64(), wait));
        self.best = Some(Incumbent { policy: pol.clone(), wait });
        if self.cfg.dominance {
            self.cuts.extend(record_dominance(pol));
        }
        true
    }

    /// Establishes the first incumbent: the lazy policy, improved by the
    /// heuristic in hybrid mode.
    pub fn seed(&mut self) -> Result<(), Halt> {
        self.tick()?;
        if self.cfg.hybrid {
            let greedy = run_p1(&self.inst);
            self.stats.evaluations += greedy.evaluations as u64;
            if greedy.status == HeuristicStatus::Infeasible {
                return Err(Halt::Infeasible);
            }
            let start = &greedy.trace[0];
            self.offer(&start.policy, start.wait);
            self.offer(&greedy.policy, greedy.wait);
            return Ok(());
        }
        let lazy = Policy::lazy(&self.inst);
        let m = self.evaluate(&lazy);
        if !self.feasible(&m) {
            return Err(Halt::Infeasible);
        }
        self.offer(&lazy, m.wait);
        Ok(())
    }

    fn shrink_hi(&mut self, i: usize) -> Result<bool, Halt> {
        let hi = self.domains.hi(i);
        if hi == self.domains.lo(i) {
            return Err(Halt::Proved);
        }
        self.domains.set_hi(i, hi - 1).map_err(|Emptied| Halt::Proved)?;
        Ok(true)
    }

    fn shrink_lo(&mut self, i: usize) -> Result<bool, Halt> {
        let lo = self.domains.lo(i);
        if lo == self.domains.hi(i) {
            return Err(Halt::Proved);
        }
        self.domains.set_lo(i, lo + 1).map_err(|Emptied| Halt::Proved)?;
        Ok(true)
    }

    /// Fixes `k_i` at its upper bound and completes with gmin. A feasible
    /// completion is offered as incumbent; no policy with `k_i` at that bound
    /// can then beat it, so the bound drops by one. Returns whether the
    /// domain changed.
    pub fn gmin_case(&mut self, i: usize) -> Result<bool, Halt> {
        self.tick()?;
        self.stats.shave_probes += 1;
        let Some(pol) = self.domains.gmin(&[(i, self.domains.hi(i))]) else {
            return self.shrink_hi(i);
        };
        let m = self.evaluate(&pol);
        if !self.feasible(&m) {
            return Ok(false);
        }
        self.offer(&pol, m.wait);
        self.shrink_hi(i)
    }

    /// Fixes `k_i` at its lower bound and completes with gmax. If even that
    /// is infeasible, no feasible policy has `k_i` at that bound and the
    /// bound rises by one; a feasible completion is offered as incumbent.
    pub fn gmax_case(&mut self, i: usize) -> Result<bool, Halt> {
        self.tick()?;
        self.stats.shave_probes += 1;
        let Some(pol) = self.domains.gmax(&[(i, self.domains.lo(i))]) else {
            return self.shrink_lo(i);
        };
        let m = self.evaluate(&pol);
        if self.feasible(&m) {
            self.offer(&pol, m.wait);
            return Ok(false);
        }
        self.shrink_lo(i)
    }

    /// Fixes `k_i` at its upper bound and completes with gmin, ignoring the
    /// back-room requirement. If that cannot beat the incumbent, nothing
    /// with `k_i` at that bound can.
    pub fn wq_case(&mut self, i: usize) -> Result<bool, Halt> {
        self.tick()?;
        self.stats.shave_probes += 1;
        let Some(best) = self.best.as_ref().map(|b| b.wait) else {
            return Ok(false);
        };
        let Some(pol) = self.domains.gmin(&[(i, self.domains.hi(i))]) else {
            return self.shrink_hi(i);
        };
        let m = self.evaluate(&pol);
        if m.wait >= best - self.cfg.eps_wq {
            return self.shrink_hi(i);
        }
        Ok(false)
    }

    /// Back-room shaving to a fixpoint: per index, the gmin case while it
    /// shrinks, then the gmax case while it shrinks; passes repeat until one
    /// changes nothing. Returns whether any domain changed.
    pub fn bl_shave(&mut self) -> Result<bool, Halt> {
        let mut any = false;
        loop {
            let mut changed = false;
            for i in 0..self.domains.len() {
                while self.gmin_case(i)? {
                    changed = true;
                }
                while self.gmax_case(i)? {
                    changed = true;
                }
            }
            if !changed {
                return Ok(any);
            }
            any = true;
        }
    }

    /// Waiting-time shaving to a fixpoint.
    pub fn wq_shave(&mut self) -> Result<bool, Halt> {
        let mut any = false;
        loop {
            let mut changed = false;
            for i in 0..self.domains.len() {
                while self.wq_case(i)? {
                    changed = true;
                }
            }
            if !changed {
                return Ok(any);
            }
            any = true;
        }
    }

    /// Both shaving procedures in turn until neither changes a domain.
    pub fn alternating_shave(&mut self) -> Result<bool, Halt> {
        let mut any = self.bl_shave()?;
        while self.wq_shave()? {
            any = true;
            if !self.bl_shave()? {
                break;
            }
        }
        Ok(any)
    }

    /// Runs the configured strategy to completion.
    fn drive(&mut self) -> Result<(), Halt> {
        self.seed()?;
        match self.cfg.strategy {
            Strategy::None => {}
            Strategy::BlShave => {
                self.bl_shave()?;
            }
            Strategy::WqShave => {
                self.wq_shave()?;
            }
            Strategy::AltShave => {
                self.alternating_shave()?;
            }
            Strategy::AltSearchShave => loop {
                self.alternating_shave()?;
                self.search(true)?;
            },
        }
        self.search(false)
    }

    pub fn finish(self, halt: Halt) -> SolveResult {
        let (status, proof) = match (halt, self.best.is_some()) {
            (Halt::Proved, true) => (Status::Optimal, true),
            (Halt::Proved, false) | (Halt::Infeasible, _) => (Status::Infeasible, true),
            (Halt::Timeout, true) => (Status::TimeoutWithIncumbent, false),
            (Halt::Timeout, false) | (Halt::Budget, false) => (Status::TimeoutNone, false),
            (Halt::Budget, true) => (Status::Feasible, false),
        };
        let (incumbent, wait) = match self.best {
            Some(b) if status != Status::Infeasible => (Some(b.policy), Some(b.wait)),
            _ => (None, None),
        };
        SolveResult {
            status,
            incumbent,
            wait,
            proof,
            incumbent_trace: self.trace,
            stats: self.stats,
            elapsed: self.started.elapsed().as_secs_f64(),
        }
    }
}

pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult, ConfigError> {
    let mut solver = Solver::new(inst, cfg.clone())?;
    let halt = match solver.drive() {
        Ok(()) => Halt::Proved,
        Err(halt) => halt,
    };
    Ok(solver.finish(halt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Instance {
        Instance::new(6, 3, 15.0, 3.0, 0.32).unwrap()
    }

    #[test]
    fn shaving_replay_matches_worked_example() {
        let mut s = Solver::new(&example(), SolverConfig::default()).unwrap();
        assert!(!s.gmax_case(0).unwrap());
        assert!(!s.gmax_case(1).unwrap());
        assert!(s.gmax_case(2).unwrap());
        assert_eq!((s.domains().lo(2), s.domains().hi(2)), (3, 5));

        let mut s = Solver::new(&example(), SolverConfig::default()).unwrap();
        assert!(s.gmin_case(0).unwrap());
        assert!(s.gmin_case(0).unwrap());
        assert_eq!(s.domains().to_string(), "[0..1] [1..4] [2..5] [6]");
        assert!(!s.gmin_case(0).unwrap());
        assert_eq!(s.incumbent().unwrap().policy.points(), &[2, 3, 4, 6]);
    }

    #[test]
    fn wq_shave_with_lazy_incumbent_only_cuts_the_incumbent() {
        let inst = example();
        let mut s = Solver::new(&inst, SolverConfig::default()).unwrap();
        s.seed().unwrap();
        assert!(s.wq_shave().unwrap());
        assert_eq!(s.domains().to_string(), "[0..2] [1..4] [2..5] [6]");
    }

    #[test]
    fn every_strategy_proves_the_example_optimum() {
        for strategy in Strategy::ALL {
            for dominance in [false, true] {
                for hybrid in [false, true] {
                    let cfg = SolverConfig { strategy, dominance, hybrid, ..SolverConfig::default() };
                    let r = solve(&example(), &cfg).unwrap();
                    assert_eq!(r.status, Status::Optimal, "{cfg:?}");
                    assert!(r.proof);
                    assert_eq!(r.incumbent.unwrap().points(), &[0, 3, 4, 6], "{cfg:?}");
                    assert!((r.wait.unwrap() - 0.306323).abs() < 1e-6);
                    assert!(r.incumbent_trace.windows(2).all(|w| w[1].1 < w[0].1));
                }
            }
        }
    }

    #[test]
    fn infeasible_regardless_of_strategy() {
        let inst = Instance::new(6, 3, 15.0, 3.0, 0.7).unwrap();
        for strategy in Strategy::ALL {
            for hybrid in [false, true] {
                let cfg = SolverConfig { strategy, hybrid, ..SolverConfig::default() };
                let r = solve(&inst, &cfg).unwrap();
                assert_eq!(r.status, Status::Infeasible);
                assert_eq!(r.incumbent, None);
            }
        }
    }

    #[test]
    fn single_policy_instance_is_proved_immediately() {
        let inst = Instance::new(3, 3, 15.0, 3.0, 0.0).unwrap();
        let mut s = Solver::new(&inst, SolverConfig::default()).unwrap();
        s.seed().unwrap();
        assert_eq!(s.bl_shave(), Err(Halt::Proved));
    }

    #[test]
    fn node_budget_and_timeouts() {
        let inst = Instance::new(60, 20, 80.0, 5.0, 2.0).unwrap();
        let cfg = SolverConfig {
            strategy: Strategy::None,
            node_limit: Some(50),
            ..SolverConfig::default()
        };
        let r = solve(&inst, &cfg).unwrap();
        assert_eq!(r.status, Status::Feasible);
        assert!(!r.proof);
        assert!(r.stats.nodes <= 50);

        let cfg = SolverConfig { time_limit: 1e-12, ..SolverConfig::default() };
        let r = solve(&inst, &cfg).unwrap();
        assert_eq!(r.status, Status::TimeoutNone);
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig { time_limit: 0.0, ..SolverConfig::default() };
        assert_eq!(bad.validate(), Err(ConfigError::TimeLimit(0.0)));
        let bad = SolverConfig { eps_wq: 0.0, ..SolverConfig::default() };
        assert_eq!(bad.validate(), Err(ConfigError::Tolerance));
        assert_eq!("alt-shave".parse::<Strategy>(), Ok(Strategy::AltShave));
        assert!("fast".parse::<Strategy>().is_err());
        assert_eq!("timeout-none".parse::<Status>(), Ok(Status::TimeoutNone));
    }
}
