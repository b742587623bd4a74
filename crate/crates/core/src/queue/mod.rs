//! Exact steady-state evaluation of a switching policy.
//!
//! Two evaluators compute the same quantities by independent routes:
//! [`evaluate_direct`] runs the balance-equation recursion state by state,
//! [`evaluate_closed_form`] works segment by segment with geometric-series
//! closed forms. Each serves as the other's oracle.

mod closed_form;
mod direct;
mod instance;
mod policy;

pub use closed_form::{evaluate_closed_form, evaluate_summary, ClosedForm};
pub use direct::evaluate_direct;
pub use instance::{Instance, InstanceError};
pub use policy::{Policy, PolicyError};

/// Absolute slack on `B >= B_l`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Steady-state quantities of one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// `P(0..=S)`, zero below `k_0`.
    pub probabilities: Vec<f64>,
    /// Expected number of workers in the front room, `F`.
    pub front: f64,
    /// Expected number of workers in the back room, `B = N - F`.
    pub back: f64,
    /// Expected number of customers, `L`.
    pub customers: f64,
    /// Expected waiting time in queue, `Wq`.
    pub wait: f64,
    /// Blocking probability `P(S)`.
    pub blocking: f64,
    /// Set when the closed-form evaluator fell back to log-space arithmetic.
    pub log_space: bool,
}

impl Metrics {
    pub fn is_feasible(&self, inst: &Instance) -> bool {
        is_feasible(self.back, inst)
    }

    /// Probability mass at each switching point `P(k_0), ..., P(k_N)`.
    pub fn at_points(&self, pol: &Policy) -> Vec<f64> {
        pol.points().iter().map(|&k| self.probabilities[k]).collect()
    }
}

/// The aggregate quantities of [`Metrics`] without the distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub front: f64,
    pub back: f64,
    pub customers: f64,
    pub wait: f64,
    pub blocking: f64,
    pub log_space: bool,
}

impl Summary {
    pub fn is_feasible(&self, inst: &Instance) -> bool {
        is_feasible(self.back, inst)
    }

    fn into_metrics(self, probabilities: Vec<f64>) -> Metrics {
        Metrics {
            probabilities,
            front: self.front,
            back: self.back,
            customers: self.customers,
            wait: self.wait,
            blocking: self.blocking,
            log_space: self.log_space,
        }
    }
}

/// `back >= B_l - FEASIBILITY_TOL`.
pub fn is_feasible(back: f64, inst: &Instance) -> bool {
    back >= inst.min_back_room() - FEASIBILITY_TOL
}

/// Which evaluator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Direct,
    #[default]
    ClosedForm,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Self::Direct),
            "closed" | "closed-form" => Ok(Self::ClosedForm),
            other => Err(format!("unknown evaluation method {other:?} (expected direct|closed)")),
        }
    }
}

pub fn evaluate(inst: &Instance, pol: &Policy, method: Method) -> Metrics {
    match method {
        Method::Direct => evaluate_direct(inst, pol),
        Method::ClosedForm => evaluate_closed_form(inst, pol),
    }
}

/// `Wq` from Little's law on a system of finite capacity.
fn waiting_time(inst: &Instance, customers: f64, blocking: f64) -> f64 {
    customers / (inst.arrival_rate() * (1.0 - blocking)) - 1.0 / inst.service_rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasibility_boundary_is_inclusive() {
        let inst = Instance::new(6, 3, 15.0, 3.0, 0.32).unwrap();
        assert!(is_feasible(0.648305, &inst));
        assert!(!is_feasible(0.1116577, &inst));
        assert!(is_feasible(0.32, &inst));
        assert!(is_feasible(0.32 - 0.5e-9, &inst));
        assert!(!is_feasible(0.32 - 2e-9, &inst));
    }

    #[test]
    fn method_names() {
        assert_eq!("direct".parse::<Method>(), Ok(Method::Direct));
        assert_eq!("closed".parse::<Method>(), Ok(Method::ClosedForm));
        assert!("fast".parse::<Method>().is_err());
    }
}
