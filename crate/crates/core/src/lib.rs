//! Optimal switching of cross-trained workers between a customer-facing front
//! room and a back room.
//!
//! A facility with `N` workers and front-room capacity `S` switches workers
//! according to a policy `k_0 < k_1 < ... < k_N = S`: `i` workers serve
//! whenever the customer count lies in `(k_{i-1}, k_i]`. Customers arrive as a
//! Poisson stream and service times are exponential, so every policy induces a
//! finite birth-death chain. The toolkit answers one question: which policy
//! minimizes the expected queueing delay `Wq` while keeping at least
//! `min_back_room` workers in the back room on average?
//!
//! The crate is organised bottom-up:
//!
//!  * [`queue`] evaluates a policy exactly (two independent evaluators).
//!  * [`policy_space`] enumerates every policy and provides a brute-force optimum.
//!  * [`heuristic`] is the classic greedy decrement/increment heuristic.
//!  * [`solver`] is the exact method: domain shaving plus depth-first
//!    branch-and-bound with monotone bounds and optional dominance cuts.
//!  * [`instances`] generates benchmark instances and reads/writes them.
//!  * [`bench`] runs suites, builds best-known tables and computes MRE.
//!
//! ```
//! use qswitch::queue::{evaluate, Instance, Method, Policy};
//!
//! let inst = Instance::new(6, 3, 15.0, 3.0, 0.32).unwrap();
//! let pol = Policy::new(&inst, vec![0, 3, 4, 6]).unwrap();
//! let m = evaluate(&inst, &pol, Method::ClosedForm);
//! assert!(m.is_feasible(&inst));
//! assert!((m.wait - 0.306323).abs() < 1e-6);
//! ```

pub mod bench;
pub mod heuristic;
pub mod instances;
mod numeric;
pub mod policy_space;
pub mod queue;
pub mod solver;

pub use queue::{evaluate, Instance, Method, Metrics, Policy};
