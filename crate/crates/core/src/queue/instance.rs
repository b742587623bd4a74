use std::fmt;

use thiserror::Error;

/// Why a parameter tuple is not a valid instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("capacity S must be at least 1")]
    ZeroCapacity,
    #[error("worker count N must be at least 1")]
    ZeroWorkers,
    #[error("worker count N={workers} exceeds capacity S={capacity}")]
    TooManyWorkers { workers: usize, capacity: usize },
    #[error("arrival rate must be positive and finite, got {0}")]
    BadArrivalRate(f64),
    #[error("service rate must be positive and finite, got {0}")]
    BadServiceRate(f64),
    #[error("minimum back-room staffing must lie in [0, N={workers}], got {value}")]
    BadMinBackRoom { value: f64, workers: usize },
}

/// Problem parameters of one switching problem.
///
/// Fields are private so that every `Instance` in circulation has passed
/// [`Instance::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instance {
    capacity: usize,
    workers: usize,
    arrival_rate: f64,
    service_rate: f64,
    min_back_room: f64,
}

impl Instance {
    /// Validates and builds an instance.
    ///
    /// `capacity` is the maximum number of customers in the front room,
    /// `workers` the number of cross-trained workers and `min_back_room` the
    /// required expected number of workers in the back room.
    pub fn new(
        capacity: usize,
        workers: usize,
        arrival_rate: f64,
        service_rate: f64,
        min_back_room: f64,
    ) -> Result<Self, InstanceError> {
        if capacity == 0 {
            return Err(InstanceError::ZeroCapacity);
        }
        if workers == 0 {
            return Err(InstanceError::ZeroWorkers);
        }
        if workers > capacity {
            return Err(InstanceError::TooManyWorkers { workers, capacity });
        }
        if !(arrival_rate.is_finite() && arrival_rate > 0.0) {
            return Err(InstanceError::BadArrivalRate(arrival_rate));
        }
        if !(service_rate.is_finite() && service_rate > 0.0) {
            return Err(InstanceError::BadServiceRate(service_rate));
        }
        if !(min_back_room >= 0.0 && min_back_room <= workers as f64) {
            return Err(InstanceError::BadMinBackRoom { value: min_back_room, workers });
        }
        Ok(Self { capacity, workers, arrival_rate, service_rate, min_back_room })
    }

    /// Front-room capacity `S`.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of workers `N`.
    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }

    pub fn service_rate(&self) -> f64 {
        self.service_rate
    }

    pub fn min_back_room(&self) -> f64 {
        self.min_back_room
    }

    /// Returns a copy with a different back-room requirement.
    pub fn with_min_back_room(&self, min_back_room: f64) -> Result<Self, InstanceError> {
        Self::new(self.capacity, self.workers, self.arrival_rate, self.service_rate, min_back_room)
    }

    /// Admissible range `[i, S - N + i]` of switching point `i < N`.
    pub fn point_range(&self, i: usize) -> (usize, usize) {
        debug_assert!(i < self.workers);
        (i, self.capacity - self.workers + i)
    }

    /// Number of distinct policies, `C(S, N)`, saturating at `u128::MAX`.
    pub fn policy_count(&self) -> u128 {
        binomial(self.capacity as u128, self.workers as u128)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S={} N={} lambda={} mu={} Bl={}",
            self.capacity, self.workers, self.arrival_rate, self.service_rate, self.min_back_room
        )
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}
