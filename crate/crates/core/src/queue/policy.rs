use std::fmt;

use thiserror::Error;

use super::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("policy needs N+1={expected} switching points, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("last switching point must equal the capacity {capacity}, got {got}")]
    LastNotCapacity { capacity: usize, got: usize },
    #[error("switching point k{index}={value} outside its range [{lo}, {hi}]")]
    OutOfRange { index: usize, value: usize, lo: usize, hi: usize },
    #[error("switching points must strictly increase (k{index} >= k{next})", next = index + 1)]
    NotIncreasing { index: usize },
    #[error("cannot parse switching point {0:?}")]
    Parse(String),
}

/// A switching policy `k_0 < k_1 < ... < k_N = S`.
///
/// `i` workers are in the front room while the number of customers lies in
/// `(k_{i-1}, k_i]`; nobody serves while at most `k_0` customers are present.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Policy(Vec<usize>);

impl Policy {
    pub fn new(inst: &Instance, points: Vec<usize>) -> Result<Self, PolicyError> {
        let n = inst.workers();
        if points.len() != n + 1 {
            return Err(PolicyError::WrongLength { expected: n + 1, got: points.len() });
        }
        if points[n] != inst.capacity() {
            return Err(PolicyError::LastNotCapacity { capacity: inst.capacity(), got: points[n] });
        }
        for (i, &value) in points[..n].iter().enumerate() {
            let (lo, hi) = inst.point_range(i);
            if value < lo || value > hi {
                return Err(PolicyError::OutOfRange { index: i, value, lo, hi });
            }
        }
        if let Some(index) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(PolicyError::NotIncreasing { index });
        }
        Ok(Self(points))
    }

    /// Parses a comma-separated list such as `"0,1,2,6"`.
    pub fn parse(inst: &Instance, text: &str) -> Result<Self, PolicyError> {
        let points = text
            .split(',')
            .map(|tok| tok.trim().parse::<usize>().map_err(|_| PolicyError::Parse(tok.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(inst, points)
    }

    /// Caller guarantees validity; checked in debug builds.
    pub(crate) fn from_points_unchecked(inst: &Instance, points: Vec<usize>) -> Self {
        debug_assert_eq!(Self::new(inst, points.clone()), Ok(Self(points.clone())));
        Self(points)
    }

    /// `(0, 1, ..., N-1, S)`: every worker joins the front room as early as
    /// possible. Smallest `Wq` and smallest back-room staffing of all policies,
    /// hence optimal whenever it is feasible.
    pub fn eager(inst: &Instance) -> Self {
        let n = inst.workers();
        let mut points: Vec<usize> = (0..n).collect();
        points.push(inst.capacity());
        Self(points)
    }

    /// `(S-N, S-N+1, ..., S-1, S)`: workers join as late as possible. Largest
    /// `Wq` and largest back-room staffing; if it is infeasible, so is every
    /// other policy.
    pub fn lazy(inst: &Instance) -> Self {
        let (s, n) = (inst.capacity(), inst.workers());
        Self((s - n..=s).collect())
    }

    /// All `N+1` points including the fixed `k_N = S`.
    pub fn points(&self) -> &[usize] {
        &self.0
    }

    /// The decision variables `k_0..k_{N-1}`.
    pub fn switching_points(&self) -> &[usize] {
        &self.0[..self.0.len() - 1]
    }

    pub fn workers(&self) -> usize {
        self.0.len() - 1
    }

    pub fn into_points(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Instance {
        Instance::new(6, 3, 15.0, 3.0, 0.32).unwrap()
    }

    #[test]
    fn extremal_policies() {
        let inst = example();
        assert_eq!(Policy::eager(&inst).points(), &[0, 1, 2, 6]);
        assert_eq!(Policy::lazy(&inst).points(), &[3, 4, 5, 6]);

        let single = Instance::new(1, 1, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(Policy::eager(&single).points(), &[0, 1]);
        assert_eq!(Policy::lazy(&single), Policy::eager(&single));

        let wide = Instance::new(10, 4, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(Policy::eager(&wide).points(), &[0, 1, 2, 3, 10]);
        assert_eq!(Policy::lazy(&wide).points(), &[6, 7, 8, 9, 10]);
    }

    #[test]
    fn validation() {
        let inst = example();
        assert!(Policy::new(&inst, vec![0, 3, 4, 6]).is_ok());
        assert_eq!(
            Policy::new(&inst, vec![0, 3, 6]),
            Err(PolicyError::WrongLength { expected: 4, got: 3 })
        );
        assert_eq!(
            Policy::new(&inst, vec![0, 3, 4, 5]),
            Err(PolicyError::LastNotCapacity { capacity: 6, got: 5 })
        );
        assert_eq!(
            Policy::new(&inst, vec![4, 4, 5, 6]),
            Err(PolicyError::OutOfRange { index: 0, value: 4, lo: 0, hi: 3 })
        );
        assert_eq!(Policy::new(&inst, vec![1, 1, 4, 6]), Err(PolicyError::NotIncreasing { index: 0 }));
    }

    #[test]
    fn parse_and_display() {
        let inst = example();
        let p = Policy::parse(&inst, "0, 3,4,6").unwrap();
        assert_eq!(p.to_string(), "(0,3,4,6)");
        assert_eq!(p.switching_points(), &[0, 3, 4]);
        assert!(matches!(Policy::parse(&inst, "0,x,4,6"), Err(PolicyError::Parse(_))));
    }
}
