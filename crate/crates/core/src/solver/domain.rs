use std::fmt;

use crate::queue::{Instance, Policy};

/// Integer interval `[lo_i, hi_i]` for each switching point `k_0..k_{N-1}`.
///
/// Every shrink is followed by an ordering pass, so that `lo_{i+1} > lo_i` and
/// `hi_i < hi_{i+1}` always hold. A shrink that would empty an interval is
/// refused and reported; the store itself never becomes inconsistent.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainStore {
    inst: Instance,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

/// Returned when a shrink would leave some interval empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emptied;

impl DomainStore {
    /// Full domains `[i, S-N+i]`.
    pub fn new(inst: &Instance) -> Self {
        let (lo, hi) = (0..inst.workers()).map(|i| inst.point_range(i)).unzip();
        Self { inst: *inst, lo, hi }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn lo(&self, i: usize) -> usize {
        self.lo[i]
    }

    pub fn hi(&self, i: usize) -> usize {
        self.hi[i]
    }

    pub fn bounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.lo.iter().copied().zip(self.hi.iter().copied())
    }

    /// Whether every switching point of `pol` lies in its interval.
    pub fn contains(&self, pol: &Policy) -> bool {
        pol.switching_points()
            .iter()
            .zip(self.bounds())
            .all(|(&k, (lo, hi))| lo <= k && k <= hi)
    }

    /// Lowers `hi_i` to `value` and tightens the upper bounds to its left.
    pub fn set_hi(&mut self, i: usize, value: usize) -> Result<(), Emptied> {
        if value < self.lo[i] {
            return Err(Emptied);
        }
        if value >= self.hi[i] {
            return Ok(());
        }
        self.hi[i] = value;
        for j in (0..i).rev() {
            let cap = self.hi[j + 1] - 1;
            if self.hi[j] <= cap {
                break;
            }
            debug_assert!(cap >= self.lo[j]);
            self.hi[j] = cap;
        }
        Ok(())
    }

    /// Raises `lo_i` to `value` and tightens the lower bounds to its right.
    pub fn set_lo(&mut self, i: usize, value: usize) -> Result<(), Emptied> {
        if value > self.hi[i] {
            return Err(Emptied);
        }
        if value <= self.lo[i] {
            return Ok(());
        }
        self.lo[i] = value;
        for j in i + 1..self.lo.len() {
            let floor = self.lo[j - 1] + 1;
            if self.lo[j] >= floor {
                break;
            }
            debug_assert!(floor <= self.hi[j]);
            self.lo[j] = floor;
        }
        Ok(())
    }

    /// Completes `fixed` (pairs `(index, value)`) with the smallest ordered
    /// values in the box. `None` when no completion exists.
    pub fn gmin(&self, fixed: &[(usize, usize)]) -> Option<Policy> {
        self.complete_min(fixed).map(|points| Policy::from_points_unchecked(&self.inst, points))
    }

    /// Completes `fixed` with the largest ordered values in the box.
    pub fn gmax(&self, fixed: &[(usize, usize)]) -> Option<Policy> {
        self.complete_max(fixed).map(|points| Policy::from_points_unchecked(&self.inst, points))
    }

    fn complete_min(&self, fixed: &[(usize, usize)]) -> Option<Vec<usize>> {
        let n = self.len();
        let mut points = Vec::with_capacity(n + 1);
        for i in 0..n {
            let floor = points.last().map_or(0, |&p: &usize| p + 1);
            let value = match lookup(fixed, i) {
                Some(v) if v >= floor => v,
                Some(_) => return None,
                None => self.lo[i].max(floor),
            };
            if value < self.lo[i] || value > self.hi[i] {
                return None;
            }
            points.push(value);
        }
        points.push(self.inst.capacity());
        Some(points)
    }

    fn complete_max(&self, fixed: &[(usize, usize)]) -> Option<Vec<usize>> {
        let n = self.len();
        let mut points = vec![0; n + 1];
        points[n] = self.inst.capacity();
        for i in (0..n).rev() {
            let ceiling = points[i + 1] - 1;
            let value = match lookup(fixed, i) {
                Some(v) if v <= ceiling => v,
                Some(_) => return None,
                None => self.hi[i].min(ceiling),
            };
            if value < self.lo[i] || value > self.hi[i] {
                return None;
            }
            points[i] = value;
        }
        Some(points)
    }
}

fn lookup(fixed: &[(usize, usize)], i: usize) -> Option<usize> {
    fixed.iter().find(|&&(j, _)| j == i).map(|&(_, v)| v)
}

impl fmt::Display for DomainStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (lo, hi) in self.bounds() {
            write!(f, "[{lo}..{hi}] ")?;
        }
        write!(f, "[{}]", self.inst.capacity())
    }
}
