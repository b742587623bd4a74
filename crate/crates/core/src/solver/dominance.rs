use crate::queue::Policy;

/// A feasible incumbent `(0, 1, .., J-1, k*_J, .., k*_{N-1}, S)` with
/// `k*_J > J` rules out every policy that is componentwise at least as large
/// in the suffix: any strictly better policy must lower some `k_i`, `i >= J`,
/// below `k*_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceCut {
    pub suffix_start: usize,
    pub values: Vec<usize>,
}

impl DominanceCut {
    /// True when no policy whose switching points are all at least `floor`
    /// can satisfy the cut.
    pub fn excludes(&self, floor: &[usize]) -> bool {
        floor[self.suffix_start..]
            .iter()
            .zip(&self.values)
            .all(|(&k, &v)| k >= v)
    }
}

/// The cut induced by a feasible incumbent, if it has the required prefix
/// form. The eager policy has no suffix and yields none.
pub fn record_dominance(best: &Policy) -> Option<DominanceCut> {
    let points = best.switching_points();
    let start = points.iter().enumerate().position(|(i, &k)| k > i)?;
    Some(DominanceCut { suffix_start: start, values: points[start..].to_vec() })
}
