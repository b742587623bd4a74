use super::{Halt, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Improved,
}

impl Solver {
    /// Depth-first branch-and-bound over `k_0, k_1, ..` in index order,
    /// smallest value first.
    ///
    /// A node fixes a prefix and is pruned when
    /// * its gmin completion meets every recorded dominance cut,
    /// * its gmax completion is infeasible, or
    /// * its gmin completion cannot beat the incumbent.
    ///
    /// With `stop_on_improvement` the search returns `Ok(())` right after the
    /// first new incumbent; otherwise it runs to exhaustion. Exhaustion is
    /// reported as `Err(Halt::Proved)`.
    pub fn search(&mut self, stop_on_improvement: bool) -> Result<(), Halt> {
        let mut prefix = Vec::with_capacity(self.domains.len());
        match self.node(&mut prefix, stop_on_improvement)? {
            Flow::Improved => Ok(()),
            Flow::Continue => Err(Halt::Proved),
        }
    }

    fn node(&mut self, prefix: &mut Vec<usize>, stop_on_improvement: bool) -> Result<Flow, Halt> {
        self.tick()?;
        if self.cfg.node_limit.is_some_and(|limit| self.stats.nodes >= limit) {
            return Err(Halt::Budget);
        }
        self.stats.nodes += 1;

        let fixed: Vec<(usize, usize)> = prefix.iter().copied().enumerate().collect();
        let Some(low) = self.domains.gmin(&fixed) else {
            return Ok(Flow::Continue);
        };
        if self.cuts.iter().any(|cut| cut.excludes(low.switching_points())) {
            return Ok(Flow::Continue);
        }
        let Some(high) = self.domains.gmax(&fixed) else {
            return Ok(Flow::Continue);
        };
        let high_metrics = self.evaluate(&high);
        if !self.feasible(&high_metrics) {
            return Ok(Flow::Continue);
        }
        let low_wait = if low == high { high_metrics.wait } else { self.evaluate(&low).wait };
        if !self.improves(low_wait) {
            return Ok(Flow::Continue);
        }

        let depth = prefix.len();
        if depth == self.domains.len() {
            // a leaf: low == high, feasible and improving
            self.offer(&low, low_wait);
            return Ok(if stop_on_improvement { Flow::Improved } else { Flow::Continue });
        }

        let from = prefix.last().map_or(0, |&p| p + 1).max(self.domains.lo(depth));
        for value in from..=self.domains.hi(depth) {
            prefix.push(value);
            let flow = self.node(prefix, stop_on_improvement)?;
            prefix.pop();
            if flow == Flow::Improved {
                return Ok(Flow::Improved);
            }
        }
        Ok(Flow::Continue)
    }
}
