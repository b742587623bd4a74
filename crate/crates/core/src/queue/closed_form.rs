use super::{waiting_time, Instance, Metrics, Policy, Summary};
use crate::numeric::{compensated_sum, log_sum_exp};

/// Ratios closer to one than this are treated as exactly one.
const UNIT_RATIO_TOL: f64 = 1e-12;
/// Below this distance from one the geometric sums are summed term by term.
/// The closed forms divide by `(1 - r)^2`, which amplifies rounding by
/// roughly `eps / (1 - r)^2`.
const NEAR_UNIT_RATIO: f64 = 1e-2;
/// Switch to log space once any power could exceed `e^300`.
const LOG_SPACE_EXPONENT: f64 = 300.0;

/// One run of states `[start, end]` served by `servers` workers; the chain
/// moves up with probability ratio `ratio = lambda / (servers * mu)`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    start: usize,
    len: usize,
    ratio: f64,
    ln_ratio: f64,
    /// `ln` of the number of front-room servers on this segment.
    ln_servers: f64,
}

/// Working buffers, reused across evaluations.
#[derive(Debug, Clone, Default)]
struct Scratch {
    segments: Vec<Segment>,
    /// `P(k_i)`, in natural log when the evaluation ran in log space.
    at_points: Vec<f64>,
    /// `P(k_i)` in linear arithmetic.
    linear: Vec<f64>,
    weights: Vec<f64>,
    /// Per segment: sum of `P(j)`, then sum of `(j - start) P(j)`.
    sums: Vec<f64>,
    moments: Vec<f64>,
}

/// Evaluates a policy from the closed-form expressions for the probability
/// at each switching point and the sums over each segment.
///
/// `P(k_0)` comes from normalising the segment sums of the unnormalised
/// weights `beta_j`; every later switching point follows from
/// `P(k_{i+1}) = r_{i+1}^{k_{i+1}-k_i} P(k_i)`. `F` and `L` are then
/// assembled from the per-segment sums without touching individual states.
pub fn evaluate_closed_form(inst: &Instance, pol: &Policy) -> Metrics {
    ClosedForm::new(inst).metrics(pol)
}

/// The closed-form aggregates alone, skipping the per-state distribution.
/// Field for field identical to [`evaluate_closed_form`].
pub fn evaluate_summary(inst: &Instance, pol: &Policy) -> Summary {
    ClosedForm::new(inst).summary(pol.points())
}

/// Closed-form evaluator with the per-instance constants computed once and
/// its working memory kept between calls. Worth keeping around when one
/// instance is evaluated many times.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    tables: Tables,
    scratch: Scratch,
}

#[derive(Debug, Clone)]
struct Tables {
    inst: Instance,
    ln_load: f64,
    ratios: Vec<f64>,
    ln_ratios: Vec<f64>,
    ln_servers: Vec<f64>,
}

impl ClosedForm {
    pub fn new(inst: &Instance) -> Self {
        let servers = 1..=inst.workers();
        let ratios: Vec<f64> =
            servers.clone().map(|i| inst.arrival_rate() / (i as f64 * inst.service_rate())).collect();
        let tables = Tables {
            inst: *inst,
            ln_load: (inst.arrival_rate() / inst.service_rate()).ln(),
            ln_ratios: ratios.iter().map(|r| r.ln()).collect(),
            ratios,
            ln_servers: servers.map(|i| (i as f64).ln()).collect(),
        };
        Self { tables, scratch: Scratch::default() }
    }

    pub fn metrics(&mut self, pol: &Policy) -> Metrics {
        let summary = self.tables.evaluate(pol.points(), &mut self.scratch);
        let capacity = self.tables.inst.capacity();
        let mut probabilities = vec![0.0; capacity + 1];
        for (seg, &p) in self.scratch.segments.iter().zip(&self.scratch.at_points) {
            if summary.log_space {
                for offset in 0..seg.len {
                    probabilities[seg.start + offset] = (p + offset as f64 * seg.ln_ratio).exp();
                }
            } else {
                for offset in 0..seg.len {
                    probabilities[seg.start + offset] = p * seg.ratio.powi(offset as i32);
                }
            }
        }
        probabilities[capacity] = summary.blocking;
        summary.into_metrics(probabilities)
    }

    /// Aggregates for switching points already known to form a valid policy.
    pub(crate) fn summary(&mut self, points: &[usize]) -> Summary {
        self.tables.evaluate(points, &mut self.scratch)
    }
}

impl Tables {
    fn evaluate(&self, points: &[usize], scratch: &mut Scratch) -> Summary {
        let inst = &self.inst;
        let n = inst.workers();
        let Scratch { segments, at_points, linear, weights, sums, moments } = scratch;
        segments.clear();
        segments.extend(points.windows(2).enumerate().map(|(i, w)| Segment {
            start: w[0],
            len: w[1] - w[0],
            ratio: self.ratios[i],
            ln_ratio: self.ln_ratios[i],
            ln_servers: self.ln_servers[i],
        }));
        sums.clear();
        moments.clear();
        linear.clear();

        let log_space = needs_log_space(self.ln_load, points, segments);
        if log_space {
            log_point_probabilities(self.ln_load, points, segments, weights, at_points);
            for (seg, &ln_p) in segments.iter().zip(at_points.iter()) {
                let (ln_scale, sum, moment) = scaled_geometric_sums(seg.ratio, seg.ln_ratio, seg.len);
                let scale = (ln_p + ln_scale).exp();
                sums.push(scale * sum);
                moments.push(scale * moment);
            }
            linear.extend(at_points.iter().map(|p| p.exp()));
        } else {
            for seg in segments.iter() {
                sums.push(geometric_sum(seg.ratio, seg.len));
                moments.push(weighted_geometric_sum(seg.ratio, seg.len));
            }
            point_probabilities(inst, points, segments, sums, weights, at_points);
            for (i, &p) in at_points[..n].iter().enumerate() {
                sums[i] *= p;
                moments[i] *= p;
            }
            linear.extend_from_slice(at_points);
        }

        // Sum of P(j) over [k_i, k_{i+1}) and the matching first moment offset.
        let front = compensated_sum((1..=n).map(|i| i as f64 * (sums[i - 1] - linear[i - 1] + linear[i])));
        let blocking = linear[n];
        let customers = compensated_sum(
            segments
                .iter()
                .enumerate()
                .map(|(i, seg)| seg.start as f64 * sums[i] + moments[i])
                .chain(std::iter::once(inst.capacity() as f64 * blocking)),
        );

        Summary {
            front,
            back: n as f64 - front,
            customers,
            wait: waiting_time(inst, customers, blocking),
            blocking,
            log_space,
        }
    }
}

fn needs_log_space(ln_load: f64, points: &[usize], segments: &[Segment]) -> bool {
    let ln_load = ln_load.abs();
    let mut ln_x = 0.0;
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            ln_x += segments[i - 1].len as f64 * segments[i - 1].ln_servers;
        }
        let load_power = (seg.start - points[0] + 1) as f64 * ln_load;
        let ratio_power = seg.len as f64 * seg.ln_ratio.abs();
        if ln_x.max(load_power).max(ratio_power) > LOG_SPACE_EXPONENT {
            return true;
        }
    }
    false
}

/// `P(k_0), ..., P(k_N)` in linear arithmetic, given each segment's
/// geometric sum.
fn point_probabilities(
    inst: &Instance,
    points: &[usize],
    segments: &[Segment],
    geometric: &[f64],
    weight_sums: &mut Vec<f64>,
    at_points: &mut Vec<f64>,
) {
    let k0 = points[0];
    let load = inst.arrival_rate() / inst.service_rate();
    // beta-sum of segment i: X_i * load^(k_{i-1} - k_0 + 1) / i * G(r_i, len_i),
    // X_i = prod_{g < i} (1/g)^(k_g - k_{g-1}).
    weight_sums.clear();
    weight_sums.push(1.0);
    let mut x = 1.0;
    for (i, seg) in segments.iter().enumerate() {
        let servers = (i + 1) as f64;
        if i > 0 {
            x *= (1.0 / (servers - 1.0)).powi(segments[i - 1].len as i32);
        }
        let head = load.powi((seg.start - k0 + 1) as i32) / servers;
        weight_sums.push(x * head * geometric[i]);
    }
    let mut p = 1.0 / compensated_sum(weight_sums.iter().copied());

    at_points.clear();
    at_points.push(p);
    for seg in segments {
        p *= seg.ratio.powi(seg.len as i32);
        at_points.push(p);
    }
}

/// `ln P(k_0), ..., ln P(k_N)`, overflow-free.
fn log_point_probabilities(
    ln_load: f64,
    points: &[usize],
    segments: &[Segment],
    ln_weight_sums: &mut Vec<f64>,
    ln_at_points: &mut Vec<f64>,
) {
    let k0 = points[0];
    ln_weight_sums.clear();
    ln_weight_sums.push(0.0);
    let mut ln_x = 0.0;
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            ln_x -= segments[i - 1].len as f64 * segments[i - 1].ln_servers;
        }
        ln_weight_sums.push(
            ln_x + (seg.start - k0 + 1) as f64 * ln_load - seg.ln_servers
                + ln_geometric_sum(seg.ratio, seg.ln_ratio, seg.len),
        );
    }
    let mut ln_p = -log_sum_exp(ln_weight_sums);

    ln_at_points.clear();
    ln_at_points.push(ln_p);
    for seg in segments {
        ln_p += seg.len as f64 * seg.ln_ratio;
        ln_at_points.push(ln_p);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RatioBranch {
    Unit,
    NearUnit,
    General,
}

fn ratio_branch(r: f64) -> RatioBranch {
    let d = (r - 1.0).abs();
    if d <= UNIT_RATIO_TOL {
        RatioBranch::Unit
    } else if d < NEAR_UNIT_RATIO {
        RatioBranch::NearUnit
    } else {
        RatioBranch::General
    }
}

/// `sum_{n=0}^{m-1} r^n`.
/// `1, r, r^2, ...`
fn powers(r: f64) -> impl Iterator<Item = f64> {
    std::iter::successors(Some(1.0), move |p| Some(p * r))
}

fn geometric_sum(r: f64, m: usize) -> f64 {
    match ratio_branch(r) {
        RatioBranch::Unit => m as f64,
        RatioBranch::NearUnit => compensated_sum(powers(r).take(m)),
        RatioBranch::General => (1.0 - r.powi(m as i32)) / (1.0 - r),
    }
}

/// `sum_{n=0}^{m-1} n r^n`, the first-moment companion of [`geometric_sum`].
fn weighted_geometric_sum(r: f64, m: usize) -> f64 {
    let mf = m as f64;
    match ratio_branch(r) {
        RatioBranch::Unit => mf * (mf - 1.0) / 2.0,
        RatioBranch::NearUnit => compensated_sum(powers(r).take(m).enumerate().map(|(n, p)| n as f64 * p)),
        RatioBranch::General => {
            if m < 2 {
                return 0.0;
            }
            let numerator = r.powi(m as i32 - 1) * -mf + r.powi(m as i32) * (mf - 1.0) + 1.0;
            r * numerator / ((1.0 - r) * (1.0 - r))
        }
    }
}

/// `(ln c, G / c, W / c)` for a scale `c` that keeps both quotients finite.
/// For `r > 1` the scale is `r^(m-1)` and the sums run over `s = 1/r`.
fn scaled_geometric_sums(r: f64, ln_r: f64, m: usize) -> (f64, f64, f64) {
    if r > 1.0 && ratio_branch(r) == RatioBranch::General {
        let s = 1.0 / r;
        let mf = m as f64;
        let s_m = s.powi(m as i32);
        let sum = (1.0 - s_m) / (1.0 - s);
        // sum_t (m-1-t) s^t
        let tail = if m < 2 { 0.0 } else { ((mf - 1.0) - mf * s + s_m) / ((1.0 - s) * (1.0 - s)) };
        ((mf - 1.0) * ln_r, sum, tail)
    } else {
        (0.0, geometric_sum(r, m), weighted_geometric_sum(r, m))
    }
}

fn ln_geometric_sum(r: f64, ln_r: f64, m: usize) -> f64 {
    let (ln_scale, sum, _) = scaled_geometric_sums(r, ln_r, m);
    ln_scale + sum.ln()
}
