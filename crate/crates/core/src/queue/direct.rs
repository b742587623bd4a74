use super::{waiting_time, Instance, Metrics, Policy};
use crate::numeric::compensated_sum;

/// Rescale the unnormalised vector once an entry exceeds this.
const RESCALE_AT: f64 = 1e100;

/// Evaluates a policy by walking the balance equations
/// `P(j) * lambda = P(j+1) * i * mu` state by state.
pub fn evaluate_direct(inst: &Instance, pol: &Policy) -> Metrics {
    let points = pol.points();
    let k0 = points[0];
    let capacity = inst.capacity();

    let mut q = vec![0.0; capacity + 1];
    q[k0] = 1.0;
    for (servers, seg) in points.windows(2).enumerate().map(|(i, w)| (i + 1, w)) {
        let rate = inst.arrival_rate() / (servers as f64 * inst.service_rate());
        for j in seg[0]..seg[1] {
            q[j + 1] = q[j] * rate;
            if q[j + 1] > RESCALE_AT {
                let scale = q[j + 1];
                q[k0..=j + 1].iter_mut().for_each(|v| *v /= scale);
            }
        }
    }

    let total = compensated_sum(q[k0..].iter().copied());
    let probabilities: Vec<f64> = q.iter().map(|v| v / total).collect();

    let front = compensated_sum(points.windows(2).enumerate().flat_map(|(i, seg)| {
        let servers = (i + 1) as f64;
        probabilities[seg[0] + 1..=seg[1]].iter().map(move |p| servers * p)
    }));
    let customers =
        compensated_sum(probabilities.iter().enumerate().skip(k0).map(|(j, p)| j as f64 * p));
    let blocking = probabilities[capacity];

    Metrics {
        front,
        back: inst.workers() as f64 - front,
        customers,
        wait: waiting_time(inst, customers, blocking),
        blocking,
        probabilities,
        log_space: false,
    }
}
