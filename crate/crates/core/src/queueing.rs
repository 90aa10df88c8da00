//! M/M/1 delay arithmetic.
//!
//! Capacity and arrivals are both measured in work (Gcycles/s), so the delay
//! `1 / (mu - lambda)` comes out in seconds per unit of work. A latency bound
//! `L` therefore turns into a minimum spare capacity of `1 / L` on the host.

use crate::model::NetworkInstance;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueueState {
    /// Gcycles/s.
    pub capacity_mu: f64,
    /// Gcycles/s of assigned work.
    pub work_arrival_lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
#[error("unstable queue: arrival {lambda} >= capacity {mu}")]
pub struct Unstable {
    pub mu: f64,
    pub lambda: f64,
}

/// Mean sojourn time of an M/M/1 queue.
pub fn mm1_delay(q: QueueState) -> Result<f64, Unstable> {
    if q.work_arrival_lambda >= q.capacity_mu {
        return Err(Unstable {
            mu: q.capacity_mu,
            lambda: q.work_arrival_lambda,
        });
    }
    Ok(1.0 / (q.capacity_mu - q.work_arrival_lambda))
}

/// Spare capacity `mu - lambda` a host must keep to meet `max_latency_l`.
pub fn required_headroom(max_latency_l: f64) -> f64 {
    if max_latency_l.is_infinite() {
        0.0
    } else {
        1.0 / max_latency_l
    }
}

/// The largest headroom any request of `instance` asks for.
///
/// With this value as big-M, a latency row whose assignment indicator is 0 is
/// implied by the capacity row of the same node.
pub fn big_m_for(instance: &NetworkInstance) -> f64 {
    instance
        .requests
        .iter()
        .map(|r| required_headroom(r.max_latency_l))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Request;
    use proptest::prelude::*;

    fn q(mu: f64, lambda: f64) -> QueueState {
        QueueState {
            capacity_mu: mu,
            work_arrival_lambda: lambda,
        }
    }

    #[test]
    fn delay_examples() {
        assert_eq!(mm1_delay(q(2.0, 1.0)), Ok(1.0));
        assert_eq!(mm1_delay(q(5.0, 0.0)), Ok(0.2));
        assert!(mm1_delay(q(1.0, 1.5)).is_err());
        assert!(mm1_delay(q(1.0, 1.0)).is_err());
    }

    #[test]
    fn headroom_examples() {
        assert_eq!(required_headroom(0.5), 2.0);
        assert_eq!(required_headroom(f64::INFINITY), 0.0);
        assert_eq!(required_headroom(0.1), 10.0);
    }

    fn with_latencies(ls: &[f64]) -> NetworkInstance {
        NetworkInstance {
            requests: ls
                .iter()
                .enumerate()
                .map(|(i, &l)| Request {
                    id: format!("r{i}"),
                    source: "u".into(),
                    arrival_a: 1.0,
                    instr: 1.0,
                    traffic_t: 1.0,
                    max_latency_l: l,
                })
                .collect(),
            ..NetworkInstance::default()
        }
    }

    #[test]
    fn big_m_examples() {
        assert_eq!(big_m_for(&with_latencies(&[0.5, 0.25, f64::INFINITY])), 4.0);
        assert_eq!(big_m_for(&with_latencies(&[f64::INFINITY, f64::INFINITY])), 0.0);
        assert_eq!(big_m_for(&with_latencies(&[1.0])), 1.0);
    }

    proptest! {
        #[test]
        fn delay_monotone(mu in 0.1f64..100.0, a in 0.0f64..1.0, b in 0.0f64..1.0, grow in 1.001f64..2.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let d_lo = mm1_delay(q(mu, lo * mu * 0.99)).unwrap();
            let d_hi = mm1_delay(q(mu, hi * mu * 0.99)).unwrap();
            prop_assert!(d_lo < d_hi);
            let wider = mm1_delay(q(mu * grow, lo * mu * 0.99)).unwrap();
            prop_assert!(wider < d_lo);
        }

        #[test]
        fn headroom_inverts_delay(mu in 1e-3f64..1e3, frac in 0.0f64..0.999) {
            let lambda = mu * frac;
            let d = mm1_delay(q(mu, lambda)).unwrap();
            let back = required_headroom(d);
            prop_assert!(((back - (mu - lambda)) / (mu - lambda)).abs() <= 1e-12);
        }
    }
}
