#![allow(dead_code)]

use franopt::demand::{DemandConfig, Range, SplitMix64};
use franopt::model::{reference_topology, LinkParams, NetworkInstance, NodeParams, TopologyParams};
use franopt::scenarios::sample_cell;

fn uniform(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + rng.next_f64() * (hi - lo)
}

fn node(rng: &mut SplitMix64, cap: (f64, f64), vm: (f64, f64), proc: (f64, f64)) -> NodeParams {
    NodeParams {
        capacity_f: uniform(rng, cap.0, cap.1),
        cpi: uniform(rng, 1.0, 2.5),
        vm_overhead_w: uniform(rng, vm.0, vm.1),
        proc_energy: uniform(rng, proc.0, proc.1),
    }
}

/// Reference topology shape with randomised coefficients.
pub fn random_params(rng: &mut SplitMix64) -> TopologyParams {
    let link = |rng: &mut SplitMix64, tx: (f64, f64)| LinkParams {
        capacity_b: 1000.0,
        tx_energy: uniform(rng, tx.0, tx.1),
    };
    TopologyParams {
        uds_per_cell: vec![2 + rng.below(5), 2 + rng.below(5)],
        olt: node(rng, (2.0, 12.0), (0.5, 4.0), (0.5, 5.0)),
        onu: node(rng, (1.0, 8.0), (0.3, 3.0), (0.5, 5.0)),
        enodeb: node(rng, (0.5, 5.0), (0.2, 2.0), (0.5, 5.0)),
        ud: node(rng, (0.2, 2.0), (0.0, 0.6), (0.5, 6.0)),
        fibre: link(rng, (0.005, 0.1)),
        licensed: link(rng, (0.01, 0.2)),
        d2d: link(rng, (0.01, 0.2)),
    }
}

/// Request ranges that make latency and capacity bind now and then.
pub fn random_demand(rng: &mut SplitMix64, seed: u64) -> DemandConfig {
    let latency = if rng.below(4) == 0 {
        None
    } else {
        let lo = uniform(rng, 0.08, 1.0);
        Some(Range::new(lo, lo * uniform(rng, 1.0, 8.0)))
    };
    DemandConfig {
        seed,
        requests_per_ud: 3,
        arrival_a: Range::new(0.5, 1.5),
        instr: Range::new(0.05, 0.6),
        traffic_t: Range::new(1.0, 5.0),
        max_latency_l: latency,
    }
}

/// One cell with at most `max_uds` UDs and `max_requests` requests.
pub fn random_cell(seed: u64, max_uds: usize, max_requests: usize) -> NetworkInstance {
    let mut rng = SplitMix64::new(seed ^ 0x5eed_0000_0000_0000);
    let params = random_params(&mut rng);
    let demand = random_demand(&mut rng, seed);
    sample_cell(&reference_topology(&params), &demand, seed, max_uds, max_requests)
}

pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

/// Spearman's rho with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
