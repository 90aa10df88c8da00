//! Per-UD requests and the diurnal share of active UDs.

use serde::{Deserialize, Serialize};

use crate::model::Request;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Range { min, max }
    }

    fn check(&self, name: &str) -> Result<(), String> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min <= 0.0 || self.min > self.max {
            return Err(format!("{name}: need 0 < min <= max, got [{}, {}]", self.min, self.max));
        }
        Ok(())
    }

    fn sample(&self, u: f64) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            self.min + u * (self.max - self.min)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandConfig {
    pub seed: u64,
    #[serde(default = "default_requests_per_ud")]
    pub requests_per_ud: usize,
    /// Requests per second.
    pub arrival_a: Range,
    /// Giga-instructions per request.
    pub instr: Range,
    /// Mbit/s offered to the network.
    pub traffic_t: Range,
    /// Seconds; `null` leaves requests unconstrained.
    pub max_latency_l: Option<Range>,
}

fn default_requests_per_ud() -> usize {
    3
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            seed: 2016,
            requests_per_ud: 3,
            arrival_a: Range::new(0.5, 1.5),
            instr: Range::new(0.02, 0.08),
            traffic_t: Range::new(1.0, 5.0),
            max_latency_l: None,
        }
    }
}

impl DemandConfig {
    pub fn check(&self) -> Result<(), String> {
        self.arrival_a.check("arrival_a")?;
        self.instr.check("instr")?;
        self.traffic_t.check("traffic_t")?;
        if let Some(l) = &self.max_latency_l {
            l.check("max_latency_l")?;
        }
        Ok(())
    }
}

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// A splitmix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    /// The stream of one (seed, UD, request) triple.
    fn for_request(seed: u64, ud: &str, k: usize) -> Self {
        SplitMix64(mix(mix(seed ^ mix(fnv1a(ud))) ^ (k as u64).wrapping_mul(GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(GAMMA);
        mix(self.0)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize
    }
}

/// `requests_per_ud` requests per UD, ordered by UD id then index.
///
/// Draws depend on the UD id rather than its position, so any permutation
/// of `uds` gives the same list.
pub fn generate_requests<S: AsRef<str>>(config: &DemandConfig, uds: &[S]) -> Vec<Request> {
    let mut ids: Vec<&str> = uds.iter().map(|s| s.as_ref()).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut out = Vec::with_capacity(ids.len() * config.requests_per_ud);
    for ud in ids {
        for k in 0..config.requests_per_ud {
            let mut s = SplitMix64::for_request(config.seed, ud, k);
            let arrival_a = config.arrival_a.sample(s.next_f64());
            let instr = config.instr.sample(s.next_f64());
            let traffic_t = config.traffic_t.sample(s.next_f64());
            let u = s.next_f64();
            out.push(Request {
                id: format!("{ud}-r{k}"),
                source: ud.to_string(),
                arrival_a,
                instr,
                traffic_t,
                max_latency_l: config.max_latency_l.map_or(f64::INFINITY, |r| r.sample(u)),
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSlot {
    pub hour: u8,
    pub active_fraction: f64,
}

/// Active share of UDs per hour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoadProfile {
    pub slots: Vec<ProfileSlot>,
}

/// Anchors of the shipped profile; hours in between are interpolated.
pub const DEFAULT_ANCHORS: [(f64, f64); 8] = [
    (0.0, 0.40),
    (4.0, 0.10),
    (8.0, 0.50),
    (12.0, 0.75),
    (16.0, 0.70),
    (20.0, 1.00),
    (21.0, 1.00),
    (23.0, 0.55),
];

impl LoadProfile {
    /// Piecewise-linear profile through `anchors`, sampled at hours 0..24.
    pub fn from_anchors(anchors: &[(f64, f64)]) -> Self {
        let slots = (0..24u8)
            .map(|hour| {
                let h = hour as f64;
                let f = match anchors.iter().position(|a| a.0 >= h) {
                    Some(0) => anchors[0].1,
                    Some(i) => {
                        let (a, b) = (anchors[i - 1], anchors[i]);
                        a.1 + (b.1 - a.1) * (h - a.0) / (b.0 - a.0)
                    }
                    None => anchors.last().map_or(0.0, |a| a.1),
                };
                ProfileSlot {
                    hour,
                    active_fraction: (f * 1e12).round() / 1e12,
                }
            })
            .collect();
        LoadProfile { slots }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.slots.is_empty() {
            return Err("profile: no slots".into());
        }
        let mut seen = [false; 24];
        for s in &self.slots {
            if s.hour > 23 {
                return Err(format!("profile: hour {} outside 0..=23", s.hour));
            }
            if std::mem::replace(&mut seen[s.hour as usize], true) {
                return Err(format!("profile: hour {} listed twice", s.hour));
            }
            if !(0.0..=1.0).contains(&s.active_fraction) {
                return Err(format!(
                    "profile: fraction {} at hour {} outside [0, 1]",
                    s.active_fraction, s.hour
                ));
            }
        }
        Ok(())
    }
}

impl Default for LoadProfile {
    fn default() -> Self {
        Self::from_anchors(&DEFAULT_ANCHORS)
    }
}

/// Number of UDs active at `fraction`: `ceil(fraction * n)`.
pub fn active_count(fraction: f64, n: usize) -> usize {
    // The small shave keeps 0.3 * 10 from rounding up to 4.
    (((fraction * n as f64) - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// The first `ceil(fraction * |uds|)` UDs in id order.
pub fn active_uds<S: AsRef<str>>(fraction: f64, uds: &[S]) -> Vec<String> {
    let mut ids: Vec<&str> = uds.iter().map(|s| s.as_ref()).collect();
    ids.sort_unstable();
    ids.truncate(active_count(fraction, ids.len()));
    ids.into_iter().map(String::from).collect()
}
