//! Layer relaxation with a spike-gated second layer that shows one object
//! (cluster of C2 coordinates) at a time.

use super::rk4::{rk4_integrate, Trajectory};
use crate::error::{Error, Result};

/// Rise and fall time of a gate pulse, as a fraction of its duration.
pub const RAMP_FRACTION: f64 = 0.05;

/// Lower bound enforced on `k2 · T`.
pub const MIN_K2_T: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize)]
pub struct Pulse {
    pub start: f64,
    pub duration: f64,
    pub cluster: usize,
}

/// Gate schedule for `x3`: amplitude 1 during `[start, start + T]`, rising
/// over the first `0.05 T` and falling over `0.05 T` after the pulse ends.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSchedule {
    pulses: Vec<Pulse>,
}

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

impl PulseSchedule {
    pub fn new(pulses: Vec<Pulse>) -> Result<Self> {
        for (i, p) in pulses.iter().enumerate() {
            if !(p.duration > 0.0) || !p.start.is_finite() {
                return Err(Error::Scenario(format!(
                    "pulse {i} has a non-positive duration"
                )));
            }
            if let Some(next) = pulses.get(i + 1) {
                if next.start < p.start + p.duration * (1.0 + RAMP_FRACTION) {
                    return Err(Error::Scenario(format!(
                        "pulses {i} and {} overlap or are out of order",
                        i + 1
                    )));
                }
            }
        }
        Ok(PulseSchedule { pulses })
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    /// Gate value and the cluster it attends to at time `t`.
    pub fn gate(&self, t: f64) -> (f64, Option<usize>) {
        for p in &self.pulses {
            let ramp = RAMP_FRACTION * p.duration;
            let end = p.start + p.duration;
            if t < p.start || t > end + ramp {
                continue;
            }
            let x3 = if t < p.start + ramp {
                smoothstep((t - p.start) / ramp)
            } else if t <= end {
                1.0
            } else {
                1.0 - smoothstep((t - end) / ramp)
            };
            return (x3, Some(p.cluster));
        }
        (0.0, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerGains {
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerState {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

/// `ẋ1 = -k1 (x1 - C1)`, `ẋ2 = -k2 (x2 - x3 g)` where `g` is C2 on the
/// attended coordinates and 0 elsewhere.
pub fn layer_rhs(
    state: &LayerState,
    gains: LayerGains,
    c1_target: &[f64],
    gated: &[f64],
    x3: f64,
) -> Result<LayerState> {
    if state.x1.len() != c1_target.len() || state.x2.len() != gated.len() {
        return Err(Error::InvalidArgument(format!(
            "state ({}, {}) does not match targets ({}, {})",
            state.x1.len(),
            state.x2.len(),
            c1_target.len(),
            gated.len()
        )));
    }
    Ok(LayerState {
        x1: state
            .x1
            .iter()
            .zip(c1_target)
            .map(|(x, c)| -gains.k1 * (x - c))
            .collect(),
        x2: state
            .x2
            .iter()
            .zip(gated)
            .map(|(x, g)| -gains.k2 * (x - x3 * g))
            .collect(),
    })
}

/// Complete two-layer system driven by a pulse schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSystem {
    pub gains: LayerGains,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// Object (cluster) id of each C2 coordinate.
    pub clusters: Vec<usize>,
    pub schedule: PulseSchedule,
}

impl LayerSystem {
    pub fn new(
        gains: LayerGains,
        c1: Vec<f64>,
        c2: Vec<f64>,
        clusters: Vec<usize>,
        schedule: PulseSchedule,
    ) -> Result<Self> {
        if !(gains.k1 > 0.0 && gains.k2 > 0.0) {
            return Err(Error::Scenario("gains k1 and k2 must be positive".into()));
        }
        if clusters.len() != c2.len() {
            return Err(Error::Scenario(format!(
                "{} cluster ids for {} C2 coordinates",
                clusters.len(),
                c2.len()
            )));
        }
        for p in schedule.pulses() {
            if gains.k2 * p.duration < MIN_K2_T {
                return Err(Error::Scenario(format!(
                    "k2·T = {} is below {MIN_K2_T}",
                    gains.k2 * p.duration
                )));
            }
        }
        Ok(LayerSystem {
            gains,
            c1,
            c2,
            clusters,
            schedule,
        })
    }

    /// C2 restricted to the coordinates of `cluster`.
    pub fn attended(&self, cluster: Option<usize>) -> Vec<f64> {
        self.c2
            .iter()
            .zip(&self.clusters)
            .map(|(&v, &c)| if Some(c) == cluster { v } else { 0.0 })
            .collect()
    }

    /// Integrates from `initial`; each sample is `[x1.., x2.., x3]`.
    pub fn simulate(&self, initial: &LayerState, t_end: f64, dt: f64) -> Result<Trajectory> {
        let (n1, n2) = (self.c1.len(), self.c2.len());
        if initial.x1.len() != n1 || initial.x2.len() != n2 {
            return Err(Error::InvalidArgument(
                "initial state has the wrong dimensions".into(),
            ));
        }
        let x0: Vec<f64> = initial.x1.iter().chain(&initial.x2).copied().collect();
        let mut tr = rk4_integrate(
            |t, x, dx| {
                let (x3, active) = self.schedule.gate(t);
                for i in 0..n1 {
                    dx[i] = -self.gains.k1 * (x[i] - self.c1[i]);
                }
                for i in 0..n2 {
                    let g = if Some(self.clusters[i]) == active {
                        self.c2[i]
                    } else {
                        0.0
                    };
                    dx[n1 + i] = -self.gains.k2 * (x[n1 + i] - x3 * g);
                }
            },
            &x0,
            t_end,
            dt,
        )?;
        for (t, s) in tr.times.iter().zip(tr.states.iter_mut()) {
            s.push(self.schedule.gate(*t).0);
        }
        Ok(tr)
    }
}
