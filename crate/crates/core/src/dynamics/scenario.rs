//! TOML scenario files for the `dynamics` command.

use serde::Deserialize;

use super::layers::{LayerGains, LayerState, LayerSystem, Pulse, PulseSchedule};
use super::oscillator::{simulate_oscillator, Current, OscillatorParams};
use super::rk4::Trajectory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub t_end: f64,
    pub dt: f64,
    pub layers: Option<LayerScenario>,
    pub oscillator: Option<OscillatorScenario>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerScenario {
    pub k1: f64,
    pub k2: f64,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub clusters: Vec<usize>,
    #[serde(default)]
    pub pulses: Vec<Pulse>,
    pub x1_0: Option<Vec<f64>>,
    pub x2_0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorScenario {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub current: Current,
    #[serde(default)]
    pub v0: f64,
    #[serde(default)]
    pub w0: f64,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        if s.layers.is_some() == s.oscillator.is_some() {
            return Err(Error::Scenario(
                "exactly one of [layers] or [oscillator] must be given".into(),
            ));
        }
        Ok(s)
    }

    /// Runs the scenario. Layer samples are `[x1.., x2.., x3]`, oscillator
    /// samples are `[v, w]`.
    pub fn run(&self) -> Result<Trajectory> {
        if let Some(l) = &self.layers {
            let system = LayerSystem::new(
                LayerGains { k1: l.k1, k2: l.k2 },
                l.c1.clone(),
                l.c2.clone(),
                l.clusters.clone(),
                PulseSchedule::new(l.pulses.clone())?,
            )?;
            let init = LayerState {
                x1: l.x1_0.clone().unwrap_or_else(|| vec![0.0; l.c1.len()]),
                x2: l.x2_0.clone().unwrap_or_else(|| vec![0.0; l.c2.len()]),
            };
            system.simulate(&init, self.t_end, self.dt)
        } else {
            let o = self.oscillator.as_ref().expect("checked in parse");
            let p = OscillatorParams::new(o.alpha, o.beta, o.c, o.current)?;
            simulate_oscillator(&p, o.v0, o.w0, self.t_end, self.dt)
        }
    }
}
