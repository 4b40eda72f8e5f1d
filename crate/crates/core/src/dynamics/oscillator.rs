//! Two-variable spiking oscillator used to generate the attention gate.

use super::rk4::{rk4_integrate, Trajectory};
use crate::error::{Error, Result};

/// Injected current `I(t)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Current {
    Constant(f64),
    /// `before` until `at`, then `after`.
    Step {
        before: f64,
        after: f64,
        at: f64,
    },
    /// `offset + amplitude * sin(2π t / period)`.
    Sine {
        offset: f64,
        amplitude: f64,
        period: f64,
    },
}

impl Current {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Current::Constant(i) => i,
            Current::Step { before, after, at } => {
                if t < at {
                    before
                } else {
                    after
                }
            }
            Current::Sine {
                offset,
                amplitude,
                period,
            } => offset + amplitude * (std::f64::consts::TAU * t / period).sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub current: Current,
}

impl OscillatorParams {
    pub fn new(alpha: f64, beta: f64, c: f64, current: Current) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha, beta and c must be positive, got {alpha}, {beta}, {c}"
            )));
        }
        if let Current::Sine { period, .. } = current {
            if !(period > 0.0) {
                return Err(Error::InvalidArgument(
                    "sine period must be positive".into(),
                ));
            }
        }
        Ok(OscillatorParams {
            alpha,
            beta,
            c,
            current,
        })
    }

    /// A parameter set that fires repeatedly under a constant drive of 1.5.
    pub fn spiking() -> Self {
        OscillatorParams {
            alpha: 4.0,
            beta: 2.0,
            c: 0.05,
            current: Current::Constant(1.5),
        }
    }
}

/// Right-hand side `(v̇, ẇ)` at time `t`.
pub fn fn_rhs(v: f64, w: f64, p: &OscillatorParams, t: f64) -> (f64, f64) {
    let v3 = v * v * v;
    let v7 = v3 * v3 * v;
    let dv = 3.0 * v - v3 - v7 + 2.0 - w + p.current.at(t);
    let dw = p.c * (p.alpha * (1.0 + (p.beta * v).tanh()) - w);
    (dv, dw)
}

/// Integrates `(v, w)` from `(v0, w0)`.
pub fn simulate_oscillator(
    p: &OscillatorParams,
    v0: f64,
    w0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    rk4_integrate(
        |t, x, dx| {
            let (dv, dw) = fn_rhs(x[0], x[1], p, t);
            dx[0] = dv;
            dx[1] = dw;
        },
        &[v0, w0],
        t_end,
        dt,
    )
}

/// Number of times `series` goes from below `level` to at-or-above it.
pub fn count_upward_crossings(series: &[f64], level: f64) -> usize {
    series
        .windows(2)
        .filter(|w| w[0] < level && w[1] >= level)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn current_profiles() {
        assert_eq!(Current::Constant(2.0).at(7.0), 2.0);
        let s = Current::Step {
            before: 0.0,
            after: 1.0,
            at: 3.0,
        };
        assert_eq!((s.at(2.9), s.at(3.0)), (0.0, 1.0));
        let sine = Current::Sine {
            offset: 1.0,
            amplitude: 2.0,
            period: 4.0,
        };
        assert!((sine.at(1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rhs_at_origin() {
        let p = OscillatorParams::new(1.0, 1.0, 1.0, Current::Constant(0.5)).unwrap();
        let (dv, dw) = fn_rhs(0.0, 0.0, &p, 0.0);
        assert_eq!(dv, 2.5);
        assert_eq!(dw, 1.0);
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert!(OscillatorParams::new(0.0, 1.0, 1.0, Current::Constant(0.0)).is_err());
        assert!(OscillatorParams::new(1.0, 1.0, -1.0, Current::Constant(0.0)).is_err());
    }

    #[test]
    fn spiking_set_fires_repeatedly() {
        let p = OscillatorParams::spiking();
        let tr = simulate_oscillator(&p, 0.0, 0.0, 200.0, 1e-3).unwrap();
        assert!(count_upward_crossings(&tr.component(0), 1.0) >= 3);
    }

    #[test]
    fn crossings() {
        assert_eq!(
            count_upward_crossings(&[0.0, 1.0, 2.0, 0.5, 1.5, 1.0], 1.0),
            2
        );
    }
}
