use crate::error::{Error, Result};

/// Sampled solution: `states[i]` at `times[i]`, one sample per step
/// including the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }

    /// One component over time.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    /// `t,component_0,...` CSV.
    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 0..dim {
            out.push_str(&format!(",component_{i}"));
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&t.to_string());
            for v in s {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Classical fixed-step fourth-order Runge–Kutta. `rhs(t, x, dx)` writes the
/// derivative of `x` at time `t` into `dx`. The final step is shortened so the
/// trajectory ends exactly at `t_end`.
pub fn rk4_integrate<F>(mut rhs: F, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let steps = {
        let n = t_end / dt;
        // absorb rounding so that t_end = 1, dt = 1e-3 gives 1000 steps
        if (n - n.round()).abs() < 1e-9 * n.max(1.0) {
            n.round() as usize
        } else {
            n.ceil() as usize
        }
    };
    let dim = x0.len();
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    );
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x.clone());
    for i in 0..steps {
        let t = i as f64 * dt;
        let t_next = if i + 1 == steps {
            t_end
        } else {
            (i + 1) as f64 * dt
        };
        let h = t_next - t;
        rhs(t, &x, &mut k1);
        for j in 0..dim {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = x[j] + h * k3[j];
        }
        rhs(t + h, &tmp, &mut k4);
        for j in 0..dim {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        times.push(t_next);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states })
}
