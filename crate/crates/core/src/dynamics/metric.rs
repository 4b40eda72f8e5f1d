//! Contraction check for the oscillator under the metric `diag(√(cαβ), 1)`.

use super::oscillator::OscillatorParams;
use crate::error::{Error, Result};

/// Jacobian of [`fn_rhs`](super::fn_rhs) at membrane value `v`.
pub fn jacobian(v: f64, p: &OscillatorParams) -> [[f64; 2]; 2] {
    let sech = 1.0 / (p.beta * v).cosh();
    [
        [3.0 - 3.0 * v * v - 7.0 * v.powi(6), -1.0],
        [p.c * p.alpha * p.beta * sech * sech, -p.c],
    ]
}

/// Largest eigenvalue of a symmetric 2x2 matrix.
pub fn max_eigenvalue_sym(m: [[f64; 2]; 2]) -> f64 {
    let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
    let mid = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    mid + (half * half + b * b).sqrt()
}

/// The symmetric matrix whose largest eigenvalue must stay non-positive:
/// the symmetric part of `Θ J Θ⁻¹` shifted by `-(3 + αβ/4)` in the `v` entry.
pub fn metric_matrix(v: f64, p: &OscillatorParams) -> [[f64; 2]; 2] {
    let j = jacobian(v, p);
    let s = (p.c * p.alpha * p.beta).sqrt();
    let off = 0.5 * (s * j[0][1] + j[1][0] / s);
    [
        [j[0][0] - 3.0 - 0.25 * p.alpha * p.beta, off],
        [off, j[1][1]],
    ]
}

/// Maximum over `grid` of the largest eigenvalue of [`metric_matrix`].
pub fn metric_bound_margin(p: &OscillatorParams, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty sweep grid".into()));
    }
    Ok(grid
        .iter()
        .map(|&v| max_eigenvalue_sym(metric_matrix(v, p)))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::super::oscillator::Current;
    use super::*;

    #[test]
    fn eigenvalue_of_diagonal() {
        assert_eq!(max_eigenvalue_sym([[-1.0, 0.0], [0.0, -3.0]]), -1.0);
        assert!((max_eigenvalue_sym([[0.0, 1.0], [1.0, 0.0]]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_parameters_at_origin() {
        let p = OscillatorParams::new(1.0, 1.0, 1.0, Current::Constant(0.0)).unwrap();
        let m = metric_matrix(0.0, &p);
        // [[-1/4, 0], [0, -1]]
        assert!((m[0][0] + 0.25).abs() < 1e-15);
        assert!(m[0][1].abs() < 1e-15);
        assert!((metric_bound_margin(&p, &[0.0]).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let p = OscillatorParams::spiking();
        assert!(metric_bound_margin(&p, &[]).is_err());
    }
}
