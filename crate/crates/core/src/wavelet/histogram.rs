use super::normalize::S1Stack;
use crate::error::{Error, Result};

/// Equal-width histogram of the approximation coefficients over their own
/// range, normalized to sum to 1. A constant approximation puts all mass in
/// bin 0.
pub fn approx_histogram(s1: &S1Stack, bins: usize) -> Result<Vec<f64>> {
    histogram(&s1.approx.data, bins)
}

pub(crate) fn histogram(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let mut counts = vec![0usize; bins];
    if values.is_empty() {
        return Ok(vec![0.0; bins]);
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    for &v in values {
        let bin = if span > 0.0 {
            (((v - lo) / span * bins as f64) as usize).min(bins - 1)
        } else {
            0
        };
        counts[bin] += 1;
    }
    let n = values.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_range_fills_first_bin() {
        let h = histogram(&[0.3; 50], 64).unwrap();
        assert_eq!(h[0], 1.0);
        assert!(h[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniform_values_fill_quarters() {
        let values: Vec<f64> = (0..400).map(|i| i as f64 / 399.0).collect();
        let h = histogram(&values, 4).unwrap();
        // counting oracle: bin = floor(4 i / 399) capped at 3
        let mut counts = [0usize; 4];
        for i in 0..400usize {
            counts[(4 * i / 399).min(3)] += 1;
        }
        for (b, &c) in counts.iter().enumerate() {
            assert!((h[b] - c as f64 / 400.0).abs() < 1e-12);
            assert!((h[b] - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn rejects_single_bin() {
        assert!(histogram(&[1.0], 1).is_err());
    }
}
