/// ROC accuracy `R = 1 - ((1 - p) x + p (1 - y))` for false-positive rate
/// `x`, true-positive rate `y` and positive proportion `p`, all in `[0, 1]`.
pub fn roc_accuracy(
    false_positive_rate: f64,
    true_positive_rate: f64,
    positive_proportion: f64,
) -> f64 {
    let (x, y, p) = (false_positive_rate, true_positive_rate, positive_proportion);
    debug_assert!([x, y, p].iter().all(|v| (0.0..=1.0).contains(v)));
    1.0 - ((1.0 - p) * x + p * (1.0 - y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(roc_accuracy(0.0, 1.0, p), 1.0);
            assert_eq!(roc_accuracy(1.0, 0.0, p), 0.0);
        }
    }

    #[test]
    fn substitution() {
        assert!((roc_accuracy(0.1, 0.9, 0.5) - 0.9).abs() < 1e-15);
    }
}
