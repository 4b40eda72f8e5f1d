use super::roc::roc_accuracy;

/// One-vs-rest ROC summary for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRoc {
    pub label: String,
    /// False-positive rate on samples of other classes.
    pub x: f64,
    /// True-positive rate on samples of this class.
    pub y: f64,
    /// Proportion of samples that belong to this class.
    pub p: f64,
    pub r: f64,
}

/// Confusion matrix over a fixed label order; `counts[truth][predicted]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl Evaluation {
    /// Tallies `(truth, predicted)` pairs. Labels appear in `labels` order;
    /// unseen labels are appended in first-appearance order.
    pub fn from_pairs<'a>(
        labels: &[&str],
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        let mut names: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let mut counts = vec![vec![0; names.len()]; names.len()];
        let index = |name: &str, names: &mut Vec<String>, counts: &mut Vec<Vec<usize>>| {
            names.iter().position(|n| n == name).unwrap_or_else(|| {
                names.push(name.to_string());
                counts.iter_mut().for_each(|row| row.push(0));
                counts.push(vec![0; names.len()]);
                names.len() - 1
            })
        };
        for (t, p) in pairs {
            let ti = index(t, &mut names, &mut counts);
            let pi = index(p, &mut names, &mut counts);
            counts[ti][pi] += 1;
        }
        Evaluation {
            labels: names,
            counts,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total().max(1) as f64
    }

    /// One-vs-rest ROC accuracy for class `i`.
    pub fn class_roc(&self, i: usize) -> ClassRoc {
        let total = self.total();
        let positives: usize = self.counts[i].iter().sum();
        let negatives = total - positives;
        let true_pos = self.counts[i][i];
        let false_pos: usize = (0..self.labels.len())
            .filter(|&t| t != i)
            .map(|t| self.counts[t][i])
            .sum();
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let x = ratio(false_pos, negatives);
        let y = if positives == 0 {
            1.0
        } else {
            ratio(true_pos, positives)
        };
        let p = ratio(positives, total);
        ClassRoc {
            label: self.labels[i].clone(),
            x,
            y,
            p,
            r: roc_accuracy(x, y, p),
        }
    }

    pub fn roc(&self) -> Vec<ClassRoc> {
        (0..self.labels.len()).map(|i| self.class_roc(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_confusion() {
        let pairs = [
            ("pos", "pos"),
            ("pos", "neg"),
            ("neg", "neg"),
            ("neg", "neg"),
            ("neg", "pos"),
        ];
        let e = Evaluation::from_pairs(&["pos", "neg"], pairs);
        assert_eq!(e.counts, vec![vec![1, 1], vec![1, 2]]);
        assert!((e.accuracy() - 0.6).abs() < 1e-15);
        let r = e.class_roc(0);
        assert_eq!((r.x, r.y, r.p), (1.0 / 3.0, 0.5, 0.4));
        assert_eq!(r.r, roc_accuracy(1.0 / 3.0, 0.5, 0.4));
    }

    #[test]
    fn unknown_prediction_label_is_appended() {
        let e = Evaluation::from_pairs(&["a"], [("a", "z")]);
        assert_eq!(e.labels, vec!["a", "z"]);
        assert_eq!(e.counts, vec![vec![0, 1], vec![0, 0]]);
    }
}
