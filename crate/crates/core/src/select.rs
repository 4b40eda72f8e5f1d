//! Salient-patch selection by the variance of C2 over training images.

use crate::error::{Error, Result};
use crate::patches::PatchBank;

/// Default number of patches kept.
pub const DEFAULT_SELECT_K: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    /// Population variance of each column.
    pub variances: Vec<f64>,
    /// Retained column indices, highest variance first.
    pub kept: Vec<usize>,
    pub k: usize,
}

impl SelectionReport {
    /// `patch_index,variance,kept` rows, one per column.
    pub fn to_csv(&self) -> String {
        let mut kept = vec![false; self.variances.len()];
        for &i in &self.kept {
            kept[i] = true;
        }
        let mut out = String::from("patch_index,variance,kept\n");
        for (i, v) in self.variances.iter().enumerate() {
            out.push_str(&format!("{i},{v},{}\n", kept[i]));
        }
        out
    }
}

/// Population variance of each column of a row-major `rows x cols` matrix.
/// Each column is summed in sorted order, so the result does not depend on
/// the order of the rows, not even in the last bit.
pub fn column_variances(features: &[Vec<f64>]) -> Vec<f64> {
    let n = features.len() as f64;
    let cols = features.first().map_or(0, Vec::len);
    let mut column = Vec::with_capacity(features.len());
    (0..cols)
        .map(|c| {
            column.clear();
            column.extend(features.iter().map(|r| r[c]));
            column.sort_by(f64::total_cmp);
            let mean = column.iter().sum::<f64>() / n;
            column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
        })
        .collect()
}

/// Keeps the `k` columns with the largest variance; ties go to the smaller
/// column index.
pub fn select_features(features: &[Vec<f64>], k: usize) -> Result<SelectionReport> {
    if features.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "variance needs at least 2 training images, got {}",
            features.len()
        )));
    }
    let cols = features[0].len();
    if let Some(r) = features.iter().position(|r| r.len() != cols) {
        return Err(Error::InvalidArgument(format!(
            "feature row {r} has {} columns, expected {cols}",
            features[r].len()
        )));
    }
    if k == 0 || k > cols {
        return Err(Error::InvalidArgument(format!(
            "k must be in 1..={cols}, got {k}"
        )));
    }
    let variances = column_variances(features);
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| variances[b].total_cmp(&variances[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(SelectionReport {
        variances,
        kept: order,
        k,
    })
}

/// Applies a report to a bank whose currently selected patches are the
/// report's columns.
pub fn apply_selection(bank: &mut PatchBank, report: &SelectionReport) -> Result<()> {
    let selected = bank.selected();
    if selected.len() != report.variances.len() {
        return Err(Error::WidthMismatch {
            what: "selection",
            expected: selected.len(),
            found: report.variances.len(),
        });
    }
    let keep: Vec<usize> = report.kept.iter().map(|&c| selected[c]).collect();
    bank.select_only(&keep)
}
