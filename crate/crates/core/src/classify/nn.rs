use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::patches::{BoundaryMode, FeatureVector, PatchBank};
use crate::wavelet::WaveletConfig;

/// Everything needed to turn an image into the features a model expects.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub wavelet: WaveletConfig,
    pub boundary: BoundaryMode,
    /// Approximation-histogram bins; `None` disables the histogram block.
    pub hist_bins: Option<usize>,
    pub hist_weight: f64,
    /// Shorter-side rescale applied to inputs before feature extraction.
    pub min_side: Option<usize>,
    /// Feedback clusters smaller than this are flagged low-confidence.
    pub min_cluster: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            wavelet: WaveletConfig::default(),
            boundary: BoundaryMode::Valid,
            hist_bins: None,
            hist_weight: 1.0,
            min_side: None,
            min_cluster: 5,
        }
    }
}

/// Per-coordinate standardization: `(x - mean) / std`, with zero spreads
/// replaced by 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Statistics over the distinct rows of `rows` (duplicates count once).
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let mut seen = HashSet::new();
        let distinct: Vec<&Vec<f64>> = rows
            .iter()
            .filter(|r| seen.insert(r.iter().map(|v| v.to_bits()).collect::<Vec<u64>>()))
            .collect();
        let cols = rows.first().map_or(0, Vec::len);
        let n = distinct.len().max(1) as f64;
        let mean: Vec<f64> = (0..cols)
            .map(|c| distinct.iter().map(|r| r[c]).sum::<f64>() / n)
            .collect();
        let std = (0..cols)
            .map(|c| {
                let var = distinct
                    .iter()
                    .map(|r| (r[c] - mean[c]).powi(2))
                    .sum::<f64>()
                    / n;
                let s = var.sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn apply(&self, row: &[f64], weight: f64) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| weight * (x - m) / s)
            .collect()
    }
}

/// 1-NN classifier over C2 features, optionally concatenated with
/// approximation histograms.
#[derive(Debug, Clone)]
pub struct NNModel {
    pub bank: PatchBank,
    /// C2 variance of every bank patch over the training set, as used for
    /// selection; empty when no selection was run.
    pub variances: Vec<f64>,
    pub train_features: Vec<Vec<f64>>,
    pub train_hists: Option<Vec<Vec<f64>>>,
    pub labels: Vec<String>,
    pub config: ModelConfig,
    feature_stats: Standardizer,
    hist_stats: Option<Standardizer>,
    /// Standardized training rows: features, then weighted histogram.
    train_z: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub distance: f64,
    pub neighbor: usize,
}

impl PartialEq for NNModel {
    fn eq(&self, other: &Self) -> bool {
        self.bank == other.bank
            && self.variances == other.variances
            && self.train_features == other.train_features
            && self.train_hists == other.train_hists
            && self.labels == other.labels
            && self.config == other.config
    }
}

impl NNModel {
    pub fn new(
        bank: PatchBank,
        variances: Vec<f64>,
        train_features: Vec<Vec<f64>>,
        train_hists: Option<Vec<Vec<f64>>>,
        labels: Vec<String>,
        config: ModelConfig,
    ) -> Result<Self> {
        bank.validate()?;
        config.wavelet.validate()?;
        let rows = train_features.len();
        if rows == 0 {
            return Err(Error::InvalidArgument("model has no training rows".into()));
        }
        if labels.len() != rows {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {rows} training rows",
                labels.len()
            )));
        }
        let width = bank.selected_count();
        if let Some(r) = train_features.iter().find(|r| r.len() != width) {
            return Err(Error::WidthMismatch {
                what: "training feature",
                expected: width,
                found: r.len(),
            });
        }
        if !variances.is_empty() && variances.len() != bank.len() {
            return Err(Error::InvalidArgument(format!(
                "{} variances for {} patches",
                variances.len(),
                bank.len()
            )));
        }
        match (&train_hists, config.hist_bins) {
            (None, None) => {}
            (Some(h), Some(bins)) => {
                if h.len() != rows {
                    return Err(Error::InvalidArgument(format!(
                        "{} histogram rows for {rows} training rows",
                        h.len()
                    )));
                }
                if let Some(r) = h.iter().find(|r| r.len() != bins) {
                    return Err(Error::WidthMismatch {
                        what: "training histogram",
                        expected: bins,
                        found: r.len(),
                    });
                }
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "histogram rows and histogram configuration disagree".into(),
                ))
            }
        }

        let feature_stats = Standardizer::fit(&train_features);
        let hist_stats = train_hists.as_deref().map(Standardizer::fit);
        let train_z = (0..rows)
            .map(|i| {
                let mut z = feature_stats.apply(&train_features[i], 1.0);
                if let (Some(s), Some(h)) = (&hist_stats, &train_hists) {
                    z.extend(s.apply(&h[i], config.hist_weight));
                }
                z
            })
            .collect();
        Ok(NNModel {
            bank,
            variances,
            train_features,
            train_hists,
            labels,
            config,
            feature_stats,
            hist_stats,
            train_z,
        })
    }

    pub fn rows(&self) -> usize {
        self.train_features.len()
    }

    pub fn feature_width(&self) -> usize {
        self.bank.selected_count()
    }

    /// Distinct labels in first-appearance order.
    pub fn classes(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.labels
            .iter()
            .map(String::as_str)
            .filter(|l| seen.insert(*l))
            .collect()
    }

    pub fn feature_stats(&self) -> &Standardizer {
        &self.feature_stats
    }

    fn query_z(&self, feature: &FeatureVector, hist: Option<&[f64]>) -> Result<Vec<f64>> {
        if feature.len() != self.feature_width() {
            return Err(Error::WidthMismatch {
                what: "feature",
                expected: self.feature_width(),
                found: feature.len(),
            });
        }
        let mut z = self.feature_stats.apply(&feature.values, 1.0);
        match (&self.hist_stats, hist) {
            (None, None) => {}
            (Some(stats), Some(h)) => {
                if h.len() != stats.mean.len() {
                    return Err(Error::WidthMismatch {
                        what: "histogram",
                        expected: stats.mean.len(),
                        found: h.len(),
                    });
                }
                z.extend(stats.apply(h, self.config.hist_weight));
            }
            (Some(stats), None) => {
                return Err(Error::WidthMismatch {
                    what: "histogram",
                    expected: stats.mean.len(),
                    found: 0,
                })
            }
            (None, Some(h)) => {
                return Err(Error::WidthMismatch {
                    what: "histogram",
                    expected: 0,
                    found: h.len(),
                })
            }
        }
        Ok(z)
    }

    /// Nearest training row by Euclidean distance over `columns` of the
    /// standardized vectors; ties go to the smaller row index.
    fn nearest(
        &self,
        query_z: &[f64],
        columns: impl Iterator<Item = usize> + Clone,
    ) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, row) in self.train_z.iter().enumerate() {
            let d: f64 = columns.clone().map(|c| (query_z[c] - row[c]).powi(2)).sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        (best.0, best.1.sqrt())
    }

    pub fn predict(&self, feature: &FeatureVector, hist: Option<&[f64]>) -> Result<Prediction> {
        let z = self.query_z(feature, hist)?;
        let (neighbor, distance) = self.nearest(&z, 0..z.len());
        Ok(Prediction {
            label: self.labels[neighbor].clone(),
            distance,
            neighbor,
        })
    }

    /// 1-NN restricted to a subset of C2 columns, using the same
    /// standardization. The histogram block is not used.
    pub fn predict_on_columns(
        &self,
        feature: &FeatureVector,
        columns: &[usize],
    ) -> Result<Prediction> {
        if feature.len() != self.feature_width() {
            return Err(Error::WidthMismatch {
                what: "feature",
                expected: self.feature_width(),
                found: feature.len(),
            });
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= feature.len()) {
            return Err(Error::InvalidArgument(format!(
                "feature column {c} out of range"
            )));
        }
        let z = self.feature_stats.apply(&feature.values, 1.0);
        let (neighbor, distance) = self.nearest(&z, columns.iter().copied());
        Ok(Prediction {
            label: self.labels[neighbor].clone(),
            distance,
            neighbor,
        })
    }
}

pub fn nn_predict(
    model: &NNModel,
    feature: &FeatureVector,
    hist: Option<&[f64]>,
) -> Result<Prediction> {
    model.predict(feature, hist)
}
