//! Attention feedback: group C2 argmax positions into objects, then classify
//! each object from its own subset of features.

use super::kmeans::{kmeans_cluster, ClusterResult, Point};
use crate::classify::NNModel;
use crate::error::{Error, Result};
use crate::patches::FeatureVector;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLabel {
    pub cluster: usize,
    pub label: String,
    pub distance: f64,
    pub neighbor: usize,
    /// Fewer members than the model's `min_cluster`.
    pub low_confidence: bool,
    pub centroid: Point,
    /// Feature indices (positions in the feature vector), ascending.
    pub members: Vec<usize>,
}

/// Clusters the image positions of the located features into `k` groups.
/// Returns the clustering and, for each point, its feature index.
pub fn cluster_locations(
    feature: &FeatureVector,
    k: usize,
    seed: u64,
) -> Result<(ClusterResult, Vec<usize>)> {
    let (points, index): (Vec<Point>, Vec<usize>) = feature
        .locations
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|l| ([l.image_x, l.image_y], i)))
        .unzip();
    let result = kmeans_cluster(&points, k, seed)?;
    Ok((result, index))
}

/// One label per cluster of feature positions, each obtained by 1-NN on that
/// cluster's feature columns only. Histograms are not used.
pub fn feedback_classify(
    model: &NNModel,
    feature: &FeatureVector,
    k: usize,
    seed: u64,
) -> Result<Vec<ClusterLabel>> {
    if feature.len() != model.feature_width() {
        return Err(Error::WidthMismatch {
            what: "feature",
            expected: model.feature_width(),
            found: feature.len(),
        });
    }
    let (clusters, index) = cluster_locations(feature, k, seed)?;
    (0..k)
        .map(|c| {
            let mut members: Vec<usize> =
                clusters.members(c).into_iter().map(|p| index[p]).collect();
            members.sort_unstable();
            let pred = model.predict_on_columns(feature, &members)?;
            Ok(ClusterLabel {
                cluster: c,
                label: pred.label,
                distance: pred.distance,
                neighbor: pred.neighbor,
                low_confidence: members.len() < model.config.min_cluster,
                centroid: clusters.centroids[c],
                members,
            })
        })
        .collect()
}
