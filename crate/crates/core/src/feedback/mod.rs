//! Feedback: locating objects by clustering feature positions and
//! identifying each from its own features.

mod attend;
mod kmeans;

pub use attend::{cluster_locations, feedback_classify, ClusterLabel};
pub use kmeans::{kmeans_cluster, ClusterResult, Point, MAX_ITERATIONS, RESTARTS};
