//! Seeded k-means on 2D points: k-means++ starts, Lloyd iterations, then
//! single-point transfers; the best of several starts is kept.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;

/// Independent k-means++ starts per call; the lowest final inertia wins.
pub const RESTARTS: usize = 25;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Cluster id of each input point, in input order.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Point>,
    /// Sum of squared distances to the assigned centroids.
    pub inertia: f64,
    /// Inertia after every Lloyd update, first to last.
    pub inertia_trace: Vec<f64>,
}

impl ClusterResult {
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == cluster)
            .collect()
    }
}

#[inline]
fn dist2(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn nearest(p: &Point, centroids: &[Point]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (c, q) in centroids.iter().enumerate() {
        let d = dist2(p, q);
        if d < best.1 {
            best = (c, d);
        }
    }
    best.0
}

fn init_plus_plus(points: &[Point], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut centroids = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every point already coincides with a centroid
            Err(_) => rng.random_range(0..points.len()),
        };
        let c = points[next];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn update(points: &[Point], assignments: &[usize], k: usize) -> Vec<Point> {
    let mut sums = vec![[0.0; 2]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        sums[a][0] += p[0];
        sums[a][1] += p[1];
        counts[a] += 1;
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &n)| [s[0] / n as f64, s[1] / n as f64])
        .collect()
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that has more than one member.
fn repair_empty(points: &[Point], assignments: &mut [usize], centroids: &[Point], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        assignments.iter().for_each(|&a| counts[a] += 1);
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let donor = (0..points.len())
            .filter(|&i| counts[assignments[i]] > 1)
            .max_by(|&a, &b| {
                dist2(&points[a], &centroids[assignments[a]])
                    .total_cmp(&dist2(&points[b], &centroids[assignments[b]]))
                    .then(b.cmp(&a))
            })
            .expect("k ≤ number of points");
        assignments[donor] = empty;
    }
}

/// Clusters `points` into `k` groups. The result depends only on the set of
/// points and the seed, not on their order.
pub fn kmeans_cluster(points: &[Point], k: usize, seed: u64) -> Result<ClusterResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if points.len() < k {
        return Err(Error::TooFewPoints {
            k,
            points: points.len(),
        });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite point".into()));
    }
    // canonical order
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    let sorted: Vec<Point> = order.iter().map(|&i| points[i]).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, Vec<Point>, Vec<f64>)> = None;
    for _ in 0..RESTARTS {
        let run = lloyd(&sorted, k, &mut rng);
        let better = best.as_ref().is_none_or(|b| run.2.last() < b.2.last());
        if better {
            best = Some(run);
        }
    }
    let (assignments, centroids, trace) = best.expect("at least one start");

    let mut out = vec![0; points.len()];
    for (pos, &orig) in order.iter().enumerate() {
        out[orig] = assignments[pos];
    }
    Ok(ClusterResult {
        assignments: out,
        centroids,
        inertia: *trace.last().expect("at least one iteration"),
        inertia_trace: trace,
    })
}

/// One seeded start: assignments, centroids and the inertia trace.
fn lloyd(sorted: &[Point], k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<Point>, Vec<f64>) {
    let mut centroids = init_plus_plus(sorted, k, rng);
    let mut assignments: Vec<usize> = sorted.iter().map(|p| nearest(p, &centroids)).collect();
    repair_empty(sorted, &mut assignments, &centroids, k);
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        centroids = update(sorted, &assignments, k);
        trace.push(
            sorted
                .iter()
                .zip(&assignments)
                .map(|(p, &a)| dist2(p, &centroids[a]))
                .sum(),
        );
        let mut next: Vec<usize> = sorted.iter().map(|p| nearest(p, &centroids)).collect();
        repair_empty(sorted, &mut next, &centroids, k);
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }
    if !converged {
        centroids = update(sorted, &assignments, k);
        trace.push(
            sorted
                .iter()
                .zip(&assignments)
                .map(|(p, &a)| dist2(p, &centroids[a]))
                .sum(),
        );
    }

    let moved = hartigan(sorted, &mut assignments, k);
    if moved > 0 {
        centroids = update(sorted, &assignments, k);
        trace.push(inertia(sorted, &assignments, &centroids));
    }
    (assignments, centroids, trace)
}

fn inertia(points: &[Point], assignments: &[usize], centroids: &[Point]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| dist2(p, &centroids[a]))
        .sum()
}

/// Single-point transfers: moves a point from `a` to `b` whenever that
/// lowers the total inertia, i.e. `n_b/(n_b+1) d_b² < n_a/(n_a-1) d_a²`,
/// until no move helps. Any partition stable here is also a Lloyd fixpoint.
/// Returns the number of moves.
fn hartigan(points: &[Point], assignments: &mut [usize], k: usize) -> usize {
    let mut counts = vec![0usize; k];
    assignments.iter().for_each(|&a| counts[a] += 1);
    let mut centroids = update(points, assignments, k);
    let mut moves = 0;
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let a = assignments[i];
            if counts[a] < 2 {
                continue;
            }
            let na = counts[a] as f64;
            let stay = na / (na - 1.0) * dist2(p, &centroids[a]);
            let mut best = (a, stay);
            for (b, c) in centroids.iter().enumerate().filter(|&(b, _)| b != a) {
                let nb = counts[b] as f64;
                let go = nb / (nb + 1.0) * dist2(p, c);
                if go < best.1 {
                    best = (b, go);
                }
            }
            let b = best.0;
            // demand a clear gain so rounding cannot cycle
            if b == a || best.1 >= stay * (1.0 - 1e-12) {
                continue;
            }
            let nb = counts[b] as f64;
            for d in 0..2 {
                centroids[a][d] = (centroids[a][d] * na - p[d]) / (na - 1.0);
                centroids[b][d] = (centroids[b][d] * nb + p[d]) / (nb + 1.0);
            }
            counts[a] -= 1;
            counts[b] += 1;
            assignments[i] = b;
            moves += 1;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [4.0, 6.0]];
        let r = kmeans_cluster(&pts, 1, 3).unwrap();
        assert_eq!(r.assignments, vec![0, 0, 0]);
        assert!((r.centroids[0][0] - 2.0).abs() < 1e-12);
        assert!((r.centroids[0][1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            kmeans_cluster(&[[0.0, 0.0]], 2, 0),
            Err(Error::TooFewPoints { k: 2, points: 1 })
        ));
        assert!(kmeans_cluster(&[[0.0, 0.0]], 0, 0).is_err());
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let pts = [[1.0, 1.0]; 4];
        let r = kmeans_cluster(&pts, 3, 0).unwrap();
        for c in 0..3 {
            assert!(!r.members(c).is_empty());
        }
    }

    #[test]
    fn order_does_not_matter() {
        let pts: Vec<Point> = (0..30)
            .map(|i| [((i * 37) % 23) as f64, ((i * 11) % 17) as f64])
            .collect();
        let a = kmeans_cluster(&pts, 3, 5).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        let b = kmeans_cluster(&rev, 3, 5).unwrap();
        let mut back = b.assignments.clone();
        back.reverse();
        assert_eq!(a.assignments, back);
        assert_eq!(a.inertia, b.inertia);
    }
}
