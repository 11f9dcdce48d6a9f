//! One-dimensional k-means over per-image angles and the support rule that
//! picks dominant directions from its clusters.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_LLOYD_ITERS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans1d {
    /// Centroids sorted ascending.
    pub centroids: Vec<f64>,
    /// Cluster index of each input point.
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    pub inertia: f64,
}

/// Lloyd's algorithm with `restarts` random initialisations (distinct input
/// values as seeds); the lowest-inertia run is kept, earlier run on ties.
pub fn kmeans_1d(points: &[f64], k: usize, restarts: usize, seed: u64) -> Result<KMeans1d> {
    if points.is_empty() {
        return Err(Error::param("k-means needs at least one point"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::param("k-means points must be finite"));
    }
    let mut distinct = points.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let k = k.min(distinct.len());
    if k == 0 {
        return Err(Error::param("k-means needs k >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeans1d> = None;
    for _ in 0..restarts.max(1) {
        let init: Vec<f64> = sample(&mut rng, distinct.len(), k).iter().map(|i| distinct[i]).collect();
        let run = lloyd(points, init);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn nearest(centroids: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (c, v) in centroids.iter().enumerate().skip(1) {
        if (x - v).abs() < (x - centroids[best]).abs() {
            best = c;
        }
    }
    best
}

fn lloyd(points: &[f64], mut centroids: Vec<f64>) -> KMeans1d {
    let k = centroids.len();
    centroids.sort_by(f64::total_cmp);
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        for (l, &x) in labels.iter_mut().zip(points) {
            let c = nearest(&centroids, x);
            changed |= *l != c;
            *l = c;
        }
        let mut sums = vec![0.0; k];
        let mut sizes = vec![0usize; k];
        for (&l, &x) in labels.iter().zip(points) {
            sums[l] += x;
            sizes[l] += 1;
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centroids[c] = sums[c] / sizes[c] as f64;
            } else {
                // Reseed an empty cluster at the worst-fit point.
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        let da = (points[a] - centroids[labels[a]]).abs();
                        let db = (points[b] - centroids[labels[b]]).abs();
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("non-empty");
                centroids[c] = points[far];
                labels[far] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Canonical order: ascending centroids.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centroids[a].total_cmp(&centroids[b]));
    let mut rank = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let centroids: Vec<f64> = order.iter().map(|&c| centroids[c]).collect();
    let labels: Vec<usize> = labels.iter().map(|&l| rank[l]).collect();
    let mut sizes = vec![0; k];
    let mut inertia = 0.0;
    for (&l, &x) in labels.iter().zip(points) {
        sizes[l] += 1;
        inertia += (x - centroids[l]).powi(2);
    }
    KMeans1d { centroids, labels, sizes, inertia }
}

/// Dominant invariant directions of a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominantDirections {
    /// Retained directions in degrees, ascending, within `[0, 180)`.
    pub angles: Vec<f64>,
    /// Number of images supporting each retained direction.
    pub supports: Vec<usize>,
    /// Best direction of every frame, in frame order.
    pub per_image_angle: Vec<f64>,
    /// All k-means centroids and their sizes, retained or not.
    pub centroids: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
    /// Minimum support a cluster needed to be retained.
    pub min_support: usize,
    /// Set when no cluster reached `min_support` and the largest one was
    /// kept instead.
    pub fallback: bool,
}

impl DominantDirections {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub k: usize,
    pub support_fraction: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Retained centroids closer than this (degrees) are merged.
    pub merge_tolerance: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self { k: 10, support_fraction: 0.10, restarts: 10, seed: 0, merge_tolerance: 2.0 }
    }
}

/// Maps any angle into `[0, 180)`.
pub fn wrap_angle(deg: f64) -> f64 {
    let w = deg.rem_euclid(180.0);
    if w >= 180.0 {
        0.0
    } else {
        w
    }
}

/// `ceil(fraction * n)` without spurious round-up from representation error
/// (e.g. `0.1 * 30`).
pub fn min_support(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction - 1e-9).ceil().max(1.0)) as usize
}

pub fn dominant_directions(per_image_angles: &[f64]) -> Result<DominantDirections> {
    dominant_directions_with(per_image_angles, &ClusterConfig::default())
}

pub fn dominant_directions_with(per_image_angles: &[f64], cfg: &ClusterConfig) -> Result<DominantDirections> {
    if per_image_angles.is_empty() {
        return Err(Error::param("no per-image angles to cluster"));
    }
    if cfg.k == 0 || cfg.k > 10 {
        return Err(Error::param(format!("k-means k must be in 1..=10, got {}", cfg.k)));
    }
    if !(cfg.support_fraction > 0.0 && cfg.support_fraction <= 1.0) {
        return Err(Error::param("support fraction must be in (0, 1]"));
    }
    if !(cfg.merge_tolerance >= 0.0 && cfg.merge_tolerance < 90.0) {
        return Err(Error::param("merge tolerance must be in [0, 90) degrees"));
    }
    let angles: Vec<f64> = per_image_angles.iter().map(|&a| wrap_angle(a)).collect();
    let km = kmeans_1d(&angles, cfg.k, cfg.restarts, cfg.seed)?;
    let threshold = min_support(angles.len(), cfg.support_fraction);

    let mut kept: Vec<(f64, usize)> = km
        .centroids
        .iter()
        .zip(&km.sizes)
        .filter(|(_, &s)| s >= threshold)
        .map(|(&c, &s)| (c, s))
        .collect();
    let fallback = kept.is_empty();
    if fallback {
        let (c, s) = km
            .centroids
            .iter()
            .zip(&km.sizes)
            .fold((0.0, 0), |acc, (&c, &s)| if s > acc.1 { (c, s) } else { acc });
        log::warn!("no direction cluster reached {threshold} images; keeping the largest ({s} images)");
        kept.push((c, s));
    }

    // Centroids come out ascending; merge neighbours closer than the
    // tolerance into their support-weighted mean.
    let mut merged: Vec<(f64, usize)> = Vec::with_capacity(kept.len());
    for (c, s) in kept {
        match merged.last_mut() {
            Some((mc, ms)) if c - *mc < cfg.merge_tolerance => {
                *mc = (*mc * *ms as f64 + c * s as f64) / (*ms + s) as f64;
                *ms += s;
            }
            _ => merged.push((c, s)),
        }
    }

    Ok(DominantDirections {
        angles: merged.iter().map(|m| m.0).collect(),
        supports: merged.iter().map(|m| m.1).collect(),
        per_image_angle: angles,
        centroids: km.centroids,
        cluster_sizes: km.sizes,
        min_support: threshold,
        fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_angles_give_one_direction() {
        let d = dominant_directions(&[13.0; 25]).unwrap();
        assert_eq!(d.angles, vec![13.0]);
        assert_eq!(d.supports, vec![25]);
        assert!(!d.fallback);
    }

    #[test]
    fn ten_percent_rule_is_inclusive() {
        let mut a = vec![0.0; 9];
        a.push(90.0);
        let d = dominant_directions(&a).unwrap();
        assert_eq!(d.angles, vec![0.0, 90.0]);
        assert_eq!(d.supports, vec![9, 1]);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(dominant_directions(&[]), Err(Error::Parameter(_))));
    }

    #[test]
    fn min_support_is_robust_to_rounding() {
        assert_eq!(min_support(30, 0.1), 3);
        assert_eq!(min_support(10, 0.1), 1);
        assert_eq!(min_support(31, 0.1), 4);
        assert_eq!(min_support(200, 0.1), 20);
        assert_eq!(min_support(3, 0.1), 1);
    }

    #[test]
    fn wrap_angle_into_half_turn() {
        assert_eq!(wrap_angle(-4.0), 176.0);
        assert_eq!(wrap_angle(180.0), 0.0);
        assert_eq!(wrap_angle(13.0), 13.0);
        assert!(wrap_angle(-1e-18) < 180.0);
    }

    #[test]
    fn kmeans_separates_obvious_groups() {
        let pts = [1.0, 1.2, 0.8, 50.0, 50.5, 49.5, 120.0];
        let km = kmeans_1d(&pts, 3, 10, 0).unwrap();
        assert_eq!(km.sizes, vec![3, 3, 1]);
        assert!((km.centroids[0] - 1.0).abs() < 1e-12);
        assert!((km.centroids[1] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn kmeans_is_seed_deterministic() {
        let pts: Vec<f64> = (0..60).map(|i| ((i * 37) % 91) as f64).collect();
        assert_eq!(kmeans_1d(&pts, 10, 10, 5).unwrap(), kmeans_1d(&pts, 10, 10, 5).unwrap());
    }

    #[test]
    fn scattered_angles_fall_back_to_largest_cluster() {
        // 40 distinct angles, k = 2 with a 60% threshold: no cluster qualifies.
        let a: Vec<f64> = (0..40).map(|i| i as f64 * 4.0).collect();
        let cfg = ClusterConfig { k: 2, support_fraction: 0.6, ..ClusterConfig::default() };
        let d = dominant_directions_with(&a, &cfg).unwrap();
        assert!(d.fallback);
        assert_eq!(d.len(), 1);
        assert_eq!(d.supports[0], *d.cluster_sizes.iter().max().unwrap());
    }

    #[test]
    fn output_bounds_hold() {
        let a: Vec<f64> = (0..200).map(|i| ((i * 7919) % 180) as f64).collect();
        let d = dominant_directions(&a).unwrap();
        assert!((1..=10).contains(&d.len()));
        assert!(d.supports.iter().sum::<usize>() <= a.len());
        assert!(d.angles.windows(2).all(|w| w[1] - w[0] >= ClusterConfig::default().merge_tolerance));
        assert!(d.supports.iter().all(|&s| s >= d.min_support));
    }
}
