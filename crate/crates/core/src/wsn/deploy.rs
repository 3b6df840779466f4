use rand::Rng;

use super::{build_tree, ClusterTopology, Point};
use crate::{Error, Result};

/// Aggregator at the origin followed by `n_devices` nodes on the positive x axis.
pub fn chain_positions(n_devices: usize, spacing: f64) -> Vec<Point> {
    (0..=n_devices).map(|i| Point::new(i as f64 * spacing, 0.0)).collect()
}

/// Aggregator at the origin, devices evenly spaced on a circle of `radius`.
pub fn star_positions(n_devices: usize, radius: f64) -> Vec<Point> {
    let mut pts = vec![Point::new(0.0, 0.0)];
    for k in 0..n_devices {
        let angle = std::f64::consts::TAU * k as f64 / n_devices as f64;
        pts.push(Point::new(radius * angle.cos(), radius * angle.sin()));
    }
    pts
}

/// Drops `n_devices + 1` nodes uniformly in a `side × side` square, makes the node
/// nearest the centroid the aggregator (node 0) and builds the tree. Disconnected
/// draws are redrawn up to `max_attempts` times.
pub fn random_deployment<R: Rng + ?Sized>(
    n_devices: usize,
    side: f64,
    radio_range: f64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<ClusterTopology> {
    if n_devices == 0 {
        return Err(Error::invalid("a deployment needs at least one device"));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::invalid("deployment side must be positive"));
    }
    let mut last = None;
    for _ in 0..max_attempts.max(1) {
        let mut pts: Vec<Point> = (0..=n_devices)
            .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
            .collect();
        let n = pts.len() as f64;
        let centroid = Point::new(
            pts.iter().map(|p| p.x).sum::<f64>() / n,
            pts.iter().map(|p| p.y).sum::<f64>() / n,
        );
        let hub = (0..pts.len())
            .min_by(|&a, &b| pts[a].distance(&centroid).total_cmp(&pts[b].distance(&centroid)))
            .expect("non-empty");
        pts.swap(0, hub);
        match build_tree(&pts, radio_range, 0) {
            Ok(t) => return Ok(t),
            Err(e @ Error::Disconnected { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
