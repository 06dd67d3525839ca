//! Noise primitives, the grid-histogram private coreset, the private center
//! estimator, and the privacy-budget ledger.
//!
//! Throughout, a noise scale or budget of `f64::INFINITY` means "noise
//! disabled" (test mode): mechanisms become their exact, non-private
//! counterparts and the ledger records zero spend.

use crate::geom::{Dataset, Point};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrivacyError {
    #[error("budget exceeded: requested {requested}, available {available}")]
    BudgetExceeded { requested: f64, available: f64 },

    #[error("all coreset cells were pruned")]
    EmptyCoreset,
}

/// Draws zero-mean Laplace noise with the given scale; `scale = INFINITY`
/// disables noise and returns exactly 0. Deterministic for a seeded `rng`.
pub fn sample_noise<R: Rng>(scale: f64, rng: &mut R) -> f64 {
    if scale.is_infinite() {
        return 0.0;
    }
    assert!(scale > 0.0, "noise scale must be positive");
    // Inverse CDF on u in (-1/2, 1/2).
    let u: f64 = rng.random::<f64>() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Append-only accounting of privacy spend. A single owner mutates it;
/// exclusive access (`&mut`) serializes updates.
#[derive(Debug, Clone, Serialize)]
pub struct PrivacyBudget {
    epsilon_total: f64,
    entries: Vec<(String, f64)>,
}

impl PrivacyBudget {
    pub fn new(epsilon_total: f64) -> Self {
        PrivacyBudget { epsilon_total, entries: Vec::new() }
    }

    pub fn spend(&mut self, label: &str, epsilon: f64) -> Result<(), PrivacyError> {
        let available = self.epsilon_total - self.spent();
        if epsilon > available + 1e-12 {
            return Err(PrivacyError::BudgetExceeded { requested: epsilon, available });
        }
        self.entries.push((label.to_string(), epsilon));
        Ok(())
    }

    pub fn spent(&self) -> f64 {
        self.entries.iter().map(|(_, e)| e).sum()
    }

    pub fn epsilon_total(&self) -> f64 {
        self.epsilon_total
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn spent_on(&self, label: &str) -> f64 {
        self.entries
            .iter()
            .filter(|(l, _)| l == label)
            .map(|(_, e)| e)
            .sum()
    }
}

/// `0.01 * (alpha / (10 * lambda))^(p/2)`: the grid granularity parameter.
pub fn compute_zeta(alpha: f64, p: u8, lambda_p_alpha: f64) -> f64 {
    let base = alpha / (10.0 * lambda_p_alpha);
    match p {
        1 => 0.01 * base.sqrt(),
        2 => 0.01 * base,
        _ => unreachable!("p restricted to {{1,2}}"),
    }
}

/// Coreset construction parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoresetConfig {
    pub zeta: f64,
    pub lambda_p_alpha: f64,
    pub alpha: f64,
    pub weight_floor: f64,
}

pub const MIN_CELL_SIDE: f64 = 2.0 / ((1u64 << 20) as f64);

impl CoresetConfig {
    /// Derives `zeta` from the accuracy parameter.
    pub fn derive(alpha: f64, p: u8, lambda_p_alpha: f64, weight_floor: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0,1]");
        assert!(lambda_p_alpha > 0.0);
        CoresetConfig {
            zeta: compute_zeta(alpha, p, lambda_p_alpha),
            lambda_p_alpha,
            alpha,
            weight_floor,
        }
    }

    /// Grid cell side length over `[-1, 1]^d`, floored to bound memory.
    pub fn cell_side(&self) -> f64 {
        self.zeta.max(MIN_CELL_SIDE)
    }

    /// Maximum distance a point moves when snapped to its cell center in
    /// dimension `d` (half the cell diagonal).
    pub fn snap_radius(&self, d: usize) -> f64 {
        self.cell_side() * (d as f64).sqrt() / 2.0
    }
}

/// The private coreset: weighted representative points in the unit ball.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedPointSet {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Self {
        assert_eq!(points.len(), weights.len());
        debug_assert!(weights.iter().all(|&w| w >= 0.0));
        WeightedPointSet { points, weights }
    }

    pub fn from_unit_weights(ds: &Dataset) -> Self {
        WeightedPointSet {
            points: ds.points().to_vec(),
            weights: vec![1.0; ds.len()],
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn cell_index(coord: f64, side: f64, max_idx: i64) -> i64 {
    (((coord + 1.0) / side).floor() as i64).clamp(0, max_idx)
}

/// Grid-histogram private coreset over `[-1, 1]^d`: snap points to cell
/// centers, add Laplace noise of scale `2/epsilon` to every occupied cell and
/// its neighbors, clamp negatives to zero, prune noisy counts below the
/// weight floor, and clip the surviving representatives into the unit ball.
///
/// Clamping at zero biases the surviving mass upward, so the weights are
/// finally renormalized to total `n` (the dataset size is public under the
/// swap neighboring relation; the rescale is post-processing).
pub fn private_coreset<R: Rng>(
    x_low: &Dataset,
    config: &CoresetConfig,
    epsilon: f64,
    rng: &mut R,
) -> Result<WeightedPointSet, PrivacyError> {
    let d = x_low.dim();
    let side = config.cell_side();
    let max_idx = ((2.0 / side).ceil() as i64 - 1).max(0);

    let mut counts: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for p in x_low.points() {
        let key: Vec<i64> = p.coords().iter().map(|&c| cell_index(c, side, max_idx)).collect();
        *counts.entry(key).or_insert(0.0) += 1.0;
    }

    // Occupied cells plus their Moore neighborhood all receive noise.
    let mut noised: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    let offsets = moore_offsets(d);
    for key in counts.keys() {
        for off in &offsets {
            let nb: Vec<i64> = key.iter().zip(off).map(|(k, o)| k + o).collect();
            if nb.iter().any(|&i| i < 0 || i > max_idx) {
                continue;
            }
            noised.entry(nb).or_insert(0.0);
        }
    }
    for (key, c) in counts {
        noised.insert(key, c);
    }

    let scale = if epsilon.is_infinite() { f64::INFINITY } else { 2.0 / epsilon };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (key, count) in noised {
        let w = (count + sample_noise(scale, rng)).max(0.0);
        if w < config.weight_floor || w <= 0.0 {
            continue;
        }
        let center: Vec<f64> = key.iter().map(|&i| -1.0 + (i as f64 + 0.5) * side).collect();
        points.push(Point::new(center).clip_to_unit_ball());
        weights.push(w);
    }
    if points.is_empty() {
        return Err(PrivacyError::EmptyCoreset);
    }
    let total: f64 = weights.iter().sum();
    let factor = x_low.len() as f64 / total;
    for w in &mut weights {
        *w *= factor;
    }
    Ok(WeightedPointSet::new(points, weights))
}

fn moore_offsets(d: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * 3);
        for prefix in &out {
            for o in [-1i64, 0, 1] {
                let mut v = prefix.clone();
                v.push(o);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Private mean of a point cluster in the unit ball: noisy coordinate sums
/// over `max(1, noisy count)`, clipped back into the ball. Half the budget
/// goes to the sums, half to the count.
pub fn find_center<R: Rng>(cluster: &[Point], epsilon_part: f64, rng: &mut R) -> Point {
    let d = cluster[0].dim();
    let disabled = epsilon_part.is_infinite();
    let sum_scale = if disabled {
        f64::INFINITY
    } else {
        2.0 * (d as f64).sqrt() / (epsilon_part / 2.0)
    };
    let count_scale = if disabled { f64::INFINITY } else { 2.0 / (epsilon_part / 2.0) };

    let mut sums = vec![0.0; d];
    for p in cluster {
        for (s, c) in sums.iter_mut().zip(p.coords()) {
            *s += c;
        }
    }
    for s in sums.iter_mut() {
        *s += sample_noise(sum_scale, rng);
    }
    let noisy_count = cluster.len() as f64 + sample_noise(count_scale, rng);
    let denom = noisy_count.max(1.0);
    Point::new(sums.into_iter().map(|s| s / denom).collect()).clip_to_unit_ball()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn noise_disabled_is_exactly_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_noise(f64::INFINITY, &mut rng), 0.0);
        }
    }

    #[test]
    fn noise_moments_match_laplace() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let b = 1.5;
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_noise(b, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() <= 5.0 * b / (n as f64).sqrt(), "mean {mean}");
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let want = 2.0 * b * b;
        assert!((var - want).abs() <= 0.1 * want, "var {var} vs {want}");
    }

    #[test]
    fn ledger_tracks_and_enforces_budget() {
        let mut ledger = PrivacyBudget::new(1.0);
        ledger.spend("coreset", 0.5).unwrap();
        ledger.spend("dim_reverse", 0.5).unwrap();
        assert_eq!(ledger.spent(), 1.0);
        assert_eq!(ledger.spent_on("coreset"), 0.5);
        let err = ledger.spend("extra", 0.1).unwrap_err();
        assert!(matches!(err, PrivacyError::BudgetExceeded { .. }));
    }

    #[test]
    fn zeta_values() {
        assert!((compute_zeta(1.0, 2, 1.0) - 0.001).abs() < 1e-15);
        assert!((compute_zeta(1.0, 1, 1.0) - 0.01 * 0.1f64.sqrt()).abs() < 1e-15);
        // Monotone in alpha.
        let mut last = 0.0;
        for a in [0.01, 0.1, 0.5, 1.0] {
            let z = compute_zeta(a, 2, 1.0);
            assert!(z > last);
            last = z;
        }
    }

    #[test]
    fn coreset_snaps_to_cell_centers() {
        let pts = vec![Point::new(vec![0.1, 0.1]); 3];
        let ds = Dataset::new(pts).unwrap();
        let config = CoresetConfig { zeta: 0.5, lambda_p_alpha: 1.0, alpha: 1.0, weight_floor: 0.5 };
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let y = private_coreset(&ds, &config, f64::INFINITY, &mut rng).unwrap();
        assert_eq!(y.len(), 1);
        assert_eq!(y.weights()[0], 3.0);
        assert_eq!(y.points()[0].coords(), &[0.25, 0.25]);
    }

    #[test]
    fn coreset_is_deterministic_per_seed() {
        let pts: Vec<Point> = (0..50)
            .map(|i| Point::new(vec![(i as f64 / 50.0) - 0.5, ((i * 7 % 50) as f64 / 50.0) - 0.5]))
            .collect();
        let ds = Dataset::new(pts).unwrap();
        let config = CoresetConfig::derive(1.0, 1, 1.0, 0.5);
        let a = private_coreset(&ds, &config, 2.0, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = private_coreset(&ds, &config, 2.0, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn coreset_displacement_bound_p1() {
        use crate::geom::cost_p;
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let pts: Vec<Point> = (0..80)
            .map(|_| {
                let x: f64 = rng.random_range(-0.7..0.7);
                let y: f64 = rng.random_range(-0.7..0.7);
                Point::new(vec![x, y])
            })
            .collect();
        let ds = Dataset::new(pts.clone()).unwrap();
        let config = CoresetConfig { zeta: 0.05, lambda_p_alpha: 1.0, alpha: 1.0, weight_floor: 0.0 };
        let y = private_coreset(&ds, &config, f64::INFINITY, &mut rng).unwrap();
        let w = y.total_weight();
        assert_eq!(w, 80.0);
        for _ in 0..20 {
            let centers: Vec<Point> = (0..3)
                .map(|_| Point::new(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]))
                .collect();
            let cx = cost_p(&pts, None, &centers, 1).unwrap();
            let cy = cost_p(y.points(), Some(y.weights()), &centers, 1).unwrap();
            assert!(
                (cx - cy).abs() <= w * config.snap_radius(2) + 1e-9,
                "p1 coreset error {} above bound {}",
                (cx - cy).abs(),
                w * config.snap_radius(2)
            );
        }
    }

    #[test]
    fn coreset_empty_when_everything_pruned() {
        let ds = Dataset::new(vec![Point::new(vec![0.0, 0.0])]).unwrap();
        let config =
            CoresetConfig { zeta: 0.25, lambda_p_alpha: 1.0, alpha: 1.0, weight_floor: 100.0 };
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let err = private_coreset(&ds, &config, f64::INFINITY, &mut rng).unwrap_err();
        assert_eq!(err, PrivacyError::EmptyCoreset);
    }

    #[test]
    fn find_center_exact_when_disabled() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let q = Point::new(vec![0.2, -0.3]);
        let got = find_center(&[q.clone(), q.clone(), q.clone()], f64::INFINITY, &mut rng);
        assert!(got.dist(&q) < 1e-15);

        let pair = [Point::new(vec![1.0, 0.0]), Point::new(vec![-1.0, 0.0])];
        let got = find_center(&pair, f64::INFINITY, &mut rng);
        assert_eq!(got.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn find_center_concentrates_with_large_budget() {
        let cluster = vec![Point::new(vec![0.5, 0.0]); 1000];
        let mut ok = 0;
        for trial in 0..100 {
            let mut rng = ChaCha20Rng::seed_from_u64(1000 + trial);
            let got = find_center(&cluster, 10.0, &mut rng);
            let err = got.dist(&Point::new(vec![0.5, 0.0]));
            if err < 0.05 {
                ok += 1;
            }
        }
        assert!(ok >= 99, "only {ok}/100 trials within 0.05");
    }
}
