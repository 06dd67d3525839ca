//! Random-subspace dimension reduction with clipping, the low-to-high cost
//! scaling factor, and private center recovery in the original space.

use crate::geom::{Assignment, Dataset, GeomError, Point};
use crate::privacy::find_center;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("bad projection dimensions: d'={d_prime} for d={d}")]
    BadDimension { d: usize, d_prime: usize },

    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Parameters of the reduction: original and reduced dimension, failure
/// probability, and the clipping scale.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionConfig {
    pub d: usize,
    pub d_prime: usize,
    pub beta: f64,
    /// `sqrt(0.01 d / (ln(n / beta) d'))`.
    pub lambda: f64,
}

impl ProjectionConfig {
    pub fn new(d: usize, d_prime: usize, n: usize, beta: f64) -> Result<Self, ReductionError> {
        if d_prime < 1 || d_prime > d {
            return Err(ReductionError::BadDimension { d, d_prime });
        }
        assert!(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
        let lambda = (0.01 * d as f64 / ((n as f64 / beta).ln() * d_prime as f64)).sqrt();
        Ok(ProjectionConfig { d, d_prime, beta, lambda })
    }
}

/// An orthonormal basis (rows) of a random `d'`-dimensional subspace.
#[derive(Debug, Clone)]
pub struct Projection {
    basis: Vec<Vec<f64>>,
}

impl Projection {
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Coordinates of `p` in the subspace basis.
    pub fn apply(&self, p: &Point) -> Point {
        let coords = self
            .basis
            .iter()
            .map(|row| row.iter().zip(p.coords()).map(|(b, c)| b * c).sum())
            .collect();
        Point::new(coords)
    }
}

/// Samples a uniformly random `d'`-dimensional subspace basis: a Gaussian
/// matrix orthonormalized by modified Gram-Schmidt (two passes).
pub fn sample_projection<R: Rng>(
    d: usize,
    d_prime: usize,
    rng: &mut R,
) -> Result<Projection, ReductionError> {
    if d_prime < 1 || d_prime > d {
        return Err(ReductionError::BadDimension { d, d_prime });
    }
    let normal = StandardNormal;
    let mut rows: Vec<Vec<f64>> = (0..d_prime)
        .map(|_| (0..d).map(|_| normal.sample(rng)).collect())
        .collect();
    for i in 0..d_prime {
        for _pass in 0..2 {
            for j in 0..i {
                let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                let rj = rows[j].clone();
                for (a, b) in rows[i].iter_mut().zip(&rj) {
                    *a -= dot * b;
                }
            }
        }
        let norm: f64 = rows[i].iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "degenerate Gaussian sample");
        for c in &mut rows[i] {
            *c /= norm;
        }
    }
    Ok(Projection { basis: rows })
}

/// Projects every point and rescales by lambda; points whose projection lands
/// outside the `1/lambda` ball are replaced by the origin. All outputs lie in
/// the unit ball.
pub fn dim_reduce(
    x: &Dataset,
    config: &ProjectionConfig,
    proj: &Projection,
) -> Result<Dataset, ReductionError> {
    let lambda = config.lambda;
    let out: Vec<Point> = x
        .points()
        .iter()
        .map(|p| {
            let projected = proj.apply(p);
            if projected.norm() <= 1.0 / lambda {
                Point::new(projected.coords().iter().map(|c| lambda * c).collect())
            } else {
                Point::origin(config.d_prime)
            }
        })
        .collect();
    Ok(Dataset::new(out)?)
}

/// Converts a clustering cost measured after `dim_reduce` back to
/// original-space units: `cost * (ln(n / beta) / 0.01)^(p/2)`.
pub fn scale_cost(cost_low: f64, n: usize, beta: f64, p: u8) -> f64 {
    let factor = (n as f64 / beta).ln() / 0.01;
    match p {
        1 => cost_low * factor.sqrt(),
        2 => cost_low * factor,
        _ => unreachable!("p restricted to {{1,2}}"),
    }
}

/// Recovers high-dimensional centers: partitions points by their nearest
/// low-dimensional center, then privately estimates each part's mean in the
/// original space. A one-point change affects at most two parts, so each part
/// runs at half the stage budget. Empty parts yield the origin.
pub fn dim_reverse<R: Rng>(
    low_centers: &[Point],
    x_low: &Dataset,
    x_high: &Dataset,
    budget: f64,
    rng: &mut R,
) -> Result<Vec<Point>, ReductionError> {
    assert_eq!(x_low.len(), x_high.len(), "datasets must be index-aligned");
    if low_centers.is_empty() {
        return Err(ReductionError::Geom(GeomError::EmptyCenters));
    }
    let assignment = Assignment::compute(x_low.points(), low_centers)?;
    let mut parts: Vec<Vec<Point>> = vec![Vec::new(); low_centers.len()];
    for (hi, &owner) in x_high.points().iter().zip(assignment.owner()) {
        parts[owner].push(hi.clone());
    }
    let eps_part = if budget.is_infinite() { f64::INFINITY } else { budget / 2.0 };
    // Independent per-part noise streams, derived deterministically.
    let seeds: Vec<u64> = (0..parts.len()).map(|_| rng.random()).collect();
    Ok(parts
        .iter()
        .zip(seeds)
        .map(|(part, seed)| {
            if part.is_empty() {
                Point::origin(x_high.dim())
            } else {
                let mut part_rng = ChaCha20Rng::seed_from_u64(seed);
                find_center(part, eps_part, &mut part_rng)
            }
        })
        .collect())
}
