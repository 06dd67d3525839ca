//! Points, datasets, clustering cost evaluation, normalization, and the
//! exhaustive-enumeration oracle used throughout the test suites.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("center list is empty")]
    EmptyCenters,

    #[error("no input points")]
    EmptyInput,

    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFiniteCoordinate { row: usize, col: usize },

    #[error("enumeration of {subsets} subsets exceeds limit {limit}")]
    TooLarge { subsets: u128, limit: u64 },

    #[error("fixed point is not among the candidates")]
    InvalidFixed,
}

/// A point in `R^d`. Inputs to the private pipeline are unit-ball normalized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Point { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Scales the point into the unit ball if its norm exceeds 1.
    pub fn clip_to_unit_ball(mut self) -> Self {
        let n = self.norm();
        if n > 1.0 {
            for c in &mut self.coords {
                *c /= n;
            }
        }
        self
    }
}

/// An immutable multiset of `n` points of identical dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    points: Vec<Point>,
    d: usize,
}

impl Dataset {
    pub fn new(points: Vec<Point>) -> Result<Self, GeomError> {
        let first = points.first().ok_or(GeomError::EmptyInput)?;
        let d = first.dim();
        for (row, p) in points.iter().enumerate() {
            if p.dim() != d {
                return Err(GeomError::DimensionMismatch { expected: d, got: p.dim() });
            }
            for (col, c) in p.coords().iter().enumerate() {
                if !c.is_finite() {
                    return Err(GeomError::NonFiniteCoordinate { row, col });
                }
            }
        }
        Ok(Dataset { points, d })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// `k` and the cost exponent `p` (1 = k-median, 2 = k-means).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClusteringParams {
    pub k: usize,
    pub p: u8,
}

impl ClusteringParams {
    pub fn new(k: usize, p: u8) -> Self {
        assert!(k >= 1, "k must be positive");
        assert!(p == 1 || p == 2, "p must be 1 or 2");
        ClusteringParams { k, p }
    }
}

/// A set of exactly `k` centers together with the cost it was evaluated at.
#[derive(Debug, Clone, Serialize)]
pub struct CenterSet {
    pub centers: Vec<Point>,
    pub cost: f64,
}

/// Nearest-center assignment; ties break toward the lowest center index.
#[derive(Debug, Clone)]
pub struct Assignment {
    owner: Vec<usize>,
}

impl Assignment {
    pub fn compute(points: &[Point], centers: &[Point]) -> Result<Self, GeomError> {
        if centers.is_empty() {
            return Err(GeomError::EmptyCenters);
        }
        let owner = points
            .iter()
            .map(|p| nearest_center(p, centers).0)
            .collect();
        Ok(Assignment { owner })
    }

    pub fn owner(&self) -> &[usize] {
        &self.owner
    }
}

/// Index and distance of the nearest center. Ties break toward the lowest index.
pub fn nearest_center(p: &Point, centers: &[Point]) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let d = p.dist_sq(c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    (best, best_d.sqrt())
}

/// Weighted clustering cost: `sum_i w_i * min_j ||x_i - c_j||^p`.
///
/// `weights = None` means unit weights.
pub fn cost_p(
    points: &[Point],
    weights: Option<&[f64]>,
    centers: &[Point],
    p: u8,
) -> Result<f64, GeomError> {
    if centers.is_empty() {
        return Err(GeomError::EmptyCenters);
    }
    let dim = centers[0].dim();
    for c in centers {
        if c.dim() != dim {
            return Err(GeomError::DimensionMismatch { expected: dim, got: c.dim() });
        }
    }
    let mut total = 0.0;
    for (i, pt) in points.iter().enumerate() {
        if pt.dim() != dim {
            return Err(GeomError::DimensionMismatch { expected: dim, got: pt.dim() });
        }
        let w = weights.map_or(1.0, |ws| ws[i]);
        let mut best = f64::INFINITY;
        for c in centers {
            let d2 = pt.dist_sq(c);
            if d2 < best {
                best = d2;
            }
        }
        let term = match p {
            1 => best.sqrt(),
            2 => best,
            _ => unreachable!("p restricted to {{1,2}}"),
        };
        total += w * term;
    }
    Ok(total)
}

/// Translates by the bounding-box midpoint, then scales by the maximum norm so
/// every point lands in the unit ball. Returns the scale; costs in original
/// units are `cost * scale^p`.
pub fn normalize_to_unit_ball(raw: &[Vec<f64>]) -> Result<(Dataset, f64), GeomError> {
    if raw.is_empty() {
        return Err(GeomError::EmptyInput);
    }
    let d = raw[0].len();
    for (row, r) in raw.iter().enumerate() {
        if r.len() != d {
            return Err(GeomError::DimensionMismatch { expected: d, got: r.len() });
        }
        for (col, c) in r.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeomError::NonFiniteCoordinate { row, col });
            }
        }
    }
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for r in raw {
        for (j, c) in r.iter().enumerate() {
            lo[j] = lo[j].min(*c);
            hi[j] = hi[j].max(*c);
        }
    }
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let shifted: Vec<Vec<f64>> = raw
        .iter()
        .map(|r| r.iter().zip(&mid).map(|(c, m)| c - m).collect())
        .collect();
    let max_norm = shifted
        .iter()
        .map(|r| r.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let scale = if max_norm > 0.0 { max_norm } else { 1.0 };
    let points = shifted
        .into_iter()
        .map(|r| Point::new(r.into_iter().map(|c| c / scale).collect()))
        .collect();
    Ok((Dataset::new(points)?, scale))
}

pub const DEFAULT_SUBSET_LIMIT: u64 = 10_000_000;

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    acc
}

/// Exhaustive (k,p)-clustering optimum over a finite candidate set.
///
/// Enumerates every k-subset of `candidates` (restricted to those containing
/// `fixed`, when given) in lexicographic order and keeps the first minimum.
/// Intended for desk-scale inputs; see [`DEFAULT_SUBSET_LIMIT`].
pub fn brute_force_opt(
    points: &[Point],
    weights: Option<&[f64]>,
    candidates: &[Point],
    params: ClusteringParams,
    fixed: Option<&Point>,
) -> Result<CenterSet, GeomError> {
    brute_force_opt_with_limit(points, weights, candidates, params, fixed, DEFAULT_SUBSET_LIMIT)
}

pub fn brute_force_opt_with_limit(
    points: &[Point],
    weights: Option<&[f64]>,
    candidates: &[Point],
    params: ClusteringParams,
    fixed: Option<&Point>,
    limit: u64,
) -> Result<CenterSet, GeomError> {
    let m = candidates.len();
    let k = params.k;
    assert!(m >= k, "need at least k candidates");

    let fixed_idx = match fixed {
        None => None,
        Some(f) => Some(
            candidates
                .iter()
                .position(|c| c == f)
                .ok_or(GeomError::InvalidFixed)?,
        ),
    };

    let subsets = match fixed_idx {
        None => binomial(m as u64, k as u64),
        Some(_) => binomial(m as u64 - 1, k as u64 - 1),
    };
    if subsets > limit as u128 {
        return Err(GeomError::TooLarge { subsets, limit });
    }

    // Free indices to choose from; `fixed` is merged into every subset.
    let free: Vec<usize> = match fixed_idx {
        None => (0..m).collect(),
        Some(f) => (0..m).filter(|&i| i != f).collect(),
    };
    let choose = k - fixed_idx.map_or(0, |_| 1);

    let mut best_cost = f64::INFINITY;
    let mut best: Option<Vec<usize>> = None;

    let mut sel: Vec<usize> = (0..choose).collect();
    loop {
        let mut idxs: Vec<usize> = sel.iter().map(|&i| free[i]).collect();
        if let Some(f) = fixed_idx {
            idxs.push(f);
            idxs.sort_unstable();
        }
        let centers: Vec<Point> = idxs.iter().map(|&i| candidates[i].clone()).collect();
        let c = cost_p(points, weights, &centers, params.p)?;
        if c < best_cost {
            best_cost = c;
            best = Some(idxs);
        }

        // Advance to the next combination in lexicographic order.
        if choose == 0 {
            break;
        }
        let mut i = choose;
        while i > 0 && sel[i - 1] == i - 1 + free.len() - choose {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        sel[i - 1] += 1;
        for j in i..choose {
            sel[j] = sel[j - 1] + 1;
        }
    }

    let idxs = best.expect("at least one subset enumerated");
    let centers: Vec<Point> = idxs.iter().map(|&i| candidates[i].clone()).collect();
    Ok(CenterSet { centers, cost: best_cost })
}
