//! Fixed-center k-means: a discrete candidate center set built from the input
//! points plus multiscale lattices, then a single-swap local search that never
//! swaps out the pinned center. The plain variant drops the pin.

use crate::geom::{CenterSet, Point};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmeansError {
    #[error("no input points")]
    EmptyInput,

    #[error("candidate construction needs {needed} points, cap is {cap}")]
    TooManyCandidates { needed: usize, cap: usize },
}

pub const DEFAULT_CANDIDATE_CAP: usize = 100_000;

/// Discrete candidate centers for the local search.
///
/// Contains every input point, the pinned center when given, and lattice
/// points at geometrically shrinking scales around the inputs. At desk scale
/// the set intersects the tolerance ball of every nonempty input subset
/// (ball center = subset centroid, radius = `gamma/3 *` RMS radius).
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub candidates: Vec<Point>,
    /// Index of the pinned center within `candidates`, when one was given.
    pub sigma: Option<usize>,
    pub gamma: f64,
}

/// Root-mean-square radius of a point set about its centroid.
pub fn rms_radius(points: &[Point]) -> f64 {
    let c = centroid(points);
    let sq: f64 = points.iter().map(|p| p.dist_sq(&c)).sum();
    (sq / points.len() as f64).sqrt()
}

pub fn centroid(points: &[Point]) -> Point {
    let d = points[0].dim();
    let mut acc = vec![0.0; d];
    for p in points {
        for (a, c) in acc.iter_mut().zip(p.coords()) {
            *a += c;
        }
    }
    for a in &mut acc {
        *a /= points.len() as f64;
    }
    Point::new(acc)
}

fn point_key(p: &Point) -> Vec<u64> {
    p.coords().iter().map(|c| c.to_bits()).collect()
}

/// Builds the candidate set. Scales run from the diameter down to
/// `gamma/3` times the smallest nonzero inter-point gap; each scale carries a
/// global lattice restricted to boxes around the input points. Errors when the
/// construction would exceed `cap` candidates.
pub fn candidate_centers(
    points: &[Point],
    sigma: Option<&Point>,
    gamma: f64,
    cap: usize,
) -> Result<CandidateSet, KmeansError> {
    assert!(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
    if points.is_empty() {
        return Err(KmeansError::EmptyInput);
    }
    let d = points[0].dim();

    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut candidates: Vec<Point> = Vec::new();
    let mut push = |p: Point, candidates: &mut Vec<Point>| -> bool {
        if seen.insert(point_key(&p)) {
            candidates.push(p);
            true
        } else {
            false
        }
    };

    for p in points {
        push(p.clone(), &mut candidates);
    }
    let sigma_idx = sigma.map(|s| {
        push(s.clone(), &mut candidates);
        candidates
            .iter()
            .position(|c| c == s)
            .expect("sigma just inserted")
    });

    let mut diam = 0.0f64;
    let mut gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dist = points[i].dist(&points[j]);
            diam = diam.max(dist);
            if dist > 0.0 {
                gap = gap.min(dist);
            }
        }
    }

    if diam > 0.0 && gap.is_finite() {
        let floor = gamma / 3.0 * gap;
        let mut scales = vec![diam];
        while *scales.last().unwrap() > floor {
            let next = scales.last().unwrap() / 2.0;
            scales.push(next);
        }
        for s in scales {
            let delta = gamma * s / (3.0 * (d as f64).sqrt());
            let budget = cap.saturating_sub(candidates.len());
            let cells = lattice_cells(points, s, delta, budget).ok_or(
                KmeansError::TooManyCandidates { needed: cap + 1, cap },
            )?;
            for z in cells {
                let coords: Vec<f64> = z.iter().map(|&zi| zi as f64 * delta).collect();
                push(Point::new(coords), &mut candidates);
            }
        }
    }

    if candidates.len() > cap {
        return Err(KmeansError::TooManyCandidates { needed: candidates.len(), cap });
    }
    Ok(CandidateSet { candidates, sigma: sigma_idx, gamma })
}

/// Lattice points (as integer multiples of `delta`) within `s + delta` of any
/// input point in the max norm. `None` when more than `budget` cells arise.
fn lattice_cells(
    points: &[Point],
    s: f64,
    delta: f64,
    budget: usize,
) -> Option<BTreeSet<Vec<i64>>> {
    let d = points[0].dim();
    let reach = s + delta;
    let mut cells: BTreeSet<Vec<i64>> = BTreeSet::new();
    for p in points {
        let ranges: Vec<(i64, i64)> = p
            .coords()
            .iter()
            .map(|&c| {
                (((c - reach) / delta).ceil() as i64, ((c + reach) / delta).floor() as i64)
            })
            .collect();
        let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            cells.insert(z.clone());
            if cells.len() > budget {
                return None;
            }
            let mut advanced = false;
            for axis in (0..d).rev() {
                if z[axis] < ranges[axis].1 {
                    z[axis] += 1;
                    for (axis2, zr) in z.iter_mut().enumerate().skip(axis + 1) {
                        *zr = ranges[axis2].0;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Some(cells)
}

/// Like [`candidate_centers`], but drops the finest scales instead of failing
/// when the cap would be exceeded. Used at pipeline scale where the desk-scale
/// tolerance contract is not the binding property.
pub fn candidate_centers_capped(
    points: &[Point],
    sigma: Option<&Point>,
    gamma: f64,
    cap: usize,
) -> Result<CandidateSet, KmeansError> {
    match candidate_centers(points, sigma, gamma, cap) {
        Ok(c) => Ok(c),
        Err(KmeansError::TooManyCandidates { .. }) => {
            let mut g = gamma;
            loop {
                // Coarsen: double gamma (capped at 1), then start pruning scales
                // by raising the synthetic floor through an inflated gap.
                if g < 1.0 {
                    g = (2.0 * g).min(1.0);
                    if let Ok(c) = candidate_centers(points, sigma, g, cap) {
                        return Ok(c);
                    }
                    continue;
                }
                return candidate_centers_coarse(points, sigma, g, cap);
            }
        }
        Err(e) => Err(e),
    }
}

/// Coarse fallback: inputs, the pin, and only the scales that fit the budget
/// (coarsest first).
fn candidate_centers_coarse(
    points: &[Point],
    sigma: Option<&Point>,
    gamma: f64,
    cap: usize,
) -> Result<CandidateSet, KmeansError> {
    let d = points[0].dim();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut candidates: Vec<Point> = Vec::new();
    let mut push = |p: Point, candidates: &mut Vec<Point>| {
        if seen.insert(point_key(&p)) {
            candidates.push(p);
        }
    };
    for p in points {
        push(p.clone(), &mut candidates);
    }
    let sigma_idx = sigma.map(|s| {
        push(s.clone(), &mut candidates);
        candidates.iter().position(|c| c == s).unwrap()
    });
    if candidates.len() > cap {
        return Err(KmeansError::TooManyCandidates { needed: candidates.len(), cap });
    }

    let mut diam = 0.0f64;
    let mut gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dist = points[i].dist(&points[j]);
            diam = diam.max(dist);
            if dist > 0.0 {
                gap = gap.min(dist);
            }
        }
    }
    if diam > 0.0 && gap.is_finite() {
        let floor = gamma / 3.0 * gap;
        let mut s = diam;
        loop {
            let delta = gamma * s / (3.0 * (d as f64).sqrt());
            let budget = cap.saturating_sub(candidates.len());
            let Some(cells) = lattice_cells(points, s, delta, budget) else {
                break; // finest scales dropped
            };
            for z in cells {
                push(Point::new(z.iter().map(|&zi| zi as f64 * delta).collect()), &mut candidates);
            }
            if s <= floor {
                break;
            }
            s /= 2.0;
        }
    }
    Ok(CandidateSet { candidates, sigma: sigma_idx, gamma })
}

/// The current center set of the local search: candidate indices plus the
/// distortion (weighted sum of squared distances).
#[derive(Debug, Clone)]
pub struct SwapState {
    pub centers: Vec<usize>,
    pub distortion: f64,
}

fn distortion(points: &[Point], weights: &[f64], centers: &[&Point]) -> f64 {
    let mut total = 0.0;
    for (q, w) in points.iter().zip(weights) {
        let mut best = f64::INFINITY;
        for c in centers {
            let d = q.dist_sq(c);
            if d < best {
                best = d;
            }
        }
        total += w * best;
    }
    total
}

const IMPROVEMENT_FACTOR: f64 = 1.0 - 1e-9;

/// One step of the local search: scans all (swap-out, swap-in) pairs in
/// candidate-index order and returns the first swap that strictly reduces the
/// distortion, or `None` when the state is 1-stable. The pinned center is
/// never swapped out.
pub fn improving_swap(
    state: &SwapState,
    cand: &CandidateSet,
    points: &[Point],
    weights: &[f64],
) -> Option<SwapState> {
    let in_state: Vec<bool> = {
        let mut m = vec![false; cand.candidates.len()];
        for &c in &state.centers {
            m[c] = true;
        }
        m
    };

    // Per-point nearest and second-nearest center distances for O(n) swap evaluation.
    let n = points.len();
    let kk = state.centers.len();
    let mut owner = vec![0usize; n];
    let mut d1 = vec![f64::INFINITY; n];
    let mut d2 = vec![f64::INFINITY; n];
    for (qi, q) in points.iter().enumerate() {
        for (ci, &c) in state.centers.iter().enumerate() {
            let d = q.dist_sq(&cand.candidates[c]);
            if d < d1[qi] {
                d2[qi] = d1[qi];
                d1[qi] = d;
                owner[qi] = ci;
            } else if d < d2[qi] {
                d2[qi] = d;
            }
        }
    }

    let threshold = state.distortion * IMPROVEMENT_FACTOR;
    for new_c in 0..cand.candidates.len() {
        if in_state[new_c] {
            continue;
        }
        let dn: Vec<f64> = points
            .iter()
            .map(|q| q.dist_sq(&cand.candidates[new_c]))
            .collect();
        for out_pos in 0..kk {
            if Some(state.centers[out_pos]) == cand.sigma {
                continue;
            }
            let mut total = 0.0;
            for qi in 0..n {
                let keep = if owner[qi] == out_pos { d2[qi] } else { d1[qi] };
                total += weights[qi] * keep.min(dn[qi]);
            }
            if total < threshold {
                let mut centers = state.centers.clone();
                centers[out_pos] = new_c;
                return Some(SwapState { centers, distortion: total });
            }
        }
    }
    None
}

const SWAP_ITERATION_CAP: usize = 100_000;

fn local_search(
    points: &[Point],
    weights: &[f64],
    k: usize,
    cand: &CandidateSet,
) -> SwapState {
    let m = cand.candidates.len();
    let k_eff = k.min(m);

    // Initialize with the pin (when present) plus greedy farthest candidates.
    let mut centers: Vec<usize> = Vec::with_capacity(k_eff);
    match cand.sigma {
        Some(s) => centers.push(s),
        None => {
            // Start from the candidate farthest from the weighted input centroid.
            let c = weighted_centroid(points, weights);
            let start = (0..m)
                .max_by(|&a, &b| {
                    cand.candidates[a]
                        .dist_sq(&c)
                        .partial_cmp(&cand.candidates[b].dist_sq(&c))
                        .unwrap()
                        .then(b.cmp(&a))
                })
                .unwrap();
            centers.push(start);
        }
    }
    while centers.len() < k_eff {
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for c in 0..m {
            if centers.contains(&c) {
                continue;
            }
            let d = centers
                .iter()
                .map(|&s| cand.candidates[c].dist_sq(&cand.candidates[s]))
                .fold(f64::INFINITY, f64::min);
            if d > best_d {
                best_d = d;
                best = c;
            }
        }
        centers.push(best);
    }

    let refs: Vec<&Point> = centers.iter().map(|&c| &cand.candidates[c]).collect();
    let mut state = SwapState {
        distortion: distortion(points, weights, &refs),
        centers,
    };
    for _ in 0..SWAP_ITERATION_CAP {
        match improving_swap(&state, cand, points, weights) {
            Some(next) => {
                debug_assert!(next.distortion < state.distortion);
                state = next;
            }
            None => break,
        }
    }
    state
}

fn weighted_centroid(points: &[Point], weights: &[f64]) -> Point {
    let d = points[0].dim();
    let mut acc = vec![0.0; d];
    let mut total = 0.0;
    for (p, &w) in points.iter().zip(weights) {
        for (a, c) in acc.iter_mut().zip(p.coords()) {
            *a += w * c;
        }
        total += w;
    }
    if total > 0.0 {
        for a in &mut acc {
            *a /= total;
        }
    }
    Point::new(acc)
}

/// Fixed-center k-means on weighted points: builds the candidate set, runs the
/// single-swap search to 1-stability, and returns k centers containing `sigma`.
pub fn kmeans_fixed_center(
    points: &[Point],
    weights: &[f64],
    k: usize,
    sigma: &Point,
    gamma: f64,
) -> Result<CenterSet, KmeansError> {
    let cand = candidate_centers(points, Some(sigma), gamma, DEFAULT_CANDIDATE_CAP)?;
    Ok(finish(points, weights, k, &cand))
}

/// Plain k-means (no pinned center) used as the non-private approximation.
pub fn kmeans(
    points: &[Point],
    weights: &[f64],
    k: usize,
    gamma: f64,
) -> Result<CenterSet, KmeansError> {
    let cand = candidate_centers(points, None, gamma, DEFAULT_CANDIDATE_CAP)?;
    Ok(finish(points, weights, k, &cand))
}

/// Variant on a pre-built candidate set (the pipeline uses the capped builder).
pub fn kmeans_on_candidates(
    points: &[Point],
    weights: &[f64],
    k: usize,
    cand: &CandidateSet,
) -> CenterSet {
    finish(points, weights, k, cand)
}

fn finish(points: &[Point], weights: &[f64], k: usize, cand: &CandidateSet) -> CenterSet {
    let state = local_search(points, weights, k, cand);
    let mut centers: Vec<Point> = state
        .centers
        .iter()
        .map(|&c| cand.candidates[c].clone())
        .collect();
    while centers.len() < k {
        let dup = cand
            .sigma
            .map(|s| cand.candidates[s].clone())
            .unwrap_or_else(|| centers[0].clone());
        centers.push(dup);
    }
    CenterSet { centers, cost: state.distortion }
}

/// The capture/partition structure relating a 1-stable center set `S` to a
/// reference optimum `O`. Built only for analysis checks in the test suites.
#[derive(Debug, Clone)]
pub struct SwapPairMapping {
    /// `capture[o]` is the index in `S` of the closest S-center to `O[o]`.
    pub capture: Vec<usize>,
    /// Swap pairs `(s_index, o_index)`.
    pub pairs: Vec<(usize, usize)>,
    /// Matched partitions `(S_i, O_i)` with equal sizes.
    pub partitions: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Builds the swap-pair mapping between `s_centers` and `o_centers`.
/// `sigma` gives the index of the pinned center in each list; its capture pair
/// is fixed and it is never emitted as a swapped-out element.
pub fn build_swap_pairs(
    s_centers: &[Point],
    o_centers: &[Point],
    sigma: Option<(usize, usize)>,
) -> SwapPairMapping {
    let k = s_centers.len();
    assert_eq!(k, o_centers.len());

    let mut capture = vec![0usize; k];
    for (oi, o) in o_centers.iter().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (si, s) in s_centers.iter().enumerate() {
            let d = o.dist_sq(s);
            if d < best_d {
                best_d = d;
                best = si;
            }
        }
        capture[oi] = best;
    }
    if let Some((s_sigma, o_sigma)) = sigma {
        capture[o_sigma] = s_sigma;
    }

    let mut captured_by: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (oi, &si) in capture.iter().enumerate() {
        captured_by[si].push(oi);
    }
    let mut lonely: Vec<usize> = (0..k).filter(|&si| captured_by[si].is_empty()).collect();
    lonely.reverse(); // pop() consumes in ascending order

    let mut pairs = Vec::new();
    let mut partitions = Vec::new();
    for si in 0..k {
        let os = &captured_by[si];
        if os.is_empty() {
            continue;
        }
        let m = os.len();
        let mut s_part = vec![si];
        if m == 1 {
            pairs.push((si, os[0]));
        } else {
            let fillers: Vec<usize> = (0..m - 1)
                .map(|_| lonely.pop().expect("lonely centers exhausted"))
                .collect();
            for (f, &o) in fillers.iter().zip(os.iter()) {
                pairs.push((*f, o));
            }
            pairs.push((fillers[0], os[m - 1]));
            s_part.extend_from_slice(&fillers);
        }
        partitions.push((s_part, os.clone()));
    }
    SwapPairMapping { capture, pairs, partitions }
}
