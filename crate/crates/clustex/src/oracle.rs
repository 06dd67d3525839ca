//! Exact reference optimizers for desk-scale instances. These enumerate
//! cluster partitions rather than center subsets, which keeps large candidate
//! sets tractable; they exist to back the approximation-ratio and analysis
//! tests, not for production use.

use crate::geom::Point;

const MAX_ORACLE_POINTS: usize = 16;

/// Exact optimal (k,p)-clustering cost when centers must come from
/// `candidates`; `sigma` (an index into `candidates`) is forced into the
/// center set when given. Equivalent to enumerating every k-subset of the
/// candidates, but runs in `O(3^n k + 2^n |C|)`.
pub fn exact_candidate_opt(
    points: &[Point],
    weights: &[f64],
    candidates: &[Point],
    k: usize,
    p: u8,
    sigma: Option<usize>,
) -> f64 {
    let n = points.len();
    assert!(n <= MAX_ORACLE_POINTS, "oracle limited to {MAX_ORACLE_POINTS} points");
    assert!(k >= 1);
    let size = 1usize << n;
    let full = size - 1;

    // Cheapest single-candidate service cost per point subset.
    let mut best = vec![f64::INFINITY; size];
    best[0] = 0.0;
    let mut cost = vec![0.0f64; size];
    for c in candidates {
        let dvec: Vec<f64> = points
            .iter()
            .zip(weights)
            .map(|(q, w)| {
                let d2 = q.dist_sq(c);
                w * if p == 1 { d2.sqrt() } else { d2 }
            })
            .collect();
        cost[0] = 0.0;
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            cost[mask] = cost[mask & (mask - 1)] + dvec[low];
        }
        for mask in 1..size {
            if cost[mask] < best[mask] {
                best[mask] = cost[mask];
            }
        }
    }

    let parts_limit = if sigma.is_some() { k.saturating_sub(1) } else { k };

    // f[t][mask]: best cost partitioning `mask` into exactly t clusters.
    let mut f = vec![vec![f64::INFINITY; size]; parts_limit + 1];
    f[0][0] = 0.0;
    for t in 1..=parts_limit {
        for mask in 1..size {
            let low = 1usize << mask.trailing_zeros();
            // Submasks of `mask` containing its lowest bit.
            let rest = mask & !low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                let prev = f[t - 1][mask & !part];
                if prev.is_finite() {
                    let cand = prev + best[part];
                    if cand < f[t][mask] {
                        f[t][mask] = cand;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
    }
    // Best over at most `t` clusters.
    let mut g = vec![f64::INFINITY; size];
    g[0] = 0.0;
    for t in 0..=parts_limit {
        for mask in 0..size {
            if f[t][mask] < g[mask] {
                g[mask] = f[t][mask];
            }
        }
    }

    match sigma {
        None => g[full],
        Some(si) => {
            let sc = &candidates[si];
            let sigma_vec: Vec<f64> = points
                .iter()
                .zip(weights)
                .map(|(q, w)| {
                    let d2 = q.dist_sq(sc);
                    w * if p == 1 { d2.sqrt() } else { d2 }
                })
                .collect();
            let mut sigma_cost = vec![0.0f64; size];
            for mask in 1..size {
                let low = mask.trailing_zeros() as usize;
                sigma_cost[mask] = sigma_cost[mask & (mask - 1)] + sigma_vec[low];
            }
            // The pinned center serves some (possibly empty) subset.
            let mut ans = f64::INFINITY;
            for s0 in 0..size {
                // Iterate over subsets of full; complement must be partitionable.
                let rest = full & !s0;
                if g[rest].is_finite() {
                    let v = sigma_cost[s0] + g[rest];
                    if v < ans {
                        ans = v;
                    }
                }
            }
            ans
        }
    }
}

/// Exact continuous fixed-center k-means optimum: one center pinned at
/// `sigma`, the remaining clusters centered at their centroids. Returns the
/// cost and the centers (`sigma` first).
pub fn exact_fixed_center_kmeans(points: &[Point], k: usize, sigma: &Point) -> (f64, Vec<Point>) {
    let n = points.len();
    assert!(n <= MAX_ORACLE_POINTS);
    assert!(k >= 1);
    let d = points[0].dim();
    let size = 1usize << n;
    let full = size - 1;

    // Within-cluster sum of squares about the centroid, per subset.
    let mut sum = vec![vec![0.0f64; d]; size];
    let mut sumsq = vec![0.0f64; size];
    let mut count = vec![0u32; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let prev = mask & (mask - 1);
        for j in 0..d {
            sum[mask][j] = sum[prev][j] + points[low].coords()[j];
        }
        sumsq[mask] = sumsq[prev] + points[low].coords().iter().map(|c| c * c).sum::<f64>();
        count[mask] = count[prev] + 1;
    }
    let sse = |mask: usize| -> f64 {
        if mask == 0 {
            return 0.0;
        }
        let m = count[mask] as f64;
        let norm2: f64 = sum[mask].iter().map(|s| s * s).sum();
        (sumsq[mask] - norm2 / m).max(0.0)
    };

    let mut sigma_cost = vec![0.0f64; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        sigma_cost[mask] = sigma_cost[mask & (mask - 1)] + points[low].dist_sq(sigma);
    }

    let parts_limit = k - 1;
    let mut f = vec![vec![f64::INFINITY; size]; parts_limit + 1];
    let mut choice = vec![vec![0usize; size]; parts_limit + 1];
    f[0][0] = 0.0;
    for t in 1..=parts_limit {
        for mask in 1..size {
            let low = 1usize << mask.trailing_zeros();
            let rest = mask & !low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                let prev = f[t - 1][mask & !part];
                if prev.is_finite() {
                    let cand = prev + sse(part);
                    if cand < f[t][mask] {
                        f[t][mask] = cand;
                        choice[t][mask] = part;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
    }

    let mut best = f64::INFINITY;
    let mut best_s0 = 0usize;
    let mut best_t = 0usize;
    for s0 in 0..size {
        let rest = full & !s0;
        for t in 0..=parts_limit {
            if rest == 0 && t > 0 {
                continue;
            }
            let v = f[t][rest];
            if v.is_finite() && sigma_cost[s0] + v < best {
                best = sigma_cost[s0] + v;
                best_s0 = s0;
                best_t = t;
            }
        }
    }

    let mut centers = vec![sigma.clone()];
    let mut mask = full & !best_s0;
    let mut t = best_t;
    while t > 0 {
        let part = choice[t][mask];
        let m = count[part] as f64;
        let c: Vec<f64> = sum[part].iter().map(|s| s / m).collect();
        centers.push(Point::new(c));
        mask &= !part;
        t -= 1;
    }
    // Pad with copies of sigma if fewer than k clusters were used.
    while centers.len() < k {
        centers.push(sigma.clone());
    }
    (best, centers)
}
