//! Fixed-center k-median: LP relaxation plus a three-step rounding that keeps
//! the pinned center open and lands within 8x of the LP objective. The plain
//! (unpinned) variant shares the same machinery.

use crate::geom::{cost_p, CenterSet, Point};
use crate::lp::{LpError, LpProblem, RowOp};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KmedianError {
    #[error("LP solver failure: {0}")]
    Solver(#[from] LpError),

    #[error("no locations")]
    EmptyInstance,
}

/// A k-median instance over a finite location set with demands. Assignment
/// costs are Euclidean distances between locations.
#[derive(Debug, Clone)]
pub struct LpInstance {
    points: Vec<Point>,
    demands: Vec<f64>,
    dist: Vec<f64>,
    k: usize,
    fixed: Option<usize>,
}

impl LpInstance {
    pub fn new(
        points: Vec<Point>,
        demands: Vec<f64>,
        k: usize,
        fixed: Option<usize>,
    ) -> Result<Self, KmedianError> {
        if points.is_empty() {
            return Err(KmedianError::EmptyInstance);
        }
        assert_eq!(points.len(), demands.len());
        if let Some(f) = fixed {
            assert!(f < points.len(), "fixed index out of range");
        }
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points[i].dist(&points[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(LpInstance { points, demands, dist, k: k.max(1), fixed })
    }

    /// Builds an instance from weighted points, appending `fixed_point` as a
    /// zero-demand location when it is not already among the points.
    pub fn from_weighted(
        points: &[Point],
        weights: &[f64],
        k: usize,
        fixed_point: Option<&Point>,
    ) -> Result<Self, KmedianError> {
        let mut pts = points.to_vec();
        let mut dem = weights.to_vec();
        let fixed = match fixed_point {
            None => None,
            Some(f) => match pts.iter().position(|p| p == f) {
                Some(i) => Some(i),
                None => {
                    pts.push(f.clone());
                    dem.push(0.0);
                    Some(pts.len() - 1)
                }
            },
        };
        LpInstance::new(pts, dem, k, fixed)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fixed(&self) -> Option<usize> {
        self.fixed
    }

    pub fn demands(&self) -> &[f64] {
        &self.demands
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }

    /// Location indices sorted by distance from `j`, nearest first, ties by index.
    fn order_from(&self, j: usize) -> Vec<usize> {
        let n = self.points.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            self.c(a, j)
                .partial_cmp(&self.c(b, j))
                .unwrap()
                .then(a.cmp(&b))
        });
        idx
    }
}

/// Optimal fractional solution of the relaxation.
#[derive(Debug, Clone)]
pub struct FractionalSolution {
    /// Row-major `n x n`; `x_bar[i * n + j]` is the fraction of `j` served by `i`.
    pub x_bar: Vec<f64>,
    pub y_bar: Vec<f64>,
    /// Per-location fractional service cost `sum_i c_ij * x_ij`.
    pub cost_terms: Vec<f64>,
    pub objective: f64,
}

/// Fractional service cost of `j` under openness `y`: fill demand from the
/// nearest locations until one unit is assigned. Returns the cost and the
/// marginal distance where the unit completes (the supporting-cut breakpoint).
fn fill_cost(inst: &LpInstance, order_j: &[usize], j: usize, y: &[f64]) -> (f64, f64) {
    let mut remaining = 1.0;
    let mut cost = 0.0;
    let mut last = 0.0;
    for &i in order_j {
        let cap = y[i];
        if cap <= 0.0 {
            continue;
        }
        let take = cap.min(remaining);
        cost += take * inst.c(i, j);
        remaining -= take;
        last = inst.c(i, j);
        if remaining <= 1e-12 {
            return (cost, last);
        }
    }
    // Openness sums to k >= 1, so this is numerical dust; absorb it at the
    // farthest used distance.
    cost += remaining * last;
    (cost, last)
}

/// Solves the relaxation
/// `min sum_j d_j c_ij x_ij  s.t.  sum_i x_ij = 1, x_ij <= y_i, sum y = k`
/// (plus `y_C = 1`, `x_CC = 1` when a center is pinned) to optimality.
///
/// Internally works on the equivalent openness-space program, generating
/// supporting cuts for each location's fractional service cost; the returned
/// assignment is reconstructed by nearest-first filling and certifies the
/// objective against the master bound.
pub fn solve_relaxation(inst: &LpInstance) -> Result<FractionalSolution, KmedianError> {
    let n = inst.len();
    let k = inst.k.min(n);

    if k >= n {
        // Every location opens; everyone self-serves.
        let mut x = vec![0.0; n * n];
        for j in 0..n {
            x[j * n + j] = 1.0;
        }
        return Ok(FractionalSolution {
            x_bar: x,
            y_bar: vec![1.0; n],
            cost_terms: vec![0.0; n],
            objective: 0.0,
        });
    }

    let orders: Vec<Vec<usize>> = (0..n).map(|j| inst.order_from(j)).collect();

    // Locations that carry cuts: positive demand and not the pinned center
    // (the pinned center always serves itself at zero cost).
    let cut_js: Vec<usize> = (0..n)
        .filter(|&j| inst.demands[j] > 0.0 && Some(j) != inst.fixed)
        .collect();
    let theta_col: Vec<Option<usize>> = {
        let mut m = vec![None; n];
        for (t, &j) in cut_js.iter().enumerate() {
            m[j] = Some(n + t);
        }
        m
    };
    let ncols = n + cut_js.len();

    // Active cut pool: (j, breakpoint distance).
    let mut cuts: Vec<(usize, f64)> = Vec::new();
    for &j in &cut_js {
        // Seed with the nearest-other-location breakpoint.
        let t = orders[j]
            .iter()
            .copied()
            .find(|&i| i != j)
            .map(|i| inst.c(i, j))
            .unwrap_or(0.0);
        cuts.push((j, t));
    }

    let mut best_y: Option<Vec<f64>> = None;
    let mut best_ub = f64::INFINITY;
    let mut lower = 0.0f64;

    let max_rounds = 200;
    for round in 0..max_rounds {
        let mut lp = LpProblem::new(ncols);
        for i in 0..n {
            lp.set_bounds(i, 0.0, 1.0);
        }
        if let Some(f) = inst.fixed {
            lp.set_bounds(f, 1.0, 1.0);
        }
        for &j in &cut_js {
            lp.set_objective(theta_col[j].unwrap(), inst.demands[j]);
        }
        let eq: Vec<(usize, f64)> = (0..n).map(|i| (i, 1.0)).collect();
        lp.add_row(&eq, RowOp::Eq, k as f64);
        for &(j, t) in &cuts {
            let mut row: Vec<(usize, f64)> = vec![(theta_col[j].unwrap(), 1.0)];
            for &i in &orders[j] {
                let c = inst.c(i, j);
                if c >= t {
                    break;
                }
                row.push((i, t - c));
            }
            lp.add_row(&row, RowOp::Ge, t);
        }

        let sol = lp.solve()?;
        lower = lower.max(sol.objective);
        let y = &sol.x[..n];

        // Evaluate true service costs at the master's openness.
        let mut ub = 0.0;
        let mut new_cuts: Vec<(usize, f64)> = Vec::new();
        for &j in &cut_js {
            let (h, t_star) = fill_cost(inst, &orders[j], j, y);
            ub += inst.demands[j] * h;
            let theta = sol.x[theta_col[j].unwrap()];
            if h - theta > 1e-10 * (1.0 + h.abs()) {
                new_cuts.push((j, t_star));
            }
        }
        if ub < best_ub {
            best_ub = ub;
            best_y = Some(y.to_vec());
        }

        let converged = new_cuts.is_empty()
            || (best_ub - lower) <= 1e-9 * (1.0 + best_ub.abs());
        if converged {
            break;
        }

        // Keep cuts that are tight at the current iterate, then the new ones.
        if round > 0 {
            let mut kept: Vec<(usize, f64)> = Vec::with_capacity(cuts.len());
            for &(j, t) in &cuts {
                let theta = sol.x[theta_col[j].unwrap()];
                let mut rhs = t;
                for &i in &orders[j] {
                    let c = inst.c(i, j);
                    if c >= t {
                        break;
                    }
                    rhs -= (t - c) * y[i];
                }
                if theta - rhs <= 1e-7 * (1.0 + rhs.abs()) {
                    kept.push((j, t));
                }
            }
            cuts = kept;
        }
        for nc in new_cuts {
            if !cuts.iter().any(|&(j, t)| j == nc.0 && (t - nc.1).abs() <= 1e-15) {
                cuts.push(nc);
            }
        }
        if round == max_rounds - 1 {
            log::warn!("relaxation hit the round limit; gap {:.3e}", best_ub - lower);
        }
    }

    let y = best_y.expect("at least one master solve");
    let mut x = vec![0.0; n * n];
    let mut cost_terms = vec![0.0; n];
    let mut objective = 0.0;
    for j in 0..n {
        if Some(j) == inst.fixed {
            x[j * n + j] = 1.0;
            continue;
        }
        // Nearest-first fill reconstructs an optimal assignment for this y.
        let mut remaining = 1.0;
        for &i in &orders[j] {
            let cap = y[i];
            if cap <= 0.0 {
                continue;
            }
            let take = cap.min(remaining);
            if take > 0.0 {
                x[i * n + j] = take;
                cost_terms[j] += take * inst.c(i, j);
            }
            remaining -= take;
            if remaining <= 1e-12 {
                break;
            }
        }
        objective += inst.demands[j] * cost_terms[j];
    }
    Ok(FractionalSolution { x_bar: x, y_bar: y, cost_terms, objective })
}

/// Demand consolidation: locations ordered by fractional cost (pinned center
/// first), each location's demand moved to the first earlier location within
/// `4 * cost_term` that still carries demand. Surviving locations end up
/// mutually separated by more than `4 * max` of their cost terms.
#[derive(Debug, Clone)]
pub struct ConsolidatedInstance {
    /// All locations in scan order (pinned center first, then by cost term).
    pub order: Vec<usize>,
    pub modified_demands: Vec<f64>,
    /// Locations with positive modified demand (plus the pinned center), in scan order.
    pub survivors: Vec<usize>,
}

pub fn consolidate_demands(inst: &LpInstance, frac: &FractionalSolution) -> ConsolidatedInstance {
    let n = inst.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let fa = Some(a) == inst.fixed;
        let fb = Some(b) == inst.fixed;
        fb.cmp(&fa)
            .then(frac.cost_terms[a].partial_cmp(&frac.cost_terms[b]).unwrap())
            .then(a.cmp(&b))
    });

    let mut d = inst.demands.to_vec();
    for pos in 0..order.len() {
        let j = order[pos];
        if Some(j) == inst.fixed || d[j] <= 0.0 {
            continue;
        }
        let bound = 4.0 * frac.cost_terms[j];
        for &i in order.iter().take(pos) {
            if d[i] > 0.0 || Some(i) == inst.fixed {
                if inst.c(i, j) <= bound {
                    d[i] += d[j];
                    d[j] = 0.0;
                    break;
                }
            }
        }
    }

    let survivors: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&j| d[j] > 0.0 || Some(j) == inst.fixed)
        .collect();
    ConsolidatedInstance { order, modified_demands: d, survivors }
}

/// A `{1/2, 1}`-valued openness over the surviving locations.
#[derive(Debug, Clone)]
pub struct HalfIntegralSolution {
    /// Aligned with `ConsolidatedInstance::survivors`.
    pub y_hat: Vec<f64>,
    /// `s_of[idx]` is the survivor-list position of the nearest other survivor.
    pub s_of: Vec<usize>,
    /// Rerouting weight `d'_j * c(s(j), j)` per survivor.
    pub weight: Vec<f64>,
}

impl HalfIntegralSolution {
    /// Assignment cost of the half-integral solution under modified demands.
    pub fn cost(&self) -> f64 {
        self.y_hat
            .iter()
            .zip(&self.weight)
            .map(|(y, w)| w * (1.0 - y))
            .sum()
    }
}

pub fn round_to_half_integral(
    inst: &LpInstance,
    cons: &ConsolidatedInstance,
) -> HalfIntegralSolution {
    let surv = &cons.survivors;
    let n_s = surv.len();
    let k = inst.k.min(inst.len());

    if n_s == 1 {
        return HalfIntegralSolution { y_hat: vec![1.0], s_of: vec![0], weight: vec![0.0] };
    }

    let mut s_of = vec![0usize; n_s];
    let mut weight = vec![0.0; n_s];
    for a in 0..n_s {
        let ja = surv[a];
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for b in 0..n_s {
            if b == a {
                continue;
            }
            let d = inst.c(surv[b], ja);
            if d < best_d || (d == best_d && surv[b] < surv[best]) {
                best_d = d;
                best = b;
            }
        }
        s_of[a] = best;
        weight[a] = cons.modified_demands[ja] * best_d;
    }

    // Order: pinned center first, then by decreasing rerouting weight.
    let fixed_pos = inst
        .fixed
        .and_then(|f| surv.iter().position(|&j| j == f));
    let mut by_weight: Vec<usize> = (0..n_s).filter(|&a| Some(a) != fixed_pos).collect();
    by_weight.sort_by(|&a, &b| {
        weight[b]
            .partial_cmp(&weight[a])
            .unwrap()
            .then(surv[a].cmp(&surv[b]))
    });
    let ranked: Vec<usize> = fixed_pos.into_iter().chain(by_weight).collect();

    let ones = (2 * k).saturating_sub(n_s).min(n_s);
    let mut y_hat = vec![0.5; n_s];
    for &a in ranked.iter().take(ones) {
        y_hat[a] = 1.0;
    }
    // The pinned center stays fully open even when the count says "all halves".
    if let Some(fp) = fixed_pos {
        y_hat[fp] = 1.0;
    }
    HalfIntegralSolution { y_hat, s_of, weight }
}

/// Final integral choice of centers.
#[derive(Debug, Clone)]
pub struct IntegralSolution {
    /// Location indices of the chosen centers; may repeat when padding was needed.
    pub centers: Vec<usize>,
    /// Assignment cost of survivors under modified demands.
    pub cost: f64,
}

/// Size-constrained minimum-weight independent set on a forest, by tree DP.
/// `adj` must be a forest; returns `None` if no independent set of the exact
/// size exists.
fn min_weight_independent_set(
    nodes: usize,
    adj: &[Vec<usize>],
    w: &[f64],
    size: usize,
) -> Option<Vec<usize>> {
    type Table = Vec<Option<(f64, Vec<usize>)>>;

    fn merge(a: &Table, b: &Table) -> Table {
        let mut out: Table = vec![None; a.len() + b.len() - 1];
        for (sa, ea) in a.iter().enumerate() {
            let Some((wa, seta)) = ea else { continue };
            for (sb, eb) in b.iter().enumerate() {
                let Some((wb, setb)) = eb else { continue };
                let cand = wa + wb;
                let slot = &mut out[sa + sb];
                if slot.is_none() || slot.as_ref().unwrap().0 > cand {
                    let mut s = seta.clone();
                    s.extend_from_slice(setb);
                    *slot = Some((cand, s));
                }
            }
        }
        out
    }

    // Returns (table_with_v_in, table_with_v_out).
    fn dfs(
        v: usize,
        parent: usize,
        adj: &[Vec<usize>],
        w: &[f64],
        visited: &mut [bool],
    ) -> (Table, Table) {
        visited[v] = true;
        let mut t_in: Table = vec![None, Some((w[v], vec![v]))];
        let mut t_out: Table = vec![Some((0.0, vec![]))];
        for &c in &adj[v] {
            if c == parent || visited[c] {
                continue;
            }
            let (c_in, c_out) = dfs(c, v, adj, w, visited);
            t_in = merge(&t_in, &c_out);
            let c_best: Table = {
                let len = c_in.len().max(c_out.len());
                (0..len)
                    .map(|s| {
                        let a = c_in.get(s).cloned().flatten();
                        let b = c_out.get(s).cloned().flatten();
                        match (a, b) {
                            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                            (Some(x), None) => Some(x),
                            (None, Some(y)) => Some(y),
                            (None, None) => None,
                        }
                    })
                    .collect()
            };
            t_out = merge(&t_out, &c_best);
        }
        (t_in, t_out)
    }

    let mut visited = vec![false; nodes];
    let mut total: Table = vec![Some((0.0, vec![]))];
    for v in 0..nodes {
        if visited[v] {
            continue;
        }
        let (t_in, t_out) = dfs(v, usize::MAX, adj, w, &mut visited);
        let len = t_in.len().max(t_out.len());
        let comp: Table = (0..len)
            .map(|s| {
                let a = t_in.get(s).cloned().flatten();
                let b = t_out.get(s).cloned().flatten();
                match (a, b) {
                    (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                    (Some(x), None) => Some(x),
                    (None, Some(y)) => Some(y),
                    (None, None) => None,
                }
            })
            .collect();
        total = merge(&total, &comp);
    }
    total.get(size).cloned().flatten().map(|(_, set)| set)
}

pub fn round_to_integral(
    inst: &LpInstance,
    cons: &ConsolidatedInstance,
    half: &HalfIntegralSolution,
) -> IntegralSolution {
    let surv = &cons.survivors;
    let n_s = surv.len();
    let k = inst.k.min(inst.len());

    let ones: Vec<usize> = (0..n_s).filter(|&a| half.y_hat[a] >= 1.0).collect();
    let halves: Vec<usize> = (0..n_s).filter(|&a| half.y_hat[a] < 1.0).collect();

    let open_from_halves = k.saturating_sub(ones.len()).min(halves.len());
    let to_close = halves.len() - open_from_halves;

    // Constraint graph on half-open survivors: a closed location must keep its
    // nearest-survivor target open. Edges only between half nodes; pointers
    // into always-open locations are unconstrained. The nearest-neighbor map
    // yields a forest.
    let mut closed: Vec<usize> = Vec::new();
    if to_close > 0 {
        let hpos: Vec<Option<usize>> = {
            let mut m = vec![None; n_s];
            for (hi, &a) in halves.iter().enumerate() {
                m[a] = Some(hi);
            }
            m
        };
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); halves.len()];
        for (hi, &a) in halves.iter().enumerate() {
            if let Some(hj) = hpos[half.s_of[a]] {
                if !adj[hi].contains(&hj) {
                    adj[hi].push(hj);
                    adj[hj].push(hi);
                }
            }
        }
        let w: Vec<f64> = halves.iter().map(|&a| half.weight[a]).collect();
        closed = match min_weight_independent_set(halves.len(), &adj, &w, to_close) {
            Some(set) => set.into_iter().map(|hi| halves[hi]).collect(),
            None => {
                // Degenerate counts (should not occur): close cheapest first.
                let mut by_w: Vec<usize> = halves.clone();
                by_w.sort_by(|&a, &b| half.weight[a].partial_cmp(&half.weight[b]).unwrap());
                by_w.truncate(to_close);
                by_w
            }
        };
    }

    let closed_mask: Vec<bool> = {
        let mut m = vec![false; n_s];
        for &a in &closed {
            m[a] = true;
        }
        m
    };
    let mut centers: Vec<usize> = (0..n_s)
        .filter(|&a| !closed_mask[a])
        .map(|a| surv[a])
        .collect();

    // Pad: highest-demand unchosen locations, then repeat the first center.
    if centers.len() < k {
        let mut rest: Vec<usize> = (0..inst.len()).filter(|i| !centers.contains(i)).collect();
        rest.sort_by(|&a, &b| {
            inst.demands[b]
                .partial_cmp(&inst.demands[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        for i in rest {
            if centers.len() == k {
                break;
            }
            centers.push(i);
        }
        while centers.len() < k {
            let dup = inst.fixed.unwrap_or(centers[0]);
            centers.push(dup);
        }
    }
    debug_assert!(centers.len() >= k);
    centers.truncate(k.max(1));
    if let Some(f) = inst.fixed {
        if !centers.contains(&f) {
            // Guard; the rounding keeps the pinned center open on every sane path.
            let last = centers.len() - 1;
            centers[last] = f;
        }
    }

    let mut cost = 0.0;
    for &a in surv.iter() {
        let d = cons.modified_demands[a];
        if d <= 0.0 {
            continue;
        }
        let best = centers
            .iter()
            .map(|&c| inst.c(c, a))
            .fold(f64::INFINITY, f64::min);
        cost += d * best;
    }
    IntegralSolution { centers, cost }
}

/// End-to-end fixed-center k-median on weighted points: relaxation,
/// consolidation, half-integral rounding, integral rounding. The returned
/// centers are input locations, always include `fixed`, and the cost is
/// evaluated against the original weights.
pub fn kmedian_fixed_center(
    points: &[Point],
    weights: &[f64],
    k: usize,
    fixed: &Point,
) -> Result<CenterSet, KmedianError> {
    let inst = LpInstance::from_weighted(points, weights, k, Some(fixed))?;
    run_rounding(&inst, points, weights)
}

/// Plain k-median (no pinned center) used as the non-private approximation.
pub fn kmedian(points: &[Point], weights: &[f64], k: usize) -> Result<CenterSet, KmedianError> {
    let inst = LpInstance::from_weighted(points, weights, k, None)?;
    run_rounding(&inst, points, weights)
}

fn run_rounding(
    inst: &LpInstance,
    points: &[Point],
    weights: &[f64],
) -> Result<CenterSet, KmedianError> {
    let frac = solve_relaxation(inst)?;
    let cons = consolidate_demands(inst, &frac);
    let half = round_to_half_integral(inst, &cons);
    let integral = round_to_integral(inst, &cons, &half);
    let mut centers: Vec<Point> = integral
        .centers
        .iter()
        .map(|&i| inst.points[i].clone())
        .collect();
    // Fewer locations than k: repeat centers so the output cardinality holds.
    while centers.len() < inst.k {
        let dup = inst.fixed.map(|f| inst.points[f].clone()).unwrap_or_else(|| centers[0].clone());
        centers.push(dup);
    }
    let cost = cost_p(points, Some(weights), &centers, 1).expect("consistent dimensions");
    Ok(CenterSet { centers, cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{brute_force_opt, ClusteringParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn pts1d(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::new(vec![x])).collect()
    }

    #[test]
    fn instance_costs_form_a_metric() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (pts, w, k) = random_instance(&mut rng, 10, 3, 2);
        let inst = LpInstance::new(pts, w, k, None).unwrap();
        let n = inst.len();
        for i in 0..n {
            assert_eq!(inst.c(i, i), 0.0);
            for j in 0..n {
                assert_eq!(inst.c(i, j), inst.c(j, i));
                for l in 0..n {
                    assert!(inst.c(i, j) <= inst.c(i, l) + inst.c(l, j) + 1e-7);
                }
            }
        }
    }

    #[test]
    fn relaxation_pins_fixed_center() {
        let pts = pts1d(&[0.0, 0.5]);
        let inst = LpInstance::new(pts, vec![1.0, 1.0], 1, Some(0)).unwrap();
        let frac = solve_relaxation(&inst).unwrap();
        assert!((frac.y_bar[0] - 1.0).abs() < 1e-6);
        assert!(frac.y_bar[1].abs() < 1e-6);
        assert!((frac.objective - 0.5).abs() < 1e-6);
        assert!(frac.cost_terms[0].abs() < 1e-9);
        assert!((frac.x_bar[0 * 2 + 1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn relaxation_k_equals_n_is_free() {
        let pts = pts1d(&[0.0, 0.3, 0.9]);
        let inst = LpInstance::new(pts, vec![1.0; 3], 3, None).unwrap();
        let frac = solve_relaxation(&inst).unwrap();
        assert_eq!(frac.objective, 0.0);
        assert!(frac.y_bar.iter().all(|&y| (y - 1.0).abs() < 1e-9));
    }

    fn random_instance(
        rng: &mut ChaCha20Rng,
        n_max: usize,
        k_max: usize,
        d: usize,
    ) -> (Vec<Point>, Vec<f64>, usize) {
        let n = rng.random_range(3..=n_max);
        let k = rng.random_range(1..=k_max.min(n));
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.random_range(-1.0..1.0)).collect()))
            .collect();
        (pts, vec![1.0; n], k)
    }

    #[test]
    fn relaxation_lower_bounds_integral_optimum() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..40 {
            let (pts, w, k) = random_instance(&mut rng, 8, 2, 2);
            let inst = LpInstance::new(pts.clone(), w.clone(), k, None).unwrap();
            let frac = solve_relaxation(&inst).unwrap();
            let opt = brute_force_opt(&pts, Some(&w), &pts, ClusteringParams::new(k, 1), None)
                .unwrap();
            assert!(
                frac.objective <= opt.cost + 1e-6 * (1.0 + opt.cost),
                "LP {} above IP {}",
                frac.objective,
                opt.cost
            );
        }
    }

    #[test]
    fn fractional_solution_is_feasible() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for trial in 0..30 {
            let (pts, w, k) = random_instance(&mut rng, 9, 3, 2);
            let n = pts.len();
            let fixed = if trial % 2 == 0 { Some(0) } else { None };
            let inst = LpInstance::new(pts, w, k, fixed).unwrap();
            let frac = solve_relaxation(&inst).unwrap();
            let y_sum: f64 = frac.y_bar.iter().sum();
            assert!((y_sum - k as f64).abs() < 1e-6);
            for j in 0..n {
                let col_sum: f64 = (0..n).map(|i| frac.x_bar[i * n + j]).sum();
                assert!((col_sum - 1.0).abs() < 1e-6, "assignment of {j} sums to {col_sum}");
                for i in 0..n {
                    assert!(frac.x_bar[i * n + j] <= frac.y_bar[i] + 1e-6);
                }
            }
            if let Some(f) = fixed {
                assert!(frac.y_bar[f] >= 1.0 - 1e-6);
                assert!(frac.x_bar[f * n + f] >= 1.0 - 1e-6);
                assert!(frac.cost_terms[f].abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn consolidation_merges_colocated_points() {
        let pts = pts1d(&[0.2, 0.2, 0.9]);
        let inst = LpInstance::new(pts, vec![1.0; 3], 1, Some(0)).unwrap();
        let frac = solve_relaxation(&inst).unwrap();
        let cons = consolidate_demands(&inst, &frac);
        // Location 1 is co-located with the pinned center: its demand moves.
        assert_eq!(cons.modified_demands[1], 0.0);
        assert!(cons.modified_demands[0] >= 2.0);
        let total: f64 = cons.modified_demands.iter().sum();
        assert!((total - 3.0).abs() < 1e-9);
    }

    #[test]
    fn consolidation_keeps_far_points() {
        // Two far points with k = 2: cost terms are ~0, so nothing moves.
        let pts = pts1d(&[0.0, 1.0]);
        let inst = LpInstance::new(pts, vec![1.0; 2], 2, None).unwrap();
        let frac = solve_relaxation(&inst).unwrap();
        let cons = consolidate_demands(&inst, &frac);
        assert_eq!(cons.survivors.len(), 2);
    }

    #[test]
    fn separation_invariant_on_survivors() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for trial in 0..40 {
            let (pts, w, k) = random_instance(&mut rng, 10, 3, 2);
            let fixed = if trial % 2 == 0 { Some(0) } else { None };
            let inst = LpInstance::new(pts, w, k, fixed).unwrap();
            let frac = solve_relaxation(&inst).unwrap();
            let cons = consolidate_demands(&inst, &frac);
            let total_before: f64 = inst.demands.iter().sum();
            let total_after: f64 = cons.modified_demands.iter().sum();
            assert!((total_before - total_after).abs() < 1e-9);
            for (a_pos, &a) in cons.survivors.iter().enumerate() {
                if cons.modified_demands[a] <= 0.0 {
                    continue;
                }
                for &b in cons.survivors.iter().skip(a_pos + 1) {
                    if cons.modified_demands[b] <= 0.0 {
                        continue;
                    }
                    let sep = 4.0 * frac.cost_terms[a].max(frac.cost_terms[b]);
                    assert!(
                        inst.c(a, b) > sep - 1e-9,
                        "survivors {a},{b} violate separation: c={} bound={}",
                        inst.c(a, b),
                        sep
                    );
                }
            }
        }
    }

    #[test]
    fn half_integral_all_ones_when_few_survivors() {
        let pts = pts1d(&[0.0, 1.0]);
        let inst = LpInstance::new(pts, vec![1.0; 2], 2, None).unwrap();
        let frac = solve_relaxation(&inst).unwrap();
        let cons = consolidate_demands(&inst, &frac);
        let half = round_to_half_integral(&inst, &cons);
        assert!(half.y_hat.iter().all(|&y| y == 1.0));
    }

    #[test]
    fn half_integral_cost_at_most_twice_lp() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for trial in 0..100 {
            let (pts, w, k) = random_instance(&mut rng, 10, 3, 2);
            let fixed = if trial % 2 == 0 { Some(0) } else { None };
            let inst = LpInstance::new(pts, w, k, fixed).unwrap();
            let frac = solve_relaxation(&inst).unwrap();
            let cons = consolidate_demands(&inst, &frac);
            let half = round_to_half_integral(&inst, &cons);
            assert!(
                half.cost() <= 2.0 * frac.objective + 1e-7,
                "half cost {} exceeds 2x LP {}",
                half.cost(),
                frac.objective
            );
            if let Some(f) = inst.fixed() {
                let fp = cons.survivors.iter().position(|&j| j == f).unwrap();
                assert_eq!(half.y_hat[fp], 1.0);
            }
            let total: f64 = half.y_hat.iter().sum();
            assert!(total <= k as f64 + 0.5 + 1e-9);
        }
    }

    #[test]
    fn integral_keeps_all_ones() {
        let pts = pts1d(&[0.0, 1.0]);
        let inst = LpInstance::new(pts, vec![1.0; 2], 2, None).unwrap();
        let frac = solve_relaxation(&inst).unwrap();
        let cons = consolidate_demands(&inst, &frac);
        let half = round_to_half_integral(&inst, &cons);
        let integral = round_to_integral(&inst, &cons, &half);
        assert_eq!(integral.centers.len(), 2);
        assert_eq!(integral.cost, 0.0);
    }

    #[test]
    fn integral_cost_at_most_twice_half() {
        let mut rng = ChaCha20Rng::seed_from_u64(47);
        for trial in 0..100 {
            let (pts, w, k) = random_instance(&mut rng, 10, 3, 2);
            let fixed = if trial % 2 == 0 { Some(0) } else { None };
            let inst = LpInstance::new(pts, w, k, fixed).unwrap();
            let frac = solve_relaxation(&inst).unwrap();
            let cons = consolidate_demands(&inst, &frac);
            let half = round_to_half_integral(&inst, &cons);
            let integral = round_to_integral(&inst, &cons, &half);
            assert_eq!(integral.centers.len(), k);
            assert!(
                integral.cost <= 2.0 * half.cost() + 1e-7,
                "integral {} vs half {}",
                integral.cost,
                half.cost()
            );
            if let Some(f) = inst.fixed() {
                assert!(integral.centers.contains(&f));
            }
        }
    }

    #[test]
    fn fixed_center_worked_example() {
        let pts = pts1d(&[0.0, 0.5, 1.0]);
        let fixed = Point::new(vec![0.0]);
        let got = kmedian_fixed_center(&pts, &[1.0; 3], 2, &fixed).unwrap();
        assert!((got.cost - 0.5).abs() < 1e-9);
        assert!(got.centers.contains(&fixed));
    }

    #[test]
    fn k_equals_n_costs_nothing() {
        let pts = pts1d(&[0.1, 0.4, 0.8]);
        let got = kmedian(&pts, &[1.0; 3], 3).unwrap();
        assert_eq!(got.cost, 0.0);
    }

    #[test]
    fn oracle_sweep_within_eight_of_optimum() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for trial in 0..60 {
            let (pts, w, k) = random_instance(&mut rng, 10, 3, 2);
            let fixed_pt = pts[rng.random_range(0..pts.len())].clone();
            let use_fixed = trial % 3 != 0;

            let (got, opt) = if use_fixed {
                let got = kmedian_fixed_center(&pts, &w, k, &fixed_pt).unwrap();
                let opt = brute_force_opt(
                    &pts,
                    Some(&w),
                    &pts,
                    ClusteringParams::new(k, 1),
                    Some(&fixed_pt),
                )
                .unwrap();
                (got, opt)
            } else {
                let got = kmedian(&pts, &w, k).unwrap();
                let opt =
                    brute_force_opt(&pts, Some(&w), &pts, ClusteringParams::new(k, 1), None)
                        .unwrap();
                (got, opt)
            };
            assert!(
                got.cost <= 8.0 * opt.cost + 1e-7,
                "cost {} vs 8x opt {}",
                got.cost,
                8.0 * opt.cost
            );
        }
    }
}
