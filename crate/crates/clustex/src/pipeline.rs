//! End-to-end orchestration: the private clustering pipeline (reduce, private
//! coreset, approximate clustering, cost rescale, center recovery) and the
//! budget-free contrastive explanations computed from the released coreset.

use crate::geom::{Dataset, Point};
use crate::kmeans::{self, KmeansError};
use crate::kmedian::{self, KmedianError};
use crate::privacy::{
    private_coreset, CoresetConfig, PrivacyBudget, PrivacyError, WeightedPointSet,
};
use crate::reduction::{
    dim_reduce, dim_reverse, sample_projection, scale_cost, ProjectionConfig, ReductionError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Privacy(#[from] PrivacyError),

    #[error(transparent)]
    Reduction(#[from] ReductionError),

    #[error(transparent)]
    Kmedian(#[from] KmedianError),

    #[error(transparent)]
    Kmeans(#[from] KmeansError),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub const DEFAULT_WEIGHT_FLOOR: f64 = 0.5;

/// Default grid-granularity constant of the coreset stage.
pub const DEFAULT_LAMBDA_P_ALPHA: f64 = 1.0;

/// Full parameterization of one private run.
#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    pub k: usize,
    pub p: u8,
    pub epsilon: f64,
    pub beta: f64,
    pub alpha: f64,
    pub d_prime: usize,
    pub lambda_p_alpha: f64,
    /// Candidate-set granularity for the k-means path (`p = 2`).
    pub gamma: f64,
    pub seed: u64,
    /// Test mode: all mechanisms run exactly, nothing is private.
    pub noise_disabled: bool,
}

impl PipelineConfig {
    pub fn validate(&self, n: usize, d: usize) -> Result<(), PipelineError> {
        if self.k < 1 || self.k > n {
            return Err(PipelineError::InvalidConfig(format!(
                "k={} must be in [1, n={n}]",
                self.k
            )));
        }
        if self.p != 1 && self.p != 2 {
            return Err(PipelineError::InvalidConfig(format!("p={} must be 1 or 2", self.p)));
        }
        if !self.noise_disabled && self.epsilon <= 0.0 {
            return Err(PipelineError::InvalidConfig("epsilon must be positive".into()));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(PipelineError::InvalidConfig("beta must be in (0,1)".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(PipelineError::InvalidConfig("alpha must be in (0,1]".into()));
        }
        if self.d_prime < 1 || self.d_prime > d {
            return Err(PipelineError::InvalidConfig(format!(
                "d'={} must be in [1, d={d}]",
                self.d_prime
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(PipelineError::InvalidConfig("gamma must be in (0,1]".into()));
        }
        Ok(())
    }

    fn stage_epsilon(&self) -> f64 {
        if self.noise_disabled {
            f64::INFINITY
        } else {
            self.epsilon / 2.0
        }
    }

    fn ledger_spend(&self) -> f64 {
        if self.noise_disabled {
            0.0
        } else {
            self.epsilon / 2.0
        }
    }
}

/// Everything the private clustering run releases, plus the budget snapshot.
#[derive(Debug, Clone)]
pub struct PrivateClusteringResult {
    pub centers: Vec<Point>,
    pub cost_s_eps: f64,
    pub coreset: WeightedPointSet,
    pub x_low: Dataset,
    pub ledger: PrivacyBudget,
}

/// One agent's released explanation.
#[derive(Debug, Clone)]
pub struct ExplanationRecord {
    pub agent_index: usize,
    pub fixed_point_low: Point,
    pub cost_s_i_eps: f64,
    /// `cost(S_i) - cost(S)`: the clustering-cost increase from pinning a
    /// center at the agent's (projected) location.
    pub explanation: f64,
}

/// Runs the private clustering pipeline. Spends `epsilon/2` on the coreset and
/// `epsilon/2` on center recovery; the released cost is post-processing of the
/// coreset.
pub fn private_clustering(
    x: &Dataset,
    cfg: &PipelineConfig,
) -> Result<PrivateClusteringResult, PipelineError> {
    let n = x.len();
    let d = x.dim();
    cfg.validate(n, d)?;
    for p in x.points() {
        if p.norm() > 1.0 + 1e-9 {
            return Err(PipelineError::InvalidConfig(
                "input points must be unit-ball normalized".into(),
            ));
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let proj_cfg = ProjectionConfig::new(d, cfg.d_prime, n, cfg.beta)?;
    let proj = sample_projection(d, cfg.d_prime, &mut rng)?;
    let x_low = dim_reduce(x, &proj_cfg, &proj)?;

    let mut ledger = PrivacyBudget::new(cfg.epsilon.max(0.0));
    let coreset_cfg = CoresetConfig::derive(cfg.alpha, cfg.p, cfg.lambda_p_alpha, DEFAULT_WEIGHT_FLOOR);
    let coreset = private_coreset(&x_low, &coreset_cfg, cfg.stage_epsilon(), &mut rng)?;
    ledger.spend("coreset", cfg.ledger_spend())?;

    let approx = approx_clustering(&coreset, cfg, None)?;
    let cost_s_eps = scale_cost(approx.cost, n, cfg.beta, cfg.p);

    let centers = dim_reverse(&approx.centers, &x_low, x, cfg.stage_epsilon(), &mut rng)?;
    ledger.spend("dim_reverse", cfg.ledger_spend())?;
    ledger.spend("explanations", 0.0)?;

    Ok(PrivateClusteringResult { centers, cost_s_eps, coreset, x_low, ledger })
}

/// The non-private approximation on the coreset: k-median for `p = 1`,
/// k-means local search for `p = 2`; `fixed` pins a center.
fn approx_clustering(
    y: &WeightedPointSet,
    cfg: &PipelineConfig,
    fixed: Option<&Point>,
) -> Result<crate::geom::CenterSet, PipelineError> {
    let k = cfg.k.min(y.len()).max(1);
    match cfg.p {
        1 => Ok(match fixed {
            Some(f) => kmedian::kmedian_fixed_center(y.points(), y.weights(), k, f)?,
            None => kmedian::kmedian(y.points(), y.weights(), k)?,
        }),
        2 => {
            let cand = kmeans::candidate_centers_capped(
                y.points(),
                fixed,
                cfg.gamma,
                kmeans::DEFAULT_CANDIDATE_CAP,
            )?;
            Ok(kmeans::kmeans_on_candidates(y.points(), y.weights(), k, &cand))
        }
        _ => unreachable!("validated"),
    }
}

/// Computes contrastive explanations for a batch of agents from the released
/// coreset alone. Each request carries the agent's own projected point; no
/// other dataset access occurs and no privacy budget is spent. Per-request
/// solver failures are reported without aborting the batch.
pub fn private_explanations(
    y: &WeightedPointSet,
    cost_s_eps: f64,
    requests: &[(usize, Point)],
    n: usize,
    cfg: &PipelineConfig,
) -> Vec<Result<ExplanationRecord, PipelineError>> {
    requests
        .par_iter()
        .map(|(agent, x_low_i)| {
            let fc = approx_clustering(y, cfg, Some(x_low_i))?;
            let cost_s_i_eps = scale_cost(fc.cost, n, cfg.beta, cfg.p);
            Ok(ExplanationRecord {
                agent_index: *agent,
                fixed_point_low: x_low_i.clone(),
                cost_s_i_eps,
                explanation: cost_s_i_eps - cost_s_eps,
            })
        })
        .collect()
}

/// Test-support predicate: does the pinned optimum exceed the released
/// optimum by enough that the explanation is guaranteed positive?
pub fn check_valid_explanation(opt_i: f64, opt: f64, w_pp: f64, alpha: f64, t_i: f64) -> bool {
    opt_i >= w_pp * (1.0 + alpha) * opt + t_i
}
