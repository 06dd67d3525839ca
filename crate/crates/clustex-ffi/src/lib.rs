//! C ABI for the private clustering pipeline and contrastive explanations.
//!
//! All functions are panic-safe: failures surface as [`ClustexStatus`] codes,
//! never across the FFI boundary. Handles are opaque; every `*_create` has a
//! matching `*_destroy`.

use clustex::geom::{Dataset, Point};
use clustex::pipeline::{
    private_clustering, private_explanations, PipelineConfig, PrivateClusteringResult,
};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClustexStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    EmptyCoreset = 3,
    SolverFailure = 4,
    TooManyCandidates = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Pipeline parameters; obtain defaults from [`clustex_default_config`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ClustexConfig {
    /// Number of centers.
    pub k: usize,
    /// Cost exponent: 1 = k-median, 2 = k-means.
    pub p: u32,
    /// Privacy budget (ignored when `noise_disabled`).
    pub epsilon: f64,
    /// Reduction failure probability, in (0, 1).
    pub beta: f64,
    /// Coreset accuracy parameter, in (0, 1].
    pub alpha: f64,
    /// Reduced dimension; 0 means "use the data dimension".
    pub d_prime: usize,
    /// Candidate-set granularity for p = 2, in (0, 1].
    pub gamma: f64,
    /// Master seed for all randomness.
    pub seed: u64,
    /// Test mode: disables all noise. The output is NOT private.
    pub noise_disabled: bool,
}

/// An opaque, unit-ball-normalized dataset.
pub struct ClustexDataset {
    data: Dataset,
    scale: f64,
}

/// An opaque private clustering result; explanations are served from it.
pub struct ClustexClustering {
    result: PrivateClusteringResult,
    cfg: PipelineConfig,
    n: usize,
}

fn pipeline_error_status(e: &clustex::pipeline::PipelineError) -> ClustexStatus {
    use clustex::kmeans::KmeansError;
    use clustex::pipeline::PipelineError;
    use clustex::privacy::PrivacyError;
    match e {
        PipelineError::Privacy(PrivacyError::EmptyCoreset) => ClustexStatus::EmptyCoreset,
        PipelineError::Privacy(_) => ClustexStatus::InvalidArgument,
        PipelineError::Kmeans(KmeansError::TooManyCandidates { .. }) => {
            ClustexStatus::TooManyCandidates
        }
        PipelineError::Kmedian(_) => ClustexStatus::SolverFailure,
        PipelineError::Kmeans(_) | PipelineError::Reduction(_) => ClustexStatus::InvalidArgument,
        PipelineError::InvalidConfig(_) => ClustexStatus::InvalidArgument,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn clustex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Human-readable description of a status code (static storage).
#[no_mangle]
pub extern "C" fn clustex_status_message(status: ClustexStatus) -> *const c_char {
    let s: &'static str = match status {
        ClustexStatus::Ok => "ok\0",
        ClustexStatus::NullArgument => "null argument\0",
        ClustexStatus::InvalidArgument => "invalid argument\0",
        ClustexStatus::EmptyCoreset => "all coreset cells were pruned\0",
        ClustexStatus::SolverFailure => "solver failure\0",
        ClustexStatus::TooManyCandidates => "candidate construction exceeded its cap\0",
        ClustexStatus::BufferTooSmall => "output buffer too small\0",
        ClustexStatus::Internal => "internal error\0",
    };
    s.as_ptr() as *const c_char
}

/// Sensible defaults: k-median, k = 5, epsilon = 1.
#[no_mangle]
pub extern "C" fn clustex_default_config() -> ClustexConfig {
    ClustexConfig {
        k: 5,
        p: 1,
        epsilon: 1.0,
        beta: 0.1,
        alpha: 1.0,
        d_prime: 0,
        gamma: 0.5,
        seed: 42,
        noise_disabled: false,
    }
}

/// Builds a dataset from `n` rows of `d` raw coordinates (row-major) and
/// normalizes it into the unit ball.
///
/// # Safety
/// `coords` must point to `n * d` readable doubles; `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn clustex_dataset_create(
    coords: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut ClustexDataset,
) -> ClustexStatus {
    if coords.is_null() || out.is_null() {
        return ClustexStatus::NullArgument;
    }
    if n == 0 || d == 0 {
        return ClustexStatus::InvalidArgument;
    }
    let slice = std::slice::from_raw_parts(coords, n * d);
    let result = catch_unwind(|| {
        let raw: Vec<Vec<f64>> = (0..n).map(|i| slice[i * d..(i + 1) * d].to_vec()).collect();
        clustex::geom::normalize_to_unit_ball(&raw)
    });
    match result {
        Ok(Ok((data, scale))) => {
            *out = Box::into_raw(Box::new(ClustexDataset { data, scale }));
            ClustexStatus::Ok
        }
        Ok(Err(_)) => ClustexStatus::InvalidArgument,
        Err(_) => ClustexStatus::Internal,
    }
}

/// Number of points.
#[no_mangle]
pub unsafe extern "C" fn clustex_dataset_len(ds: *const ClustexDataset) -> usize {
    if ds.is_null() {
        return 0;
    }
    (*ds).data.len()
}

/// Point dimension.
#[no_mangle]
pub unsafe extern "C" fn clustex_dataset_dim(ds: *const ClustexDataset) -> usize {
    if ds.is_null() {
        return 0;
    }
    (*ds).data.dim()
}

/// Normalization scale: multiply squared/linear costs by `scale^p` to return
/// to original units.
#[no_mangle]
pub unsafe extern "C" fn clustex_dataset_scale(ds: *const ClustexDataset) -> f64 {
    if ds.is_null() {
        return f64::NAN;
    }
    (*ds).scale
}

/// # Safety
/// `ds` must come from [`clustex_dataset_create`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn clustex_dataset_destroy(ds: *mut ClustexDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Runs the private clustering pipeline.
///
/// # Safety
/// `ds` must be a live dataset handle; `out` must be a valid destination.
#[no_mangle]
pub unsafe extern "C" fn clustex_private_clustering(
    ds: *const ClustexDataset,
    cfg: ClustexConfig,
    out: *mut *mut ClustexClustering,
) -> ClustexStatus {
    if ds.is_null() || out.is_null() {
        return ClustexStatus::NullArgument;
    }
    let data = &(*ds).data;
    if cfg.p != 1 && cfg.p != 2 {
        return ClustexStatus::InvalidArgument;
    }
    let pcfg = PipelineConfig {
        k: cfg.k,
        p: cfg.p as u8,
        epsilon: cfg.epsilon,
        beta: cfg.beta,
        alpha: cfg.alpha,
        d_prime: if cfg.d_prime == 0 { data.dim() } else { cfg.d_prime },
        lambda_p_alpha: 1.0,
        gamma: cfg.gamma,
        seed: cfg.seed,
        noise_disabled: cfg.noise_disabled,
    };
    let result = catch_unwind(AssertUnwindSafe(|| private_clustering(data, &pcfg)));
    match result {
        Ok(Ok(result)) => {
            let n = data.len();
            *out = Box::into_raw(Box::new(ClustexClustering { result, cfg: pcfg, n }));
            ClustexStatus::Ok
        }
        Ok(Err(e)) => pipeline_error_status(&e),
        Err(_) => ClustexStatus::Internal,
    }
}

/// Released clustering cost.
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_cost(h: *const ClustexClustering) -> f64 {
    if h.is_null() {
        return f64::NAN;
    }
    (*h).result.cost_s_eps
}

/// Number of centers.
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_k(h: *const ClustexClustering) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).result.centers.len()
}

/// Center dimension.
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_dim(h: *const ClustexClustering) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).result.centers.first().map_or(0, |c| c.dim())
}

/// Coreset size (weighted representative count).
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_coreset_size(h: *const ClustexClustering) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).result.coreset.len()
}

/// Total privacy budget spent by the pipeline.
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_budget_spent(h: *const ClustexClustering) -> f64 {
    if h.is_null() {
        return f64::NAN;
    }
    (*h).result.ledger.spent()
}

/// Copies the centers (row-major `k x dim`) into `buf`.
///
/// # Safety
/// `buf` must hold at least `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_centers(
    h: *const ClustexClustering,
    buf: *mut f64,
    buf_len: usize,
) -> ClustexStatus {
    if h.is_null() || buf.is_null() {
        return ClustexStatus::NullArgument;
    }
    let centers = &(*h).result.centers;
    let dim = centers.first().map_or(0, |c| c.dim());
    let need = centers.len() * dim;
    if buf_len < need {
        return ClustexStatus::BufferTooSmall;
    }
    let out = std::slice::from_raw_parts_mut(buf, need);
    for (i, c) in centers.iter().enumerate() {
        out[i * dim..(i + 1) * dim].copy_from_slice(c.coords());
    }
    ClustexStatus::Ok
}

/// Computes contrastive explanations for the given agent indices from the
/// released coreset; spends no additional privacy budget. Writes one value
/// per agent into `out_values`.
///
/// # Safety
/// `agents` must hold `count` indices below the dataset size; `out_values`
/// must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn clustex_explanations(
    h: *const ClustexClustering,
    agents: *const usize,
    count: usize,
    out_values: *mut f64,
) -> ClustexStatus {
    if h.is_null() || agents.is_null() || out_values.is_null() {
        return ClustexStatus::NullArgument;
    }
    let handle = &*h;
    let agent_ids = std::slice::from_raw_parts(agents, count);
    if agent_ids.iter().any(|&i| i >= handle.result.x_low.len()) {
        return ClustexStatus::InvalidArgument;
    }
    let requests: Vec<(usize, Point)> = agent_ids
        .iter()
        .map(|&i| (i, handle.result.x_low.points()[i].clone()))
        .collect();
    let run = catch_unwind(AssertUnwindSafe(|| {
        private_explanations(
            &handle.result.coreset,
            handle.result.cost_s_eps,
            &requests,
            handle.n,
            &handle.cfg,
        )
    }));
    let recs = match run {
        Ok(r) => r,
        Err(_) => return ClustexStatus::Internal,
    };
    let out = std::slice::from_raw_parts_mut(out_values, count);
    for (slot, rec) in out.iter_mut().zip(recs) {
        match rec {
            Ok(r) => *slot = r.explanation,
            Err(e) => return pipeline_error_status(&e),
        }
    }
    ClustexStatus::Ok
}

/// # Safety
/// `h` must come from [`clustex_private_clustering`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn clustex_clustering_destroy(h: *mut ClustexClustering) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
