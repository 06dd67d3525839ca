//! Dataset ingestion, synthetic data, the epsilon-grid experiment protocol,
//! and plot-ready CSV/JSON emission.

use crate::geom::{normalize_to_unit_ball, Dataset, GeomError, Point};
use crate::kmeans;
use crate::kmedian;
use crate::pipeline::{private_clustering, private_explanations, PipelineConfig, PipelineError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error at row {row}, column {column}")]
    Parse { row: usize, column: String },

    #[error("empty input")]
    EmptyInput,

    #[error(transparent)]
    Geom(#[from] GeomError),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Where experiment data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Csv { path: PathBuf, id_column: Option<String> },
    Synthetic { n: usize, d: usize },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub k: usize,
    pub p: u8,
    pub eps_grid: Vec<f64>,
    pub reps: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub beta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub lambda_p_alpha: f64,
    /// Reduced dimension; `None` keeps the data dimension.
    pub d_prime: Option<usize>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.reps < 1 {
            return Err(HarnessError::Config("reps must be >= 1".into()));
        }
        if self.eps_grid.is_empty() {
            return Err(HarnessError::Config("eps_grid must be nonempty".into()));
        }
        if !self.eps_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::Config("eps_grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// One emitted measurement row. Metric fields are `None` on per-rep failures.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub epsilon: f64,
    pub rep: usize,
    pub po: Option<f64>,
    pub ro: Option<f64>,
    pub mean_pc: Option<f64>,
    pub mean_rc: Option<f64>,
    pub ape: Option<f64>,
    pub ae: Option<f64>,
    pub error: Option<String>,
}

/// Per-agent values behind one row, kept so the aggregates can be re-derived.
#[derive(Debug, Clone, Serialize)]
pub struct RepDetail {
    pub epsilon: f64,
    pub rep: usize,
    /// `(agent index, private contrastive cost)`.
    pub pc: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentMetadata {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub p: u8,
    pub sample_size: usize,
    pub normalization_scale: f64,
    pub agents: Vec<usize>,
    pub ae_orientation: &'static str,
    pub note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutput {
    pub metadata: ExperimentMetadata,
    pub rows: Vec<MetricsRow>,
    /// Per-agent regular contrastive costs, shared by all rows.
    pub rc: Vec<(usize, f64)>,
    pub details: Vec<RepDetail>,
}

impl ExperimentOutput {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }
}

/// Parses a headered CSV of numeric coordinates (one point per row),
/// normalizes into the unit ball, and returns the dataset, per-row ids, and
/// the normalization scale.
pub fn ingest_csv(
    path: &Path,
    id_column: Option<&str>,
) -> Result<(Dataset, Vec<String>, f64), HarnessError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let id_idx = match id_column {
        None => None,
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| HarnessError::Config(format!("no column named {name}")))?,
        ),
    };

    let mut raw: Vec<Vec<f64>> = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = i + 1;
        let mut coords = Vec::new();
        for (col, field) in record.iter().enumerate() {
            if Some(col) == id_idx {
                continue;
            }
            let v: f64 = field.trim().parse().map_err(|_| HarnessError::Parse {
                row: row_no,
                column: headers.get(col).unwrap_or("?").to_string(),
            })?;
            coords.push(v);
        }
        ids.push(match id_idx {
            Some(c) => record.get(c).unwrap_or("").to_string(),
            None => row_no.to_string(),
        });
        raw.push(coords);
    }
    if raw.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let (ds, scale) = normalize_to_unit_ball(&raw)?;
    Ok((ds, ids, scale))
}

/// `n` points uniform on `[-1, 1]^d`, normalized into the unit ball.
pub fn synthetic_dataset<R: Rng>(n: usize, d: usize, rng: &mut R) -> Dataset {
    assert!(n >= 1);
    let raw: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let (ds, _) = normalize_to_unit_ball(&raw).expect("finite synthetic data");
    ds
}

/// Deterministic seed derivation (splitmix-style) for named sub-streams.
pub fn subseed(master: u64, tags: &[u64]) -> u64 {
    let mut z = master ^ 0x9e3779b97f4a7c15;
    for &t in tags {
        z ^= t.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(z << 6).wrapping_add(z >> 2);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

fn regular_clustering(
    points: &[Point],
    weights: &[f64],
    k: usize,
    p: u8,
    gamma: f64,
    fixed: Option<&Point>,
) -> Result<f64, HarnessError> {
    let cost = match p {
        1 => match fixed {
            Some(f) => kmedian::kmedian_fixed_center(points, weights, k, f)
                .map_err(PipelineError::from)?
                .cost,
            None => kmedian::kmedian(points, weights, k).map_err(PipelineError::from)?.cost,
        },
        _ => {
            let cand = kmeans::candidate_centers_capped(
                points,
                fixed,
                gamma,
                kmeans::DEFAULT_CANDIDATE_CAP,
            )
            .map_err(PipelineError::from)?;
            kmeans::kmeans_on_candidates(points, weights, k, &cand).cost
        }
    };
    Ok(cost)
}

/// Runs the full protocol: the non-private baselines once, then one private
/// clustering plus a batch of explanations per `(epsilon, rep)` cell.
///
/// The repeated private runs exist only to measure variance; a deployment
/// would run the private pipeline once.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;

    let (dataset, _ids, scale) = match &cfg.source {
        DataSource::Csv { path, id_column } => ingest_csv(path, id_column.as_deref())?,
        DataSource::Synthetic { n, d } => {
            let mut rng = ChaCha20Rng::seed_from_u64(subseed(cfg.seed, &[0]));
            (synthetic_dataset(*n, *d, &mut rng), Vec::new(), 1.0)
        }
    };
    let n = dataset.len();
    let d = dataset.dim();
    if cfg.k > n {
        return Err(HarnessError::Config(format!("k={} exceeds n={n}", cfg.k)));
    }
    if cfg.sample_size > n {
        return Err(HarnessError::Config(format!(
            "sample size {} exceeds n={n}",
            cfg.sample_size
        )));
    }
    let d_prime = cfg.d_prime.unwrap_or(d).min(d);

    // Sampled agents, uniform without replacement, in index order.
    let mut vs_rng = ChaCha20Rng::seed_from_u64(subseed(cfg.seed, &[1]));
    let mut agents: Vec<usize> =
        rand::seq::index::sample(&mut vs_rng, n, cfg.sample_size).into_vec();
    agents.sort_unstable();

    let unit_weights = vec![1.0; n];

    // Non-private baselines on the normalized data.
    let ro = regular_clustering(dataset.points(), &unit_weights, cfg.k, cfg.p, cfg.gamma, None)?;
    let rc: Vec<(usize, f64)> = agents
        .par_iter()
        .map(|&i| {
            let fixed = dataset.points()[i].clone();
            regular_clustering(dataset.points(), &unit_weights, cfg.k, cfg.p, cfg.gamma, Some(&fixed))
                .map(|c| (i, c))
        })
        .collect::<Result<_, _>>()?;
    let mean_rc = rc.iter().map(|(_, c)| c).sum::<f64>() / rc.len().max(1) as f64;
    let ae = mean_rc - ro;

    let cells: Vec<(usize, usize)> = (0..cfg.eps_grid.len())
        .flat_map(|e| (0..cfg.reps).map(move |r| (e, r)))
        .collect();

    let mut results: Vec<(MetricsRow, Option<RepDetail>)> = cells
        .par_iter()
        .map(|&(eps_idx, rep)| {
            let epsilon = cfg.eps_grid[eps_idx];
            let pcfg = PipelineConfig {
                k: cfg.k,
                p: cfg.p,
                epsilon,
                beta: cfg.beta,
                alpha: cfg.alpha,
                d_prime,
                lambda_p_alpha: cfg.lambda_p_alpha,
                gamma: cfg.gamma,
                seed: subseed(cfg.seed, &[2, eps_idx as u64, rep as u64]),
                noise_disabled: false,
            };
            match run_cell(&dataset, &pcfg, &agents, n) {
                Ok((po, pc)) => {
                    let mean_pc = pc.iter().map(|(_, c)| c).sum::<f64>() / pc.len().max(1) as f64;
                    let row = MetricsRow {
                        epsilon,
                        rep,
                        po: Some(po),
                        ro: Some(ro),
                        mean_pc: Some(mean_pc),
                        mean_rc: Some(mean_rc),
                        ape: Some(mean_pc - po),
                        ae: Some(ae),
                        error: None,
                    };
                    (row, Some(RepDetail { epsilon, rep, pc }))
                }
                Err(e) => {
                    let row = MetricsRow {
                        epsilon,
                        rep,
                        po: None,
                        ro: Some(ro),
                        mean_pc: None,
                        mean_rc: Some(mean_rc),
                        ape: None,
                        ae: Some(ae),
                        error: Some(e.to_string()),
                    };
                    (row, None)
                }
            }
        })
        .collect();

    // Deterministic emission order regardless of scheduling.
    results.sort_by(|a, b| {
        a.0.epsilon
            .partial_cmp(&b.0.epsilon)
            .unwrap()
            .then(a.0.rep.cmp(&b.0.rep))
    });

    let mut rows = Vec::with_capacity(results.len());
    let mut details = Vec::new();
    for (row, detail) in results {
        rows.push(row);
        if let Some(d) = detail {
            details.push(d);
        }
    }

    Ok(ExperimentOutput {
        metadata: ExperimentMetadata {
            seed: cfg.seed,
            n,
            d,
            k: cfg.k,
            p: cfg.p,
            sample_size: cfg.sample_size,
            normalization_scale: scale,
            agents,
            ae_orientation: "AE = mean(RC_i) - RO; APE = mean(PC_i) - PO",
            note: "repeated private runs are for evaluation only; \
                   repeated invocation in deployment would degrade the privacy guarantee",
        },
        rows,
        rc,
        details,
    })
}

fn run_cell(
    dataset: &Dataset,
    pcfg: &PipelineConfig,
    agents: &[usize],
    n: usize,
) -> Result<(f64, Vec<(usize, f64)>), PipelineError> {
    let res = private_clustering(dataset, pcfg)?;
    let requests: Vec<(usize, Point)> = agents
        .iter()
        .map(|&i| (i, res.x_low.points()[i].clone()))
        .collect();
    let recs = private_explanations(&res.coreset, res.cost_s_eps, &requests, n, pcfg);
    let mut pc = Vec::with_capacity(recs.len());
    for r in recs {
        let r = r?;
        pc.push((r.agent_index, r.cost_s_i_eps));
    }
    Ok((res.cost_s_eps, pc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes rows in the documented CSV or JSON layout (17 significant digits).
pub fn emit<W: Write>(
    out: &ExperimentOutput,
    format: EmitFormat,
    writer: &mut W,
) -> Result<(), HarnessError> {
    match format {
        EmitFormat::Csv => {
            writeln!(writer, "epsilon,rep,PO,RO,mean_PC,mean_RC,APE,AE")?;
            for r in &out.rows {
                writeln!(
                    writer,
                    "{},{},{},{},{},{},{},{}",
                    fmt_f64(r.epsilon),
                    r.rep,
                    fmt_opt(r.po),
                    fmt_opt(r.ro),
                    fmt_opt(r.mean_pc),
                    fmt_opt(r.mean_rc),
                    fmt_opt(r.ape),
                    fmt_opt(r.ae),
                )?;
            }
        }
        EmitFormat::Json => {
            let meta = serde_json::to_string(&out.metadata).expect("serializable metadata");
            writeln!(writer, "{{")?;
            writeln!(writer, "  \"metadata\": {meta},")?;
            writeln!(writer, "  \"rows\": [")?;
            for (i, r) in out.rows.iter().enumerate() {
                let sep = if i + 1 == out.rows.len() { "" } else { "," };
                let err = match &r.error {
                    Some(e) => serde_json::to_string(e).unwrap(),
                    None => "null".to_string(),
                };
                writeln!(
                    writer,
                    "    {{\"epsilon\": {}, \"rep\": {}, \"PO\": {}, \"RO\": {}, \
                     \"mean_PC\": {}, \"mean_RC\": {}, \"APE\": {}, \"AE\": {}, \"error\": {}}}{}",
                    fmt_f64(r.epsilon),
                    r.rep,
                    json_opt(r.po),
                    json_opt(r.ro),
                    json_opt(r.mean_pc),
                    json_opt(r.mean_rc),
                    json_opt(r.ape),
                    json_opt(r.ae),
                    err,
                    sep,
                )?;
            }
            writeln!(writer, "  ]")?;
            writeln!(writer, "}}")?;
        }
    }
    Ok(())
}

fn json_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_else(|| "null".to_string())
}

pub fn emit_to_path(
    out: &ExperimentOutput,
    format: EmitFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let mut f = std::fs::File::create(path)?;
    emit(out, format, &mut f)?;
    Ok(())
}

/// Spearman rank correlation (average ranks on ties).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mx) * (b - my);
        dx += (a - mx) * (a - mx);
        dy += (b - my) * (b - my);
    }
    if dx == 0.0 || dy == 0.0 {
        return 0.0;
    }
    num / (dx * dy).sqrt()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &ii in &idx[i..=j] {
            out[ii] = avg;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn synthetic_is_deterministic_and_in_ball() {
        let a = synthetic_dataset(100, 2, &mut ChaCha20Rng::seed_from_u64(7));
        let b = synthetic_dataset(100, 2, &mut ChaCha20Rng::seed_from_u64(7));
        assert_eq!(a.points(), b.points());
        assert_eq!(a.len(), 100);
        assert!(a.points().iter().all(|p| p.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn synthetic_coordinate_means_near_zero() {
        let ds = synthetic_dataset(10_000, 2, &mut ChaCha20Rng::seed_from_u64(3));
        for axis in 0..2 {
            let mean: f64 =
                ds.points().iter().map(|p| p.coords()[axis]).sum::<f64>() / ds.len() as f64;
            assert!(mean.abs() < 0.1, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn ingest_rejects_bad_cells_and_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.csv");
        std::fs::write(&good, "x,y\n1.0,2.0\n3.5,-1.25\n0.0,0.5\n").unwrap();
        let (ds, ids, _scale) = ingest_csv(&good, None).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.dim(), 2);
        assert!(ds.points().iter().all(|p| p.norm() <= 1.0 + 1e-9));
        assert_eq!(ids, vec!["1", "2", "3"]);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "x,y\n1.0,2.0\nfoo,3.0\n").unwrap();
        match ingest_csv(&bad, None) {
            Err(HarnessError::Parse { row, column }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "x");
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        let empty = dir.path().join("empty.csv");
        std::fs::write(&empty, "x,y\n").unwrap();
        assert!(matches!(ingest_csv(&empty, None), Err(HarnessError::EmptyInput)));
    }

    #[test]
    fn ingest_honors_id_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ids.csv");
        std::fs::write(&path, "id,x,y\nalpha,0.0,1.0\nbeta,2.0,3.0\n").unwrap();
        let (ds, ids, _) = ingest_csv(&path, Some("id")).unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ids, vec!["alpha", "beta"]);
    }

    fn tiny_experiment(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            source: DataSource::Synthetic { n: 12, d: 2 },
            k: 2,
            p: 1,
            eps_grid: vec![1.0, 4.0],
            reps: 2,
            sample_size: 3,
            seed,
            beta: 0.1,
            alpha: 1.0,
            gamma: 0.5,
            lambda_p_alpha: 1.0,
            d_prime: None,
        }
    }

    #[test]
    fn experiment_row_count_and_constants() {
        let out = run_experiment(&tiny_experiment(5)).unwrap();
        assert_eq!(out.rows.len(), 4);
        let ro = out.rows[0].ro.unwrap();
        assert!(out.rows.iter().all(|r| r.ro == Some(ro)));
        let ae = out.rows[0].ae.unwrap();
        assert!(out.rows.iter().all(|r| (r.ae.unwrap() - ae).abs() < 1e-15));
        // Aggregates recompute from per-agent records.
        for det in &out.details {
            let row = out
                .rows
                .iter()
                .find(|r| r.epsilon == det.epsilon && r.rep == det.rep)
                .unwrap();
            let mean_pc: f64 =
                det.pc.iter().map(|(_, c)| c).sum::<f64>() / det.pc.len() as f64;
            assert!((row.mean_pc.unwrap() - mean_pc).abs() < 1e-12);
            assert!((row.ape.unwrap() - (mean_pc - row.po.unwrap())).abs() < 1e-12);
        }
    }

    #[test]
    fn emit_csv_round_trips_bit_for_bit() {
        let out = run_experiment(&tiny_experiment(9)).unwrap();
        let mut buf = Vec::new();
        emit(&out, EmitFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "epsilon,rep,PO,RO,mean_PC,mean_RC,APE,AE");
        for (line, row) in lines.zip(&out.rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            let back: f64 = fields[2].parse().unwrap();
            assert_eq!(back.to_bits(), row.po.unwrap().to_bits());
            let back: f64 = fields[7].parse().unwrap();
            assert_eq!(back.to_bits(), row.ae.unwrap().to_bits());
        }
    }

    #[test]
    fn emit_json_is_valid_and_mirrors_fields() {
        let out = run_experiment(&tiny_experiment(9)).unwrap();
        let mut buf = Vec::new();
        emit(&out, EmitFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v["metadata"]["note"].as_str().unwrap().contains("evaluation only"));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), out.rows.len());
        for (jr, row) in rows.iter().zip(&out.rows) {
            assert_eq!(jr["PO"].as_f64().unwrap().to_bits(), row.po.unwrap().to_bits());
            assert_eq!(jr["rep"].as_u64().unwrap() as usize, row.rep);
        }
    }

    #[test]
    fn experiment_is_byte_deterministic() {
        let a = run_experiment(&tiny_experiment(11)).unwrap();
        let b = run_experiment(&tiny_experiment(11)).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        emit(&a, EmitFormat::Csv, &mut ba).unwrap();
        emit(&b, EmitFormat::Csv, &mut bb).unwrap();
        assert_eq!(ba, bb);
    }

    #[test]
    fn error_rows_emit_empty_metrics() {
        let mut out = run_experiment(&tiny_experiment(2)).unwrap();
        out.rows[1] = MetricsRow {
            epsilon: out.rows[1].epsilon,
            rep: out.rows[1].rep,
            po: None,
            ro: out.rows[1].ro,
            mean_pc: None,
            mean_rc: out.rows[1].mean_rc,
            ape: None,
            ae: out.rows[1].ae,
            error: Some("solver failure".into()),
        };
        assert!(out.has_errors());
        let mut buf = Vec::new();
        emit(&out, EmitFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let bad_line = text.lines().nth(2).unwrap();
        let fields: Vec<&str> = bad_line.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert!(fields[2].is_empty() && fields[4].is_empty() && fields[6].is_empty());

        let mut buf = Vec::new();
        emit(&out, EmitFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][1]["PO"], serde_json::Value::Null);
        assert_eq!(v["rows"][1]["error"], "solver failure");
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]), -1.0);
        let flat = spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]);
        assert_eq!(flat, 0.0);
    }

    #[test]
    fn single_row_csv_has_two_lines() {
        let mut cfg = tiny_experiment(1);
        cfg.eps_grid = vec![1.0];
        cfg.reps = 1;
        let out = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        emit(&out, EmitFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
