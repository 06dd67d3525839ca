//! Command-line front end: private clustering, per-agent explanations, the
//! epsilon-grid experiment protocol, and the brute-force oracle.

use clap::{Args, Parser, Subcommand};
use clustex::geom::{brute_force_opt, ClusteringParams, Dataset, Point};
use clustex::harness::{
    emit, ingest_csv, run_experiment, subseed, synthetic_dataset, DataSource, EmitFormat,
    ExperimentConfig,
};
use clustex::pipeline::{private_clustering, private_explanations, PipelineConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "clustex",
    version,
    about = "Differentially private clustering with contrastive explanations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Input CSV of coordinates (header row required). Omit for synthetic data.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Name of a non-coordinate id column in the input CSV.
    #[arg(long)]
    id_column: Option<String>,

    /// Synthetic dataset size used when --input is absent.
    #[arg(long, default_value_t = 100)]
    synthetic_n: usize,

    /// Synthetic dataset dimension used when --input is absent.
    #[arg(long, default_value_t = 2)]
    synthetic_d: usize,

    /// Number of centers.
    #[arg(long, default_value_t = 5)]
    k: usize,

    /// Cost exponent: 1 = k-median, 2 = k-means.
    #[arg(long, default_value_t = 1)]
    p: u8,

    /// Privacy budget.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,

    /// Failure probability of the reduction stage.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,

    /// Coreset accuracy parameter in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    /// Candidate-set granularity for p = 2.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,

    /// Reduced dimension (defaults to the data dimension).
    #[arg(long)]
    dprime: Option<usize>,

    /// Master seed; all randomness derives from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Disable all noise (test mode; output is NOT private).
    #[arg(long)]
    no_noise: bool,

    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run the private clustering pipeline and print centers, cost, and ledger.
    Cluster {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run private clustering, then release explanations for sampled agents.
    Explain {
        #[command(flatten)]
        common: CommonOpts,

        /// Number of agents sampled for explanations.
        #[arg(long, default_value_t = 100)]
        sample: usize,
    },
    /// Full epsilon-grid experiment emitting PO/RO/mean_PC/mean_RC/APE/AE rows.
    Experiment {
        #[command(flatten)]
        common: CommonOpts,

        /// Number of agents sampled for explanations.
        #[arg(long, default_value_t = 100)]
        sample: usize,

        /// Repetitions per epsilon.
        #[arg(long, default_value_t = 25)]
        reps: usize,

        /// Comma-separated strictly increasing epsilon grid.
        #[arg(long, default_value = "0.5,1,2,4", value_delimiter = ',')]
        eps_grid: Vec<f64>,
    },
    /// Exhaustive optimum over the input points (desk-scale only).
    Oracle {
        #[command(flatten)]
        common: CommonOpts,

        /// Pin a center at this input point index.
        #[arg(long)]
        fixed_index: Option<usize>,
    },
}

fn load_dataset(common: &CommonOpts) -> Result<(Dataset, f64), String> {
    match &common.input {
        Some(path) => {
            let (ds, _ids, scale) =
                ingest_csv(path, common.id_column.as_deref()).map_err(|e| e.to_string())?;
            Ok((ds, scale))
        }
        None => {
            let mut rng = ChaCha20Rng::seed_from_u64(subseed(common.seed, &[0]));
            Ok((synthetic_dataset(common.synthetic_n, common.synthetic_d, &mut rng), 1.0))
        }
    }
}

fn pipeline_config(common: &CommonOpts, d: usize) -> PipelineConfig {
    PipelineConfig {
        k: common.k,
        p: common.p,
        epsilon: common.epsilon,
        beta: common.beta,
        alpha: common.alpha,
        d_prime: common.dprime.unwrap_or(d).min(d),
        lambda_p_alpha: 1.0,
        gamma: common.gamma,
        seed: common.seed,
        noise_disabled: common.no_noise,
    }
}

fn write_output(common: &CommonOpts, text: &str) -> Result<(), String> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

fn banner_if_no_noise(common: &CommonOpts) {
    if common.no_noise {
        eprintln!("================ NON-PRIVATE MODE ================");
        eprintln!("noise disabled: outputs carry no privacy guarantee");
        eprintln!("==================================================");
    }
}

fn centers_json(centers: &[Point]) -> String {
    let rows: Vec<String> = centers
        .iter()
        .map(|c| {
            let cs: Vec<String> = c.coords().iter().map(|v| format!("{v:.16e}")).collect();
            format!("[{}]", cs.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Cluster { common } => {
            banner_if_no_noise(&common);
            let (ds, scale) = load_dataset(&common)?;
            let cfg = pipeline_config(&common, ds.dim());
            let res = private_clustering(&ds, &cfg).map_err(|e| e.to_string())?;
            let ledger = serde_json::to_string(&res.ledger).unwrap();
            let text = format!(
                "{{\n  \"cost\": {:.16e},\n  \"normalization_scale\": {:.16e},\n  \
                 \"coreset_size\": {},\n  \"centers\": {},\n  \"ledger\": {}\n}}\n",
                res.cost_s_eps,
                scale,
                res.coreset.len(),
                centers_json(&res.centers),
                ledger,
            );
            write_output(&common, &text)?;
            Ok(false)
        }
        Command::Explain { common, sample } => {
            banner_if_no_noise(&common);
            let (ds, _scale) = load_dataset(&common)?;
            let cfg = pipeline_config(&common, ds.dim());
            let res = private_clustering(&ds, &cfg).map_err(|e| e.to_string())?;
            let mut rng = ChaCha20Rng::seed_from_u64(subseed(common.seed, &[1]));
            let mut agents: Vec<usize> =
                rand::seq::index::sample(&mut rng, ds.len(), sample.min(ds.len())).into_vec();
            agents.sort_unstable();
            let requests: Vec<(usize, Point)> = agents
                .iter()
                .map(|&i| (i, res.x_low.points()[i].clone()))
                .collect();
            let recs =
                private_explanations(&res.coreset, res.cost_s_eps, &requests, ds.len(), &cfg);
            let mut had_error = false;
            let mut lines = Vec::new();
            for r in recs {
                match r {
                    Ok(rec) => lines.push(format!(
                        "    {{\"agent\": {}, \"cost_fixed\": {:.16e}, \"explanation\": {:.16e}}}",
                        rec.agent_index, rec.cost_s_i_eps, rec.explanation
                    )),
                    Err(e) => {
                        had_error = true;
                        let msg = serde_json::to_string(&e.to_string()).unwrap();
                        lines.push(format!("    {{\"error\": {msg}}}"));
                    }
                }
            }
            let text = format!(
                "{{\n  \"cost\": {:.16e},\n  \"explanations\": [\n{}\n  ]\n}}\n",
                res.cost_s_eps,
                lines.join(",\n")
            );
            write_output(&common, &text)?;
            Ok(had_error)
        }
        Command::Experiment { common, sample, reps, eps_grid } => {
            banner_if_no_noise(&common);
            if common.no_noise {
                return Err("experiment measures the private pipeline; drop --no-noise".into());
            }
            let source = match &common.input {
                Some(path) => DataSource::Csv {
                    path: path.clone(),
                    id_column: common.id_column.clone(),
                },
                None => DataSource::Synthetic { n: common.synthetic_n, d: common.synthetic_d },
            };
            let cfg = ExperimentConfig {
                source,
                k: common.k,
                p: common.p,
                eps_grid,
                reps,
                sample_size: sample,
                seed: common.seed,
                beta: common.beta,
                alpha: common.alpha,
                gamma: common.gamma,
                lambda_p_alpha: 1.0,
                d_prime: common.dprime,
            };
            let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let format = match common.format.as_str() {
                "csv" => EmitFormat::Csv,
                "json" => EmitFormat::Json,
                other => return Err(format!("unknown format {other}")),
            };
            let mut buf = Vec::new();
            emit(&out, format, &mut buf).map_err(|e| e.to_string())?;
            write_output(&common, &String::from_utf8(buf).unwrap())?;
            Ok(out.has_errors())
        }
        Command::Oracle { common, fixed_index } => {
            let (ds, _scale) = load_dataset(&common)?;
            let fixed = fixed_index.map(|i| ds.points()[i].clone());
            let got = brute_force_opt(
                ds.points(),
                None,
                ds.points(),
                ClusteringParams::new(common.k, common.p),
                fixed.as_ref(),
            )
            .map_err(|e| e.to_string())?;
            let text = format!(
                "{{\n  \"cost\": {:.16e},\n  \"centers\": {}\n}}\n",
                got.cost,
                centers_json(&got.centers)
            );
            write_output(&common, &text)?;
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run() {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
