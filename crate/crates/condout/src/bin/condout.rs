//! Command-line front end: dataset inspection, model training, label-noise
//! injection, scoring, evaluation, and the two end-to-end experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use condout::config::{default_methods, parse_method, RunConfig};
use condout::experiment::{
    load_dataset, metrics_from, run_experiment1, run_experiment2, save_dataset,
};
use condout::report::{metric_table, stats_block, MetricKind};
use condout::{csvio, persist, synth, AppError, AppResult};
use condout_core::dataset::{split_half, Dataset};
use condout_core::dbr::{compute_rho, train_dbr, LambdaPolicy, Structure};
use condout_core::eval::EvalReport;
use condout_core::inject::{inject_instance_noise, inject_variable_noise};
use condout_core::rng::{derive_seed, rng_from_seed};
use condout_core::scoring::{
    baseline_joint_scores, percentile_rank, score_comp, score_lof, score_lr, score_ocsvm,
    score_rd, JointMethod, JointParams, Method, RdConfig,
};

#[derive(Parser)]
#[command(
    name = "condout",
    version,
    about = "Conditional outlier detection for multi-label data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset statistics.
    Info {
        /// Dataset file (.arff or .csv, labels last).
        #[arg(long)]
        data: PathBuf,
        /// Number of trailing label attributes.
        #[arg(long)]
        labels: usize,
    },
    /// Generate a bundled synthetic dataset.
    Gen {
        /// Preset name: genbase-like, medical-like, or sweep-synth.
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 13)]
        seed: u64,
        /// Output file (.arff or .csv).
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a per-label model and save it.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        labels: usize,
        /// DBR conditions each label on the others; BR does not.
        #[arg(long, default_value = "DBR")]
        structure: String,
        /// Fixed L2 strength, used when no grid is given.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Comma-separated L2 grid searched by cross-validation.
        #[arg(long, default_value = "")]
        lambda_grid: String,
        #[arg(long, default_value_t = 5)]
        cv_folds: usize,
        #[arg(long, default_value_t = 13)]
        seed: u64,
        /// Model output path.
        #[arg(long)]
        model: PathBuf,
    },
    /// Flip label bits to create ground-truth outliers.
    Inject {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        labels: usize,
        /// "variable" flips a fraction of all cells; "instance" flips p
        /// dimensions in a fraction of instances.
        #[arg(long, default_value = "variable")]
        protocol: String,
        #[arg(long, default_value_t = 0.005)]
        rate: f64,
        /// Dimensions flipped per outlier (instance protocol).
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 13)]
        seed: u64,
        /// Perturbed dataset output (.arff or .csv).
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth audit CSV output.
        #[arg(long)]
        audit: Option<PathBuf>,
    },
    /// Score a dataset with a trained model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        labels: usize,
        /// Comma-separated methods; defaults to all eight.
        #[arg(long, default_value = "")]
        methods: String,
        /// Clean reference data, required by OCSVM and the joint baselines.
        #[arg(long)]
        fit_data: Option<PathBuf>,
        /// Injection audit used to fill the outlier column.
        #[arg(long)]
        audit: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        k: usize,
        #[arg(long, default_value_t = 0.01)]
        nu: f64,
        /// RBF kernel width; omitted means the median heuristic.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 500)]
        rd_starts: usize,
        #[arg(long, default_value_t = 500)]
        joint_rd_starts: usize,
        #[arg(long, default_value_t = 13)]
        seed: u64,
        /// Score table CSV output.
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate score tables (one per fold) into a comparison report.
    Evaluate {
        /// Score table CSVs written by `score` or the experiment runners.
        #[arg(required = true)]
        scores: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Run the cell-flip injection experiment end to end.
    Exp1 {
        /// key=value run configuration file.
        #[arg(long)]
        config: PathBuf,
        /// key=value overrides applied after the file.
        #[arg(short = 's', long = "set")]
        set: Vec<String>,
    },
    /// Run the outlying-dimension sweep experiment end to end.
    Exp2 {
        #[arg(long)]
        config: PathBuf,
        #[arg(short = 's', long = "set")]
        set: Vec<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> AppResult<()> {
    match command {
        Command::Info { data, labels } => {
            let ds = load_dataset(&data, labels)?;
            print!("{}", stats_block(&ds));
            Ok(())
        }
        Command::Gen { preset, seed, out } => {
            let spec = synth::SynthSpec::by_name(&preset).ok_or_else(|| {
                AppError::config(format!(
                    "unknown preset '{}' (use genbase-like, medical-like, or sweep-synth)",
                    preset
                ))
            })?;
            let ds = synth::make_synthetic(&spec, seed)?;
            save_dataset(&out, &ds)?;
            print!("{}", stats_block(&ds));
            Ok(())
        }
        Command::Train {
            data,
            labels,
            structure,
            lambda,
            lambda_grid,
            cv_folds,
            seed,
            model,
        } => {
            let ds = load_dataset(&data, labels)?;
            let structure = parse_structure(&structure)?;
            let policy = parse_policy(lambda, &lambda_grid, cv_folds)?;
            let trained = train_dbr(&ds, structure, &policy, seed)?;
            persist::save_model(&model, &trained)?;
            println!(
                "trained {} on {} instances: {} labels, {} features, {} parameters",
                structure.as_str(),
                ds.n_instances(),
                ds.n_labels(),
                ds.n_features(),
                trained.n_parameters()
            );
            Ok(())
        }
        Command::Inject {
            data,
            labels,
            protocol,
            rate,
            p,
            seed,
            out,
            audit,
        } => {
            let ds = load_dataset(&data, labels)?;
            let (noisy, report) = match protocol.as_str() {
                "variable" => inject_variable_noise(&ds, rate, seed)?,
                "instance" => inject_instance_noise(&ds, rate, p, seed)?,
                other => {
                    return Err(AppError::config(format!(
                        "unknown protocol '{}' (use variable or instance)",
                        other
                    )))
                }
            };
            save_dataset(&out, &noisy)?;
            if let Some(audit) = audit {
                csvio::write_injection_audit(&audit, &report, ds.labels())?;
            }
            println!(
                "flipped {} cells across {} outlier instances ({} protocol)",
                report.flipped_cells.len(),
                report.n_outliers(),
                report.protocol.as_str()
            );
            Ok(())
        }
        Command::Score {
            model,
            data,
            labels,
            methods,
            fit_data,
            audit,
            k,
            nu,
            gamma,
            rd_starts,
            joint_rd_starts,
            seed,
            out,
        } => {
            let trained = persist::load_model(&model)?;
            let ds = load_dataset(&data, labels)?;
            let methods = parse_methods(&methods)?;
            let fit = fit_data
                .map(|path| load_dataset(&path, labels))
                .transpose()?;
            score_command(
                &trained, &ds, &methods, fit.as_ref(), audit.as_deref(), k, nu, gamma, rd_starts,
                joint_rd_starts, seed, &out,
            )
        }
        Command::Evaluate { scores, alpha } => {
            let report = evaluate_tables(&scores, alpha)?;
            println!("area under the ROC curve");
            println!("{}", metric_table(&report, MetricKind::Auc));
            println!("area under the precision-recall curve");
            print!("{}", metric_table(&report, MetricKind::AucPr));
            Ok(())
        }
        Command::Exp1 { config, set } => {
            let cfg = RunConfig::load(&config, &set)?;
            let outcome = run_experiment1(&cfg)?;
            println!("{}", metric_table(&outcome.report, MetricKind::Auc));
            println!("artifacts in {}", outcome.outdir.display());
            Ok(())
        }
        Command::Exp2 { config, set } => {
            let cfg = RunConfig::load(&config, &set)?;
            let outcome = run_experiment2(&cfg)?;
            for (p, report) in &outcome.per_p {
                println!("p = {}", p);
                println!("{}", metric_table(report, MetricKind::AucPr));
            }
            println!("artifacts in {}", outcome.outdir.display());
            Ok(())
        }
    }
}

fn parse_structure(s: &str) -> AppResult<Structure> {
    match s.to_ascii_uppercase().as_str() {
        "DBR" => Ok(Structure::Dbr),
        "BR" => Ok(Structure::Br),
        other => Err(AppError::config(format!(
            "unknown structure '{}' (use DBR or BR)",
            other
        ))),
    }
}

fn parse_policy(lambda: f64, grid: &str, cv_folds: usize) -> AppResult<LambdaPolicy> {
    let grid: Vec<f64> = grid
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| AppError::config(format!("bad lambda grid entry '{}'", t)))
        })
        .collect::<AppResult<_>>()?;
    Ok(if grid.is_empty() {
        LambdaPolicy::Fixed(lambda)
    } else {
        LambdaPolicy::CrossValidated {
            grid,
            folds: cv_folds,
        }
    })
}

fn parse_methods(s: &str) -> AppResult<Vec<Method>> {
    let trimmed: Vec<&str> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if trimmed.is_empty() {
        return Ok(default_methods());
    }
    trimmed
        .into_iter()
        .map(|t| parse_method(t).ok_or_else(|| AppError::config(format!("unknown method '{}'", t))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn score_command(
    model: &condout_core::dbr::DbrModel,
    ds: &Dataset,
    methods: &[Method],
    fit: Option<&Dataset>,
    audit: Option<&std::path::Path>,
    k: usize,
    nu: f64,
    gamma: Option<f64>,
    rd_starts: usize,
    joint_rd_starts: usize,
    seed: u64,
    out: &std::path::Path,
) -> AppResult<()> {
    let rho_test = compute_rho(model, ds)?;
    let needs_fit = |m: &Method| m.is_baseline() || *m == Method::Ocsvm;
    if fit.is_none() {
        if let Some(m) = methods.iter().find(|m| needs_fit(m)) {
            return Err(AppError::config(format!(
                "{} needs --fit-data (clean reference instances)",
                m.name()
            )));
        }
    }
    // OCSVM trains on half of the reference data, mirroring the experiment
    // pipeline's holdout so a shared fit file does not leak into the model.
    let rho_fit = match fit {
        Some(f) if methods.iter().any(|m| *m == Method::Ocsvm) => {
            let all: Vec<usize> = (0..f.n_instances()).collect();
            let (_, idx_b) = split_half(&all, &mut rng_from_seed(derive_seed(seed, 0x0b)));
            Some(compute_rho(model, &f.select(&idx_b)?)?)
        }
        _ => None,
    };

    let mut scores = Vec::with_capacity(methods.len());
    for method in methods {
        let sv = match method {
            Method::Comp => score_comp(model, ds)?,
            Method::Rd => score_rd(
                &rho_test,
                &RdConfig {
                    h: None,
                    n_starts: rd_starts,
                    seed: derive_seed(seed, 0x07),
                    use_plain_mean: false,
                },
            )?,
            Method::Lr(order) => score_lr(&rho_test, *order)?,
            Method::Lof => score_lof(&rho_test, k)?,
            Method::Ocsvm => score_ocsvm(rho_fit.as_ref().unwrap(), &rho_test, nu, gamma)?,
            Method::BaseRd | Method::BaseLof | Method::BaseOcsvm => {
                let joint = JointParams {
                    standardize: true,
                    rd: RdConfig {
                        h: None,
                        n_starts: joint_rd_starts,
                        seed: derive_seed(seed, 0x08),
                        use_plain_mean: false,
                    },
                    k,
                    nu,
                    gamma,
                };
                let jm = match method {
                    Method::BaseRd => JointMethod::Rd,
                    Method::BaseLof => JointMethod::Lof,
                    _ => JointMethod::Ocsvm,
                };
                baseline_joint_scores(fit.unwrap(), ds, jm, &joint)?
            }
        };
        let ranks = percentile_rank(&sv).ranks;
        scores.push((sv, ranks));
    }

    let mut truth = vec![0u8; ds.n_instances()];
    if let Some(audit) = audit {
        for id in csvio::read_audit_instances(audit)? {
            if id >= truth.len() {
                return Err(AppError::config(format!(
                    "audit instance {} is out of range for {} rows",
                    id,
                    truth.len()
                )));
            }
            truth[id] = 1;
        }
    }
    let ids: Vec<usize> = (0..ds.n_instances()).collect();
    csvio::write_score_table(out, &ids, &truth, &scores)?;
    println!("wrote {} scores for {} methods to {}", ds.n_instances(), scores.len(), out.display());
    Ok(())
}

fn evaluate_tables(paths: &[PathBuf], alpha: f64) -> AppResult<EvalReport> {
    let mut methods: Option<Vec<String>> = None;
    let mut auc_folds: Vec<Vec<Option<f64>>> = Vec::new();
    let mut pr_folds: Vec<Vec<Option<f64>>> = Vec::new();
    for path in paths {
        let table = csvio::read_score_table(path)?;
        match &methods {
            None => {
                methods = Some(table.methods.clone());
                auc_folds = vec![Vec::new(); table.methods.len()];
                pr_folds = vec![Vec::new(); table.methods.len()];
            }
            Some(m) if *m != table.methods => {
                return Err(AppError::config(format!(
                    "{} holds methods {:?}, expected {:?}",
                    path.display(),
                    table.methods,
                    m
                )));
            }
            _ => {}
        }
        let (auc, pr) = metrics_from(&table.scores, &table.truth);
        for (col, v) in auc_folds.iter_mut().zip(auc) {
            col.push(v);
        }
        for (col, v) in pr_folds.iter_mut().zip(pr) {
            col.push(v);
        }
    }
    let methods = methods.ok_or_else(|| AppError::config("no score tables given"))?;
    Ok(EvalReport::from_folds(methods, auc_folds, pr_folds, alpha)?)
}
