//! The two injection experiments: cross-validated fold pipelines with
//! deterministic seeding, per-fold CSV artifacts, and fold-level resume.
//!
//! Per fold: train the label model on a clean half of the training data,
//! transform the held-out half (for the one-class SVM) and the test fold
//! into probability space, bootstrap the test fold up to the configured
//! size, inject synthetic label noise, score with every configured method,
//! and evaluate against the injection ground truth.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use condout_core::dataset::{bootstrap_sample, make_fold_plan, split_half, Dataset};
use condout_core::dbr::{compute_rho, train_dbr, DbrModel, LambdaPolicy, RhoMatrix};
use condout_core::error::Error as CoreError;
use condout_core::eval::{pr_auc, roc_auc, EvalReport};
use condout_core::inject::{inject_instance_noise, inject_variable_noise, InjectionReport};
use condout_core::rng::{derive_seed, rng_from_seed};
use condout_core::scoring::{
    baseline_joint_scores, percentile_rank, score_comp, score_lof, score_lr, score_ocsvm,
    score_rd, JointMethod, JointParams, Method, RdConfig, ScoreVector,
};
use log::{info, warn};

use crate::config::{ProtocolKind, RunConfig};
use crate::csvio::{read_score_table, write_injection_audit, write_score_table};
use crate::error::{AppError, AppResult};
use crate::report::{metric_table, stats_block, write_method_bars, write_sweep_curve, MetricKind};
use crate::{arff, csvio};

// Purpose tags for per-fold seed derivation.
const TAG_PLAN: u64 = 0x01;
const TAG_FOLD: u64 = 0x02;
const TAG_BOOTSTRAP: u64 = 0x03;
const TAG_INJECT: u64 = 0x04;
const TAG_SPLIT: u64 = 0x05;
const TAG_TRAIN: u64 = 0x06;
const TAG_RHO_MCD: u64 = 0x07;
const TAG_JOINT_MCD: u64 = 0x08;

/// Load a dataset by file extension (`.arff` or `.csv`).
pub fn load_dataset(path: impl AsRef<Path>, d: usize) -> AppResult<Dataset> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("arff") => arff::load_arff(path, d),
        Some("csv") => csvio::load_csv(path, d),
        other => Err(AppError::config(format!(
            "cannot infer format of {} (extension {:?}); use .arff or .csv",
            path.display(),
            other
        ))),
    }
}

/// Save a dataset by file extension (`.arff` or `.csv`).
pub fn save_dataset(path: impl AsRef<Path>, ds: &Dataset) -> AppResult<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("arff") => arff::save_arff(path, ds),
        Some("csv") => csvio::save_csv(path, ds),
        other => Err(AppError::config(format!(
            "cannot infer format of {} (extension {:?}); use .arff or .csv",
            path.display(),
            other
        ))),
    }
}

/// Exactly one fold of one repeat (and one sweep point, for the dimension
/// sweep experiment).
#[derive(Debug, Clone)]
pub struct FoldRow {
    pub repeat: usize,
    pub fold: usize,
    pub p: Option<usize>,
    pub auc: Vec<Option<f64>>,
    pub auc_pr: Vec<Option<f64>>,
    pub resumed: bool,
}

#[derive(Debug)]
pub struct Exp1Outcome {
    pub report: EvalReport,
    pub rows: Vec<FoldRow>,
    pub outdir: PathBuf,
}

#[derive(Debug)]
pub struct Exp2Outcome {
    /// One aggregate per swept p, in sweep order.
    pub per_p: Vec<(usize, EvalReport)>,
    pub rows: Vec<FoldRow>,
    pub outdir: PathBuf,
}

#[derive(Debug, Clone, Copy)]
enum InjectionPlan {
    /// Cell-level flips (or instance-level single-dimension flips when the
    /// alternative interpretation is selected).
    Variable { rate: f64, per_instance: bool },
    /// Fixed number of flipped dimensions per outlier instance.
    Instance { rate: f64, p: usize },
}

fn method_names(methods: &[Method]) -> Vec<String> {
    methods.iter().map(|m| m.name().to_string()).collect()
}

fn ensure_dir(path: &Path) -> AppResult<()> {
    fs::create_dir_all(path).map_err(|e| AppError::io(path, e))
}

fn write_atomic(path: &Path, write: impl FnOnce(&Path) -> AppResult<()>) -> AppResult<()> {
    let tmp = path.with_extension("tmp");
    write(&tmp)?;
    fs::rename(&tmp, path).map_err(|e| AppError::io(path, e))
}

pub fn run_experiment1(cfg: &RunConfig) -> AppResult<Exp1Outcome> {
    cfg.validate()?;
    if cfg.protocol != ProtocolKind::Exp1 {
        return Err(AppError::config("run_experiment1 needs protocol=exp1"));
    }
    let ds = load_dataset(&cfg.dataset, cfg.d)?;
    ensure_dir(&cfg.outdir)?;
    fs::write(cfg.outdir.join("config.txt"), cfg.resolved_text())
        .map_err(|e| AppError::io(&cfg.outdir, e))?;
    fs::write(cfg.outdir.join("dataset.txt"), stats_block(&ds))
        .map_err(|e| AppError::io(&cfg.outdir, e))?;

    let injection = InjectionPlan::Variable {
        rate: cfg.rate,
        per_instance: cfg.per_instance,
    };
    let rows = run_folds(&ds, cfg, injection, &cfg.outdir, None)?;
    let report = aggregate(cfg, &rows)?;

    write_atomic(&cfg.outdir.join("summary.csv"), |p| write_summary(p, cfg, &rows))?;
    write_atomic(&cfg.outdir.join("fold_auc.csv"), |p| write_method_bars(p, &report))?;
    let text = format!(
        "detection quality across {} folds ({} repeats x {} folds)\n\n{}",
        rows.len(),
        cfg.repeats,
        cfg.folds,
        metric_table(&report, MetricKind::Auc)
    );
    fs::write(cfg.outdir.join("report.txt"), text).map_err(|e| AppError::io(&cfg.outdir, e))?;
    Ok(Exp1Outcome {
        report,
        rows,
        outdir: cfg.outdir.clone(),
    })
}

pub fn run_experiment2(cfg: &RunConfig) -> AppResult<Exp2Outcome> {
    cfg.validate()?;
    if cfg.protocol != ProtocolKind::Exp2 {
        return Err(AppError::config("run_experiment2 needs protocol=exp2"));
    }
    let ds = load_dataset(&cfg.dataset, cfg.d)?;
    ensure_dir(&cfg.outdir)?;
    fs::write(cfg.outdir.join("config.txt"), cfg.resolved_text())
        .map_err(|e| AppError::io(&cfg.outdir, e))?;
    fs::write(cfg.outdir.join("dataset.txt"), stats_block(&ds))
        .map_err(|e| AppError::io(&cfg.outdir, e))?;

    let mut per_p = Vec::new();
    let mut all_rows = Vec::new();
    for &p in &cfg.p_list {
        let subdir = cfg.outdir.join(format!("p{}", p));
        let injection = InjectionPlan::Instance {
            rate: cfg.instance_rate,
            p,
        };
        let rows = run_folds(&ds, cfg, injection, &subdir, Some(p))?;
        let report = aggregate(cfg, &rows)?;
        write_atomic(&subdir.join("summary.csv"), |path| write_summary(path, cfg, &rows))?;
        let text = format!("p = {}\n\n{}", p, metric_table(&report, MetricKind::AucPr));
        fs::write(subdir.join("report.txt"), text).map_err(|e| AppError::io(&subdir, e))?;
        per_p.push((p, report));
        all_rows.extend(rows);
    }
    write_atomic(&cfg.outdir.join("curve.csv"), |path| write_sweep_curve(path, &per_p))?;
    let mut text = String::new();
    for (p, report) in &per_p {
        text.push_str(&format!("p = {}\n\n{}\n", p, metric_table(report, MetricKind::AucPr)));
    }
    fs::write(cfg.outdir.join("report.txt"), text).map_err(|e| AppError::io(&cfg.outdir, e))?;
    Ok(Exp2Outcome {
        per_p,
        rows: all_rows,
        outdir: cfg.outdir.clone(),
    })
}

fn run_folds(
    ds: &Dataset,
    cfg: &RunConfig,
    injection: InjectionPlan,
    outdir: &Path,
    p: Option<usize>,
) -> AppResult<Vec<FoldRow>> {
    let folds_dir = outdir.join("folds");
    ensure_dir(&folds_dir)?;
    let mut rows = Vec::with_capacity(cfg.repeats * cfg.folds);
    for rep in 0..cfg.repeats {
        let plan_seed = derive_seed(derive_seed(cfg.seed, TAG_PLAN), rep as u64);
        let plan = make_fold_plan(ds.n_instances(), cfg.folds, &mut rng_from_seed(plan_seed))?;
        for fold in 0..cfg.folds {
            let started = Instant::now();
            let fold_seed = derive_seed(
                derive_seed(cfg.seed, TAG_FOLD),
                (rep * cfg.folds + fold) as u64,
            );
            let row = run_or_resume_fold(
                ds,
                cfg,
                injection,
                &folds_dir,
                plan.test_indices(fold),
                &plan.train_indices(fold),
                rep,
                fold,
                p,
                fold_seed,
            )?;
            info!(
                "{}repeat {} fold {} {} in {:.1?}",
                p.map(|v| format!("p={} ", v)).unwrap_or_default(),
                rep,
                fold,
                if row.resumed { "resumed" } else { "computed" },
                started.elapsed()
            );
            rows.push(row);
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn run_or_resume_fold(
    ds: &Dataset,
    cfg: &RunConfig,
    injection: InjectionPlan,
    folds_dir: &Path,
    test_idx: &[usize],
    train_idx: &[usize],
    rep: usize,
    fold: usize,
    p: Option<usize>,
    fold_seed: u64,
) -> AppResult<FoldRow> {
    let scores_path = folds_dir.join(format!("scores_r{}_f{}.csv", rep, fold));
    let names = method_names(&cfg.methods);
    if scores_path.exists() {
        let table = read_score_table(&scores_path)?;
        if table.methods != names {
            return Err(AppError::config(format!(
                "{} holds methods {:?}, but the run is configured for {:?}; clear the output directory",
                scores_path.display(),
                table.methods,
                names
            )));
        }
        let (auc, auc_pr) = metrics_from(&table.scores, &table.truth);
        return Ok(FoldRow {
            repeat: rep,
            fold,
            p,
            auc,
            auc_pr,
            resumed: true,
        });
    }

    let train = ds.select(train_idx)?;
    let test_clean = ds.select(test_idx)?;
    let test_clean = if cfg.bootstrap > 0 && test_clean.n_instances() < cfg.bootstrap {
        let mut rng = rng_from_seed(derive_seed(fold_seed, TAG_BOOTSTRAP));
        let draw = bootstrap_sample(test_clean.n_instances(), cfg.bootstrap, &mut rng)?;
        test_clean.select(&draw)?
    } else {
        test_clean
    };

    let inject_seed = derive_seed(fold_seed, TAG_INJECT);
    let (test, inj): (Dataset, InjectionReport) = match injection {
        InjectionPlan::Variable { rate, per_instance } => {
            if per_instance {
                inject_instance_noise(&test_clean, rate, 1, inject_seed)?
            } else {
                inject_variable_noise(&test_clean, rate, inject_seed)?
            }
        }
        InjectionPlan::Instance { rate, p } => {
            inject_instance_noise(&test_clean, rate, p, inject_seed)?
        }
    };
    write_atomic(&folds_dir.join(format!("audit_r{}_f{}.csv", rep, fold)), |path| {
        write_injection_audit(path, &inj, test_clean.labels())
    })?;

    // Model training on a clean half; the other half feeds the one-class SVM.
    let all: Vec<usize> = (0..train.n_instances()).collect();
    let mut split_rng = rng_from_seed(derive_seed(fold_seed, TAG_SPLIT));
    let (idx_a, idx_b) = split_half(&all, &mut split_rng);
    let half_a = train.select(&idx_a)?;
    let half_b = train.select(&idx_b)?;
    let policy = if cfg.lambda_grid.is_empty() {
        LambdaPolicy::Fixed(cfg.lambda)
    } else {
        LambdaPolicy::CrossValidated {
            grid: cfg.lambda_grid.clone(),
            folds: cfg.cv_folds,
        }
    };
    let model = train_dbr(&half_a, cfg.structure, &policy, derive_seed(fold_seed, TAG_TRAIN))?;
    let rho_b = compute_rho(&model, &half_b)?;
    let rho_test = compute_rho(&model, &test)?;

    let mut scores: Vec<(ScoreVector, Vec<f64>)> = Vec::with_capacity(cfg.methods.len());
    for method in &cfg.methods {
        let sv = compute_score(cfg, *method, &model, &train, &test, &rho_b, &rho_test, fold_seed)?;
        if let Some(note) = &sv.note {
            warn!("repeat {} fold {} {}: {}", rep, fold, method.name(), note);
        }
        let ranks = percentile_rank(&sv).ranks;
        scores.push((sv, ranks));
    }

    let ids: Vec<usize> = (0..test.n_instances()).collect();
    write_atomic(&scores_path, |path| {
        write_score_table(path, &ids, &inj.outlier_mask, &scores)
    })?;

    let raw: Vec<Vec<f64>> = scores.iter().map(|(sv, _)| sv.values.clone()).collect();
    let (auc, auc_pr) = metrics_from(&raw, &inj.outlier_mask);
    Ok(FoldRow {
        repeat: rep,
        fold,
        p,
        auc,
        auc_pr,
        resumed: false,
    })
}

#[allow(clippy::too_many_arguments)]
fn compute_score(
    cfg: &RunConfig,
    method: Method,
    model: &DbrModel,
    train: &Dataset,
    test: &Dataset,
    rho_b: &RhoMatrix,
    rho_test: &RhoMatrix,
    fold_seed: u64,
) -> AppResult<ScoreVector> {
    let rho_rd = RdConfig {
        h: None,
        n_starts: cfg.rho_mcd_starts,
        seed: derive_seed(fold_seed, TAG_RHO_MCD),
        use_plain_mean: cfg.rd_plain_mean,
    };
    let joint = JointParams {
        standardize: cfg.standardize_joint,
        rd: RdConfig {
            h: None,
            n_starts: cfg.joint_mcd_starts,
            seed: derive_seed(fold_seed, TAG_JOINT_MCD),
            use_plain_mean: cfg.rd_plain_mean,
        },
        k: cfg.k_lof,
        nu: cfg.nu,
        gamma: cfg.gamma,
    };
    let sv = match method {
        Method::Comp => score_comp(model, test)?,
        Method::Rd => score_rd(rho_test, &rho_rd)?,
        Method::Lr(order) => score_lr(rho_test, order)?,
        Method::Lof => score_lof(rho_test, cfg.k_lof)?,
        Method::Ocsvm => score_ocsvm(rho_b, rho_test, cfg.nu, cfg.gamma)?,
        Method::BaseRd => baseline_joint_scores(train, test, JointMethod::Rd, &joint)?,
        Method::BaseLof => baseline_joint_scores(train, test, JointMethod::Lof, &joint)?,
        Method::BaseOcsvm => baseline_joint_scores(train, test, JointMethod::Ocsvm, &joint)?,
    };
    Ok(sv)
}

/// AUC and AUC-PR per method; undefined metrics become missing cells.
pub fn metrics_from(scores: &[Vec<f64>], truth: &[u8]) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let mut auc = Vec::with_capacity(scores.len());
    let mut auc_pr = Vec::with_capacity(scores.len());
    for values in scores {
        auc.push(tolerate_undefined(roc_auc(values, truth)));
        auc_pr.push(tolerate_undefined(pr_auc(values, truth)));
    }
    (auc, auc_pr)
}

fn tolerate_undefined(result: Result<f64, CoreError>) -> Option<f64> {
    match result {
        Ok(v) => Some(v),
        Err(CoreError::UndefinedMetric(msg)) => {
            warn!("metric undefined: {}", msg);
            None
        }
        Err(e) => {
            warn!("metric failed: {}", e);
            None
        }
    }
}

fn aggregate(cfg: &RunConfig, rows: &[FoldRow]) -> AppResult<EvalReport> {
    let k = cfg.methods.len();
    let mut auc = vec![Vec::with_capacity(rows.len()); k];
    let mut pr = vec![Vec::with_capacity(rows.len()); k];
    for row in rows {
        for i in 0..k {
            auc[i].push(row.auc[i]);
            pr[i].push(row.auc_pr[i]);
        }
    }
    Ok(EvalReport::from_folds(method_names(&cfg.methods), auc, pr, 0.05)?)
}

fn write_summary(path: &Path, cfg: &RunConfig, rows: &[FoldRow]) -> AppResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    writer
        .write_record(["repeat", "fold", "method", "auc", "auc_pr"])
        .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    for row in rows {
        for (i, method) in cfg.methods.iter().enumerate() {
            writer
                .write_record([
                    row.repeat.to_string(),
                    row.fold.to_string(),
                    method.name().to_string(),
                    row.auc[i].map(|v| format!("{}", v)).unwrap_or_default(),
                    row.auc_pr[i].map(|v| format!("{}", v)).unwrap_or_default(),
                ])
                .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
        }
    }
    writer.flush().map_err(|e| AppError::io(path, e))
}
