//! Flat key=value run configuration with command-line overrides.
//!
//! Every experiment writes its fully resolved configuration back into the
//! run directory so a run can be reproduced from that file alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use condout_core::dbr::Structure;
use condout_core::scoring::{Method, NormOrder};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Exp1,
    Exp2,
}

impl ProtocolKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolKind::Exp1 => "exp1",
            ProtocolKind::Exp2 => "exp2",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub d: usize,
    pub protocol: ProtocolKind,
    /// Experiment-1 cell flip rate.
    pub rate: f64,
    /// Experiment-1 alternative: sample instances at `rate` and flip one
    /// dimension each, instead of sampling cells.
    pub per_instance: bool,
    /// Experiment-2 outlier instance rate.
    pub instance_rate: f64,
    /// Experiment-2 sweep of outlying dimension counts.
    pub p_list: Vec<usize>,
    /// Test folds smaller than this are bootstrapped up to it; 0 disables.
    pub bootstrap: usize,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub structure: Structure,
    /// Fixed L2 strength, used when `lambda_grid` is empty.
    pub lambda: f64,
    pub lambda_grid: Vec<f64>,
    pub cv_folds: usize,
    pub methods: Vec<Method>,
    pub k_lof: usize,
    pub nu: f64,
    pub gamma: Option<f64>,
    pub rho_mcd_starts: usize,
    pub joint_mcd_starts: usize,
    pub standardize_joint: bool,
    pub rd_plain_mean: bool,
    pub outdir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: PathBuf::new(),
            d: 0,
            protocol: ProtocolKind::Exp1,
            rate: 0.005,
            per_instance: false,
            instance_rate: 0.005,
            p_list: vec![],
            bootstrap: 5000,
            folds: 10,
            repeats: 3,
            seed: 13,
            structure: Structure::Dbr,
            lambda: 1.0,
            lambda_grid: vec![],
            cv_folds: 5,
            methods: default_methods(),
            k_lof: 30,
            nu: 0.01,
            gamma: None,
            rho_mcd_starts: 500,
            joint_mcd_starts: 500,
            standardize_joint: true,
            rd_plain_mean: false,
            outdir: PathBuf::new(),
        }
    }
}

pub fn default_methods() -> Vec<Method> {
    vec![
        Method::Comp,
        Method::Rd,
        Method::Lr(NormOrder::LInf),
        Method::Lof,
        Method::Ocsvm,
        Method::BaseRd,
        Method::BaseLof,
        Method::BaseOcsvm,
    ]
}

pub fn parse_method(name: &str) -> Option<Method> {
    match name {
        "ComP" => Some(Method::Comp),
        "RD" => Some(Method::Rd),
        "L1" => Some(Method::Lr(NormOrder::L1)),
        "L2" => Some(Method::Lr(NormOrder::L2)),
        "Linf" => Some(Method::Lr(NormOrder::LInf)),
        "LOF" => Some(Method::Lof),
        "OCSVM" => Some(Method::Ocsvm),
        "base-RD" => Some(Method::BaseRd),
        "base-LOF" => Some(Method::BaseLof),
        "base-OCSVM" => Some(Method::BaseOcsvm),
        _ => None,
    }
}

impl RunConfig {
    /// Parse a config file, then apply `key=value` overrides in order.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> AppResult<RunConfig> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let mut cfg = RunConfig::default();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| AppError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected key=value, got '{}'", line),
            })?;
            cfg.set(key.trim(), value.trim()).map_err(|e| AppError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| AppError::config(format!("override '{}' is not key=value", item)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> AppResult<()> {
        let bad = |what: &str| AppError::config(format!("bad value '{}' for {}", value, what));
        match key {
            "dataset" => self.dataset = PathBuf::from(value),
            "d" => self.d = value.parse().map_err(|_| bad("d"))?,
            "protocol" => {
                self.protocol = match value {
                    "exp1" => ProtocolKind::Exp1,
                    "exp2" => ProtocolKind::Exp2,
                    _ => return Err(bad("protocol (exp1|exp2)")),
                }
            }
            "rate" => self.rate = value.parse().map_err(|_| bad("rate"))?,
            "per_instance" => self.per_instance = parse_bool(value).ok_or_else(|| bad("per_instance"))?,
            "instance_rate" => {
                self.instance_rate = value.parse().map_err(|_| bad("instance_rate"))?
            }
            "p_list" => {
                self.p_list = split_list(value)
                    .map(|t| t.parse::<usize>().map_err(|_| bad("p_list")))
                    .collect::<AppResult<_>>()?
            }
            "bootstrap" => self.bootstrap = value.parse().map_err(|_| bad("bootstrap"))?,
            "folds" => self.folds = value.parse().map_err(|_| bad("folds"))?,
            "repeats" => self.repeats = value.parse().map_err(|_| bad("repeats"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "structure" => {
                self.structure = match value.to_ascii_uppercase().as_str() {
                    "DBR" => Structure::Dbr,
                    "BR" => Structure::Br,
                    _ => return Err(bad("structure (DBR|BR)")),
                }
            }
            "lambda" => self.lambda = value.parse().map_err(|_| bad("lambda"))?,
            "lambda_grid" => {
                self.lambda_grid = split_list(value)
                    .map(|t| t.parse::<f64>().map_err(|_| bad("lambda_grid")))
                    .collect::<AppResult<_>>()?
            }
            "cv_folds" => self.cv_folds = value.parse().map_err(|_| bad("cv_folds"))?,
            "methods" => {
                self.methods = split_list(value)
                    .map(|t| parse_method(t).ok_or_else(|| AppError::config(format!("unknown method '{}'", t))))
                    .collect::<AppResult<_>>()?
            }
            "k_lof" => self.k_lof = value.parse().map_err(|_| bad("k_lof"))?,
            "nu" => self.nu = value.parse().map_err(|_| bad("nu"))?,
            "gamma" => {
                self.gamma = if value.is_empty() || value == "median" {
                    None
                } else {
                    Some(value.parse().map_err(|_| bad("gamma"))?)
                }
            }
            "rho_mcd_starts" => {
                self.rho_mcd_starts = value.parse().map_err(|_| bad("rho_mcd_starts"))?
            }
            "joint_mcd_starts" => {
                self.joint_mcd_starts = value.parse().map_err(|_| bad("joint_mcd_starts"))?
            }
            "standardize_joint" => {
                self.standardize_joint = parse_bool(value).ok_or_else(|| bad("standardize_joint"))?
            }
            "rd_plain_mean" => {
                self.rd_plain_mean = parse_bool(value).ok_or_else(|| bad("rd_plain_mean"))?
            }
            "outdir" => self.outdir = PathBuf::from(value),
            other => return Err(AppError::config(format!("unknown config key '{}'", other))),
        }
        Ok(())
    }

    pub fn validate(&self) -> AppResult<()> {
        if self.dataset.as_os_str().is_empty() {
            return Err(AppError::config("dataset is required"));
        }
        if !self.dataset.exists() {
            return Err(AppError::config(format!(
                "dataset {} does not exist",
                self.dataset.display()
            )));
        }
        if self.d < 1 {
            return Err(AppError::config("d must be at least 1"));
        }
        if self.outdir.as_os_str().is_empty() {
            return Err(AppError::config("outdir is required"));
        }
        if self.folds < 2 {
            return Err(AppError::config("folds must be at least 2"));
        }
        if self.repeats < 1 {
            return Err(AppError::config("repeats must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.rate) || !(0.0..=1.0).contains(&self.instance_rate) {
            return Err(AppError::config("rates must be in [0, 1]"));
        }
        if self.protocol == ProtocolKind::Exp2 && self.p_list.is_empty() {
            return Err(AppError::config("exp2 needs a nonempty p_list"));
        }
        if self.methods.is_empty() {
            return Err(AppError::config("methods must be nonempty"));
        }
        if !(0.0..=1.0).contains(&self.nu) || self.nu == 0.0 {
            return Err(AppError::config("nu must be in (0, 1]"));
        }
        Ok(())
    }

    /// Canonical key=value listing with stable key order.
    pub fn resolved_text(&self) -> String {
        let mut map = BTreeMap::new();
        map.insert("dataset", self.dataset.display().to_string());
        map.insert("d", self.d.to_string());
        map.insert("protocol", self.protocol.as_str().to_string());
        map.insert("rate", format!("{}", self.rate));
        map.insert("per_instance", self.per_instance.to_string());
        map.insert("instance_rate", format!("{}", self.instance_rate));
        map.insert("p_list", join(&self.p_list));
        map.insert("bootstrap", self.bootstrap.to_string());
        map.insert("folds", self.folds.to_string());
        map.insert("repeats", self.repeats.to_string());
        map.insert("seed", self.seed.to_string());
        map.insert("structure", self.structure.as_str().to_string());
        map.insert("lambda", format!("{}", self.lambda));
        map.insert("lambda_grid", join(&self.lambda_grid));
        map.insert("cv_folds", self.cv_folds.to_string());
        map.insert(
            "methods",
            self.methods
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join(","),
        );
        map.insert("k_lof", self.k_lof.to_string());
        map.insert("nu", format!("{}", self.nu));
        map.insert(
            "gamma",
            self.gamma.map(|g| format!("{}", g)).unwrap_or_else(|| "median".into()),
        );
        map.insert("rho_mcd_starts", self.rho_mcd_starts.to_string());
        map.insert("joint_mcd_starts", self.joint_mcd_starts.to_string());
        map.insert("standardize_joint", self.standardize_joint.to_string());
        map.insert("rd_plain_mean", self.rd_plain_mean.to_string());
        map.insert("outdir", self.outdir.display().to_string());
        map.into_iter()
            .map(|(k, v)| format!("{}={}\n", k, v))
            .collect()
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_plus_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        std::fs::write(
            &file,
            "# exp2 sweep\nprotocol=exp2\np_list=1,2,3\nrate=0.01\nmethods=ComP,LOF,base-RD\n",
        )
        .unwrap();
        let cfg = RunConfig::load(&file, &["rate=0.02".into(), "seed=99".into()]).unwrap();
        assert_eq!(cfg.protocol, ProtocolKind::Exp2);
        assert_eq!(cfg.p_list, vec![1, 2, 3]);
        assert_eq!(cfg.rate, 0.02);
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.methods.len(), 3);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        std::fs::write(&file, "nope=1\n").unwrap();
        assert!(matches!(
            RunConfig::load(&file, &[]),
            Err(AppError::Parse { line: 1, .. })
        ));

        std::fs::write(&file, "folds=ten\n").unwrap();
        assert!(RunConfig::load(&file, &[]).is_err());
    }

    #[test]
    fn resolved_text_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("x.csv");
        std::fs::write(&data, "a,y\n1,0\n2,1\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.dataset = data;
        cfg.d = 1;
        cfg.outdir = dir.path().join("out");
        cfg.p_list = vec![1, 4];
        cfg.lambda_grid = vec![0.01, 0.1];

        let file = dir.path().join("resolved.conf");
        std::fs::write(&file, cfg.resolved_text()).unwrap();
        let back = RunConfig::load(&file, &[]).unwrap();
        assert_eq!(back.resolved_text(), cfg.resolved_text());
    }

    #[test]
    fn validation_rejects_incomplete_configs() {
        let cfg = RunConfig::default();
        assert!(cfg.validate().is_err());
    }
}
