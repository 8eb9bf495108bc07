use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::linear::{fit_glm, linear_inversion};
use super::var::{fit_var, forecast_var, Deterministic, ForecastMode};
use crate::data::{CountryDataset, Quarter};
use crate::diagnostics::{holdout_last4, holdout_run, HoldoutReport, HOLDOUT_HORIZON};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::models::{Learner, LearnerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub learner: LearnerConfig,
    pub runs: usize,
    pub seed: u64,
    pub var_p: usize,
    pub var_deterministic: Deterministic,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            learner: LearnerConfig::default(),
            runs: 600,
            seed: 0,
            var_p: 2,
            var_deterministic: Deterministic::Both,
        }
    }
}

/// One method's four-quarter path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPath {
    pub method: String,
    pub values: Vec<f64>,
    /// Per-quarter standard errors (VAR) or ensemble spread (ML), when available.
    pub spread: Option<Vec<f64>>,
}

impl MethodPath {
    pub fn change(&self) -> f64 {
        self.values[self.values.len() - 1] - self.values[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub country: String,
    pub quarters: Vec<Quarter>,
    /// VAR, LI, GLM, ML-kNN, ML-TreeBag in that order.
    pub methods: Vec<MethodPath>,
    pub observed: Vec<f64>,
    /// Iterated (fully endogenous) VAR forecast of the target.
    pub var_iterated: Vec<f64>,
}

impl BenchmarkTable {
    pub const METHODS: [&'static str; 5] = ["VAR", "LI", "GLM", "ML-kNN", "ML-TreeBag"];

    pub fn method(&self, name: &str) -> Option<&MethodPath> {
        self.methods.iter().find(|m| m.method.eq_ignore_ascii_case(name))
    }

    pub fn observed_change(&self) -> f64 {
        self.observed[self.observed.len() - 1] - self.observed[0]
    }

    /// Whether a method's first-to-last change has the observed sign.
    pub fn sign_correct(&self, name: &str) -> Option<bool> {
        let m = self.method(name)?;
        Some(m.change().signum() == self.observed_change().signum())
    }
}

fn spread(rows: &[Vec<f64>]) -> Vec<f64> {
    (0..HOLDOUT_HORIZON)
        .map(|h| crate::metrics::population_sd(&rows.iter().map(|r| r[h]).collect::<Vec<f64>>()))
        .collect()
}

/// Trains every method on the panel without its last four quarters and predicts
/// them. The VAR column conditions on the observed feature values (target in
/// column 0 of the VAR panel); LI and GLM apply their coefficients to the observed
/// features; the ML columns are the mean hold-out paths over `runs`.
pub fn benchmark_table(data: &CountryDataset, config: &BenchmarkConfig) -> Result<BenchmarkTable> {
    let knn = holdout_last4(data, Learner::Knn, &config.learner, config.runs, config.seed)?;
    let bag = holdout_last4(data, Learner::TreeBag, &config.learner, config.runs, config.seed)?;
    benchmark_from_holdouts(data, config, &knn, &bag)
}

/// As [`benchmark_table`], with the ML hold-out ensembles supplied by the caller.
pub fn benchmark_from_holdouts(
    data: &CountryDataset,
    config: &BenchmarkConfig,
    knn: &HoldoutReport,
    bag: &HoldoutReport,
) -> Result<BenchmarkTable> {
    let n = data.n();
    let training = data.without_last(HOLDOUT_HORIZON);

    let panel_of = |d: &CountryDataset| {
        let mut cols = alloc::vec![d.y().to_vec()];
        cols.extend((0..d.d()).map(|j| d.column(j)));
        Matrix::from_columns(&cols)
    };
    let full_panel = panel_of(data)?;
    let train_panel = panel_of(&training)?;
    let mut names = alloc::vec![String::from("HPI")];
    names.extend(data.feature_names().iter().cloned());
    let var = fit_var(&train_panel, &names, config.var_p, config.var_deterministic)?;
    let future = full_panel.select_rows(&(n - HOLDOUT_HORIZON..n).collect::<Vec<_>>());
    let cond = forecast_var(
        &var,
        &train_panel,
        HOLDOUT_HORIZON,
        ForecastMode::Conditional { target: 0 },
        Some(&future),
    )?;
    let iter = forecast_var(&var, &train_panel, HOLDOUT_HORIZON, ForecastMode::Iterated, None)?;

    let li = linear_inversion(&training)?;
    let glm = fit_glm(&training)?;
    let methods = alloc::vec![
        MethodPath {
            method: "VAR".into(),
            values: cond.values.column(0),
            spread: Some(cond.se.column(0)),
        },
        MethodPath {
            method: "LI".into(),
            values: holdout_run(data, &li)?,
            spread: None,
        },
        MethodPath {
            method: "GLM".into(),
            values: holdout_run(data, &glm)?,
            spread: None,
        },
        MethodPath {
            method: "ML-kNN".into(),
            values: knn.mean_path(),
            spread: Some(spread(&knn.predicted)),
        },
        MethodPath {
            method: "ML-TreeBag".into(),
            values: bag.mean_path(),
            spread: Some(spread(&bag.predicted)),
        },
    ];
    Ok(BenchmarkTable {
        country: data.country.clone(),
        quarters: data.quarters()[n - HOLDOUT_HORIZON..].to_vec(),
        methods,
        observed: data.y()[n - HOLDOUT_HORIZON..].to_vec(),
        var_iterated: iter.values.column(0),
    })
}
