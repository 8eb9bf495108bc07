use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{cross_validated_rmse, train, train_treebag, Learner, LearnerConfig, Predictor, TrainedModel};
use crate::data::CountryDataset;
use crate::error::{Error, Result};
use crate::metrics::{residual_sd, FitStatistics, RunMetrics};

/// Per-run outcome kept for the run-records export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Whole-sample (resubstitution) metrics.
    pub metrics: RunMetrics,
    /// Cross-validated RMSE, when computed.
    pub cv_rmse: Option<f64>,
    /// Selected k for kNN runs.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub record: RunRecord,
    pub model: TrainedModel,
    pub predictions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub stats: FitStatistics,
    /// Mean cross-validated RMSE over the runs that computed one.
    pub mean_cv_rmse: Option<f64>,
    pub records: Vec<RunRecord>,
    /// Model and whole-sample predictions of the final run.
    pub last: RunOutput,
}

impl EnsembleResult {
    pub fn residuals(&self, obs: &[f64]) -> Vec<f64> {
        obs.iter().zip(&self.last.predictions).map(|(o, p)| o - p).collect()
    }
}

/// Trains one run with `seed` and scores its whole-sample predictions.
pub fn fit_run(data: &CountryDataset, learner: Learner, config: &LearnerConfig, run: usize, seed: u64) -> Result<RunOutput> {
    let model = train(data, learner, config, seed)?;
    let predictions = model.predict_rows(data.x())?;
    let metrics = RunMetrics::compute(&predictions, data.y())?;
    let (cv_rmse, k) = match (&model, learner) {
        (TrainedModel::Knn(m), _) => (m.cv_rmse(), Some(m.k)),
        (_, Learner::TreeBag) if config.treebag_cv => {
            let cv = config.cv.with_seed(seed);
            let rmse = cross_validated_rmse(data, &cv, |d| train_treebag(d, config.n_bags, config.min_node, seed))?;
            (Some(rmse), None)
        }
        _ => (None, None),
    };
    Ok(RunOutput {
        record: RunRecord {
            run,
            seed,
            metrics,
            cv_rmse,
            k,
        },
        model,
        predictions,
    })
}

/// Folds per-run records (in run order) into ensemble statistics. `last` supplies
/// the residual SD column.
pub fn aggregate_runs(records: Vec<RunRecord>, last: RunOutput, obs: &[f64]) -> Result<EnsembleResult> {
    let metrics: Vec<RunMetrics> = records.iter().map(|r| r.metrics).collect();
    let sd = residual_sd(&last.predictions, obs)?;
    let stats = FitStatistics::aggregate(&metrics, sd)?;
    let cvs: Vec<f64> = records.iter().filter_map(|r| r.cv_rmse).collect();
    let mean_cv_rmse = (!cvs.is_empty()).then(|| cvs.iter().sum::<f64>() / cvs.len() as f64);
    Ok(EnsembleResult {
        stats,
        mean_cv_rmse,
        records,
        last,
    })
}

/// Runs `runs` independent fits with seeds `base_seed + r` and aggregates them.
pub fn ensemble_fit(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    base_seed: u64,
) -> Result<EnsembleResult> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    let mut records = Vec::with_capacity(runs);
    let mut last = None;
    for r in 0..runs {
        let out = fit_run(data, learner, config, r, base_seed.wrapping_add(r as u64))?;
        records.push(out.record);
        if r + 1 == runs {
            last = Some(out);
        }
    }
    aggregate_runs(records, last.unwrap(), data.y())
}
