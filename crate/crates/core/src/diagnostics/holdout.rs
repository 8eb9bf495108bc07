use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::{CountryDataset, Quarter, DEFAULT_MIN_ROWS};
use crate::error::{Error, Result};
use crate::metrics::{residual_sd, FitStatistics, RunMetrics};
use crate::models::{train, Learner, LearnerConfig, Predictor};

/// Quarters held out at the end of the panel.
pub const HOLDOUT_HORIZON: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub country: String,
    pub learner: String,
    pub runs: usize,
    pub quarters: Vec<Quarter>,
    /// One row of four predictions per run.
    pub predicted: Vec<Vec<f64>>,
    pub observed: Vec<f64>,
    pub stats: FitStatistics,
}

impl HoldoutReport {
    /// Scores per-run prediction rows (in run order) against the last four targets.
    pub fn from_runs(data: &CountryDataset, learner_label: &str, predicted: Vec<Vec<f64>>) -> Result<Self> {
        check_length(data)?;
        if predicted.is_empty() {
            return Err(Error::InvalidParameter("runs must be >= 1".into()));
        }
        let n = data.n();
        let observed = data.y()[n - HOLDOUT_HORIZON..].to_vec();
        let metrics = predicted
            .iter()
            .map(|p| RunMetrics::compute(p, &observed))
            .collect::<Result<Vec<_>>>()?;
        let sd = residual_sd(&predicted[predicted.len() - 1], &observed)?;
        Ok(HoldoutReport {
            country: data.country.clone(),
            learner: learner_label.into(),
            runs: predicted.len(),
            quarters: data.quarters()[n - HOLDOUT_HORIZON..].to_vec(),
            stats: FitStatistics::aggregate(&metrics, sd)?,
            predicted,
            observed,
        })
    }

    /// Per-quarter mean prediction over runs.
    pub fn mean_path(&self) -> Vec<f64> {
        let h = self.observed.len();
        let mut out = alloc::vec![0.0; h];
        for row in &self.predicted {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out.iter().map(|v| v / self.predicted.len() as f64).collect()
    }

    /// Change of the mean predicted path from the first to the last held-out quarter.
    pub fn predicted_change(&self) -> f64 {
        let p = self.mean_path();
        p[p.len() - 1] - p[0]
    }

    pub fn observed_change(&self) -> f64 {
        self.observed[self.observed.len() - 1] - self.observed[0]
    }
}

/// Predictions for the last four rows from a model trained without them.
pub fn holdout_run<P: Predictor>(data: &CountryDataset, model: &P) -> Result<Vec<f64>> {
    let n = data.n();
    (n - HOLDOUT_HORIZON..n).map(|i| model.predict(data.x().row(i))).collect()
}

fn check_length(data: &CountryDataset) -> Result<()> {
    let minimum = DEFAULT_MIN_ROWS + HOLDOUT_HORIZON;
    if data.n() < minimum {
        return Err(Error::PanelTooShort {
            found: data.n(),
            minimum,
        });
    }
    Ok(())
}

/// Hold-out evaluation with an arbitrary learner `fit(training_data, seed)`.
/// The training dataset is a physical copy without the last four rows.
pub fn holdout_with<P: Predictor>(
    data: &CountryDataset,
    learner_label: &str,
    runs: usize,
    base_seed: u64,
    mut fit: impl FnMut(&CountryDataset, u64) -> Result<P>,
) -> Result<HoldoutReport> {
    check_length(data)?;
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    let training = data.without_last(HOLDOUT_HORIZON);
    let mut predicted = Vec::with_capacity(runs);
    for r in 0..runs {
        let model = fit(&training, base_seed.wrapping_add(r as u64))?;
        predicted.push(holdout_run(data, &model)?);
    }
    HoldoutReport::from_runs(data, learner_label, predicted)
}

/// Trains on rows `1..n-4`, predicts the last four quarters from their observed
/// features, and scores them against the observed targets.
pub fn holdout_last4(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    base_seed: u64,
) -> Result<HoldoutReport> {
    holdout_with(data, learner.code(), runs, base_seed, |d, seed| train(d, learner, config, seed))
}
