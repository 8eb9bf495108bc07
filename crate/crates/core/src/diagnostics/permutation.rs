use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::CountryDataset;
use crate::error::{Error, Result};
use crate::metrics::{residual_sd, FitStatistics, RunMetrics};
use crate::models::{ensemble_fit, train, Learner, LearnerConfig, Predictor, RunOutput, RunRecord};
use crate::rng;

/// Which columns a permutation scrambles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PermutationSet {
    Feature(usize),
    /// Every feature, each with its own permutation.
    All,
}

impl PermutationSet {
    pub fn label(&self, data: &CountryDataset) -> String {
        match self {
            PermutationSet::Feature(j) => data.feature_names()[*j].clone(),
            PermutationSet::All => "ALL".into(),
        }
    }

    fn stream(&self) -> u64 {
        match self {
            PermutationSet::Feature(j) => 0x5045_0000 + *j as u64,
            PermutationSet::All => 0x5045_FFFF,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutedStatistics {
    pub set: PermutationSet,
    pub label: String,
    pub stats: FitStatistics,
}

impl PermutedStatistics {
    /// Ratio of permuted to baseline mean RMS.
    pub fn rms_ratio(&self, baseline: &FitStatistics) -> f64 {
        self.stats.m_rms / baseline.m_rms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationReport {
    pub baseline: FitStatistics,
    pub permuted: Vec<PermutedStatistics>,
}

impl PermutationReport {
    pub fn get(&self, label: &str) -> Option<&PermutedStatistics> {
        self.permuted.iter().find(|p| p.label.eq_ignore_ascii_case(label))
    }
}

/// Copy of `data` with the columns of `set` shuffled by a permutation drawn from
/// `seed`. The target and the other columns are untouched.
pub fn permuted_dataset(data: &CountryDataset, set: PermutationSet, seed: u64) -> Result<CountryDataset> {
    let mut r = rng::seeded(rng::derive(seed, set.stream()));
    let columns: Vec<usize> = match set {
        PermutationSet::Feature(j) if j < data.d() => alloc::vec![j],
        PermutationSet::Feature(j) => {
            return Err(Error::DimensionMismatch {
                expected: data.d(),
                found: j + 1,
            })
        }
        PermutationSet::All => (0..data.d()).collect(),
    };
    let mut out = data.clone();
    for j in columns {
        let col = data.column(j);
        let perm = rng::permutation(data.n(), &mut r);
        let shuffled: Vec<f64> = perm.iter().map(|&i| col[i]).collect();
        out = out.with_column(j, &shuffled);
    }
    Ok(out)
}

/// One run of an ensemble trained on `transform(run, seed)` applied to `data` and
/// scored against the original targets.
fn scored_run(
    data: &CountryDataset,
    trained_on: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    run: usize,
    seed: u64,
) -> Result<RunOutput> {
    let model = train(trained_on, learner, config, seed)?;
    let predictions = model.predict_rows(trained_on.x())?;
    let metrics = RunMetrics::compute(&predictions, data.y())?;
    Ok(RunOutput {
        record: RunRecord {
            run,
            seed,
            metrics,
            cv_rmse: None,
            k: None,
        },
        model,
        predictions,
    })
}

/// A single permuted run: fresh permutation from the run seed, retrain, resubstitution
/// metrics against the unpermuted target.
pub fn permuted_run(
    data: &CountryDataset,
    set: PermutationSet,
    learner: Learner,
    config: &LearnerConfig,
    run: usize,
    seed: u64,
) -> Result<RunOutput> {
    let shuffled = permuted_dataset(data, set, seed)?;
    scored_run(data, &shuffled, learner, config, run, seed)
}

/// Ensemble over runs whose training data is produced by `transform(run, seed)`.
pub fn permuted_ensemble(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    base_seed: u64,
    mut transform: impl FnMut(usize, u64) -> Result<CountryDataset>,
) -> Result<FitStatistics> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    let mut metrics = Vec::with_capacity(runs);
    let mut last_sd = 0.0;
    for r in 0..runs {
        let seed = base_seed.wrapping_add(r as u64);
        let trained_on = transform(r, seed)?;
        let out = scored_run(data, &trained_on, learner, config, r, seed)?;
        metrics.push(out.record.metrics);
        if r + 1 == runs {
            last_sd = residual_sd(&out.predictions, data.y())?;
        }
    }
    FitStatistics::aggregate(&metrics, last_sd)
}

/// Baseline ensemble plus one permuted ensemble per feature and one with every
/// feature permuted.
pub fn permutation_test(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    seed: u64,
) -> Result<PermutationReport> {
    let baseline = ensemble_fit(data, learner, config, runs, seed)?.stats;
    let sets = (0..data.d()).map(PermutationSet::Feature).chain([PermutationSet::All]);
    let mut permuted = Vec::new();
    for set in sets {
        let stats = permuted_ensemble(data, learner, config, runs, seed, |_, s| permuted_dataset(data, set, s))?;
        permuted.push(PermutedStatistics {
            set,
            label: set.label(data),
            stats,
        });
    }
    Ok(PermutationReport { baseline, permuted })
}
