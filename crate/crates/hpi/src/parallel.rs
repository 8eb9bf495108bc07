//! Rayon versions of the ensemble drivers. Runs are seeded `base_seed + r` and
//! results are collected in run order, so every function here returns exactly what
//! its serial counterpart in `hpi_core` returns.

use hpi_core::data::CountryDataset;
use hpi_core::diagnostics::{
    holdout_run, permuted_run, HoldoutReport, PermutationReport, PermutationSet, PermutedStatistics, HOLDOUT_HORIZON,
};
use hpi_core::metrics::{residual_sd, FitStatistics};
use hpi_core::models::{aggregate_runs, fit_run, train, EnsembleResult, Learner, LearnerConfig, Predictor};
use hpi_core::scenario::{GridBinding, ScenarioGrid, ScenarioReport};
use hpi_core::{Error, Result};
use rayon::prelude::*;

const GRID_CHUNK: usize = 4096;

fn check_runs(runs: usize) -> Result<()> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    Ok(())
}

fn seed_of(base: u64, r: usize) -> u64 {
    base.wrapping_add(r as u64)
}

pub fn ensemble_fit(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    base_seed: u64,
) -> Result<EnsembleResult> {
    check_runs(runs)?;
    let mut outputs: Vec<_> = (0..runs)
        .into_par_iter()
        .map(|r| fit_run(data, learner, config, r, seed_of(base_seed, r)))
        .collect::<Result<Vec<_>>>()?;
    let records = outputs.iter().map(|o| o.record).collect();
    let last = outputs.pop().unwrap();
    aggregate_runs(records, last, data.y())
}

fn permuted_stats(
    data: &CountryDataset,
    set: PermutationSet,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    base_seed: u64,
) -> Result<FitStatistics> {
    let outputs = (0..runs)
        .into_par_iter()
        .map(|r| permuted_run(data, set, learner, config, r, seed_of(base_seed, r)))
        .collect::<Result<Vec<_>>>()?;
    let metrics: Vec<_> = outputs.iter().map(|o| o.record.metrics).collect();
    let sd = residual_sd(&outputs[runs - 1].predictions, data.y())?;
    FitStatistics::aggregate(&metrics, sd)
}

pub fn permutation_test(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    seed: u64,
) -> Result<PermutationReport> {
    check_runs(runs)?;
    let baseline = ensemble_fit(data, learner, config, runs, seed)?.stats;
    let sets: Vec<PermutationSet> = (0..data.d()).map(PermutationSet::Feature).chain([PermutationSet::All]).collect();
    let permuted = sets
        .into_iter()
        .map(|set| {
            Ok(PermutedStatistics {
                set,
                label: set.label(data),
                stats: permuted_stats(data, set, learner, config, runs, seed)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PermutationReport { baseline, permuted })
}

pub fn holdout_last4(
    data: &CountryDataset,
    learner: Learner,
    config: &LearnerConfig,
    runs: usize,
    base_seed: u64,
) -> Result<HoldoutReport> {
    check_runs(runs)?;
    let training = data.without_last(HOLDOUT_HORIZON);
    let predicted = (0..runs)
        .into_par_iter()
        .map(|r| {
            let model = train(&training, learner, config, seed_of(base_seed, r))?;
            holdout_run(data, &model)
        })
        .collect::<Result<Vec<_>>>()?;
    HoldoutReport::from_runs(data, learner.code(), predicted)
}

pub fn predict_grid<P: Predictor + Sync + ?Sized>(
    model: &P,
    grid: &ScenarioGrid,
    base: Option<&[f64]>,
) -> Result<ScenarioReport> {
    let binding = GridBinding::new(model.feature_names(), grid, base)?;
    let chunks: Vec<usize> = (0..grid.len()).step_by(GRID_CHUNK).collect();
    let parts = chunks
        .into_par_iter()
        .map(|start| binding.predict_range(model, grid, start..(start + GRID_CHUNK).min(grid.len())))
        .collect::<Result<Vec<_>>>()?;
    let predictions = parts.into_iter().flatten().collect();
    ScenarioReport::from_predictions(&binding, grid, predictions)
}
