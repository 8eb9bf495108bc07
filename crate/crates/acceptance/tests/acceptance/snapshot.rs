//! Banded checks against the bundled quarterly data snapshot.
//!
//! The snapshot is a run manifest (see the `hpi` crate) pointing at raw series
//! files. Its location is `HPI_SNAPSHOT_MANIFEST`, else `data/snapshot/hpi.toml` at
//! the workspace root.

use std::path::{Path, PathBuf};

use hpi::ingest::{build_dataset, load_country};
use hpi::manifest::RunManifest;
use hpi::parallel;
use hpi_core::baselines::{benchmark_from_holdouts, fit_glm, linear_inversion, BenchmarkConfig, BenchmarkTable};
use hpi_core::data::{CountryDataset, ModelSpec};
use hpi_core::models::{tree_importance, EnsembleResult, Learner, TrainedModel};

use crate::Outcome;

pub const RUNS: usize = 600;
pub const MAX_M_MAPE: f64 = 0.20;
pub const MAX_M_RMS: f64 = 15.0;
/// Rank (0-based) the ECB feature must reach in the ECB configuration.
pub const ECB_MAX_RANK: usize = 1;
pub const FAMILY_COUNTRIES: usize = 12;
pub const FAMILY_MIN_WINS: usize = 9;
pub const HOLDOUT_COUNTRIES: [&str; 4] = ["CH", "FR", "UK", "US"];
/// Published linear-inversion coefficients: ECB, CPI, GDP, TR10Y.
pub const LI_REFERENCE: [(&str, f64); 4] = [("ECB", 1.02e-6), ("CPI", 1.15), ("GDP", 1.42), ("TR10Y", 0.65)];
/// Published GLM coefficients: intercept, ECB, CPI, GDP, TR10Y.
pub const GLM_REFERENCE: [(&str, f64); 5] =
    [("intercept", -3.21), ("ECB", 1.44e-6), ("CPI", 0.88), ("GDP", 1.37), ("TR10Y", 1.10)];
/// Magnitudes agree when their ratio lies within this factor either way.
pub const MAGNITUDE_FACTOR: f64 = 10.0;

pub struct Snapshot {
    manifest: RunManifest,
}

pub fn manifest_path() -> PathBuf {
    std::env::var_os("HPI_SNAPSHOT_MANIFEST")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/snapshot/hpi.toml"))
}

impl Snapshot {
    pub fn load() -> Result<Self, String> {
        let path = manifest_path();
        if !path.exists() {
            return Err(format!(
                "snapshot manifest {} not found (set HPI_SNAPSHOT_MANIFEST)",
                path.display()
            ));
        }
        let manifest = RunManifest::load(&path).map_err(|e| e.to_string())?;
        manifest.validate().map_err(|e| e.to_string())?;
        Ok(Snapshot { manifest })
    }

    fn seed(&self) -> u64 {
        self.manifest.run.seed.unwrap_or(0)
    }

    fn dataset(&self, country: &str, spec: &str) -> Result<CountryDataset, String> {
        let spec = ModelSpec::builtin(spec).map_err(|e| e.to_string())?;
        let data = load_country(&self.manifest, country).map_err(|e| e.to_string())?;
        build_dataset(&self.manifest, &data, &spec).map_err(|e| e.to_string())
    }

    fn ensemble(&self, country: &str, spec: &str, learner: Learner) -> Result<EnsembleResult, String> {
        let data = self.dataset(country, spec)?;
        parallel::ensemble_fit(&data, learner, &self.manifest.learner_config(), RUNS, self.seed())
            .map_err(|e| format!("{country} {spec}: {e}"))
    }

    fn benchmark(&self, country: &str) -> Result<BenchmarkTable, String> {
        let data = self.dataset(country, "ECB-1yr")?;
        let config = BenchmarkConfig {
            learner: self.manifest.learner_config(),
            runs: RUNS,
            seed: self.seed(),
            ..BenchmarkConfig::default()
        };
        let err = |e: hpi_core::Error| format!("{country} ECB-1yr: {e}");
        let knn = parallel::holdout_last4(&data, Learner::Knn, &config.learner, RUNS, config.seed).map_err(err)?;
        let bag = parallel::holdout_last4(&data, Learner::TreeBag, &config.learner, RUNS, config.seed).map_err(err)?;
        benchmark_from_holdouts(&data, &config, &knn, &bag).map_err(err)
    }
}

fn with_snapshot(check: impl FnOnce(&Snapshot) -> Result<Outcome, String>) -> Outcome {
    match Snapshot::load().and_then(|s| check(&s)) {
        Ok(o) => o,
        Err(e) => Outcome::new(false, e),
    }
}

fn ranking(result: &EnsembleResult) -> Result<Vec<String>, String> {
    match &result.last.model {
        TrainedModel::TreeBag(bag) => Ok(tree_importance(bag).ranking().into_iter().map(String::from).collect()),
        other => Err(format!("expected a tree-bag model, got {}", other.kind())),
    }
}

pub fn performance_bar() -> Outcome {
    with_snapshot(|s| {
        let r = s.ensemble("CH", "3-param", Learner::TreeBag)?;
        Ok(Outcome::new(
            r.stats.m_mape < MAX_M_MAPE && r.stats.m_rms < MAX_M_RMS,
            format!(
                "CH 3-param treebag {RUNS} runs: M_MAPE {:.4} (< {MAX_M_MAPE}), M_RMS {:.3} (< {MAX_M_RMS})",
                r.stats.m_mape, r.stats.m_rms
            ),
        ))
    })
}

pub fn importance_ranking() -> Outcome {
    with_snapshot(|s| {
        let three = ranking(&s.ensemble("CH", "3-param", Learner::TreeBag)?)?;
        let ecb = ranking(&s.ensemble("CH", "ECB", Learner::TreeBag)?)?;
        let ecb_rank = ecb.iter().position(|f| f == "ECB");
        Ok(Outcome::new(
            three.first().map(String::as_str) == Some("TR10Y") && ecb_rank.is_some_and(|r| r <= ECB_MAX_RANK),
            format!(
                "CH 3-param ranking [{}] (TR10Y first); CH ECB ranking [{}] (ECB within top {})",
                three.join(", "),
                ecb.join(", "),
                ECB_MAX_RANK + 1
            ),
        ))
    })
}

pub fn model_family_ordering() -> Outcome {
    with_snapshot(|s| {
        let countries = s.manifest.country_names();
        if countries.len() < FAMILY_COUNTRIES {
            return Err(format!(
                "snapshot has {} countries, the criterion needs {FAMILY_COUNTRIES}",
                countries.len()
            ));
        }
        let mut wins = Vec::new();
        for c in &countries {
            let base = s.ensemble(c, "3-param", Learner::TreeBag)?.stats.m_rms;
            let ecb = s.ensemble(c, "ECB", Learner::TreeBag)?.stats.m_rms;
            if ecb < base {
                wins.push(c.as_str());
            }
        }
        Ok(Outcome::new(
            wins.len() >= FAMILY_MIN_WINS,
            format!(
                "ECB M_RMS < 3-param M_RMS in {}/{} countries (need {FAMILY_MIN_WINS}): {}",
                wins.len(),
                countries.len(),
                wins.join(", ")
            ),
        ))
    })
}

pub fn holdout_direction() -> Outcome {
    with_snapshot(|s| {
        let mut parts = Vec::new();
        let mut ok = true;
        for c in HOLDOUT_COUNTRIES {
            let data = s.dataset(c, "ECB-1yr")?;
            let rep = parallel::holdout_last4(&data, Learner::Knn, &s.manifest.learner_config(), RUNS, s.seed())
                .map_err(|e| format!("{c} ECB-1yr: {e}"))?;
            let change = rep.predicted_change();
            ok &= change < 0.0;
            parts.push(format!("{c} {change:+.3}"));
        }
        Ok(Outcome::new(
            ok,
            format!("ECB-1yr kNN predicted 4-quarter change: {} (all < 0)", parts.join(", ")),
        ))
    })
}

pub fn benchmark_claim() -> Outcome {
    with_snapshot(|s| {
        let t = s.benchmark("CH")?;
        let change = |m: &str| t.method(m).map(|p| p.change()).unwrap_or(f64::NAN);
        let ml_down = ["ML-kNN", "ML-TreeBag"].iter().all(|m| change(m) < 0.0);
        let others_not_down = ["VAR", "LI", "GLM"].iter().all(|m| change(m) >= 0.0);
        let parts: Vec<String> = BenchmarkTable::METHODS.iter().map(|m| format!("{m} {:+.3}", change(m))).collect();
        Ok(Outcome::new(
            ml_down && others_not_down,
            format!(
                "CH ECB-1yr 4-quarter change: {}; observed {:+.3}",
                parts.join(", "),
                t.observed_change()
            ),
        ))
    })
}

fn within_order(ours: f64, reference: f64) -> bool {
    let ratio = (ours / reference).abs();
    ours.signum() == reference.signum() && (1.0 / MAGNITUDE_FACTOR..=MAGNITUDE_FACTOR).contains(&ratio)
}

pub fn coefficient_signs() -> Outcome {
    with_snapshot(|s| {
        let data = s.dataset("CH", "ECB-1yr")?;
        let li = linear_inversion(&data).map_err(|e| e.to_string())?;
        let glm = fit_glm(&data).map_err(|e| e.to_string())?;
        let coef = |fit: &hpi_core::baselines::LinearCoefficients, name: &str| -> Result<f64, String> {
            if name == "intercept" {
                return fit.intercept.ok_or_else(|| "GLM has no intercept".to_string());
            }
            let j = fit
                .feature_names
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| format!("feature {name} missing"))?;
            Ok(fit.coefficients[j])
        };
        let mut ok = true;
        let mut parts = Vec::new();
        for (label, fit, reference) in [("LI", &li, &LI_REFERENCE[..]), ("GLM", &glm, &GLM_REFERENCE[..])] {
            for (name, want) in reference {
                let got = coef(fit, name)?;
                ok &= within_order(got, *want);
                parts.push(format!("{label} {name} {got:.3e} (reference {want:.3e})"));
            }
        }
        Ok(Outcome::new(ok, parts.join("; ")))
    })
}
