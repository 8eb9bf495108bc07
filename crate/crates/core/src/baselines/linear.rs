use alloc::string::String;
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::CountryDataset;
use crate::error::{Error, Result};
use crate::linalg::{check_rank, Matrix, Qr};
use crate::metrics::population_sd;
use crate::models::Predictor;
use crate::rng;

/// Least-squares coefficients over named features, with an optional intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCoefficients {
    pub feature_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: Option<f64>,
    /// SSR / (n - parameters).
    pub residual_variance: f64,
    /// Standard errors of `coefficients` (GLM only).
    pub std_errors: Option<Vec<f64>>,
    pub intercept_std_error: Option<f64>,
}

impl LinearCoefficients {
    /// Coefficients with the intercept first, when present.
    pub fn all_coefficients(&self) -> Vec<f64> {
        self.intercept.into_iter().chain(self.coefficients.iter().copied()).collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                found: x.len(),
            });
        }
        let dot: f64 = x.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
        Ok(self.intercept.unwrap_or(0.0) + dot)
    }
}

impl Predictor for LinearCoefficients {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        LinearCoefficients::predict(self, x)
    }
}

fn rank_error(bad: Error, names: &[String], intercept: bool) -> Error {
    match bad {
        Error::RankDeficient { columns } => Error::RankDeficient {
            columns: columns
                .iter()
                .map(|c| {
                    let j: usize = c.parse().unwrap_or(0);
                    match (intercept, j) {
                        (true, 0) => String::from("(intercept)"),
                        (true, j) => names[j - 1].clone(),
                        (false, j) => names[j].clone(),
                    }
                })
                .collect(),
        },
        other => other,
    }
}

fn ols(x: &Matrix, y: &[f64], names: &[String], intercept: bool, with_se: bool) -> Result<LinearCoefficients> {
    let design = if intercept { x.with_intercept() } else { x.clone() };
    let (n, p) = (design.rows(), design.cols());
    if n <= p {
        return Err(Error::TooFewPoints { needed: p + 1, found: n });
    }
    let qr = Qr::new(&design)?;
    check_rank(&qr, p).map_err(|e| rank_error(e, names, intercept))?;
    let coef = qr.solve(y)?;
    let fitted = design.mul_vec(&coef);
    let ssr: f64 = y.iter().zip(&fitted).map(|(o, f)| (o - f) * (o - f)).sum();
    let residual_variance = ssr / (n - p) as f64;
    let se = if with_se {
        let cov = qr.unscaled_covariance()?;
        Some((0..p).map(|j| libm::sqrt(residual_variance * cov.get(j, j))).collect::<Vec<f64>>())
    } else {
        None
    };
    let off = usize::from(intercept);
    Ok(LinearCoefficients {
        feature_names: names.to_vec(),
        coefficients: coef[off..].to_vec(),
        intercept: intercept.then(|| coef[0]),
        residual_variance,
        std_errors: se.as_ref().map(|s| s[off..].to_vec()),
        intercept_std_error: se.as_ref().filter(|_| intercept).map(|s| s[0]),
    })
}

/// Least squares `y ≈ X a` without an intercept.
pub fn linear_inversion(data: &CountryDataset) -> Result<LinearCoefficients> {
    ols(data.x(), data.y(), data.feature_names(), false, false)
}

/// Gaussian identity-link GLM: least squares with an intercept and standard errors
/// `sqrt(σ² diag((XᵀX)⁻¹))`, σ² = SSR/(n - p).
pub fn fit_glm(data: &CountryDataset) -> Result<LinearCoefficients> {
    ols(data.x(), data.y(), data.feature_names(), true, true)
}

/// GLM refits on multiplicatively perturbed inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedGlm {
    pub amplitude: f64,
    /// One row per run: intercept followed by feature coefficients.
    pub coefficients: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    /// Per-row mean, minimum and maximum of the fitted series across runs.
    pub fitted_mean: Vec<f64>,
    pub fitted_min: Vec<f64>,
    pub fitted_max: Vec<f64>,
}

/// Each run multiplies every input value by `1 + ε`, ε ~ N(0, amplitude/3)
/// truncated to ±amplitude, then refits the GLM. Run `r` draws from stream `r` of
/// `seed`.
pub fn perturbed_glm_ensemble(data: &CountryDataset, runs: usize, amplitude: f64, seed: u64) -> Result<PerturbedGlm> {
    if !(amplitude > 0.0 && amplitude < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "perturbation amplitude must lie in (0, 1), got {amplitude}"
        )));
    }
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    let normal = Normal::new(0.0, amplitude / 3.0).map_err(|e| Error::InvalidParameter(alloc::format!("{e}")))?;
    let (n, d) = (data.n(), data.d());
    let mut coefficients = Vec::with_capacity(runs);
    let mut fitted_sum = alloc::vec![0.0; n];
    let mut fitted_min = alloc::vec![f64::INFINITY; n];
    let mut fitted_max = alloc::vec![f64::NEG_INFINITY; n];
    for r in 0..runs {
        let mut g = rng::seeded(rng::derive(seed, r as u64));
        let mut x = data.x().clone();
        for i in 0..n {
            for j in 0..d {
                let eps = loop {
                    let e: f64 = normal.sample(&mut g);
                    if e.abs() <= amplitude {
                        break e;
                    }
                };
                x.set(i, j, x.get(i, j) * (1.0 + eps));
            }
        }
        let fit = ols(&x, data.y(), data.feature_names(), true, false)?;
        for i in 0..n {
            let f = fit.predict(x.row(i))?;
            fitted_sum[i] += f;
            fitted_min[i] = fitted_min[i].min(f);
            fitted_max[i] = fitted_max[i].max(f);
        }
        coefficients.push(fit.all_coefficients());
    }
    let k = d + 1;
    let column = |j: usize| coefficients.iter().map(|c: &Vec<f64>| c[j]).collect::<Vec<f64>>();
    let mean = (0..k).map(|j| column(j).iter().sum::<f64>() / runs as f64).collect();
    let sd = (0..k).map(|j| population_sd(&column(j))).collect();
    Ok(PerturbedGlm {
        amplitude,
        mean,
        sd,
        fitted_mean: fitted_sum.iter().map(|s| s / runs as f64).collect(),
        fitted_min,
        fitted_max,
        coefficients,
    })
}
