//! Residual statistics used to score fits.
//!
//! Conventions: `pred` is the model output, `obs` the observed target. MAPE follows
//! the literal definition `mean(|pred - obs| / obs)`: no ×100 factor and a signed
//! divisor, so negative targets give negative contributions. [`mape_abs`] divides by
//! `|obs|` instead.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::chi2_sf;

/// Default number of equal-width bins for [`chi2_pair`].
pub const DEFAULT_CHI2_BINS: usize = 10;

fn check(pred: &[f64], obs: &[f64]) -> Result<()> {
    if pred.len() != obs.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: obs.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    if pred.iter().chain(obs).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Root mean squared residual.
pub fn rms(pred: &[f64], obs: &[f64]) -> Result<f64> {
    check(pred, obs)?;
    let ss: f64 = pred.iter().zip(obs).map(|(p, o)| (p - o) * (p - o)).sum();
    Ok(libm::sqrt(ss / pred.len() as f64))
}

/// Mean absolute error.
pub fn mae(pred: &[f64], obs: &[f64]) -> Result<f64> {
    check(pred, obs)?;
    Ok(pred.iter().zip(obs).map(|(p, o)| (p - o).abs()).sum::<f64>() / pred.len() as f64)
}

/// Mean absolute percentage error with signed divisor and no ×100.
pub fn mape(pred: &[f64], obs: &[f64]) -> Result<f64> {
    check(pred, obs)?;
    if let Some(i) = obs.iter().position(|o| *o == 0.0) {
        return Err(Error::ZeroObserved(i));
    }
    Ok(pred.iter().zip(obs).map(|(p, o)| (p - o).abs() / o).sum::<f64>() / pred.len() as f64)
}

/// MAPE with `|obs|` as divisor.
pub fn mape_abs(pred: &[f64], obs: &[f64]) -> Result<f64> {
    check(pred, obs)?;
    if let Some(i) = obs.iter().position(|o| *o == 0.0) {
        return Err(Error::ZeroObserved(i));
    }
    Ok(pred.iter().zip(obs).map(|(p, o)| (p - o).abs() / o.abs()).sum::<f64>() / pred.len() as f64)
}

/// Population standard deviation (divide by N) of the residuals `obs - pred`.
pub fn residual_sd(pred: &[f64], obs: &[f64]) -> Result<f64> {
    check(pred, obs)?;
    let r: Vec<f64> = obs.iter().zip(pred).map(|(o, p)| o - p).collect();
    Ok(population_sd(&r))
}

pub(crate) fn population_sd(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let m = mean(v);
    libm::sqrt(v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64)
}

/// Pearson correlation. `None` when either input has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    check(a, b)?;
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(None);
    }
    Ok(Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0)))
}

/// Two-sample Pearson chi-squared comparison of the `pred` and `obs` histograms.
///
/// Both samples are binned into `bins` equal-width bins spanning their combined
/// range. Returns `(p_value, statistic / n)` where the p-value is the upper tail at
/// `bins - 1` degrees of freedom and `n` is the length of each sample.
pub fn chi2_pair(pred: &[f64], obs: &[f64], bins: usize) -> Result<(f64, f64)> {
    check(pred, obs)?;
    if bins < 2 {
        return Err(Error::InvalidParameter("chi2 needs at least 2 bins".into()));
    }
    if pred.len() < bins * 2 {
        return Err(Error::InvalidParameter(alloc::format!(
            "chi2 with {bins} bins needs at least {} points per sample",
            bins * 2
        )));
    }
    let (lo, hi) = pred
        .iter()
        .chain(obs)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if hi <= lo {
        return Err(Error::DegenerateRange);
    }
    let width = (hi - lo) / bins as f64;
    let bin_of = |v: f64| (((v - lo) / width) as usize).min(bins - 1);
    let mut a = vec![0.0f64; bins];
    let mut b = vec![0.0f64; bins];
    for v in pred {
        a[bin_of(*v)] += 1.0;
    }
    for v in obs {
        b[bin_of(*v)] += 1.0;
    }
    let na = pred.len() as f64;
    let nb = obs.len() as f64;
    let total = na + nb;
    let mut stat = 0.0;
    for i in 0..bins {
        let col = a[i] + b[i];
        if col == 0.0 {
            continue;
        }
        let ea = col * na / total;
        let eb = col * nb / total;
        stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    Ok((chi2_sf(stat, (bins - 1) as f64), stat / na))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LewisCategory {
    HighlyAccurate,
    Good,
    Reasonable,
    Inaccurate,
}

impl LewisCategory {
    pub fn label(&self) -> &'static str {
        match self {
            LewisCategory::HighlyAccurate => "highly accurate",
            LewisCategory::Good => "good",
            LewisCategory::Reasonable => "reasonable",
            LewisCategory::Inaccurate => "inaccurate",
        }
    }
}

/// Lewis forecast-quality band for a MAPE value. Boundary values go to the worse
/// (upper) band.
pub fn lewis_category(mape_value: f64) -> LewisCategory {
    if mape_value < 0.1 {
        LewisCategory::HighlyAccurate
    } else if mape_value < 0.2 {
        LewisCategory::Good
    } else if mape_value < 0.5 {
        LewisCategory::Reasonable
    } else {
        LewisCategory::Inaccurate
    }
}

/// Metrics of one fitted run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub cor: f64,
    pub rms: f64,
    pub mae: f64,
    pub mape: f64,
    pub chip: f64,
    pub chis: f64,
}

impl RunMetrics {
    /// Scores one prediction vector. Correlation is 0 when either side is constant.
    /// The chi-squared bins shrink to `n / 2` for short samples, and a sample whose
    /// values are all identical scores as identical histograms (p = 1, statistic 0).
    pub fn compute(pred: &[f64], obs: &[f64]) -> Result<Self> {
        let n = pred.len();
        let bins = DEFAULT_CHI2_BINS.min(n / 2).max(2);
        let (chip, chis) = if n >= 4 {
            match chi2_pair(pred, obs, bins) {
                Ok(v) => v,
                Err(Error::DegenerateRange) => (1.0, 0.0),
                Err(e) => return Err(e),
            }
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(RunMetrics {
            cor: pearson(pred, obs)?.unwrap_or(0.0),
            rms: rms(pred, obs)?,
            mae: mae(pred, obs)?,
            mape: mape(pred, obs)?,
            chip,
            chis,
        })
    }
}

/// Ensemble statistics row: means (`m_*`) and population standard deviations
/// (`s_*`) over runs, plus `sd`, the residual standard deviation of the last run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitStatistics {
    pub m_cor: f64,
    pub s_cor: f64,
    pub m_rms: f64,
    pub s_rms: f64,
    pub sd: f64,
    pub m_mae: f64,
    pub m_mape: f64,
    pub m_chip: f64,
    pub m_chis: f64,
}

impl FitStatistics {
    pub const COLUMNS: [&'static str; 9] = [
        "M_COR", "S_COR", "M_RMS", "S_RMS", "SD", "M_MAE", "M_MAPE", "M_CHIp", "M_CHIs",
    ];

    /// Aggregates in slice order, so the result does not depend on how runs were
    /// scheduled.
    pub fn aggregate(runs: &[RunMetrics], last_residual_sd: f64) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let col = |f: fn(&RunMetrics) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
        let cor = col(|r| r.cor);
        let rms = col(|r| r.rms);
        Ok(FitStatistics {
            m_cor: mean(&cor),
            s_cor: population_sd(&cor),
            m_rms: mean(&rms),
            s_rms: population_sd(&rms),
            sd: last_residual_sd,
            m_mae: mean(&col(|r| r.mae)),
            m_mape: mean(&col(|r| r.mape)),
            m_chip: mean(&col(|r| r.chip)),
            m_chis: mean(&col(|r| r.chis)),
        })
    }

    pub fn values(&self) -> [f64; 9] {
        [
            self.m_cor,
            self.s_cor,
            self.m_rms,
            self.s_rms,
            self.sd,
            self.m_mae,
            self.m_mape,
            self.m_chip,
            self.m_chis,
        ]
    }
}
