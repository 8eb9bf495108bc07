use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};

const MIN_LENGTH: usize = 20;

/// Deterministic terms of the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Regression {
    #[default]
    Const,
    ConstTrend,
}

impl Regression {
    pub fn code(&self) -> &'static str {
        match self {
            Regression::Const => "c",
            Regression::ConstTrend => "ct",
        }
    }
}

impl fmt::Display for Regression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Regression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c" | "const" | "constant" => Ok(Regression::Const),
            "ct" | "trend" | "const_trend" | "const-trend" => Ok(Regression::ConstTrend),
            _ => Err(Error::InvalidParameter(alloc::format!("unknown ADF regression '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags: usize,
    pub regression: Regression,
    /// Observations in the test regression.
    pub nobs: usize,
}

/// floor(4 (n/100)^{1/4}).
pub fn schwert_lags(n: usize) -> usize {
    libm::floor(4.0 * libm::pow(n as f64 / 100.0, 0.25)) as usize
}

/// Augmented Dickey-Fuller test:
/// `Δy_t = α (+ βt) + γ y_{t-1} + Σ δ_i Δy_{t-i} + ε_t`, statistic = t-ratio of γ.
pub fn adf_test(series: &[f64], regression: Regression, max_lags: Option<usize>) -> Result<AdfResult> {
    let n = series.len();
    if n < MIN_LENGTH {
        return Err(Error::SeriesTooShort {
            found: n,
            needed: MIN_LENGTH,
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("ADF input contains non-finite values".into()));
    }
    let lags = max_lags.unwrap_or_else(|| schwert_lags(n));
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let det = match regression {
        Regression::Const => 1,
        Regression::ConstTrend => 2,
    };
    let cols = 1 + det + lags;
    let nobs = dy.len().saturating_sub(lags);
    if nobs <= cols + 1 {
        return Err(Error::SeriesTooShort {
            found: n,
            needed: lags + cols + 3,
        });
    }
    let mut x = Matrix::zeros(nobs, cols);
    let mut b = Vec::with_capacity(nobs);
    for (row, t) in (lags..dy.len()).enumerate() {
        // dy[t] = y[t+1] - y[t]; the lagged level is y[t].
        x.set(row, 0, series[t]);
        x.set(row, 1, 1.0);
        if regression == Regression::ConstTrend {
            x.set(row, 2, (t + 1) as f64);
        }
        for i in 1..=lags {
            x.set(row, det + i, dy[t - i]);
        }
        b.push(dy[t]);
    }
    let qr = Qr::new(&x)?;
    if !qr.deficient_columns().is_empty() {
        return Err(Error::Singular);
    }
    let coef = qr.solve(&b)?;
    let fitted = x.mul_vec(&coef);
    let ssr: f64 = b.iter().zip(&fitted).map(|(o, f)| (o - f) * (o - f)).sum();
    let sigma2 = ssr / (nobs - cols) as f64;
    let cov = qr.unscaled_covariance()?;
    let se = libm::sqrt(sigma2 * cov.get(0, 0));
    if se == 0.0 || !se.is_finite() {
        return Err(Error::Singular);
    }
    let statistic = coef[0] / se;
    Ok(AdfResult {
        statistic,
        p_value: adf_p_value(statistic, dy.len(), regression),
        lags,
        regression,
        nobs,
    })
}

const SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, 100_000.0];
const PROBS: [f64; 8] = [0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99];

// Dickey-Fuller percentiles by sample size (rows) and probability (columns).
#[allow(clippy::approx_constant)]
const CONST_TABLE: [[f64; 8]; 6] = [
    [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
    [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
    [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
    [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
    [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
    [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
];

const TREND_TABLE: [[f64; 8]; 6] = [
    [-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15],
    [-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24],
    [-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28],
    [-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31],
    [-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32],
    [-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33],
];

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.windows(2).position(|w| x >= w[0] && x <= w[1]).unwrap();
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// p-value of an ADF statistic for a regression on `n` differences: the
/// percentile table is interpolated first in sample size, then in the statistic,
/// and the result is clamped to [0.01, 0.99].
pub fn adf_p_value(statistic: f64, n: usize, regression: Regression) -> f64 {
    let table = match regression {
        Regression::Const => &CONST_TABLE,
        Regression::ConstTrend => &TREND_TABLE,
    };
    let mut quantiles = [0.0; 8];
    for (j, q) in quantiles.iter_mut().enumerate() {
        let column: Vec<f64> = table.iter().map(|row| row[j]).collect();
        *q = interp(&SIZES, &column, n as f64);
    }
    interp(&quantiles, &PROBS, statistic)
}

/// 1%, 5% and 10% critical values from the response surface
/// `c = b∞ + b1/n + b2/n² + b3/n³`.
pub fn adf_critical_values(n: usize, regression: Regression) -> [f64; 3] {
    const CONST: [[f64; 4]; 3] = [
        [-3.43035, -6.5393, -16.786, -79.433],
        [-2.86154, -2.8903, -4.234, -40.040],
        [-2.56677, -1.5384, -2.809, 0.0],
    ];
    const TREND: [[f64; 4]; 3] = [
        [-3.95877, -9.0531, -28.428, -134.155],
        [-3.41049, -4.3904, -9.036, -45.374],
        [-3.12705, -2.5856, -3.925, -22.380],
    ];
    let coef = match regression {
        Regression::Const => &CONST,
        Regression::ConstTrend => &TREND,
    };
    let t = n as f64;
    let mut out = [0.0; 3];
    for (o, c) in out.iter_mut().zip(coef) {
        *o = c[0] + c[1] / t + c[2] / (t * t) + c[3] / (t * t * t);
    }
    out
}
