use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::quarter::Quarter;
use super::series::{rate_over, Indicator, QuarterlySeries};
use super::spec::{FeatureForm, FeatureSpec, ModelSpec, TargetForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Shortest panel accepted by [`assemble_dataset`]. Keeps repeated 10-fold
/// cross-validation folds at four or more rows.
pub const DEFAULT_MIN_ROWS: usize = 40;

/// Series available for one country, keyed by indicator.
pub type SeriesBundle = BTreeMap<Indicator, QuarterlySeries>;

/// Aligned feature matrix and target for one country and one model spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryDataset {
    pub country: String,
    pub spec: ModelSpec,
    quarters: Vec<Quarter>,
    x: Matrix,
    y: Vec<f64>,
    feature_names: Vec<String>,
}

impl CountryDataset {
    /// Builds a dataset from already-aligned parts. Only shapes and finiteness are
    /// checked; the minimum panel length is enforced by [`assemble_dataset`].
    pub fn from_parts(
        country: impl Into<String>,
        spec: ModelSpec,
        quarters: Vec<Quarter>,
        x: Matrix,
        y: Vec<f64>,
    ) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        if quarters.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: quarters.len(),
                right: y.len(),
            });
        }
        let feature_names = spec.feature_names();
        if feature_names.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                found: x.cols(),
            });
        }
        for w in quarters.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Unordered(w[1]));
            }
        }
        if let Some(i) = (0..y.len()).find(|&i| !y[i].is_finite() || x.row(i).iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite(quarters[i]));
        }
        Ok(CountryDataset {
            country: country.into(),
            spec,
            quarters,
            x,
            y,
            feature_names,
        })
    }

    /// Dataset over anonymous pass-through features named `names`, with consecutive
    /// quarters starting at 2000-Q1. Used for synthetic experiments.
    pub fn synthetic(names: &[&str], x: Matrix, y: Vec<f64>) -> Result<Self> {
        let features = names
            .iter()
            .map(|n| FeatureSpec::new(Indicator::Custom(n.to_string()), FeatureForm::AsIs))
            .collect();
        let spec = ModelSpec::new("synthetic", features, TargetForm::HpiNominal)?;
        let start = Quarter::new(2000, 1)?;
        let quarters = (0..y.len()).map(|i| start.offset(i as i64)).collect();
        Self::from_parts("SYN", spec, quarters, x, y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn quarters(&self) -> &[Quarter] {
        &self.quarters
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.column(j)
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f.eq_ignore_ascii_case(name))
    }

    /// Rows `idx` in the given order. Quarters stay attached to their rows, so the
    /// result is only a valid dataset when `idx` is increasing.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        CountryDataset {
            country: self.country.clone(),
            spec: self.spec.clone(),
            quarters: idx.iter().map(|&i| self.quarters[i]).collect(),
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// First `n - k` rows.
    pub fn without_last(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.n().saturating_sub(k)).collect();
        self.select_rows(&keep)
    }

    /// Copy with feature column `j` replaced.
    pub fn with_column(&self, j: usize, values: &[f64]) -> Self {
        let mut out = self.clone();
        out.x.set_column(j, values);
        out
    }

    /// Copy with the target replaced.
    pub fn with_target(&self, y: Vec<f64>) -> Self {
        let mut out = self.clone();
        out.y = y;
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub min_rows: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            min_rows: DEFAULT_MIN_ROWS,
        }
    }
}

fn percent_rate(series: &QuarterlySeries, lag: i64) -> Result<QuarterlySeries> {
    Ok(rate_over(series, lag)?.scaled(100.0))
}

fn transformed_feature(bundle: &SeriesBundle, feature: &FeatureSpec) -> Result<QuarterlySeries> {
    let lag = match feature.form {
        FeatureForm::Nominal | FeatureForm::AsIs => None,
        FeatureForm::Rate4q => Some(4),
        FeatureForm::Rate12q => Some(12),
    };
    match (bundle.get(&feature.indicator), lag) {
        (Some(s), None) => Ok(s.clone()),
        (Some(s), Some(lag)) => percent_rate(s, lag),
        (None, Some(_)) => feature
            .indicator
            .rate_counterpart()
            .and_then(|alt| bundle.get(&alt))
            .cloned()
            .ok_or_else(|| Error::MissingIndicator(feature.indicator.code().to_string())),
        (None, None) => Err(Error::MissingIndicator(feature.indicator.code().to_string())),
    }
}

/// Applies the spec's per-feature forms and aligns features and target on the
/// quarters where every one of them is present.
pub fn assemble_dataset(spec: &ModelSpec, bundle: &SeriesBundle, country: &str) -> Result<CountryDataset> {
    assemble_dataset_with(spec, bundle, country, AssembleOptions::default())
}

pub fn assemble_dataset_with(
    spec: &ModelSpec,
    bundle: &SeriesBundle,
    country: &str,
    options: AssembleOptions,
) -> Result<CountryDataset> {
    spec.validate()?;
    let hpi = bundle
        .get(&Indicator::Hpi)
        .ok_or_else(|| Error::MissingIndicator(Indicator::Hpi.code().to_string()))?;
    let target = match spec.target {
        TargetForm::HpiNominal => hpi.clone(),
        TargetForm::HpiRate12q => percent_rate(hpi, 12)?,
    };
    let features = spec
        .features
        .iter()
        .map(|f| transformed_feature(bundle, f))
        .collect::<Result<Vec<_>>>()?;

    let quarters: Vec<Quarter> = target
        .points()
        .iter()
        .map(|p| p.quarter)
        .filter(|q| features.iter().all(|f| f.get(*q).is_some()))
        .collect();
    if quarters.len() < options.min_rows {
        return Err(Error::PanelTooShort {
            found: quarters.len(),
            minimum: options.min_rows,
        });
    }
    let mut x = Matrix::zeros(quarters.len(), features.len());
    let mut y = Vec::with_capacity(quarters.len());
    for (i, q) in quarters.iter().enumerate() {
        y.push(target.get(*q).unwrap());
        for (j, f) in features.iter().enumerate() {
            x.set(i, j, f.get(*q).unwrap());
        }
    }
    CountryDataset::from_parts(country, spec.clone(), quarters, x, y)
}
