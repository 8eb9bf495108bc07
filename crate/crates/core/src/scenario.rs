//! Full-factorial scenario grids evaluated through a trained model.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Indicator;
use crate::error::{Error, Result};
use crate::models::Predictor;

/// Largest grid [`build_grid`] accepts by default.
pub const DEFAULT_ROW_CAP: u64 = 10_000_000;
/// Bins in the prediction histogram.
pub const HISTOGRAM_BINS: usize = 50;
/// Quantile levels in [`GridSummary`].
pub const QUANTILES: [f64; 5] = [0.05, 0.25, 0.50, 0.75, 0.95];
/// Latest observed 12-quarter HPI change (percent) shown as reference lines.
pub const REFERENCE_VALUES: [(&str, f64); 4] = [("FR", 12.4), ("UK", 13.2), ("US", 4.3), ("CH", 8.7)];

/// One grid dimension: `count` equally spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Axis {
            name: name.into(),
            min,
            max,
            count,
        };
        axis.validate()?;
        Ok(axis)
    }

    fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::InvalidParameter("axis name is empty".into()));
        }
        if self.count < 2 {
            return Err(Error::InvalidParameter(alloc::format!(
                "axis {} needs at least 2 points, got {}",
                self.name,
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidParameter(alloc::format!(
                "axis {} needs finite min < max, got {}..{}",
                self.name,
                self.min,
                self.max
            )));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.name, self.min, self.max, self.count)
    }
}

/// Parses `name:min:max:count`.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::InvalidParameter(alloc::format!("axis '{s}' is not name:min:max:count"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let min = parts[1].parse().map_err(|_| bad())?;
        let max = parts[2].parse().map_err(|_| bad())?;
        let count = parts[3].parse().map_err(|_| bad())?;
        Axis::new(parts[0], min, max, count)
    }
}

/// GDP and CPI from -2 to 2 percent, ECB assets 6.5e6 ± 1e6 MEUR, treasury
/// yield 0 to 4 percent; 20 points each.
pub fn default_axes() -> Vec<Axis> {
    [
        ("GDP", -2.0, 2.0),
        ("CPI", -2.0, 2.0),
        ("ECB", 5.5e6, 7.5e6),
        ("TR10Y", 0.0, 4.0),
    ]
    .into_iter()
    .map(|(n, lo, hi)| Axis {
        name: n.to_string(),
        min: lo,
        max: hi,
        count: 20,
    })
    .collect()
}

/// Cartesian product of axes, enumerated lazily with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGrid {
    axes: Vec<Axis>,
    values: Vec<Vec<f64>>,
    len: usize,
}

impl ScenarioGrid {
    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Axis values of row `i`, written to `out` (one entry per axis).
    pub fn fill_row(&self, mut i: usize, out: &mut [f64]) {
        for a in (0..self.axes.len()).rev() {
            let c = self.axes[a].count;
            out[a] = self.values[a][i % c];
            i /= c;
        }
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.axes.len()];
        self.fill_row(i, &mut out);
        out
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len).map(|i| self.row(i))
    }
}

pub fn build_grid(axes: Vec<Axis>) -> Result<ScenarioGrid> {
    build_grid_with_cap(axes, DEFAULT_ROW_CAP)
}

pub fn build_grid_with_cap(axes: Vec<Axis>, cap: u64) -> Result<ScenarioGrid> {
    if axes.is_empty() {
        return Err(Error::InvalidParameter("scenario grid needs at least one axis".into()));
    }
    let mut total: u128 = 1;
    for a in &axes {
        a.validate()?;
        total = total.saturating_mul(a.count as u128);
    }
    if total > cap as u128 {
        return Err(Error::GridTooLarge { rows: total, cap });
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name.eq_ignore_ascii_case(&a.name)) {
            return Err(Error::InvalidParameter(alloc::format!("duplicate axis {}", a.name)));
        }
    }
    let values = axes.iter().map(Axis::values).collect();
    Ok(ScenarioGrid {
        axes,
        values,
        len: total as usize,
    })
}

fn axis_matches(axis: &str, feature: &str) -> bool {
    if axis.eq_ignore_ascii_case(feature) {
        return true;
    }
    match Indicator::from_str(axis) {
        Ok(ind) => ind.label().eq_ignore_ascii_case(feature) || ind.code().eq_ignore_ascii_case(feature),
        Err(_) => false,
    }
}

/// Maps grid axes onto a model's feature order. Features without an axis are held
/// at the corresponding entry of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBinding {
    feature_names: Vec<String>,
    axis_column: Vec<usize>,
    base: Vec<f64>,
}

impl GridBinding {
    pub fn new(feature_names: &[String], grid: &ScenarioGrid, base: Option<&[f64]>) -> Result<Self> {
        let expected = || feature_names.join(", ");
        let mut axis_column = Vec::with_capacity(grid.axes.len());
        for a in &grid.axes {
            let j = feature_names
                .iter()
                .position(|f| axis_matches(&a.name, f))
                .ok_or_else(|| Error::FeatureMismatch {
                    expected: expected(),
                    found: a.name.clone(),
                })?;
            if axis_column.contains(&j) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "two axes map to feature {}",
                    feature_names[j]
                )));
            }
            axis_column.push(j);
        }
        let base = match base {
            Some(b) if b.len() == feature_names.len() => b.to_vec(),
            Some(b) => {
                return Err(Error::DimensionMismatch {
                    expected: feature_names.len(),
                    found: b.len(),
                })
            }
            None => {
                if let Some(j) = (0..feature_names.len()).find(|j| !axis_column.contains(j)) {
                    return Err(Error::FeatureMismatch {
                        expected: expected(),
                        found: alloc::format!("no axis or fixed value for {}", feature_names[j]),
                    });
                }
                alloc::vec![0.0; feature_names.len()]
            }
        };
        Ok(GridBinding {
            feature_names: feature_names.to_vec(),
            axis_column,
            base,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Features not covered by any axis.
    pub fn fixed_features(&self) -> Vec<(&str, f64)> {
        (0..self.feature_names.len())
            .filter(|j| !self.axis_column.contains(j))
            .map(|j| (self.feature_names[j].as_str(), self.base[j]))
            .collect()
    }

    /// Predictions for grid rows `range`, in order.
    pub fn predict_range<P: Predictor + ?Sized>(
        &self,
        model: &P,
        grid: &ScenarioGrid,
        range: Range<usize>,
    ) -> Result<Vec<f64>> {
        let mut axis_vals = alloc::vec![0.0; grid.axes.len()];
        let mut x = self.base.clone();
        let mut out = Vec::with_capacity(range.len());
        for i in range {
            grid.fill_row(i, &mut axis_vals);
            for (v, &j) in axis_vals.iter().zip(&self.axis_column) {
                x[j] = *v;
            }
            out.push(model.predict(&x)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Values at [`QUANTILES`], linear interpolation between order statistics.
    pub quantiles: Vec<f64>,
    pub distinct: usize,
}

impl GridSummary {
    pub fn compute(predictions: &[f64]) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sorted = predictions.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let quantiles = QUANTILES
            .iter()
            .map(|&q| {
                let h = q * (n - 1) as f64;
                let lo = libm::floor(h) as usize;
                let hi = (lo + 1).min(n - 1);
                sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
            })
            .collect();
        let mut distinct = 1;
        for w in sorted.windows(2) {
            if w[1] != w[0] {
                distinct += 1;
            }
        }
        Ok(GridSummary {
            count: n,
            min: sorted[0],
            max: sorted[n - 1],
            mean: predictions.iter().sum::<f64>() / n as f64,
            quantiles,
            distinct,
        })
    }
}

/// Equal-width histogram over `[min, max]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn compute(values: &[f64], bins: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if bins == 0 {
            return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        let mut counts = alloc::vec![0; bins];
        for &v in values {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Histogram { edges, counts })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub country: String,
    pub model_id: String,
    pub feature_names: Vec<String>,
    pub axes: Vec<Axis>,
    /// Features held fixed because no axis covers them.
    pub fixed: Vec<(String, f64)>,
    pub predictions: Vec<f64>,
    pub summary: GridSummary,
    pub histogram: Histogram,
    /// Latest observed target value of the training data, when known.
    pub current_value: Option<f64>,
}

impl ScenarioReport {
    pub fn from_predictions(binding: &GridBinding, grid: &ScenarioGrid, predictions: Vec<f64>) -> Result<Self> {
        if predictions.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: predictions.len(),
                right: grid.len(),
            });
        }
        Ok(ScenarioReport {
            country: String::new(),
            model_id: String::new(),
            feature_names: binding.feature_names.clone(),
            axes: grid.axes.clone(),
            fixed: binding
                .fixed_features()
                .into_iter()
                .map(|(n, v)| (n.to_string(), v))
                .collect(),
            summary: GridSummary::compute(&predictions)?,
            histogram: Histogram::compute(&predictions, HISTOGRAM_BINS)?,
            predictions,
            current_value: None,
        })
    }

    pub fn with_context(mut self, country: impl Into<String>, model_id: impl Into<String>, current: Option<f64>) -> Self {
        self.country = country.into();
        self.model_id = model_id.into();
        self.current_value = current;
        self
    }
}

/// Evaluates every grid row. `base` supplies values for features the grid does not
/// cover; axes are matched to features by name or indicator alias.
pub fn predict_grid<P: Predictor + ?Sized>(model: &P, grid: &ScenarioGrid, base: Option<&[f64]>) -> Result<ScenarioReport> {
    let binding = GridBinding::new(model.feature_names(), grid, base)?;
    let predictions = binding.predict_range(model, grid, 0..grid.len())?;
    ScenarioReport::from_predictions(&binding, grid, predictions)
}
