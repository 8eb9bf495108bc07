use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::quarter::{Date, Quarter};
use crate::error::{Error, Result};

/// Macro-economic indicator carried by a series.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Indicator {
    Hpi,
    CpiRate,
    Gdp,
    GdpRate,
    Tr10y,
    CbRate,
    EcbAssets,
    FedAssets,
    RentIndex,
    Unemployment,
    Custom(String),
}

impl Indicator {
    pub const BUILTIN: [Indicator; 10] = [
        Indicator::Hpi,
        Indicator::CpiRate,
        Indicator::Gdp,
        Indicator::GdpRate,
        Indicator::Tr10y,
        Indicator::CbRate,
        Indicator::EcbAssets,
        Indicator::FedAssets,
        Indicator::RentIndex,
        Indicator::Unemployment,
    ];

    /// Stable upper-case code used in manifests and error messages.
    pub fn code(&self) -> &str {
        match self {
            Indicator::Hpi => "HPI",
            Indicator::CpiRate => "CPI_RATE",
            Indicator::Gdp => "GDP",
            Indicator::GdpRate => "GDP_RATE",
            Indicator::Tr10y => "TR10Y",
            Indicator::CbRate => "CB_RATE",
            Indicator::EcbAssets => "ECB_ASSETS",
            Indicator::FedAssets => "FED_ASSETS",
            Indicator::RentIndex => "RENT_INDEX",
            Indicator::Unemployment => "UNEMPLOYMENT",
            Indicator::Custom(name) => name,
        }
    }

    /// Short column label used for feature names.
    pub fn label(&self) -> &str {
        match self {
            Indicator::CpiRate => "CPI",
            Indicator::GdpRate => "GDP",
            Indicator::EcbAssets => "ECB",
            Indicator::FedAssets => "FED",
            Indicator::RentIndex => "RENT",
            other => other.code(),
        }
    }

    /// The pre-computed growth-rate indicator that can stand in for a rate transform
    /// of this level indicator.
    pub fn rate_counterpart(&self) -> Option<Indicator> {
        match self {
            Indicator::Gdp => Some(Indicator::GdpRate),
            _ => None,
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        let ind = match key.as_str() {
            "HPI" => Indicator::Hpi,
            "CPI" | "CPI_RATE" | "INFLATION" => Indicator::CpiRate,
            "GDP" => Indicator::Gdp,
            "GDP_RATE" => Indicator::GdpRate,
            "TR" | "TR10Y" | "TR_10Y" | "TREASURY" => Indicator::Tr10y,
            "CB_RATE" | "IR" | "POLICY_RATE" => Indicator::CbRate,
            "ECB" | "ECB_ASSETS" => Indicator::EcbAssets,
            "FED" | "FED_ASSETS" => Indicator::FedAssets,
            "RENT" | "RENTS" | "RENT_INDEX" => Indicator::RentIndex,
            "UNEMPLOYMENT" | "JOBLESS" => Indicator::Unemployment,
            "" => return Err(Error::UnknownIndicator(s.to_string())),
            _ => Indicator::Custom(key),
        };
        Ok(ind)
    }
}

/// Raw observations at native frequency (daily, monthly or quarterly), sorted by date.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatedSeries {
    points: Vec<(Date, f64)>,
}

impl DatedSeries {
    /// Sorts by date. When a date repeats, the later row wins.
    pub fn from_unsorted(mut points: Vec<(Date, f64)>) -> Self {
        points.sort_by_key(|(d, _)| *d);
        let mut out: Vec<(Date, f64)> = Vec::with_capacity(points.len());
        for (d, v) in points {
            match out.last_mut() {
                Some(last) if last.0 == d => last.1 = v,
                _ => out.push((d, v)),
            }
        }
        DatedSeries { points: out }
    }

    pub fn points(&self) -> &[(Date, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub quarter: Quarter,
    pub value: f64,
    /// True when the value was produced by interpolation rather than observed.
    pub interpolated: bool,
}

/// One indicator for one country at quarterly frequency. Missing quarters are simply
/// absent from `points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterlySeries {
    pub country: String,
    pub indicator: Indicator,
    pub units: String,
    points: Vec<Observation>,
}

impl QuarterlySeries {
    pub fn new(
        country: impl Into<String>,
        indicator: Indicator,
        points: Vec<Observation>,
    ) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].quarter <= w[0].quarter {
                return Err(Error::Unordered(w[1].quarter));
            }
        }
        if let Some(bad) = points.iter().find(|p| !p.value.is_finite()) {
            return Err(Error::NonFinite(bad.quarter));
        }
        Ok(QuarterlySeries {
            country: country.into(),
            indicator,
            units: String::new(),
            points,
        })
    }

    /// Builds an observed (non-interpolated) series from `(quarter, value)` pairs.
    pub fn from_values(
        country: impl Into<String>,
        indicator: Indicator,
        values: impl IntoIterator<Item = (Quarter, f64)>,
    ) -> Result<Self> {
        let points = values
            .into_iter()
            .map(|(quarter, value)| Observation {
                quarter,
                value,
                interpolated: false,
            })
            .collect();
        Self::new(country, indicator, points)
    }

    /// Consecutive quarters starting at `start`.
    pub fn contiguous(
        country: impl Into<String>,
        indicator: Indicator,
        start: Quarter,
        values: &[f64],
    ) -> Result<Self> {
        Self::from_values(
            country,
            indicator,
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (start.offset(i as i64), *v)),
        )
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_quarter(&self) -> Option<Quarter> {
        self.points.first().map(|p| p.quarter)
    }

    pub fn last_quarter(&self) -> Option<Quarter> {
        self.points.last().map(|p| p.quarter)
    }

    pub fn get(&self, quarter: Quarter) -> Option<f64> {
        self.points
            .binary_search_by_key(&quarter, |p| p.quarter)
            .ok()
            .map(|i| self.points[i].value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Quarters missing between the first and last present quarter.
    pub fn gap_count(&self) -> usize {
        match (self.first_quarter(), self.last_quarter()) {
            (Some(a), Some(b)) => a.span_to(b) as usize - self.points.len(),
            _ => 0,
        }
    }

    pub fn interpolated_count(&self) -> usize {
        self.points.iter().filter(|p| p.interpolated).count()
    }

    /// Same points with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.value *= factor;
        }
        out
    }

    pub(crate) fn with_points(&self, indicator: Indicator, points: Vec<Observation>) -> Self {
        QuarterlySeries {
            country: self.country.clone(),
            indicator,
            units: self.units.clone(),
            points,
        }
    }
}

/// Emits, for every calendar quarter between the first and last raw observation, the
/// last observation dated inside that quarter. Quarters without any observation are
/// left out (gaps).
pub fn resample_end_of_quarter(
    raw: &DatedSeries,
    country: &str,
    indicator: Indicator,
) -> Result<QuarterlySeries> {
    let mut points: Vec<Observation> = Vec::new();
    for &(date, value) in raw.points() {
        let quarter = date.quarter();
        match points.last_mut() {
            Some(last) if last.quarter == quarter => last.value = value,
            _ => points.push(Observation {
                quarter,
                value,
                interpolated: false,
            }),
        }
    }
    QuarterlySeries::new(country, indicator, points)
}

/// Fills interior gaps by linear interpolation in quarter index. Leading and trailing
/// quarters are never extrapolated.
pub fn fill_gaps_linear(series: &QuarterlySeries) -> Result<QuarterlySeries> {
    let pts = series.points();
    if pts.is_empty() {
        return Err(Error::EmptySeries);
    }
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: pts.len(),
        });
    }
    let mut out = Vec::with_capacity(series.first_quarter().unwrap().span_to(series.last_quarter().unwrap()) as usize);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        out.push(a);
        let steps = b.quarter.ordinal() - a.quarter.ordinal();
        for s in 1..steps {
            let t = s as f64 / steps as f64;
            out.push(Observation {
                quarter: a.quarter.offset(s),
                value: a.value + t * (b.value - a.value),
                interpolated: true,
            });
        }
    }
    out.push(*pts.last().unwrap());
    Ok(series.with_points(series.indicator.clone(), out))
}

/// Relative change over `lag` quarters with the current value as denominator:
/// `(v[i] - v[i-lag]) / v[i]`. The output starts `lag` quarters after the input.
pub fn rate_over(series: &QuarterlySeries, lag: i64) -> Result<QuarterlySeries> {
    if lag < 1 {
        return Err(Error::InvalidParameter("rate lag must be positive".to_string()));
    }
    let pts = series.points();
    if pts.len() <= lag as usize {
        return Err(Error::TooFewPoints {
            needed: lag as usize + 1,
            found: pts.len(),
        });
    }
    let mut out = Vec::new();
    let mut j = 0usize;
    for p in pts {
        let target = p.quarter.offset(-lag);
        while j < pts.len() && pts[j].quarter < target {
            j += 1;
        }
        if j < pts.len() && pts[j].quarter == target {
            let past = pts[j];
            if p.value == 0.0 {
                return Err(Error::DivisionByZero(p.quarter));
            }
            out.push(Observation {
                quarter: p.quarter,
                value: (p.value - past.value) / p.value,
                interpolated: p.interpolated || past.interpolated,
            });
        }
    }
    Ok(series.with_points(series.indicator.clone(), out))
}

/// Twelve-quarter rate `(v[i] - v[i-12]) / v[i]`.
pub fn rate_12q(series: &QuarterlySeries) -> Result<QuarterlySeries> {
    rate_over(series, 12)
}

/// Four-quarter (annual) rate `(v[i] - v[i-4]) / v[i]`.
pub fn rate_4q(series: &QuarterlySeries) -> Result<QuarterlySeries> {
    rate_over(series, 4)
}
