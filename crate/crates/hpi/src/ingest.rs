//! Manifest-driven loading: raw files to aligned quarterly bundles and datasets.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hpi_core::data::{
    assemble_dataset_with, fill_gaps_linear, rate_over, resample_end_of_quarter, AssembleOptions, CountryDataset,
    FeatureForm, Indicator, ModelSpec, Quarter, QuarterlySeries, SeriesBundle,
};

use crate::error::{Error, Result};
use crate::io::{parse_series_csv, read_wide_hpi};
use crate::manifest::{RunManifest, SeriesEntry};

/// Per-series coverage after resampling and gap filling.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub country: String,
    pub indicator: Indicator,
    pub path: PathBuf,
    pub first: Option<Quarter>,
    pub last: Option<Quarter>,
    pub quarters: usize,
    /// Quarters missing inside the span before interpolation.
    pub gaps: usize,
    pub interpolated: usize,
}

#[derive(Debug, Clone)]
pub struct CountryData {
    pub country: String,
    pub bundle: SeriesBundle,
    pub coverage: Vec<Coverage>,
}

fn finish(
    series: QuarterlySeries,
    entry: &SeriesEntry,
    path: &Path,
) -> Result<(QuarterlySeries, Coverage)> {
    let gaps = series.gap_count();
    let wrap = |e: hpi_core::Error| Error::Format {
        path: path.into(),
        message: e.to_string(),
    };
    let mut s = if series.len() >= 2 { fill_gaps_linear(&series).map_err(wrap)? } else { series };
    if let Some(f) = entry.scale {
        s = s.scaled(f);
    }
    s = match entry.form()? {
        FeatureForm::Rate4q => rate_over(&s, 4).map_err(wrap)?.scaled(100.0),
        FeatureForm::Rate12q => rate_over(&s, 12).map_err(wrap)?.scaled(100.0),
        FeatureForm::Nominal | FeatureForm::AsIs => s,
    };
    if let Some(u) = &entry.units {
        s = s.with_units(u.clone());
    }
    let coverage = Coverage {
        country: s.country.clone(),
        indicator: s.indicator.clone(),
        path: path.into(),
        first: s.first_quarter(),
        last: s.last_quarter(),
        quarters: s.len(),
        gaps,
        interpolated: s.interpolated_count(),
    };
    Ok((s, coverage))
}

/// Reads one raw dated file and brings it to quarterly frequency.
pub fn load_series(
    manifest: &RunManifest,
    country: &str,
    indicator: Indicator,
    entry: &SeriesEntry,
) -> Result<(QuarterlySeries, Coverage)> {
    let path = manifest.resolve(&entry.path);
    let raw = parse_series_csv(&path)?;
    let q = resample_end_of_quarter(&raw, country, indicator).map_err(|e| Error::Format {
        path: path.clone(),
        message: e.to_string(),
    })?;
    if q.is_empty() {
        return Err(Error::EmptyFile { path });
    }
    finish(q, entry, &path)
}

/// HPI series of every country in the wide table, gaps filled.
pub fn load_wide_hpi(manifest: &RunManifest) -> Result<BTreeMap<String, (QuarterlySeries, Coverage)>> {
    let Some(entry) = &manifest.hpi else {
        return Ok(BTreeMap::new());
    };
    let path = manifest.resolve(&entry.path);
    read_wide_hpi(&path)?
        .into_iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(c, s)| Ok((c.to_ascii_uppercase(), finish(s, entry, &path)?)))
        .collect()
}

/// Everything configured for `country`: country entries override global ones, and
/// an HPI entry overrides the wide table.
pub fn load_country(manifest: &RunManifest, country: &str) -> Result<CountryData> {
    let key = country.to_ascii_uppercase();
    let own = manifest
        .countries
        .get(&key)
        .ok_or_else(|| Error::config(format!("country {key} is not configured (have: {})", manifest.country_names().join(", "))))?;
    let mut bundle = SeriesBundle::new();
    let mut coverage = Vec::new();
    if !own.contains_key(&Indicator::Hpi) {
        if let Some((s, c)) = load_wide_hpi(manifest)?.remove(&key) {
            bundle.insert(Indicator::Hpi, s);
            coverage.push(c);
        }
    }
    let mut entries: BTreeMap<&Indicator, &SeriesEntry> = manifest.global.iter().collect();
    entries.extend(own.iter());
    for (ind, entry) in entries {
        let (s, c) = load_series(manifest, &key, ind.clone(), entry)?;
        bundle.insert(ind.clone(), s);
        coverage.push(c);
    }
    Ok(CountryData {
        country: key,
        bundle,
        coverage,
    })
}

/// HPI for every configured country, for cross-country correlation.
pub fn load_all_hpi(manifest: &RunManifest) -> Result<BTreeMap<String, QuarterlySeries>> {
    let mut out = BTreeMap::new();
    let mut wide = load_wide_hpi(manifest)?;
    for (country, entries) in &manifest.countries {
        if let Some(e) = entries.get(&Indicator::Hpi) {
            out.insert(country.clone(), load_series(manifest, country, Indicator::Hpi, e)?.0);
        } else if let Some((s, _)) = wide.remove(country) {
            out.insert(country.clone(), s);
        }
    }
    Ok(out)
}

pub fn build_dataset(manifest: &RunManifest, data: &CountryData, spec: &ModelSpec) -> Result<CountryDataset> {
    let options = AssembleOptions {
        min_rows: manifest.min_rows(),
    };
    assemble_dataset_with(spec, &data.bundle, &data.country, options)
        .map_err(|e| Error::from(e).context(format!("{} {}", data.country, spec.name)))
}
