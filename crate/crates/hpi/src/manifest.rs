//! Run manifest: where the data files live and how each run is configured.
//!
//! ```toml
//! [run]
//! seed = 42
//! runs = 600
//! spec = "3-param"
//! learner = "treebag"
//! out = "out"
//!
//! [hpi]
//! path = "hpi_wide.csv"          # QUARTER,<country>,... feeds every country's HPI
//!
//! [global.TR10Y]                 # shared by every country unless overridden
//! path = "DGS10.csv"
//! units = "percent"
//!
//! [countries.CH.GDP]
//! path = "ch/gdp.csv"
//! form = "nominal"
//!
//! [countries.CH.CPI_RATE]
//! path = "ch/cpi_index.csv"
//! form = "rate_4q"               # index level turned into a 4-quarter percent rate
//! ```
//!
//! Relative paths resolve against the manifest's directory. Indicator keys accept
//! the codes and aliases understood by [`Indicator`]'s parser. Optional sections:
//! `[learner]` (folds, repeats, k_grid, bags, min_node, treebag_cv), `[grid]`
//! (axes = ["name:min:max:count", ...]), `[holdout]` (enabled) and `[benchmark]`
//! (var_p, var_deterministic, amplitude).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hpi_core::data::{FeatureForm, Indicator, DEFAULT_MIN_ROWS};
use hpi_core::models::{CvConfig, LearnerConfig, DEFAULT_BAGS, DEFAULT_K_GRID, DEFAULT_MIN_NODE};
use hpi_core::scenario::Axis;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub spec: Option<String>,
    pub learner: Option<String>,
    pub out: Option<PathBuf>,
    pub min_rows: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub path: PathBuf,
    /// `nominal`/`as_is` keep values; `rate_4q`/`rate_12q` turn a level into a
    /// percent rate over that many quarters.
    pub form: Option<String>,
    pub units: Option<String>,
    /// Multiplier applied before the form transform.
    pub scale: Option<f64>,
}

impl SeriesEntry {
    pub fn form(&self) -> Result<FeatureForm> {
        match &self.form {
            None => Ok(FeatureForm::AsIs),
            Some(f) => FeatureForm::parse(f)
                .ok_or_else(|| Error::config(format!("{}: unknown form '{f}'", self.path.display()))),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSection {
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub k_grid: Option<Vec<usize>>,
    pub bags: Option<usize>,
    pub min_node: Option<usize>,
    pub treebag_cv: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub axes: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoldoutSection {
    pub enabled: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSection {
    pub var_p: Option<usize>,
    pub var_deterministic: Option<String>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    run: RunSection,
    hpi: Option<SeriesEntry>,
    #[serde(default)]
    global: BTreeMap<String, SeriesEntry>,
    #[serde(default)]
    countries: BTreeMap<String, BTreeMap<String, SeriesEntry>>,
    #[serde(default)]
    learner: LearnerSection,
    grid: Option<GridSection>,
    holdout: Option<HoldoutSection>,
    benchmark: Option<BenchmarkSection>,
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub path: PathBuf,
    pub base_dir: PathBuf,
    pub run: RunSection,
    pub hpi: Option<SeriesEntry>,
    pub global: BTreeMap<Indicator, SeriesEntry>,
    pub countries: BTreeMap<String, BTreeMap<Indicator, SeriesEntry>>,
    pub learner: LearnerSection,
    pub grid: Option<GridSection>,
    pub holdout: Option<HoldoutSection>,
    pub benchmark: Option<BenchmarkSection>,
}

fn indicator_map(raw: BTreeMap<String, SeriesEntry>) -> Result<BTreeMap<Indicator, SeriesEntry>> {
    raw.into_iter()
        .map(|(k, v)| {
            let ind: Indicator = k
                .parse()
                .map_err(|_| Error::config(format!("unknown indicator key '{k}'")))?;
            Ok((ind, v))
        })
        .collect()
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile { path: path.into() });
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, &base)
    }

    pub fn parse(text: &str, path: &Path, base_dir: &Path) -> Result<Self> {
        let raw: RawManifest =
            toml::from_str(text).map_err(|e| Error::config(format!("{}: {}", path.display(), e.message())))?;
        let countries = raw
            .countries
            .into_iter()
            .map(|(c, m)| Ok((c.to_ascii_uppercase(), indicator_map(m)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(RunManifest {
            path: path.into(),
            base_dir: base_dir.into(),
            run: raw.run,
            hpi: raw.hpi,
            global: indicator_map(raw.global)?,
            countries,
            learner: raw.learner,
            grid: raw.grid,
            holdout: raw.holdout,
            benchmark: raw.benchmark,
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.into()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Checks that countries are configured, that every referenced file exists and
    /// that every form hint parses.
    pub fn validate(&self) -> Result<()> {
        if self.countries.is_empty() {
            return Err(Error::config("no countries configured"));
        }
        let entries = self
            .hpi
            .iter()
            .chain(self.global.values())
            .chain(self.countries.values().flat_map(|m| m.values()));
        for e in entries {
            e.form()?;
            let p = self.resolve(&e.path);
            if !p.exists() {
                return Err(Error::MissingFile { path: p });
            }
        }
        if let Some(g) = &self.grid {
            self.grid_axes_from(g)?;
        }
        Ok(())
    }

    pub fn country_names(&self) -> Vec<String> {
        self.countries.keys().cloned().collect()
    }

    pub fn min_rows(&self) -> usize {
        self.run.min_rows.unwrap_or(DEFAULT_MIN_ROWS)
    }

    pub fn learner_config(&self) -> LearnerConfig {
        let l = &self.learner;
        let defaults = CvConfig::default();
        LearnerConfig {
            cv: CvConfig {
                folds: l.folds.unwrap_or(defaults.folds),
                repeats: l.repeats.unwrap_or(defaults.repeats),
                seed: 0,
            },
            k_grid: l.k_grid.clone().unwrap_or_else(|| DEFAULT_K_GRID.to_vec()),
            n_bags: l.bags.unwrap_or(DEFAULT_BAGS),
            min_node: l.min_node.unwrap_or(DEFAULT_MIN_NODE),
            treebag_cv: l.treebag_cv.unwrap_or(false),
        }
    }

    fn grid_axes_from(&self, g: &GridSection) -> Result<Vec<Axis>> {
        g.axes
            .iter()
            .map(|a| a.parse::<Axis>().map_err(|e| Error::config(format!("[grid] {e}"))))
            .collect()
    }

    pub fn grid_axes(&self) -> Result<Option<Vec<Axis>>> {
        self.grid.as_ref().map(|g| self.grid_axes_from(g)).transpose()
    }

    pub fn holdout_enabled(&self) -> bool {
        self.holdout.as_ref().and_then(|h| h.enabled).unwrap_or(true)
    }
}
