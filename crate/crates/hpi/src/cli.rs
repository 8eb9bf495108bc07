//! Command-line front-end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use hpi_core::baselines::{
    benchmark_from_holdouts, fit_glm, linear_inversion, perturbed_glm_ensemble, BenchmarkConfig, Deterministic,
};
use hpi_core::data::{builtin_specs, hpi_correlation_matrix, CountryDataset, ModelSpec};
use hpi_core::diagnostics::{adf_test, HoldoutReport, Regression};
use hpi_core::metrics::FitStatistics;
use hpi_core::models::{filter_importance, tree_importance, train, Learner, LearnerConfig, TrainedModel};
use hpi_core::scenario::{build_grid, default_axes, Axis};
use serde_json::json;

use crate::artifact::{short_hash, slug, ModelArtifact, RunKey};
use crate::error::{Error, Result};
use crate::ingest::{build_dataset, load_all_hpi, load_country};
use crate::io::{dataset_csv, write_atomic};
use crate::manifest::RunManifest;
use crate::parallel;
use crate::report::{self, AdfRow};

pub const DEFAULT_RUNS: usize = 600;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "hpi", version, about = "House price index modelling from macro-economic factors")]
pub struct Cli {
    /// Run manifest (TOML).
    #[arg(long, env = "HPI_MANIFEST", global = true)]
    pub manifest: Option<PathBuf>,
    /// Output directory; defaults to the manifest's `run.out`, then `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base seed; run `r` uses `seed + r`
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ensemble size (default 600)
    #[arg(long, global = true)]
    pub runs: Option<usize>,
    /// Restrict to these countries (repeatable).
    #[arg(long = "country", global = true)]
    pub countries: Vec<String>,
    /// Model configuration name, e.g. `3-param` or `ECB-1yr`.
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// `knn` or `treebag`.
    #[arg(long, global = true)]
    pub learner: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load every configured series, report coverage and dump assembled datasets.
    Ingest,
    /// Run the seeded ensemble and write statistics, runs, importance and the model.
    Fit,
    /// Permutation, stationarity and hold-out diagnostics.
    Diagnose {
        #[command(subcommand)]
        which: Diagnose,
    },
    /// Evaluate a trained model over a full-factorial scenario grid.
    PredictGrid {
        /// `name:min:max:count`, repeatable; replaces the manifest and default axes.
        #[arg(long = "axis")]
        axes: Vec<String>,
        /// Also write every grid row with its prediction.
        #[arg(long)]
        full: bool,
        /// Use a saved model artifact instead of training one.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Four-quarter hold-out comparison of VAR, linear inversion, GLM and the learners.
    Benchmark,
    /// Pairwise correlation of the countries' HPI series.
    Correlate,
}

#[derive(Debug, Subcommand)]
pub enum Diagnose {
    /// Ensemble statistics after permuting each feature and all features.
    Permute,
    /// Augmented Dickey-Fuller test on the residuals of every fitted model in the output directory.
    Adf {
        /// `c` (constant) or `ct` (constant and trend).
        #[arg(long, default_value = "c")]
        regression: String,
        /// Lagged differences; defaults to the Schwert rule.
        #[arg(long)]
        lags: Option<usize>,
    },
    /// Train without the last four quarters and predict them.
    Holdout,
}

struct Context {
    manifest: Option<RunManifest>,
    out: PathBuf,
    seed: u64,
    runs: usize,
    countries: Vec<String>,
    spec: Option<String>,
    learner: Option<String>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let manifest = cli.manifest.as_deref().map(RunManifest::load).transpose()?;
        let run = manifest.as_ref().map(|m| m.run.clone()).unwrap_or_default();
        let out = match (&cli.out, &run.out, &manifest) {
            (Some(o), _, _) => o.clone(),
            (None, Some(o), Some(m)) => m.resolve(o),
            _ => PathBuf::from("out"),
        };
        let runs = cli.runs.or(run.runs).unwrap_or(DEFAULT_RUNS);
        if runs == 0 {
            return Err(Error::config("runs must be >= 1"));
        }
        Ok(Context {
            out,
            seed: cli.seed.or(run.seed).unwrap_or(DEFAULT_SEED),
            runs,
            countries: cli.countries.iter().map(|c| c.to_ascii_uppercase()).collect(),
            spec: cli.spec.clone().or(run.spec),
            learner: cli.learner.clone().or(run.learner),
            manifest,
        })
    }

    fn manifest(&self) -> Result<&RunManifest> {
        let m = self
            .manifest
            .as_ref()
            .ok_or_else(|| Error::config("no manifest given (use --manifest or HPI_MANIFEST)"))?;
        m.validate()?;
        Ok(m)
    }

    fn spec_or(&self, default: &str) -> Result<ModelSpec> {
        Ok(ModelSpec::builtin(self.spec.as_deref().unwrap_or(default))?)
    }

    fn learner_or(&self, default: Learner) -> Result<Learner> {
        match &self.learner {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::config(format!("unknown learner '{s}' (valid: knn, treebag)"))),
        }
    }

    fn countries(&self) -> Result<Vec<String>> {
        let m = self.manifest()?;
        if self.countries.is_empty() {
            return Ok(m.country_names());
        }
        for c in &self.countries {
            if !m.countries.contains_key(c) {
                return Err(Error::config(format!(
                    "country {c} is not configured (have: {})",
                    m.country_names().join(", ")
                )));
            }
        }
        Ok(self.countries.clone())
    }

    fn learner_config(&self) -> Result<LearnerConfig> {
        Ok(self.manifest()?.learner_config())
    }

    fn dataset(&self, country: &str, spec: &ModelSpec) -> Result<CountryDataset> {
        let m = self.manifest()?;
        build_dataset(m, &load_country(m, country)?, spec)
    }

    fn key(&self, country: &str, spec: &ModelSpec, learner: &str, runs: usize) -> Result<RunKey> {
        Ok(RunKey {
            country: country.into(),
            spec: spec.clone(),
            learner: learner.into(),
            seed: self.seed,
            runs,
            min_rows: self.manifest()?.min_rows(),
            config: self.learner_config()?,
        })
    }

    /// Path of a table covering several countries, named by a hash over their keys.
    fn combined(&self, stem: &str, keys: &[RunKey]) -> PathBuf {
        let mut all = keys.to_vec();
        all.sort_by(|a, b| a.country.cmp(&b.country));
        let joined: String = all.iter().map(RunKey::hash).collect();
        let tag = short_hash(joined.as_bytes());
        let first = &all[0];
        self.out
            .join(format!("{stem}_{}_{}_{tag}.csv", slug(&first.spec.name), first.learner))
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json value serializes");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn stats_line(s: &FitStatistics) -> String {
    format!(
        "M_COR={:.4} M_RMS={:.4} S_RMS={:.4} SD={:.4} M_MAE={:.4} M_MAPE={:.4}",
        s.m_cor, s.m_rms, s.s_rms, s.sd, s.m_mae, s.m_mape
    )
}

pub fn run(cli: &Cli) -> Result<()> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Ingest => cmd_ingest(&ctx),
        Command::Fit => cmd_fit(&ctx),
        Command::Diagnose { which } => match which {
            Diagnose::Permute => cmd_permute(&ctx),
            Diagnose::Adf { regression, lags } => cmd_adf(&ctx, regression, *lags),
            Diagnose::Holdout => cmd_holdout(&ctx),
        },
        Command::PredictGrid { axes, full, model } => cmd_predict_grid(&ctx, axes, *full, model.as_deref()),
        Command::Benchmark => cmd_benchmark(&ctx),
        Command::Correlate => cmd_correlate(&ctx),
    }
}

fn cmd_ingest(ctx: &Context) -> Result<()> {
    let m = ctx.manifest()?;
    let specs = match &ctx.spec {
        Some(s) => vec![ModelSpec::builtin(s)?],
        None => builtin_specs(),
    };
    let dir = ctx.out.join("ingest");
    let mut coverage = Vec::new();
    for country in ctx.countries()? {
        let data = load_country(m, &country)?;
        for c in &data.coverage {
            println!(
                "{} {} {}..{} quarters={} gaps={} interpolated={}",
                c.country,
                c.indicator.code(),
                c.first.map(|q| q.to_string()).unwrap_or_default(),
                c.last.map(|q| q.to_string()).unwrap_or_default(),
                c.quarters,
                c.gaps,
                c.interpolated
            );
        }
        coverage.extend(data.coverage.iter().cloned());
        for spec in &specs {
            let ds = match build_dataset(m, &data, spec) {
                Ok(ds) => ds,
                Err(e) if ctx.spec.is_none() => {
                    println!("skipped {e}");
                    continue;
                }
                Err(e) => return Err(e),
            };
            let path = dir.join(format!("{}_{}.csv", country.to_ascii_lowercase(), slug(&spec.name)));
            write_atomic(&path, &dataset_csv(&ds))?;
            println!("{country} {}: {} rows -> {}", spec.name, ds.n(), path.display());
        }
    }
    write_atomic(&dir.join("coverage.csv"), &report::coverage_csv(&coverage))
}

fn cmd_fit(ctx: &Context) -> Result<()> {
    let spec = ctx.spec_or("3-param")?;
    let learner = ctx.learner_or(Learner::TreeBag)?;
    let cfg = ctx.learner_config()?;
    let mut rows = Vec::new();
    let mut keys = Vec::new();
    for country in ctx.countries()? {
        let data = ctx.dataset(&country, &spec)?;
        let key = ctx.key(&country, &spec, learner.code(), ctx.runs)?;
        let dir = key.dir(&ctx.out);
        let result = parallel::ensemble_fit(&data, learner, &cfg, ctx.runs, ctx.seed)
            .map_err(|e| Error::from(e).context(format!("{country} {}", spec.name)))?;
        let importance = match &result.last.model {
            TrainedModel::TreeBag(bag) => tree_importance(bag),
            _ => filter_importance(&data),
        };
        let quarters: Vec<String> = data.quarters().iter().map(|q| q.to_string()).collect();
        let stats = vec![(country.clone(), result.stats)];
        write_atomic(&dir.join("stats.csv"), &report::stats_csv(&stats))?;
        write_atomic(&dir.join("runs.csv"), &report::runs_csv(&result.records))?;
        write_atomic(&dir.join("importance.csv"), &report::importance_csv(&importance))?;
        write_atomic(
            &dir.join("residuals.csv"),
            &report::residuals_csv(&quarters, data.y(), &result.last.predictions),
        )?;
        ModelArtifact::new(&key, learner, &data, result.last.model.clone()).save(&dir.join("model.json"))?;
        write_json(
            &dir.join("meta.json"),
            &json!({
                "country": country,
                "spec": spec.name,
                "learner": learner.code(),
                "seed": ctx.seed,
                "runs": ctx.runs,
                "hash": key.hash(),
                "rows": data.n(),
                "first_quarter": quarters.first(),
                "last_quarter": quarters.last(),
                "mean_cv_rmse": result.mean_cv_rmse,
            }),
        )?;
        println!(
            "{country} {} {} runs={} {} top={} -> {}",
            spec.name,
            learner,
            ctx.runs,
            stats_line(&result.stats),
            importance.ranking().first().copied().unwrap_or("-"),
            dir.display()
        );
        rows.extend(stats);
        keys.push(key);
    }
    let path = ctx.combined("fit", &keys);
    write_atomic(&path, &report::stats_csv(&rows))?;
    println!("statistics -> {}", path.display());
    Ok(())
}

fn cmd_permute(ctx: &Context) -> Result<()> {
    let spec = ctx.spec_or("3-param")?;
    let learner = ctx.learner_or(Learner::TreeBag)?;
    let cfg = ctx.learner_config()?;
    for country in ctx.countries()? {
        let data = ctx.dataset(&country, &spec)?;
        let key = ctx.key(&country, &spec, learner.code(), ctx.runs)?;
        let rep = parallel::permutation_test(&data, learner, &cfg, ctx.runs, ctx.seed)
            .map_err(|e| Error::from(e).context(format!("{country} {}", spec.name)))?;
        let path = key.dir(&ctx.out).join("permutation.csv");
        write_atomic(&path, &report::permutation_csv(&country, &rep))?;
        println!("{country} {} baseline M_RMS={:.4}", spec.name, rep.baseline.m_rms);
        for p in &rep.permuted {
            println!(
                "{country} permuted {} M_RMS={:.4} ratio={:.3}",
                p.label,
                p.stats.m_rms,
                p.rms_ratio(&rep.baseline)
            );
        }
        println!("-> {}", path.display());
    }
    Ok(())
}

fn read_residuals(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Format {
        path: path.into(),
        message: e.to_string(),
    })?;
    let headers = reader.headers().map_err(|e| Error::Format {
        path: path.into(),
        message: e.to_string(),
    })?;
    let col = headers.iter().position(|h| h == "residual").ok_or_else(|| Error::Format {
        path: path.into(),
        message: "no residual column".into(),
    })?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })?;
        let v = rec[col].parse().map_err(|_| Error::Parse {
            path: path.into(),
            line: i + 2,
            message: format!("invalid residual '{}'", &rec[col]),
        })?;
        out.push(v);
    }
    Ok(out)
}

fn cmd_adf(ctx: &Context, regression: &str, lags: Option<usize>) -> Result<()> {
    let regression: Regression = regression
        .parse()
        .map_err(|_| Error::config(format!("unknown regression '{regression}' (valid: c, ct)")))?;
    let mut dirs: Vec<PathBuf> = match fs::read_dir(&ctx.out) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("residuals.csv").is_file() && p.join("meta.json").is_file())
            .collect(),
        Err(_) => Vec::new(),
    };
    dirs.sort();
    let mut rows = Vec::new();
    for dir in dirs {
        let meta_path = dir.join("meta.json");
        let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let meta: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: meta_path.clone(),
            message: e.to_string(),
        })?;
        let field = |k: &str| meta.get(k).and_then(|v| v.as_str()).unwrap_or("").to_string();
        let country = field("country");
        if !ctx.countries.is_empty() && !ctx.countries.contains(&country) {
            continue;
        }
        let residuals = read_residuals(&dir.join("residuals.csv"))?;
        let model = format!("{} {}", field("spec"), field("learner"));
        let result = adf_test(&residuals, regression, lags)
            .map_err(|e| Error::from(e).context(format!("{country} {model}")))?;
        println!(
            "{country} {model}: statistic={:.4} p={:.4} lags={}",
            result.statistic, result.p_value, result.lags
        );
        rows.push(AdfRow { country, model, result });
    }
    if rows.is_empty() {
        return Err(Error::config(format!(
            "no fitted models found in {} (run `hpi fit` first)",
            ctx.out.display()
        )));
    }
    let path = ctx.out.join("adf.csv");
    write_atomic(&path, &report::adf_csv(&rows))?;
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_holdout(ctx: &Context) -> Result<()> {
    if !ctx.manifest()?.holdout_enabled() {
        return Err(Error::config("hold-out is disabled in the manifest ([holdout] enabled = false)"));
    }
    let spec = ctx.spec_or("ECB-1yr")?;
    let learner = ctx.learner_or(Learner::Knn)?;
    let cfg = ctx.learner_config()?;
    let mut reports: Vec<HoldoutReport> = Vec::new();
    let mut keys = Vec::new();
    for country in ctx.countries()? {
        let data = ctx.dataset(&country, &spec)?;
        let key = ctx.key(&country, &spec, learner.code(), ctx.runs)?;
        let rep = parallel::holdout_last4(&data, learner, &cfg, ctx.runs, ctx.seed)
            .map_err(|e| Error::from(e).context(format!("{country} {}", spec.name)))?;
        let dir = key.dir(&ctx.out);
        write_atomic(&dir.join("holdout_stats.csv"), &report::holdout_stats_csv(std::slice::from_ref(&rep)))?;
        write_atomic(&dir.join("holdout_paths.csv"), &report::holdout_paths_csv(std::slice::from_ref(&rep)))?;
        let path: Vec<String> = rep.mean_path().iter().map(|v| format!("{v:.3}")).collect();
        let obs: Vec<String> = rep.observed.iter().map(|v| format!("{v:.3}")).collect();
        println!(
            "{country} {} {} predicted [{}] observed [{}] {}",
            spec.name,
            learner,
            path.join(", "),
            obs.join(", "),
            stats_line(&rep.stats)
        );
        reports.push(rep);
        keys.push(key);
    }
    let stats = ctx.combined("holdout", &keys);
    write_atomic(&stats, &report::holdout_stats_csv(&reports))?;
    let paths = ctx.combined("holdout_paths", &keys);
    write_atomic(&paths, &report::holdout_paths_csv(&reports))?;
    println!("-> {}", stats.display());
    Ok(())
}

fn grid_axes(ctx: &Context, flags: &[String]) -> Result<Vec<Axis>> {
    if !flags.is_empty() {
        return flags
            .iter()
            .map(|a| a.parse::<Axis>().map_err(|e| Error::config(format!("--axis {a}: {e}"))))
            .collect();
    }
    if let Some(axes) = ctx.manifest.as_ref().map(RunManifest::grid_axes).transpose()?.flatten() {
        return Ok(axes);
    }
    Ok(default_axes())
}

fn cmd_predict_grid(ctx: &Context, axis_flags: &[String], full: bool, model: Option<&Path>) -> Result<()> {
    let grid = build_grid(grid_axes(ctx, axis_flags)?)?;
    let mut jobs: Vec<(ModelArtifact, PathBuf)> = Vec::new();
    if let Some(path) = model {
        let art = ModelArtifact::load(path)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        jobs.push((art, dir));
    } else {
        let spec = ctx.spec_or("ECB-1yr")?;
        let learner = ctx.learner_or(Learner::Knn)?;
        let cfg = ctx.learner_config()?;
        for country in ctx.countries()? {
            let data = ctx.dataset(&country, &spec)?;
            let key = ctx.key(&country, &spec, learner.code(), 1)?;
            let model = train(&data, learner, &cfg, ctx.seed)
                .map_err(|e| Error::from(e).context(format!("{country} {}", spec.name)))?;
            jobs.push((ModelArtifact::new(&key, learner, &data, model), key.dir(&ctx.out)));
        }
    }
    for (art, dir) in jobs {
        let label = format!("{} {}", art.spec.name, art.learner);
        let rep = parallel::predict_grid(&art.model, &grid, Some(&art.last_row))
            .map_err(|e| Error::from(e).context(format!("{} {label}", art.country)))?
            .with_context(art.country.clone(), label.clone(), Some(art.last_target));
        write_atomic(&dir.join("grid_summary.csv"), &report::grid_summary_csv(&rep))?;
        write_atomic(&dir.join("grid_histogram.csv"), &report::histogram_csv(&rep))?;
        write_atomic(&dir.join("grid_reference.csv"), &report::reference_csv())?;
        if full {
            write_atomic(&dir.join("grid_predictions.csv"), &report::grid_predictions_csv(&grid, &rep))?;
        }
        let s = &rep.summary;
        let q: Vec<String> = s.quantiles.iter().map(|v| format!("{v:.3}")).collect();
        println!(
            "{} {label}: {} evaluations min={:.3} quantiles=[{}] max={:.3} current={:.3} -> {}",
            art.country,
            s.count,
            s.min,
            q.join(", "),
            s.max,
            art.last_target,
            dir.display()
        );
    }
    Ok(())
}

fn cmd_benchmark(ctx: &Context) -> Result<()> {
    let section = ctx.manifest()?.benchmark.clone().ok_or_else(|| {
        Error::config("benchmark needs a [benchmark] section in the manifest (var_p, var_deterministic, amplitude)")
    })?;
    let spec = ctx.spec_or("ECB-1yr")?;
    let var_deterministic: Deterministic = match &section.var_deterministic {
        None => Deterministic::default(),
        Some(s) => s
            .parse()
            .map_err(|_| Error::config(format!("[benchmark] unknown var_deterministic '{s}'")))?,
    };
    let config = BenchmarkConfig {
        learner: ctx.learner_config()?,
        runs: ctx.runs,
        seed: ctx.seed,
        var_p: section.var_p.unwrap_or(2),
        var_deterministic,
    };
    for country in ctx.countries()? {
        let data = ctx.dataset(&country, &spec)?;
        let key = ctx.key(&country, &spec, "benchmark", ctx.runs)?;
        let wrap = |e: hpi_core::Error| Error::from(e).context(format!("{country} {}", spec.name));
        let knn = parallel::holdout_last4(&data, Learner::Knn, &config.learner, config.runs, config.seed).map_err(wrap)?;
        let bag =
            parallel::holdout_last4(&data, Learner::TreeBag, &config.learner, config.runs, config.seed).map_err(wrap)?;
        let table = benchmark_from_holdouts(&data, &config, &knn, &bag).map_err(wrap)?;
        let li = linear_inversion(&data).map_err(wrap)?;
        let glm = fit_glm(&data).map_err(wrap)?;
        let perturbed = section
            .amplitude
            .map(|a| perturbed_glm_ensemble(&data, config.runs, a, config.seed))
            .transpose()
            .map_err(wrap)?;
        let dir = key.dir(&ctx.out);
        write_atomic(&dir.join("benchmark.csv"), &report::benchmark_csv(&table))?;
        write_atomic(&dir.join("li_coefficients.csv"), &report::coefficients_csv(&li, None))?;
        write_atomic(&dir.join("glm_coefficients.csv"), &report::coefficients_csv(&glm, perturbed.as_ref()))?;
        for m in &table.methods {
            let v: Vec<String> = m.values.iter().map(|x| format!("{x:.3}")).collect();
            println!(
                "{country} {:<10} [{}] change={:+.3} sign_correct={}",
                m.method,
                v.join(", "),
                m.change(),
                table.sign_correct(&m.method).unwrap_or(false)
            );
        }
        let v: Vec<String> = table.observed.iter().map(|x| format!("{x:.3}")).collect();
        println!("{country} {:<10} [{}] change={:+.3}", "Observed", v.join(", "), table.observed_change());
        println!("-> {}", dir.display());
    }
    Ok(())
}

fn cmd_correlate(ctx: &Context) -> Result<()> {
    let m = ctx.manifest()?;
    let mut hpi = load_all_hpi(m)?;
    if !ctx.countries.is_empty() {
        ctx.countries()?;
        hpi.retain(|c, _| ctx.countries.contains(c));
    }
    let matrix = hpi_correlation_matrix(&hpi)?;
    let path = ctx.out.join("correlation.csv");
    write_atomic(&path, &report::correlation_csv(&matrix))?;
    write_atomic(&ctx.out.join("correlation_overlap.csv"), &report::overlap_csv(&matrix))?;
    for (i, a) in matrix.countries.iter().enumerate() {
        let cells: Vec<String> = matrix.values[i]
            .iter()
            .map(|v| v.map_or("    -".to_string(), |x| format!("{x:5.2}")))
            .collect();
        println!("{a:>4} {}", cells.join(" "));
    }
    println!("-> {}", path.display());
    Ok(())
}
