//! CSV layouts of every report the CLI writes.

use hpi_core::baselines::{BenchmarkTable, PerturbedGlm, LinearCoefficients};
use hpi_core::data::{CorrelationMatrix, QuarterlySeries};
use hpi_core::diagnostics::{AdfResult, HoldoutReport, PermutationReport};
use hpi_core::metrics::FitStatistics;
use hpi_core::models::{ImportanceReport, RunRecord};
use hpi_core::scenario::{ScenarioGrid, ScenarioReport, QUANTILES, REFERENCE_VALUES};

use crate::io::{csv_bytes, fmt_f64};

fn stats_cells(s: &FitStatistics) -> Vec<String> {
    s.values().iter().map(|v| fmt_f64(*v)).collect()
}

fn header_with<'a>(lead: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    let mut h = lead.to_vec();
    h.extend_from_slice(&FitStatistics::COLUMNS);
    h.extend_from_slice(tail);
    h
}

/// `country,M_COR,S_COR,M_RMS,S_RMS,SD,M_MAE,M_MAPE,M_CHIp,M_CHIs`.
pub fn stats_csv(rows: &[(String, FitStatistics)]) -> Vec<u8> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(c, s)| {
            let mut r = vec![c.clone()];
            r.extend(stats_cells(s));
            r
        })
        .collect();
    csv_bytes(&header_with(&["country"], &[]), &body)
}

/// `run,seed,cor,rms,mae,mape,chip,chis` plus the CV columns `cv_rmse,k`.
pub fn runs_csv(records: &[RunRecord]) -> Vec<u8> {
    let body: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let m = &r.metrics;
            vec![
                r.run.to_string(),
                r.seed.to_string(),
                fmt_f64(m.cor),
                fmt_f64(m.rms),
                fmt_f64(m.mae),
                fmt_f64(m.mape),
                fmt_f64(m.chip),
                fmt_f64(m.chis),
                r.cv_rmse.map(fmt_f64).unwrap_or_default(),
                r.k.map(|k| k.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    csv_bytes(
        &["run", "seed", "cor", "rms", "mae", "mape", "chip", "chis", "cv_rmse", "k"],
        &body,
    )
}

/// `feature,score,raw,method`, ranked by score.
pub fn importance_csv(report: &ImportanceReport) -> Vec<u8> {
    let body: Vec<Vec<String>> = report
        .ranking()
        .into_iter()
        .map(|f| {
            let j = report.features.iter().position(|g| g == f).unwrap();
            vec![
                f.to_string(),
                fmt_f64(report.scores[j]),
                fmt_f64(report.raw[j]),
                report.method.code().to_string(),
            ]
        })
        .collect();
    csv_bytes(&["feature", "score", "raw", "method"], &body)
}

/// `quarter,observed,predicted,residual`.
pub fn residuals_csv(quarters: &[String], observed: &[f64], predicted: &[f64]) -> Vec<u8> {
    let body: Vec<Vec<String>> = quarters
        .iter()
        .zip(observed.iter().zip(predicted))
        .map(|(q, (o, p))| vec![q.clone(), fmt_f64(*o), fmt_f64(*p), fmt_f64(o - p)])
        .collect();
    csv_bytes(&["quarter", "observed", "predicted", "residual"], &body)
}

pub struct AdfRow {
    pub country: String,
    pub model: String,
    pub result: AdfResult,
}

/// `n,country,model,statistic,p_value,lags,regression`.
pub fn adf_csv(rows: &[AdfRow]) -> Vec<u8> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.country.clone(),
                r.model.clone(),
                fmt_f64(r.result.statistic),
                fmt_f64(r.result.p_value),
                r.result.lags.to_string(),
                r.result.regression.code().to_string(),
            ]
        })
        .collect();
    csv_bytes(
        &["n", "country", "model", "statistic", "p_value", "lags", "regression"],
        &body,
    )
}

/// One statistics row per country plus the horizon compared (always 4 predicted
/// against 4 observed points).
pub fn holdout_stats_csv(reports: &[HoldoutReport]) -> Vec<u8> {
    let body: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row = vec![r.country.clone(), r.learner.clone(), r.runs.to_string()];
            row.extend(stats_cells(&r.stats));
            row.push(format!("{}v{}", r.observed.len(), r.observed.len()));
            row
        })
        .collect();
    csv_bytes(&header_with(&["country", "learner", "runs"], &["compared"]), &body)
}

/// Per-quarter predicted against observed rows for plotting.
pub fn holdout_paths_csv(reports: &[HoldoutReport]) -> Vec<u8> {
    let mut body = Vec::new();
    for r in reports {
        let mean = r.mean_path();
        for (h, q) in r.quarters.iter().enumerate() {
            let col: Vec<f64> = r.predicted.iter().map(|p| p[h]).collect();
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let var = col.iter().map(|v| (v - mean[h]).powi(2)).sum::<f64>() / col.len() as f64;
            body.push(vec![
                r.country.clone(),
                r.learner.clone(),
                q.to_string(),
                fmt_f64(r.observed[h]),
                fmt_f64(mean[h]),
                fmt_f64(var.sqrt()),
                fmt_f64(lo),
                fmt_f64(hi),
            ]);
        }
    }
    csv_bytes(
        &["country", "learner", "quarter", "observed", "predicted_mean", "predicted_sd", "predicted_min", "predicted_max"],
        &body,
    )
}

/// Baseline row followed by one row per permuted set, with the RMS ratio.
pub fn permutation_csv(country: &str, report: &PermutationReport) -> Vec<u8> {
    let mut body = Vec::new();
    let mut base = vec![country.to_string(), "BASELINE".to_string()];
    base.extend(stats_cells(&report.baseline));
    base.push("1".into());
    body.push(base);
    for p in &report.permuted {
        let mut row = vec![country.to_string(), p.label.clone()];
        row.extend(stats_cells(&p.stats));
        row.push(fmt_f64(p.rms_ratio(&report.baseline)));
        body.push(row);
    }
    csv_bytes(&header_with(&["country", "permuted"], &["RMS_RATIO"]), &body)
}

/// Summary row of a scenario run. Quantile columns are `q05..q95`.
pub fn grid_summary_csv(report: &ScenarioReport) -> Vec<u8> {
    let qnames: Vec<String> = QUANTILES.iter().map(|q| format!("q{:02}", (q * 100.0).round() as u32)).collect();
    let mut header = vec!["country", "model", "count", "min"];
    header.extend(qnames.iter().map(String::as_str));
    header.extend(["max", "mean", "distinct", "current"]);
    let s = &report.summary;
    let mut row = vec![
        report.country.clone(),
        report.model_id.clone(),
        s.count.to_string(),
        fmt_f64(s.min),
    ];
    row.extend(s.quantiles.iter().map(|v| fmt_f64(*v)));
    row.extend([
        fmt_f64(s.max),
        fmt_f64(s.mean),
        s.distinct.to_string(),
        report.current_value.map(fmt_f64).unwrap_or_default(),
    ]);
    csv_bytes(&header, &[row])
}

/// `bin,lower,upper,count`.
pub fn histogram_csv(report: &ScenarioReport) -> Vec<u8> {
    let h = &report.histogram;
    let body: Vec<Vec<String>> = h
        .counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i.to_string(), fmt_f64(h.edges[i]), fmt_f64(h.edges[i + 1]), c.to_string()])
        .collect();
    csv_bytes(&["bin", "lower", "upper", "count"], &body)
}

/// Latest observed 12-quarter changes drawn as reference lines.
pub fn reference_csv() -> Vec<u8> {
    let body: Vec<Vec<String>> = REFERENCE_VALUES
        .iter()
        .map(|(c, v)| vec![c.to_string(), fmt_f64(*v)])
        .collect();
    csv_bytes(&["country", "current_12q_change"], &body)
}

/// Every grid row with its prediction.
pub fn grid_predictions_csv(grid: &ScenarioGrid, report: &ScenarioReport) -> Vec<u8> {
    let mut header = vec!["row"];
    header.extend(grid.axes().iter().map(|a| a.name.as_str()));
    header.push("prediction");
    let body: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let mut r = vec![i.to_string()];
            r.extend(grid.row(i).iter().map(|v| fmt_f64(*v)));
            r.push(fmt_f64(report.predictions[i]));
            r
        })
        .collect();
    csv_bytes(&header, &body)
}

/// Methods by quarter, spreads, change over the horizon and whether its sign
/// matches the observed change; a final row counts correct signs.
pub fn benchmark_csv(table: &BenchmarkTable) -> Vec<u8> {
    let qs: Vec<String> = table.quarters.iter().map(|q| q.to_string()).collect();
    let se: Vec<String> = qs.iter().map(|q| format!("se_{q}")).collect();
    let mut header = vec!["method"];
    header.extend(qs.iter().map(String::as_str));
    header.extend(se.iter().map(String::as_str));
    header.extend(["change", "sign_correct"]);
    let h = qs.len();
    let row = |name: &str, values: &[f64], spread: Option<&Vec<f64>>, sign: Option<bool>| {
        let mut r = vec![name.to_string()];
        r.extend(values.iter().map(|v| fmt_f64(*v)));
        match spread {
            Some(s) => r.extend(s.iter().map(|v| fmt_f64(*v))),
            None => r.extend(std::iter::repeat_n(String::new(), h)),
        }
        r.push(fmt_f64(values[h - 1] - values[0]));
        r.push(sign.map(|b| b.to_string()).unwrap_or_default());
        r
    };
    let mut body = Vec::new();
    let mut correct = 0;
    for m in &table.methods {
        let ok = table.sign_correct(&m.method).unwrap_or(false);
        correct += usize::from(ok);
        body.push(row(&m.method, &m.values, m.spread.as_ref(), Some(ok)));
    }
    let iter_ok = (table.var_iterated[h - 1] - table.var_iterated[0]).signum() == table.observed_change().signum();
    body.push(row("VAR-iterated", &table.var_iterated, None, Some(iter_ok)));
    body.push(row("Observed", &table.observed, None, None));
    let mut summary = vec!["SIGN_ACCURACY".to_string(), format!("{correct}/{}", table.methods.len())];
    summary.resize(header.len(), String::new());
    body.push(summary);
    csv_bytes(&header, &body)
}

/// Coefficient table: intercept (when present) then features, value and standard
/// error (or perturbation spread).
pub fn coefficients_csv(fit: &LinearCoefficients, perturbed: Option<&PerturbedGlm>) -> Vec<u8> {
    let mut names: Vec<String> = Vec::new();
    let mut values = Vec::new();
    let mut ses = Vec::new();
    if let Some(b) = fit.intercept {
        names.push("intercept".into());
        values.push(b);
        ses.push(fit.intercept_std_error);
    }
    for (j, f) in fit.feature_names.iter().enumerate() {
        names.push(f.clone());
        values.push(fit.coefficients[j]);
        ses.push(fit.std_errors.as_ref().map(|s| s[j]));
    }
    let body: Vec<Vec<String>> = names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let mut r = vec![n.clone(), fmt_f64(values[i]), ses[i].map(fmt_f64).unwrap_or_default()];
            if let Some(p) = perturbed {
                let k = if fit.intercept.is_some() { i } else { i + 1 };
                r.push(fmt_f64(p.mean[k]));
                r.push(fmt_f64(p.sd[k]));
            }
            r
        })
        .collect();
    let mut header = vec!["parameter", "value", "std_error"];
    if perturbed.is_some() {
        header.extend(["perturbed_mean", "perturbed_sd"]);
    }
    csv_bytes(&header, &body)
}

/// Square correlation table; absent pairs are empty cells.
pub fn correlation_csv(m: &CorrelationMatrix) -> Vec<u8> {
    let mut header = vec!["country"];
    header.extend(m.countries.iter().map(String::as_str));
    let body: Vec<Vec<String>> = m
        .countries
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut r = vec![c.clone()];
            r.extend(m.values[i].iter().map(|v| v.map(fmt_f64).unwrap_or_default()));
            r
        })
        .collect();
    csv_bytes(&header, &body)
}

pub fn overlap_csv(m: &CorrelationMatrix) -> Vec<u8> {
    let mut header = vec!["country"];
    header.extend(m.countries.iter().map(String::as_str));
    let body: Vec<Vec<String>> = m
        .countries
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut r = vec![c.clone()];
            r.extend(m.overlaps[i].iter().map(|v| v.to_string()));
            r
        })
        .collect();
    csv_bytes(&header, &body)
}

/// `country,indicator,first,last,quarters,gaps,interpolated,path`.
pub fn coverage_csv(rows: &[crate::ingest::Coverage]) -> Vec<u8> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|c| {
            vec![
                c.country.clone(),
                c.indicator.code().to_string(),
                c.first.map(|q| q.to_string()).unwrap_or_default(),
                c.last.map(|q| q.to_string()).unwrap_or_default(),
                c.quarters.to_string(),
                c.gaps.to_string(),
                c.interpolated.to_string(),
                c.path.display().to_string(),
            ]
        })
        .collect();
    csv_bytes(
        &["country", "indicator", "first", "last", "quarters", "gaps", "interpolated", "path"],
        &body,
    )
}

/// `quarter,value,interpolated`.
pub fn series_csv(s: &QuarterlySeries) -> Vec<u8> {
    let body: Vec<Vec<String>> = s
        .points()
        .iter()
        .map(|p| vec![p.quarter.to_string(), fmt_f64(p.value), p.interpolated.to_string()])
        .collect();
    csv_bytes(&["quarter", "value", "interpolated"], &body)
}
