//! Criteria that run on generated data only.

use hpi_core::baselines::{fit_glm, fit_var, forecast_var, linear_inversion, Deterministic, ForecastMode};
use hpi_core::data::CountryDataset;
use hpi_core::diagnostics::{adf_test, permutation_test, Regression};
use hpi_core::linalg::Matrix;
use hpi_core::metrics::{lewis_category, mae, mape, residual_sd, rms, LewisCategory};
use hpi_core::models::{train_treebag, KnnModel, Learner, LearnerConfig, DEFAULT_MIN_NODE};
use hpi_core::scenario::{build_grid, default_axes, predict_grid, GridSummary};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{oracle, Outcome};

pub const METRIC_VECTORS: usize = 1000;
pub const METRIC_REL_TOL: f64 = 1e-12;
pub const OLS_SYSTEMS: usize = 100;
pub const OLS_REL_TOL: f64 = 1e-10;
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
pub const KNN_DATASETS: usize = 50;
pub const KNN_MAX_ROWS: usize = 200;
pub const KNN_MAX_FEATURES: usize = 6;
pub const KNN_REL_TOL: f64 = 1e-12;
pub const STEP_ROWS: usize = 200;
pub const STEP_BAGS: usize = 25;
pub const STEP_MIN_R2: f64 = 0.95;
pub const ADF_REPLICATIONS: usize = 500;
pub const ADF_LENGTH: usize = 200;
pub const ADF_LEVEL: f64 = 0.05;
pub const ADF_RW_BAND: (f64, f64) = (0.02, 0.09);
pub const ADF_WN_MIN: f64 = 0.95;
pub const PERMUTATION_ROWS: usize = 200;
pub const PERMUTATION_RUNS: usize = 20;
pub const PERMUTATION_SIGNAL_RATIO: f64 = 2.0;
pub const PERMUTATION_NOISE_CHANGE: f64 = 0.10;
pub const GRID_ROWS: usize = 160_000;
pub const VAR_LENGTH: usize = 500;
pub const VAR_PHI: f64 = 0.5;
pub const VAR_TOL: f64 = 0.05;
pub const VAR_HORIZON: usize = 20;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

fn names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("x{j}")).collect()
}

pub fn metric_oracles() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut dominance_failures = 0;
    for _ in 0..METRIC_VECTORS {
        let n = r.random_range(1..=200);
        let obs: Vec<f64> = (0..n)
            .map(|_| {
                let v: f64 = r.random_range(0.5..500.0);
                if r.random_bool(0.1) { -v } else { v }
            })
            .collect();
        let pred: Vec<f64> = obs.iter().map(|o| o + 20.0 * normal(&mut r)).collect();
        let a = rms(&pred, &obs).unwrap();
        let b = mae(&pred, &obs).unwrap();
        let sd = residual_sd(&pred, &obs).unwrap();
        let mp = mape(&pred, &obs).unwrap();
        let terms = oracle::mape_terms(&pred, &obs);
        let mape_scale = terms.iter().map(|t| t.abs()).sum::<f64>() / n as f64;
        let sd_oracle = oracle::residual_sd(&pred, &obs);
        worst = worst
            .max(rel(a, oracle::rms(&pred, &obs), oracle::rms(&pred, &obs)))
            .max(rel(b, oracle::mae(&pred, &obs), oracle::mae(&pred, &obs)))
            .max(rel(sd, sd_oracle, sd_oracle))
            .max(rel(mp, oracle::mean(&terms), mape_scale));
        if a < b {
            dominance_failures += 1;
        }
    }
    let bands = [
        (0.0, LewisCategory::HighlyAccurate),
        (0.0999, LewisCategory::HighlyAccurate),
        (0.1, LewisCategory::Good),
        (0.1999, LewisCategory::Good),
        (0.2, LewisCategory::Reasonable),
        (0.4999, LewisCategory::Reasonable),
        (0.5, LewisCategory::Inaccurate),
        (3.0, LewisCategory::Inaccurate),
    ];
    let band_failures = bands.iter().filter(|(v, c)| lewis_category(*v) != *c).count();
    Outcome::new(
        worst <= METRIC_REL_TOL && dominance_failures == 0 && band_failures == 0,
        format!(
            "{METRIC_VECTORS} vectors: max rel err {worst:.2e} (tol {METRIC_REL_TOL:.0e}), RMS<MAE in {dominance_failures}, Lewis band mismatches {band_failures}"
        ),
    )
}

pub fn ols_equivalence() -> Outcome {
    let mut r = rng(2);
    let mut worst_coef = 0.0f64;
    let mut worst_se = 0.0f64;
    let mut worst_orth = 0.0f64;
    for _ in 0..OLS_SYSTEMS {
        let p = r.random_range(1..=6);
        let n = r.random_range(5 * p + 10..=150);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| normal(&mut r) * 3.0 + 1.0).collect()).collect();
        let beta: Vec<f64> = (0..p).map(|_| normal(&mut r) * 2.0).collect();
        let b0 = normal(&mut r) * 5.0;
        let y: Vec<f64> = rows
            .iter()
            .map(|row| b0 + row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + normal(&mut r))
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let names = names(p);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let data = CountryDataset::synthetic(&refs, x.clone(), y.clone()).unwrap();

        let li = linear_inversion(&data).unwrap();
        let (oracle_li, _) = oracle::normal_equations(&rows, &y);
        for (a, b) in li.coefficients.iter().zip(&oracle_li) {
            worst_coef = worst_coef.max(rel(*a, *b, b.abs().max(1.0)));
        }

        let glm = fit_glm(&data).unwrap();
        let with_1: Vec<Vec<f64>> = rows.iter().map(|row| [vec![1.0], row.clone()].concat()).collect();
        let (oracle_glm, oracle_se) = oracle::normal_equations(&with_1, &y);
        let ours = glm.all_coefficients();
        for (a, b) in ours.iter().zip(&oracle_glm) {
            worst_coef = worst_coef.max(rel(*a, *b, b.abs().max(1.0)));
        }
        let se: Vec<f64> = std::iter::once(glm.intercept_std_error.unwrap())
            .chain(glm.std_errors.clone().unwrap())
            .collect();
        for (a, b) in se.iter().zip(&oracle_se) {
            worst_se = worst_se.max(rel(*a, *b, b.abs()));
        }

        for fit in [&li, &glm] {
            let resid: Vec<f64> = (0..n).map(|i| y[i] - fit.predict(x.row(i)).unwrap()).collect();
            let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
            if fit.intercept.is_some() {
                cols.push(vec![1.0; n]);
            }
            for c in cols {
                let dot = oracle::sum(c.iter().zip(&resid).map(|(a, b)| a * b));
                let cnorm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                worst_orth = worst_orth.max(dot.abs() / (cnorm * ynorm));
            }
        }
    }
    Outcome::new(
        worst_coef <= OLS_REL_TOL && worst_se <= OLS_REL_TOL && worst_orth <= ORTHOGONALITY_TOL,
        format!(
            "{OLS_SYSTEMS} systems: coef rel err {worst_coef:.2e}, SE rel err {worst_se:.2e} (tol {OLS_REL_TOL:.0e}); orthogonality {worst_orth:.2e} (tol {ORTHOGONALITY_TOL:.0e})"
        ),
    )
}

pub fn knn_correctness() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let mut k1_rmse_max = 0.0f64;
    let mut affine_mismatches = 0usize;
    let mut queries = 0usize;
    for _ in 0..KNN_DATASETS {
        let n = r.random_range(12..=KNN_MAX_ROWS);
        let d = r.random_range(1..=KNN_MAX_FEATURES);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| normal(&mut r) * 10.0).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let k = r.random_range(1..=n.min(15));
        let model = KnnModel::fit(&x, &y, names(d), k).unwrap();
        for _ in 0..20 {
            let q: Vec<f64> = (0..d).map(|_| normal(&mut r) * 12.0).collect();
            let ours = model.predict(&q).unwrap();
            let want = oracle::knn(&rows, &y, &q, k);
            worst = worst.max(rel(ours, want, want.abs().max(1.0)));
            queries += 1;
        }

        let one = KnnModel::fit(&x, &y, names(d), 1).unwrap();
        let fitted: Vec<f64> = rows.iter().map(|row| one.predict(row).unwrap()).collect();
        k1_rmse_max = k1_rmse_max.max(rms(&fitted, &y).unwrap());

        let ints: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| f64::from(r.random_range(-100i32..100))).collect()).collect();
        if (0..d).any(|j| ints.iter().all(|row| row[j] == ints[0][j])) {
            continue;
        }
        let scale: Vec<f64> = (0..d).map(|_| [0.5, 2.0, 4.0, 8.0][r.random_range(0..4)]).collect();
        let shift: Vec<f64> = (0..d).map(|_| f64::from(r.random_range(-50i32..50))).collect();
        let moved: Vec<Vec<f64>> = ints
            .iter()
            .map(|row| row.iter().enumerate().map(|(j, v)| scale[j] * v + shift[j]).collect())
            .collect();
        let a = KnnModel::fit(&Matrix::from_rows(&ints).unwrap(), &y, names(d), k).unwrap();
        let b = KnnModel::fit(&Matrix::from_rows(&moved).unwrap(), &y, names(d), k).unwrap();
        for _ in 0..20 {
            let q: Vec<f64> = (0..d).map(|_| f64::from(r.random_range(-120i32..120))).collect();
            let qm: Vec<f64> = q.iter().enumerate().map(|(j, v)| scale[j] * v + shift[j]).collect();
            if a.predict(&q).unwrap().to_bits() != b.predict(&qm).unwrap().to_bits() {
                affine_mismatches += 1;
            }
        }
    }
    Outcome::new(
        worst <= KNN_REL_TOL && k1_rmse_max == 0.0 && affine_mismatches == 0,
        format!(
            "{KNN_DATASETS} datasets, {queries} queries: max rel err {worst:.2e} (tol {KNN_REL_TOL:.0e}); k=1 training RMSE {k1_rmse_max}; affine mismatches {affine_mismatches}"
        ),
    )
}

pub fn treebag_checks() -> Outcome {
    let mut r = rng(4);
    let rows: Vec<Vec<f64>> = (0..120).map(|_| vec![normal(&mut r), normal(&mut r), normal(&mut r)]).collect();
    let y: Vec<f64> = rows.iter().map(|v| v[0] * 2.0 + v[1].sin() + 0.3 * normal(&mut r)).collect();
    let data = CountryDataset::synthetic(&["a", "b", "c"], Matrix::from_rows(&rows).unwrap(), y).unwrap();
    let m1 = train_treebag(&data, STEP_BAGS, DEFAULT_MIN_NODE, 99).unwrap();
    let m2 = train_treebag(&data, STEP_BAGS, DEFAULT_MIN_NODE, 99).unwrap();
    let deterministic = m1 == m2
        && rows
            .iter()
            .all(|q| m1.predict(q).unwrap().to_bits() == m2.predict(q).unwrap().to_bits());

    let flat = data.with_target(vec![3.7; data.n()]);
    let cm = train_treebag(&flat, STEP_BAGS, DEFAULT_MIN_NODE, 5).unwrap();
    let single_leaf = cm.trees.iter().all(|t| t.leaf_count() == 1) && cm.predict(&rows[0]).unwrap() == 3.7;

    let xs: Vec<f64> = (0..STEP_ROWS).map(|_| r.random_range(0.0..1.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|x| f64::from(u8::from(*x > 0.5))).collect();
    let step = CountryDataset::synthetic(&["x"], Matrix::from_columns(std::slice::from_ref(&xs)).unwrap(), ys.clone()).unwrap();
    let bag = train_treebag(&step, STEP_BAGS, DEFAULT_MIN_NODE, 11).unwrap();
    let fitted: Vec<f64> = xs.iter().map(|x| bag.predict(&[*x]).unwrap()).collect();
    let r2 = oracle::r2(&fitted, &ys);
    let stump = oracle::stump_r2(&xs, &ys);
    Outcome::new(
        deterministic && single_leaf && r2 > STEP_MIN_R2,
        format!(
            "bit-identical reruns {deterministic}; constant target single-leaf {single_leaf}; step R² {r2:.4} (> {STEP_MIN_R2}, depth-1 oracle {stump:.4})"
        ),
    )
}

pub fn adf_calibration() -> Outcome {
    let mut r = rng(5);
    let mut rw_reject = 0;
    let mut wn_reject = 0;
    for _ in 0..ADF_REPLICATIONS {
        let e: Vec<f64> = (0..ADF_LENGTH).map(|_| normal(&mut r)).collect();
        let mut walk = Vec::with_capacity(ADF_LENGTH);
        let mut level = 0.0;
        for v in &e {
            level += v;
            walk.push(level);
        }
        if adf_test(&walk, Regression::Const, None).unwrap().p_value < ADF_LEVEL {
            rw_reject += 1;
        }
        if adf_test(&e, Regression::Const, None).unwrap().p_value < ADF_LEVEL {
            wn_reject += 1;
        }
    }
    let rw = rw_reject as f64 / ADF_REPLICATIONS as f64;
    let wn = wn_reject as f64 / ADF_REPLICATIONS as f64;
    Outcome::new(
        (ADF_RW_BAND.0..=ADF_RW_BAND.1).contains(&rw) && wn > ADF_WN_MIN,
        format!(
            "{ADF_REPLICATIONS} replications, n={ADF_LENGTH}: random-walk rejection {:.1}% (band {:.0}-{:.0}%), white-noise rejection {:.1}% (> {:.0}%)",
            rw * 100.0,
            ADF_RW_BAND.0 * 100.0,
            ADF_RW_BAND.1 * 100.0,
            wn * 100.0,
            ADF_WN_MIN * 100.0
        ),
    )
}

pub fn permutation_property() -> Outcome {
    let mut r = rng(6);
    let x1: Vec<f64> = (0..PERMUTATION_ROWS).map(|_| normal(&mut r)).collect();
    let x2: Vec<f64> = (0..PERMUTATION_ROWS).map(|_| normal(&mut r)).collect();
    let y: Vec<f64> = x1.iter().map(|v| 2.0 * v + 0.5 * normal(&mut r)).collect();
    let data = CountryDataset::synthetic(&["x1", "x2"], Matrix::from_columns(&[x1, x2]).unwrap(), y).unwrap();
    let report = permutation_test(&data, Learner::TreeBag, &LearnerConfig::default(), PERMUTATION_RUNS, 7).unwrap();
    let signal = report.get("x1").unwrap().rms_ratio(&report.baseline);
    let noise = report.get("x2").unwrap().rms_ratio(&report.baseline);
    Outcome::new(
        signal > PERMUTATION_SIGNAL_RATIO && (noise - 1.0).abs() < PERMUTATION_NOISE_CHANGE,
        format!(
            "treebag, {PERMUTATION_RUNS} runs: permuting x1 RMS x{signal:.3} (> {PERMUTATION_SIGNAL_RATIO}), permuting x2 change {:+.1}% (< {:.0}%)",
            (noise - 1.0) * 100.0,
            PERMUTATION_NOISE_CHANGE * 100.0
        ),
    )
}

pub fn grid_engine() -> Outcome {
    let mut r = rng(7);
    let grid = build_grid(default_axes()).unwrap();
    let rows: Vec<Vec<f64>> = (0..80)
        .map(|_| {
            vec![
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
                r.random_range(5.5e6..7.5e6),
                r.random_range(0.0..4.0),
            ]
        })
        .collect();
    let y: Vec<f64> = rows.iter().map(|v| 5.0 + v[0] - v[3] + v[2] / 1e6).collect();
    let feature_names = ["GDP", "CPI", "ECB", "TR10Y"].map(String::from).to_vec();
    let model = KnnModel::fit(&Matrix::from_rows(&rows).unwrap(), &y, feature_names, 5).unwrap();
    let report = predict_grid(&model, &grid, None).unwrap();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.shuffle(&mut r);
    let mismatches = order
        .iter()
        .filter(|&&i| model.predict(&grid.row(i)).unwrap().to_bits() != report.predictions[i].to_bits())
        .count();
    let shuffled: Vec<f64> = order.iter().map(|&i| report.predictions[i]).collect();
    let s = GridSummary::compute(&shuffled).unwrap();
    let summary_same = s.quantiles == report.summary.quantiles && s.min == report.summary.min && s.max == report.summary.max;
    Outcome::new(
        grid.len() == GRID_ROWS && report.summary.count == GRID_ROWS && mismatches == 0 && summary_same,
        format!(
            "default axes: {} rows (want {GRID_ROWS}); permuted-row prediction mismatches {mismatches}; order-free summary {summary_same}",
            grid.len()
        ),
    )
}

pub fn var_recovery() -> Outcome {
    let mut r = rng(8);
    let mut y = vec![0.0];
    for t in 1..VAR_LENGTH {
        y.push(VAR_PHI * y[t - 1] + normal(&mut r));
    }
    let panel = Matrix::from_columns(&[y]).unwrap();
    let model = fit_var(&panel, &["y".to_string()], 1, Deterministic::Const).unwrap();
    let phi = model.lags[0].get(0, 0);
    let f = forecast_var(&model, &panel, VAR_HORIZON, ForecastMode::Iterated, None).unwrap();
    let se = f.se.column(0);
    let monotone = se.windows(2).all(|w| w[1] >= w[0]);

    let mut rows = vec![vec![0.0, 0.0]];
    for t in 1..VAR_LENGTH {
        let p = rows[t - 1].clone();
        rows.push(vec![0.5 * p[0] + 0.2 * p[1] + normal(&mut r), -0.3 * p[0] + 0.4 * p[1] + normal(&mut r)]);
    }
    let panel2 = Matrix::from_rows(&rows).unwrap();
    let m2 = fit_var(&panel2, &names(2), 1, Deterministic::Const).unwrap();
    let f2 = forecast_var(&m2, &panel2, VAR_HORIZON, ForecastMode::Iterated, None).unwrap();
    let monotone2 = (0..2).all(|j| f2.se.column(j).windows(2).all(|w| w[1] >= w[0]));
    let design: Vec<Vec<f64>> = rows[..VAR_LENGTH - 1].iter().map(|p| vec![1.0, p[0], p[1]]).collect();
    let mut oracle_err = 0.0f64;
    for i in 0..2 {
        let target: Vec<f64> = rows[1..].iter().map(|p| p[i]).collect();
        let (beta, _) = oracle::normal_equations(&design, &target);
        let ours = [m2.det_coef.get(i, 0), m2.lags[0].get(i, 0), m2.lags[0].get(i, 1)];
        for (a, b) in ours.iter().zip(&beta) {
            oracle_err = oracle_err.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    Outcome::new(
        (phi - VAR_PHI).abs() <= VAR_TOL && oracle_err <= OLS_REL_TOL && monotone && monotone2,
        format!(
            "n={VAR_LENGTH}: AR(1) phi {phi:.4} (true {VAR_PHI}, tol ±{VAR_TOL}); bivariate OLS-oracle rel err {oracle_err:.2e} (tol {OLS_REL_TOL:.0e}); SE monotone over {VAR_HORIZON} steps {}",
            monotone && monotone2
        ),
    )
}
