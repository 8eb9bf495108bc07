use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};

/// Deterministic regressors of each VAR equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Deterministic {
    Const,
    Trend,
    #[default]
    Both,
}

impl Deterministic {
    fn terms(&self) -> usize {
        match self {
            Deterministic::Both => 2,
            _ => 1,
        }
    }

    fn fill(&self, t: f64, out: &mut [f64]) {
        match self {
            Deterministic::Const => out[0] = 1.0,
            Deterministic::Trend => out[0] = t,
            Deterministic::Both => {
                out[0] = 1.0;
                out[1] = t;
            }
        }
    }

    fn names(&self) -> &'static [&'static str] {
        match self {
            Deterministic::Const => &["const"],
            Deterministic::Trend => &["trend"],
            Deterministic::Both => &["const", "trend"],
        }
    }
}

impl FromStr for Deterministic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "const" | "constant" => Ok(Deterministic::Const),
            "trend" => Ok(Deterministic::Trend),
            "both" => Ok(Deterministic::Both),
            _ => Err(Error::InvalidParameter(alloc::format!(
                "unknown VAR deterministic term '{s}' (valid: const, trend, both)"
            ))),
        }
    }
}

impl fmt::Display for Deterministic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.names().join("+").as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForecastMode {
    /// Recursive forecast of every variable.
    Iterated,
    /// Forecast only variable `target`; the others take supplied future values.
    Conditional { target: usize },
}

/// `y_t = D_t + Σ_l A_l y_{t-l} + u_t`, one least-squares equation per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModel {
    pub p: usize,
    pub deterministic: Deterministic,
    pub names: Vec<String>,
    /// `lags[l].get(i, j)`: effect of variable `j` at lag `l + 1` in equation `i`.
    pub lags: Vec<Matrix>,
    /// `det_coef.get(i, k)`: deterministic term `k` in equation `i`.
    pub det_coef: Matrix,
    /// Residual covariance with a degrees-of-freedom correction.
    pub sigma: Matrix,
    pub nobs: usize,
}

impl VarModel {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn step(&self, hist: &[Vec<f64>], t: f64, i: usize) -> f64 {
        let mut det = [0.0; 2];
        self.deterministic.fill(t, &mut det);
        let mut v: f64 = (0..self.deterministic.terms()).map(|k| self.det_coef.get(i, k) * det[k]).sum();
        let len = hist.len();
        for (l, a) in self.lags.iter().enumerate() {
            let prev = &hist[len - 1 - l];
            for (j, pv) in prev.iter().enumerate() {
                v += a.get(i, j) * pv;
            }
        }
        v
    }
}

/// Fits a VAR(p) to `panel` (rows = consecutive periods, columns = variables).
/// The trend regressor of row `t` (0-based) is `t + 1`.
pub fn fit_var(panel: &Matrix, names: &[String], p: usize, deterministic: Deterministic) -> Result<VarModel> {
    let (n, d) = (panel.rows(), panel.cols());
    if names.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: names.len(),
        });
    }
    if p == 0 {
        return Err(Error::InvalidParameter("VAR lag order must be >= 1".into()));
    }
    let nd = deterministic.terms();
    let cols = nd + p * d;
    if n <= p + cols + 1 {
        return Err(Error::SeriesTooShort {
            found: n,
            needed: p + cols + 2,
        });
    }
    let nobs = n - p;
    let mut x = Matrix::zeros(nobs, cols);
    for (row, t) in (p..n).enumerate() {
        deterministic.fill((t + 1) as f64, &mut x.row_mut(row)[..nd]);
        for l in 1..=p {
            for j in 0..d {
                x.set(row, nd + (l - 1) * d + j, panel.get(t - l, j));
            }
        }
    }
    let qr = Qr::new(&x)?;
    let bad = qr.deficient_columns();
    if !bad.is_empty() {
        let columns = bad
            .iter()
            .map(|&c| {
                if c < nd {
                    String::from(deterministic.names()[c])
                } else {
                    let (l, j) = ((c - nd) / d + 1, (c - nd) % d);
                    alloc::format!("{}.l{}", names[j], l)
                }
            })
            .collect();
        return Err(Error::RankDeficient { columns });
    }
    let mut lags = alloc::vec![Matrix::zeros(d, d); p];
    let mut det_coef = Matrix::zeros(d, nd);
    let mut resid = Matrix::zeros(nobs, d);
    for i in 0..d {
        let b: Vec<f64> = (p..n).map(|t| panel.get(t, i)).collect();
        let coef = qr.solve(&b)?;
        for k in 0..nd {
            det_coef.set(i, k, coef[k]);
        }
        for l in 0..p {
            for j in 0..d {
                lags[l].set(i, j, coef[nd + l * d + j]);
            }
        }
        let fitted = x.mul_vec(&coef);
        for r in 0..nobs {
            resid.set(r, i, b[r] - fitted[r]);
        }
    }
    let dof = (nobs - cols) as f64;
    let mut sigma = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let s: f64 = (0..nobs).map(|r| resid.get(r, i) * resid.get(r, j)).sum();
            sigma.set(i, j, s / dof);
        }
    }
    Ok(VarModel {
        p,
        deterministic,
        names: names.to_vec(),
        lags,
        det_coef,
        sigma,
        nobs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarForecast {
    /// horizon × d.
    pub values: Matrix,
    /// horizon × d standard errors; zero for variables supplied in conditional mode.
    pub se: Matrix,
}

impl VarForecast {
    pub fn horizon(&self) -> usize {
        self.values.rows()
    }
}

/// Forecasts `horizon` periods past the end of `history`. The trend continues
/// from `history.rows()`, so `history` should be the fitted panel or an extension
/// of it. Conditional mode needs `exogenous_future` (horizon × d; the target column
/// is ignored).
pub fn forecast_var(
    model: &VarModel,
    history: &Matrix,
    horizon: usize,
    mode: ForecastMode,
    exogenous_future: Option<&Matrix>,
) -> Result<VarForecast> {
    let d = model.dim();
    if history.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: history.cols(),
        });
    }
    if history.rows() < model.p {
        return Err(Error::SeriesTooShort {
            found: history.rows(),
            needed: model.p,
        });
    }
    if let ForecastMode::Conditional { target } = mode {
        if target >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: target + 1,
            });
        }
        match exogenous_future {
            Some(e) if e.rows() == horizon && e.cols() == d => {}
            Some(e) if e.cols() != d => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.cols(),
                })
            }
            other => {
                return Err(Error::MissingExogenous {
                    needed: horizon,
                    found: other.map_or(0, |e| e.rows()),
                })
            }
        }
    }
    let start = history.rows();
    let mut hist: Vec<Vec<f64>> = (start - model.p..start).map(|r| history.row(r).to_vec()).collect();
    let mut values = Matrix::zeros(horizon, d);
    for h in 0..horizon {
        let t = (start + h + 1) as f64;
        let next: Vec<f64> = match mode {
            ForecastMode::Iterated => (0..d).map(|i| model.step(&hist, t, i)).collect(),
            ForecastMode::Conditional { target } => {
                let mut row = exogenous_future.unwrap().row(h).to_vec();
                row[target] = model.step(&hist, t, target);
                row
            }
        };
        values.row_mut(h).copy_from_slice(&next);
        hist.remove(0);
        hist.push(next);
    }
    let se = match mode {
        ForecastMode::Iterated => iterated_se(model, horizon),
        ForecastMode::Conditional { target } => conditional_se(model, horizon, target),
    };
    Ok(VarForecast { values, se })
}

// MSE(h) = Σ_{i<h} Φ_i Σ Φ_iᵀ with Φ_0 = I, Φ_i = Σ_{j=1}^{min(i,p)} Φ_{i-j} A_j.
fn iterated_se(model: &VarModel, horizon: usize) -> Matrix {
    let d = model.dim();
    let mut phi: Vec<Matrix> = Vec::with_capacity(horizon);
    let mut mse = Matrix::zeros(d, d);
    let mut se = Matrix::zeros(horizon, d);
    for h in 0..horizon {
        let next = if h == 0 {
            let mut id = Matrix::zeros(d, d);
            for i in 0..d {
                id.set(i, i, 1.0);
            }
            id
        } else {
            let mut acc = Matrix::zeros(d, d);
            for j in 1..=h.min(model.p) {
                add_assign(&mut acc, &phi[h - j].matmul(&model.lags[j - 1]));
            }
            acc
        };
        let contrib = next.matmul(&model.sigma).matmul(&next.transpose());
        add_assign(&mut mse, &contrib);
        for i in 0..d {
            se.set(h, i, libm::sqrt(mse.get(i, i).max(0.0)));
        }
        phi.push(next);
    }
    se
}

fn add_assign(a: &mut Matrix, b: &Matrix) {
    for i in 0..a.rows() {
        for (x, y) in a.row_mut(i).iter_mut().zip(b.row(i)) {
            *x += y;
        }
    }
}

// Only the target's own lags propagate uncertainty when the other variables are known.
fn conditional_se(model: &VarModel, horizon: usize, target: usize) -> Matrix {
    let d = model.dim();
    let own: Vec<f64> = model.lags.iter().map(|a| a.get(target, target)).collect();
    let var = model.sigma.get(target, target).max(0.0);
    let mut psi: Vec<f64> = Vec::with_capacity(horizon);
    let mut se = Matrix::zeros(horizon, d);
    let mut acc = 0.0;
    for h in 0..horizon {
        let v = if h == 0 {
            1.0
        } else {
            (1..=h.min(model.p)).map(|j| own[j - 1] * psi[h - j]).sum()
        };
        psi.push(v);
        acc += v * v;
        se.set(h, target, libm::sqrt(var * acc));
    }
    se
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use alloc::vec;
    use rand_distr::{Distribution, Normal};

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| alloc::format!("v{i}")).collect()
    }

    fn ar1(n: usize, phi: f64, seed: u64) -> Matrix {
        let mut r = rng::seeded(seed);
        let e = Normal::new(0.0, 1.0).unwrap();
        let mut y = 0.0;
        let v: Vec<f64> = (0..n)
            .map(|_| {
                y = phi * y + e.sample(&mut r);
                y
            })
            .collect();
        Matrix::from_columns(&[v]).unwrap()
    }

    #[test]
    fn recovers_ar1() {
        let m = fit_var(&ar1(500, 0.5, 1), &names(1), 1, Deterministic::Const).unwrap();
        assert!((m.lags[0].get(0, 0) - 0.5).abs() < 0.05);
        assert!((m.sigma.get(0, 0) - 1.0).abs() < 0.2);
    }

    #[test]
    fn exact_trend() {
        let v: Vec<f64> = (1..=40).map(|t| 2.5 * t as f64).collect();
        let panel = Matrix::from_columns(&[v]).unwrap();
        let m = fit_var(&panel, &names(1), 1, Deterministic::Trend).unwrap();
        assert!((m.det_coef.get(0, 0) - 2.5).abs() < 1e-9);
        assert!(m.lags[0].get(0, 0).abs() < 1e-9);
        assert!(m.sigma.get(0, 0) < 1e-18);
        let f = forecast_var(&m, &panel, 2, ForecastMode::Iterated, None).unwrap();
        assert!((f.values.get(0, 0) - 102.5).abs() < 1e-8);
        assert!((f.values.get(1, 0) - 105.0).abs() < 1e-8);
    }

    #[test]
    fn collinear_columns_named() {
        let v: Vec<f64> = (1..=30).map(|t| 2.0 + 3.0 * t as f64).collect();
        let panel = Matrix::from_columns(&[v]).unwrap();
        match fit_var(&panel, &names(1), 1, Deterministic::Both) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["v0.l1"]),
            other => panic!("{other:?}"),
        }
    }

    fn hand_model(a: f64, c: f64, s: f64) -> VarModel {
        VarModel {
            p: 1,
            deterministic: Deterministic::Const,
            names: names(1),
            lags: vec![Matrix::from_rows(&[vec![a]]).unwrap()],
            det_coef: Matrix::from_rows(&[vec![c]]).unwrap(),
            sigma: Matrix::from_rows(&[vec![s]]).unwrap(),
            nobs: 10,
        }
    }

    #[test]
    fn hand_recursion() {
        let hist = Matrix::from_columns(&[vec![1.0, 8.0]]).unwrap();
        let f = forecast_var(&hand_model(0.5, 1.0, 1.0), &hist, 2, ForecastMode::Iterated, None).unwrap();
        assert_eq!(f.values.get(0, 0), 5.0);
        assert_eq!(f.values.get(1, 0), 3.5);
        assert_eq!(f.se.get(0, 0), 1.0);
        assert!((f.se.get(1, 0) - libm::sqrt(1.25)).abs() < 1e-15);
    }

    #[test]
    fn zero_dynamics_constant_forecast() {
        let hist = Matrix::from_columns(&[vec![3.0, 9.0]]).unwrap();
        let f = forecast_var(&hand_model(0.0, 4.0, 2.0), &hist, 3, ForecastMode::Iterated, None).unwrap();
        for h in 0..3 {
            assert_eq!(f.values.get(h, 0), 4.0);
            assert!(f.se.get(h, 0) >= f.se.get(h.saturating_sub(1), 0));
        }
        let empty = forecast_var(&hand_model(0.0, 4.0, 2.0), &hist, 0, ForecastMode::Iterated, None).unwrap();
        assert_eq!(empty.horizon(), 0);
    }

    #[test]
    fn conditional_agrees_with_iterated_on_own_path() {
        let mut r = rng::seeded(4);
        let e = Normal::new(0.0, 1.0).unwrap();
        let n = 120;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for t in 1..n {
            b[t] = 0.6 * b[t - 1] + e.sample(&mut r);
            a[t] = 0.3 * a[t - 1] + 0.4 * b[t - 1] + e.sample(&mut r);
        }
        let panel = Matrix::from_columns(&[a, b]).unwrap();
        let m = fit_var(&panel, &names(2), 2, Deterministic::Both).unwrap();
        let it = forecast_var(&m, &panel, 4, ForecastMode::Iterated, None).unwrap();
        let co = forecast_var(&m, &panel, 4, ForecastMode::Conditional { target: 0 }, Some(&it.values)).unwrap();
        for h in 0..4 {
            assert!((it.values.get(h, 0) - co.values.get(h, 0)).abs() < 1e-12);
            assert_eq!(co.values.get(h, 1), it.values.get(h, 1));
            assert_eq!(co.se.get(h, 1), 0.0);
        }
        for h in 1..4 {
            assert!(it.se.get(h, 0) >= it.se.get(h - 1, 0));
            assert!(co.se.get(h, 0) >= co.se.get(h - 1, 0));
        }
        assert!(matches!(
            forecast_var(&m, &panel, 4, ForecastMode::Conditional { target: 0 }, None),
            Err(Error::MissingExogenous { needed: 4, found: 0 })
        ));
    }
}
