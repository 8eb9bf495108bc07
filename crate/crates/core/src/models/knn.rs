//! k-nearest-neighbour regression on z-scored features.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::cv::CvConfig;
use crate::data::CountryDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_K_GRID: [usize; 5] = [3, 5, 7, 9, 11];

/// Per-feature mean and standard deviation taken from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Scaler {
    /// Population statistics of each column. A zero deviation is returned as is;
    /// callers decide whether a constant column is an error.
    ///
    /// Both passes run on the column minus its first value, so an exact shift of
    /// the data leaves `sds` bit-identical and a power-of-two scaling scales it
    /// exactly.
    pub fn fit(x: &Matrix) -> Self {
        let n = x.rows() as f64;
        let mut means = vec![0.0; x.cols()];
        let mut sds = vec![0.0; x.cols()];
        if x.rows() == 0 {
            return Scaler { means, sds };
        }
        for j in 0..x.cols() {
            let origin = x.get(0, j);
            let m = (0..x.rows()).map(|i| x.get(i, j) - origin).sum::<f64>() / n;
            let v = (0..x.rows())
                .map(|i| {
                    let e = (x.get(i, j) - origin) - m;
                    e * e
                })
                .sum::<f64>()
                / n;
            means[j] = origin + m;
            sds[j] = libm::sqrt(v);
        }
        Scaler { means, sds }
    }

    /// Squared distance in standardised units, taken from raw coordinate
    /// differences so that no centring error enters.
    pub fn sq_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for j in 0..a.len() {
            let sd = if self.sds[j] > 0.0 { self.sds[j] } else { 1.0 };
            let e = (a[j] - b[j]) / sd;
            s += e * e;
        }
        s
    }

    pub fn transform_row(&self, row: &[f64], out: &mut [f64]) {
        for j in 0..row.len() {
            let sd = if self.sds[j] > 0.0 { self.sds[j] } else { 1.0 };
            out[j] = (row[j] - self.means[j]) / sd;
        }
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            self.transform_row(x.row(i), out.row_mut(i));
        }
        out
    }
}

/// Mean cross-validated RMSE for one candidate k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub k: usize,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub feature_names: Vec<String>,
    pub scaler: Scaler,
    pub train_x: Matrix,
    pub train_y: Vec<f64>,
    pub seed: u64,
    pub cv_table: Vec<CvRow>,
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Training rows ordered by distance to `query`, ties by lower row index.
fn ranked_neighbours(scaler: &Scaler, train: &Matrix, query: &[f64]) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> = (0..train.rows()).map(|i| (scaler.sq_dist(train.row(i), query), i)).collect();
    d.sort_unstable_by(by_distance_then_index);
    d
}

/// Mean target of the `k` closest rows, summed in row order so an identical
/// neighbour set always gives a bit-identical mean.
fn knn_mean(scaler: &Scaler, train: &Matrix, y: &[f64], query: &[f64], k: usize) -> f64 {
    let mut d: Vec<(f64, usize)> = (0..train.rows()).map(|i| (scaler.sq_dist(train.row(i), query), i)).collect();
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, by_distance_then_index);
        d.truncate(k);
    }
    let mut idx: Vec<usize> = d.into_iter().map(|(_, i)| i).collect();
    idx.sort_unstable();
    idx.iter().map(|&i| y[i]).sum::<f64>() / k as f64
}

impl KnnModel {
    /// Fits a model with a fixed `k`, without cross-validation.
    pub fn fit(x: &Matrix, y: &[f64], feature_names: Vec<String>, k: usize) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        if k == 0 || k > x.rows() {
            return Err(Error::InvalidParameter(alloc::format!(
                "k={k} must be in 1..={}",
                x.rows()
            )));
        }
        let scaler = Scaler::fit(x);
        if let Some(j) = scaler.sds.iter().position(|s| *s == 0.0) {
            let name = feature_names.get(j).cloned().unwrap_or_else(|| alloc::format!("{j}"));
            return Err(Error::ConstantFeature(name));
        }
        Ok(KnnModel {
            k,
            train_x: x.clone(),
            train_y: y.to_vec(),
            feature_names,
            scaler,
            seed: 0,
            cv_table: Vec::new(),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.scaler.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.scaler.means.len(),
                found: x.len(),
            });
        }
        Ok(knn_mean(&self.scaler, &self.train_x, &self.train_y, x, self.k))
    }

    /// Cross-validated RMSE of the selected k.
    pub fn cv_rmse(&self) -> Option<f64> {
        self.cv_table.iter().find(|r| r.k == self.k).map(|r| r.rmse)
    }
}

/// Selects k from `k_grid` by repeated cross-validation (lowest mean fold RMSE,
/// ties to the smaller k) and refits on every row.
pub fn train_knn(data: &CountryDataset, cv: &CvConfig, k_grid: &[usize]) -> Result<KnnModel> {
    let n = data.n();
    cv.validate(n)?;
    let mut grid: Vec<usize> = k_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() || grid[0] == 0 {
        return Err(Error::InvalidParameter("k grid must be non-empty and positive".into()));
    }
    let max_k = *grid.last().unwrap();
    if max_k > cv.min_train_size(n) {
        return Err(Error::InvalidParameter(alloc::format!(
            "k={max_k} exceeds the smallest training fold ({})",
            cv.min_train_size(n)
        )));
    }
    // Fail on constant columns before spending time on CV.
    let full = Scaler::fit(data.x());
    if let Some(j) = full.sds.iter().position(|s| *s == 0.0) {
        return Err(Error::ConstantFeature(data.feature_names()[j].clone()));
    }

    let splits = cv.splits(n)?;
    let mut fold_rmse_sum = vec![0.0; grid.len()];
    for (train, test) in &splits {
        let tx = data.x().select_rows(train);
        let ty: Vec<f64> = train.iter().map(|&i| data.y()[i]).collect();
        let scaler = Scaler::fit(&tx);
        let mut sse = vec![0.0; grid.len()];
        for &i in test {
            let ranked = ranked_neighbours(&scaler, &tx, data.x().row(i));
            for (g, &k) in grid.iter().enumerate() {
                let mut idx: Vec<usize> = ranked[..k].iter().map(|(_, r)| *r).collect();
                idx.sort_unstable();
                let pred = idx.iter().map(|&r| ty[r]).sum::<f64>() / k as f64;
                let e = pred - data.y()[i];
                sse[g] += e * e;
            }
        }
        for g in 0..grid.len() {
            fold_rmse_sum[g] += libm::sqrt(sse[g] / test.len() as f64);
        }
    }
    let cv_table: Vec<CvRow> = grid
        .iter()
        .zip(&fold_rmse_sum)
        .map(|(&k, s)| CvRow {
            k,
            rmse: s / splits.len() as f64,
        })
        .collect();
    let best = cv_table
        .iter()
        .fold(None::<CvRow>, |best, row| match best {
            Some(b) if b.rmse <= row.rmse => Some(b),
            _ => Some(*row),
        })
        .unwrap();

    let mut model = KnnModel::fit(data.x(), data.y(), data.feature_names().to_vec(), best.k)?;
    model.seed = cv.seed;
    model.cv_table = cv_table;
    Ok(model)
}
