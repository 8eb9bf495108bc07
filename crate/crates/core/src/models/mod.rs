//! The two learners, cross-validation, importance and seeded ensembles.

mod cv;
mod ensemble;
mod importance;
mod knn;
mod tree;
mod treebag;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cv::CvConfig;
pub use ensemble::{aggregate_runs, ensemble_fit, fit_run, EnsembleResult, RunOutput, RunRecord};
pub use importance::{filter_importance, tree_importance, ImportanceMethod, ImportanceReport};
pub use knn::{train_knn, CvRow, KnnModel, Scaler, DEFAULT_K_GRID};
pub use tree::{Node, RegressionTree};
pub use treebag::{train_treebag, TreeBagModel, DEFAULT_BAGS, DEFAULT_MIN_NODE};

use crate::baselines::{LinearCoefficients, VarModel};
use crate::data::CountryDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Anything that maps a feature row to a predicted target.
pub trait Predictor {
    fn feature_names(&self) -> &[String];

    fn predict(&self, x: &[f64]) -> Result<f64>;

    fn predict_rows(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.rows()).map(|i| self.predict(x.row(i))).collect()
    }
}

impl Predictor for KnnModel {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        KnnModel::predict(self, x)
    }
}

impl Predictor for TreeBagModel {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        TreeBagModel::predict(self, x)
    }
}

/// A fitted model of any supported family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Knn(KnnModel),
    TreeBag(TreeBagModel),
    Glm(LinearCoefficients),
    LinearInversion(LinearCoefficients),
    Var(VarModel),
}

impl TrainedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::Knn(_) => "knn",
            TrainedModel::TreeBag(_) => "treebag",
            TrainedModel::Glm(_) => "glm",
            TrainedModel::LinearInversion(_) => "linear_inversion",
            TrainedModel::Var(_) => "var",
        }
    }
}

impl Predictor for TrainedModel {
    fn feature_names(&self) -> &[String] {
        match self {
            TrainedModel::Knn(m) => &m.feature_names,
            TrainedModel::TreeBag(m) => &m.feature_names,
            TrainedModel::Glm(m) | TrainedModel::LinearInversion(m) => &m.feature_names,
            TrainedModel::Var(m) => &m.names,
        }
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::TreeBag(m) => m.predict(x),
            TrainedModel::Glm(m) | TrainedModel::LinearInversion(m) => m.predict(x),
            TrainedModel::Var(_) => Err(Error::InvalidParameter(
                "a VAR model forecasts series; it does not map feature rows".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Learner {
    Knn,
    TreeBag,
}

impl Learner {
    pub fn code(&self) -> &'static str {
        match self {
            Learner::Knn => "knn",
            Learner::TreeBag => "treebag",
        }
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Learner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "knn" => Ok(Learner::Knn),
            "treebag" | "tb" | "tbag" | "bag" => Ok(Learner::TreeBag),
            _ => Err(Error::InvalidParameter(alloc::format!(
                "unknown learner '{s}' (valid: knn, treebag)"
            ))),
        }
    }
}

/// Hyper-parameters for both learners. The CV seed is replaced by the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub cv: CvConfig,
    pub k_grid: Vec<usize>,
    pub n_bags: usize,
    pub min_node: usize,
    /// Also cross-validate bagged trees (costs `folds * repeats` extra forests per run).
    pub treebag_cv: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            cv: CvConfig::default(),
            k_grid: DEFAULT_K_GRID.to_vec(),
            n_bags: DEFAULT_BAGS,
            min_node: DEFAULT_MIN_NODE,
            treebag_cv: false,
        }
    }
}

/// Trains one model with `seed` driving fold shuffles (kNN) or bootstrap draws
/// (tree bagging).
pub fn train(data: &CountryDataset, learner: Learner, config: &LearnerConfig, seed: u64) -> Result<TrainedModel> {
    match learner {
        Learner::Knn => Ok(TrainedModel::Knn(train_knn(data, &config.cv.with_seed(seed), &config.k_grid)?)),
        Learner::TreeBag => Ok(TrainedModel::TreeBag(train_treebag(
            data,
            config.n_bags,
            config.min_node,
            seed,
        )?)),
    }
}

/// Mean fold RMSE of an arbitrary learner under repeated cross-validation.
pub fn cross_validated_rmse<P: Predictor>(
    data: &CountryDataset,
    cv: &CvConfig,
    mut fit: impl FnMut(&CountryDataset) -> Result<P>,
) -> Result<f64> {
    let splits = cv.splits(data.n())?;
    let mut total = 0.0;
    for (train, test) in &splits {
        let model = fit(&data.select_rows(train))?;
        let mut sse = 0.0;
        for &i in test {
            let e = model.predict(data.x().row(i))? - data.y()[i];
            sse += e * e;
        }
        total += libm::sqrt(sse / test.len() as f64);
    }
    Ok(total / splits.len() as f64)
}
