//! Bootstrap aggregation of regression trees.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tree::RegressionTree;
use crate::data::CountryDataset;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_BAGS: usize = 25;
pub const DEFAULT_MIN_NODE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeBagModel {
    pub feature_names: Vec<String>,
    pub trees: Vec<RegressionTree>,
    pub n_bags: usize,
    pub min_node: usize,
    pub seed: u64,
}

impl TreeBagModel {
    /// Forest from explicit trees.
    pub fn from_trees(feature_names: Vec<String>, trees: Vec<RegressionTree>, min_node: usize, seed: u64) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InvalidParameter("a forest needs at least one tree".into()));
        }
        Ok(TreeBagModel {
            n_bags: trees.len(),
            feature_names,
            trees,
            min_node,
            seed,
        })
    }

    /// Unweighted mean of the trees' leaf values.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                found: x.len(),
            });
        }
        let first = self.trees[0].predict(x);
        let mut sum = first;
        let mut agree = true;
        for t in &self.trees[1..] {
            let v = t.predict(x);
            agree &= v == first;
            sum += v;
        }
        Ok(if agree { first } else { sum / self.trees.len() as f64 })
    }
}

/// Grows `n_bags` trees, each on its own seeded bootstrap sample of the rows.
pub fn train_treebag(data: &CountryDataset, n_bags: usize, min_node: usize, seed: u64) -> Result<TreeBagModel> {
    if n_bags < 1 {
        return Err(Error::InvalidParameter("n_bags must be >= 1".into()));
    }
    if min_node < 2 {
        return Err(Error::InvalidParameter("min_node must be >= 2".into()));
    }
    let n = data.n();
    if n < 2 * min_node {
        return Err(Error::TooShortForTrees { n, needed: 2 * min_node });
    }
    let trees = (0..n_bags)
        .map(|b| {
            let mut g = rng::seeded(rng::derive(seed, b as u64));
            let sample: Vec<usize> = (0..n).map(|_| g.random_range(0..n)).collect();
            RegressionTree::grow(data.x(), data.y(), sample, min_node)
        })
        .collect();
    TreeBagModel::from_trees(data.feature_names().to_vec(), trees, min_node, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use alloc::string::ToString;
    use alloc::vec;

    fn line(n: usize) -> CountryDataset {
        let x = Matrix::from_rows(&(0..n).map(|i| vec![i as f64, (i * i % 7) as f64]).collect::<Vec<_>>()).unwrap();
        let y = (0..n).map(|i| libm::sqrt(i as f64)).collect();
        CountryDataset::synthetic(&["a", "b"], x, y).unwrap()
    }

    #[test]
    fn same_seed_same_forest() {
        let d = line(60);
        assert_eq!(train_treebag(&d, 5, 3, 11).unwrap(), train_treebag(&d, 5, 3, 11).unwrap());
        assert_ne!(train_treebag(&d, 5, 3, 11).unwrap(), train_treebag(&d, 5, 3, 12).unwrap());
    }

    #[test]
    fn single_leaf_forest_predicts_constant() {
        let f = TreeBagModel::from_trees(vec!["a".to_string()], vec![RegressionTree::constant(3.5, 10, 1)], 5, 0).unwrap();
        assert_eq!(f.predict(&[9.0]).unwrap(), 3.5);
    }

    #[test]
    fn constant_target_forest_is_exact() {
        let d = line(45).with_target(vec![3.7; 45]);
        let f = train_treebag(&d, 25, 5, 3).unwrap();
        assert!(f.trees.iter().all(|t| t.leaf_count() == 1));
        assert_eq!(f.predict(&[0.3, 1.0]).unwrap(), 3.7);
    }

    #[test]
    fn two_tree_forest_averages() {
        let trees = vec![RegressionTree::constant(4.0, 10, 1), RegressionTree::constant(6.0, 10, 1)];
        let f = TreeBagModel::from_trees(vec!["a".to_string()], trees, 5, 0).unwrap();
        assert_eq!(f.predict(&[0.0]).unwrap(), 5.0);
    }

    #[test]
    fn one_bag_equals_its_tree() {
        let d = line(40);
        let f = train_treebag(&d, 1, 5, 3).unwrap();
        for i in 0..d.n() {
            assert_eq!(f.predict(d.x().row(i)).unwrap(), f.trees[0].predict(d.x().row(i)));
        }
    }

    #[test]
    fn parameter_checks() {
        let d = line(9);
        assert!(matches!(train_treebag(&d, 3, 5, 0), Err(Error::TooShortForTrees { n: 9, needed: 10 })));
        assert!(train_treebag(&d, 0, 2, 0).is_err());
        assert!(train_treebag(&d, 1, 1, 0).is_err());
        assert!(f64::is_finite(train_treebag(&d, 2, 2, 0).unwrap().predict(&[1.0, 1.0]).unwrap()));
    }

    #[test]
    fn dimension_mismatch() {
        let f = train_treebag(&line(30), 2, 5, 0).unwrap();
        assert!(matches!(f.predict(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }
}
