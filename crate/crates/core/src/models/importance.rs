use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::treebag::TreeBagModel;
use crate::data::CountryDataset;
use crate::metrics::pearson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImportanceMethod {
    /// Squared Pearson correlation of each feature with the target.
    Filter,
    /// Variance reduction credited to each feature over all splits of all trees.
    TreeSse,
}

impl ImportanceMethod {
    pub fn code(&self) -> &'static str {
        match self {
            ImportanceMethod::Filter => "FILTER",
            ImportanceMethod::TreeSse => "TREE_SSE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub method: ImportanceMethod,
    pub features: Vec<String>,
    pub raw: Vec<f64>,
    /// Scores on a 0..=100 scale.
    pub scores: Vec<f64>,
}

impl ImportanceReport {
    /// Feature names ordered by decreasing score; ties keep column order.
    pub fn ranking(&self) -> Vec<&str> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        idx.into_iter().map(|i| self.features[i].as_str()).collect()
    }

    pub fn score(&self, feature: &str) -> Option<f64> {
        self.features.iter().position(|f| f == feature).map(|i| self.scores[i])
    }
}

/// FILTER importance: squared correlation with the target divided by the largest one,
/// times 100.
pub fn filter_importance(data: &CountryDataset) -> ImportanceReport {
    let raw: Vec<f64> = (0..data.d())
        .map(|j| {
            let r = pearson(&data.column(j), data.y()).ok().flatten().unwrap_or(0.0);
            r * r
        })
        .collect();
    let max = raw.iter().cloned().fold(0.0f64, f64::max);
    let scores = raw.iter().map(|r| if max > 0.0 { 100.0 * r / max } else { 0.0 }).collect();
    ImportanceReport {
        method: ImportanceMethod::Filter,
        features: data.feature_names().to_vec(),
        raw,
        scores,
    }
}

/// TREE_SSE importance, min-max scaled so the top feature scores 100 and the
/// weakest 0.
pub fn tree_importance(model: &TreeBagModel) -> ImportanceReport {
    let mut raw = alloc::vec![0.0; model.feature_names.len()];
    for t in &model.trees {
        for (r, g) in raw.iter_mut().zip(t.feature_gains()) {
            *r += g;
        }
    }
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let scores = raw
        .iter()
        .map(|r| {
            if max <= 0.0 {
                0.0
            } else if max == min {
                100.0
            } else {
                100.0 * (r - min) / (max - min)
            }
        })
        .collect();
    ImportanceReport {
        method: ImportanceMethod::TreeSse,
        features: model.feature_names.clone(),
        raw,
        scores,
    }
}
