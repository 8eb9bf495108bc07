//! Unpruned CART regression trees grown by greedy variance reduction.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
        rows: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Drop in sum of squared errors credited to `feature`.
        gain: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    n_features: usize,
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    min_node: usize,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn sse(y: &[f64], idx: &[usize]) -> (f64, f64) {
    let first = y[idx[0]];
    if idx.iter().all(|&i| y[i] == first) {
        return (first, 0.0);
    }
    let n = idx.len() as f64;
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
    let s = idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum::<f64>();
    (mean, s)
}

impl Grower<'_> {
    fn grow(&mut self, idx: Vec<usize>) -> usize {
        let (mean, total) = sse(self.y, &idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: mean,
            rows: idx.len(),
        });
        if idx.len() < 2 * self.min_node || total <= 0.0 {
            return id;
        }
        let Some(best) = self.best_split(&idx, total) else {
            return id;
        };
        let left = self.grow(best.left);
        let right = self.grow(best.right);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            gain: best.gain,
            left,
            right,
        };
        id
    }

    /// Scans every feature and every midpoint between consecutive distinct values,
    /// keeping both children at `min_node` rows or more. Ties keep the first
    /// candidate found (lowest feature, lowest threshold).
    fn best_split(&self, idx: &[usize], total: f64) -> Option<BestSplit> {
        let n = idx.len();
        let mut best: Option<(usize, f64, f64, usize)> = None;
        let mut order = idx.to_vec();
        let mut best_order: Vec<usize> = Vec::new();
        for f in 0..self.x.cols() {
            order.sort_by(|&a, &b| self.x.get(a, f).total_cmp(&self.x.get(b, f)).then(a.cmp(&b)));
            let sum: f64 = order.iter().map(|&i| self.y[i]).sum();
            let sum_sq: f64 = order.iter().map(|&i| self.y[i] * self.y[i]).sum();
            let mut ls = 0.0;
            let mut lss = 0.0;
            for s in 1..n {
                let yi = self.y[order[s - 1]];
                ls += yi;
                lss += yi * yi;
                if s < self.min_node || n - s < self.min_node {
                    continue;
                }
                let lo = self.x.get(order[s - 1], f);
                let hi = self.x.get(order[s], f);
                if lo == hi {
                    continue;
                }
                let (nl, nr) = (s as f64, (n - s) as f64);
                let rs = sum - ls;
                let rss = sum_sq - lss;
                let child = (lss - ls * ls / nl) + (rss - rs * rs / nr);
                let gain = total - child;
                if gain > 1e-12 * total.max(1e-300) && best.is_none_or(|b| gain > b.2) {
                    best = Some((f, lo + (hi - lo) / 2.0, gain, s));
                    best_order.clear();
                    best_order.extend_from_slice(&order);
                }
            }
        }
        let (feature, threshold, gain, cut) = best?;
        Some(BestSplit {
            feature,
            threshold,
            gain,
            left: best_order[..cut].to_vec(),
            right: best_order[cut..].to_vec(),
        })
    }
}

impl RegressionTree {
    /// Grows a tree on rows `idx` (duplicates allowed, as in a bootstrap sample).
    /// Nodes with fewer than `2 * min_node` rows or zero variance become leaves.
    pub fn grow(x: &Matrix, y: &[f64], idx: Vec<usize>, min_node: usize) -> Self {
        let mut g = Grower {
            x,
            y,
            min_node: min_node.max(1),
            nodes: Vec::new(),
        };
        g.grow(idx);
        RegressionTree {
            nodes: g.nodes,
            n_features: x.cols(),
        }
    }

    /// A single-leaf tree.
    pub fn constant(value: f64, rows: usize, n_features: usize) -> Self {
        RegressionTree {
            nodes: vec![Node::Leaf { value, rows }],
            n_features,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Rows go left when `x[feature] <= threshold`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => id = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Total gain credited to each feature.
    pub fn feature_gains(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.n_features];
        for n in &self.nodes {
            if let Node::Split { feature, gain, .. } = n {
                g[*feature] += gain;
            }
        }
        g
    }
}
