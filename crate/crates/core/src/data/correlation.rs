use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::series::QuarterlySeries;
use crate::error::{Error, Result};
use crate::metrics::pearson;

/// Pairs with fewer overlapping quarters are reported as absent.
pub const MIN_OVERLAP: usize = 8;

/// Pairwise Pearson correlations of HPI series, each pair computed on the quarters
/// both countries report.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub countries: Vec<String>,
    /// `None` where the overlap is too short or a side is constant on it.
    pub values: Vec<Vec<Option<f64>>>,
    pub overlaps: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.countries.iter().position(|c| c == a)?;
        let j = self.countries.iter().position(|c| c == b)?;
        self.values[i][j]
    }
}

pub fn hpi_correlation_matrix(hpi_by_country: &BTreeMap<String, QuarterlySeries>) -> Result<CorrelationMatrix> {
    hpi_correlation_matrix_with(hpi_by_country, MIN_OVERLAP)
}

pub fn hpi_correlation_matrix_with(
    hpi_by_country: &BTreeMap<String, QuarterlySeries>,
    min_overlap: usize,
) -> Result<CorrelationMatrix> {
    if hpi_by_country.len() < 2 {
        return Err(Error::InvalidParameter("correlation needs at least two countries".into()));
    }
    let countries: Vec<String> = hpi_by_country.keys().cloned().collect();
    let series: Vec<&QuarterlySeries> = hpi_by_country.values().collect();
    let k = countries.len();
    let mut values = vec![vec![None; k]; k];
    let mut overlaps = vec![vec![0usize; k]; k];
    for i in 0..k {
        values[i][i] = Some(1.0);
        overlaps[i][i] = series[i].len();
        for j in i + 1..k {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for p in series[i].points() {
                if let Some(v) = series[j].get(p.quarter) {
                    a.push(p.value);
                    b.push(v);
                }
            }
            overlaps[i][j] = a.len();
            overlaps[j][i] = a.len();
            if a.len() >= min_overlap.max(2) {
                let r = pearson(&a, &b)?;
                values[i][j] = r;
                values[j][i] = r;
            }
        }
    }
    Ok(CorrelationMatrix {
        countries,
        values,
        overlaps,
    })
}
