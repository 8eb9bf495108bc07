use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Repeated k-fold cross-validation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 3,
            seed: 0,
        }
    }
}

impl CvConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        CvConfig { seed, ..self }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidParameter("cv folds must be >= 2".into()));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidParameter("cv repeats must be >= 1".into()));
        }
        if n < self.folds {
            return Err(Error::InvalidParameter(alloc::format!(
                "{n} rows cannot be split into {} folds",
                self.folds
            )));
        }
        Ok(())
    }

    /// Size of the smallest training split.
    pub fn min_train_size(&self, n: usize) -> usize {
        n - n.div_ceil(self.folds)
    }

    /// `(train, test)` index pairs for every fold of every repeat, in a fixed order.
    /// Each repeat shuffles rows with its own seeded stream and cuts the permutation
    /// into contiguous folds whose sizes differ by at most one.
    pub fn splits(&self, n: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
        self.validate(n)?;
        let mut out = Vec::with_capacity(self.folds * self.repeats);
        for r in 0..self.repeats {
            let mut g = rng::seeded(rng::derive(self.seed, 0xC0FF_EE00 + r as u64));
            let perm = rng::permutation(n, &mut g);
            let base = n / self.folds;
            let extra = n % self.folds;
            let mut start = 0;
            for f in 0..self.folds {
                let len = base + usize::from(f < extra);
                let mut test: Vec<usize> = perm[start..start + len].to_vec();
                test.sort_unstable();
                let mut train: Vec<usize> = perm[..start].iter().chain(&perm[start + len..]).copied().collect();
                train.sort_unstable();
                out.push((train, test));
                start += len;
            }
        }
        Ok(out)
    }
}
