//! Model diagnostics: permutation test, augmented Dickey-Fuller test on residuals
//! and the last-four-quarters hold-out evaluation.

mod adf;
mod holdout;
mod permutation;

pub use adf::{adf_critical_values, adf_p_value, adf_test, schwert_lags, AdfResult, Regression};
pub use holdout::{holdout_last4, holdout_run, holdout_with, HoldoutReport, HOLDOUT_HORIZON};
pub use permutation::{
    permutation_test, permuted_dataset, permuted_ensemble, permuted_run, PermutationReport, PermutationSet,
    PermutedStatistics,
};
