//! Econometric comparison methods: VAR, no-intercept least squares, Gaussian GLM
//! and the hold-out method comparison table.

mod benchmark;
mod linear;
mod var;

pub use benchmark::{benchmark_from_holdouts, benchmark_table, BenchmarkConfig, BenchmarkTable, MethodPath};
pub use linear::{fit_glm, linear_inversion, perturbed_glm_ensemble, LinearCoefficients, PerturbedGlm};
pub use var::{fit_var, forecast_var, Deterministic, ForecastMode, VarForecast, VarModel};
