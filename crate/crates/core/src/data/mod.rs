//! Quarterly series, transforms, model specs and dataset assembly.

mod correlation;
mod dataset;
mod quarter;
mod series;
mod spec;

pub use correlation::{hpi_correlation_matrix, hpi_correlation_matrix_with, CorrelationMatrix, MIN_OVERLAP};
pub use dataset::{
    assemble_dataset, assemble_dataset_with, AssembleOptions, CountryDataset, SeriesBundle, DEFAULT_MIN_ROWS,
};
pub use quarter::{Date, Quarter};
pub use series::{
    fill_gaps_linear, rate_12q, rate_4q, rate_over, resample_end_of_quarter, DatedSeries, Indicator, Observation,
    QuarterlySeries,
};
pub use spec::{builtin_names, builtin_specs, FeatureForm, FeatureSpec, ModelSpec, TargetForm};
