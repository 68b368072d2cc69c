//! Batch front end: CSV ingestion, monthly aggregation, fit configuration
//! and report emission.

mod config;
mod io;
mod report;
mod run;

pub use config::{FitConfig, FitMode, PredictorConfig};
pub use io::{ingest_covariates, ingest_curves, monthly_means, write_curve_table, CovariateTable, CurveTable, MONTH_RANGES};
pub use report::{FitReport, Num};
pub use run::{run_fit, run_monthly, validate_config, FitOutcome, StageError};
