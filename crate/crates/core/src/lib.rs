//! Functional principal component logit regression.
//!
//! Discretely observed curves are smoothed onto a Fourier or B-spline basis,
//! reduced to ordinary or filtered functional principal components, and used
//! (together with scalar covariates) as predictors of a binary response in a
//! logit model fitted by iteratively reweighted least squares. The functional
//! parameters β_r(t) and the intercept α are reconstructed from the component
//! coefficients, and the fit is summarized with a ROC curve and the correct
//! classification rate.
//!
//! The four fitting entry points live in [`fpclogit`]:
//! [`logitfd_pc`], [`logitfd_fpc`], [`logitfd_pc_step`] and [`logitfd_fpc_step`].

pub mod basis;
pub mod cli;
pub mod error;
pub mod fdata;
pub mod fpca;
pub mod fpclogit;
pub mod logit;
pub mod metrics;
pub mod numkernel;
pub mod stepwise;

pub use basis::{BasisKind, BasisSpec, BasisSystem, GramMatrix};
pub use error::{Error, Result};
pub use fdata::FunctionalDataSet;
pub use fpca::{FpcaResult, FpcaVariant, VarianceTable};
pub use fpclogit::{
    logitfd_fpc, logitfd_fpc_step, logitfd_pc, logitfd_pc_step, FpcLogitFit, ScalarCovariates,
};
pub use logit::{DesignMatrix, LogitFit};
pub use metrics::{ConfusionTable, RocCurve};
pub use stepwise::StepTrace;
