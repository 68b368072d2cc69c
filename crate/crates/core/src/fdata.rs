//! Functional data sets in basis-coefficient form.

use nalgebra::{DMatrix, RowDVector};

use crate::basis::BasisSystem;
use crate::error::{Error, Result};
use crate::numkernel::lstsq;

/// n curves x_i(t) = Σ_j a_ij φ_j(t), stored curves-in-rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDataSet {
    basis: BasisSystem,
    coefs: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

impl FunctionalDataSet {
    pub fn new(basis: BasisSystem, coefs: DMatrix<f64>) -> Result<Self> {
        if coefs.ncols() != basis.nbasis() {
            return Err(Error::SchemaMismatch(format!(
                "coefficient matrix has {} columns, basis has {} functions",
                coefs.ncols(),
                basis.nbasis()
            )));
        }
        if !coefs.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite basis coefficient".into()));
        }
        Ok(FunctionalDataSet {
            basis,
            coefs,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.coefs.nrows() {
            return Err(Error::SchemaMismatch(format!(
                "{} labels for {} curves",
                labels.len(),
                self.coefs.nrows()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn basis(&self) -> &BasisSystem {
        &self.basis
    }

    pub fn coefs(&self) -> &DMatrix<f64> {
        &self.coefs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn ncurves(&self) -> usize {
        self.coefs.nrows()
    }

    /// Least-squares smoothing of curves observed on a common grid.
    ///
    /// `x` is n×m with one curve per row; each row of the result minimizes
    /// Σ_k (x_i(t_k) − Σ_j a_ij φ_j(t_k))².
    pub fn smooth(argvals: &[f64], x: &DMatrix<f64>, basis: &BasisSystem) -> Result<Self> {
        let m = argvals.len();
        let p = basis.nbasis();
        if x.ncols() != m {
            return Err(Error::SchemaMismatch(format!(
                "{} sampling times but observation matrix has {} columns",
                m,
                x.ncols()
            )));
        }
        if m < p {
            return Err(Error::UnderDetermined { points: m, nbasis: p });
        }
        if argvals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("argvals must be strictly increasing"));
        }
        let phi = basis.eval(argvals)?;
        let coefs_t = lstsq(&phi, &x.transpose())?;
        FunctionalDataSet::new(basis.clone(), coefs_t.transpose())
    }

    /// Curve values at `t`, one row per curve.
    pub fn eval(&self, t: &[f64]) -> Result<DMatrix<f64>> {
        let phi = self.basis.eval(t)?;
        Ok(&self.coefs * phi.transpose())
    }

    /// Column means ā of the coefficient matrix.
    pub fn mean_coefs(&self) -> Result<RowDVector<f64>> {
        if self.coefs.nrows() == 0 {
            return Err(Error::invalid("mean of an empty functional data set"));
        }
        Ok(self.coefs.row_mean())
    }

    /// The mean curve x̄(t) as a single-curve set.
    pub fn mean(&self) -> Result<Self> {
        let m = self.mean_coefs()?;
        FunctionalDataSet::new(self.basis.clone(), DMatrix::from_rows(&[m]))
    }

    /// Curves minus the mean curve.
    pub fn center(&self) -> Result<Self> {
        let m = self.mean_coefs()?;
        let mut c = self.coefs.clone();
        for mut row in c.row_iter_mut() {
            row -= &m;
        }
        Ok(FunctionalDataSet {
            basis: self.basis.clone(),
            coefs: c,
            labels: self.labels.clone(),
        })
    }

    /// Coefficient-level linear combination a·self + b·other.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.basis != other.basis || self.coefs.shape() != other.coefs.shape() {
            return Err(Error::SchemaMismatch("functional data sets differ in basis or size".into()));
        }
        FunctionalDataSet::new(self.basis.clone(), &self.coefs * a + &other.coefs * b)
    }
}
