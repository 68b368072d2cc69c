//! Ordinary and filtered functional principal component analysis.
//!
//! Both variants work on the centered coefficient matrix A_c and the Gram
//! matrix Ψ of the basis, never on a discretized covariance surface:
//!
//! * ordinary: PCA of H = A_c Ψ^{1/2}. Eigenfunction coefficients are
//!   F = Ψ^{-1/2} V and the scores ξ_ij = ∫(x_i − x̄) f_j equal H V.
//! * filtered: PCA of H = A_c Ψ, the functional block of the logit design
//!   matrix. F* = Ψ^{-1/2} V and the scores are H V.
//!
//! In both cases the covariance divisor is n − 1.

use std::fmt;

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::Serialize;

use crate::basis::GramMatrix;
use crate::error::{Error, Result};
use crate::fdata::FunctionalDataSet;
use crate::numkernel::{matrix_inv_sqrt_sym, matrix_sqrt_sym, sym_eigen};

/// Eigenvalues below this fraction of the largest one are reported as zero.
const EIGEN_RELATIVE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FpcaVariant {
    Ordinary,
    Filtered,
}

#[derive(Debug, Clone)]
pub struct FpcaResult {
    pub variant: FpcaVariant,
    /// n×p score matrix Ξ.
    pub scores: DMatrix<f64>,
    /// p×p matrix whose column j holds the basis coefficients of f_j.
    pub eigenfn_coefs: DMatrix<f64>,
    /// λ_1 ≥ … ≥ λ_p ≥ 0.
    pub eigenvalues: DVector<f64>,
    pub mean_coefs: RowDVector<f64>,
    pub gram: GramMatrix,
    /// p×p matrix W with Ξ = A_c Ψ W: the map from component coefficients γ
    /// to the basis coefficients of β(t) = Σ_j γ_j (W e_j)ᵀφ(t) that leaves
    /// the logit linear predictor unchanged.
    pub score_map: DMatrix<f64>,
    /// min(p, n − 1): number of components reported in variance tables.
    pub ncomponents: usize,
}

impl FpcaResult {
    /// Number of components with a nonzero eigenvalue.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().take_while(|&&v| v > 0.0).count()
    }

    pub fn nbasis(&self) -> usize {
        self.eigenfn_coefs.nrows()
    }

    /// Percent and cumulative percent of explained variance, rows labeled
    /// `prefix.1`, `prefix.2`, ….
    pub fn variance_table(&self, prefix: &str) -> VarianceTable {
        let values: Vec<f64> = self.eigenvalues.iter().take(self.ncomponents).cloned().collect();
        VarianceTable::from_eigenvalues(prefix, &values)
    }
}

fn fpca_impl(fd: &FunctionalDataSet, variant: FpcaVariant) -> Result<FpcaResult> {
    let n = fd.ncurves();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "FPCA needs at least 2 curves, got {n}"
        )));
    }
    let p = fd.basis().nbasis();
    let gram = fd.basis().gram();
    let psi = &gram.psi;
    let mean_coefs = fd.mean_coefs()?;
    let centered = fd.center()?;
    let ac = centered.coefs();

    let psi_half = matrix_sqrt_sym(psi)?;
    let psi_inv_half = matrix_inv_sqrt_sym(psi)?;
    let h = match variant {
        FpcaVariant::Ordinary => ac * &psi_half,
        FpcaVariant::Filtered => ac * psi,
    };
    let cov = h.transpose() * &h / (n as f64 - 1.0);
    let eig = sym_eigen(&cov)?;
    let v = eig.vectors;

    let ncomponents = p.min(n - 1);
    let top = eig.values[0].max(0.0);
    let mut eigenvalues = eig.values.clone();
    for (j, value) in eigenvalues.iter_mut().enumerate() {
        if j >= ncomponents || top == 0.0 || *value < EIGEN_RELATIVE_FLOOR * top {
            *value = 0.0;
        }
    }
    let mut scores = &h * &v;
    for j in 0..p {
        if eigenvalues[j] == 0.0 {
            scores.column_mut(j).fill(0.0);
        }
    }
    let eigenfn_coefs = &psi_inv_half * &v;
    let score_map = match variant {
        FpcaVariant::Ordinary => eigenfn_coefs.clone(),
        FpcaVariant::Filtered => v,
    };
    Ok(FpcaResult {
        variant,
        scores,
        eigenfn_coefs,
        eigenvalues,
        mean_coefs,
        gram,
        score_map,
        ncomponents,
    })
}

/// Ordinary FPCA: eigen-analysis of the sample covariance of A_c Ψ^{1/2}.
pub fn fpca_ordinary(fd: &FunctionalDataSet) -> Result<FpcaResult> {
    fpca_impl(fd, FpcaVariant::Ordinary)
}

/// Filtered FPCA: multivariate PCA of the design block A_c Ψ.
pub fn fpca_filtered(fd: &FunctionalDataSet) -> Result<FpcaResult> {
    fpca_impl(fd, FpcaVariant::Filtered)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub label: String,
    pub percent: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceTable {
    pub rows: Vec<VarianceRow>,
}

impl VarianceTable {
    pub fn from_eigenvalues(prefix: &str, values: &[f64]) -> Self {
        let total: f64 = values.iter().sum();
        let mut cumulative = 0.0;
        let rows = values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let percent = if total > 0.0 { 100.0 * v / total } else { 0.0 };
                cumulative += percent;
                VarianceRow {
                    label: format!("{prefix}.{}", j + 1),
                    percent,
                    cumulative: cumulative.min(100.0),
                }
            })
            .collect();
        VarianceTable { rows }
    }

    /// Plain-text layout with a configurable number of decimals.
    pub fn to_text(&self, decimals: usize) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<8} {:>12} {:>12}\n", "", "Var %", "Cum %"));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<8} {:>12.*} {:>12.*}\n",
                r.label, decimals, r.percent, decimals, r.cumulative
            ));
        }
        out
    }
}

impl fmt::Display for VarianceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(3))
    }
}
