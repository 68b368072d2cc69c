//! Dense linear algebra and quadrature primitives.
//!
//! Everything here is a pure function of its arguments. Eigen-decompositions
//! are returned with eigenvalues sorted in descending order and each
//! eigenvector sign-fixed so that its largest-magnitude entry is positive,
//! which makes downstream principal components reproducible.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance below which an eigenvalue of a PSD matrix is treated as
/// roundoff and clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues, descending.
    pub values: DVector<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    /// V·diag(λ)·Vᵀ
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }
}

/// A quadrature rule on a finite interval.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Σ w_k f(x_k)
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix(format!("{what} has non-finite entries")))
    }
}

/// Frobenius norm, used as the scale for relative tolerances.
pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Symmetric eigen-decomposition with descending eigenvalues and canonical signs.
///
/// The input is symmetrized as (S+Sᵀ)/2 first.
pub fn sym_eigen(s: &DMatrix<f64>) -> Result<SymEigen> {
    if !s.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "expected a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    check_finite(s, "matrix")?;
    let p = s.nrows();
    if p == 0 {
        return Ok(SymEigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..p).collect();
    // stable sort keeps the solver's order among exact ties
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = DVector::from_iterator(p, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(p, p);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        // near-ties (within relative 1e-12) resolve to the first entry
        let max_abs = col.amax();
        let lead = col
            .iter()
            .position(|v| v.abs() >= max_abs * (1.0 - 1e-12))
            .unwrap_or(0);
        if col[lead] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(SymEigen { values, vectors })
}

fn psd_spectrum(s: &DMatrix<f64>) -> Result<SymEigen> {
    let eig = sym_eigen(s)?;
    let tol = PSD_TOLERANCE * frobenius(s);
    if let Some(&worst) = eig.values.iter().find(|&&v| v < -tol) {
        return Err(Error::NotPsd {
            eigenvalue: worst,
            tolerance: tol,
        });
    }
    Ok(eig)
}

/// Symmetric square root V·diag(√max(λ,0))·Vᵀ of a PSD matrix.
pub fn matrix_sqrt_sym(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = psd_spectrum(s)?;
    let roots = eig.values.map(|v| v.max(0.0).sqrt());
    Ok(&eig.vectors * DMatrix::from_diagonal(&roots) * eig.vectors.transpose())
}

/// Inverse symmetric square root of a positive definite matrix.
///
/// Fails with `NotPsd` when any eigenvalue is at or below the PSD tolerance,
/// since the inverse root would not exist.
pub fn matrix_inv_sqrt_sym(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = psd_spectrum(s)?;
    let tol = PSD_TOLERANCE * frobenius(s);
    let smallest = eig.values[eig.values.len() - 1];
    if smallest <= tol {
        return Err(Error::NotPsd {
            eigenvalue: smallest,
            tolerance: tol,
        });
    }
    let inv_roots = eig.values.map(|v| 1.0 / v.sqrt());
    Ok(&eig.vectors * DMatrix::from_diagonal(&inv_roots) * eig.vectors.transpose())
}

/// Gauss–Legendre rule with `n` nodes mapped to (a, b).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!(
            "quadrature interval ({a}, {b}) is empty or not finite"
        )));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;

    // roots are symmetric; solve for the positive half by Newton on P_n
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Numerical rank of `m` from its singular values.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = m.nrows().max(m.ncols()) as f64 * f64::EPSILON * smax;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Least-squares solution of M·X ≈ B through the singular value decomposition.
///
/// Rank deficiency is an error rather than a silent pseudo-inverse.
pub fn lstsq(m: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, p) = m.shape();
    if b.nrows() != rows {
        return Err(Error::invalid(format!(
            "lstsq: design has {rows} rows but right-hand side has {}",
            b.nrows()
        )));
    }
    if rows < p {
        return Err(Error::RankDeficient {
            rank: rows,
            required: p,
        });
    }
    check_finite(m, "design")?;
    check_finite(b, "right-hand side")?;
    if p == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    let svd = m.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = rows.max(p) as f64 * f64::EPSILON * smax;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    if rank < p {
        return Err(Error::RankDeficient { rank, required: p });
    }
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut utb = u.transpose() * b;
    for (i, s) in sv.iter().enumerate() {
        utb.row_mut(i).scale_mut(1.0 / s);
    }
    Ok(vt.transpose() * utb)
}
