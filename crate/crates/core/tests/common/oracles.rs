//! Independent reference computations shared by the property and acceptance tests.

use fplogit::basis::BasisSystem;
use fplogit::fdata::FunctionalDataSet;
use nalgebra::{DMatrix, Matrix2, Matrix3x2};

use super::{grid, logistic, trapezoid};

/// Ψ by composite trapezoid on `m` points.
pub fn trapezoid_gram(b: &BasisSystem, m: usize) -> DMatrix<f64> {
    let (lo, hi) = b.rangeval();
    let t = grid(lo, hi, m);
    let phi = b.eval(&t).unwrap();
    let p = b.nbasis();
    DMatrix::from_fn(p, p, |j, k| {
        let prod: Vec<f64> = (0..m).map(|i| phi[(i, j)] * phi[(i, k)]).collect();
        trapezoid(&prod, lo, hi)
    })
}

/// Closed-form eigen-decomposition of a symmetric 2×2 matrix, descending.
pub fn eigen2(m: &Matrix2<f64>) -> ([f64; 2], [[f64; 2]; 2]) {
    let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let mid = (a + d) / 2.0;
    let rad = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let l = [mid + rad, mid - rad];
    let vec_for = |lam: f64| {
        let (x, y) = if b.abs() > 1e-15 {
            (b, lam - a)
        } else if (lam - a).abs() < 1e-15 {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let norm = (x * x + y * y).sqrt();
        [x / norm, y / norm]
    };
    (l, [vec_for(l[0]), vec_for(l[1])])
}

/// The hat-function basis on [0, 1] with curves 0, 2(1 − t) and t.
pub fn hat_instance() -> FunctionalDataSet {
    let b = BasisSystem::bspline((0.0, 1.0), 2, 1).unwrap();
    FunctionalDataSet::new(b, DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 2.0, 0.0, 0.0, 1.0])).unwrap()
}

/// Hat-instance coefficients minus their column means (2/3, 1/3).
pub fn hat_centered() -> Matrix3x2<f64> {
    Matrix3x2::new(-2.0 / 3.0, -1.0 / 3.0, 4.0 / 3.0, -1.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0)
}

/// Exact Gram matrix of the hat basis.
pub fn hat_psi() -> Matrix2<f64> {
    Matrix2::new(1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0)
}

/// Ψ^{1/2} of the hat basis from Ψ = Q diag(1/2, 1/6) Qᵀ, Q = [1 1; 1 −1]/√2.
pub fn hat_psi_sqrt() -> Matrix2<f64> {
    let (s1, s2) = (0.5f64.sqrt(), (1.0f64 / 6.0).sqrt());
    Matrix2::new(s1 + s2, s1 - s2, s1 - s2, s1 + s2) / 2.0
}

/// Largest deviation between FPCA output and a PCA of `h` by `eigen2`,
/// scores compared up to sign.
pub fn hat_fpca_error(eigenvalues: &[f64], scores: &DMatrix<f64>, h: Matrix3x2<f64>) -> f64 {
    let cov = h.transpose() * h / 2.0;
    let (lam, vecs) = eigen2(&cov);
    assert!(lam[0] - lam[1] > 1e-6, "hand instance must have distinct eigenvalues");
    let mut err: f64 = 0.0;
    for j in 0..2 {
        err = err.max((eigenvalues[j] - lam[j]).abs());
        let oracle = h * nalgebra::Vector2::new(vecs[j][0], vecs[j][1]);
        let got = scores.column(j);
        let sign = if got.dot(&oracle) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..3 {
            err = err.max((got[i] - sign * oracle[i]).abs());
        }
    }
    err
}

pub fn logit_deviance(x: &[f64], y: &[f64], a: f64, g: f64) -> f64 {
    -2.0 * x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let p = logistic(a + g * xi);
            if yi > 0.5 { p.ln() } else { (1.0 - p).ln() }
        })
        .sum::<f64>()
}

/// Deviance minimizer over (α, γ) ∈ [−10, 10]²: a 0.05 grid, then repeated
/// tenfold refinements around the best point down to step `finest`.
/// Returns (deviance, α, γ).
pub fn grid_search_mle(x: &[f64], y: &[f64], finest: f64) -> (f64, f64, f64) {
    let (mut ca, mut cg, mut half, mut step) = (0.0, 0.0, 10.0, 0.05);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    while step >= finest * 0.999 {
        let k = (half / step).round() as i64;
        best = (f64::INFINITY, 0.0, 0.0);
        for i in -k..=k {
            for j in -k..=k {
                let (a, g) = (ca + i as f64 * step, cg + j as f64 * step);
                let d = logit_deviance(x, y, a, g);
                if d < best.0 {
                    best = (d, a, g);
                }
            }
        }
        ca = best.1;
        cg = best.2;
        half = 2.0 * step;
        step /= 10.0;
    }
    best
}

/// The 8-point single-predictor logit instance (overlapping classes).
pub fn eight_point_instance() -> ([f64; 8], [f64; 8]) {
    (
        [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0],
        [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0],
    )
}

/// AUC by enumerating every positive–negative pair.
pub fn brute_auc(y: &[f64], p: &[f64]) -> f64 {
    let (mut num, mut pairs) = (0.0, 0.0);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1.0 && y[j] == 0.0 {
                pairs += 1.0;
                num += if p[i] > p[j] {
                    1.0
                } else if p[i] == p[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    num / pairs
}
