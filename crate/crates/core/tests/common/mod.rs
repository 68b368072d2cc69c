#![allow(dead_code)]

pub mod oracles;

use fplogit::basis::BasisSystem;
use fplogit::fdata::FunctionalDataSet;
use fplogit::fpclogit::ScalarCovariates;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

pub fn grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| if i + 1 == m { hi } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 })
        .collect()
}

/// Composite trapezoid rule of sampled values on an equally spaced grid.
pub fn trapezoid(values: &[f64], lo: f64, hi: f64) -> f64 {
    let m = values.len();
    let h = (hi - lo) / (m - 1) as f64;
    let inner: f64 = values[1..m - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[m - 1]))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn mat_max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).amax()
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Two-class curve sample on [0, 1].
pub struct TwoClassSample {
    pub argvals: Vec<f64>,
    pub observations: DMatrix<f64>,
    pub y: Vec<f64>,
    /// Curve value minus the class-0 mean, projected on the class gap: the
    /// classifier a Bayes rule would use with known generating parameters.
    pub oracle_score: Vec<f64>,
}

pub const SIM_SEED: u64 = 4;
pub const SIM_N: usize = 80;
pub const SIM_M: usize = 50;
pub const SIM_AMPLITUDE: f64 = 3.5;
pub const SIM_SCALES: [f64; 3] = [1.0, 0.6, 0.3];
pub const SIM_NOISE: f64 = 0.1;

fn sim_mean(t: f64, class: f64) -> f64 {
    (2.0 * std::f64::consts::PI * t).sin() + class * SIM_AMPLITUDE * sim_mode(0, t)
}

fn sim_mode(k: usize, t: f64) -> f64 {
    2f64.sqrt() * ((k + 1) as f64 * std::f64::consts::PI * t).sin()
}

/// x_i(t) = sin 2πt + y_i·3.5 √2 sin πt + Σ_k z_ik s_k √2 sin((k+1)πt) + ε,
/// observed at `m` equally spaced points. Classes alternate 0/1.
pub fn two_class_sample(n: usize, m: usize, seed: u64) -> TwoClassSample {
    let mut r = rng(seed);
    let argvals = grid(0.0, 1.0, m);
    let y: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
    let mut obs = DMatrix::zeros(n, m);
    let mut latent = DMatrix::zeros(n, 3);
    for i in 0..n {
        for k in 0..3 {
            latent[(i, k)] = normal(&mut r) * SIM_SCALES[k];
        }
        for (j, &t) in argvals.iter().enumerate() {
            let mut v = sim_mean(t, y[i]);
            for k in 0..3 {
                v += latent[(i, k)] * sim_mode(k, t);
            }
            obs[(i, j)] = v + SIM_NOISE * normal(&mut r);
        }
    }
    // Bayes direction for Gaussian classes with covariance K = Σ s_k² g_k g_kᵀ + σ²I
    // evaluated on the sampling grid: w = K⁻¹ δ, score = wᵀ(x − μ₀).
    let mut k = DMatrix::<f64>::identity(m, m) * (SIM_NOISE * SIM_NOISE);
    for (kk, scale) in SIM_SCALES.iter().enumerate() {
        let g: Vec<f64> = argvals.iter().map(|&t| sim_mode(kk, t)).collect();
        for a in 0..m {
            for b in 0..m {
                k[(a, b)] += scale * scale * g[a] * g[b];
            }
        }
    }
    let delta = nalgebra::DVector::from_iterator(
        m,
        argvals.iter().map(|&t| SIM_AMPLITUDE * sim_mode(0, t)),
    );
    let w = k.cholesky().expect("SPD").solve(&delta);
    let half_gap = 0.5 * w.dot(&delta);
    let oracle_score = (0..n)
        .map(|i| {
            let centered = nalgebra::DVector::from_iterator(
                m,
                argvals.iter().enumerate().map(|(j, &t)| obs[(i, j)] - sim_mean(t, 0.0)),
            );
            w.dot(&centered) - half_gap
        })
        .collect();
    TwoClassSample {
        argvals,
        observations: obs,
        y,
        oracle_score,
    }
}

/// Random coefficient data set for property tests.
pub fn random_fd(r: &mut ChaCha8Rng, n: usize, basis: BasisSystem) -> FunctionalDataSet {
    let p = basis.nbasis();
    let scales: Vec<f64> = (0..p).map(|j| 1.0 / (1.0 + j as f64)).collect();
    let coefs = DMatrix::from_fn(n, p, |_, j| normal(r) * scales[j] + 0.3);
    FunctionalDataSet::new(basis, coefs).unwrap()
}

/// A non-separated logit instance with one functional predictor and one
/// scalar covariate; the response follows a weak logit signal.
pub struct LogitInstance {
    pub y: Vec<f64>,
    pub fd: FunctionalDataSet,
    pub nonfd: ScalarCovariates,
}

pub fn random_instance(seed: u64, fourier: bool) -> LogitInstance {
    let mut r = rng(seed);
    let n = r.random_range(40..=120);
    let p = r.random_range(5..=9);
    let basis = if fourier {
        BasisSystem::fourier((0.0, 2.0), p).unwrap()
    } else {
        BasisSystem::bspline((0.0, 2.0), p, 3).unwrap()
    };
    let fd = random_fd(&mut r, n, basis);
    let u: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
    let a = fd.coefs().clone();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let eta = 0.2 + 0.8 * (a[(i, 0)] - 0.3) - 0.5 * a[(i, 1)] + 0.4 * u[i];
            if r.random::<f64>() < logistic(eta) { 1.0 } else { 0.0 }
        })
        .collect();
    let nonfd = ScalarCovariates::new().with("u", u).unwrap();
    LogitInstance { y, fd, nonfd }
}
