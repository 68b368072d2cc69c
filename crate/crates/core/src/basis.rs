//! Fourier and B-spline basis systems.
//!
//! A [`BasisSystem`] is immutable after construction. It can be evaluated at
//! arbitrary points inside its range (producing the m×p matrix Φ) and it
//! knows its Gram matrix Ψ of pairwise L² inner products.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::gauss_legendre;

/// Slack allowed when checking that evaluation points lie inside the range.
const DOMAIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BasisKind {
    Fourier {
        period: f64,
    },
    BSpline {
        degree: usize,
        /// Full clamped knot vector: `degree + 1` copies of each end point
        /// around the interior breakpoints.
        knots: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSystem {
    kind: BasisKind,
    range: (f64, f64),
    nbasis: usize,
}

/// Inner products ψ_jk = ∫ φ_j φ_k dt over the basis range.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub psi: DMatrix<f64>,
}

fn check_range(rangeval: (f64, f64)) -> Result<()> {
    let (lo, hi) = rangeval;
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "basis range [{lo}, {hi}] must be finite with t_min < t_max"
        )))
    }
}

impl BasisSystem {
    /// Fourier system with period equal to the range length. An even `nbasis`
    /// is promoted to the next odd value so sines and cosines pair up.
    pub fn fourier(rangeval: (f64, f64), nbasis: usize) -> Result<Self> {
        check_range(rangeval)?;
        Self::fourier_with_period(rangeval, nbasis, rangeval.1 - rangeval.0)
    }

    pub fn fourier_with_period(rangeval: (f64, f64), nbasis: usize, period: f64) -> Result<Self> {
        check_range(rangeval)?;
        if nbasis == 0 {
            return Err(Error::invalid("nbasis must be at least 1"));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid(format!("Fourier period {period} must be positive")));
        }
        let nbasis = if nbasis.is_multiple_of(2) { nbasis + 1 } else { nbasis };
        Ok(BasisSystem {
            kind: BasisKind::Fourier { period },
            range: rangeval,
            nbasis,
        })
    }

    /// B-spline system on equally spaced breakpoints with a clamped knot vector.
    pub fn bspline(rangeval: (f64, f64), nbasis: usize, degree: usize) -> Result<Self> {
        check_range(rangeval)?;
        if nbasis < degree + 1 {
            return Err(Error::invalid(format!(
                "B-spline of degree {degree} needs nbasis >= {}, got {nbasis}",
                degree + 1
            )));
        }
        let interior = nbasis - degree - 1;
        let (lo, hi) = rangeval;
        let step = (hi - lo) / (interior + 1) as f64;
        let breaks: Vec<f64> = (1..=interior).map(|i| lo + step * i as f64).collect();
        Self::bspline_with_breaks(rangeval, &breaks, degree)
    }

    /// B-spline system on user supplied interior breakpoints.
    pub fn bspline_with_breaks(rangeval: (f64, f64), interior: &[f64], degree: usize) -> Result<Self> {
        check_range(rangeval)?;
        let (lo, hi) = rangeval;
        if interior.iter().any(|&b| !(b > lo && b < hi)) {
            return Err(Error::invalid("interior breakpoints must lie strictly inside the range"));
        }
        if interior.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("breakpoints must be nondecreasing"));
        }
        // a break repeated more than `degree` times would make a basis function vanish
        let max_mult = interior
            .chunk_by(|a, b| a == b)
            .map(|c| c.len())
            .max()
            .unwrap_or(0);
        if max_mult > degree.max(1) {
            return Err(Error::invalid("breakpoint multiplicity exceeds the spline degree"));
        }
        let mut knots = vec![lo; degree + 1];
        knots.extend_from_slice(interior);
        knots.extend(std::iter::repeat_n(hi, degree + 1));
        let nbasis = interior.len() + degree + 1;
        Ok(BasisSystem {
            kind: BasisKind::BSpline { degree, knots },
            range: rangeval,
            nbasis,
        })
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn rangeval(&self) -> (f64, f64) {
        self.range
    }

    pub fn nbasis(&self) -> usize {
        self.nbasis
    }

    /// Interior breakpoints of a B-spline system; empty for Fourier.
    pub fn interior_breaks(&self) -> &[f64] {
        match &self.kind {
            BasisKind::BSpline { degree, knots } => &knots[degree + 1..knots.len() - degree - 1],
            BasisKind::Fourier { .. } => &[],
        }
    }

    /// Φ[i, j] = φ_j(t_i).
    pub fn eval(&self, t: &[f64]) -> Result<DMatrix<f64>> {
        let (lo, hi) = self.range;
        let mut phi = DMatrix::zeros(t.len(), self.nbasis);
        for (i, &ti) in t.iter().enumerate() {
            if !(ti >= lo - DOMAIN_TOLERANCE && ti <= hi + DOMAIN_TOLERANCE) {
                return Err(Error::OutOfDomain { t: ti, lo, hi });
            }
            let ti = ti.clamp(lo, hi);
            match &self.kind {
                BasisKind::Fourier { period } => {
                    let c0 = 1.0 / period.sqrt();
                    let ck = (2.0 / period).sqrt();
                    phi[(i, 0)] = c0;
                    let omega = 2.0 * PI / period;
                    for k in 1..=(self.nbasis - 1) / 2 {
                        let arg = omega * k as f64 * (ti - lo);
                        phi[(i, 2 * k - 1)] = ck * arg.sin();
                        phi[(i, 2 * k)] = ck * arg.cos();
                    }
                }
                BasisKind::BSpline { degree, knots } => {
                    let span = find_span(knots, *degree, self.nbasis, ti);
                    let values = nonzero_bsplines(knots, *degree, span, ti);
                    for (r, v) in values.into_iter().enumerate() {
                        phi[(i, span - degree + r)] = v;
                    }
                }
            }
        }
        Ok(phi)
    }

    /// Gram matrix Ψ.
    ///
    /// Fourier systems over a full period are orthonormal, so Ψ = I exactly.
    /// B-splines are integrated interval by interval with a Gauss–Legendre
    /// rule of `degree + 1` nodes, exact for the degree-2d products.
    pub fn gram(&self) -> GramMatrix {
        let p = self.nbasis;
        let (lo, hi) = self.range;
        let psi = match &self.kind {
            BasisKind::Fourier { period } if (period - (hi - lo)).abs() <= 1e-12 * (hi - lo) => {
                DMatrix::identity(p, p)
            }
            BasisKind::Fourier { .. } => {
                let rule = gauss_legendre(10 * p, lo, hi).expect("valid range");
                self.gram_from_nodes(&rule.nodes, &rule.weights)
            }
            BasisKind::BSpline { degree, knots } => {
                let mut psi = DMatrix::zeros(p, p);
                for w in knots.windows(2) {
                    if w[1] <= w[0] {
                        continue;
                    }
                    let rule = gauss_legendre(degree + 1, w[0], w[1]).expect("nonempty interval");
                    psi += self.gram_from_nodes(&rule.nodes, &rule.weights);
                }
                psi
            }
        };
        GramMatrix { psi }
    }

    fn gram_from_nodes(&self, nodes: &[f64], weights: &[f64]) -> DMatrix<f64> {
        let phi = self.eval(nodes).expect("quadrature nodes lie in range");
        let mut weighted = phi.clone();
        for (i, &w) in weights.iter().enumerate() {
            weighted.row_mut(i).scale_mut(w);
        }
        let g = phi.transpose() * weighted;
        (&g + g.transpose()) * 0.5
    }

    pub fn to_spec(&self) -> BasisSpec {
        let (lo, hi) = self.range;
        match &self.kind {
            BasisKind::Fourier { period } => BasisSpec {
                kind: BasisKindTag::Fourier,
                rangeval: [lo, hi],
                nbasis: self.nbasis,
                degree: None,
                period: if (period - (hi - lo)).abs() <= 1e-12 * (hi - lo) {
                    None
                } else {
                    Some(*period)
                },
                breaks: None,
            },
            BasisKind::BSpline { degree, .. } => BasisSpec {
                kind: BasisKindTag::Bspline,
                rangeval: [lo, hi],
                nbasis: self.nbasis,
                degree: Some(*degree),
                period: None,
                breaks: None,
            },
        }
    }
}

/// Index `k` of the knot span with knots[k] <= t < knots[k+1]; the right end
/// point maps to the last nonempty span so it is evaluated as a left limit.
fn find_span(knots: &[f64], degree: usize, nbasis: usize, t: f64) -> usize {
    if t >= knots[nbasis] {
        return nbasis - 1;
    }
    // knots[degree..=nbasis] is nondecreasing; first index with knots[k+1] > t
    let mut lo = degree;
    let mut hi = nbasis;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Cox–de Boor recurrence for the `degree + 1` basis functions that are
/// nonzero on span `span`, i.e. N_{span-degree}, ..., N_{span}.
fn nonzero_bsplines(knots: &[f64], degree: usize, span: usize, t: f64) -> Vec<f64> {
    let mut n = vec![0.0; degree + 1];
    let mut left = vec![0.0; degree + 1];
    let mut right = vec![0.0; degree + 1];
    n[0] = 1.0;
    for j in 1..=degree {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom == 0.0 { 0.0 } else { n[r] / denom };
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKindTag {
    Fourier,
    Bspline,
}

/// JSON description of a basis as used by fit configurations:
/// `{"kind": "bspline", "rangeval": [1, 12], "nbasis": 8, "degree": 3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub kind: BasisKindTag,
    pub rangeval: [f64; 2],
    pub nbasis: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Interior breakpoints for B-splines; equally spaced when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breaks: Option<Vec<f64>>,
}

impl BasisSpec {
    pub fn build(&self) -> Result<BasisSystem> {
        let range = (self.rangeval[0], self.rangeval[1]);
        match self.kind {
            BasisKindTag::Fourier => {
                if self.degree.is_some() || self.breaks.is_some() {
                    return Err(Error::invalid("Fourier basis takes no degree or breaks"));
                }
                match self.period {
                    Some(period) => BasisSystem::fourier_with_period(range, self.nbasis, period),
                    None => BasisSystem::fourier(range, self.nbasis),
                }
            }
            BasisKindTag::Bspline => {
                if self.period.is_some() {
                    return Err(Error::invalid("B-spline basis takes no period"));
                }
                let degree = self.degree.unwrap_or(3);
                match &self.breaks {
                    Some(breaks) => {
                        let b = BasisSystem::bspline_with_breaks(range, breaks, degree)?;
                        if b.nbasis() != self.nbasis {
                            return Err(Error::invalid(format!(
                                "nbasis {} inconsistent with {} breaks of degree {degree}",
                                self.nbasis,
                                breaks.len()
                            )));
                        }
                        Ok(b)
                    }
                    None => BasisSystem::bspline(range, self.nbasis, degree),
                }
            }
        }
    }
}
