//! Binomial logit GLM fitted by iteratively reweighted least squares.
//!
//! Fisher scoring for the canonical logit link coincides with Newton's
//! method; each step is a weighted least-squares solve of the working
//! response z = η + (y − π)/w with weights w = π(1 − π).

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::numkernel::numerical_rank;

pub const INTERCEPT: &str = "(Intercept)";

pub const MAX_ITERATIONS: usize = 25;
pub const DEVIANCE_TOLERANCE: f64 = 1e-8;
const MAX_HALVINGS: usize = 10;
const WEIGHT_FLOOR: f64 = 1e-10;
const SEPARATION_EPS: f64 = 1e-10;
const LOGIT_CLAMP: f64 = 700.0;

/// Design matrix whose first column is the constant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    data: DMatrix<f64>,
}

impl DesignMatrix {
    /// Intercept-only design with `n` rows.
    pub fn intercept_only(n: usize) -> Self {
        DesignMatrix {
            names: vec![INTERCEPT.to_string()],
            data: DMatrix::from_element(n, 1, 1.0),
        }
    }

    /// Intercept followed by the given named columns.
    pub fn from_columns<S: Into<String>>(n: usize, columns: impl IntoIterator<Item = (S, Vec<f64>)>) -> Result<Self> {
        let mut d = Self::intercept_only(n);
        for (name, values) in columns {
            d.push_column(name, &values)?;
        }
        Ok(d)
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: &[f64]) -> Result<()> {
        let name = name.into();
        if values.len() != self.nrows() {
            return Err(Error::SchemaMismatch(format!(
                "column `{name}` has {} rows, design has {}",
                values.len(),
                self.nrows()
            )));
        }
        if self.names.contains(&name) {
            return Err(Error::invalid(format!("duplicate design column name `{name}`")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!("column `{name}` has non-finite values")));
        }
        let k = self.data.ncols();
        self.data = std::mem::replace(&mut self.data, DMatrix::zeros(0, 0)).insert_column(k, 0.0);
        self.data.column_mut(k).copy_from_slice(values);
        self.names.push(name);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.data.column(k).iter().cloned().collect())
    }

    /// Intercept plus the named columns, in the order given.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let mut d = Self::intercept_only(self.nrows());
        for &name in names {
            let col = self
                .column(name)
                .ok_or_else(|| Error::SchemaMismatch(format!("no design column `{name}`")))?;
            d.push_column(name, &col)?;
        }
        Ok(d)
    }
}

/// Logistic function with the logit clamped to ±700 and the result kept
/// inside [ε, 1 − ε] so log-likelihood terms stay finite.
pub fn logistic(eta: f64) -> f64 {
    let e = eta.clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
    let p = if e >= 0.0 {
        1.0 / (1.0 + (-e).exp())
    } else {
        let x = e.exp();
        x / (1.0 + x)
    };
    p.clamp(f64::EPSILON, 1.0 - f64::EPSILON)
}

/// −2 × Bernoulli log-likelihood.
pub fn binomial_deviance(y: &[f64], mu: &[f64]) -> f64 {
    -2.0 * y
        .iter()
        .zip(mu)
        .map(|(&yi, &m)| if yi > 0.5 { m.ln() } else { (1.0 - m).ln() })
        .sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct LogitFit {
    pub names: Vec<String>,
    /// Coefficients in design-column order, intercept first.
    pub coef: DVector<f64>,
    /// Inverse Fisher information at the optimum.
    pub cov: DMatrix<f64>,
    pub fitted: Vec<f64>,
    pub linear_predictor: Vec<f64>,
    pub null_deviance: f64,
    pub residual_deviance: f64,
    pub aic: f64,
    pub iterations: usize,
    pub converged: bool,
    pub separation_flag: bool,
    /// Deviance at the start value and after every iteration.
    pub deviance_trace: Vec<f64>,
    pub nobs: usize,
}

impl LogitFit {
    pub fn nparams(&self) -> usize {
        self.coef.len()
    }

    /// AIC with a general penalty per parameter.
    pub fn penalized_aic(&self, k: f64) -> f64 {
        self.residual_deviance + k * self.nparams() as f64
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|k| self.coef[k])
    }
}

fn check_response(y: &[f64]) -> Result<()> {
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::invalid("response values must be 0 or 1"));
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::DegenerateResponse(
            "response must contain both 0 and 1".into(),
        ));
    }
    Ok(())
}

/// Weighted least squares β = argmin ‖W^{1/2}(Xβ − z)‖ via SVD. Returns the
/// solution and (XᵀWX)^{-1}.
fn weighted_solve(x: &DMatrix<f64>, w: &[f64], z: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let mut xw = x.clone();
    let mut zw = DVector::zeros(z.len());
    for i in 0..x.nrows() {
        let s = w[i].sqrt();
        xw.row_mut(i).scale_mut(s);
        zw[i] = z[i] * s;
    }
    let svd = xw.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = x.nrows().max(x.ncols()) as f64 * f64::EPSILON * smax;
    let k = sv.len();
    let utz = u.transpose() * zw;
    let mut scaled = DVector::zeros(k);
    let mut inv_sq = DVector::zeros(k);
    for i in 0..k {
        if sv[i] > tol {
            scaled[i] = utz[i] / sv[i];
            inv_sq[i] = 1.0 / (sv[i] * sv[i]);
        } else {
            inv_sq[i] = f64::INFINITY;
        }
    }
    let v = vt.transpose();
    let beta = &v * scaled;
    let cov = &v * DMatrix::from_diagonal(&inv_sq) * vt;
    (beta, cov)
}

fn mu_of(x: &DMatrix<f64>, beta: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
    let eta = x * beta;
    let mu = eta.iter().map(|&e| logistic(e)).collect();
    (eta.iter().cloned().collect(), mu)
}

/// Fit a binomial logit model by IRLS.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN deviance must count as no descent
pub fn fit_logit(y: &[f64], design: &DesignMatrix) -> Result<LogitFit> {
    let n = design.nrows();
    let k = design.ncols();
    if y.len() != n {
        return Err(Error::SchemaMismatch(format!(
            "response has {} values, design has {n} rows",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {k} coefficients"
        )));
    }
    check_response(y)?;
    let x = design.matrix();
    let rank = numerical_rank(x);
    if rank < k {
        return Err(Error::RankDeficient { rank, required: k });
    }

    let ybar = y.iter().sum::<f64>() / n as f64;
    let null_deviance = -2.0 * n as f64 * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln());

    let start = ybar.clamp(1e-6, 1.0 - 1e-6);
    let mut beta = DVector::zeros(k);
    beta[0] = (start / (1.0 - start)).ln();
    let (_, mut mu) = mu_of(x, &beta);
    let mut dev = binomial_deviance(y, &mu);
    let mut trace = vec![dev];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=MAX_ITERATIONS {
        iterations = it;
        let (eta, _) = mu_of(x, &beta);
        let w: Vec<f64> = mu.iter().map(|&m| (m * (1.0 - m)).max(WEIGHT_FLOOR)).collect();
        let z: Vec<f64> = (0..n).map(|i| eta[i] + (y[i] - mu[i]) / w[i]).collect();
        let (mut candidate, _) = weighted_solve(x, &w, &z);
        let (_, mut mu_new) = mu_of(x, &candidate);
        let mut dev_new = binomial_deviance(y, &mu_new);

        // at the optimum a full step may change the deviance by rounding only
        if (dev_new - dev).abs() / (dev_new.abs() + 0.1) < DEVIANCE_TOLERANCE {
            if dev_new <= dev {
                beta = candidate;
                dev = dev_new;
                trace.push(dev);
            }
            converged = true;
            break;
        }

        let mut halvings = 0;
        while !(dev_new <= dev) && halvings < MAX_HALVINGS {
            candidate = (&beta + &candidate) * 0.5;
            let (_, m) = mu_of(x, &candidate);
            mu_new = m;
            dev_new = binomial_deviance(y, &mu_new);
            halvings += 1;
        }
        if !(dev_new <= dev) {
            // no descent direction found; keep the current estimate
            break;
        }
        let change = (dev_new - dev).abs() / (dev_new.abs() + 0.1);
        beta = candidate;
        mu = mu_new;
        dev = dev_new;
        trace.push(dev);
        if change < DEVIANCE_TOLERANCE {
            converged = true;
            break;
        }
    }

    let (eta, mu) = mu_of(x, &beta);
    let w: Vec<f64> = mu.iter().map(|&m| (m * (1.0 - m)).max(WEIGHT_FLOOR)).collect();
    let (_, cov) = weighted_solve(x, &w, &eta);
    let separation_flag = mu
        .iter()
        .any(|&m| m <= SEPARATION_EPS || m >= 1.0 - SEPARATION_EPS);

    Ok(LogitFit {
        names: design.names().to_vec(),
        coef: beta,
        cov,
        aic: dev + 2.0 * k as f64,
        fitted: mu,
        linear_predictor: eta,
        null_deviance,
        residual_deviance: dev,
        iterations,
        converged,
        separation_flag,
        deviance_trace: trace,
        nobs: n,
    })
}

/// Fitted probabilities for a design with the same columns as the fit.
pub fn predict_logit(fit: &LogitFit, design: &DesignMatrix) -> Result<Vec<f64>> {
    if design.names() != fit.names.as_slice() {
        return Err(Error::SchemaMismatch(format!(
            "design columns {:?} do not match fitted columns {:?}",
            design.names(),
            fit.names
        )));
    }
    let eta = design.matrix() * &fit.coef;
    Ok(eta.iter().map(|&e| logistic(e)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LogitSummary {
    pub coefficients: Vec<CoefficientRow>,
    pub null_deviance: f64,
    pub null_df: usize,
    pub residual_deviance: f64,
    pub residual_df: usize,
    pub aic: f64,
    pub iterations: usize,
    pub converged: bool,
    pub separation_flag: bool,
}

/// Wald table: estimates, standard errors √diag(cov), z values and two-sided
/// normal p-values.
pub fn logit_summary(fit: &LogitFit) -> LogitSummary {
    let coefficients = fit
        .names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let estimate = fit.coef[k];
            let std_error = fit.cov[(k, k)].max(0.0).sqrt();
            let z_value = estimate / std_error;
            CoefficientRow {
                name: name.clone(),
                estimate,
                std_error,
                z_value,
                p_value: erfc(z_value.abs() / std::f64::consts::SQRT_2),
            }
        })
        .collect();
    LogitSummary {
        coefficients,
        null_deviance: fit.null_deviance,
        null_df: fit.nobs - 1,
        residual_deviance: fit.residual_deviance,
        residual_df: fit.nobs - fit.nparams(),
        aic: fit.aic,
        iterations: fit.iterations,
        converged: fit.converged,
        separation_flag: fit.separation_flag,
    }
}

impl fmt::Display for LogitSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Coefficients:")?;
        writeln!(
            f,
            "{:<14} {:>12} {:>12} {:>8} {:>9}",
            "", "Estimate", "Std. Error", "z value", "Pr(>|z|)"
        )?;
        for r in &self.coefficients {
            writeln!(
                f,
                "{:<14} {:>12.5} {:>12.5} {:>8.3} {:>9.4}",
                r.name, r.estimate, r.std_error, r.z_value, r.p_value
            )?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "    Null deviance: {:>8.3}  on {} degrees of freedom",
            self.null_deviance, self.null_df
        )?;
        writeln!(
            f,
            "Residual deviance: {:>8.3}  on {} degrees of freedom",
            self.residual_deviance, self.residual_df
        )?;
        writeln!(f, "AIC: {:.3}", self.aic)?;
        writeln!(f)?;
        write!(f, "Number of Fisher Scoring iterations: {}", self.iterations)?;
        if self.separation_flag {
            write!(f, "\nWarning: fitted probabilities numerically 0 or 1 occurred")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_only_symmetric_response() {
        let y = [1.0, 1.0, 0.0, 0.0];
        let fit = fit_logit(&y, &DesignMatrix::intercept_only(4)).unwrap();
        assert!(fit.coef[0].abs() < 1e-12);
        assert!(fit.fitted.iter().all(|&p| (p - 0.5).abs() < 1e-12));
        assert!((fit.null_deviance - fit.residual_deviance).abs() < 1e-10);
        assert!(fit.converged && !fit.separation_flag);
        assert!((fit.aic - (fit.residual_deviance + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_response_rejected() {
        let d = DesignMatrix::intercept_only(3);
        assert!(matches!(fit_logit(&[1.0, 1.0, 1.0], &d), Err(Error::DegenerateResponse(_))));
        assert!(matches!(fit_logit(&[0.0, 2.0, 1.0], &d), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn collinear_design_rejected() {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let d = DesignMatrix::from_columns(6, [("a", x), ("b", x2)]).unwrap();
        let y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        assert!(matches!(fit_logit(&y, &d), Err(Error::RankDeficient { rank: 2, required: 3 })));
    }

    #[test]
    fn design_column_checks() {
        let mut d = DesignMatrix::intercept_only(3);
        d.push_column("a", &[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(d.push_column("a", &[1.0, 2.0, 3.0]), Err(Error::InvalidArgument(_))));
        assert!(matches!(d.push_column("b", &[1.0]), Err(Error::SchemaMismatch(_))));
        assert!(d.push_column(INTERCEPT, &[1.0, 1.0, 1.0]).is_err());
        assert_eq!(d.names(), &[INTERCEPT.to_string(), "a".to_string()]);
        assert_eq!(d.select(&["a"]).unwrap(), d);
        assert!(d.select(&["zz"]).is_err());
    }

    #[test]
    fn prediction_extremes_and_schema() {
        assert!(1.0 - logistic(40.0) < 1e-15);
        assert!(logistic(1e6).is_finite() && logistic(-1e6) > 0.0);
        let y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let x = vec![0.1, 0.4, -0.3, 0.9, 0.2, 0.5, 1.1, -0.8];
        let d = DesignMatrix::from_columns(8, [("x", x)]).unwrap();
        let fit = fit_logit(&y, &d).unwrap();
        let p = predict_logit(&fit, &d).unwrap();
        for (a, b) in p.iter().zip(&fit.fitted) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut zero = fit.clone();
        zero.coef.fill(0.0);
        assert!(predict_logit(&zero, &d).unwrap().iter().all(|&v| v == 0.5));
        let other = DesignMatrix::intercept_only(8);
        assert!(matches!(predict_logit(&fit, &other), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn separation_is_flagged_not_rejected() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| if v >= 5.0 { 1.0 } else { 0.0 }).collect();
        let d = DesignMatrix::from_columns(10, [("x", x)]).unwrap();
        let fit = fit_logit(&y, &d).unwrap();
        assert!(fit.separation_flag);
        assert!(fit.residual_deviance < 1e-4);
        assert!(fit.iterations <= MAX_ITERATIONS);
        let s = logit_summary(&fit);
        assert!(s.coefficients[1].std_error > 10.0);
    }

    #[test]
    fn summary_text_layout() {
        let y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let x = vec![0.1, 0.4, -0.3, 0.9, 0.2, 0.5, 1.1, -0.8];
        let d = DesignMatrix::from_columns(8, [("x", x)]).unwrap();
        let text = logit_summary(&fit_logit(&y, &d).unwrap()).to_string();
        assert!(text.contains("Estimate"));
        assert!(text.contains("(Intercept)"));
        assert!(text.contains("AIC:"));
        assert!(text.contains("Number of Fisher Scoring iterations"));
    }
}
