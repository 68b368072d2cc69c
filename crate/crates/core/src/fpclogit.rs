//! Functional principal component logit regression.
//!
//! Each functional predictor X_r is reduced to principal component scores
//! (ordinary or filtered FPCA); the selected scores and any scalar covariates
//! enter a logit model. Component coefficients γ are mapped back to the
//! functional parameters β_r(t) on each predictor's basis and to the
//! intercept α = γ₀ − Σ_r ∫ x̄_r β_r.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, RowDVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fdata::FunctionalDataSet;
use crate::fpca::{fpca_filtered, fpca_ordinary, FpcaResult, FpcaVariant, VarianceTable};
use crate::logit::{fit_logit, DesignMatrix, LogitFit};
use crate::metrics::{confusion_ccr, roc_curve, ConfusionTable, RocCurve};
use crate::stepwise::{stepwise_select, StepTrace};

/// Named scalar (non-functional) covariates, one column per variable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarCovariates {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl ScalarCovariates {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(Error::invalid(format!("duplicate covariate `{name}`")));
        }
        if let Some(first) = self.columns.first() {
            if first.len() != values.len() {
                return Err(Error::SchemaMismatch(format!(
                    "covariate `{name}` has {} rows, expected {}",
                    values.len(),
                    first.len()
                )));
            }
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.push(name, values)?;
        Ok(self)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn nrows(&self) -> Option<usize> {
        self.columns.first().map(Vec::len)
    }
}

/// Column prefix of the r-th functional predictor: A, B, …, Z, AA, AB, ….
pub fn predictor_letter(r: usize) -> String {
    let mut r = r + 1;
    let mut out = Vec::new();
    while r > 0 {
        let rem = (r - 1) % 26;
        out.push(b'A' + rem as u8);
        r = (r - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

pub fn component_name(r: usize, j: usize) -> String {
    format!("{}.{}", predictor_letter(r), j)
}

/// Design (1 | selected scores of each predictor | scalar covariates).
/// `selected[r]` holds 1-based component indices of predictor r.
pub fn assemble_design(
    fpcas: &[FpcaResult],
    selected: &[Vec<usize>],
    nonfd: &ScalarCovariates,
) -> Result<DesignMatrix> {
    if fpcas.len() != selected.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} FPCA results but {} selections",
            fpcas.len(),
            selected.len()
        )));
    }
    let n = fpcas
        .first()
        .map(|f| f.scores.nrows())
        .or(nonfd.nrows())
        .ok_or_else(|| Error::invalid("design needs at least one predictor"))?;
    let mut design = DesignMatrix::intercept_only(n);
    for (r, (fpca, sel)) in fpcas.iter().zip(selected).enumerate() {
        if fpca.scores.nrows() != n {
            return Err(Error::SchemaMismatch(format!(
                "predictor {} has {} curves, expected {n}",
                predictor_letter(r),
                fpca.scores.nrows()
            )));
        }
        for &j in sel {
            if j == 0 || j > fpca.scores.ncols() {
                return Err(Error::invalid(format!(
                    "component {j} out of range for predictor {}",
                    predictor_letter(r)
                )));
            }
            let col: Vec<f64> = fpca.scores.column(j - 1).iter().cloned().collect();
            design.push_column(component_name(r, j), &col)?;
        }
    }
    for (name, col) in nonfd.names().iter().zip(nonfd.columns()) {
        if col.len() != n {
            return Err(Error::SchemaMismatch(format!(
                "covariate `{name}` has {} rows, expected {n}",
                col.len()
            )));
        }
        design.push_column(name.clone(), col)?;
    }
    Ok(design)
}

/// Basis coefficients of β(t) from the coefficients of selected components.
///
/// `gamma` pairs 1-based component indices with their logit coefficients;
/// unselected components contribute nothing. The map is the `score_map` of
/// the FPCA, so Σ_j ξ_ij γ_j = ∫ (x_i − x̄) β for every curve.
pub fn reconstruct_beta(fpca: &FpcaResult, gamma: &[(usize, f64)]) -> Result<DVector<f64>> {
    let p = fpca.nbasis();
    let mut beta = DVector::zeros(p);
    for &(j, g) in gamma {
        if j == 0 || j > fpca.ncomponents {
            return Err(Error::invalid(format!(
                "component index {j} outside 1..={}",
                fpca.ncomponents
            )));
        }
        beta.axpy(g, &fpca.score_map.column(j - 1), 1.0);
    }
    Ok(beta)
}

/// α = γ₀ − Σ_r ā_rᵀ Ψ_r β_r.
pub fn reconstruct_intercept(
    gamma0: f64,
    terms: &[(&RowDVector<f64>, &DMatrix<f64>, &DVector<f64>)],
) -> Result<f64> {
    let mut alpha = gamma0;
    for (mean, psi, beta) in terms {
        if mean.len() != beta.len() || psi.nrows() != beta.len() || psi.ncols() != beta.len() {
            return Err(Error::SchemaMismatch("inconsistent dimensions in intercept terms".into()));
        }
        alpha -= (*mean * (*psi * *beta))[0];
    }
    Ok(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Classification threshold for the CCR table.
    pub threshold: f64,
    /// Per-parameter penalty of the stepwise criterion.
    pub penalty: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            threshold: 0.5,
            penalty: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// First `ncomp[r]` components of predictor r, in variance order.
    Leading(Vec<usize>),
    /// AIC stepwise over all nonzero-variance components and covariates.
    Stepwise,
}

#[derive(Debug, Clone)]
pub struct FpcLogitFit {
    pub variant: FpcaVariant,
    pub glm: LogitFit,
    pub intercept: f64,
    /// One single-curve β̂_r(t) per functional predictor, on its basis.
    pub betalist: Vec<FunctionalDataSet>,
    pub pc_variance: Vec<VarianceTable>,
    pub roc: RocCurve,
    pub confusion: ConfusionTable,
    /// Correct classification rate in percent.
    pub ccr: f64,
    /// 1-based component indices of each predictor that entered the model.
    pub selected: Vec<Vec<usize>>,
    pub scalar_coefs: Vec<(String, f64)>,
    pub fpcas: Vec<FpcaResult>,
    pub trace: Option<StepTrace>,
}

impl FpcLogitFit {
    /// α + Σ_r ∫ x_ir β̂_r + Σ_s u_is δ̂_s for new (or the training) data.
    pub fn linear_predictor(&self, fdlist: &[FunctionalDataSet], nonfd: &ScalarCovariates) -> Result<Vec<f64>> {
        if fdlist.len() != self.betalist.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} functional predictors, model has {}",
                fdlist.len(),
                self.betalist.len()
            )));
        }
        let n = fdlist
            .first()
            .map(FunctionalDataSet::ncurves)
            .or(nonfd.nrows())
            .unwrap_or(0);
        let mut eta = DVector::from_element(n, self.intercept);
        for (r, (fd, beta)) in fdlist.iter().zip(&self.betalist).enumerate() {
            if fd.basis() != beta.basis() || fd.ncurves() != n {
                return Err(Error::SchemaMismatch(format!(
                    "predictor {} does not match the fitted basis or sample size",
                    predictor_letter(r)
                )));
            }
            let b = beta.coefs().row(0).transpose();
            eta += fd.coefs() * (&self.fpcas[r].gram.psi * b);
        }
        for (name, delta) in &self.scalar_coefs {
            let k = nonfd
                .names()
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::SchemaMismatch(format!("missing covariate `{name}`")))?;
            let col = &nonfd.columns()[k];
            if col.len() != n {
                return Err(Error::SchemaMismatch(format!("covariate `{name}` has wrong length")));
            }
            for (e, u) in eta.iter_mut().zip(col) {
                *e += delta * u;
            }
        }
        Ok(eta.iter().cloned().collect())
    }
}

fn check_inputs(y: &[f64], fdlist: &[FunctionalDataSet], nonfd: &ScalarCovariates) -> Result<()> {
    let n = y.len();
    for (r, fd) in fdlist.iter().enumerate() {
        if fd.ncurves() != n {
            return Err(Error::SchemaMismatch(format!(
                "predictor {} has {} curves but the response has {n} values",
                predictor_letter(r),
                fd.ncurves()
            )));
        }
    }
    if let Some(rows) = nonfd.nrows() {
        if rows != n {
            return Err(Error::SchemaMismatch(format!(
                "scalar covariates have {rows} rows but the response has {n} values"
            )));
        }
    }
    if fdlist.is_empty() && nonfd.is_empty() {
        return Err(Error::invalid("no predictors supplied"));
    }
    Ok(())
}

/// General entry point behind the four fitting functions.
pub fn fit_fpc_logit(
    y: &[f64],
    fdlist: &[FunctionalDataSet],
    nonfd: &ScalarCovariates,
    variant: FpcaVariant,
    selection: &Selection,
    options: &FitOptions,
) -> Result<FpcLogitFit> {
    check_inputs(y, fdlist, nonfd)?;
    let fpcas: Vec<FpcaResult> = fdlist
        .par_iter()
        .map(|fd| match variant {
            FpcaVariant::Ordinary => fpca_ordinary(fd),
            FpcaVariant::Filtered => fpca_filtered(fd),
        })
        .collect::<Result<_>>()?;

    let (glm, selected, trace) = match selection {
        Selection::Leading(ncomp) => {
            if ncomp.len() != fdlist.len() {
                return Err(Error::invalid(format!(
                    "ncomp has {} entries for {} functional predictors",
                    ncomp.len(),
                    fdlist.len()
                )));
            }
            let mut selected = Vec::with_capacity(ncomp.len());
            for (r, (&q, fpca)) in ncomp.iter().zip(&fpcas).enumerate() {
                if q > fpca.rank() {
                    return Err(Error::invalid(format!(
                        "ncomp {q} for predictor {} exceeds its {} nonzero-variance components",
                        predictor_letter(r),
                        fpca.rank()
                    )));
                }
                selected.push((1..=q).collect::<Vec<_>>());
            }
            let design = assemble_design(&fpcas, &selected, nonfd)?;
            (fit_logit(y, &design)?, selected, None)
        }
        Selection::Stepwise => {
            let all: Vec<Vec<usize>> = fpcas.iter().map(|f| (1..=f.rank()).collect()).collect();
            let candidates = assemble_design(&fpcas, &all, nonfd)?;
            let (glm, trace) = stepwise_select(y, &candidates, options.penalty)?;
            let lookup: HashMap<String, (usize, usize)> = all
                .iter()
                .enumerate()
                .flat_map(|(r, js)| js.iter().map(move |&j| (component_name(r, j), (r, j))))
                .collect();
            let mut selected = vec![Vec::new(); fpcas.len()];
            for name in &trace.selected {
                if let Some(&(r, j)) = lookup.get(name) {
                    selected[r].push(j);
                }
            }
            for s in &mut selected {
                s.sort_unstable();
            }
            (glm, selected, Some(trace))
        }
    };

    let mut betas = Vec::with_capacity(fpcas.len());
    for (r, (fpca, sel)) in fpcas.iter().zip(&selected).enumerate() {
        let gamma: Vec<(usize, f64)> = sel
            .iter()
            .map(|&j| {
                let g = glm.coefficient(&component_name(r, j)).expect("selected column in fit");
                (j, g)
            })
            .collect();
        betas.push(reconstruct_beta(fpca, &gamma)?);
    }
    let terms: Vec<_> = fpcas
        .iter()
        .zip(&betas)
        .map(|(f, b)| (&f.mean_coefs, &f.gram.psi, b))
        .collect();
    let intercept = reconstruct_intercept(glm.coef[0], &terms)?;

    let betalist = fdlist
        .iter()
        .zip(&betas)
        .map(|(fd, b)| {
            FunctionalDataSet::new(fd.basis().clone(), DMatrix::from_row_slice(1, b.len(), b.as_slice()))
        })
        .collect::<Result<Vec<_>>>()?;
    let pc_variance = fpcas
        .iter()
        .enumerate()
        .map(|(r, f)| f.variance_table(&predictor_letter(r)))
        .collect();
    let scalar_coefs = nonfd
        .names()
        .iter()
        .filter_map(|name| glm.coefficient(name).map(|d| (name.clone(), d)))
        .collect();
    let roc = roc_curve(y, &glm.fitted)?;
    let (confusion, ccr) = confusion_ccr(y, &glm.fitted, options.threshold)?;

    Ok(FpcLogitFit {
        variant,
        glm,
        intercept,
        betalist,
        pc_variance,
        roc,
        confusion,
        ccr,
        selected,
        scalar_coefs,
        fpcas,
        trace,
    })
}

/// Ordinary FPCA components entered in variance order.
pub fn logitfd_pc(
    y: &[f64],
    fdlist: &[FunctionalDataSet],
    ncomp: &[usize],
    nonfd: &ScalarCovariates,
) -> Result<FpcLogitFit> {
    fit_fpc_logit(
        y,
        fdlist,
        nonfd,
        FpcaVariant::Ordinary,
        &Selection::Leading(ncomp.to_vec()),
        &FitOptions::default(),
    )
}

/// Filtered FPCA components entered in variance order.
pub fn logitfd_fpc(
    y: &[f64],
    fdlist: &[FunctionalDataSet],
    ncomp: &[usize],
    nonfd: &ScalarCovariates,
) -> Result<FpcLogitFit> {
    fit_fpc_logit(
        y,
        fdlist,
        nonfd,
        FpcaVariant::Filtered,
        &Selection::Leading(ncomp.to_vec()),
        &FitOptions::default(),
    )
}

/// Ordinary FPCA components chosen by stepwise AIC.
pub fn logitfd_pc_step(y: &[f64], fdlist: &[FunctionalDataSet], nonfd: &ScalarCovariates) -> Result<FpcLogitFit> {
    fit_fpc_logit(y, fdlist, nonfd, FpcaVariant::Ordinary, &Selection::Stepwise, &FitOptions::default())
}

/// Filtered FPCA components chosen by stepwise AIC.
pub fn logitfd_fpc_step(y: &[f64], fdlist: &[FunctionalDataSet], nonfd: &ScalarCovariates) -> Result<FpcLogitFit> {
    fit_fpc_logit(y, fdlist, nonfd, FpcaVariant::Filtered, &Selection::Stepwise, &FitOptions::default())
}
