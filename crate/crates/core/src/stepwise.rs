//! Bidirectional stepwise selection by AIC.
//!
//! The search starts from the intercept-only model. Every round scores all
//! single additions and single removals, then applies the best move if it
//! lowers the AIC by more than [`IMPROVEMENT_EPS`]. Candidates are scored in
//! parallel; the winning move is reduced deterministically by
//! (AIC, candidate position) so results never depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logit::{fit_logit, DesignMatrix, LogitFit};

pub const IMPROVEMENT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAction {
    Add,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepMove {
    pub action: StepAction,
    pub column: String,
    pub aic: f64,
}

/// A candidate that could not be fitted in some round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCandidate {
    pub round: usize,
    pub column: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTrace {
    pub start_aic: f64,
    pub moves: Vec<StepMove>,
    pub skipped: Vec<SkippedCandidate>,
    /// Final columns in the order they entered the model.
    pub selected: Vec<String>,
}

struct Scored {
    order: usize,
    action: StepAction,
    column: String,
    outcome: Result<LogitFit>,
}

fn score(y: &[f64], candidates: &DesignMatrix, cols: &[String]) -> Result<LogitFit> {
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    fit_logit(y, &candidates.select(&names)?)
}

fn aic_of(fit: &LogitFit, k: f64) -> f64 {
    fit.penalized_aic(k)
}

/// Stepwise selection over the non-intercept columns of `candidates`, in
/// their listed order. `k` is the per-parameter penalty (2 for AIC).
#[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN AIC never counts as an improvement
pub fn stepwise_select(y: &[f64], candidates: &DesignMatrix, k: f64) -> Result<(LogitFit, StepTrace)> {
    let pool: Vec<String> = candidates.names()[1..].to_vec();
    if pool.is_empty() {
        return Err(Error::invalid("stepwise selection needs at least one candidate column"));
    }
    let mut current: Vec<String> = Vec::new();
    let mut fit = score(y, candidates, &current)?;
    let mut aic = aic_of(&fit, k);
    let mut trace = StepTrace {
        start_aic: aic,
        moves: Vec::new(),
        skipped: Vec::new(),
        selected: Vec::new(),
    };

    for round in 1.. {
        let mut proposals: Vec<(usize, StepAction, String, Vec<String>)> = Vec::new();
        for (order, name) in pool.iter().enumerate() {
            if let Some(pos) = current.iter().position(|c| c == name) {
                let mut cols = current.clone();
                cols.remove(pos);
                proposals.push((order, StepAction::Drop, name.clone(), cols));
            } else {
                let mut cols = current.clone();
                cols.push(name.clone());
                proposals.push((order, StepAction::Add, name.clone(), cols));
            }
        }
        let scored: Vec<Scored> = proposals
            .into_par_iter()
            .map(|(order, action, column, cols)| Scored {
                order,
                action,
                column,
                outcome: score(y, candidates, &cols),
            })
            .collect();

        let mut best: Option<(f64, usize, Scored)> = None;
        for s in scored {
            match &s.outcome {
                Err(Error::RankDeficient { .. }) => {
                    trace.skipped.push(SkippedCandidate {
                        round,
                        column: s.column.clone(),
                        reason: s.outcome.as_ref().unwrap_err().to_string(),
                    });
                }
                Err(_) => return Err(s.outcome.unwrap_err()),
                Ok(f) => {
                    let a = aic_of(f, k);
                    let better = match &best {
                        None => true,
                        Some((ba, bo, _)) => a < *ba || (a == *ba && s.order < *bo),
                    };
                    if better {
                        best = Some((a, s.order, s));
                    }
                }
            }
        }
        let Some((best_aic, _, chosen)) = best else { break };
        if !(best_aic < aic - IMPROVEMENT_EPS) {
            break;
        }
        match chosen.action {
            StepAction::Add => current.push(chosen.column.clone()),
            StepAction::Drop => current.retain(|c| *c != chosen.column),
        }
        fit = chosen.outcome.expect("scored ok");
        aic = best_aic;
        trace.moves.push(StepMove {
            action: chosen.action,
            column: chosen.column,
            aic,
        });
    }
    trace.selected = current;
    Ok((fit, trace))
}

/// True when no single addition or removal from `selected` lowers the AIC
/// of `fit` by more than [`IMPROVEMENT_EPS`].
pub fn is_locally_optimal(
    y: &[f64],
    candidates: &DesignMatrix,
    selected: &[String],
    fit: &LogitFit,
    k: f64,
) -> Result<bool> {
    let base = aic_of(fit, k);
    for name in &candidates.names()[1..] {
        let mut cols = selected.to_vec();
        if let Some(pos) = cols.iter().position(|c| c == name) {
            cols.remove(pos);
        } else {
            cols.push(name.clone());
        }
        match score(y, candidates, &cols) {
            Ok(f) if aic_of(&f, k) < base - IMPROVEMENT_EPS => return Ok(false),
            Ok(_) | Err(Error::RankDeficient { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}
