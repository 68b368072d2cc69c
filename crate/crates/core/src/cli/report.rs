use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::fpclogit::{predictor_letter, FpcLogitFit};
use crate::logit::logit_summary;
use crate::metrics::ConfusionTable;
use crate::stepwise::{StepAction, StepTrace};

/// A float serialized with 17 significant digits (`null` when not finite),
/// so reports are byte-stable and lossless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CoefficientEntry {
    pub name: String,
    pub estimate: Num,
    pub std_error: Num,
    pub z_value: Num,
    pub p_value: Num,
}

#[derive(Debug, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: Num,
}

#[derive(Debug, Serialize)]
pub struct PredictorEntry {
    pub label: String,
    pub prefix: String,
    pub selected: Vec<usize>,
    pub beta_coefs: Vec<Num>,
    pub variance: Vec<VarianceEntry>,
}

#[derive(Debug, Serialize)]
pub struct VarianceEntry {
    pub component: String,
    pub percent: Num,
    pub cumulative: Num,
}

#[derive(Debug, Serialize)]
pub struct MoveEntry {
    pub action: StepAction,
    pub column: String,
    pub aic: Num,
}

#[derive(Debug, Serialize)]
pub struct TraceEntry {
    pub start_aic: Num,
    pub moves: Vec<MoveEntry>,
    pub skipped: Vec<String>,
    pub selected: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub mode: String,
    pub variant: String,
    pub nobs: usize,
    pub coefficients: Vec<CoefficientEntry>,
    pub intercept: Num,
    pub scalar_coefs: Vec<NamedValue>,
    pub predictors: Vec<PredictorEntry>,
    pub null_deviance: Num,
    pub residual_deviance: Num,
    pub aic: Num,
    pub iterations: usize,
    pub converged: bool,
    pub separation: bool,
    pub auc: Num,
    pub ccr: Num,
    pub threshold: Num,
    pub confusion: ConfusionTable,
    pub trace: Option<TraceEntry>,
}

fn trace_entry(t: &StepTrace) -> TraceEntry {
    TraceEntry {
        start_aic: Num(t.start_aic),
        moves: t
            .moves
            .iter()
            .map(|m| MoveEntry {
                action: m.action,
                column: m.column.clone(),
                aic: Num(m.aic),
            })
            .collect(),
        skipped: t
            .skipped
            .iter()
            .map(|s| format!("round {}: {} ({})", s.round, s.column, s.reason))
            .collect(),
        selected: t.selected.clone(),
    }
}

impl FitReport {
    pub fn new(mode: &str, labels: &[String], fit: &FpcLogitFit, threshold: f64) -> Self {
        let summary = logit_summary(&fit.glm);
        let coefficients = summary
            .coefficients
            .iter()
            .map(|r| CoefficientEntry {
                name: r.name.clone(),
                estimate: Num(r.estimate),
                std_error: Num(r.std_error),
                z_value: Num(r.z_value),
                p_value: Num(r.p_value),
            })
            .collect();
        let predictors = labels
            .iter()
            .enumerate()
            .map(|(r, label)| PredictorEntry {
                label: label.clone(),
                prefix: predictor_letter(r),
                selected: fit.selected[r].clone(),
                beta_coefs: fit.betalist[r].coefs().iter().map(|&v| Num(v)).collect(),
                variance: fit.pc_variance[r]
                    .rows
                    .iter()
                    .map(|row| VarianceEntry {
                        component: row.label.clone(),
                        percent: Num(row.percent),
                        cumulative: Num(row.cumulative),
                    })
                    .collect(),
            })
            .collect();
        FitReport {
            mode: mode.to_string(),
            variant: format!("{:?}", fit.variant).to_lowercase(),
            nobs: fit.glm.nobs,
            coefficients,
            intercept: Num(fit.intercept),
            scalar_coefs: fit
                .scalar_coefs
                .iter()
                .map(|(n, v)| NamedValue {
                    name: n.clone(),
                    value: Num(*v),
                })
                .collect(),
            predictors,
            null_deviance: Num(fit.glm.null_deviance),
            residual_deviance: Num(fit.glm.residual_deviance),
            aic: Num(fit.glm.aic),
            iterations: fit.glm.iterations,
            converged: fit.glm.converged,
            separation: fit.glm.separation_flag,
            auc: Num(fit.roc.auc),
            ccr: Num(fit.ccr),
            threshold: Num(threshold),
            confusion: fit.confusion,
            trace: fit.trace.as_ref().map(trace_entry),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
