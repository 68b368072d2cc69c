//! ROC curve, AUC and classification table.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// Descending, starting at +∞ and ending at −∞.
    pub thresholds: Vec<f64>,
    pub tpr: Vec<f64>,
    pub fpr: Vec<f64>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal area under the (fpr, tpr) polyline.
    pub fn trapezoid_auc(&self) -> f64 {
        self.fpr
            .windows(2)
            .zip(self.tpr.windows(2))
            .map(|(f, t)| (f[1] - f[0]) * (t[0] + t[1]) * 0.5)
            .sum()
    }
}

fn split_classes(y: &[f64], scores: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() != scores.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} responses but {} scores",
            y.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&yi, &s) in y.iter().zip(scores) {
        match yi {
            1.0 => pos.push(s),
            0.0 => neg.push(s),
            v => return Err(Error::invalid(format!("response value {v} is not 0 or 1"))),
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateResponse("ROC needs both classes".into()));
    }
    Ok((pos, neg))
}

/// Mann–Whitney form of the AUC: P(s_pos > s_neg) + ½ P(tie), counted
/// exactly over all positive–negative pairs.
pub fn pairwise_auc(y: &[f64], scores: &[f64]) -> Result<f64> {
    let (pos, mut neg) = split_classes(y, scores)?;
    neg.sort_by(f64::total_cmp);
    // doubled counts keep the half-ties integral
    let mut doubled: u128 = 0;
    for s in &pos {
        let below = neg.partition_point(|v| v < s);
        let not_above = neg.partition_point(|v| v <= s);
        doubled += 2 * below as u128 + (not_above - below) as u128;
    }
    Ok(doubled as f64 / (2.0 * pos.len() as f64 * neg.len() as f64))
}

/// ROC curve with one threshold per distinct score; a case is called
/// positive when its score is ≥ the threshold.
pub fn roc_curve(y: &[f64], scores: &[f64]) -> Result<RocCurve> {
    let (pos, neg) = split_classes(y, scores)?;
    let auc = pairwise_auc(y, scores)?;
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();

    let npos = pos.len() as f64;
    let nneg = neg.len() as f64;
    let mut thresholds = vec![f64::INFINITY];
    let mut tpr = vec![0.0];
    let mut fpr = vec![0.0];
    for &th in &distinct {
        let tp = pos.iter().filter(|&&s| s >= th).count() as f64;
        let fp = neg.iter().filter(|&&s| s >= th).count() as f64;
        thresholds.push(th);
        tpr.push(tp / npos);
        fpr.push(fp / nneg);
    }
    thresholds.push(f64::NEG_INFINITY);
    tpr.push(1.0);
    fpr.push(1.0);
    Ok(RocCurve {
        thresholds,
        tpr,
        fpr,
        auc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfusionTable {
    pub true_negative: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_positive: usize,
}

impl ConfusionTable {
    pub fn total(&self) -> usize {
        self.true_negative + self.false_positive + self.false_negative + self.true_positive
    }
}

/// Classification table at `threshold` (predicted 1 iff p ≥ threshold) and
/// the correct classification rate in percent.
pub fn confusion_ccr(y: &[f64], p: &[f64], threshold: f64) -> Result<(ConfusionTable, f64)> {
    if y.is_empty() {
        return Err(Error::invalid("classification table of an empty sample"));
    }
    if y.len() != p.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} responses but {} probabilities",
            y.len(),
            p.len()
        )));
    }
    let mut t = ConfusionTable {
        true_negative: 0,
        false_positive: 0,
        false_negative: 0,
        true_positive: 0,
    };
    for (&yi, &pi) in y.iter().zip(p) {
        let predicted = pi >= threshold;
        match (yi == 1.0, predicted) {
            (true, true) => t.true_positive += 1,
            (true, false) => t.false_negative += 1,
            (false, true) => t.false_positive += 1,
            (false, false) => t.true_negative += 1,
        }
    }
    let ccr = 100.0 * (t.true_positive + t.true_negative) as f64 / y.len() as f64;
    Ok((t, ccr))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_examples() {
        let y = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(roc_curve(&y, &[0.9, 0.1, 0.8, 0.2]).unwrap().auc, 1.0);
        assert_eq!(roc_curve(&y, &[0.5; 4]).unwrap().auc, 0.5);
        assert_eq!(roc_curve(&y, &[0.9, 0.8, 0.7, 0.1]).unwrap().auc, 0.75);
    }

    #[test]
    fn roc_endpoints_and_sentinels() {
        let y = [1.0, 0.0, 1.0, 0.0, 1.0];
        let r = roc_curve(&y, &[0.9, 0.8, 0.7, 0.1, 0.7]).unwrap();
        assert_eq!(r.thresholds.first(), Some(&f64::INFINITY));
        assert_eq!(r.thresholds.last(), Some(&f64::NEG_INFINITY));
        assert_eq!((r.fpr[0], r.tpr[0]), (0.0, 0.0));
        assert_eq!((*r.fpr.last().unwrap(), *r.tpr.last().unwrap()), (1.0, 1.0));
        assert!(r.tpr.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.fpr.windows(2).all(|w| w[0] <= w[1]));
        assert!((r.trapezoid_auc() - r.auc).abs() < 1e-12);
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(roc_curve(&[1.0, 1.0], &[0.2, 0.3]), Err(Error::DegenerateResponse(_))));
    }

    #[test]
    fn ccr_examples() {
        let y = [1.0, 0.0, 1.0, 1.0, 0.0];
        let (_, ccr) = confusion_ccr(&y, &y, 0.5).unwrap();
        assert_eq!(ccr, 100.0);
        let flipped: Vec<f64> = y.iter().map(|v| 1.0 - v).collect();
        let (t, ccr) = confusion_ccr(&y, &flipped, 0.5).unwrap();
        assert_eq!(ccr, 0.0);
        assert_eq!(t.false_negative, 3);
        assert_eq!(t.false_positive, 2);
        assert_eq!(t.total(), 5);
    }

    #[test]
    fn half_rounds_up() {
        let (t, _) = confusion_ccr(&[1.0, 0.0], &[0.5, 0.5], 0.5).unwrap();
        assert_eq!(t.true_positive, 1);
        assert_eq!(t.false_positive, 1);
    }
}
