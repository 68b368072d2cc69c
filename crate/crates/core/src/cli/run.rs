use std::fmt;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::cli::config::FitConfig;
use crate::cli::io::{ingest_covariates, ingest_curves, monthly_means, write_curve_table, CurveTable};
use crate::cli::report::FitReport;
use crate::error::{Error, Result};
use crate::fdata::FunctionalDataSet;
use crate::fpclogit::{fit_fpc_logit, predictor_letter, FitOptions, FpcLogitFit, ScalarCovariates, Selection};
use crate::logit::logit_summary;

/// A failure tagged with the pipeline stage it happened in.
#[derive(Debug)]
pub struct StageError {
    pub stage: String,
    pub error: Error,
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

trait Stage<T> {
    fn stage(self, name: impl Into<String>) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, name: impl Into<String>) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError {
            stage: name.into(),
            error,
        })
    }
}

#[derive(Debug)]
pub struct FitOutcome {
    pub fit: FpcLogitFit,
    pub report_path: PathBuf,
    pub summary: String,
}

/// Load and validate a configuration file.
pub fn validate_config(path: impl AsRef<Path>) -> std::result::Result<FitConfig, StageError> {
    let cfg = FitConfig::load(path).stage("config")?;
    cfg.validate().stage("config")?;
    Ok(cfg)
}

struct Inputs {
    y: Vec<f64>,
    fdlist: Vec<FunctionalDataSet>,
    nonfd: ScalarCovariates,
}

fn load_inputs(cfg: &FitConfig) -> std::result::Result<Inputs, StageError> {
    let cov = ingest_covariates(cfg.resolve(&cfg.covariates)).stage("covariates")?;
    let y = cov
        .column(&cfg.response)
        .ok_or_else(|| Error::Config {
            field: "response".into(),
            message: format!("column `{}` not found in the covariate file", cfg.response),
        })
        .stage("covariates")?
        .to_vec();
    let mut nonfd = ScalarCovariates::new();
    for name in &cfg.scalars {
        let col = cov
            .column(name)
            .ok_or_else(|| Error::Config {
                field: "scalars".into(),
                message: format!("column `{name}` not found in the covariate file"),
            })
            .stage("covariates")?;
        nonfd.push(name.clone(), col.to_vec()).stage("covariates")?;
    }

    let mut fdlist = Vec::with_capacity(cfg.predictors.len());
    for p in &cfg.predictors {
        let stage = format!("predictor `{}`", p.label);
        let table = ingest_curves(cfg.resolve(&p.curves)).stage(&stage)?;
        if table.labels != cov.labels {
            return Err(Error::SchemaMismatch(format!(
                "curve rows ({} rows) do not match covariate rows ({} rows) label for label",
                table.labels.len(),
                cov.labels.len()
            )))
            .stage(&stage);
        }
        let basis = p.basis.build().stage(&stage)?;
        let fd = FunctionalDataSet::smooth(&table.argvals, &table.values, &basis)
            .and_then(|fd| fd.with_labels(table.labels.clone()))
            .stage(&stage)?;
        fdlist.push(fd);
    }
    Ok(Inputs { y, fdlist, nonfd })
}

fn fmt_num(v: f64) -> String {
    v.to_string()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

fn beta_csv(fd: &FunctionalDataSet, grid: usize) -> Result<String> {
    let (lo, hi) = fd.basis().rangeval();
    let t: Vec<f64> = (0..grid)
        .map(|i| if i + 1 == grid { hi } else { lo + (hi - lo) * i as f64 / (grid - 1) as f64 })
        .collect();
    let values = fd.eval(&t)?;
    let mut out = String::from("t,beta\n");
    for (k, tk) in t.iter().enumerate() {
        out.push_str(&format!("{},{}\n", fmt_num(*tk), fmt_num(values[(0, k)])));
    }
    Ok(out)
}

fn roc_csv(fit: &FpcLogitFit) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for ((f, t), th) in fit.roc.fpr.iter().zip(&fit.roc.tpr).zip(&fit.roc.thresholds) {
        out.push_str(&format!("{},{},{}\n", fmt_num(*f), fmt_num(*t), fmt_num(*th)));
    }
    out
}

fn summary_text(cfg: &FitConfig, fit: &FpcLogitFit) -> String {
    let mut s = String::new();
    s.push_str(&format!("Mode: {} ({:?} FPCA)\n\n", cfg.mode.as_str(), fit.variant));
    s.push_str(&logit_summary(&fit.glm).to_string());
    s.push_str("\n\n");
    s.push_str(&format!("Intercept (alpha): {:.5}\n", fit.intercept));
    for (r, p) in cfg.predictors.iter().enumerate() {
        s.push_str(&format!(
            "\nPC variance [{}] {}:\n{}",
            predictor_letter(r),
            p.label,
            fit.pc_variance[r]
        ));
    }
    s.push_str(&format!(
        "\nAUC: {:.4}\nCCR: {:.1}% (threshold {})\n",
        fit.roc.auc, fit.ccr, cfg.threshold
    ));
    if let Some(t) = &fit.trace {
        let terms: Vec<&str> = t.selected.iter().map(String::as_str).collect();
        s.push_str(&format!(
            "Stepwise model: Response ~ {}\n",
            if terms.is_empty() { "1".to_string() } else { terms.join(" + ") }
        ));
    }
    s
}

/// Run a fit described by a configuration file and write its report files.
pub fn run_fit(config_path: impl AsRef<Path>) -> std::result::Result<FitOutcome, StageError> {
    let cfg = validate_config(config_path)?;
    let inputs = load_inputs(&cfg)?;
    let selection = match &cfg.ncomp {
        Some(n) if !cfg.mode.is_stepwise() => Selection::Leading(n.clone()),
        _ => Selection::Stepwise,
    };
    let options = FitOptions {
        threshold: cfg.threshold,
        ..FitOptions::default()
    };
    let fit = fit_fpc_logit(
        &inputs.y,
        &inputs.fdlist,
        &inputs.nonfd,
        cfg.mode.variant(),
        &selection,
        &options,
    )
    .stage("fit")?;

    let out_dir = cfg.resolve(&cfg.output_dir);
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e)).stage("output")?;
    let labels: Vec<String> = cfg.predictors.iter().map(|p| p.label.clone()).collect();
    let report = FitReport::new(cfg.mode.as_str(), &labels, &fit, cfg.threshold);
    let report_path = out_dir.join("report.json");
    write_text(&report_path, &report.to_json()).stage("output")?;
    for (label, beta) in labels.iter().zip(&fit.betalist) {
        let csv = beta_csv(beta, cfg.beta_grid).stage("output")?;
        write_text(&out_dir.join(format!("beta_{label}.csv")), &csv).stage("output")?;
    }
    write_text(&out_dir.join("roc.csv"), &roc_csv(&fit)).stage("output")?;

    let summary = summary_text(&cfg, &fit);
    Ok(FitOutcome {
        fit,
        report_path,
        summary,
    })
}

/// Aggregate a daily curve file (365 sampling times) into monthly means.
pub fn run_monthly(input: impl AsRef<Path>, output: impl AsRef<Path>) -> std::result::Result<(), StageError> {
    let daily = ingest_curves(input).stage("read daily curves")?;
    let values = monthly_means(&daily.values).stage("aggregate")?;
    let table = CurveTable {
        argvals: (1..=12).map(|m| m as f64).collect(),
        values,
        labels: daily.labels,
    };
    write_curve_table(output, &table).stage("write monthly curves")
}
