use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::fpca::FpcaVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitMode {
    #[serde(rename = "pc")]
    Pc,
    #[serde(rename = "fpc")]
    Fpc,
    #[serde(rename = "pc-step")]
    PcStep,
    #[serde(rename = "fpc-step")]
    FpcStep,
}

impl FitMode {
    pub fn variant(self) -> FpcaVariant {
        match self {
            FitMode::Pc | FitMode::PcStep => FpcaVariant::Ordinary,
            FitMode::Fpc | FitMode::FpcStep => FpcaVariant::Filtered,
        }
    }

    pub fn is_stepwise(self) -> bool {
        matches!(self, FitMode::PcStep | FitMode::FpcStep)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FitMode::Pc => "pc",
            FitMode::Fpc => "fpc",
            FitMode::PcStep => "pc-step",
            FitMode::FpcStep => "fpc-step",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorConfig {
    pub label: String,
    /// Curve CSV, relative to the config file.
    pub curves: PathBuf,
    pub basis: BasisSpec,
}

fn default_grid() -> usize {
    101
}

fn default_threshold() -> f64 {
    0.5
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Covariate CSV holding the response and the scalar predictors.
    pub covariates: PathBuf,
    pub response: String,
    pub predictors: Vec<PredictorConfig>,
    #[serde(default)]
    pub scalars: Vec<String>,
    pub mode: FitMode,
    #[serde(default)]
    pub ncomp: Option<Vec<usize>>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_grid")]
    pub beta_grid: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Directory relative paths are resolved against; set by `load`.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl FitConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: FitConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Check every invariant of the configuration, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.response.trim().is_empty() {
            return Err(field_err("response", "must name a covariate column"));
        }
        if !self.resolve(&self.covariates).is_file() {
            return Err(field_err(
                "covariates",
                format!("file {} does not exist", self.resolve(&self.covariates).display()),
            ));
        }
        if self.predictors.is_empty() && self.scalars.is_empty() {
            return Err(field_err("predictors", "at least one predictor is required"));
        }
        let mut labels = HashSet::new();
        for (i, p) in self.predictors.iter().enumerate() {
            let field = format!("predictors[{i}]");
            if p.label.is_empty()
                || !p
                    .label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(field_err(
                    &format!("{field}.label"),
                    "labels must be nonempty and use only letters, digits, '_' or '-'",
                ));
            }
            if !labels.insert(p.label.as_str()) {
                return Err(field_err(&format!("{field}.label"), format!("duplicate label `{}`", p.label)));
            }
            if !self.resolve(&p.curves).is_file() {
                return Err(field_err(
                    &format!("{field}.curves"),
                    format!("file {} does not exist", self.resolve(&p.curves).display()),
                ));
            }
            p.basis
                .build()
                .map_err(|e| field_err(&format!("{field}.basis"), e.to_string()))?;
        }
        let mut scalars = HashSet::new();
        for s in &self.scalars {
            if !scalars.insert(s.as_str()) {
                return Err(field_err("scalars", format!("duplicate covariate `{s}`")));
            }
            if *s == self.response {
                return Err(field_err("scalars", "the response cannot also be a covariate"));
            }
        }
        match (self.mode.is_stepwise(), &self.ncomp) {
            (false, None) => return Err(field_err("ncomp", format!("required in mode `{}`", self.mode.as_str()))),
            (true, Some(_)) => {
                return Err(field_err("ncomp", format!("not allowed in mode `{}`", self.mode.as_str())))
            }
            (false, Some(n)) if n.len() != self.predictors.len() => {
                return Err(field_err(
                    "ncomp",
                    format!("{} entries for {} functional predictors", n.len(), self.predictors.len()),
                ))
            }
            _ => {}
        }
        if self.beta_grid < 2 {
            return Err(field_err("beta_grid", "must be at least 2"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(field_err("threshold", "must lie strictly between 0 and 1"));
        }
        Ok(())
    }
}
