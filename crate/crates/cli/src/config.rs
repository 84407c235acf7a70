//! Run configuration: one TOML or JSON file, with command-line overrides.
//!
//! Relative paths in the file resolve against the file's directory. The config
//! hash recorded in output metadata covers the effective settings (after
//! overrides) but not the output directory.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use normvar_core::corpus::DateWindow;
use normvar_core::index::Window;
use normvar_core::{Granularity, Period};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Granularity of mention counts and indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub granularity: Option<Granularity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_start: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_end: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panel: Option<PanelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<VarConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub documents: String,
    pub phrase_sets: String,
    /// Phrase set used for per-outlet counts and indices (default: the first).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary: Option<String>,
    /// Granularity of the phrase-set × period table (default yearly).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_granularity: Option<Granularity>,
    /// Granularity of the period × phrase-set table (default quarterly).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_granularity: Option<Granularity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_min: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_max: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    #[serde(default)]
    pub rescale_sd: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelConfig {
    #[serde(default = "quarterly")]
    pub granularity: Granularity,
    pub variables: Vec<PanelVariable>,
}

fn quarterly() -> Granularity {
    Granularity::Quarterly
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelVariable {
    pub name: String,
    /// `index:pooled`, `index:<group>` or `file:<path>`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<Normalize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    Mean100,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarConfig {
    #[serde(default = "default_lags")]
    pub lags: usize,
    #[serde(default = "yes")]
    pub with_constant: bool,
    /// Pre-built panel CSV; otherwise the `[panel]` section is assembled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panel: Option<String>,
}

impl Default for VarConfig {
    fn default() -> Self {
        VarConfig { lags: default_lags(), with_constant: true, panel: None }
    }
}

fn default_lags() -> usize {
    4
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<String>,
    /// Fit JSON with one lag, converted to a unit-cost game.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<f64>>,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    40
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub window_start: Option<String>,
    pub window_end: Option<String>,
    pub granularity: Option<Granularity>,
    pub lags: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::read(p, e))?;
                let mut cfg: RunConfig = if p.extension().is_some_and(|e| e == "json") {
                    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
                } else {
                    toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
                };
                cfg.base_dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
                cfg
            }
            None => RunConfig::default(),
        };
        if overrides.window_start.is_some() {
            cfg.window_start = overrides.window_start.clone();
        }
        if overrides.window_end.is_some() {
            cfg.window_end = overrides.window_end.clone();
        }
        if overrides.granularity.is_some() {
            cfg.granularity = overrides.granularity;
        }
        if let Some(l) = overrides.lags {
            cfg.var.get_or_insert_with(VarConfig::default).lags = l;
        }
        cfg.validate_window()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let path = Path::new(p);
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity.unwrap_or(Granularity::Monthly)
    }

    fn validate_window(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.window_bound(&self.window_start)?, self.window_bound(&self.window_end)?) {
            if a.start() >= b.start() {
                return Err(CliError::input(format!("window start {a} is not before window end {b}")));
            }
        }
        Ok(())
    }

    fn window_bound(&self, s: &Option<String>) -> Result<Option<Period>> {
        s.as_deref()
            .map(|s| Period::parse(s).map_err(|e| CliError::input(format!("window: {e}"))))
            .transpose()
    }

    /// The configured window expressed at `g`, if both ends are set.
    ///
    /// A start or end given at another granularity maps to the `g` periods
    /// containing its first / last day.
    pub fn window_at(&self, g: Granularity) -> Result<Option<Window>> {
        let (a, b) = (self.window_bound(&self.window_start)?, self.window_bound(&self.window_end)?);
        Ok(match (a, b) {
            (Some(a), Some(b)) => {
                let last_day = b.succ().start().pred_opt().expect("valid date");
                Some(Window::new(Period::containing(a.start(), g), Period::containing(last_day, g)))
            }
            (None, None) => None,
            _ => return Err(CliError::input("window needs both a start and an end")),
        })
    }

    pub fn window_label(&self) -> String {
        match (&self.window_start, &self.window_end) {
            (Some(a), Some(b)) => format!("{a}..{b}"),
            _ => "full".to_string(),
        }
    }

    pub fn date_window(&self) -> Result<DateWindow> {
        let mut w = DateWindow::default();
        if let Some(c) = &self.corpus {
            let parse = |s: &str| {
                NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| CliError::input(format!("invalid date `{s}`")))
            };
            if let Some(s) = &c.date_min {
                w.start = parse(s)?;
            }
            if let Some(s) = &c.date_max {
                w.end = parse(s)?;
            }
        }
        Ok(w)
    }

    /// SHA-256 over the canonical JSON of the effective settings.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
