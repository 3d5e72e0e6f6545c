//! JSON configuration files. Every field is optional; command-line flags take
//! precedence over anything read here.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub a_high: Option<f64>,
    pub a_low: Option<f64>,
    pub p: Option<f64>,
    pub cost: Option<f64>,
    pub phi: Option<f64>,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub c_steps: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub p_steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Flag value if given, else the config value, else an error naming the flag.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file).ok_or_else(|| CliError::Usage(format!("missing --{name}")))
}
