use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Common header of every report. Field order is fixed, so identical inputs
/// give byte-identical output.
#[derive(Debug, Serialize)]
pub struct Envelope<B: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub property: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    #[serde(flatten)]
    pub body: B,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl<B: Serialize> Envelope<B> {
    pub fn new(command: &'static str, property: &'static str, seed: Option<u64>, tolerances: Tolerances, body: B) -> Self {
        Self {
            tool: "orliczkit",
            version: orliczkit::VERSION,
            command,
            property,
            seed,
            tolerances,
            body,
        }
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Compute(format!("serializing report: {e}")))?;
        text.push('\n');
        match out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Input(format!("--out: cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// `|a - b| / |b|`, or `|a - b|` when `b = 0`; `+∞` if either side is.
pub fn rel_residual(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if !a.is_finite() || !b.is_finite() {
        f64::INFINITY
    } else if b == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / b.abs()
    }
}
