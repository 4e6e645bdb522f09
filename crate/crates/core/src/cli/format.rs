//! JSON scheme files and CSV helpers.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::models::{ModelDescriptor, ModelInstance};
use crate::obs::DiscreteObservable;
use crate::scheme::{ConservedPair, MeasurementScheme, PointerPvm};

/// On-disk scheme description: the scheme's own fields plus optional
/// conserved pair, sharp target and originating model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeFile {
    #[serde(flatten)]
    pub scheme: MeasurementScheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conserved: Option<ConservedPair>,
    /// Sharp target, stored like the pointer as basis plus partition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PointerPvm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelDescriptor>,
}

impl SchemeFile {
    pub fn from_instance(inst: &ModelInstance, model: Option<ModelDescriptor>) -> Result<Self> {
        let target = inst.target.as_ref().map(PointerPvm::from_observable).transpose()?;
        Ok(Self {
            scheme: inst.scheme.clone(),
            conserved: inst.conserved.clone(),
            target,
            model,
        })
    }

    pub fn target_observable(&self) -> Option<DiscreteObservable> {
        self.target.as_ref().map(PointerPvm::to_observable)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| WayError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| WayError::Parse(format!("malformed scheme: {e}")))
    }
}

/// Reads and validates a scheme file. Errors name the file and, for JSON
/// problems, the line and column.
pub fn parse_scheme_file(path: &Path) -> Result<SchemeFile> {
    let text = std::fs::read_to_string(path).map_err(|e| WayError::Io(format!("{}: {e}", path.display())))?;
    SchemeFile::from_json(&text).map_err(|e| WayError::Parse(format!("{}: {e}", path.display())))
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated rows under a fixed header.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.join(","));
    }
    out
}
