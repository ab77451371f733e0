//! Persisted result of one seeded run.
//!
//! Records are plain serde structs with a versioned schema; readers reject
//! unknown major versions. Serialization is fully deterministic — equal
//! configs produce byte-identical JSON — so records double as regression
//! fixtures. Wall-clock timing is deliberately not part of the record; the
//! harness reports it on its summary line instead.

use serde::{Deserialize, Serialize};

use crate::types::{RunConfig, Solution};

pub const SCHEMA_VERSION: &str = "1.0";

/// Decision and objective matrices of one solution set, row-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetMatrices {
    pub x: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

impl SetMatrices {
    pub fn from_solutions(members: &[Solution]) -> Self {
        SetMatrices {
            x: members.iter().map(|s| s.x.clone()).collect(),
            f: members.iter().map(|s| s.f.clone()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Per-generation snapshot: schedule value, both archives, and the answer
/// set's metrics against the run's reference sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub gen: u64,
    pub eps: f64,
    pub ca: SetMatrices,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub da: Option<SetMatrices>,
    pub igd: f64,
    pub igdx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: String,
    pub config: RunConfig,
    /// Canonical problem id (also inside `config`, kept for quick grouping).
    pub problem: String,
    pub fe_used: u64,
    pub generations: u64,
    /// Convergence-archive-only ablation run; `final_da` is absent.
    pub ablation: bool,
    /// Some environmental selection could not fill an archive to capacity.
    pub undersized: bool,
    /// The budget allowed no full generation; the record holds the
    /// initialized archives.
    pub init_only: bool,
    pub final_ca: SetMatrices,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub final_da: Option<SetMatrices>,
    /// IGD of the answer set on raw objectives.
    pub final_igd: f64,
    /// IGDX of the answer set on bounds-normalized decision vectors.
    pub final_igdx: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceFrame>>,
}

impl RunRecord {
    /// The set the run reports as its result: the diversity archive, or the
    /// convergence archive for ablation runs.
    pub fn answer_set(&self) -> &SetMatrices {
        self.final_da.as_ref().unwrap_or(&self.final_ca)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<RunRecord, RecordError> {
        let record: RunRecord =
            serde_json::from_str(text).map_err(|e| RecordError::Parse(e.to_string()))?;
        check_schema(&record.schema_version)?;
        Ok(record)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecordError {
    Parse(String),
    UnsupportedSchema(String),
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecordError::Parse(msg) => write!(f, "cannot parse record: {msg}"),
            RecordError::UnsupportedSchema(v) => {
                write!(f, "unsupported record schema version '{v}' (reader supports major 1)")
            }
        }
    }
}

impl std::error::Error for RecordError {}

/// Accepts any minor revision of the supported major version.
pub fn check_schema(version: &str) -> Result<(), RecordError> {
    let major = version.split('.').next().unwrap_or("");
    if major == "1" {
        Ok(())
    } else {
        Err(RecordError::UnsupportedSchema(version.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_gate() {
        assert!(check_schema("1.0").is_ok());
        assert!(check_schema("1.7").is_ok());
        assert!(check_schema("2.0").is_err());
        assert!(check_schema("").is_err());
    }

    #[test]
    fn json_round_trip_rejects_future_major() {
        let matrices = SetMatrices { x: vec![vec![0.5]], f: vec![vec![1.0, 2.0]] };
        let record = RunRecord {
            schema_version: SCHEMA_VERSION.into(),
            config: crate::types::RunConfig {
                problem: "sinemirror".into(),
                pop: 4,
                max_fe: 100,
                epsilon: 0.1,
                seed: 1,
                mode: crate::types::RunMode::Full,
                sbx_eta: 20.0,
                pm_eta: 20.0,
                pm_rate: 0.5,
                ref_points: 10,
                trace: false,
            },
            problem: "sinemirror".into(),
            fe_used: 100,
            generations: 16,
            ablation: false,
            undersized: false,
            init_only: false,
            final_ca: matrices.clone(),
            final_da: Some(matrices),
            final_igd: 0.1,
            final_igdx: 0.2,
            trace: None,
        };
        let text = record.to_json();
        let back = RunRecord::from_json(&text).unwrap();
        assert_eq!(back, record);
        let bumped = text.replace("\"1.0\"", "\"2.0\"");
        assert!(matches!(
            RunRecord::from_json(&bumped),
            Err(RecordError::UnsupportedSchema(_))
        ));
    }
}
