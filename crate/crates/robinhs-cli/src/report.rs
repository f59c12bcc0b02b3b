//! Run reports and file emission: one JSON report per run plus CSV
//! blocks for plottable arrays, every file written atomically.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ExperimentConfig, Scenario};

/// One named pass/fail decision, with the numbers it was derived from
/// in the detail string.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Everything a run produced: the echoed inputs, computed quantities,
/// verdicts and wall-clock time. Every verdict is recomputable from
/// `quantities` plus the echoed tolerances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    /// Inputs echo; re-parsing this object yields the original config.
    pub config: ExperimentConfig,
    pub quantities: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    /// True exactly when every verdict passed.
    pub pass: bool,
    pub wall_seconds: f64,
}

/// A plottable array destined for its own CSV file.
#[derive(Clone, Debug)]
pub enum CsvBlock {
    /// Columns k, s_k with k starting at 1.
    Singulars { tag: String, values: Vec<f64> },
    /// Columns re, im, residual.
    Eigenvalues { tag: String, rows: Vec<[f64; 3]> },
}

impl CsvBlock {
    pub fn file_name(&self) -> String {
        match self {
            CsvBlock::Singulars { tag, .. } => format!("singular_values_{tag}.csv"),
            CsvBlock::Eigenvalues { tag, .. } => format!("eigenvalues_{tag}.csv"),
        }
    }

    /// Serializes the block. Floats print in Rust's shortest round-trip
    /// form, so equal data gives byte-equal files.
    fn to_csv_bytes(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            CsvBlock::Singulars { values, .. } => {
                w.write_record(["k", "s_k"])?;
                for (i, v) in values.iter().enumerate() {
                    w.write_record([(i + 1).to_string(), v.to_string()])?;
                }
            }
            CsvBlock::Eigenvalues { rows, .. } => {
                w.write_record(["re", "im", "residual"])?;
                for [re, im, res] in rows {
                    w.write_record([re.to_string(), im.to_string(), res.to_string()])?;
                }
            }
        }
        w.into_inner().map_err(|e| io::Error::new(io::ErrorKind::Other, e))
    }
}

/// A report together with its CSV payloads.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub report: RunReport,
    pub csv: Vec<CsvBlock>,
}

/// Writes `report.json` and one CSV file per block into `dir`,
/// creating the directory. Each file lands through a temp-file rename,
/// so concurrent readers never see partial content. Returns the paths
/// written.
pub fn emit_artifacts(artifacts: &RunArtifacts, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut json = serde_json::to_vec_pretty(&artifacts.report)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    json.push(b'\n');
    written.push(write_atomic(dir, "report.json", &json)?);
    for block in &artifacts.csv {
        written.push(write_atomic(dir, &block.file_name(), &block.to_csv_bytes()?)?);
    }
    Ok(written)
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<PathBuf> {
    let tmp = dir.join(format!("{name}.tmp"));
    let path = dir.join(name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}
