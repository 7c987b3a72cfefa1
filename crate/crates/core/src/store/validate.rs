use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use super::fvec::{self, MAGIC};
use super::manifest::DatasetManifest;
use crate::error::Error;

/// One inconsistency found while validating a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub file: PathBuf,
    pub row: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "{}: row {r}: {}", self.file.display(), self.message),
            None => write!(f, "{}: {}", self.file.display(), self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSummary {
    pub name: String,
    pub path: PathBuf,
    pub n_rows: usize,
    pub dim: usize,
    /// CRC-32 of the payload; `None` for CSV files.
    pub crc: Option<u32>,
}

#[derive(Debug, Default)]
pub struct ValidationReport {
    pub manifest: Option<DatasetManifest>,
    pub blocks: Vec<BlockSummary>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Checks a manifest and every feature file it references: headers,
/// checksums, canonical dims, finiteness, and row counts against the sample
/// list. Problems are collected rather than returned on the first error.
pub fn validate_dataset(manifest_path: impl AsRef<Path>) -> ValidationReport {
    let manifest_path = manifest_path.as_ref();
    let mut report = ValidationReport::default();
    let manifest = match DatasetManifest::load(manifest_path) {
        Ok(m) => m,
        Err(e) => {
            report.diagnostics.push(Diagnostic {
                file: manifest_path.into(),
                row: None,
                message: e.to_string(),
            });
            return report;
        }
    };

    for name in manifest.block_names() {
        let path = manifest.block_path(&name).unwrap();
        let mut push = |row: Option<usize>, message: String| {
            report.diagnostics.push(Diagnostic {
                file: path.clone(),
                row,
                message,
            })
        };
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                push(None, format!("block {name}: cannot read file: {e}"));
                continue;
            }
        };
        let loaded = if bytes.starts_with(MAGIC) {
            fvec::decode(&bytes, &path).and_then(|b| {
                if b.name() == name {
                    Ok(b)
                } else {
                    Err(Error::NameMismatch {
                        expected: name.clone(),
                        found: b.name().into(),
                    })
                }
            })
        } else {
            fvec::read_csv(&path, &name)
        };
        let block = match loaded {
            Ok(b) => b,
            Err(e) => {
                let row = match &e {
                    Error::NonFinite { row, .. } => Some(*row),
                    _ => None,
                };
                let kind = match &e {
                    Error::Checksum { .. } => "checksum",
                    Error::RowCount { .. } => "row count",
                    Error::DimMismatch { .. } => "dim",
                    Error::NonFinite { .. } => "non-finite value",
                    _ => "format",
                };
                push(row, format!("block {name}: {kind} error: {e}"));
                continue;
            }
        };
        if block.n_rows() != manifest.n_samples() {
            push(
                None,
                format!(
                    "block {name}: row count error: {} rows, manifest lists {} samples",
                    block.n_rows(),
                    manifest.n_samples()
                ),
            );
        }
        let crc = bytes
            .starts_with(MAGIC)
            .then(|| u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap()));
        report.blocks.push(BlockSummary {
            name: name.clone(),
            path,
            n_rows: block.n_rows(),
            dim: block.dim(),
            crc,
        });
    }
    report.manifest = Some(manifest);
    report
}
