//! FVEC: the binary interchange format for feature matrices.
//!
//! Layout, all integers little-endian:
//!
//! | field        | type                        |
//! |--------------|-----------------------------|
//! | magic        | `b"FVEC"`                   |
//! | version      | `u16`, currently 1          |
//! | name length  | `u16`                       |
//! | name         | UTF-8 bytes                 |
//! | n_samples    | `u64`                       |
//! | dim          | `u64`                       |
//! | payload      | `n_samples * dim` x `f32`, row-major |
//! | crc          | `u32`, CRC-32 (IEEE) of the payload bytes |

use std::fs;
use std::io::Write;
use std::path::Path;

use super::block::FeatureBlock;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"FVEC";
pub const VERSION: u16 = 1;

/// Serializes a block into FVEC bytes.
pub fn encode(block: &FeatureBlock) -> Vec<u8> {
    let name = block.name().as_bytes();
    let payload_len = block.as_slice().len() * 4;
    let mut out = Vec::with_capacity(4 + 2 + 2 + name.len() + 16 + payload_len + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(name.len() as u16).to_le_bytes());
    out.extend_from_slice(name);
    out.extend_from_slice(&(block.n_rows() as u64).to_le_bytes());
    out.extend_from_slice(&(block.dim() as u64).to_le_bytes());
    let start = out.len();
    for v in block.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc32fast::hash(&out[start..]);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn write_block(path: impl AsRef<Path>, block: &FeatureBlock) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode(block)).map_err(|e| Error::io(path, e))
}

/// Parsed FVEC header plus the offset where the payload starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FvecHeader {
    pub name: String,
    pub n_samples: u64,
    pub dim: u64,
    pub payload_offset: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::MalformedHeader {
                path: self.path.into(),
                reason: format!("truncated while reading {what}"),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn parse_header(bytes: &[u8], path: &Path) -> Result<FvecHeader> {
    let malformed = |reason: String| Error::MalformedHeader {
        path: path.into(),
        reason,
    };
    let mut cur = Cursor {
        bytes,
        pos: 0,
        path,
    };
    if cur.take(4, "magic")? != MAGIC {
        return Err(malformed("bad magic bytes".into()));
    }
    let version = cur.u16("version")?;
    if version != VERSION {
        return Err(malformed(format!("unsupported version {version}")));
    }
    let name_len = cur.u16("name length")? as usize;
    let name = std::str::from_utf8(cur.take(name_len, "name")?)
        .map_err(|_| malformed("name is not UTF-8".into()))?
        .to_owned();
    let n_samples = cur.u64("sample count")?;
    let dim = cur.u64("dim")?;
    if dim == 0 {
        return Err(malformed("dim is 0".into()));
    }
    Ok(FvecHeader {
        name,
        n_samples,
        dim,
        payload_offset: cur.pos,
    })
}

/// Decodes FVEC bytes. `path` is only used in error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<FeatureBlock> {
    let header = parse_header(bytes, path)?;
    let dim = header.dim as usize;
    let row_bytes = dim.checked_mul(4).ok_or_else(|| Error::MalformedHeader {
        path: path.into(),
        reason: "dim overflows".into(),
    })?;
    let body = &bytes[header.payload_offset..];
    let payload_len = body.len().saturating_sub(4);
    let expected_rows = header.n_samples as usize;
    if body.len() < 4
        || !payload_len.is_multiple_of(row_bytes)
        || payload_len / row_bytes != expected_rows
    {
        return Err(Error::RowCount {
            context: path.display().to_string(),
            expected: expected_rows,
            found: payload_len / row_bytes,
        });
    }
    let (payload, crc_bytes) = body.split_at(payload_len);
    let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(Error::Checksum {
            path: path.into(),
            stored,
            computed,
        });
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    FeatureBlock::new(header.name, dim, data)
}

/// Reads a CSV feature file: a header row of feature names, then one row of
/// numbers per sample.
pub fn read_csv(path: &Path, name: &str) -> Result<FeatureBlock> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let dim = reader.headers().map_err(|e| csv_error(path, e))?.len();
    let mut data = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != dim {
            return Err(Error::MalformedHeader {
                path: path.into(),
                reason: format!("row {row} has {} fields, header has {dim}", record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            let v: f32 = field.parse().map_err(|_| Error::MalformedHeader {
                path: path.into(),
                reason: format!("row {row}, column {col}: cannot parse {field:?}"),
            })?;
            data.push(v);
        }
    }
    FeatureBlock::new(name, dim, data)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::MalformedHeader {
            path: path.into(),
            reason: e.to_string(),
        }
    }
}

/// Loads a feature block, FVEC or CSV. FVEC files are recognized by their
/// magic bytes and must declare `expected_name`; CSV files take it as their
/// name.
pub fn load_block(path: impl AsRef<Path>, expected_name: &str) -> Result<FeatureBlock> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        let block = decode(&bytes, path)?;
        if block.name() != expected_name {
            return Err(Error::NameMismatch {
                expected: expected_name.into(),
                found: block.name().into(),
            });
        }
        Ok(block)
    } else {
        read_csv(path, expected_name)
    }
}
