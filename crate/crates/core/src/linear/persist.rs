//! Model files: a JSON header followed by a checksummed binary payload.
//!
//! | field       | type                                   |
//! |-------------|----------------------------------------|
//! | magic       | `b"FLMD"`                              |
//! | header len  | `u32` LE                               |
//! | header      | UTF-8 JSON ([`ModelHeader`])           |
//! | payload     | see below                              |
//! | crc         | `u32` LE, CRC-32 (IEEE) of the payload |
//!
//! Payload, all little-endian: `dim: u64`, `dim` x `f64` weights, `f64` bias;
//! then, if the header says `standardizer: "inline"`, `dim` x `f64` means and
//! `dim` x `f64` stds; then, if `mask` is true, `b"MASK"`, `n_bits: u64` and
//! `ceil(n_bits / 8)` bytes with bit `j` at byte `j / 8`, position `j % 8`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{LinearModel, Task};
use crate::error::{Error, Result};
use crate::store::Standardizer;

pub const MAGIC: &[u8; 4] = b"FLMD";
const MASK_MAGIC: &[u8; 4] = b"MASK";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub format_version: u32,
    pub task: Task,
    pub dim: usize,
    /// `"inline"` when the payload carries the standardizer.
    pub standardizer: Option<String>,
    pub mask: bool,
    /// Free-form echo of the training configuration.
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: LinearModel,
    pub standardizer: Option<Standardizer>,
    pub mask: Option<Vec<bool>>,
    pub config: serde_json::Value,
}

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (j, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        out[j / 8] |= 1 << (j % 8);
    }
    out
}

pub fn unpack_bits(bytes: &[u8], n_bits: usize) -> Vec<bool> {
    (0..n_bits)
        .map(|j| bytes[j / 8] & (1 << (j % 8)) != 0)
        .collect()
}

impl ModelFile {
    pub fn header(&self) -> ModelHeader {
        ModelHeader {
            format_version: 1,
            task: self.model.task,
            dim: self.model.dim(),
            standardizer: self.standardizer.as_ref().map(|_| "inline".to_owned()),
            mask: self.mask.is_some(),
            config: self.config.clone(),
        }
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let dim = self.model.dim();
        if let Some(s) = &self.standardizer {
            if s.dim() != dim {
                return Err(Error::LengthMismatch {
                    context: "ModelFile standardizer",
                    left: dim,
                    right: s.dim(),
                });
            }
        }
        if let Some(m) = &self.mask {
            if m.len() != dim {
                return Err(Error::LengthMismatch {
                    context: "ModelFile mask",
                    left: dim,
                    right: m.len(),
                });
            }
        }
        let header = serde_json::to_vec(&self.header())?;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        let start = out.len();
        out.extend_from_slice(&(dim as u64).to_le_bytes());
        let mut put = |vals: &[f64]| {
            for v in vals {
                out.extend_from_slice(&v.to_le_bytes());
            }
        };
        put(&self.model.weights);
        put(&[self.model.bias]);
        if let Some(s) = &self.standardizer {
            put(&s.means);
            put(&s.stds);
        }
        if let Some(m) = &self.mask {
            out.extend_from_slice(MASK_MAGIC);
            out.extend_from_slice(&(m.len() as u64).to_le_bytes());
            out.extend_from_slice(&pack_bits(m));
        }
        let crc = crc32fast::hash(&out[start..]);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    pub fn decode(bytes: &[u8], path: &Path) -> Result<Self> {
        let malformed = |reason: &str| Error::MalformedHeader {
            path: path.into(),
            reason: reason.into(),
        };
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(malformed("bad magic bytes"));
        }
        let hlen = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let header_end = 8usize
            .checked_add(hlen)
            .filter(|&e| e + 4 <= bytes.len())
            .ok_or_else(|| malformed("truncated header"))?;
        let header: ModelHeader = serde_json::from_slice(&bytes[8..header_end])
            .map_err(|e| malformed(&format!("header JSON: {e}")))?;
        let (payload, crc) = bytes[header_end..].split_at(bytes.len() - header_end - 4);
        let stored = u32::from_le_bytes(crc.try_into().unwrap());
        let computed = crc32fast::hash(payload);
        if stored != computed {
            return Err(Error::Checksum {
                path: path.into(),
                stored,
                computed,
            });
        }

        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8]> {
            let s = payload
                .get(pos..pos + n)
                .ok_or_else(|| malformed("truncated payload"))?;
            pos += n;
            Ok(s)
        };
        let dim = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        if dim != header.dim {
            return Err(malformed("payload dim disagrees with header"));
        }
        let mut floats = |k: usize| -> Result<Vec<f64>> {
            Ok(take(k * 8)?
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        };
        let weights = floats(dim)?;
        let bias = floats(1)?[0];
        let standardizer = match header.standardizer.as_deref() {
            Some("inline") => Some(Standardizer {
                means: floats(dim)?,
                stds: floats(dim)?,
            }),
            None => None,
            Some(_) => return Err(malformed("unknown standardizer reference")),
        };
        let mask = if header.mask {
            if take(4)? != MASK_MAGIC {
                return Err(malformed("missing mask section"));
            }
            let n_bits = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
            if n_bits != dim {
                return Err(malformed("mask length disagrees with dim"));
            }
            Some(unpack_bits(take(n_bits.div_ceil(8))?, n_bits))
        } else {
            None
        };
        if pos != payload.len() {
            return Err(malformed("trailing bytes in payload"));
        }
        Ok(ModelFile {
            model: LinearModel::new(weights, bias, header.task)?,
            standardizer,
            mask,
            config: header.config,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.encode()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(dim: usize, with_extras: bool) -> ModelFile {
        ModelFile {
            model: LinearModel::new(
                (0..dim).map(|j| j as f64 * 0.25 - 1.0).collect(),
                -0.5,
                Task::Classification,
            )
            .unwrap(),
            standardizer: with_extras.then(|| Standardizer {
                means: vec![0.5; dim],
                stds: vec![2.0; dim],
            }),
            mask: with_extras.then(|| (0..dim).map(|j| j % 3 != 0).collect()),
            config: serde_json::json!({"c": 1.0}),
        }
    }

    #[test]
    fn roundtrip_and_corruption() {
        let p = Path::new("m.bin");
        for extras in [false, true] {
            let m = sample(11, extras);
            let bytes = m.encode().unwrap();
            assert_eq!(ModelFile::decode(&bytes, p).unwrap(), m);
            let mut bad = bytes.clone();
            let i = bad.len() - 7;
            bad[i] ^= 0x40;
            assert!(matches!(
                ModelFile::decode(&bad, p),
                Err(Error::Checksum { .. })
            ));
        }
    }

    proptest! {
        #[test]
        fn bit_packing_roundtrips(bits in prop::collection::vec(any::<bool>(), 0..200)) {
            prop_assert_eq!(unpack_bits(&pack_bits(&bits), bits.len()), bits);
        }
    }
}
