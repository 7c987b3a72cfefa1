use std::ops::Range;

use crate::error::{Error, Result};

/// Canonical dimensionality of the named CNN feature blocks.
pub fn canonical_dim(name: &str) -> Option<usize> {
    match name {
        "IQ" | "IA" => Some(4096),
        "FA" => Some(2048),
        _ => None,
    }
}

/// Position of a block name in the canonical IQ, IA, FA column order.
/// Non-canonical names sort after the canonical ones.
pub fn canonical_rank(name: &str) -> usize {
    match name {
        "IQ" => 0,
        "IA" => 1,
        "FA" => 2,
        _ => 3,
    }
}

/// Sorts block names into canonical order (IQ, IA, FA, then the rest by name).
pub fn sort_canonical(names: &mut [String]) {
    names.sort_by(|a, b| {
        canonical_rank(a)
            .cmp(&canonical_rank(b))
            .then_with(|| a.cmp(b))
    });
}

/// A named dense matrix of per-sample features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    name: String,
    dim: usize,
    data: Vec<f32>,
}

impl FeatureBlock {
    /// Builds a block from row-major data, checking shape, finiteness and
    /// the canonical dim for IQ/IA/FA.
    pub fn new(name: impl Into<String>, dim: usize, data: Vec<f32>) -> Result<Self> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::Config(format!("block {name} has dim 0")));
        }
        if let Some(expected) = canonical_dim(&name) {
            if expected != dim {
                return Err(Error::DimMismatch {
                    name,
                    expected,
                    found: dim,
                });
            }
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::RowCount {
                context: format!("block {name}"),
                expected: data.len().div_ceil(dim),
                found: data.len() / dim,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                name,
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(FeatureBlock { name, dim, data })
    }

    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f32>]) -> Result<Self> {
        let name = name.into();
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::LengthMismatch {
                    context: "FeatureBlock::from_rows",
                    left: dim,
                    right: rows[i].len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(name, dim, data)
    }

    // Skips validation; only for data derived from already-valid blocks.
    pub(crate) fn from_parts_unchecked(name: String, dim: usize, data: Vec<f32>) -> Self {
        debug_assert!(dim > 0 && data.len().is_multiple_of(dim));
        FeatureBlock { name, dim, data }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Returns a copy under a different name. Canonical dims are re-checked.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self> {
        Self::new(name, self.dim, self.data.clone())
    }

    /// New block holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureBlock {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureBlock::from_parts_unchecked(self.name.clone(), self.dim, data)
    }

    /// New block holding a contiguous column range.
    pub fn slice_columns(&self, cols: Range<usize>, name: impl Into<String>) -> Result<Self> {
        if cols.start >= cols.end || cols.end > self.dim {
            return Err(Error::Config(format!(
                "column range {cols:?} out of bounds for dim {}",
                self.dim
            )));
        }
        let mut data = Vec::with_capacity(self.n_rows() * cols.len());
        for row in self.rows() {
            data.extend_from_slice(&row[cols.clone()]);
        }
        Self::new(name, cols.len(), data)
    }
}

/// Concatenates blocks column-wise: row `i` of the result is row `i` of every
/// input, in order. Canonical names must appear in IQ, IA, FA order.
pub fn concat_blocks(blocks: &[FeatureBlock]) -> Result<FeatureBlock> {
    let first = blocks.first().ok_or(Error::Empty("concat_blocks"))?;
    if blocks.len() == 1 {
        return Ok(first.clone());
    }
    let n = first.n_rows();
    for b in &blocks[1..] {
        if b.n_rows() != n {
            return Err(Error::RowCount {
                context: format!("concat of block {}", b.name),
                expected: n,
                found: b.n_rows(),
            });
        }
    }
    let ranks: Vec<usize> = blocks
        .iter()
        .map(|b| canonical_rank(&b.name))
        .filter(|&r| r < 3)
        .collect();
    if ranks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "canonical blocks must be concatenated in IQ, IA, FA order".into(),
        ));
    }

    let dim: usize = blocks.iter().map(|b| b.dim).sum();
    let mut data = Vec::with_capacity(n * dim);
    for i in 0..n {
        for b in blocks {
            data.extend_from_slice(b.row(i));
        }
    }
    let name = blocks
        .iter()
        .map(|b| b.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    Ok(FeatureBlock::from_parts_unchecked(name, dim, data))
}
