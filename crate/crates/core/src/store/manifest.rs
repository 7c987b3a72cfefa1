use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::block::{sort_canonical, FeatureBlock};
use super::fvec::load_block;
use crate::error::{Error, Result};

/// Binary class: low (-1) or high (+1) aesthetic quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Label {
    Low,
    High,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Low => -1.0,
            Label::High => 1.0,
        }
    }

    /// Decision rule on a signed score: `>= 0` is high.
    pub fn from_score(score: f64) -> Label {
        if score >= 0.0 {
            Label::High
        } else {
            Label::Low
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(Label::Low),
            1 => Ok(Label::High),
            other => Err(format!("label must be -1 or +1, got {other}")),
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Low => -1,
            Label::High => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

/// Provenance written by the feature extractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionInfo {
    /// `whole-image` or `face-region`.
    pub region_mode: String,
    #[serde(default)]
    pub backbones: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_name: String,
    pub score_range: (f64, f64),
    pub samples: Vec<SampleRecord>,
    /// Block name to feature file, relative to the manifest's directory.
    pub blocks: BTreeMap<String, PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionInfo>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn new(
        dataset_name: impl Into<String>,
        score_range: (f64, f64),
        samples: Vec<SampleRecord>,
        blocks: BTreeMap<String, PathBuf>,
    ) -> Result<Self> {
        let m = DatasetManifest {
            dataset_name: dataset_name.into(),
            score_range,
            samples,
            blocks,
            extraction: None,
            base_dir: PathBuf::new(),
        };
        m.check(Path::new("<memory>"))?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
            path: path.into(),
            reason: e.to_string(),
        })?;
        m.check(path)?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    fn check(&self, path: &Path) -> Result<()> {
        let bad = |reason: String| Error::Manifest {
            path: path.into(),
            reason,
        };
        let mut seen = HashSet::new();
        for s in &self.samples {
            if !seen.insert(s.id.as_str()) {
                return Err(bad(format!("duplicate sample id {:?}", s.id)));
            }
            if !s.score.is_finite() {
                return Err(bad(format!("sample {:?} has non-finite score", s.id)));
            }
        }
        let (lo, hi) = self.score_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(bad(format!("invalid score_range [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.score).collect()
    }

    /// Block names in canonical order.
    pub fn block_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.blocks.keys().cloned().collect();
        sort_canonical(&mut names);
        names
    }

    pub fn block_path(&self, name: &str) -> Option<PathBuf> {
        self.blocks.get(name).map(|p| self.base_dir.join(p))
    }

    /// Loads one block and checks its row count against the sample list.
    pub fn load_block(&self, name: &str) -> Result<FeatureBlock> {
        let path = self.block_path(name).ok_or_else(|| Error::Manifest {
            path: self.base_dir.clone(),
            reason: format!("no block named {name}"),
        })?;
        if !path.exists() {
            return Err(Error::MissingBlock {
                name: name.to_owned(),
                path,
            });
        }
        let block = load_block(&path, name)?;
        if block.n_rows() != self.n_samples() {
            return Err(Error::RowCount {
                context: path.display().to_string(),
                expected: self.n_samples(),
                found: block.n_rows(),
            });
        }
        Ok(block)
    }

    /// Labels carried by the manifest, if every sample has one.
    pub fn native_labels(&self) -> Option<Vec<Label>> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Native labels when present, otherwise the median split of the scores.
    pub fn class_labels(&self) -> Result<Vec<Label>> {
        match self.native_labels() {
            Some(labels) if !labels.is_empty() => Ok(labels),
            _ => median_split(&self.samples),
        }
    }
}

/// Splits samples into two equal groups by score: the `n / 2` lowest-scored
/// samples are low, the rest high. Ties are broken by ascending id, so the
/// result depends only on the (id, score) pairs and not on input order.
pub fn median_split(samples: &[SampleRecord]) -> Result<Vec<Label>> {
    if samples.len() < 2 {
        return Err(Error::Config(format!(
            "median split needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[a]
            .score
            .total_cmp(&samples[b].score)
            .then_with(|| samples[a].id.cmp(&samples[b].id))
    });
    let mut labels = vec![Label::High; samples.len()];
    for &i in &order[..samples.len() / 2] {
        labels[i] = Label::Low;
    }
    Ok(labels)
}
