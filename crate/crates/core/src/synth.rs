//! Synthetic datasets with a known linear ground truth.
//!
//! Every feature is standard normal. A random subset of `informative`
//! features gets a unit-norm weight vector `w`; the latent score is
//! `z = <w, x>`. Samples with `|z| < margin` are redrawn. The stored score is
//! `offset + z + noise * e` and the label is the sign of `z + noise * e`,
//! with `e` standard normal.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, tag};
use crate::store::{write_block, DatasetManifest, FeatureBlock, Label, SampleRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub dataset_name: String,
    pub n: usize,
    /// (name, dim) per block, in output order.
    pub blocks: Vec<(String, usize)>,
    pub informative: usize,
    pub noise: f64,
    /// Minimum `|z|` of every sample.
    pub margin: f64,
    pub offset: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            dataset_name: "synthetic".into(),
            n: 200,
            blocks: vec![
                ("SYN_A".into(), 30),
                ("SYN_B".into(), 30),
                ("SYN_C".into(), 20),
            ],
            informative: 10,
            noise: 0.0,
            margin: 0.0,
            offset: 5.0,
            seed: 0,
        }
    }
}

/// The generating model, indexed over the concatenation of all blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub params: SynthParams,
    pub n_features: usize,
    pub informative: Vec<usize>,
    pub weights: Vec<f64>,
    /// Score offset; the class threshold on the latent is 0.
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub manifest: DatasetManifest,
    pub blocks: Vec<FeatureBlock>,
    pub truth: SynthTruth,
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let total: usize = self.blocks.iter().map(|b| b.1).sum();
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.1 == 0) {
            return bad("every block needs a positive dim".into());
        }
        if self.informative == 0 || self.informative > total {
            return bad(format!(
                "informative must be in 1..={total}, got {}",
                self.informative
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise must be non-negative".into());
        }
        // Rejection sampling needs |z| >= margin to be reachable in
        // reasonable time; z is standard normal.
        if !(0.0..=3.0).contains(&self.margin) {
            return bad(format!("margin must be in [0, 3], got {}", self.margin));
        }
        if !self.offset.is_finite() {
            return bad("offset must be finite".into());
        }
        Ok(())
    }
}

pub fn generate(params: &SynthParams) -> Result<SynthData> {
    params.validate()?;
    let dim: usize = params.blocks.iter().map(|b| b.1).sum();
    let mut rng = rng::stream(params.seed, &[tag::SYNTH]);

    let mut informative = index::sample(&mut rng, dim, params.informative).into_vec();
    informative.sort_unstable();
    let mut weights = vec![0.0; dim];
    for &j in &informative {
        weights[j] = StandardNormal.sample(&mut rng);
    }
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    weights.iter_mut().for_each(|w| *w /= norm);

    let mut rows: Vec<Vec<f32>> = Vec::with_capacity(params.n);
    let mut samples = Vec::with_capacity(params.n);
    while rows.len() < params.n {
        let x: Vec<f32> = (0..dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .map(|v: f64| v as f32)
            .collect();
        let z: f64 = x
            .iter()
            .zip(&weights)
            .map(|(&a, &w)| f64::from(a) * w)
            .sum();
        if z.abs() < params.margin {
            continue;
        }
        let e: f64 = if params.noise > 0.0 {
            params.noise * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        samples.push(SampleRecord {
            id: format!("s{:06}", rows.len()),
            score: params.offset + z + e,
            label: Some(Label::from_score(z + e)),
        });
        rows.push(x);
    }

    let mut blocks = Vec::with_capacity(params.blocks.len());
    let mut start = 0;
    for (name, d) in &params.blocks {
        let data: Vec<f32> = rows
            .iter()
            .flat_map(|r| r[start..start + d].iter().copied())
            .collect();
        blocks.push(FeatureBlock::new(name.clone(), *d, data)?);
        start += d;
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.score), hi.max(s.score))
        });
    let block_refs: BTreeMap<String, PathBuf> = params
        .blocks
        .iter()
        .map(|(name, _)| (name.clone(), PathBuf::from(format!("{name}.fvec"))))
        .collect();
    let manifest = DatasetManifest::new(
        params.dataset_name.clone(),
        (lo.floor(), hi.ceil()),
        samples,
        block_refs,
    )?;
    Ok(SynthData {
        manifest,
        blocks,
        truth: SynthTruth {
            params: params.clone(),
            n_features: dim,
            informative,
            weights,
            offset: params.offset,
        },
    })
}

impl SynthData {
    /// Writes `manifest.json`, one FVEC file per block and `truth.json`.
    /// Returns the manifest path.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for b in &self.blocks {
            write_block(dir.join(format!("{}.fvec", b.name())), b)?;
        }
        let truth_path = dir.join("truth.json");
        let mut truth = serde_json::to_string_pretty(&self.truth)?;
        truth.push('\n');
        fs::write(&truth_path, truth).map_err(|e| Error::io(&truth_path, e))?;
        let manifest_path = dir.join("manifest.json");
        self.manifest.save(&manifest_path)?;
        Ok(manifest_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_labels_follow_the_truth() {
        let data = generate(&SynthParams::default()).unwrap();
        assert_eq!(data.manifest.n_samples(), 200);
        assert_eq!(data.truth.informative.len(), 10);
        let dims: Vec<usize> = data.blocks.iter().map(|b| b.dim()).collect();
        assert_eq!(dims, [30, 30, 20]);
        for (i, s) in data.manifest.samples.iter().enumerate() {
            let row: Vec<f32> = data.blocks.iter().flat_map(|b| b.row(i).to_vec()).collect();
            let z: f64 = row
                .iter()
                .zip(&data.truth.weights)
                .map(|(&a, &w)| f64::from(a) * w)
                .sum();
            assert_eq!(s.label, Some(Label::from_score(z)));
            assert!((s.score - 5.0 - z).abs() < 1e-12);
        }
    }

    #[test]
    fn margin_is_respected() {
        let p = SynthParams {
            margin: 1.0,
            n: 50,
            ..SynthParams::default()
        };
        let data = generate(&p).unwrap();
        assert!(data
            .manifest
            .samples
            .iter()
            .all(|s| (s.score - 5.0).abs() >= 1.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let data = generate(&SynthParams::default()).unwrap();
        data.write(a.path()).unwrap();
        generate(&SynthParams::default())
            .unwrap()
            .write(b.path())
            .unwrap();
        for f in [
            "manifest.json",
            "truth.json",
            "SYN_A.fvec",
            "SYN_B.fvec",
            "SYN_C.fvec",
        ] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap()
            );
        }
        let m = DatasetManifest::load(a.path().join("manifest.json")).unwrap();
        assert_eq!(m.load_block("SYN_B").unwrap(), data.blocks[1]);
    }

    #[test]
    fn rejects_bad_params() {
        for p in [
            SynthParams {
                n: 1,
                ..SynthParams::default()
            },
            SynthParams {
                informative: 81,
                ..SynthParams::default()
            },
            SynthParams {
                noise: -1.0,
                ..SynthParams::default()
            },
            SynthParams {
                blocks: vec![],
                ..SynthParams::default()
            },
        ] {
            assert!(generate(&p).is_err());
        }
    }
}
