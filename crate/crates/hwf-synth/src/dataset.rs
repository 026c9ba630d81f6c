//! Dataset generation: synthesize, filter by segment budget, normalize,
//! write wireframe files, and record a manifest with a deterministic
//! 9:1 train/test split.

use std::fs;
use std::path::{Path, PathBuf};

use hwf_core::{build_graph, connected_components, normalize, write_wireframe, Wireframe};
use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::house::{synthesize_house, SynthesisConfig};
use crate::rng::{mix_seed, rng_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestItem {
    pub id: u64,
    pub file: String,
    pub split: Split,
    pub segment_count: usize,
    pub component_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub global_seed: u64,
    pub max_segments: usize,
    pub items: Vec<ManifestItem>,
}

impl DatasetManifest {
    pub fn split_items(&self, split: Split) -> impl Iterator<Item = &ManifestItem> {
        self.items.iter().filter(move |it| it.split == split)
    }

    /// Paths of a split's wireframe files relative to `dir`.
    pub fn split_paths(&self, dir: &Path, split: Split) -> Vec<PathBuf> {
        self.split_items(split).map(|it| dir.join(&it.file)).collect()
    }
}

const ATTEMPT_BUDGET: u64 = 64;
const SPLIT_SALT: u64 = 0x73_70_6C_69_74; // "split"

/// Generates `n_samples` houses under `cfg`, rejecting any with
/// `max_segments` or more segments, normalizing the survivors, and writing
/// one file per sample plus `manifest.json`. Exactly one tenth of the
/// samples (rounded down) land in the test split, chosen by ranking a
/// per-id hash.
pub fn build_dataset(
    cfg: &SynthesisConfig,
    n_samples: u64,
    out_dir: &Path,
) -> Result<DatasetManifest, SynthError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).map_err(|source| SynthError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let test_ids = test_id_set(n_samples);
    let mut items = Vec::with_capacity(n_samples as usize);
    for id in 0..n_samples {
        let (w, seed) = sample_house(cfg, id)?;
        let file = format!("house_{id:05}.wf");
        let path = out_dir.join(&file);
        write_wireframe(&path, &w)?;
        let labels = connected_components(&build_graph(&w));
        items.push(ManifestItem {
            id,
            file,
            split: if test_ids.contains(&id) { Split::Test } else { Split::Train },
            segment_count: w.segment_count(),
            component_count: labels.component_count,
            seed,
        });
    }
    let manifest = DatasetManifest {
        global_seed: cfg.seed,
        max_segments: cfg.max_segments,
        items,
    };
    write_manifest(&manifest, &out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Synthesizes one accepted house for `id`, retrying with fresh derived
/// seeds while the segment budget is exceeded.
pub fn sample_house(cfg: &SynthesisConfig, id: u64) -> Result<(Wireframe, u64), SynthError> {
    for attempt in 0..ATTEMPT_BUDGET {
        let seed = mix_seed(&[cfg.seed, id, attempt]);
        let mut rng = rng_for(&[cfg.seed, id, attempt]);
        let house = synthesize_house(cfg, &mut rng)?;
        if house.segment_count() >= cfg.max_segments {
            continue;
        }
        let house = normalize(&house)?;
        return Ok((house, seed));
    }
    Err(SynthError::SynthesisFailure {
        reason: format!("sample {id}: segment budget unmet in {ATTEMPT_BUDGET} attempts"),
    })
}

/// The n/10 ids with the smallest per-id hash rank form the test split.
fn test_id_set(n_samples: u64) -> std::collections::HashSet<u64> {
    let mut ranked: Vec<(u64, u64)> = (0..n_samples)
        .map(|id| (mix_seed(&[SPLIT_SALT, id]), id))
        .collect();
    ranked.sort_unstable();
    ranked
        .into_iter()
        .take((n_samples / 10) as usize)
        .map(|(_, id)| id)
        .collect()
}

pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), SynthError> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|source| SynthError::Json { path: path.to_path_buf(), source })?;
    fs::write(path, json + "\n").map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest, SynthError> {
    let text = fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| SynthError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hwf_core::{parse_wireframe, read_wireframe};

    #[test]
    fn dataset_of_100_splits_90_10() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SynthesisConfig::default();
        let manifest = build_dataset(&cfg, 100, dir.path()).unwrap();
        assert_eq!(manifest.items.len(), 100);
        let test = manifest.split_items(Split::Test).count();
        let train = manifest.split_items(Split::Train).count();
        assert_eq!(test, 10);
        assert_eq!(train, 90);
        // Segment budget enforced.
        assert!(manifest.items.iter().all(|it| it.segment_count < cfg.max_segments));
    }

    #[test]
    fn emitted_files_parse_and_are_normalized() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SynthesisConfig { max_segments: 120, ..SynthesisConfig::default() };
        let manifest = build_dataset(&cfg, 12, dir.path()).unwrap();
        for item in &manifest.items {
            let w = read_wireframe(&dir.path().join(&item.file)).unwrap();
            assert_eq!(w.segment_count(), item.segment_count);
            let renorm = normalize(&w).unwrap();
            for (a, b) in w.vertices().iter().zip(renorm.vertices()) {
                for k in 0..3 {
                    // File coordinates round through single precision, so
                    // renormalization may move them by that rounding scale.
                    assert!((a[k] - b[k]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn builds_are_reproducible() {
        let cfg = SynthesisConfig::default();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let ma = build_dataset(&cfg, 8, dir_a.path()).unwrap();
        let mb = build_dataset(&cfg, 8, dir_b.path()).unwrap();
        for (a, b) in ma.items.iter().zip(&mb.items) {
            assert_eq!(a.seed, b.seed);
            let fa = fs::read_to_string(dir_a.path().join(&a.file)).unwrap();
            let fb = fs::read_to_string(dir_b.path().join(&b.file)).unwrap();
            assert_eq!(fa, fb);
            parse_wireframe(&fa).unwrap();
        }
    }
}
