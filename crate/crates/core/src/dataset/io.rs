use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DatasetError, DatasetSplits, DatasetTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(flatten)]
    pub splits: DatasetSplits,
    pub counts: SplitCounts,
    /// Effective configuration of the run that produced the dataset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> DatasetError + '_ {
    move |e| DatasetError::Json {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

pub fn write_dataset(
    dir: &Path,
    splits: &DatasetSplits,
    tuples: &[DatasetTuple],
) -> Result<(), DatasetError> {
    write_dataset_with(dir, splits, tuples, None, &[])
}

/// Writes the split files, `manifest.json` and `dedup.log`, plus any
/// `extra` files, as one atomic directory.
pub fn write_dataset_with(
    dir: &Path,
    splits: &DatasetSplits,
    tuples: &[DatasetTuple],
    config: Option<serde_json::Value>,
    extra: &[(&str, String)],
) -> Result<(), DatasetError> {
    let by_id: HashMap<&str, &DatasetTuple> = tuples.iter().map(|t| (t.id.as_str(), t)).collect();
    let mut files: Vec<(String, String)> = Vec::new();
    for (label, ids) in splits.splits() {
        let mut text = String::new();
        for id in ids {
            let t = by_id.get(id.as_str()).ok_or_else(|| {
                DatasetError::ManifestMismatch(format!("split {label} names unknown tuple {id}"))
            })?;
            text.push_str(&serde_json::to_string(t).expect("tuple serializes"));
            text.push('\n');
        }
        files.push((format!("{label}.jsonl"), text));
    }
    let manifest = Manifest {
        splits: splits.clone(),
        counts: SplitCounts {
            train: splits.train.len(),
            validation: splits.validation.len(),
            test: splits.test.len(),
        },
        config,
    };
    files.push((
        "manifest.json".into(),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    ));
    files.push((
        "dedup.log".into(),
        splits.dedup_log.iter().map(|e| format!("{e}\n")).collect(),
    ));
    files.extend(extra.iter().map(|(n, t)| (n.to_string(), t.clone())));
    crate::atomic::write_dir(dir, &files).map_err(io_err(dir))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, DatasetError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(json_err(&path))
}

/// Reads a dataset back, checking every tuple hash and every split list
/// against the manifest. Tuples come back in train, validation, test order.
pub fn read_dataset(dir: &Path) -> Result<(DatasetSplits, Vec<DatasetTuple>), DatasetError> {
    let manifest = read_manifest(dir)?;
    let splits = manifest.splits;
    let counts = [
        manifest.counts.train,
        manifest.counts.validation,
        manifest.counts.test,
    ];
    let mut tuples = Vec::new();
    for (k, (label, ids)) in splits.splits().into_iter().enumerate() {
        let path = dir.join(format!("{label}.jsonl"));
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut found = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let t: DatasetTuple = serde_json::from_str(line).map_err(json_err(&path))?;
            if t.expected_id() != t.id {
                return Err(DatasetError::ManifestMismatch(format!(
                    "{label}: content of tuple {} does not hash to its id",
                    t.id
                )));
            }
            found.push(t);
        }
        if found.len() != counts[k] || ids.len() != counts[k] {
            return Err(DatasetError::ManifestMismatch(format!(
                "{label}: manifest count {} but {} listed and {} stored",
                counts[k],
                ids.len(),
                found.len()
            )));
        }
        if found.iter().map(|t| &t.id).ne(ids.iter()) {
            return Err(DatasetError::ManifestMismatch(format!(
                "{label}: stored tuples differ from the manifest's id list"
            )));
        }
        tuples.extend(found);
    }
    Ok((splits, tuples))
}
