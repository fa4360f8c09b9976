//! Dataset assembly: content-addressed tuples, deduplication, stratified
//! seeded splits, JSONL storage and token statistics.

mod io;
mod tokens;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::seed;

pub use io::{
    read_dataset, read_manifest, write_dataset, write_dataset_with, Manifest, SplitCounts,
};
pub use tokens::{token_stats, DomainTokens, TokenCounter, TokenStats, WhitespaceCounter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Encoding {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "compact")]
    Compact,
    #[serde(rename = "anonymized")]
    Anonymized,
    #[serde(rename = "anonymized+compact")]
    AnonymizedCompact,
}

impl Encoding {
    pub const ALL: [Encoding; 4] = [
        Encoding::Standard,
        Encoding::Compact,
        Encoding::Anonymized,
        Encoding::AnonymizedCompact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Encoding::Standard => "standard",
            Encoding::Compact => "compact",
            Encoding::Anonymized => "anonymized",
            Encoding::AnonymizedCompact => "anonymized+compact",
        }
    }

    pub fn is_anonymized(self) -> bool {
        matches!(self, Encoding::Anonymized | Encoding::AnonymizedCompact)
    }

    pub fn is_compact(self) -> bool {
        matches!(self, Encoding::Compact | Encoding::AnonymizedCompact)
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown encoding `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub dpgc: String,
    pub seed: u64,
    pub planner: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DatasetTuple {
    pub id: String,
    pub domain_name: String,
    pub domain_text: String,
    pub problem_text: String,
    pub plan_text: String,
    pub encoding: Encoding,
    pub provenance: Provenance,
}

/// Hex SHA-256 over the length-prefixed texts and the encoding tag.
pub fn tuple_id(domain: &str, problem: &str, plan: &str, encoding: Encoding) -> String {
    let mut h = Sha256::new();
    for part in [domain, problem, plan, encoding.as_str()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl DatasetTuple {
    pub fn new(
        domain_name: impl Into<String>,
        domain_text: String,
        problem_text: String,
        plan_text: String,
        encoding: Encoding,
        provenance: Provenance,
    ) -> Self {
        DatasetTuple {
            id: tuple_id(&domain_text, &problem_text, &plan_text, encoding),
            domain_name: domain_name.into(),
            domain_text,
            problem_text,
            plan_text,
            encoding,
            provenance,
        }
    }

    pub fn expected_id(&self) -> String {
        tuple_id(
            &self.domain_text,
            &self.problem_text,
            &self.plan_text,
            self.encoding,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Ratios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, DatasetError> {
        let r = Ratios {
            train,
            validation,
            test,
        };
        let parts = r.as_array();
        if !parts.iter().all(|x| x.is_finite() && *x >= 0.0)
            || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-6
        {
            return Err(DatasetError::InvalidRatios(format!(
                "{train}, {validation}, {test} do not form proportions summing to 1"
            )));
        }
        Ok(r)
    }

    /// Parses `0.8,0.2` or `0.8,0.1,0.1`.
    pub fn parse(s: &str) -> Result<Self, DatasetError> {
        let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        match parts.as_deref() {
            Ok([a, b]) => Ratios::new(*a, *b, 0.0),
            Ok([a, b, c]) => Ratios::new(*a, *b, *c),
            _ => Err(DatasetError::InvalidRatios(format!(
                "expected two or three comma-separated numbers, got `{s}`"
            ))),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

/// Sizes for `n` items by largest remainder; ties go to the earlier split.
pub fn split_sizes(n: usize, ratios: &Ratios) -> [usize; 3] {
    let quotas = ratios.as_array().map(|r| n as f64 * r);
    let mut sizes = quotas.map(|q| q.floor() as usize);
    let assigned: usize = sizes.iter().sum();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &k in order.iter().take(n.saturating_sub(assigned)) {
        sizes[k] += 1;
    }
    sizes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupEntry {
    pub id: String,
    /// Input positions of the kept tuple and of the dropped copy.
    pub kept: usize,
    pub dropped: usize,
}

impl fmt::Display for DedupEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} input #{} duplicates input #{}",
            self.id, self.dropped, self.kept
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DatasetSplits {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
    pub ratios: Ratios,
    pub seed: u64,
    /// Domain → `[train, validation, test]` tuple counts.
    pub per_domain_counts: BTreeMap<String, [usize; 3]>,
    pub dedup_log: Vec<DedupEntry>,
}

impl DatasetSplits {
    pub fn splits(&self) -> [(&'static str, &Vec<String>); 3] {
        [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ]
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("no tuples to assemble")]
    EmptyInput,
    #[error("invalid ratios: {0}")]
    InvalidRatios(String),
    #[error("domain `{domain}` has {tuples} unique tuple(s) for {splits} non-empty splits")]
    DegenerateSplit {
        domain: String,
        tuples: usize,
        splits: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Json { path: String, msg: String },
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
    #[error("token limit must be positive")]
    InvalidLimit,
}

/// Removes duplicate ids (first occurrence wins), then shuffles each domain
/// with its own seeded stream and cuts it by `ratios`. The per-split lists
/// get a final seeded shuffle so domains are interleaved.
pub fn assemble(
    tuples: &[DatasetTuple],
    ratios: Ratios,
    seed: u64,
) -> Result<DatasetSplits, DatasetError> {
    if tuples.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let ratios = Ratios::new(ratios.train, ratios.validation, ratios.test)?;
    let mut first: HashMap<&str, usize> = HashMap::new();
    let mut dedup_log = Vec::new();
    let mut by_domain: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (i, t) in tuples.iter().enumerate() {
        match first.get(t.id.as_str()) {
            Some(&kept) => dedup_log.push(DedupEntry {
                id: t.id.clone(),
                kept,
                dropped: i,
            }),
            None => {
                first.insert(&t.id, i);
                by_domain.entry(&t.domain_name).or_default().push(&t.id);
            }
        }
    }

    let active = ratios.as_array().iter().filter(|r| **r > 0.0).count();
    let mut out: [Vec<String>; 3] = Default::default();
    let mut per_domain_counts = BTreeMap::new();
    for (domain, mut ids) in by_domain {
        if ids.len() < active {
            return Err(DatasetError::DegenerateSplit {
                domain: domain.into(),
                tuples: ids.len(),
                splits: active,
            });
        }
        ids.shuffle(&mut seed::rng(seed::derive_str(seed, domain)));
        let sizes = split_sizes(ids.len(), &ratios);
        let mut rest = &ids[..];
        for (k, &n) in sizes.iter().enumerate() {
            let (head, tail) = rest.split_at(n);
            out[k].extend(head.iter().map(|s| s.to_string()));
            rest = tail;
        }
        per_domain_counts.insert(domain.to_string(), sizes);
    }
    for (k, label) in ["train", "validation", "test"].iter().enumerate() {
        out[k].shuffle(&mut seed::rng(seed::derive_str(seed, label)));
    }
    let [train, validation, test] = out;
    Ok(DatasetSplits {
        train,
        validation,
        test,
        ratios,
        seed,
        per_domain_counts,
        dedup_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tuple(domain: &str, k: usize) -> DatasetTuple {
        DatasetTuple::new(
            domain,
            format!("(define (domain {domain}))"),
            format!("problem {k}"),
            format!("plan {k}"),
            Encoding::Standard,
            Provenance::default(),
        )
    }

    #[test]
    fn eighty_twenty() {
        let ts: Vec<_> = (0..10).map(|k| tuple("d", k)).collect();
        let s = assemble(&ts, Ratios::new(0.8, 0.2, 0.0).unwrap(), 1).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (8, 2, 0));
    }

    #[test]
    fn duplicates_are_logged() {
        let mut ts: Vec<_> = (0..9).map(|k| tuple("d", k)).collect();
        ts.push(ts[3].clone());
        let s = assemble(&ts, Ratios::new(0.8, 0.2, 0.0).unwrap(), 1).unwrap();
        assert_eq!(s.len(), 9);
        assert_eq!(
            s.dedup_log,
            vec![DedupEntry {
                id: ts[3].id.clone(),
                kept: 3,
                dropped: 9
            }]
        );
    }

    #[test]
    fn degenerate_and_bad_ratios() {
        let ts = vec![tuple("d", 0), tuple("d", 1)];
        assert!(matches!(
            assemble(&ts, Ratios::new(0.5, 0.25, 0.25).unwrap(), 0),
            Err(DatasetError::DegenerateSplit {
                tuples: 2,
                splits: 3,
                ..
            })
        ));
        assert!(Ratios::parse("0.7,0.2").is_err());
        assert!(Ratios::parse("0.8,0.2").is_ok());
    }

    #[test]
    fn largest_remainder() {
        let r = Ratios::new(0.8, 0.1, 0.1).unwrap();
        assert_eq!(split_sizes(10, &r), [8, 1, 1]);
        assert_eq!(split_sizes(7, &r), [5, 1, 1]);
        assert_eq!(
            split_sizes(4000, &Ratios::new(0.8, 0.2, 0.0).unwrap()),
            [3200, 800, 0]
        );
    }
}
