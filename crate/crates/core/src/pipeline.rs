//! End-to-end dataset build: generate and solve problems per source, render
//! tuples in the requested encoding, assemble splits, optionally expand the
//! training split with the curriculum schedule, and write everything out.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{
    self, assemble, token_stats, DatasetError, DatasetTuple, Encoding, Provenance, Ratios,
    TokenStats, WhitespaceCounter,
};
use crate::dpgc::{self, DpgcConfig, GenerateError, Solver};
use crate::pddl::{
    parse_domain, parse_plan, parse_problem, render_domain, render_plan, render_problem, Domain,
    ParseError, Problem, TimedPlan,
};
use crate::planner::SearchConfig;
use crate::transforms::{self, anonymize_tuple, curriculum_expand, decode_plan, encode_plan};
use crate::validator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Source {
    /// Paths are relative to the config file.
    pub domain: String,
    pub dpgc: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CurriculumConfig {
    pub copies: usize,
    #[serde(default)]
    pub shuffle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PipelineConfig {
    pub sources: Vec<Source>,
    #[serde(default)]
    pub seed: u64,
    /// `[train, validation, test]`.
    #[serde(default = "default_ratios")]
    pub ratios: [f64; 3],
    #[serde(default)]
    pub planner: SearchConfig,
    #[serde(default = "default_encoding")]
    pub encoding: Encoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curriculum: Option<CurriculumConfig>,
    #[serde(default = "default_limit")]
    pub token_limit: usize,
    /// Extra generation slots tried per requested tuple when topping up
    /// after duplicates.
    #[serde(default = "default_top_up")]
    pub top_up_factor: usize,
}

fn default_ratios() -> [f64; 3] {
    [0.8, 0.2, 0.0]
}

fn default_encoding() -> Encoding {
    Encoding::Standard
}

fn default_limit() -> usize {
    4096
}

fn default_top_up() -> usize {
    10
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error("read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("load {path}: {msg}")]
    Load { path: String, msg: String },
    #[error("generate ({source_name}): {error}")]
    Generate {
        source_name: String,
        #[source]
        error: GenerateError,
    },
    #[error("generate ({source_name}): only {found} unique tuples after {slots} slots, {wanted} requested")]
    NotEnoughUnique {
        source_name: String,
        found: usize,
        wanted: usize,
        slots: usize,
    },
    #[error("transform: {0}")]
    Transform(String),
    #[error("check: {0}")]
    Check(String),
    #[error("assemble: {0}")]
    Assemble(#[source] DatasetError),
    #[error("write: {0}")]
    Write(#[source] DatasetError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceReport {
    pub domain: String,
    pub tuples: usize,
    pub slots: usize,
    pub rejected_draws: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub sources: Vec<SourceReport>,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    pub valid_plans: usize,
    pub tokens: TokenStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curriculum_anonymized: Option<usize>,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let cfg: PipelineConfig =
            serde_json::from_str(text).map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidConfig(m));
        if self.sources.is_empty() {
            return bad("no sources".into());
        }
        if let Some(s) = self.sources.iter().find(|s| s.count == 0) {
            return bad(format!("source {} has count 0", s.domain));
        }
        let [a, b, c] = self.ratios;
        Ratios::new(a, b, c).map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
        if self.token_limit == 0 {
            return bad("token-limit must be positive".into());
        }
        if let Some(cur) = &self.curriculum {
            if cur.copies == 0 {
                return bad("curriculum copies must be at least 1".into());
            }
            if self.encoding.is_anonymized() {
                return bad("curriculum needs a non-anonymized base encoding".into());
            }
        }
        Ok(())
    }
}

fn load(base: &Path, rel: &str) -> Result<String, PipelineError> {
    let path = base.join(rel);
    std::fs::read_to_string(&path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn planner_id(cfg: &SearchConfig) -> String {
    let strategy = serde_json::to_value(cfg.strategy).unwrap();
    format!("internal:{}", strategy.as_str().unwrap_or("search"))
}

/// Renders one solved instance in the given encoding.
pub fn make_tuple(
    domain: &Domain,
    problem: &Problem,
    plan: &TimedPlan,
    encoding: Encoding,
    provenance: Provenance,
) -> Result<DatasetTuple, transforms::InconsistentTuple> {
    let name = domain.name.to_string();
    let (d, p, pl) = if encoding.is_anonymized() {
        let (d, p, pl, _) = anonymize_tuple(domain, problem, plan, provenance.seed)?;
        (d, p, pl)
    } else {
        (domain.clone(), problem.clone(), plan.clone())
    };
    let plan_text = if encoding.is_compact() {
        encode_plan(&pl)
    } else {
        render_plan(&pl)
    };
    Ok(DatasetTuple::new(
        name,
        render_domain(&d),
        render_problem(&p),
        plan_text,
        encoding,
        provenance,
    ))
}

/// Parses a tuple's texts back into structures, decoding compact plans.
pub fn parse_tuple(t: &DatasetTuple) -> Result<(Domain, Problem, TimedPlan), String> {
    let d = parse_domain(&t.domain_text).map_err(|e: ParseError| e.to_string())?;
    let p = parse_problem(&t.problem_text, &d).map_err(|e| e.to_string())?;
    let text = if t.encoding.is_compact() {
        decode_plan(&t.plan_text).map_err(|e| e.to_string())?
    } else {
        t.plan_text.clone()
    };
    let plan = parse_plan(&text).map_err(|e| e.to_string())?;
    Ok((d, p, plan))
}

fn generate_source(
    cfg: &PipelineConfig,
    base: &Path,
    index: usize,
    src: &Source,
) -> Result<(Vec<DatasetTuple>, SourceReport), PipelineError> {
    let domain = parse_domain(&load(base, &src.domain)?).map_err(|e| PipelineError::Load {
        path: src.domain.clone(),
        msg: e.to_string(),
    })?;
    let dpgc = DpgcConfig::from_json(&load(base, &src.dpgc)?).map_err(|e| PipelineError::Load {
        path: src.dpgc.clone(),
        msg: e.to_string(),
    })?;
    let source_name = domain.name.to_string();
    let seed = crate::seed::derive(cfg.seed, &[index as u64]);
    let solver = Solver::Internal(cfg.planner.clone());
    let planner = planner_id(&cfg.planner);
    let gen_err = |error| PipelineError::Generate {
        source_name: source_name.clone(),
        error,
    };

    let mut tuples = Vec::new();
    let mut seen = HashSet::new();
    let mut next = 0;
    let mut rejected = 0;
    let mut duplicates = 0;
    let max_slots = src.count * cfg.top_up_factor.max(1);
    while tuples.len() < src.count && next < max_slots {
        let want = (src.count - tuples.len()).min(max_slots - next);
        let batch = dpgc::generate_slots(&domain, &dpgc, next..next + want, seed, &solver)
            .map_err(gen_err)?;
        next += want;
        rejected += batch.rejected;
        for item in batch.items {
            let Some(plan) = item.plan.plan() else {
                continue;
            };
            let provenance = Provenance {
                dpgc: src.dpgc.clone(),
                seed: item.seed,
                planner: planner.clone(),
            };
            let t = make_tuple(&domain, &item.problem, plan, cfg.encoding, provenance)
                .map_err(|e| PipelineError::Transform(e.to_string()))?;
            if seen.insert(t.id.clone()) {
                tuples.push(t);
            } else {
                duplicates += 1;
            }
        }
    }
    if tuples.len() < src.count {
        return Err(PipelineError::NotEnoughUnique {
            source_name,
            found: tuples.len(),
            wanted: src.count,
            slots: next,
        });
    }
    let report = SourceReport {
        domain: source_name,
        tuples: tuples.len(),
        slots: next,
        rejected_draws: rejected,
        duplicates,
    };
    Ok((tuples, report))
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct CurriculumLine<'a> {
    index: u64,
    source_id: &'a str,
    anonymize: bool,
    probability: [u64; 2],
    tuple: DatasetTuple,
}

/// Runs the whole build and writes the dataset directory atomically.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    base: &Path,
    out: &Path,
) -> Result<PipelineReport, PipelineError> {
    cfg.check()?;
    let mut all = Vec::new();
    let mut sources = Vec::new();
    for (i, src) in cfg.sources.iter().enumerate() {
        let (tuples, report) = generate_source(cfg, base, i, src)?;
        log::info!(
            "{}: {} tuples from {} slots ({} rejected draws, {} duplicates)",
            report.domain,
            report.tuples,
            report.slots,
            report.rejected_draws,
            report.duplicates
        );
        all.extend(tuples);
        sources.push(report);
    }

    // every stored plan must validate
    let checks = crate::par_map(&all, |t| {
        let (d, p, plan) = parse_tuple(t)?;
        let r = validator::validate_plan(&d, &p, &plan).map_err(|e| e.to_string())?;
        if r.outcome.is_valid() {
            Ok(())
        } else {
            Err(format!("tuple {} plan is {}", t.id, r.outcome))
        }
    });
    if let Some(Err(e)) = checks.iter().find(|c| c.is_err()) {
        return Err(PipelineError::Check(e.clone()));
    }
    let valid_plans = checks.len();

    let [a, b, c] = cfg.ratios;
    let ratios = Ratios::new(a, b, c).map_err(PipelineError::Assemble)?;
    let splits = assemble(&all, ratios, cfg.seed).map_err(PipelineError::Assemble)?;
    let tokens =
        token_stats(&all, cfg.token_limit, &WhitespaceCounter).map_err(PipelineError::Assemble)?;

    let mut extra: Vec<(&str, String)> = Vec::new();
    let mut curriculum_anonymized = None;
    if let Some(cur) = &cfg.curriculum {
        let items = curriculum_expand(&splits.train, cur.copies, cfg.seed, cur.shuffle);
        let by_id: std::collections::HashMap<&str, &DatasetTuple> =
            all.iter().map(|t| (t.id.as_str(), t)).collect();
        let anon_encoding = if cfg.encoding.is_compact() {
            Encoding::AnonymizedCompact
        } else {
            Encoding::Anonymized
        };
        let lines = crate::par_map(&items, |item| {
            let base = by_id[item.source_id.as_str()];
            let tuple = if item.anonymize {
                let (d, p, plan) = parse_tuple(base)?;
                make_tuple(&d, &p, &plan, anon_encoding, base.provenance.clone())
                    .map_err(|e| e.to_string())?
            } else {
                base.clone()
            };
            let line = CurriculumLine {
                index: item.index,
                source_id: &item.source_id,
                anonymize: item.anonymize,
                probability: [item.numerator, item.denominator],
                tuple,
            };
            Ok::<_, String>(serde_json::to_string(&line).expect("line serializes") + "\n")
        });
        let mut text = String::new();
        for l in lines {
            text.push_str(&l.map_err(PipelineError::Transform)?);
        }
        curriculum_anonymized = Some(items.iter().filter(|i| i.anonymize).count());
        extra.push(("train_curriculum.jsonl", text));
    }

    let report = PipelineReport {
        sources,
        train: splits.train.len(),
        validation: splits.validation.len(),
        test: splits.test.len(),
        valid_plans,
        tokens,
        curriculum_anonymized,
    };
    extra.push((
        "stats.json",
        serde_json::to_string_pretty(&report).expect("report serializes"),
    ));
    let effective = serde_json::to_value(cfg).expect("config serializes");
    dataset::write_dataset_with(out, &splits, &all, Some(effective), &extra)
        .map_err(PipelineError::Write)?;
    Ok(report)
}

/// Resolves a config file path into the config and its base directory.
pub fn load_config(path: &Path) -> Result<(PipelineConfig, PathBuf), PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let cfg = PipelineConfig::from_json(&text)?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((cfg, base))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ferry_config() -> (PipelineConfig, PathBuf) {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/ferry/pipeline.json");
        load_config(&path).unwrap()
    }

    #[test]
    fn ferry_end_to_end() {
        let (cfg, base) = ferry_config();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("ds");
        let report = run_pipeline(&cfg, &base, &out).unwrap();
        assert_eq!((report.train, report.validation, report.test), (40, 10, 0));
        assert_eq!(report.valid_plans, 50);
        let (splits, tuples) = dataset::read_dataset(&out).unwrap();
        assert_eq!(splits.len(), 50);
        assert_eq!(tuples.len(), 50);
        let curriculum = std::fs::read_to_string(out.join("train_curriculum.jsonl")).unwrap();
        assert_eq!(curriculum.lines().count(), 80);
        assert!(out.join("stats.json").exists());
    }

    #[test]
    fn config_errors() {
        let (mut cfg, _) = ferry_config();
        cfg.sources[0].count = 0;
        assert!(matches!(cfg.check(), Err(PipelineError::InvalidConfig(_))));
        let (mut cfg, _) = ferry_config();
        cfg.ratios = [0.5, 0.2, 0.0];
        assert!(matches!(cfg.check(), Err(PipelineError::InvalidConfig(_))));
        assert!(PipelineConfig::from_json(r#"{"sources": [], "bogus": 1}"#).is_err());
    }
}
