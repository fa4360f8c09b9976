use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DatasetError, DatasetTuple};

/// Pluggable token counting. The id is recorded with every statistic so
/// counts from different counters are never mixed up.
pub trait TokenCounter: Sync {
    fn id(&self) -> &str;
    fn count(&self, text: &str) -> usize;
}

/// Whitespace-delimited tokens.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceCounter;

impl TokenCounter for WhitespaceCounter {
    fn id(&self) -> &str {
        "whitespace"
    }

    fn count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainTokens {
    pub tuples: usize,
    pub over_limit: usize,
    pub longest: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStats {
    pub per_domain: BTreeMap<String, DomainTokens>,
    pub limit: usize,
    pub counter: String,
}

/// Per-domain count of tuples whose domain + problem + plan token total
/// exceeds `limit`, and the longest such total.
pub fn token_stats(
    tuples: &[DatasetTuple],
    limit: usize,
    counter: &dyn TokenCounter,
) -> Result<TokenStats, DatasetError> {
    if limit == 0 {
        return Err(DatasetError::InvalidLimit);
    }
    let totals = crate::par_map(tuples, |t| {
        counter.count(&t.domain_text) + counter.count(&t.problem_text) + counter.count(&t.plan_text)
    });
    let mut per_domain: BTreeMap<String, DomainTokens> = BTreeMap::new();
    for (t, n) in tuples.iter().zip(totals) {
        let e = per_domain.entry(t.domain_name.clone()).or_default();
        e.tuples += 1;
        e.longest = e.longest.max(n);
        if n > limit {
            e.over_limit += 1;
        }
    }
    Ok(TokenStats {
        per_domain,
        limit,
        counter: counter.id().to_string(),
    })
}
