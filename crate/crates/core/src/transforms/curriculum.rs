use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed;

/// One position of the expanded training stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumItem {
    /// 1-based position `i`.
    pub index: u64,
    pub source_id: String,
    pub anonymize: bool,
    /// `p(i)` as the exact fraction `(i - 1) / (n - 1)`.
    pub numerator: u64,
    pub denominator: u64,
}

impl CurriculumItem {
    pub fn probability(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.numerator as f64 / self.denominator as f64
        }
    }
}

/// Exact Bernoulli(`(i-1)/(n-1)`) draw from a counter-based stream: the
/// outcome for index `i` depends only on `(seed, i)`.
pub fn anonymize_draw(seed: u64, i: u64, n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let r = seed::derive(seed, &[i]) as u128;
    r * u128::from(n - 1) < u128::from(i - 1) << 64
}

/// Stacks `tuple_ids` `copies` times and attaches the linear anonymization
/// schedule. With `shuffle` the stacked list is permuted (seeded) before the
/// schedule is applied.
pub fn curriculum_expand(
    tuple_ids: &[String],
    copies: usize,
    seed: u64,
    shuffle: bool,
) -> Vec<CurriculumItem> {
    let mut stacked: Vec<&String> = (0..copies).flat_map(|_| tuple_ids.iter()).collect();
    if shuffle {
        stacked.shuffle(&mut seed::rng(seed::derive_str(seed, "curriculum-shuffle")));
    }
    let n = stacked.len() as u64;
    let draw_seed = seed::derive_str(seed, "curriculum-draw");
    stacked
        .into_iter()
        .enumerate()
        .map(|(k, id)| {
            let i = k as u64 + 1;
            CurriculumItem {
                index: i,
                source_id: id.clone(),
                anonymize: anonymize_draw(draw_seed, i, n),
                numerator: if n < 2 { 0 } else { i - 1 },
                denominator: n.saturating_sub(1),
            }
        })
        .collect()
}
