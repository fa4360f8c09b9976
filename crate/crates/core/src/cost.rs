//! Total-cost model for planner-based supervised training versus
//! verifier-reward training, under user-supplied per-instance cost
//! functions.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

/// `coef * x^x * y^y * log2(x)^log_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coef: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub log_x: f64,
}

/// A cost function of one or two arguments. One-argument functions ignore
/// `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostExpr {
    Constant(f64),
    Poly {
        poly: Vec<Monomial>,
    },
    /// Piecewise-linear in `x` through the given points, clamped at both ends.
    Table {
        table: Vec<[f64; 2]>,
    },
}

impl Default for CostExpr {
    fn default() -> Self {
        CostExpr::Constant(1.0)
    }
}

impl CostExpr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            CostExpr::Constant(c) => *c,
            CostExpr::Poly { poly } => poly
                .iter()
                .map(|m| {
                    let mut v = m.coef * x.powf(m.x) * y.powf(m.y);
                    if m.log_x != 0.0 {
                        v *= x.max(1.0).log2().powf(m.log_x);
                    }
                    v
                })
                .sum(),
            CostExpr::Table { table } => {
                let Some(first) = table.first() else {
                    return 0.0;
                };
                if x <= first[0] {
                    return first[1];
                }
                for w in table.windows(2) {
                    let ([x0, y0], [x1, y1]) = (w[0], w[1]);
                    if x <= x1 {
                        return if x1 == x0 {
                            y1
                        } else {
                            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                        };
                    }
                }
                table.last().unwrap()[1]
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CostFunctions {
    /// `C_planner(n)`
    #[serde(default)]
    pub planner: Option<CostExpr>,
    /// `C_generation(n)`
    #[serde(default)]
    pub generation: Option<CostExpr>,
    /// `C_validation(n, L)`
    #[serde(default)]
    pub validation: Option<CostExpr>,
    /// `C_lm(P, T)`
    #[serde(default)]
    pub language_model: Option<CostExpr>,
    /// `C_update(P, T)`
    #[serde(default)]
    pub update: Option<CostExpr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CostParams {
    /// Instance sizes `n_i`; their count is `N`.
    pub sizes: Vec<f64>,
    /// Plan lengths `L_i`.
    pub plan_lengths: Vec<f64>,
    /// Token totals `T_i`.
    pub tokens: Vec<f64>,
    pub epochs: u64,
    #[serde(default = "one")]
    pub rollouts: u64,
    /// Model size `P`, passed through to the model cost functions.
    #[serde(default)]
    pub parameters: f64,
    #[serde(default)]
    pub costs: CostFunctions,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CostError {
    #[error("invalid cost parameters: {0}")]
    Invalid(String),
    #[error("cost function {function} is negative or not finite ({value}) at instance {index}")]
    BadCost {
        function: &'static str,
        index: usize,
        value: f64,
    },
    #[error("parameter sets describe {0} and {1} instances")]
    IncompatibleParams(usize, usize),
}

impl CostParams {
    /// `N` instances, all sequences set to `size`, `len` and `tokens`.
    pub fn uniform(n: usize, size: f64, len: f64, tokens: f64, epochs: u64, rollouts: u64) -> Self {
        CostParams {
            sizes: vec![size; n],
            plan_lengths: vec![len; n],
            tokens: vec![tokens; n],
            epochs,
            rollouts,
            parameters: 1.0,
            costs: CostFunctions::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    fn cost(&self, which: &'static str) -> CostExpr {
        let c = match which {
            "planner" => &self.costs.planner,
            "generation" => &self.costs.generation,
            "validation" => &self.costs.validation,
            "language-model" => &self.costs.language_model,
            _ => &self.costs.update,
        };
        c.clone().unwrap_or_default()
    }

    /// Names of cost functions that fall back to unit cost.
    pub fn defaulted(&self) -> Vec<&'static str> {
        let c = &self.costs;
        [
            ("planner", c.planner.is_none()),
            ("generation", c.generation.is_none()),
            ("validation", c.validation.is_none()),
            ("language-model", c.language_model.is_none()),
            ("update", c.update.is_none()),
        ]
        .into_iter()
        .filter(|(_, d)| *d)
        .map(|(n, _)| n)
        .collect()
    }

    pub fn validate(&self) -> Result<(), CostError> {
        let n = self.n();
        if n == 0 {
            return Err(CostError::Invalid(
                "at least one instance is required".into(),
            ));
        }
        if self.plan_lengths.len() != n || self.tokens.len() != n {
            return Err(CostError::Invalid(format!(
                "sizes, plan-lengths and tokens have lengths {n}, {}, {}",
                self.plan_lengths.len(),
                self.tokens.len()
            )));
        }
        let all = self
            .sizes
            .iter()
            .chain(&self.plan_lengths)
            .chain(&self.tokens);
        if !all
            .chain([&self.parameters])
            .all(|v| v.is_finite() && *v >= 0.0)
        {
            return Err(CostError::Invalid(
                "sizes, lengths, tokens and P must be finite and >= 0".into(),
            ));
        }
        for i in 0..n {
            let vals = [
                ("planner", self.cost("planner").eval(self.sizes[i], 0.0)),
                (
                    "generation",
                    self.cost("generation").eval(self.sizes[i], 0.0),
                ),
                (
                    "validation",
                    self.cost("validation")
                        .eval(self.sizes[i], self.plan_lengths[i]),
                ),
                (
                    "language-model",
                    self.cost("language-model")
                        .eval(self.parameters, self.tokens[i]),
                ),
                (
                    "update",
                    self.cost("update").eval(self.parameters, self.tokens[i]),
                ),
            ];
            for (function, value) in vals {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(CostError::BadCost {
                        function,
                        index: i,
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    fn sum(&self, which: &'static str) -> f64 {
        let f = self.cost(which);
        (0..self.n())
            .map(|i| match which {
                "planner" | "generation" => f.eval(self.sizes[i], 0.0),
                "validation" => f.eval(self.sizes[i], self.plan_lengths[i]),
                _ => f.eval(self.parameters, self.tokens[i]),
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub model: String,
    pub data_generation: f64,
    pub training: f64,
    pub total: f64,
    /// Component sums already multiplied by their epoch/rollout factors.
    pub items: BTreeMap<String, f64>,
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} model", self.model)?;
        for (k, v) in &self.items {
            writeln!(f, "  {k:<16} {v:>16.4}")?;
        }
        writeln!(
            f,
            "  {:<16} {:>16.4}",
            "data-generation", self.data_generation
        )?;
        writeln!(f, "  {:<16} {:>16.4}", "training", self.training)?;
        write!(f, "  {:<16} {:>16.4}", "total", self.total)
    }
}

/// Data: `sum(C_gen + C_planner)`. Training: `E * sum(C_lm + C_update)`.
pub fn planner_total(p: &CostParams) -> Result<CostReport, CostError> {
    p.validate()?;
    let e = p.epochs as f64;
    let items = BTreeMap::from([
        ("generation".to_string(), p.sum("generation")),
        ("planner".to_string(), p.sum("planner")),
        ("language-model".to_string(), e * p.sum("language-model")),
        ("update".to_string(), e * p.sum("update")),
    ]);
    let data_generation = items["generation"] + items["planner"];
    let training = items["language-model"] + items["update"];
    Ok(CostReport {
        model: "planner-based".into(),
        data_generation,
        training,
        total: data_generation + training,
        items,
    })
}

/// Data: `sum(C_gen)`. Training: `E * G * sum(C_lm + C_val + C_update)`.
pub fn rl_total(p: &CostParams) -> Result<CostReport, CostError> {
    p.validate()?;
    let eg = p.epochs as f64 * p.rollouts as f64;
    let items = BTreeMap::from([
        ("generation".to_string(), p.sum("generation")),
        ("language-model".to_string(), eg * p.sum("language-model")),
        ("validation".to_string(), eg * p.sum("validation")),
        ("update".to_string(), eg * p.sum("update")),
    ]);
    let data_generation = items["generation"];
    let training = items["language-model"] + items["validation"] + items["update"];
    Ok(CostReport {
        model: "verifier-reward".into(),
        data_generation,
        training,
        total: data_generation + training,
        items,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cheaper {
    PlannerBased,
    VerifierReward,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub planner: CostReport,
    pub rl: CostReport,
    /// `rl.total - planner.total`
    pub delta: f64,
    pub cheaper: Cheaper,
    /// Smallest epoch count at which the verifier-reward total exceeds the
    /// planner-based total, scanning `0..=e_max`.
    pub break_even_epochs: Option<u64>,
    pub narrative: String,
}

pub const DEFAULT_E_MAX: u64 = 10_000;

pub fn compare(planner: &CostParams, rl: &CostParams, e_max: u64) -> Result<Comparison, CostError> {
    if planner.n() != rl.n() {
        return Err(CostError::IncompatibleParams(planner.n(), rl.n()));
    }
    let a = planner_total(planner)?;
    let b = rl_total(rl)?;
    let delta = b.total - a.total;
    let cheaper = if delta < 0.0 {
        Cheaper::VerifierReward
    } else if delta > 0.0 {
        Cheaper::PlannerBased
    } else {
        Cheaper::Equal
    };
    // both totals are affine in E, so evaluate them from their E=1 slopes
    let slope = |p: &CostParams, f: fn(&CostParams) -> Result<CostReport, CostError>| {
        let one = CostParams {
            epochs: 1,
            ..p.clone()
        };
        f(&one).map(|r| (r.data_generation, r.training))
    };
    let (pa, pb) = slope(planner, planner_total)?;
    let (ra, rb) = slope(rl, rl_total)?;
    let break_even_epochs = (0..=e_max).find(|&e| ra + e as f64 * rb > pa + e as f64 * pb);

    let mut narrative = String::new();
    match cheaper {
        Cheaper::VerifierReward => write!(
            narrative,
            "verifier-reward training is cheaper by {:.4}: it removes {:.4} of up-front planner cost and \
             shifts computation from dataset generation to training time ({:.4} more training)",
            -delta,
            a.items["planner"],
            b.training - a.training
        ),
        Cheaper::PlannerBased => write!(
            narrative,
            "planner-based training is cheaper by {delta:.4}: the extra training cost of sampling and \
             verifying rollouts ({:.4}) outweighs the saved planner cost ({:.4})",
            b.training - a.training,
            a.items["planner"]
        ),
        Cheaper::Equal => write!(narrative, "both approaches cost the same"),
    }
    .unwrap();
    match break_even_epochs {
        Some(e) => write!(
            narrative,
            "; verifier-reward becomes more expensive from E = {e}"
        ),
        None => write!(narrative, "; no break-even within E <= {e_max}"),
    }
    .unwrap();

    Ok(Comparison {
        planner: a,
        rl: b,
        delta,
        cheaper,
        break_even_epochs,
        narrative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_costs() {
        let p = CostParams::uniform(1, 1.0, 1.0, 1.0, 1, 3);
        let a = planner_total(&p).unwrap();
        assert_eq!((a.data_generation, a.training, a.total), (2.0, 2.0, 4.0));
        let b = rl_total(&p).unwrap();
        assert_eq!((b.data_generation, b.training, b.total), (1.0, 9.0, 10.0));
        let zero = CostParams {
            epochs: 0,
            ..p.clone()
        };
        assert_eq!(planner_total(&zero).unwrap().total, 2.0);
    }

    #[test]
    fn expressions() {
        let e: CostExpr =
            serde_json::from_str(r#"{"poly": [{"coef": 2, "x": 2}, {"coef": 1, "y": 1}]}"#)
                .unwrap();
        assert_eq!(e.eval(3.0, 5.0), 23.0);
        let t: CostExpr = serde_json::from_str(r#"{"table": [[0, 0], [10, 100]]}"#).unwrap();
        assert_eq!(t.eval(5.0, 0.0), 50.0);
        assert_eq!(t.eval(20.0, 0.0), 100.0);
        assert_eq!(
            serde_json::from_str::<CostExpr>("7")
                .unwrap()
                .eval(1.0, 1.0),
            7.0
        );
    }

    #[test]
    fn negative_costs_and_shape_errors() {
        let mut p = CostParams::uniform(2, 1.0, 1.0, 1.0, 1, 1);
        p.costs.planner = Some(CostExpr::Constant(-1.0));
        assert!(matches!(
            planner_total(&p),
            Err(CostError::BadCost {
                function: "planner",
                ..
            })
        ));
        let mut q = CostParams::uniform(2, 1.0, 1.0, 1.0, 1, 1);
        q.tokens.pop();
        assert!(matches!(rl_total(&q), Err(CostError::Invalid(_))));
        let r = CostParams::uniform(3, 1.0, 1.0, 1.0, 1, 1);
        assert!(matches!(
            compare(&q, &r, 10),
            Err(CostError::IncompatibleParams(2, 3))
        ));
    }
}
