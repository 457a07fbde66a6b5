//! Private-money elicitation.
//!
//! Instead of `n(n − 1)/2` pairwise judgments, a decision-maker prices every
//! item against a private unit of account. The `n` prices determine the whole
//! matrix through transitivity, so the result is perfectly consistent by
//! construction. Panels of decision-makers are combined by a weighted
//! geometric mean, which is the averaging that preserves transitivity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComparisonMatrix, Normalization, PriorityVector};
use crate::priority::{deviation_matrix, llsm_log_weights};

/// Prices of each item in units of a private coin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CoinVector {
    prices: Vec<f64>,
}

impl CoinVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::DimensionTooSmall {
                min: 2,
                found: prices.len(),
            });
        }
        for (index, &value) in prices.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(CoinVector { prices })
    }

    pub fn n(&self) -> usize {
        self.prices.len()
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn weights(&self) -> PriorityVector {
        PriorityVector::normalize_unchecked(self.prices.clone(), Normalization::SumOne)
    }
}

impl TryFrom<Vec<f64>> for CoinVector {
    type Error = Error;

    fn try_from(prices: Vec<f64>) -> Result<Self> {
        CoinVector::new(prices)
    }
}

impl From<CoinVector> for Vec<f64> {
    fn from(c: CoinVector) -> Self {
        c.prices
    }
}

/// Importance of each decision-maker; nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PanelWeights {
    importance: Vec<f64>,
}

impl PanelWeights {
    pub fn new(importance: Vec<f64>) -> Result<Self> {
        let sum: f64 = importance.iter().sum();
        let valid = importance.iter().all(|a| a.is_finite() && *a >= 0.0);
        if importance.is_empty() || !valid || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Importance { sum });
        }
        Ok(PanelWeights { importance })
    }

    /// Equal importance `1/m` for every member.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Importance { sum: 0.0 });
        }
        Ok(PanelWeights {
            importance: vec![1.0 / m as f64; m],
        })
    }

    pub fn m(&self) -> usize {
        self.importance.len()
    }

    pub fn importance(&self) -> &[f64] {
        &self.importance
    }
}

impl TryFrom<Vec<f64>> for PanelWeights {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        PanelWeights::new(v)
    }
}

impl From<PanelWeights> for Vec<f64> {
    fn from(p: PanelWeights) -> Self {
        p.importance
    }
}

/// Wire form of a panel: `{"importance": [...], "vectors": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub importance: PanelWeights,
    pub vectors: Vec<CoinVector>,
}

impl Panel {
    pub fn aggregate(&self) -> Result<CoinVector> {
        aggregate_panel(&self.vectors, &self.importance)
    }
}

/// `u[ν][μ] = c[ν] / c[μ]`: transitive and reciprocal, with `n` inputs
/// standing in for `n(n − 1)/2` judgments.
pub fn coin_to_matrix(coin: &CoinVector) -> ComparisonMatrix {
    ComparisonMatrix::from_ratios(&coin.prices)
}

/// Component-wise weighted geometric mean `exp(Σ_i a_i ln c_i[ν])`.
///
/// Members with zero importance are ignored.
pub fn aggregate_panel(vectors: &[CoinVector], panel: &PanelWeights) -> Result<CoinVector> {
    if vectors.len() != panel.m() {
        return Err(Error::DimensionMismatch {
            expected: panel.m(),
            found: vectors.len(),
        });
    }
    let n = vectors[0].n();
    if let Some(bad) = vectors.iter().find(|v| v.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.n(),
        });
    }
    let prices = (0..n)
        .map(|nu| {
            vectors
                .iter()
                .zip(panel.importance())
                .filter(|(_, &a)| a > 0.0)
                .map(|(v, &a)| a * v.prices[nu].ln())
                .sum::<f64>()
                .exp()
        })
        .collect();
    CoinVector::new(prices)
}

/// Distributive synthesis of a two-level hierarchy:
/// `global[j] = Σ_k criteria[k] · alternatives[k][j]`.
pub fn synthesize_hierarchy(
    criteria: &PriorityVector,
    alternatives: &[PriorityVector],
) -> Result<PriorityVector> {
    let require_sum_one = |w: &PriorityVector| {
        if w.normalization() != Normalization::SumOne {
            return Err(Error::Normalization {
                expected: "SUM_ONE",
                deviation: w.as_slice().iter().sum::<f64>() - 1.0,
            });
        }
        Ok(())
    };
    require_sum_one(criteria)?;
    if alternatives.len() != criteria.n() {
        return Err(Error::DimensionMismatch {
            expected: criteria.n(),
            found: alternatives.len(),
        });
    }
    let n = alternatives[0].n();
    for alt in alternatives {
        require_sum_one(alt)?;
        if alt.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: alt.n(),
            });
        }
    }
    let global = (0..n)
        .map(|j| {
            criteria
                .as_slice()
                .iter()
                .zip(alternatives)
                .map(|(c, alt)| c * alt.as_slice()[j])
                .sum::<f64>()
        })
        .collect();
    PriorityVector::sum_one(global)
}

/// The comparison worth reconsidering first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RevisionHint {
    Revise {
        row: usize,
        col: usize,
        current_value: f64,
        suggested_value: f64,
        residual: f64,
    },
    /// The matrix is already transitive.
    NothingToRevise,
}

/// Residuals closer than this to the maximum count as ties.
const HINT_TIE_EPS: f64 = 1e-12;
/// Below this largest residual the matrix is treated as transitive.
const HINT_ZERO_EPS: f64 = 1e-9;

/// Picks the entry with the largest log residual and suggests its
/// nearest-transitive value. Ties go to the smallest `(row, col)`.
pub fn revision_hint(m: &ComparisonMatrix) -> RevisionHint {
    let dev = deviation_matrix(m);
    let mut best: Option<(usize, usize, f64)> = None;
    for row in 0..m.n() {
        for col in 0..m.n() {
            if row == col {
                continue;
            }
            let r = dev.get(row, col).abs();
            if best.is_none_or(|(_, _, b)| r > b + HINT_TIE_EPS) {
                best = Some((row, col, r));
            }
        }
    }
    let (row, col, residual) = best.expect("n >= 2");
    if residual <= HINT_ZERO_EPS {
        return RevisionHint::NothingToRevise;
    }
    let x = llsm_log_weights(m);
    RevisionHint::Revise {
        row,
        col,
        current_value: m.get(row, col),
        suggested_value: (x[row] - x[col]).exp(),
        residual: dev.get(row, col),
    }
}
