//! Pairwise comparison matrices and priority vectors.
//!
//! Entry `(ν, μ)` of a [`ComparisonMatrix`] is the value of item `ν` measured
//! in units of item `μ`, so a perfectly consistent matrix generated by weights
//! `w` has `u[ν][μ] = w[ν] / w[μ]`. This weight-ratio convention is used
//! everywhere in the crate.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for the structural predicates.
pub const STRUCT_EPS: f64 = 1e-9;

/// Tolerance for the normalization invariants of [`PriorityVector`].
pub const NORMALIZATION_EPS: f64 = 1e-12;

/// How the lower triangle is populated by [`ComparisonMatrix::build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Fill {
    /// Only entries above the diagonal are supplied; `u[μ][ν] = 1 / u[ν][μ]`.
    /// Pairs that are not supplied default to 1.
    Reciprocal,
    /// Every off-diagonal entry must be supplied. Allows margins where
    /// `u[ν][μ] · u[μ][ν] ≠ 1`.
    Explicit,
}

/// A validated `n × n` matrix of strictly positive judgments with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComparisonMatrix {
    entries: DMatrix<f64>,
}

/// Wire form `{"n": 3, "entries": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for ComparisonMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.entries.len() != json.n {
            return Err(Error::DimensionMismatch {
                expected: json.n,
                found: json.entries.len(),
            });
        }
        for (row, values) in json.entries.iter().enumerate() {
            if values.len() != json.n {
                return Err(Error::Malformed {
                    row,
                    message: format!("expected {} entries, found {}", json.n, values.len()),
                });
            }
        }
        ComparisonMatrix::from_rows(&json.entries)
    }
}

impl From<ComparisonMatrix> for MatrixJson {
    fn from(m: ComparisonMatrix) -> Self {
        MatrixJson {
            n: m.n(),
            entries: m.rows(),
        }
    }
}

impl ComparisonMatrix {
    /// Builds a matrix from a sparse list of `(row, col, value)` judgments
    /// using 0-based indices.
    pub fn build(n: usize, judgments: &[(usize, usize, f64)], fill: Fill) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall { min: 2, found: n });
        }
        let mut seen = DMatrix::from_element(n, n, false);
        let mut entries = DMatrix::from_element(n, n, 1.0);
        for &(row, col, value) in judgments {
            if row >= n || col >= n {
                return Err(Error::IndexOutOfRange { row, col, n });
            }
            if row == col || (fill == Fill::Reciprocal && row > col) {
                return Err(Error::NotUpperTriangle { row, col });
            }
            check_positive(row, col, value)?;
            if seen[(row, col)] {
                return Err(Error::DuplicateEntry { row, col });
            }
            seen[(row, col)] = true;
            entries[(row, col)] = value;
            if fill == Fill::Reciprocal {
                entries[(col, row)] = 1.0 / value;
            }
        }
        if fill == Fill::Explicit {
            for row in 0..n {
                for col in 0..n {
                    if row != col && !seen[(row, col)] {
                        return Err(Error::MissingEntry { row, col });
                    }
                }
            }
        }
        Ok(ComparisonMatrix { entries })
    }

    /// Builds a matrix from dense rows. The diagonal must already be 1.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall { min: 2, found: n });
        }
        for (row, values) in rows.iter().enumerate() {
            if values.len() != n {
                return Err(Error::Malformed {
                    row,
                    message: format!("expected {n} entries, found {}", values.len()),
                });
            }
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Validates an existing nalgebra matrix.
    pub fn from_dmatrix(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.ncols(),
            });
        }
        if n < 2 {
            return Err(Error::DimensionTooSmall { min: 2, found: n });
        }
        for row in 0..n {
            for col in 0..n {
                let value = entries[(row, col)];
                check_positive(row, col, value)?;
                if row == col && value != 1.0 {
                    return Err(Error::Diagonal { index: row, value });
                }
            }
        }
        Ok(ComparisonMatrix { entries })
    }

    /// The consistent matrix `u[ν][μ] = w[ν] / w[μ]`. Every weight must be
    /// strictly positive.
    pub fn from_weights(weights: &PriorityVector) -> Result<Self> {
        for (index, &value) in weights.as_slice().iter().enumerate() {
            if value <= 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(Self::from_ratios(weights.as_slice()))
    }

    /// Like [`from_weights`](Self::from_weights) for a raw positive slice.
    pub(crate) fn from_ratios(w: &[f64]) -> Self {
        let n = w.len();
        let entries = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { w[i] / w[j] });
        ComparisonMatrix { entries }
    }

    /// The consistent matrix `u[ν][μ] = exp(x[ν] − x[μ])` for log-weights `x`.
    pub(crate) fn from_log_weights(x: &[f64]) -> Self {
        let n = x.len();
        let entries = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { (x[i] - x[j]).exp() });
        ComparisonMatrix { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }

    /// Returns a copy with one off-diagonal entry replaced.
    pub fn with_entry(&self, row: usize, col: usize, value: f64) -> Result<Self> {
        let n = self.n();
        if row >= n || col >= n {
            return Err(Error::IndexOutOfRange { row, col, n });
        }
        if row == col {
            return Err(Error::Diagonal { index: row, value });
        }
        check_positive(row, col, value)?;
        let mut entries = self.entries.clone();
        entries[(row, col)] = value;
        Ok(ComparisonMatrix { entries })
    }

    /// Applies the change of units `u[ν][μ] → (c[ν] / c[μ]) · u[ν][μ]`.
    pub fn rescaled(&self, scale: &[f64]) -> Result<Self> {
        if scale.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: scale.len(),
            });
        }
        for (index, &value) in scale.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let mut entries = self.entries.clone();
        for i in 0..self.n() {
            for j in 0..self.n() {
                if i != j {
                    entries[(i, j)] *= scale[i] / scale[j];
                }
            }
        }
        Self::from_dmatrix(entries)
    }

    pub fn is_reciprocal(&self) -> bool {
        self.is_reciprocal_within(STRUCT_EPS)
    }

    /// `|u[μ][ν] · u[ν][μ] − 1| ≤ eps` for every pair.
    pub fn is_reciprocal_within(&self, eps: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (i + 1..n).all(|j| (self.entries[(i, j)] * self.entries[(j, i)] - 1.0).abs() <= eps)
        })
    }

    pub fn is_transitive(&self) -> bool {
        self.is_transitive_within(STRUCT_EPS)
    }

    /// `|u[ν][ρ] · u[ρ][μ] − u[ν][μ]| ≤ eps · u[ν][μ]` for every triple.
    pub fn is_transitive_within(&self, eps: f64) -> bool {
        let n = self.n();
        for i in 0..n {
            for k in 0..n {
                let ik = self.entries[(i, k)];
                for j in 0..n {
                    let ij = self.entries[(i, j)];
                    if (ik * self.entries[(k, j)] - ij).abs() > eps * ij {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Number of independent pairwise judgments, `n(n − 1) / 2`.
    pub fn pairwise_slots(&self) -> usize {
        self.n() * (self.n() - 1) / 2
    }
}

/// Anything that can be viewed as a dense real matrix.
pub trait AsDMatrix {
    fn as_dmatrix(&self) -> &DMatrix<f64>;
}

impl AsDMatrix for DMatrix<f64> {
    fn as_dmatrix(&self) -> &DMatrix<f64> {
        self
    }
}

impl AsDMatrix for ComparisonMatrix {
    fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

pub(crate) fn check_positive(row: usize, col: usize, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { row, col, value });
    }
    if value <= 0.0 {
        return Err(Error::NonPositive { row, col, value });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Normalization {
    /// `Σ w = 1`.
    SumOne,
    /// `Σ ln w = 0` ("balanced prices").
    ProductOne,
}

impl Normalization {
    fn name(self) -> &'static str {
        match self {
            Normalization::SumOne => "SUM_ONE",
            Normalization::ProductOne => "PRODUCT_ONE",
        }
    }

    fn deviation(self, weights: &[f64]) -> f64 {
        match self {
            Normalization::SumOne => weights.iter().sum::<f64>() - 1.0,
            Normalization::ProductOne => weights.iter().map(|w| w.ln()).sum::<f64>(),
        }
    }
}

/// Weights under a declared normalization.
///
/// `PRODUCT_ONE` vectors are strictly positive. `SUM_ONE` vectors may contain
/// zeros (a local weight of an alternative that a criterion ignores), but at
/// least one weight is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorityJson")]
pub struct PriorityVector {
    weights: Vec<f64>,
    normalization: Normalization,
}

#[derive(Deserialize)]
struct PriorityJson {
    weights: Vec<f64>,
    normalization: Normalization,
}

impl TryFrom<PriorityJson> for PriorityVector {
    type Error = Error;

    fn try_from(json: PriorityJson) -> Result<Self> {
        PriorityVector::new(json.weights, json.normalization)
    }
}

impl PriorityVector {
    /// Validates weights that already satisfy `normalization` within 1e-12.
    pub fn new(weights: Vec<f64>, normalization: Normalization) -> Result<Self> {
        check_weights(&weights, normalization)?;
        let deviation = normalization.deviation(&weights);
        if deviation.abs() > NORMALIZATION_EPS {
            return Err(Error::Normalization {
                expected: normalization.name(),
                deviation,
            });
        }
        Ok(PriorityVector {
            weights,
            normalization,
        })
    }

    /// Rescales arbitrary positive weights to the requested normalization.
    pub fn normalized(weights: Vec<f64>, normalization: Normalization) -> Result<Self> {
        check_weights(&weights, normalization)?;
        Ok(Self::normalize_unchecked(weights, normalization))
    }

    pub(crate) fn normalize_unchecked(mut weights: Vec<f64>, normalization: Normalization) -> Self {
        let divisor = match normalization {
            Normalization::SumOne => weights.iter().sum::<f64>(),
            Normalization::ProductOne => {
                (weights.iter().map(|w| w.ln()).sum::<f64>() / weights.len() as f64).exp()
            }
        };
        for w in &mut weights {
            *w /= divisor;
        }
        PriorityVector {
            weights,
            normalization,
        }
    }

    /// Builds a `PRODUCT_ONE` vector from log-weights summing to zero.
    pub(crate) fn from_balanced_logs(logs: &[f64]) -> Self {
        PriorityVector {
            weights: logs.iter().map(|x| x.exp()).collect(),
            normalization: Normalization::ProductOne,
        }
    }

    pub fn sum_one(weights: Vec<f64>) -> Result<Self> {
        Self::normalized(weights, Normalization::SumOne)
    }

    pub fn product_one(weights: Vec<f64>) -> Result<Self> {
        Self::normalized(weights, Normalization::ProductOne)
    }

    pub fn renormalized(&self, normalization: Normalization) -> Self {
        Self::normalize_unchecked(self.weights.clone(), normalization)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.weights)
    }

    /// Indices sorted by decreasing weight; ties keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]));
        order
    }
}

fn check_weights(weights: &[f64], normalization: Normalization) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::DimensionTooSmall { min: 1, found: 0 });
    }
    let zero_ok = normalization == Normalization::SumOne;
    for (index, &value) in weights.iter().enumerate() {
        if !(value.is_finite() && (value > 0.0 || (zero_ok && value == 0.0))) {
            return Err(Error::InvalidWeight { index, value });
        }
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::InvalidWeight {
            index: 0,
            value: 0.0,
        });
    }
    Ok(())
}

/// Log-scale residuals `R[ν][μ] = ln u[ν][μ] − ln ū*[ν][μ]` against the
/// nearest transitive matrix: the transaction-cost rate of each quote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationMatrix {
    pub n: usize,
    pub residuals: Vec<Vec<f64>>,
}

impl DeviationMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.residuals[row][col]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.residuals
            .iter()
            .flatten()
            .map(|r| r * r)
            .sum::<f64>()
            .sqrt()
    }

    /// Row sum minus column sum at every index. Zero at the optimum.
    pub fn row_minus_column_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                let row: f64 = self.residuals[k].iter().sum();
                let col: f64 = self.residuals.iter().map(|r| r[k]).sum();
                row - col
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals
            .iter()
            .flatten()
            .fold(0.0, |acc: f64, r| acc.max(r.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_fill_defaults_to_ones() {
        let m = ComparisonMatrix::build(3, &[], Fill::Reciprocal).unwrap();
        assert!(m.rows().iter().flatten().all(|&v| v == 1.0));
        assert!(m.is_transitive());
    }

    #[test]
    fn reciprocal_fill_mirrors() {
        let m = ComparisonMatrix::build(2, &[(0, 1, 2.0)], Fill::Reciprocal).unwrap();
        assert_eq!(m.rows(), vec![vec![1.0, 2.0], vec![0.5, 1.0]]);
        assert!(m.is_reciprocal());
    }

    #[test]
    fn explicit_fill_allows_margins() {
        let m = ComparisonMatrix::build(2, &[(0, 1, 2.1), (1, 0, 0.55)], Fill::Explicit).unwrap();
        assert!((m.get(0, 1) * m.get(1, 0) - 1.155).abs() < 1e-15);
        assert!(!m.is_reciprocal());
        assert!(!m.is_transitive());
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            ComparisonMatrix::build(1, &[], Fill::Reciprocal),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(matches!(
            ComparisonMatrix::build(2, &[(0, 1, 0.0)], Fill::Reciprocal),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            ComparisonMatrix::build(2, &[(0, 1, f64::NAN)], Fill::Reciprocal),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            ComparisonMatrix::build(2, &[(0, 1, f64::INFINITY)], Fill::Reciprocal),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            ComparisonMatrix::build(3, &[(0, 1, 2.0), (0, 1, 3.0)], Fill::Reciprocal),
            Err(Error::DuplicateEntry { row: 0, col: 1 })
        ));
        assert!(matches!(
            ComparisonMatrix::build(2, &[(0, 1, 2.0)], Fill::Explicit),
            Err(Error::MissingEntry { row: 1, col: 0 })
        ));
        assert!(matches!(
            ComparisonMatrix::build(2, &[(1, 0, 2.0)], Fill::Reciprocal),
            Err(Error::NotUpperTriangle { .. })
        ));
        assert!(matches!(
            ComparisonMatrix::build(2, &[(0, 2, 2.0)], Fill::Reciprocal),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_diagonal_is_rejected() {
        let err = ComparisonMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonPositive { row: 0, col: 0, .. }));
        let err = ComparisonMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Diagonal { index: 0, .. }));
    }

    #[test]
    fn from_weights_examples() {
        let ones = PriorityVector::sum_one(vec![1.0, 1.0, 1.0]).unwrap();
        let m = ComparisonMatrix::from_weights(&ones).unwrap();
        assert!(m.rows().iter().flatten().all(|&v| v == 1.0));

        let w = PriorityVector::new(vec![0.5, 0.25, 0.25], Normalization::SumOne).unwrap();
        let m = ComparisonMatrix::from_weights(&w).unwrap();
        assert_eq!(
            m.rows(),
            vec![
                vec![1.0, 2.0, 2.0],
                vec![0.5, 1.0, 1.0],
                vec![0.5, 1.0, 1.0]
            ]
        );

        let m = ComparisonMatrix::from_ratios(&[4.0, 2.0, 0.5]);
        assert_eq!(m.get(0, 2), 8.0);
        assert_eq!(m.get(0, 1) * m.get(1, 2), m.get(0, 2));
        assert!(m.is_transitive() && m.is_reciprocal());
    }

    #[test]
    fn priority_vector_normalizations() {
        let w = PriorityVector::sum_one(vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 0.25, 0.25]);
        let p = w.renormalized(Normalization::ProductOne);
        assert!(p.as_slice().iter().map(|x| x.ln()).sum::<f64>().abs() < 1e-12);
        assert!(PriorityVector::new(vec![0.5, 0.6], Normalization::SumOne).is_err());
        assert!(PriorityVector::sum_one(vec![1.0, -1.0]).is_err());
        assert!(PriorityVector::sum_one(vec![0.0, 0.0]).is_err());
        assert!(PriorityVector::product_one(vec![1.0, 0.0]).is_err());
        let sparse = PriorityVector::new(vec![1.0, 0.0], Normalization::SumOne).unwrap();
        assert!(ComparisonMatrix::from_weights(&sparse).is_err());
        assert_eq!(w.ranking(), vec![0, 1, 2]);
    }

    #[test]
    fn priority_vector_json_is_validated() {
        let w: PriorityVector =
            serde_json::from_str(r#"{"weights":[0.5,0.5],"normalization":"SUM_ONE"}"#).unwrap();
        assert_eq!(w.normalization(), Normalization::SumOne);
        assert!(serde_json::from_str::<PriorityVector>(
            r#"{"weights":[0.5,0.6],"normalization":"SUM_ONE"}"#
        )
        .is_err());
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"weights":[0.5,0.5],"normalization":"SUM_ONE"}"#
        );
    }
}
