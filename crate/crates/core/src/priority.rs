//! Priority derivation and inconsistency measures.
//!
//! Two routes to weights are provided:
//!
//! * [`eigen_weights`]: the principal right eigenvector, found by power
//!   iteration. Elementwise positive matrices have a simple dominant Perron
//!   root, so the iteration always has a fixed point.
//! * [`llsm_weights`]: the logarithmic least-squares fit, i.e. the balanced
//!   prices `q*` minimising
//!   `I(q) = Σ_{ν,μ} (ln u[ν][μ] − ln q[ν] + ln q[μ])²`.
//!   The minimiser has the closed form
//!   `ln q*[μ] = Σ_ν (ln u[μ][ν] − ln u[ν][μ]) / 2n`, which needs no
//!   reciprocity. For reciprocal input it reduces to geometric row means.
//!
//! `√I(q*)` is the intransitivity of the matrix: zero exactly when the
//! judgments are transitive, and invariant under changes of units.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComparisonMatrix, DeviationMatrix, Normalization, PriorityVector};

/// Acceptance threshold on `√I` used when the caller does not pick one.
/// It is a convention, not a derived quantity.
pub const DEFAULT_DELTA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Stop once successive normalized iterates differ by at most this in max-norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub weights: PriorityVector,
    pub lambda_max: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Principal right eigenvector by power iteration, normalized to `SUM_ONE`.
///
/// `lambda_max` is `Σ (M w) / Σ w` for the converged `w`.
pub fn eigen_weights(m: &ComparisonMatrix, opts: EigenOptions) -> Result<EigenResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter {
            name: "tol",
            message: "must be positive".into(),
        });
    }
    let a = m.as_dmatrix();
    let n = m.n();
    let mut w = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        apply(a, &w, &mut next);
        let total: f64 = next.iter().sum();
        residual = 0.0;
        for (x, y) in next.iter_mut().zip(&w) {
            *x /= total;
            residual = f64::max(residual, (*x - y).abs());
        }
        std::mem::swap(&mut w, &mut next);
        if residual <= opts.tol {
            break;
        }
    }
    if !(residual <= opts.tol) {
        return Err(Error::NotConverged {
            iterations,
            residual,
        });
    }
    apply(a, &w, &mut next);
    let lambda_max = next.iter().sum::<f64>() / w.iter().sum::<f64>();
    Ok(EigenResult {
        weights: PriorityVector::normalize_unchecked(w, Normalization::SumOne),
        lambda_max,
        iterations,
        residual,
    })
}

fn apply(a: &nalgebra::DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (j, &xj) in x.iter().enumerate() {
        for (o, aij) in out.iter_mut().zip(a.column(j).iter()) {
            *o += aij * xj;
        }
    }
}

/// `ln q*` for the balanced least-squares prices. Sums to zero.
pub fn llsm_log_weights(m: &ComparisonMatrix) -> Vec<f64> {
    let n = m.n();
    let a = m.as_dmatrix();
    let two_n = 2.0 * n as f64;
    (0..n)
        .map(|mu| {
            (0..n)
                .map(|nu| a[(mu, nu)].ln() - a[(nu, mu)].ln())
                .sum::<f64>()
                / two_n
        })
        .collect()
}

/// Balanced prices `q*` minimising the log-Frobenius distance to the nearest
/// transitive matrix, normalized to `PRODUCT_ONE`.
pub fn llsm_weights(m: &ComparisonMatrix) -> PriorityVector {
    PriorityVector::from_balanced_logs(&llsm_log_weights(m))
}

/// Evaluates `I(q)` at the log-prices `log_q`.
pub fn log_frobenius_functional(m: &ComparisonMatrix, log_q: &[f64]) -> f64 {
    let n = m.n();
    let a = m.as_dmatrix();
    let mut total = 0.0;
    for nu in 0..n {
        for mu in 0..n {
            let r = a[(nu, mu)].ln() - log_q[nu] + log_q[mu];
            total += r * r;
        }
    }
    total
}

/// `√I(q*)`: distance in log units to the nearest transitive matrix.
pub fn intransitivity(m: &ComparisonMatrix) -> f64 {
    log_frobenius_functional(m, &llsm_log_weights(m)).sqrt()
}

/// `√(I(q*) / n(n−1))`, the root-mean-square residual per off-diagonal quote.
pub fn per_pair_intransitivity(m: &ComparisonMatrix) -> f64 {
    let n = m.n() as f64;
    intransitivity(m) / (n * (n - 1.0)).sqrt()
}

/// Residuals `ln u − ln ū*` against the nearest transitive matrix.
pub fn deviation_matrix(m: &ComparisonMatrix) -> DeviationMatrix {
    let n = m.n();
    let x = llsm_log_weights(m);
    let a = m.as_dmatrix();
    let residuals = (0..n)
        .map(|nu| {
            (0..n)
                .map(|mu| {
                    if nu == mu {
                        0.0
                    } else {
                        a[(nu, mu)].ln() - x[nu] + x[mu]
                    }
                })
                .collect()
        })
        .collect();
    DeviationMatrix { n, residuals }
}

/// `ū*[ν][μ] = q*[ν] / q*[μ]`.
pub fn nearest_transitive(m: &ComparisonMatrix) -> ComparisonMatrix {
    ComparisonMatrix::from_log_weights(&llsm_log_weights(m))
}

/// Source of the average random consistency index `RI(n)`.
pub trait RandomIndex {
    fn random_index(&self, n: usize) -> Result<f64>;
}

/// A fixed lookup table of `RI(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiTable(pub BTreeMap<usize, f64>);

impl RiTable {
    /// Saaty's commonly quoted values for `n = 3..=10`, for comparison runs.
    pub fn saaty() -> Self {
        RiTable(BTreeMap::from([
            (3, 0.58),
            (4, 0.90),
            (5, 1.12),
            (6, 1.24),
            (7, 1.32),
            (8, 1.41),
            (9, 1.45),
            (10, 1.49),
        ]))
    }
}

impl RandomIndex for RiTable {
    fn random_index(&self, n: usize) -> Result<f64> {
        if n <= 2 {
            return Ok(0.0);
        }
        self.0.get(&n).copied().ok_or_else(|| Error::Parameter {
            name: "ri",
            message: format!("no random index for n = {n}"),
        })
    }
}

impl<T: RandomIndex + ?Sized> RandomIndex for &T {
    fn random_index(&self, n: usize) -> Result<f64> {
        (**self).random_index(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub n: usize,
    pub lambda_max: f64,
    /// `(λ_max − n) / (n − 1)`.
    pub ci: f64,
    pub ri: f64,
    /// `ci / ri`; absent for non-reciprocal input.
    pub cr: Option<f64>,
    /// Saaty's `CR < 10%` rule, reported for comparison only.
    pub cr_below_10_percent: Option<bool>,
    /// `√I(q*)`.
    pub intransitivity: f64,
    pub per_pair_intransitivity: f64,
    pub delta: f64,
    /// `intransitivity < delta`.
    pub acceptable: bool,
    /// Always true: no model fixes δ, the decision-maker chooses it.
    pub delta_is_arbitrary: bool,
}

/// λ_max, CI, CR and the `√I < δ` verdict for a judgment matrix.
///
/// CR is only defined for reciprocal matrices; other input still gets
/// λ_max, CI and intransitivity, with `cr` left empty. A 2×2 reciprocal
/// matrix is always transitive, so its λ_max is 2 and its CR is 0.
pub fn consistency_report(
    m: &ComparisonMatrix,
    ri_source: &dyn RandomIndex,
    delta: f64,
) -> Result<ConsistencyReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter {
            name: "delta",
            message: format!("must be positive, got {delta}"),
        });
    }
    let n = m.n();
    let reciprocal = m.is_reciprocal();
    let (lambda_max, ci) = if n == 2 && reciprocal {
        (2.0, 0.0)
    } else {
        let eig = eigen_weights(m, EigenOptions::default())?;
        (
            eig.lambda_max,
            (eig.lambda_max - n as f64) / (n as f64 - 1.0),
        )
    };
    let ri = if n <= 2 {
        0.0
    } else {
        ri_source.random_index(n)?
    };
    if n > 2 && !(ri > 0.0) {
        return Err(Error::Parameter {
            name: "ri",
            message: format!("random index for n = {n} must be positive, got {ri}"),
        });
    }
    let cr = match (reciprocal, n) {
        (false, _) => None,
        (true, 2) => Some(0.0),
        (true, _) => Some(ci / ri),
    };
    let intransitivity = intransitivity(m);
    Ok(ConsistencyReport {
        n,
        lambda_max,
        ci,
        ri,
        cr,
        cr_below_10_percent: cr.map(|c| c < 0.1),
        intransitivity,
        per_pair_intransitivity: intransitivity / ((n * (n - 1)) as f64).sqrt(),
        delta,
        acceptable: intransitivity < delta,
        delta_is_arbitrary: true,
    })
}
