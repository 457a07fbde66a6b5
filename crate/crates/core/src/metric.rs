//! Hilbert projective metric on the positive cone and the distances it
//! induces between comparison matrices.
//!
//! For strictly positive `x`, `y`:
//!
//! ```text
//! d(x, y) = ln( max_i x_i/y_i · max_j y_j/x_j )
//! ```
//!
//! `d` vanishes exactly on proportional vectors, so it is a metric on rays.
//! Two strictly positive matrices (comparison matrices or any positive
//! multiple of one) are compared through the images `A p` and `B p` of positive
//! portfolios `p`: either the worst case over `p` ([`induced_max_distance`])
//! or the average under the flat Dirichlet measure on the simplex
//! ([`induced_integral_distance`]). Both are Monte Carlo estimates; the
//! maximum is a lower bound and is never claimed exact for `n > 2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{check_positive, AsDMatrix};

/// Multiplicative step of the coordinate hill climb.
pub const HILL_CLIMB_FACTOR: f64 = 1.1;
const MAX_CLIMB_ROUNDS: usize = 2_000;

/// A positive ray, stored by its representative on the unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PortfolioPoint {
    coords: Vec<f64>,
}

impl PortfolioPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        for (index, &value) in coords.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(Self::normalize(coords))
    }

    fn normalize(mut coords: Vec<f64>) -> Self {
        let total: f64 = coords.iter().sum();
        coords.iter_mut().for_each(|c| *c /= total);
        PortfolioPoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }
}

impl TryFrom<Vec<f64>> for PortfolioPoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        PortfolioPoint::new(coords)
    }
}

impl From<PortfolioPoint> for Vec<f64> {
    fn from(p: PortfolioPoint) -> Self {
        p.coords
    }
}

pub fn hilbert_distance(x: &PortfolioPoint, y: &PortfolioPoint) -> Result<f64> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    Ok(cone_distance(&x.coords, &y.coords))
}

/// Hilbert distance between two positive vectors of equal length.
///
/// Written as `max r − min r` with `r_i = ln x_i − ln y_i`, which makes the
/// result exactly symmetric.
pub(crate) fn cone_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (a, b) in x.iter().zip(y) {
        let r = a.ln() - b.ln();
        hi = hi.max(r);
        lo = lo.min(r);
    }
    hi - lo
}

/// Sample count and seed for the Monte Carlo distance estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub samples: usize,
    pub seed: u64,
    /// Hill-climb each sample (only used by the max estimator).
    #[serde(default = "default_refine")]
    pub refine: bool,
}

fn default_refine() -> bool {
    true
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            samples: 256,
            seed: 0,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEstimate {
    /// Lower bound on `sup_p d(A p, B p)`.
    pub value: f64,
    pub samples: usize,
    pub seed: u64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample `index` of the flat Dirichlet stream for `seed`. Each sample has
/// its own ChaCha stream, so results do not depend on thread count and a
/// larger plan is a superset of a smaller one.
pub fn dirichlet_sample(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut p: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    // Exp1 can return 0 with negligible probability; keep the point interior.
    p.iter_mut().for_each(|x| *x = x.max(f64::MIN_POSITIVE));
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

struct ImagePair<'a> {
    a: &'a DMatrix<f64>,
    b: &'a DMatrix<f64>,
}

impl ImagePair<'_> {
    fn distance_at(&self, p: &[f64]) -> f64 {
        let ap = self.a * DVector::from_column_slice(p);
        let bp = self.b * DVector::from_column_slice(p);
        cone_distance(ap.as_slice(), bp.as_slice())
    }

    fn climb(&self, mut p: Vec<f64>) -> (f64, Vec<f64>) {
        let mut best = self.distance_at(&p);
        for _ in 0..MAX_CLIMB_ROUNDS {
            let mut improved = false;
            for i in 0..p.len() {
                for factor in [HILL_CLIMB_FACTOR, 1.0 / HILL_CLIMB_FACTOR] {
                    let mut candidate = p.clone();
                    candidate[i] *= factor;
                    let total: f64 = candidate.iter().sum();
                    candidate.iter_mut().for_each(|x| *x /= total);
                    let value = self.distance_at(&candidate);
                    if value > best {
                        best = value;
                        p = candidate;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        (best, p)
    }
}

fn check_pair(a: &DMatrix<f64>, b: &DMatrix<f64>, plan: &SamplingPlan) -> Result<()> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        for row in 0..m.nrows() {
            for col in 0..m.ncols() {
                check_positive(row, col, m[(row, col)])?;
            }
        }
    }
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    if plan.samples == 0 {
        return Err(Error::Parameter {
            name: "samples",
            message: "must be at least 1".into(),
        });
    }
    Ok(())
}

/// Worst-case Hilbert distance between `A p` and `B p` over positive `p`,
/// estimated from `plan.samples` Dirichlet starts (each hill-climbed when
/// `plan.refine` is set).
pub fn induced_max_distance<A, B>(a: &A, b: &B, plan: &SamplingPlan) -> Result<MaxEstimate>
where
    A: AsDMatrix + ?Sized,
    B: AsDMatrix + ?Sized,
{
    let (a, b) = (a.as_dmatrix(), b.as_dmatrix());
    check_pair(a, b, plan)?;
    let pair = ImagePair { a, b };
    let n = a.nrows();
    let results: Vec<(f64, Vec<f64>)> = (0..plan.samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = dirichlet_sample(n, plan.seed, i);
            if plan.refine {
                pair.climb(p)
            } else {
                (pair.distance_at(&p), p)
            }
        })
        .collect();
    let (value, argmax) = results
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        });
    Ok(MaxEstimate {
        value,
        samples: plan.samples,
        seed: plan.seed,
        argmax,
    })
}

/// Mean Hilbert distance between `A p` and `B p` for `p` uniform on the
/// simplex, with its standard error.
pub fn induced_integral_distance<A, B>(
    a: &A,
    b: &B,
    plan: &SamplingPlan,
) -> Result<IntegralEstimate>
where
    A: AsDMatrix + ?Sized,
    B: AsDMatrix + ?Sized,
{
    let (a, b) = (a.as_dmatrix(), b.as_dmatrix());
    check_pair(a, b, plan)?;
    let pair = ImagePair { a, b };
    let n = a.nrows();
    let values: Vec<f64> = (0..plan.samples as u64)
        .into_par_iter()
        .map(|i| pair.distance_at(&dirichlet_sample(n, plan.seed, i)))
        .collect();
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let std_error = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(IntegralEstimate {
        mean,
        std_error,
        samples: plan.samples,
        seed: plan.seed,
    })
}
