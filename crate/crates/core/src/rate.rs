//! Matrix rates: flows, growths and the complex eigenbasis.
//!
//! A matrix rate `M` splits uniquely into a *flows* part whose columns sum to
//! zero (capital moving between goods) and a diagonal *growths* part (each
//! good growing on its own). The growth of good `j` is the column sum of `M`.
//!
//! In a basis of (complex) eigenvectors the rate is diagonal, so every
//! basket evolves as independent complex investments and the flows part
//! vanishes. [`complex_eigenbasis`] computes that basis when it exists.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvector matrices with a condition estimate above this are treated as
/// defective.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e12;

/// Flows (zero column sums) plus growths (diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowsGrowths<T: nalgebra::Scalar> {
    pub flows: DMatrix<T>,
    pub growths: DMatrix<T>,
}

/// Splits a square rate into flows and growths. Works over reals and
/// complex numbers alike.
pub fn decompose_rate<T>(m: &DMatrix<T>) -> Result<FlowsGrowths<T>>
where
    T: ComplexField + Copy,
{
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let n = m.nrows();
    let mut growths = DMatrix::zeros(n, n);
    let mut flows = m.clone();
    for j in 0..n {
        let s = m.column(j).iter().fold(T::zero(), |acc, &x| acc + x);
        growths[(j, j)] = s;
        flows[(j, j)] -= s;
    }
    Ok(FlowsGrowths { flows, growths })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenbasis {
    pub eigenvalues: Vec<Complex64>,
    /// Columns are unit-norm eigenvectors.
    pub transition: DMatrix<Complex64>,
    /// `‖T Λ T⁻¹ − M‖_F`.
    pub reconstruction_error: f64,
    /// `σ_max / σ_min` of the transition matrix.
    pub condition: f64,
    transition_inverse: DMatrix<Complex64>,
}

impl Eigenbasis {
    /// `T⁻¹ M T`, which is diagonal up to rounding.
    pub fn rate_in_eigenbasis(&self, m: &DMatrix<f64>) -> DMatrix<Complex64> {
        &self.transition_inverse * m.map(|x| Complex64::new(x, 0.0)) * &self.transition
    }

    pub fn transition_inverse(&self) -> &DMatrix<Complex64> {
        &self.transition_inverse
    }
}

/// Eigenvalues and eigenvectors of a real square matrix.
///
/// Eigenvalues come from the real Schur form. Each eigenvector spans the
/// null space of `M − λI`, taken from the smallest right singular vectors;
/// a cluster of `k` numerically equal eigenvalues takes the `k` smallest.
/// Fails with [`Error::NotDiagonalizable`] when the eigenvectors do not form
/// a well-conditioned basis.
pub fn complex_eigenbasis(m: &DMatrix<f64>) -> Result<Eigenbasis> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::DimensionTooSmall { min: 1, found: 0 });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter {
            name: "matrix",
            message: "entries must be finite".into(),
        });
    }
    let scale = m.norm().max(1.0);
    let mut eigenvalues: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mc = m.map(|x| Complex64::new(x, 0.0));
    let cluster_eps = 1e-8 * scale;
    let mut transition = DMatrix::<Complex64>::zeros(n, n);
    let mut k = 0;
    while k < n {
        let mut end = k + 1;
        while end < n && (eigenvalues[end] - eigenvalues[k]).norm() <= cluster_eps {
            end += 1;
        }
        let multiplicity = end - k;
        let lambda = eigenvalues[k..end].iter().sum::<Complex64>() / multiplicity as f64;
        let shifted = &mc - DMatrix::<Complex64>::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for (slot, &idx) in order.iter().take(multiplicity).enumerate() {
            let sigma = svd.singular_values[idx];
            if sigma > 1e-6 * scale {
                // The geometric multiplicity is smaller than the algebraic one.
                return Err(Error::NotDiagonalizable {
                    condition: f64::INFINITY,
                });
            }
            let v = v_t.row(idx).adjoint();
            transition.set_column(k + slot, &v);
        }
        k = end;
    }

    let singular = transition.singular_values();
    let (hi, lo) = singular
        .iter()
        .fold((0.0f64, f64::INFINITY), |(h, l), &s| (h.max(s), l.min(s)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < MAX_EIGENVECTOR_CONDITION) {
        return Err(Error::NotDiagonalizable { condition });
    }
    let transition_inverse = transition
        .clone()
        .try_inverse()
        .ok_or(Error::NotDiagonalizable { condition })?;
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eigenvalues.clone()));
    let rebuilt = &transition * lambda * &transition_inverse;
    let reconstruction_error = (rebuilt - &mc).norm();
    Ok(Eigenbasis {
        eigenvalues,
        transition,
        reconstruction_error,
        condition,
        transition_inverse,
    })
}

/// Flows, growths and (when diagonalizable) the eigenbasis of a rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateDecomposition {
    pub parts: FlowsGrowths<f64>,
    pub eigenbasis: Result<Eigenbasis, f64>,
}

pub fn analyze_rate(m: &DMatrix<f64>) -> Result<RateDecomposition> {
    let parts = decompose_rate(m)?;
    let eigenbasis = match complex_eigenbasis(m) {
        Ok(basis) => Ok(basis),
        Err(Error::NotDiagonalizable { condition }) => Err(condition),
        Err(e) => return Err(e),
    };
    Ok(RateDecomposition { parts, eigenbasis })
}

/// `{"re": …, "im": …}` wire form of a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub flows: Vec<Vec<f64>>,
    pub growths: Vec<Vec<f64>>,
}

impl From<&FlowsGrowths<f64>> for DecompositionJson {
    fn from(p: &FlowsGrowths<f64>) -> Self {
        DecompositionJson {
            flows: rows_of(&p.flows),
            growths: rows_of(&p.growths),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenbasisJson {
    pub eigenvalues: Vec<ComplexJson>,
    pub transition: Vec<Vec<ComplexJson>>,
    pub reconstruction_error: f64,
    pub condition: f64,
}

impl From<&Eigenbasis> for EigenbasisJson {
    fn from(e: &Eigenbasis) -> Self {
        EigenbasisJson {
            eigenvalues: e.eigenvalues.iter().map(|&z| z.into()).collect(),
            transition: rows_of(&e.transition)
                .into_iter()
                .map(|r| r.into_iter().map(ComplexJson::from).collect())
                .collect(),
            reconstruction_error: e.reconstruction_error,
            condition: e.condition,
        }
    }
}

fn rows_of<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Largest absolute off-diagonal entry.
pub fn max_off_diagonal<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    let mut worst = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                let v = m[(i, j)].clone().modulus();
                if v > worst {
                    worst = v;
                }
            }
        }
    }
    worst
}
