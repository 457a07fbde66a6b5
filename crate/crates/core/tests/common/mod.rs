//! Independent oracles. None of these call into the crate's numerical code.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Σ (ln u[i][j] − x_i + x_j)²` evaluated directly from the rows.
pub fn functional(u: &[Vec<f64>], x: &[f64]) -> f64 {
    let n = u.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r = u[i][j].ln() - x[i] + x[j];
            total += r * r;
        }
    }
    total
}

/// Gradient of [`functional`] by direct differentiation:
/// `∂/∂x_k = 2 Σ_i r_ik − 2 Σ_j r_kj` with `r_ij = ln u[i][j] − x_i + x_j`.
pub fn functional_gradient(u: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let r = u[i][j].ln() - x[i] + x[j];
            g[i] -= 2.0 * r;
            g[j] += 2.0 * r;
        }
    }
    g
}

/// Minimizes the log-Frobenius functional over log-prices with `Σ x = 0`
/// by gradient descent. The line search halves the step until the slope
/// along the search direction is still downhill at the new point, which the
/// analytic gradient resolves far below the rounding noise of the functional
/// itself. No closed form is involved.
pub fn minimize_functional(u: &[Vec<f64>]) -> Vec<f64> {
    let n = u.len();
    let mut x = vec![0.0; n];
    let mut g = functional_gradient(u, &x);
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..10_000 {
        let g_inf = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if g_inf < 1e-12 {
            break;
        }
        if g_inf < best {
            best = g_inf;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 50 {
                break;
            }
        }
        let mut t = 1.0;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let gc = functional_gradient(u, &cand);
            let slope: f64 = gc.iter().zip(&g).map(|(a, b)| a * b).sum();
            if slope >= 0.0 {
                x = cand;
                g = gc;
                break;
            }
            t *= 0.5;
        }
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter().map(|v| v - mean).collect()
}

/// Derivative-free minimizer for 2×2 inputs: golden-section search over
/// the single free log-price `x = (s, −s)` brackets the minimum, then a
/// parabola through three widely spaced samples pins down its vertex.
pub fn brute_force_two_by_two(u: &[Vec<f64>]) -> Vec<f64> {
    let f = |s: f64| functional(u, &[s, -s]);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
    while hi - lo > 1e-6 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let (m, h) = (0.5 * (lo + hi), 0.5);
    let (fl, fm, fr) = (f(m - h), f(m), f(m + h));
    let s = m - 0.5 * h * (fr - fl) / (fr - 2.0 * fm + fl);
    vec![s, -s]
}
/// Perron root and SUM_ONE eigenvector from a dense eigensolver.
pub fn dense_perron(rows: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lambda = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = &m - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let idx = (0..n)
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .unwrap();
    let v: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let s: f64 = v.iter().sum();
    (lambda, v.iter().map(|x| x / s).collect())
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic, `c_n = 1`) by
/// Faddeev–LeVerrier.
pub fn char_poly(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let id = DMatrix::<f64>::identity(n, n);
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + &id * coeffs[n - k + 1];
        coeffs[n - k] = -(m * &mk).trace() / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand–Kerner, polished with Newton.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let deriv = |z: Complex64| {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
                acc * z + c * k as f64
            })
    };
    let bound = 1.0 + coeffs[..n].iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2_000 {
        let prev = roots.clone();
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| {
                    acc * (roots[i] - roots[j])
                });
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        let delta = roots
            .iter()
            .zip(&prev)
            .fold(0.0f64, |a, (r, p)| a.max((r - p).norm()));
        if delta < 1e-15 * bound {
            break;
        }
    }
    for r in &mut roots {
        for _ in 0..5 {
            let d = deriv(*r);
            if d.norm() > 0.0 {
                let step = eval(*r) / d;
                *r -= step;
            }
        }
    }
    roots
}

/// Greedy matching distance between two multisets of complex numbers.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut unused: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for z in a {
        let (idx, d) = unused
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(d);
        unused.remove(idx);
    }
    worst
}

/// Hilbert distance between `A p` and `B p` for `p = (t, 1 − t)`.
pub fn two_by_two_image_distance(a: &[Vec<f64>], b: &[Vec<f64>], t: f64) -> f64 {
    let p = [t, 1.0 - t];
    let ap = [
        a[0][0] * p[0] + a[0][1] * p[1],
        a[1][0] * p[0] + a[1][1] * p[1],
    ];
    let bp = [
        b[0][0] * p[0] + b[0][1] * p[1],
        b[1][0] * p[0] + b[1][1] * p[1],
    ];
    let r0 = (ap[0] / bp[0]).ln();
    let r1 = (ap[1] / bp[1]).ln();
    (r0 - r1).abs()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random positive matrix with unit diagonal; reciprocal or with
/// independent lower-triangle entries.
#[allow(clippy::needless_range_loop)]
pub fn random_rows<R: Rng>(rng: &mut R, n: usize, reciprocal: bool) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i < j {
                rows[i][j] = (rng.random_range(-2.5..2.5f64)).exp();
                if reciprocal {
                    rows[j][i] = 1.0 / rows[i][j];
                }
            } else if i > j && !reciprocal {
                rows[i][j] = (rng.random_range(-2.5..2.5f64)).exp();
            }
        }
    }
    rows
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-3.0..3.0f64).exp())
        .collect()
}
