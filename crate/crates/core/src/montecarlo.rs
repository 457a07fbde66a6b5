//! Random judgment matrices, the random consistency index and the
//! consistency census.
//!
//! Every random quantity is drawn from a ChaCha8 stream derived from
//! `(seed, purpose, n, block)`. Samples are generated in fixed blocks of
//! [`BLOCK_SIZE`], each block on its own stream, so results are bit-identical
//! regardless of how rayon schedules the blocks.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComparisonMatrix;
use crate::priority::{eigen_weights, EigenOptions, RandomIndex};

pub const BLOCK_SIZE: usize = 1_000;

/// Default CR threshold of the census.
pub const DEFAULT_CR_THRESHOLD: f64 = 0.1;

/// Sample count of the opt-in long census run.
pub const FULL_CENSUS_SAMPLES: usize = 10_000_000;

/// The discrete values a judgment may take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentScale(Vec<f64>);

impl JudgmentScale {
    /// `{1/9, 1/8, …, 1/2, 1, 2, …, 9}`.
    pub fn saaty() -> Self {
        let mut values: Vec<f64> = (2..=9).rev().map(|k| 1.0 / k as f64).collect();
        values.extend((1..=9).map(|k| k as f64));
        JudgmentScale(values)
    }

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter {
                name: "scale",
                message: "needs at least one value".into(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(JudgmentScale(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        self.0[rng.random_range(0..self.0.len())]
    }
}

impl Default for JudgmentScale {
    fn default() -> Self {
        Self::saaty()
    }
}

/// Reciprocal matrix with upper-triangle entries drawn uniformly from `scale`.
pub fn random_reciprocal_with<R: Rng>(
    n: usize,
    scale: &JudgmentScale,
    rng: &mut R,
) -> ComparisonMatrix {
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            upper.push((i, j, scale.draw(rng)));
        }
    }
    ComparisonMatrix::build(n, &upper, crate::matrix::Fill::Reciprocal)
        .expect("scale values are positive")
}

/// Deterministic random reciprocal Saaty-scale matrix for `seed`.
pub fn random_reciprocal(n: usize, seed: u64) -> Result<ComparisonMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_reciprocal_with(n, &JudgmentScale::saaty(), &mut rng))
}

#[derive(Clone, Copy)]
enum Purpose {
    RandomIndex = 0,
    Census = 1,
}

fn block_rng(seed: u64, purpose: Purpose, n: usize, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 56) | ((n as u64) << 40) | block as u64);
    rng
}

/// `(λ_max − n) / (n − 1)` for one matrix.
fn consistency_index(m: &ComparisonMatrix) -> Result<f64> {
    let n = m.n() as f64;
    let eig = eigen_weights(m, EigenOptions::default())?;
    Ok((eig.lambda_max - n) / (n - 1.0))
}

/// Consistency indices of samples `[0, samples)` of one stream, in order
/// within each block.
fn block_indices(
    n: usize,
    samples: usize,
    seed: u64,
    purpose: Purpose,
    scale: &JudgmentScale,
) -> Result<Vec<Vec<f64>>> {
    let blocks = samples.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, purpose, n, b);
            let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            (0..len)
                .map(|_| consistency_index(&random_reciprocal_with(n, scale, &mut rng)))
                .collect()
        })
        .collect()
}

/// The `index`-th matrix of a census stream for `n`; lets callers inspect
/// exactly the matrices the census scored.
pub fn census_sample(n: usize, seed: u64, index: usize) -> ComparisonMatrix {
    let scale = JudgmentScale::saaty();
    let mut rng = block_rng(seed, Purpose::Census, n, index / BLOCK_SIZE);
    let mut m = random_reciprocal_with(n, &scale, &mut rng);
    for _ in 0..index % BLOCK_SIZE {
        m = random_reciprocal_with(n, &scale, &mut rng);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiEstimate {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub ri: f64,
    pub std_error: f64,
}

/// Mean consistency index of `samples` random reciprocal matrices.
pub fn estimate_ri(n: usize, samples: usize, seed: u64) -> Result<RiEstimate> {
    estimate_ri_with(n, samples, seed, &JudgmentScale::saaty())
}

pub fn estimate_ri_with(
    n: usize,
    samples: usize,
    seed: u64,
    scale: &JudgmentScale,
) -> Result<RiEstimate> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, found: n });
    }
    if samples < 2 {
        return Err(Error::Parameter {
            name: "samples",
            message: "need at least 2 samples".into(),
        });
    }
    let blocks = block_indices(n, samples, seed, Purpose::RandomIndex, scale)?;
    let (sum, sum_sq) = blocks
        .iter()
        .map(|block| {
            block
                .iter()
                .fold((0.0, 0.0), |(s, q), &ci| (s + ci, q + ci * ci))
        })
        .fold((0.0, 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    let count = samples as f64;
    let mean = sum / count;
    let var = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
    Ok(RiEstimate {
        n,
        samples,
        seed,
        ri: mean,
        std_error: (var / count).sqrt(),
    })
}

/// Random index estimated on demand and memoized per dimension.
#[derive(Debug)]
pub struct MonteCarloRi {
    pub samples: usize,
    pub seed: u64,
    cache: Mutex<BTreeMap<usize, f64>>,
}

impl MonteCarloRi {
    pub fn new(samples: usize, seed: u64) -> Self {
        MonteCarloRi {
            samples,
            seed,
            cache: Mutex::new(BTreeMap::new()),
        }
    }
}

impl Default for MonteCarloRi {
    fn default() -> Self {
        MonteCarloRi::new(10_000, 0)
    }
}

impl RandomIndex for MonteCarloRi {
    fn random_index(&self, n: usize) -> Result<f64> {
        if n <= 2 {
            return Ok(0.0);
        }
        if let Some(&ri) = self.cache.lock().unwrap().get(&n) {
            return Ok(ri);
        }
        let ri = estimate_ri(n, self.samples, self.seed)?.ri;
        self.cache.lock().unwrap().insert(n, ri);
        Ok(ri)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Mean consistency index of an independent stream of `samples` matrices.
    pub ri_estimate: f64,
    pub ri_std_error: f64,
    pub cr_below_threshold: usize,
    /// `cr_below_threshold / samples`.
    pub fraction: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusConfig {
    pub dimensions: Vec<usize>,
    pub samples: usize,
    pub threshold: f64,
    pub seed: u64,
    pub scale: JudgmentScale,
}

impl CensusConfig {
    pub fn new(dimensions: Vec<usize>, samples: usize, seed: u64) -> Self {
        CensusConfig {
            dimensions,
            samples,
            threshold: DEFAULT_CR_THRESHOLD,
            seed,
            scale: JudgmentScale::saaty(),
        }
    }
}

/// For each `n`, the number of random matrices whose CR falls below
/// `threshold`, with RI estimated from an independent stream of equal size.
pub fn consistency_census(
    dimensions: &[usize],
    samples: usize,
    threshold: f64,
    seed: u64,
) -> Result<Vec<CensusResult>> {
    let config = CensusConfig {
        threshold,
        ..CensusConfig::new(dimensions.to_vec(), samples, seed)
    };
    consistency_census_with(&config, |_| {})
}

/// [`consistency_census`] with a callback invoked as each dimension finishes.
pub fn consistency_census_with(
    config: &CensusConfig,
    mut progress: impl FnMut(&CensusResult),
) -> Result<Vec<CensusResult>> {
    if !(config.threshold > 0.0) {
        return Err(Error::Parameter {
            name: "threshold",
            message: format!("must be positive, got {}", config.threshold),
        });
    }
    let mut results = Vec::with_capacity(config.dimensions.len());
    for &n in &config.dimensions {
        let ri = estimate_ri_with(n, config.samples, config.seed, &config.scale)?;
        let blocks = block_indices(
            n,
            config.samples,
            config.seed,
            Purpose::Census,
            &config.scale,
        )?;
        let count = blocks
            .iter()
            .flatten()
            .filter(|&&ci| ci / ri.ri < config.threshold)
            .count();
        let result = CensusResult {
            n,
            samples: config.samples,
            seed: config.seed,
            ri_estimate: ri.ri,
            ri_std_error: ri.std_error,
            cr_below_threshold: count,
            fraction: count as f64 / config.samples as f64,
            threshold: config.threshold,
        };
        progress(&result);
        results.push(result);
    }
    Ok(results)
}

/// Parses a dimension list: `"5"`, an inclusive range `"3..10"`, or a
/// comma-separated list `"3,5,7"`.
pub fn parse_dimensions(text: &str) -> Result<Vec<usize>> {
    let bad = |message: String| Error::Parameter { name: "n", message };
    let number = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| bad(format!("not a dimension: {s:?}")))
    };
    let dims = if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (number(lo)?, number(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(bad(format!("empty range {text:?}")));
        }
        (lo..=hi).collect()
    } else {
        text.split(',').map(number).collect::<Result<Vec<_>>>()?
    };
    if let Some(&n) = dims.iter().find(|&&n| n < 3) {
        return Err(Error::DimensionTooSmall { min: 3, found: n });
    }
    Ok(dims)
}

/// `n,samples,ri,count,fraction` table.
pub fn census_csv(results: &[CensusResult]) -> String {
    let mut out = String::from("n,samples,ri,count,fraction\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.samples, r.ri_estimate, r.cr_below_threshold, r.fraction
        ));
    }
    out
}
