//! Priority derivation for pairwise comparison matrices read as market
//! quotations.
//!
//! A [`ComparisonMatrix`] holds judgments `u[ν][μ] ≈ w[ν] / w[μ]`. Transitive
//! matrices are arbitrage-free price lists; everything else carries
//! "transaction costs" that this crate measures and explains:
//!
//! * [`priority`]: eigenvector and logarithmic least-squares weights,
//!   intransitivity `√I`, the deviation matrix and the consistency report.
//! * [`metric`]: the Hilbert projective metric and the matrix distances it
//!   induces.
//! * [`elicitation`]: pricing against a private coin (`n` inputs instead of
//!   `n(n − 1)/2`), panel aggregation, hierarchy synthesis, revision hints.
//! * [`rate`]: flows/growths decomposition of matrix rates and their complex
//!   eigenbasis.
//! * [`analysis`]: all of the above for one matrix in a single report.
//! * [`montecarlo`]: random judgment matrices, the random index and the
//!   consistency census.
//!
//! ```
//! use pmm_ahp::{ComparisonMatrix, Fill, priority};
//!
//! let m = ComparisonMatrix::build(2, &[(0, 1, 2.1), (1, 0, 0.55)], Fill::Explicit)?;
//! let q = priority::llsm_weights(&m);
//! assert!((q.as_slice()[0] / q.as_slice()[1] - (2.1f64 / 0.55).sqrt()).abs() < 1e-12);
//! assert!((priority::intransitivity(&m) - 0.101899).abs() < 1e-5);
//! # Ok::<(), pmm_ahp::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod elicitation;
mod error;
pub mod io;
pub mod matrix;
pub mod metric;
pub mod montecarlo;
pub mod priority;
pub mod rate;

pub use analysis::{analyze, MatrixAnalysis};
pub use elicitation::{CoinVector, Panel, PanelWeights, RevisionHint};
pub use error::{Error, Result};
pub use matrix::{
    AsDMatrix, ComparisonMatrix, DeviationMatrix, Fill, Normalization, PriorityVector,
};
pub use metric::{PortfolioPoint, SamplingPlan};
pub use priority::{ConsistencyReport, EigenResult, RandomIndex, RiTable};

// The guide's code listings run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/priorities.md")]
    mod priorities {}
    #[doc = include_str!("../../../book/src/intransitivity.md")]
    mod intransitivity {}
    #[doc = include_str!("../../../book/src/hilbert.md")]
    mod hilbert {}
    #[doc = include_str!("../../../book/src/private-money.md")]
    mod private_money {}
    #[doc = include_str!("../../../book/src/market-rate.md")]
    mod market_rate {}
    #[doc = include_str!("../../../book/src/census.md")]
    mod census {}
}
