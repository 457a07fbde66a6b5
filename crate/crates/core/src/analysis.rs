//! Everything a decision-maker needs to see about one complete matrix,
//! bundled so that front ends report exactly what the engine computes.

use serde::{Deserialize, Serialize};

use crate::elicitation::{revision_hint, RevisionHint};
use crate::error::Result;
use crate::matrix::{ComparisonMatrix, DeviationMatrix, PriorityVector};
use crate::priority::{
    consistency_report, deviation_matrix, eigen_weights, llsm_weights, nearest_transitive,
    ConsistencyReport, EigenOptions, EigenResult, RandomIndex,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixAnalysis {
    pub matrix: ComparisonMatrix,
    pub report: ConsistencyReport,
    pub eigen: EigenResult,
    pub llsm: PriorityVector,
    pub nearest_transitive: ComparisonMatrix,
    pub deviation: DeviationMatrix,
    pub revision_hint: RevisionHint,
}

/// Consistency report, weights by both methods, the nearest transitive
/// matrix, the deviation matrix and the revision hint for `m`.
pub fn analyze(
    m: &ComparisonMatrix,
    ri_source: &dyn RandomIndex,
    delta: f64,
) -> Result<MatrixAnalysis> {
    Ok(MatrixAnalysis {
        report: consistency_report(m, ri_source, delta)?,
        eigen: eigen_weights(m, EigenOptions::default())?,
        llsm: llsm_weights(m),
        nearest_transitive: nearest_transitive(m),
        deviation: deviation_matrix(m),
        revision_hint: revision_hint(m),
        matrix: m.clone(),
    })
}
