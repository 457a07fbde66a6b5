//! Session state and the pure transitions applied to it.

use std::collections::HashSet;
use std::time::{SystemTime, UNIX_EPOCH};

use pmm_ahp::elicitation::coin_to_matrix;
use pmm_ahp::{CoinVector, ComparisonMatrix, MatrixAnalysis};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Largest dimension a session may have.
pub const MAX_SESSION_N: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    Pairwise,
    Coin,
}

/// What the decision-maker has entered so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionState {
    /// `entries[row][col]`; `None` marks an unset judgment. The diagonal is
    /// always `Some(1.0)`.
    Pairwise {
        entries: Vec<Vec<Option<f64>>>,
    },
    Coin {
        prices: CoinVector,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub n: usize,
    pub labels: Vec<String>,
    #[serde(flatten)]
    pub state: SessionState,
    pub delta: f64,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSession {
    pub mode: Mode,
    pub n: usize,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    pmm_ahp::priority::DEFAULT_DELTA
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn invalid(message: impl Into<String>) -> ServiceError {
    ServiceError::Invalid(message.into())
}

fn check_delta(delta: f64) -> Result<(), ServiceError> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("delta must be positive, got {delta}")))
    }
}

fn check_labels(labels: &[String], n: usize) -> Result<(), ServiceError> {
    if labels.len() != n {
        return Err(invalid(format!(
            "expected {n} labels, got {}",
            labels.len()
        )));
    }
    let mut seen = HashSet::new();
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(invalid(format!("duplicate label {label:?}")));
        }
    }
    Ok(())
}

fn check_value(value: f64) -> Result<(), ServiceError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "judgment must be positive and finite, got {value}"
        )))
    }
}

impl Session {
    pub fn create(id: String, request: CreateSession) -> Result<Session, ServiceError> {
        let CreateSession {
            mode,
            n,
            labels,
            delta,
        } = request;
        if !(2..=MAX_SESSION_N).contains(&n) {
            return Err(invalid(format!(
                "n must be between 2 and {MAX_SESSION_N}, got {n}"
            )));
        }
        let labels = labels.unwrap_or_else(|| (1..=n).map(|i| i.to_string()).collect());
        check_labels(&labels, n)?;
        check_delta(delta)?;
        let state = match mode {
            Mode::Pairwise => SessionState::Pairwise {
                entries: (0..n)
                    .map(|i| (0..n).map(|j| (i == j).then_some(1.0)).collect())
                    .collect(),
            },
            Mode::Coin => SessionState::Coin {
                prices: CoinVector::new(vec![1.0; n])?,
            },
        };
        let now = now_ms();
        Ok(Session {
            id,
            n,
            labels,
            state,
            delta,
            created_ms: now,
            updated_ms: now,
            revision: 0,
        })
    }

    /// Re-checks invariants of a session read from storage.
    pub fn validate(&self) -> Result<(), ServiceError> {
        check_labels(&self.labels, self.n)?;
        check_delta(self.delta)?;
        match &self.state {
            SessionState::Pairwise { entries } => {
                if entries.len() != self.n || entries.iter().any(|r| r.len() != self.n) {
                    return Err(invalid("entry grid does not match n"));
                }
                for (i, row) in entries.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        match (i == j, v) {
                            (true, Some(v)) if *v == 1.0 => {}
                            (true, _) => {
                                return Err(invalid(format!("diagonal entry {i} must be 1")))
                            }
                            (false, Some(v)) => check_value(*v)?,
                            (false, None) => {}
                        }
                    }
                }
            }
            SessionState::Coin { prices } => {
                if prices.n() != self.n {
                    return Err(invalid("price vector does not match n"));
                }
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        match self.state {
            SessionState::Pairwise { .. } => Mode::Pairwise,
            SessionState::Coin { .. } => Mode::Coin,
        }
    }

    /// The full matrix, or `None` while judgments are missing.
    pub fn matrix(&self) -> Option<ComparisonMatrix> {
        match &self.state {
            SessionState::Pairwise { entries } => {
                let rows: Option<Vec<Vec<f64>>> = entries
                    .iter()
                    .map(|r| r.iter().copied().collect())
                    .collect();
                ComparisonMatrix::from_rows(&rows?).ok()
            }
            SessionState::Coin { prices } => Some(coin_to_matrix(prices)),
        }
    }

    /// Unset off-diagonal slots as `[row, col]`.
    pub fn missing(&self) -> Vec<[usize; 2]> {
        match &self.state {
            SessionState::Pairwise { entries } => entries
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, v)| v.is_none())
                        .map(move |(j, _)| [i, j])
                })
                .collect(),
            SessionState::Coin { .. } => Vec::new(),
        }
    }

    /// State after setting one judgment (and its mirror when
    /// `reciprocal_fill`).
    pub fn with_judgment(&self, j: &Judgment) -> Result<SessionState, ServiceError> {
        let SessionState::Pairwise { entries } = &self.state else {
            return Err(invalid(
                "judgments apply to PAIRWISE sessions; use the coin endpoint",
            ));
        };
        let n = self.n;
        if j.row >= n || j.col >= n {
            return Err(invalid(format!(
                "entry ({}, {}) is outside a {n}x{n} matrix",
                j.row, j.col
            )));
        }
        if j.row == j.col {
            return Err(invalid(format!(
                "diagonal entry ({0}, {0}) is fixed at 1",
                j.row
            )));
        }
        check_value(j.value)?;
        let mut entries = entries.clone();
        entries[j.row][j.col] = Some(j.value);
        if j.reciprocal_fill {
            entries[j.col][j.row] = Some(1.0 / j.value);
        }
        Ok(SessionState::Pairwise { entries })
    }

    pub fn with_prices(&self, prices: CoinVector) -> Result<SessionState, ServiceError> {
        if self.mode() != Mode::Coin {
            return Err(invalid("prices apply to COIN sessions"));
        }
        if prices.n() != self.n {
            return Err(invalid(format!(
                "expected {} prices, got {}",
                self.n,
                prices.n()
            )));
        }
        Ok(SessionState::Coin { prices })
    }
}

/// One judgment as submitted to the judgments and what-if endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub row: usize,
    pub col: usize,
    pub value: f64,
    #[serde(default)]
    pub reciprocal_fill: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentWrite {
    #[serde(flatten)]
    pub judgment: Judgment,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinWrite {
    pub prices: CoinVector,
    pub revision: u64,
}

/// Progress while judgments are missing; the full analysis afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionReport {
    Incomplete {
        filled: usize,
        total: usize,
        missing: Vec<[usize; 2]>,
        /// The entered judgments with unset slots shown as 1.
        placeholder: ComparisonMatrix,
    },
    Complete(Box<MatrixAnalysis>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session: Session,
    pub report: SessionReport,
}
