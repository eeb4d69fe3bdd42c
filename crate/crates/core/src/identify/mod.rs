//! Full-law identification through pattern DAGs.

mod construct;
mod oracle;
mod pattern;
mod pattern_dag;

use thiserror::Error;

pub use construct::{construct, pm_id_construct, pm_id_plus_construct, Method, PlusConstruction};
pub use oracle::{reconstruct_full_law, systematic_scan_stationary, OracleConfig};
pub use pattern::{MissingnessPattern, MAX_K};
pub use pattern_dag::{Compatibility, PatternDag, PatternEdge};

/// Largest `K` for which all `2^K` patterns are ever enumerated.
pub const MAX_ENUMERATED_K: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentifyError {
    #[error("R{} lies in the Markov blanket of X{}: full law not identified by PM-ID", index + 1, index + 1)]
    SelfInBlanket { index: usize },
    #[error("patterns not identified: {}", fmt_patterns(residue))]
    Unidentified { residue: Vec<MissingnessPattern> },
    #[error("the complete-case pattern is not supported")]
    NoCompleteCase,
    #[error("PM-ID needs all 2^{k} patterns, only {present} present")]
    PatternsMissing { present: usize, k: usize },
    #[error("{0} variables exceed the supported maximum")]
    TooManyVariables(usize),
    #[error("invalid pattern `{0}`")]
    BadPattern(String),
    #[error("pattern length {actual} does not match K = {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("pattern `{0}` is not a node")]
    UnknownPattern(String),
    #[error("edge `{edge}` carries an index observed in its head")]
    BadLabel { edge: String },
    #[error("pattern DAG has a cycle through {0}")]
    Cycle(String),
    #[error("pattern DAG syntax: {0}")]
    Syntax(String),
    #[error("no parent supplies factor {index} of pattern {pattern}")]
    MissingParent { pattern: String, index: usize },
    #[error("zero denominator in factor {index} of pattern {pattern}")]
    ZeroDenominator { pattern: String, index: usize },
    #[error("Gibbs factors of pattern {pattern} are inconsistent (gap {gap:e})")]
    GibbsInconsistent { pattern: String, gap: f64 },
    #[error("oracle: {0}")]
    Oracle(String),
}

impl IdentifyError {
    /// True for failures of identification itself, as opposed to bad input.
    pub fn is_identification_failure(&self) -> bool {
        matches!(
            self,
            IdentifyError::SelfInBlanket { .. }
                | IdentifyError::Unidentified { .. }
                | IdentifyError::NoCompleteCase
                | IdentifyError::PatternsMissing { .. }
        )
    }
}

fn fmt_patterns(ps: &[MissingnessPattern]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}
