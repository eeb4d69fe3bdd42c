//! Multiple imputation by supported-pattern recursion.
//!
//! Patterns are processed in a topological order of the pattern DAG. For
//! each incomplete pattern the Gibbs factors are fitted on the (already
//! completed) rows of its parent patterns and every row of the pattern is
//! completed by Gibbs sampling.

mod factor;
mod gibbs;
mod mispr;

use thiserror::Error;

pub use crate::data::{Column, CsvOptions, DataError, DataTable, Schema};
pub use factor::{
    conditioning_columns, fit_gibbs_factor, ConditionalModel, Estimator, GibbsFactor, TabularEstimator, TabularModel,
};
pub use gibbs::gibbs_impute_row;
pub use mispr::{impute_once, mispr, mispr_with_estimator, pattern_counts, replicate_seed, EstimatorKind, MisprConfig, MisprOutput};

use crate::identify::IdentifyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImputeError {
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("pattern {pattern} has no parent for factor {index}")]
    NoParents { pattern: String, index: usize },
    #[error("no rows available to fit factor {index} of pattern {pattern}")]
    NoPooledRows { pattern: String, index: usize },
    #[error("no Gibbs factor for missing variable {index}")]
    MissingFactor { index: usize },
    #[error("pattern {0} occurs in the data but not in the pattern DAG")]
    PatternNotInDag(String),
    #[error("data columns do not match the graph")]
    SchemaMismatch,
    #[error("model: {0}")]
    Model(String),
}
