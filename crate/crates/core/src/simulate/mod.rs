//! Generative full laws: CPT specifications, exact joints, samplers and
//! the bundled reference processes.

mod fixtures;
mod random;
mod sample;
mod spec;

use thiserror::Error;

pub use fixtures::{appendix_b_spec, Fixture};
pub use random::{graph_f_text, random_dgp_graph_f, random_positive_dgp, F_DGP_SEED, F_INDICATOR_REACH, F_VARIABLES};
pub use sample::{sample_dataset, sample_full, schema_for};
pub(crate) use sample::{draw, row_rng};
pub use spec::{FullLawSpec, SpecRole, SpecVar, DEFAULT_JOINT_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimulateError {
    #[error("law specification line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("law specification: {0}")]
    Spec(String),
    #[error("state space too large: {0}")]
    TooLarge(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("law does not match graph: {0}")]
    GraphMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
