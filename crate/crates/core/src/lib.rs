//! Identification and multiple imputation for graphical missing-data models.
//!
//! * [`mgraph`]: m-DAGs, m-ADMGs and m-CGs, Markov blankets.
//! * [`identify`]: pattern DAG construction (PM-ID and PM-ID+) and an exact
//!   reconstruction oracle for discrete full laws.
//! * [`impute`]: pattern-recursive Gibbs imputation (MISPR).
//! * [`simulate`]: CPT-factored full laws, samplers and reference fixtures.
//! * [`evaluate`]: target-law estimation, distances, benchmarks.
//! * [`cli`]: the `mispr` command-line front end.

pub mod mgraph;
pub mod joint;
pub mod identify;
pub mod data;
pub mod simulate;
pub mod impute;
pub mod evaluate;
pub mod cli;
