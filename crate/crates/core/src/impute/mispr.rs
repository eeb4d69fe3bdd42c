use std::collections::HashMap;

use rayon::prelude::*;

use crate::data::DataTable;
use crate::identify::{construct, Method, MissingnessPattern, PatternDag};
use crate::mgraph::MGraph;
use crate::simulate::row_rng;

use super::{fit_gibbs_factor, gibbs_impute_row, Estimator, GibbsFactor, ImputeError, TabularEstimator};

/// Conditional model family used for Gibbs factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    /// Smoothed frequency tables with pseudo-count `alpha`.
    Tabular { alpha: f64 },
}

impl Default for EstimatorKind {
    fn default() -> Self {
        EstimatorKind::Tabular { alpha: 1.0 }
    }
}

impl EstimatorKind {
    pub fn build(self) -> Box<dyn Estimator> {
        match self {
            EstimatorKind::Tabular { alpha } => Box::new(TabularEstimator { alpha }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisprConfig {
    /// Number of imputed tables.
    pub m: usize,
    /// Gibbs sweeps per row; the state after the last one is kept.
    pub burn_in: usize,
    pub seed: u64,
    pub method: Method,
    pub use_mb_reduction: bool,
    pub estimator: EstimatorKind,
}

impl Default for MisprConfig {
    fn default() -> Self {
        MisprConfig {
            m: 7,
            burn_in: 500,
            seed: 0,
            method: Method::Auto,
            use_mb_reduction: true,
            estimator: EstimatorKind::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MisprOutput {
    pub tables: Vec<DataTable>,
    pub dag: PatternDag,
    /// Construction actually used.
    pub method: Method,
}

/// Seed of replicate `j` (1-based).
pub fn replicate_seed(seed: u64, j: usize) -> u64 {
    seed ^ j as u64
}

fn check_schema(g: &MGraph, data: &DataTable) -> Result<(), ImputeError> {
    let s = data.schema();
    let same = s.k() == g.k()
        && s.observed.len() == g.observed_vertices().len()
        && s.substantive.iter().zip(g.substantive_vertices()).all(|(c, &v)| c.name == g.name(v))
        && s.observed.iter().zip(g.observed_vertices()).all(|(c, &v)| c.name == g.name(v));
    if same {
        Ok(())
    } else {
        Err(ImputeError::SchemaMismatch)
    }
}

/// One pass over the pattern DAG in topological order; imputes `data`
/// in place.
pub fn impute_once(
    g: &MGraph,
    data: &mut DataTable,
    dag: &PatternDag,
    estimator: &dyn Estimator,
    config: &MisprConfig,
    rep_seed: u64,
) -> Result<(), ImputeError> {
    let rows_by_pattern = data.rows_by_pattern();
    for r in rows_by_pattern.keys() {
        if !dag.contains(*r) {
            return Err(ImputeError::PatternNotInDag(r.to_string()));
        }
    }
    for r in dag.topological_order()? {
        if r.is_complete() {
            continue;
        }
        let Some(rows) = rows_by_pattern.get(&r) else { continue };
        let factors: Vec<GibbsFactor> = r
            .missing()
            .map(|i| fit_gibbs_factor(g, data, &rows_by_pattern, dag, r, i, estimator, config.use_mb_reduction))
            .collect::<Result<_, _>>()?;
        let data_ref = &*data;
        let completed: Vec<Vec<u16>> = rows
            .par_iter()
            .map(|&n| {
                let mut rng = row_rng(rep_seed, n);
                gibbs_impute_row(data_ref.row(n), &factors, config.burn_in, &mut rng)
            })
            .collect::<Result<_, _>>()?;
        for (&n, values) in rows.iter().zip(completed) {
            data.fill_row(n, &values);
        }
    }
    Ok(())
}

/// Multiple imputation by supported-pattern recursion with the estimator
/// named in `config`.
pub fn mispr(g: &MGraph, data: &DataTable, config: &MisprConfig) -> Result<MisprOutput, ImputeError> {
    let estimator = config.estimator.build();
    mispr_with_estimator(g, data, config, estimator.as_ref())
}

/// As [`mispr`] with a caller-supplied estimator.
pub fn mispr_with_estimator(
    g: &MGraph,
    data: &DataTable,
    config: &MisprConfig,
    estimator: &dyn Estimator,
) -> Result<MisprOutput, ImputeError> {
    check_schema(g, data)?;
    let mut patterns: Vec<MissingnessPattern> = data.patterns();
    let complete = MissingnessPattern::complete(g.k())?;
    if patterns.is_empty() {
        patterns.push(complete);
    }
    let (dag, method) = construct(g, &patterns, config.method)?;
    let tables = (1..=config.m)
        .into_par_iter()
        .map(|j| {
            let mut table = data.clone();
            impute_once(g, &mut table, &dag, estimator, config, replicate_seed(config.seed, j))?;
            Ok(table)
        })
        .collect::<Result<Vec<_>, ImputeError>>()?;
    Ok(MisprOutput { tables, dag, method })
}

/// Patterns in `data` with their row counts, descending by pattern.
pub fn pattern_counts(data: &DataTable) -> Vec<(MissingnessPattern, usize)> {
    let mut counts: HashMap<MissingnessPattern, usize> = HashMap::new();
    for n in 0..data.n_rows() {
        *counts.entry(data.pattern(n)).or_default() += 1;
    }
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_by(|a, b| b.0.cmp(&a.0));
    v
}
