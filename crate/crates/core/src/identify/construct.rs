use std::collections::BTreeSet;

use crate::mgraph::MGraph;

use super::{IdentifyError, MissingnessPattern, PatternDag};

/// Result of the fixed-point construction plus its work counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlusConstruction {
    pub dag: PatternDag,
    /// Number of `(r, i, r~)` candidate checks performed.
    pub operations: u64,
    pub iterations: usize,
}

/// One-less-zero construction over all `2^K` patterns. Fails with the
/// first index whose own indicator sits in its Markov blanket.
pub fn pm_id_construct(g: &MGraph) -> Result<PatternDag, IdentifyError> {
    if let Some(i) = g.s1_violation() {
        return Err(IdentifyError::SelfInBlanket { index: i });
    }
    let k = g.k();
    let mut dag = PatternDag::new(k);
    let all = MissingnessPattern::all(k)?;
    for &r in &all {
        dag.add_node(r)?;
    }
    for &r in &all {
        for i in r.missing() {
            dag.add_edge(r.with_observed(i), r, i)?;
        }
    }
    Ok(dag)
}

/// Fixed-point construction over the supported patterns. A pattern is
/// identified once, for each missing index `i`, some already identified
/// pattern differs from it only in indicators outside the Markov blanket
/// of `X_i`; edges are added from every such pattern. Sweeps go in
/// descending pattern order and a pattern identified during a sweep is
/// available to the patterns after it.
pub fn pm_id_plus_construct(g: &MGraph, supported: &[MissingnessPattern]) -> Result<PlusConstruction, IdentifyError> {
    let k = g.k();
    let mut support: BTreeSet<MissingnessPattern> = BTreeSet::new();
    for &r in supported {
        if r.k() != k {
            return Err(IdentifyError::LengthMismatch { expected: k, actual: r.k() });
        }
        support.insert(r);
    }
    let complete = MissingnessPattern::complete(k)?;
    if !support.contains(&complete) {
        return Err(IdentifyError::NoCompleteCase);
    }
    let masks = g.mb_indicator_masks();

    let mut dag = PatternDag::new(k);
    for &r in &support {
        dag.add_node(r)?;
    }
    let mut identified: Vec<MissingnessPattern> = vec![complete];
    let mut in_id: BTreeSet<MissingnessPattern> = BTreeSet::from([complete]);
    let mut operations = 0u64;
    let mut iterations = 0usize;

    while in_id.len() < support.len() {
        iterations += 1;
        let mut progress = false;
        for &r in support.iter().rev() {
            if in_id.contains(&r) {
                continue;
            }
            let mut z_sets = Vec::new();
            for i in r.missing() {
                operations += identified.len() as u64;
                let z: Vec<MissingnessPattern> = identified
                    .iter()
                    .copied()
                    .filter(|&t| r.diff_mask(t) & masks[i] == 0)
                    .collect();
                if z.is_empty() {
                    break;
                }
                z_sets.push((i, z));
            }
            if z_sets.len() != r.missing_count() {
                continue;
            }
            for (i, z) in z_sets {
                for t in z {
                    dag.add_edge(t, r, i)?;
                }
            }
            in_id.insert(r);
            identified.push(r);
            progress = true;
        }
        if !progress {
            break;
        }
    }

    if in_id.len() != support.len() {
        let mut residue: Vec<MissingnessPattern> = support.difference(&in_id).copied().collect();
        residue.reverse();
        return Err(IdentifyError::Unidentified { residue });
    }
    Ok(PlusConstruction { dag, operations, iterations })
}

/// Which construction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// PM-ID when every pattern is supported, PM-ID+ otherwise.
    #[default]
    Auto,
    PmId,
    PmIdPlus,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Method::Auto),
            "pm-id" | "pmid" | "pm_id" => Ok(Method::PmId),
            "pm-id+" | "pmid+" | "pm-id-plus" | "pm_id_plus" | "plus" => Ok(Method::PmIdPlus),
            other => Err(format!("unknown method `{other}` (expected auto, pm-id, pm-id+)")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::PmId => "pm-id",
            Method::PmIdPlus => "pm-id+",
        })
    }
}

/// Builds a pattern DAG for exactly the given patterns.
pub fn construct(g: &MGraph, patterns: &[MissingnessPattern], method: Method) -> Result<(PatternDag, Method), IdentifyError> {
    let distinct: BTreeSet<_> = patterns.iter().copied().collect();
    let k = g.k();
    let all_present = k <= super::MAX_ENUMERATED_K && distinct.len() as u128 == 1u128 << k;
    let chosen = match method {
        Method::Auto if all_present => Method::PmId,
        Method::Auto => Method::PmIdPlus,
        m => m,
    };
    match chosen {
        Method::PmId => {
            if !all_present {
                return Err(IdentifyError::PatternsMissing { present: distinct.len(), k });
            }
            Ok((pm_id_construct(g)?, Method::PmId))
        }
        _ => Ok((pm_id_plus_construct(g, patterns)?.dag, Method::PmIdPlus)),
    }
}
