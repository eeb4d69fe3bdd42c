use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{DataTable, Schema};
use crate::mgraph::{MGraph, VertexKind};

use super::{FullLawSpec, SimulateError, SpecRole};

/// RNG for one row: the seed picks the key, the row picks the stream.
pub(crate) fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

pub(crate) fn draw(rng: &mut impl Rng, dist: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (x, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return x;
        }
    }
    // rounding left a sliver above the cumulative sum: take the last
    // category with positive mass
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(dist.len() - 1)
}

/// Ancestral samples of every variable, hidden ones included.
pub fn sample_full(spec: &FullLawSpec, n: usize, seed: u64) -> Vec<Vec<u16>> {
    (0..n)
        .into_par_iter()
        .map(|row| {
            let mut rng = row_rng(seed, row);
            let mut a = vec![0u16; spec.vars().len()];
            for v in 0..a.len() {
                a[v] = draw(&mut rng, spec.cpt_row(v, &a)) as u16;
            }
            a
        })
        .collect()
}

/// Schema for `g` with categories taken from `spec`; checks that every
/// visible spec variable plays the same role as the vertex of that name.
pub fn schema_for(spec: &FullLawSpec, g: &MGraph) -> Result<Schema, SimulateError> {
    let mismatch = |msg: String| SimulateError::GraphMismatch(msg);
    let mut cats = HashMap::new();
    for v in spec.visible() {
        let id = g.id(&v.name).map_err(|_| mismatch(format!("`{}` is not a graph vertex", v.name)))?;
        let ok = match (&v.role, g.kind(id)) {
            (SpecRole::Substantive, VertexKind::Substantive(_)) | (SpecRole::Observed, VertexKind::Observed) => true,
            (SpecRole::Indicator(of), VertexKind::Indicator(k)) => g.name(g.substantive(k)) == of,
            _ => false,
        };
        if !ok {
            return Err(mismatch(format!("`{}` has a different role in the graph", v.name)));
        }
        cats.insert(v.name.clone(), v.categories.clone());
    }
    if spec.visible().count() != g.len() {
        return Err(mismatch("graph has vertices the law does not define".into()));
    }
    Schema::from_graph(g, &cats).map_err(|e| mismatch(e.to_string()))
}

/// Samples `n` rows of the full law and masks each substantive cell whose
/// indicator is 0. Hidden variables are dropped.
pub fn sample_dataset(spec: &FullLawSpec, g: &MGraph, n: usize, seed: u64) -> Result<DataTable, SimulateError> {
    let schema = schema_for(spec, g)?;
    let value_pos: Vec<usize> = schema
        .columns()
        .map(|c| spec.position(&c.name).expect("checked by schema_for"))
        .collect();
    let ind_pos: Vec<usize> = schema
        .indicators
        .iter()
        .map(|name| spec.position(name).expect("checked by schema_for"))
        .collect();
    let k = schema.k();
    let full = sample_full(spec, n, seed);
    let mut table = DataTable::with_capacity(schema, n);
    let mut buf = Vec::with_capacity(value_pos.len());
    for a in &full {
        buf.clear();
        for (c, &p) in value_pos.iter().enumerate() {
            let masked = c < k && a[ind_pos[c]] == 0;
            buf.push(if masked { None } else { Some(a[p]) });
        }
        table.push_row(&buf).map_err(|e| SimulateError::GraphMismatch(e.to_string()))?;
    }
    Ok(table)
}
