use std::collections::HashMap;
use std::sync::Arc;

use crate::data::DataTable;
use crate::identify::{MissingnessPattern, PatternDag};
use crate::mgraph::{MGraph, VertexKind};

use super::ImputeError;

/// A fitted conditional distribution of one column given others.
pub trait ConditionalModel: Send + Sync + std::fmt::Debug {
    /// Writes `p(target | state)` into `out`, which has one slot per
    /// category of the target. `state` holds a value for every column.
    fn probabilities(&self, state: &[u16], out: &mut [f64]);
}

/// Fits [`ConditionalModel`]s from complete rows.
pub trait Estimator: Send + Sync {
    fn fit(
        &self,
        data: &DataTable,
        rows: &[usize],
        target: usize,
        conditioning: &[usize],
    ) -> Result<Arc<dyn ConditionalModel>, ImputeError>;
}

/// Contexts up to this count are stored densely.
const DENSE_CONTEXTS: u64 = 1 << 16;

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<f64>),
    Sparse(HashMap<u64, Vec<f64>>),
}

/// Conditional probability table over a mixed-radix context index.
#[derive(Debug, Clone)]
pub struct TabularModel {
    card: usize,
    conditioning: Vec<usize>,
    strides: Vec<u64>,
    storage: Storage,
}

impl TabularModel {
    fn layout(cond_cards: &[usize]) -> Result<(Vec<u64>, u64), ImputeError> {
        let mut strides = vec![0u64; cond_cards.len()];
        let mut total: u64 = 1;
        for (s, &c) in strides.iter_mut().zip(cond_cards).rev() {
            *s = total;
            total = total
                .checked_mul(c as u64)
                .ok_or_else(|| ImputeError::Model("conditioning context space overflows 64 bits".into()))?;
        }
        Ok((strides, total))
    }

    /// Dense table given explicitly: `probs[ctx * card + x]`, contexts
    /// ordered with the last conditioning column fastest.
    pub fn from_table(card: usize, conditioning: Vec<usize>, cond_cards: &[usize], probs: Vec<f64>) -> Result<Self, ImputeError> {
        let (strides, contexts) = Self::layout(cond_cards)?;
        if probs.len() as u64 != contexts * card as u64 || conditioning.len() != cond_cards.len() {
            return Err(ImputeError::Model("table shape does not match cardinalities".into()));
        }
        for row in probs.chunks(card) {
            let s: f64 = row.iter().sum();
            if row.iter().any(|p| *p < 0.0) || (s - 1.0).abs() > 1e-12 {
                return Err(ImputeError::Model("table row is not a distribution".into()));
            }
        }
        Ok(TabularModel { card, conditioning, strides, storage: Storage::Dense(probs) })
    }

    fn context(&self, state: &[u16]) -> u64 {
        self.conditioning
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| state[c] as u64 * s)
            .sum()
    }

    pub fn conditioning(&self) -> &[usize] {
        &self.conditioning
    }
}

impl ConditionalModel for TabularModel {
    fn probabilities(&self, state: &[u16], out: &mut [f64]) {
        let ctx = self.context(state);
        let row = match &self.storage {
            Storage::Dense(p) => &p[ctx as usize * self.card..(ctx as usize + 1) * self.card],
            Storage::Sparse(m) => match m.get(&ctx) {
                Some(r) => r.as_slice(),
                None => {
                    out.fill(1.0 / self.card as f64);
                    return;
                }
            },
        };
        out.copy_from_slice(row);
    }
}

/// Frequency tables with additive smoothing; contexts never seen get the
/// uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabularEstimator {
    pub alpha: f64,
}

impl Default for TabularEstimator {
    fn default() -> Self {
        TabularEstimator { alpha: 1.0 }
    }
}

impl Estimator for TabularEstimator {
    fn fit(
        &self,
        data: &DataTable,
        rows: &[usize],
        target: usize,
        conditioning: &[usize],
    ) -> Result<Arc<dyn ConditionalModel>, ImputeError> {
        let schema = data.schema();
        let card = schema.column(target).card();
        let cond_cards: Vec<usize> = conditioning.iter().map(|&c| schema.column(c).card()).collect();
        let (strides, contexts) = TabularModel::layout(&cond_cards)?;
        let value = |n: usize, c: usize| {
            data.get(n, c)
                .ok_or_else(|| ImputeError::Model(format!("row {} is incomplete in column {}", n + 1, schema.column(c).name)))
        };
        let mut counts: HashMap<u64, Vec<f64>> = HashMap::new();
        for &n in rows {
            let mut ctx = 0u64;
            for (&c, &s) in conditioning.iter().zip(&strides) {
                ctx += value(n, c)? as u64 * s;
            }
            counts.entry(ctx).or_insert_with(|| vec![0.0; card])[value(n, target)? as usize] += 1.0;
        }
        let smooth = |c: &mut Vec<f64>| {
            let total: f64 = c.iter().sum::<f64>() + self.alpha * card as f64;
            for x in c.iter_mut() {
                *x = (*x + self.alpha) / total;
            }
        };
        let storage = if contexts <= DENSE_CONTEXTS {
            let mut dense = vec![1.0 / card as f64; contexts as usize * card];
            for (ctx, mut c) in counts {
                smooth(&mut c);
                dense[ctx as usize * card..(ctx as usize + 1) * card].copy_from_slice(&c);
            }
            Storage::Dense(dense)
        } else {
            Storage::Sparse(
                counts
                    .into_iter()
                    .map(|(k, mut c)| {
                        smooth(&mut c);
                        (k, c)
                    })
                    .collect(),
            )
        };
        Ok(Arc::new(TabularModel { card, conditioning: conditioning.to_vec(), strides, storage }))
    }
}

/// Estimated full conditional of one missing variable within one pattern.
#[derive(Debug, Clone)]
pub struct GibbsFactor {
    /// Substantive index of the variable being updated.
    pub target: usize,
    /// Table columns the model conditions on.
    pub conditioning: Vec<usize>,
    /// Parent patterns whose rows were pooled.
    pub parents: Vec<MissingnessPattern>,
    pub row_count: usize,
    pub model: Arc<dyn ConditionalModel>,
    /// Empirical distribution of the target among the pooled rows; used to
    /// start chains.
    pub initial: Vec<f64>,
}

/// Columns used to model `X_i`: every other substantive and observed
/// column, or only those in the Markov blanket of `X_i` when `reduce` is set.
pub fn conditioning_columns(g: &MGraph, data: &DataTable, i: usize, reduce: bool) -> Vec<usize> {
    let k = data.schema().k();
    let width = data.width();
    if !reduce {
        return (0..width).filter(|&c| c != i).collect();
    }
    let mb = g.markov_blanket(g.substantive(i)).expect("index within graph");
    let observed_pos: HashMap<_, _> = g.observed_vertices().iter().enumerate().map(|(j, &v)| (v, k + j)).collect();
    let mut cols: Vec<usize> = mb
        .into_iter()
        .filter_map(|v| match g.kind(v) {
            VertexKind::Substantive(j) => Some(j),
            VertexKind::Observed => observed_pos.get(&v).copied(),
            VertexKind::Indicator(_) => None,
        })
        .collect();
    cols.sort_unstable();
    cols
}

/// Fits the factor for index `i` of pattern `r` from the rows of its parents
/// in `h`. Those rows must already be complete.
#[allow(clippy::too_many_arguments)]
pub fn fit_gibbs_factor(
    g: &MGraph,
    data: &DataTable,
    rows_by_pattern: &HashMap<MissingnessPattern, Vec<usize>>,
    h: &PatternDag,
    r: MissingnessPattern,
    i: usize,
    estimator: &dyn Estimator,
    use_mb_reduction: bool,
) -> Result<GibbsFactor, ImputeError> {
    let parents = h.parents(r, i);
    if parents.is_empty() {
        return Err(ImputeError::NoParents { pattern: r.to_string(), index: i + 1 });
    }
    let mut rows: Vec<usize> = parents
        .iter()
        .flat_map(|p| rows_by_pattern.get(p).into_iter().flatten().copied())
        .collect();
    rows.sort_unstable();
    if rows.is_empty() {
        return Err(ImputeError::NoPooledRows { pattern: r.to_string(), index: i + 1 });
    }
    let conditioning = conditioning_columns(g, data, i, use_mb_reduction);
    let model = estimator.fit(data, &rows, i, &conditioning)?;
    let card = data.schema().column(i).card();
    let mut initial = vec![0.0; card];
    for &n in &rows {
        if let Some(x) = data.get(n, i) {
            initial[x as usize] += 1.0;
        }
    }
    let total: f64 = initial.iter().sum();
    initial.iter_mut().for_each(|x| *x /= total);
    Ok(GibbsFactor { target: i, conditioning, parents, row_count: rows.len(), model, initial })
}
