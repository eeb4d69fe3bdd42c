//! Exact reconstruction of a discrete full law from the pieces a pattern
//! DAG declares identified: the complete-case slice, the observed-part
//! margins of every pattern, and the Gibbs factors copied along edges.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::joint::{JointTable, TableVar};
use crate::mgraph::MGraph;

use super::{IdentifyError, MissingnessPattern, PatternDag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Denominators at or below this count as zero.
    pub epsilon: f64,
    /// Allowed gap between the conditionals of the composed joint and the
    /// Gibbs factors it was built from.
    pub consistency_tol: f64,
    /// Largest extrapolation state space solved densely.
    pub max_states: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { epsilon: 0.0, consistency_tol: 1e-8, max_states: 4096 }
    }
}

/// Stationary distribution of the systematic-scan Gibbs kernel that updates
/// variables `0..cards.len()` in ascending order. `conditional(v, state)`
/// returns the distribution of variable `v` given the other coordinates of
/// `state`. States are indexed row-major, last variable fastest.
pub fn systematic_scan_stationary<F>(cards: &[usize], conditional: F, max_states: usize) -> Result<Vec<f64>, IdentifyError>
where
    F: Fn(usize, &[usize]) -> Vec<f64>,
{
    let s: usize = crate::joint::state_space(cards.iter().copied(), max_states)
        .map_err(|e| IdentifyError::Oracle(e.to_string()))?;
    let decode = |mut idx: usize| {
        let mut a = vec![0; cards.len()];
        for (slot, &c) in a.iter_mut().zip(cards).rev() {
            *slot = idx % c;
            idx /= c;
        }
        a
    };
    let encode = |a: &[usize]| a.iter().zip(cards).fold(0, |acc, (&x, &c)| acc * c + x);

    let mut p = DMatrix::<f64>::identity(s, s);
    for v in 0..cards.len() {
        let mut kv = DMatrix::<f64>::zeros(s, s);
        for from in 0..s {
            let mut a = decode(from);
            let dist = conditional(v, &a);
            for (x, &q) in dist.iter().enumerate() {
                a[v] = x;
                kv[(from, encode(&a))] += q;
            }
        }
        p *= kv;
    }
    let mut a = p.transpose() - DMatrix::<f64>::identity(s, s);
    for c in 0..s {
        a[(s - 1, c)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(s);
    b[s - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| IdentifyError::Oracle("Gibbs kernel has no unique stationary distribution".into()))?;
    Ok(pi.iter().map(|&x| if x.abs() < 1e-15 { 0.0 } else { x }).collect())
}

/// Rebuilds `p(X, O, R = r)` for every node `r` of `h`, in topological
/// order, using only quantities the pattern DAG declares identified.
/// Patterns outside `h` receive probability zero. The result uses the
/// variable order of `full`.
pub fn reconstruct_full_law(
    g: &MGraph,
    h: &PatternDag,
    full: &JointTable,
    config: &OracleConfig,
) -> Result<JointTable, IdentifyError> {
    let k = g.k();
    if h.k() != k {
        return Err(IdentifyError::LengthMismatch { expected: k, actual: h.k() });
    }
    let mut names: Vec<&str> = g.substantive_vertices().iter().map(|&v| g.name(v)).collect();
    names.extend(g.observed_vertices().iter().map(|&v| g.name(v)));
    names.extend(g.indicator_vertices().iter().map(|&v| g.name(v)));
    if full.vars().len() != names.len() {
        return Err(IdentifyError::Oracle(format!(
            "full law has {} variables, graph has {}",
            full.vars().len(),
            names.len()
        )));
    }
    let canon = full.marginal(&names).map_err(|e| IdentifyError::Oracle(e.to_string()))?;
    let n_xo_vars = names.len() - k;
    let cards: Vec<usize> = canon.cards()[..n_xo_vars].to_vec();
    if canon.cards()[n_xo_vars..].iter().any(|&c| c != 2) {
        return Err(IdentifyError::Oracle("indicators must be binary".into()));
    }
    let n_xo: usize = cards.iter().product();
    let n_r = 1usize << k;
    let slice = |r: MissingnessPattern| -> Vec<f64> {
        let rv = r.numeric() as usize;
        (0..n_xo).map(|xo| canon.probs()[xo * n_r + rv]).collect()
    };
    let encode = |a: &[usize]| a.iter().zip(&cards).fold(0usize, |acc, (&x, &c)| acc * c + x);
    let decode = |mut idx: usize| {
        let mut a = vec![0; cards.len()];
        for (slot, &c) in a.iter_mut().zip(&cards).rev() {
            *slot = idx % c;
            idx /= c;
        }
        a
    };

    let order = h.topological_order()?;
    let rank: HashMap<MissingnessPattern, usize> = order.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let parent_map = h.parent_map();
    let mut rec: HashMap<MissingnessPattern, Vec<f64>> = HashMap::new();

    for &r in &order {
        if r.is_complete() {
            rec.insert(r, slice(r));
            continue;
        }
        let missing: Vec<usize> = r.missing().collect();
        let mut parents = Vec::with_capacity(missing.len());
        for &i in &missing {
            let t = parent_map
                .get(&(r, i))
                .and_then(|ps| ps.iter().min_by_key(|t| rank[t]).copied())
                .ok_or(IdentifyError::MissingParent { pattern: r.to_string(), index: i + 1 })?;
            parents.push(&rec[&t]);
        }
        let observed_slice = slice(r);
        let m_cards: Vec<usize> = missing.iter().map(|&i| cards[i]).collect();
        let mut out = vec![0.0; n_xo];

        for base in 0..n_xo {
            let ctx = decode(base);
            if missing.iter().any(|&i| ctx[i] != 0) {
                continue;
            }
            let m_states: usize = m_cards.iter().product();
            let full_index = |m_state: &[usize]| {
                let mut a = ctx.clone();
                for (&i, &x) in missing.iter().zip(m_state) {
                    a[i] = x;
                }
                encode(&a)
            };
            let m_decode = |mut idx: usize| {
                let mut a = vec![0; m_cards.len()];
                for (slot, &c) in a.iter_mut().zip(&m_cards).rev() {
                    *slot = idx % c;
                    idx /= c;
                }
                a
            };
            let interp: f64 = (0..m_states).map(|s| observed_slice[full_index(&m_decode(s))]).sum();
            if interp <= 0.0 {
                continue;
            }
            // factor tables: factors[m][state] = distribution of X_{missing[m]}
            let mut factors = vec![vec![Vec::new(); m_states]; missing.len()];
            for (m, &i) in missing.iter().enumerate() {
                for s in 0..m_states {
                    let mut st = m_decode(s);
                    let vals: Vec<f64> = (0..cards[i])
                        .map(|x| {
                            st[m] = x;
                            parents[m][full_index(&st)]
                        })
                        .collect();
                    let denom: f64 = vals.iter().sum();
                    if denom <= config.epsilon {
                        return Err(IdentifyError::ZeroDenominator { pattern: r.to_string(), index: i + 1 });
                    }
                    factors[m][s] = vals.into_iter().map(|v| v / denom).collect();
                }
            }
            let m_encode = |a: &[usize]| a.iter().zip(&m_cards).fold(0usize, |acc, (&x, &c)| acc * c + x);
            let pi = systematic_scan_stationary(&m_cards, |m, st| factors[m][m_encode(st)].clone(), config.max_states)?;

            for (m, table) in factors.iter().enumerate() {
                for s in 0..m_states {
                    let mut st = m_decode(s);
                    let joint: Vec<f64> = (0..m_cards[m])
                        .map(|x| {
                            st[m] = x;
                            pi[m_encode(&st)]
                        })
                        .collect();
                    let tot: f64 = joint.iter().sum();
                    if tot <= 1e-300 {
                        continue;
                    }
                    let gap = joint
                        .iter()
                        .zip(&table[s])
                        .map(|(j, f)| (j / tot - f).abs())
                        .fold(0.0, f64::max);
                    if gap > config.consistency_tol {
                        return Err(IdentifyError::GibbsInconsistent { pattern: r.to_string(), gap });
                    }
                }
            }
            for (s, &p) in pi.iter().enumerate() {
                out[full_index(&m_decode(s))] = p * interp;
            }
        }
        rec.insert(r, out);
    }

    let mut probs = vec![0.0; n_xo * n_r];
    for (r, table) in &rec {
        let rv = r.numeric() as usize;
        for (xo, &p) in table.iter().enumerate() {
            probs[xo * n_r + rv] = p;
        }
    }
    let vars: Vec<TableVar> = canon.vars().to_vec();
    let rebuilt = JointTable::unnormalized(vars, probs).map_err(|e| IdentifyError::Oracle(e.to_string()))?;
    rebuilt.marginal(&full.names()).map_err(|e| IdentifyError::Oracle(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_of_independent_factors_is_product() {
        let pi = systematic_scan_stationary(&[2, 2], |v, _| if v == 0 { vec![0.3, 0.7] } else { vec![0.6, 0.4] }, 64).unwrap();
        let want = [0.18, 0.12, 0.42, 0.28];
        for (a, b) in pi.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_recovers_joint_from_its_conditionals() {
        let joint = [0.1, 0.2, 0.3, 0.4];
        let cond = |v: usize, st: &[usize]| {
            let vals: Vec<f64> = (0..2)
                .map(|x| {
                    let mut a = st.to_vec();
                    a[v] = x;
                    joint[a[0] * 2 + a[1]]
                })
                .collect();
            let t: f64 = vals.iter().sum();
            vals.iter().map(|v| v / t).collect()
        };
        let pi = systematic_scan_stationary(&[2, 2], cond, 64).unwrap();
        for (a, b) in pi.iter().zip(joint) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
