//! Brute-force separation oracle for small graphs.
//!
//! d-/m-separation uses the augmented moral graph of the ancestral set,
//! c-separation uses the moral graph of the anterior set. The main code
//! path never calls into this module; it exists to cross-check Markov
//! blankets.

use std::collections::BTreeSet;

use super::{GraphClass, GraphError, MGraph, VertexId};

pub const DEFAULT_VERTEX_LIMIT: usize = 12;

fn closure(g: &MGraph, seed: &BTreeSet<usize>, with_neighbors: bool) -> BTreeSet<usize> {
    let mut out = seed.clone();
    let mut stack: Vec<usize> = seed.iter().copied().collect();
    while let Some(v) = stack.pop() {
        let mut next: Vec<usize> = g.parents_of(v).iter().copied().collect();
        if with_neighbors {
            next.extend(g.neighbors_of(v).iter().copied());
        }
        for w in next {
            if out.insert(w) {
                stack.push(w);
            }
        }
    }
    out
}

/// Undirected adjacency of the (augmented) moral graph restricted to `keep`.
fn moral_graph(g: &MGraph, keep: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let n = g.len();
    let mut adj = vec![BTreeSet::new(); n];
    match g.class() {
        GraphClass::MDag | GraphClass::MAdmg => {
            // u ~ w iff a collider path joins them inside `keep`
            for &v in keep {
                let mut seen = BTreeSet::new();
                // stack holds vertices entered with an arrowhead
                let mut stack = Vec::new();
                let step = |u: usize, head_at_u: bool, adj: &mut Vec<BTreeSet<usize>>, stack: &mut Vec<usize>, seen: &mut BTreeSet<usize>| {
                    if !keep.contains(&u) || u == v {
                        return;
                    }
                    adj[v].insert(u);
                    adj[u].insert(v);
                    if head_at_u && seen.insert(u) {
                        stack.push(u);
                    }
                };
                for &c in g.children_of(v) {
                    step(c, true, &mut adj, &mut stack, &mut seen);
                }
                for &s in g.spouses_of(v) {
                    step(s, true, &mut adj, &mut stack, &mut seen);
                }
                for &p in g.parents_of(v) {
                    step(p, false, &mut adj, &mut stack, &mut seen);
                }
                while let Some(c) = stack.pop() {
                    for &p in g.parents_of(c) {
                        step(p, false, &mut adj, &mut stack, &mut seen);
                    }
                    for &s in g.spouses_of(c) {
                        step(s, true, &mut adj, &mut stack, &mut seen);
                    }
                }
            }
        }
        GraphClass::MCg => {
            let comp = g.undirected_components();
            for &v in keep {
                for &w in g.children_of(v).iter().chain(g.neighbors_of(v)).chain(g.parents_of(v)) {
                    if keep.contains(&w) {
                        adj[v].insert(w);
                        adj[w].insert(v);
                    }
                }
            }
            // complete the parent set of each chain component
            let mut comps: Vec<usize> = keep.iter().map(|&v| comp[v]).collect();
            comps.sort_unstable();
            comps.dedup();
            for c in comps {
                let pas: BTreeSet<usize> = keep
                    .iter()
                    .filter(|&&v| comp[v] == c)
                    .flat_map(|&v| g.parents_of(v).iter().copied())
                    .filter(|p| keep.contains(p))
                    .collect();
                for &a in &pas {
                    for &b in &pas {
                        if a != b {
                            adj[a].insert(b);
                        }
                    }
                }
            }
        }
    }
    adj
}

/// True iff every vertex of `a` is separated from every vertex of `b`
/// given `s`, under the separation criterion of the graph's class.
pub fn separated(
    g: &MGraph,
    a: &[VertexId],
    b: &[VertexId],
    s: &[VertexId],
    vertex_limit: usize,
) -> Result<bool, GraphError> {
    if g.len() > vertex_limit {
        return Err(GraphError::TooLargeForOracle { limit: vertex_limit, actual: g.len() });
    }
    for v in a.iter().chain(b).chain(s) {
        g.check_vertex(*v)?;
    }
    let cond: BTreeSet<usize> = s.iter().map(|v| v.0).collect();
    let targets: BTreeSet<usize> = b.iter().map(|v| v.0).filter(|v| !cond.contains(v)).collect();
    let seed: BTreeSet<usize> = a.iter().chain(b).chain(s).map(|v| v.0).collect();
    let keep = closure(g, &seed, g.class() == GraphClass::MCg);
    let adj = moral_graph(g, &keep);

    let mut seen: BTreeSet<usize> = a.iter().map(|v| v.0).filter(|v| !cond.contains(v)).collect();
    let mut stack: Vec<usize> = seen.iter().copied().collect();
    while let Some(v) = stack.pop() {
        if targets.contains(&v) {
            return Ok(false);
        }
        for &w in &adj[v] {
            if !cond.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    Ok(true)
}

/// Smallest conditioning set that separates `v` from all other vertices,
/// found by enumerating subsets in order of size.
pub fn minimal_blanket(g: &MGraph, v: VertexId, vertex_limit: usize) -> Result<BTreeSet<VertexId>, GraphError> {
    if g.len() > vertex_limit {
        return Err(GraphError::TooLargeForOracle { limit: vertex_limit, actual: g.len() });
    }
    g.check_vertex(v)?;
    let others: Vec<VertexId> = (0..g.len()).map(VertexId).filter(|&w| w != v).collect();
    let m = others.len();
    let mut masks: Vec<u32> = (0..(1u32 << m)).collect();
    masks.sort_by_key(|x| (x.count_ones(), *x));
    for mask in masks {
        let (s, rest): (Vec<VertexId>, Vec<VertexId>) =
            others.iter().enumerate().fold((Vec::new(), Vec::new()), |(mut s, mut r), (k, &w)| {
                if mask >> k & 1 == 1 {
                    s.push(w)
                } else {
                    r.push(w)
                }
                (s, r)
            });
        if separated(g, &[v], &rest, &s, vertex_limit)? {
            return Ok(s.into_iter().collect());
        }
    }
    unreachable!("conditioning on every other vertex always separates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgraph::parse_mgraph;

    fn ids(g: &MGraph, names: &[&str]) -> Vec<VertexId> {
        names.iter().map(|n| g.id(n).unwrap()).collect()
    }

    #[test]
    fn collider_blocks_until_conditioned() {
        let g = parse_mgraph("class: mdag\nvar A\nvar B\nindicator R for A\nindicator C for B\nA -> R\nB -> R\nR -> C\n")
            .unwrap();
        let (a, b) = (ids(&g, &["A"]), ids(&g, &["B"]));
        assert!(separated(&g, &a, &b, &[], 12).unwrap());
        assert!(!separated(&g, &a, &b, &ids(&g, &["R"]), 12).unwrap());
        // descendant of a collider opens it too
        assert!(!separated(&g, &a, &b, &ids(&g, &["C"]), 12).unwrap());
    }

    #[test]
    fn bidirected_collider_path() {
        let g = parse_mgraph(
            "class: madmg\nvar A\nvar B\nvar C\nindicator RA for A\nindicator RB for B\nindicator RC for C\nA -> B\nB <-> C\n",
        )
        .unwrap();
        let a = ids(&g, &["A"]);
        let c = ids(&g, &["C"]);
        assert!(separated(&g, &a, &c, &[], 12).unwrap());
        assert!(!separated(&g, &a, &c, &ids(&g, &["B"]), 12).unwrap());
    }

    #[test]
    fn chain_graph_complex() {
        // A -> X -- Y <- B is a complex; A and B are dependent given X, Y
        let g = parse_mgraph(
            "class: mcg\nvar A\nvar B\nindicator X for A\nindicator Y for B\nA -> X\nX -- Y\nB -> Y\n",
        )
        .unwrap();
        let (a, b) = (ids(&g, &["A"]), ids(&g, &["B"]));
        assert!(separated(&g, &a, &b, &[], 12).unwrap());
        assert!(!separated(&g, &a, &b, &ids(&g, &["X", "Y"]), 12).unwrap());
        let mb = minimal_blanket(&g, a[0], 12).unwrap();
        assert_eq!(mb, g.markov_blanket(a[0]).unwrap());
    }

    #[test]
    fn refuses_large_graphs() {
        let mut text = String::from("class: mdag\n");
        for i in 0..7 {
            text.push_str(&format!("var X{i}\nindicator R{i} for X{i}\n"));
        }
        let g = parse_mgraph(&text).unwrap();
        assert!(matches!(
            minimal_blanket(&g, VertexId(0), DEFAULT_VERTEX_LIMIT),
            Err(GraphError::TooLargeForOracle { .. })
        ));
    }
}
