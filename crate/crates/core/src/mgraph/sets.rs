use std::collections::BTreeSet;

use super::{GraphClass, GraphError, MGraph, VertexId, VertexKind};

/// Local structural sets of one vertex. A `None` field does not apply to
/// the graph's class (districts only exist in m-ADMGs, neighbours only in
/// m-CGs, co-parents in m-DAGs and m-CGs).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructuralSets {
    pub parents: BTreeSet<VertexId>,
    pub children: BTreeSet<VertexId>,
    pub co_parents: Option<BTreeSet<VertexId>>,
    pub neighbors: Option<BTreeSet<VertexId>>,
    pub district: Option<BTreeSet<VertexId>>,
    pub boundary: Option<BTreeSet<VertexId>>,
}

fn ids(set: impl IntoIterator<Item = usize>) -> BTreeSet<VertexId> {
    set.into_iter().map(VertexId).collect()
}

impl MGraph {
    fn district_raw(&self, v: usize) -> BTreeSet<usize> {
        let comp = self.bidirected_components();
        (0..self.len()).filter(|&w| comp[w] == comp[v]).collect()
    }

    fn boundary_raw(&self, v: usize) -> BTreeSet<usize> {
        let dis = self.district_raw(v);
        let mut bd: BTreeSet<usize> = self.parents_of(v).clone();
        for &d in &dis {
            bd.extend(self.parents_of(d).iter().copied());
        }
        bd.extend(dis);
        bd
    }

    /// `V_j -> W` and `v -> W'` with `W`, `W'` in one undirected component.
    fn co_parents_raw(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        match self.class() {
            GraphClass::MCg => {
                let comp = self.undirected_components();
                let targets: BTreeSet<usize> = self.children_of(v).iter().map(|&c| comp[c]).collect();
                for w in 0..self.len() {
                    if targets.contains(&comp[w]) {
                        out.extend(self.parents_of(w).iter().copied());
                    }
                }
            }
            _ => {
                for &c in self.children_of(v) {
                    out.extend(self.parents_of(c).iter().copied());
                }
            }
        }
        out.remove(&v);
        out
    }

    pub fn structural_sets(&self, v: VertexId) -> Result<StructuralSets, GraphError> {
        self.check_vertex(v)?;
        let i = v.0;
        let mut sets = StructuralSets {
            parents: ids(self.parents_of(i).iter().copied()),
            children: ids(self.children_of(i).iter().copied()),
            ..Default::default()
        };
        match self.class() {
            GraphClass::MDag => sets.co_parents = Some(ids(self.co_parents_raw(i))),
            GraphClass::MAdmg => {
                sets.district = Some(ids(self.district_raw(i)));
                sets.boundary = Some(ids(self.boundary_raw(i)));
            }
            GraphClass::MCg => {
                sets.co_parents = Some(ids(self.co_parents_raw(i)));
                sets.neighbors = Some(ids(self.neighbors_of(i).iter().copied()));
            }
        }
        Ok(sets)
    }

    fn markov_blanket_raw(&self, v: usize) -> BTreeSet<usize> {
        let mut mb: BTreeSet<usize> = match self.class() {
            GraphClass::MDag => {
                let mut s = self.parents_of(v).clone();
                s.extend(self.children_of(v).iter().copied());
                s.extend(self.co_parents_raw(v));
                s
            }
            GraphClass::MAdmg => {
                let mut s = self.boundary_raw(v);
                for &c in self.children_of(v) {
                    s.insert(c);
                    s.extend(self.boundary_raw(c));
                }
                s
            }
            GraphClass::MCg => {
                let mut s = self.parents_of(v).clone();
                s.extend(self.neighbors_of(v).iter().copied());
                s.extend(self.children_of(v).iter().copied());
                s.extend(self.co_parents_raw(v));
                s
            }
        };
        mb.remove(&v);
        mb
    }

    pub fn markov_blanket(&self, v: VertexId) -> Result<BTreeSet<VertexId>, GraphError> {
        self.check_vertex(v)?;
        Ok(ids(self.markov_blanket_raw(v.0)))
    }

    /// Bit `j` is set iff `R_j` lies in the Markov blanket of `X_i`.
    pub fn mb_indicator_mask(&self, i: usize) -> Result<u128, GraphError> {
        self.check_index(i)?;
        let mut mask = 0u128;
        for w in self.markov_blanket_raw(self.substantive(i).0) {
            if let VertexKind::Indicator(j) = self.kind(VertexId(w)) {
                mask |= 1u128 << j;
            }
        }
        Ok(mask)
    }

    /// Masks for every substantive index; `masks()[i]` as in
    /// [`MGraph::mb_indicator_mask`].
    pub fn mb_indicator_masks(&self) -> Vec<u128> {
        (0..self.k()).map(|i| self.mb_indicator_mask(i).expect("index in range")).collect()
    }

    /// `X_i ⊥ R_j | mb(X_i)` holds in the local Markov property iff `R_j`
    /// is outside the Markov blanket of `X_i`.
    pub fn implied_independence(&self, i: usize, j: usize) -> Result<bool, GraphError> {
        self.check_index(j)?;
        Ok(self.mb_indicator_mask(i)? & (1u128 << j) == 0)
    }

    /// First index `i` whose own indicator is in its Markov blanket.
    pub fn s1_violation(&self) -> Option<usize> {
        (0..self.k()).find(|&i| !self.implied_independence(i, i).expect("index in range"))
    }

    /// No indicator lies in the Markov blanket of the variable it indicates.
    pub fn check_s1(&self) -> bool {
        self.s1_violation().is_none()
    }
}

#[cfg(test)]
mod tests {
    use crate::mgraph::parse_mgraph;

    fn names(g: &crate::mgraph::MGraph, set: impl IntoIterator<Item = crate::mgraph::VertexId>) -> Vec<String> {
        g.sorted_by_name(set).into_iter().map(|v| g.name(v).to_string()).collect()
    }

    const THREE_VAR_DAG: &str = "class: mdag\nvar X1\nvar X2\nvar X3\n\
        indicator R1 for X1\nindicator R2 for X2\nindicator R3 for X3\n\
        X1 -> X2\nX2 -> X3\nX1 -> X3\nR1 -> R2\nR2 -> R3\nX2 -> R1\nX3 -> R1\nX3 -> R2\nX1 -> R3\n";

    #[test]
    fn dag_blanket_of_first_variable() {
        let g = parse_mgraph(THREE_VAR_DAG).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.edge_count(), 9);
        let mb = g.markov_blanket(g.id("X1").unwrap()).unwrap();
        assert_eq!(names(&g, mb), ["R2", "R3", "X2", "X3"]);
        assert!(g.implied_independence(0, 0).unwrap());
        assert!(g.check_s1());
    }

    #[test]
    fn district_via_bidirected_edge() {
        let g = parse_mgraph(
            "class: madmg\nvar X1\nvar X2\nvar X3\nindicator R1 for X1\nindicator R2 for X2\nindicator R3 for X3\n\
             R1 -> R2\nR2 -> R3\nX3 -> R1\nX3 -> R2\nX1 -> R3\nR1 <-> R2\nX1 -> X2\nX2 -> X3\nX1 <-> X3\n",
        )
        .unwrap();
        let sets = g.structural_sets(g.id("R1").unwrap()).unwrap();
        assert_eq!(names(&g, sets.district.unwrap()), ["R1", "R2"]);
        assert!(sets.neighbors.is_none());
        assert!(sets.co_parents.is_none());
        assert!(g.check_s1());
    }

    #[test]
    fn isolated_vertex_has_empty_sets() {
        let g = parse_mgraph("class: mcg\nvar X\nindicator R for X\n").unwrap();
        let s = g.structural_sets(g.id("X").unwrap()).unwrap();
        assert!(s.parents.is_empty() && s.children.is_empty());
        assert!(s.co_parents.unwrap().is_empty());
        assert!(s.neighbors.unwrap().is_empty());
        assert!(g.markov_blanket(g.id("R").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn no_self_censoring_chain_graph_satisfies_s1() {
        let g = parse_mgraph(
            "class: mcg\nvar X1\nvar X2\nvar X3\nindicator R1 for X1\nindicator R2 for X2\nindicator R3 for X3\n\
             R1 -- R2\nR2 -- R3\nR1 -- R3\nX2 -> R1\nX1 -> R2\nX2 -> R3\nX3 -> R2\nX1 -> R3\nX3 -> R1\n\
             X1 -> X2\nX2 -> X3\nX1 -> X3\n",
        )
        .unwrap();
        assert!(g.check_s1());
        // X1 points into the indicator component, so X2 and X3 are co-parents
        let mb = g.markov_blanket(g.id("X1").unwrap()).unwrap();
        assert_eq!(names(&g, mb), ["R2", "R3", "X2", "X3"]);
    }

    #[test]
    fn self_censoring_and_colluder_violate_s1() {
        let sc = parse_mgraph("class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> R1\n").unwrap();
        assert!(!sc.check_s1());
        assert_eq!(sc.s1_violation(), Some(0));
        assert!(!sc.implied_independence(0, 0).unwrap());

        let coll = parse_mgraph(
            "class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> R2\nR1 -> R2\n",
        )
        .unwrap();
        assert!(!coll.check_s1());
    }

    #[test]
    fn index_out_of_range() {
        let g = parse_mgraph(THREE_VAR_DAG).unwrap();
        assert!(g.implied_independence(3, 0).is_err());
        assert!(g.implied_independence(0, 7).is_err());
    }
}
