//! Missing-data graphs (m-DAGs, m-ADMGs and m-CGs).
//!
//! Vertices are substantive variables `X_k^(1)`, their missingness indicators
//! `R_k`, and fully observed variables `O_j`. Observed proxies are not
//! materialized; consistency between a proxy and its substantive variable is
//! enforced by [`crate::data::DataTable`] instead.
//!
//! Substantive variables are indexed `0..K` in declaration order. The same
//! index addresses the paired indicator and the bit of a
//! [`crate::identify::MissingnessPattern`].

mod parse;
pub mod separation;
mod sets;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use parse::parse_mgraph;
pub use sets::StructuralSets;

/// Dense handle to a vertex of an [`MGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// A potentially missing variable; carries its substantive index.
    Substantive(usize),
    /// Missingness indicator for the substantive variable with this index.
    Indicator(usize),
    /// A variable observed in every row.
    Observed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Directed,
    Bidirected,
    Undirected,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Directed => "->",
            Mark::Bidirected => "<->",
            Mark::Undirected => "--",
        }
    }
}

/// An edge between two vertices. For symmetric marks `tail < head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub mark: Mark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphClass {
    MDag,
    MAdmg,
    MCg,
}

impl GraphClass {
    pub fn keyword(self) -> &'static str {
        match self {
            GraphClass::MDag => "mdag",
            GraphClass::MAdmg => "madmg",
            GraphClass::MCg => "mcg",
        }
    }

    fn allows(self, mark: Mark) -> bool {
        match (self, mark) {
            (_, Mark::Directed) => true,
            (GraphClass::MAdmg, Mark::Bidirected) => true,
            (GraphClass::MCg, Mark::Undirected) => true,
            _ => false,
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("substantive variable `{0}` has no missingness indicator")]
    MissingIndicator(String),
    #[error("substantive variable `{0}` has more than one indicator")]
    DuplicateIndicator(String),
    #[error("{mark} edge `{edge}` is not allowed in class {class}")]
    MarkNotAllowed { edge: String, mark: &'static str, class: GraphClass },
    #[error("indicator has outgoing edge to {target_kind}: `{edge}`")]
    IndicatorOutgoing { edge: String, target_kind: &'static str },
    #[error("self loop on `{0}`")]
    SelfLoop(String),
    #[error("directed cycle through `{0}`")]
    DirectedCycle(String),
    #[error("partially directed cycle through `{0}`")]
    PartiallyDirectedCycle(String),
    #[error("substantive index {index} out of range (K = {k})")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("separation oracle limited to {limit} vertices, graph has {actual}")]
    TooLargeForOracle { limit: usize, actual: usize },
}

/// A validated missing-data graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MGraph {
    class: GraphClass,
    vertices: Vec<Vertex>,
    edges: BTreeSet<Edge>,
    /// vertex of substantive variable k
    substantive: Vec<VertexId>,
    /// vertex of indicator k
    indicators: Vec<VertexId>,
    observed: Vec<VertexId>,
    by_name: HashMap<String, VertexId>,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
    spouses: Vec<BTreeSet<usize>>,
    neighbors: Vec<BTreeSet<usize>>,
}

/// Incremental builder; `build` checks every class invariant.
#[derive(Debug, Clone)]
pub struct MGraphBuilder {
    class: GraphClass,
    vars: Vec<String>,
    indicators: Vec<(String, String)>,
    observed: Vec<String>,
    edges: Vec<(String, String, Mark)>,
}

impl MGraphBuilder {
    pub fn new(class: GraphClass) -> Self {
        MGraphBuilder {
            class,
            vars: Vec::new(),
            indicators: Vec::new(),
            observed: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn var(mut self, name: impl Into<String>) -> Self {
        self.vars.push(name.into());
        self
    }

    pub fn indicator(mut self, name: impl Into<String>, of: impl Into<String>) -> Self {
        self.indicators.push((name.into(), of.into()));
        self
    }

    pub fn observed(mut self, name: impl Into<String>) -> Self {
        self.observed.push(name.into());
        self
    }

    pub fn edge(mut self, tail: impl Into<String>, head: impl Into<String>, mark: Mark) -> Self {
        self.edges.push((tail.into(), head.into(), mark));
        self
    }

    pub fn build(self) -> Result<MGraph, GraphError> {
        let mut vertices = Vec::new();
        let mut by_name = HashMap::new();
        let mut substantive = Vec::new();
        let mut observed = Vec::new();

        let mut insert = |name: &str, kind: VertexKind, vertices: &mut Vec<Vertex>| {
            if by_name.contains_key(name) {
                return Err(GraphError::DuplicateVertex(name.to_string()));
            }
            let id = VertexId(vertices.len());
            by_name.insert(name.to_string(), id);
            vertices.push(Vertex { name: name.to_string(), kind });
            Ok(id)
        };

        for (k, name) in self.vars.iter().enumerate() {
            substantive.push(insert(name, VertexKind::Substantive(k), &mut vertices)?);
        }
        let mut indicators: Vec<Option<VertexId>> = vec![None; substantive.len()];
        for (name, of) in &self.indicators {
            let k = self
                .vars
                .iter()
                .position(|v| v == of)
                .ok_or_else(|| GraphError::UnknownVertex(of.clone()))?;
            if indicators[k].is_some() {
                return Err(GraphError::DuplicateIndicator(of.clone()));
            }
            indicators[k] = Some(insert(name, VertexKind::Indicator(k), &mut vertices)?);
        }
        for name in &self.observed {
            observed.push(insert(name, VertexKind::Observed, &mut vertices)?);
        }
        let indicators = indicators
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| GraphError::MissingIndicator(self.vars[k].clone())))
            .collect::<Result<Vec<_>, _>>()?;

        let lookup = |name: &str| {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
        };
        let mut edges = BTreeSet::new();
        for (tail, head, mark) in &self.edges {
            let (t, h) = (lookup(tail)?, lookup(head)?);
            edges.insert(normalize_edge(t, h, *mark));
        }

        MGraph::from_parts(self.class, vertices, edges, substantive, indicators, observed, by_name)
    }
}

fn normalize_edge(tail: VertexId, head: VertexId, mark: Mark) -> Edge {
    match mark {
        Mark::Directed => Edge { tail, head, mark },
        _ => Edge { tail: tail.min(head), head: tail.max(head), mark },
    }
}

impl MGraph {
    fn from_parts(
        class: GraphClass,
        vertices: Vec<Vertex>,
        edges: BTreeSet<Edge>,
        substantive: Vec<VertexId>,
        indicators: Vec<VertexId>,
        observed: Vec<VertexId>,
        by_name: HashMap<String, VertexId>,
    ) -> Result<MGraph, GraphError> {
        let n = vertices.len();
        let mut parents = vec![BTreeSet::new(); n];
        let mut children = vec![BTreeSet::new(); n];
        let mut spouses = vec![BTreeSet::new(); n];
        let mut neighbors = vec![BTreeSet::new(); n];
        for e in &edges {
            let render = || edge_text(&vertices, e);
            if e.tail == e.head {
                return Err(GraphError::SelfLoop(vertices[e.tail.0].name.clone()));
            }
            if !class.allows(e.mark) {
                return Err(GraphError::MarkNotAllowed {
                    edge: render(),
                    mark: match e.mark {
                        Mark::Directed => "directed",
                        Mark::Bidirected => "bidirected",
                        Mark::Undirected => "undirected",
                    },
                    class,
                });
            }
            let (t, h) = (e.tail.0, e.head.0);
            match e.mark {
                Mark::Directed => {
                    if let VertexKind::Indicator(_) = vertices[t].kind {
                        let target_kind = match vertices[h].kind {
                            VertexKind::Substantive(_) => Some("substantive"),
                            VertexKind::Observed => Some("observed"),
                            VertexKind::Indicator(_) => None,
                        };
                        if let Some(target_kind) = target_kind {
                            return Err(GraphError::IndicatorOutgoing { edge: render(), target_kind });
                        }
                    }
                    parents[h].insert(t);
                    children[t].insert(h);
                }
                Mark::Bidirected => {
                    spouses[t].insert(h);
                    spouses[h].insert(t);
                }
                Mark::Undirected => {
                    neighbors[t].insert(h);
                    neighbors[h].insert(t);
                }
            }
        }
        let g = MGraph {
            class,
            vertices,
            edges,
            substantive,
            indicators,
            observed,
            by_name,
            parents,
            children,
            spouses,
            neighbors,
        };
        g.check_acyclic()?;
        Ok(g)
    }

    /// Directed acyclicity for mDAG/mADMG; absence of partially directed
    /// cycles for mCG (checked on the graph of chain components).
    fn check_acyclic(&self) -> Result<(), GraphError> {
        let n = self.vertices.len();
        let comp = self.undirected_components();
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut succ = vec![BTreeSet::new(); ncomp];
        for v in 0..n {
            for &c in &self.children[v] {
                if comp[v] == comp[c] {
                    let name = self.vertices[v].name.clone();
                    return Err(if self.class == GraphClass::MCg {
                        GraphError::PartiallyDirectedCycle(name)
                    } else {
                        GraphError::DirectedCycle(name)
                    });
                }
                succ[comp[v]].insert(comp[c]);
            }
        }
        // Kahn over components
        let mut indeg = vec![0usize; ncomp];
        for s in &succ {
            for &t in s {
                indeg[t] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..ncomp).filter(|&c| indeg[c] == 0).collect();
        let mut seen = 0;
        while let Some(c) = stack.pop() {
            seen += 1;
            for &t in &succ[c] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        if seen == ncomp {
            return Ok(());
        }
        let culprit = (0..n).find(|&v| indeg[comp[v]] > 0).unwrap_or(0);
        let name = self.vertices[culprit].name.clone();
        Err(if self.class == GraphClass::MCg {
            GraphError::PartiallyDirectedCycle(name)
        } else {
            GraphError::DirectedCycle(name)
        })
    }

    /// Component label of every vertex in the undirected-edge subgraph.
    pub(crate) fn undirected_components(&self) -> Vec<usize> {
        components(self.vertices.len(), |v| self.neighbors[v].iter().copied())
    }

    /// Component label of every vertex in the bidirected-edge subgraph.
    pub(crate) fn bidirected_components(&self) -> Vec<usize> {
        components(self.vertices.len(), |v| self.spouses[v].iter().copied())
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of substantive (potentially missing) variables.
    pub fn k(&self) -> usize {
        self.substantive.len()
    }

    pub fn id(&self, name: &str) -> Result<VertexId, GraphError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.vertices[v.0].name
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.vertices[v.0].kind
    }

    pub fn substantive(&self, k: usize) -> VertexId {
        self.substantive[k]
    }

    pub fn indicator(&self, k: usize) -> VertexId {
        self.indicators[k]
    }

    pub fn substantive_vertices(&self) -> &[VertexId] {
        &self.substantive
    }

    pub fn indicator_vertices(&self) -> &[VertexId] {
        &self.indicators
    }

    pub fn observed_vertices(&self) -> &[VertexId] {
        &self.observed
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.0 < self.vertices.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(format!("#{}", v.0)))
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<(), GraphError> {
        if index < self.k() {
            Ok(())
        } else {
            Err(GraphError::IndexOutOfRange { index, k: self.k() })
        }
    }

    pub(crate) fn parents_of(&self, v: usize) -> &BTreeSet<usize> {
        &self.parents[v]
    }

    pub(crate) fn children_of(&self, v: usize) -> &BTreeSet<usize> {
        &self.children[v]
    }

    pub(crate) fn spouses_of(&self, v: usize) -> &BTreeSet<usize> {
        &self.spouses[v]
    }

    pub(crate) fn neighbors_of(&self, v: usize) -> &BTreeSet<usize> {
        &self.neighbors[v]
    }

    /// Sorts vertex ids lexicographically by name, the order used whenever
    /// a set is rendered.
    pub fn sorted_by_name(&self, set: impl IntoIterator<Item = VertexId>) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = set.into_iter().collect();
        v.sort_by(|a, b| self.name(*a).cmp(self.name(*b)));
        v
    }

    /// Renders in the graph file format. Vertices keep declaration order so
    /// substantive indices survive a round trip; edges are sorted by name.
    pub fn to_text(&self) -> String {
        let mut out = format!("class: {}\n", self.class.keyword());
        for &v in &self.substantive {
            out.push_str(&format!("var {}\n", self.name(v)));
        }
        for (k, &v) in self.indicators.iter().enumerate() {
            out.push_str(&format!("indicator {} for {}\n", self.name(v), self.name(self.substantive[k])));
        }
        for &v in &self.observed {
            out.push_str(&format!("observed {}\n", self.name(v)));
        }
        let mut lines: Vec<(String, String, Mark)> = self
            .edges
            .iter()
            .map(|e| {
                let (mut t, mut h) = (self.name(e.tail).to_string(), self.name(e.head).to_string());
                if e.mark != Mark::Directed && h < t {
                    std::mem::swap(&mut t, &mut h);
                }
                (t, h, e.mark)
            })
            .collect();
        lines.sort();
        for (t, h, m) in lines {
            out.push_str(&format!("{} {} {}\n", t, m.symbol(), h));
        }
        out
    }
}

fn edge_text(vertices: &[Vertex], e: &Edge) -> String {
    format!("{} {} {}", vertices[e.tail.0].name, e.mark.symbol(), vertices[e.head.0].name)
}

fn components<F, I>(n: usize, adj: F) -> Vec<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for w in adj(v) {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

impl fmt::Display for MGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
