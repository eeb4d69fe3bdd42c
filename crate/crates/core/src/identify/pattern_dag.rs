use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{IdentifyError, MissingnessPattern};

/// `tail -label-> head`; `label` is a 0-based substantive index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternEdge {
    pub tail: MissingnessPattern,
    pub head: MissingnessPattern,
    pub label: usize,
}

impl PatternEdge {
    fn sort_key(&self) -> (std::cmp::Reverse<u128>, std::cmp::Reverse<u128>, usize) {
        use std::cmp::Reverse;
        (Reverse(self.tail.numeric()), Reverse(self.head.numeric()), self.label)
    }
}

impl Ord for PatternEdge {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for PatternEdge {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PatternEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.tail, self.label + 1, self.head)
    }
}

/// Directed acyclic multigraph over missingness patterns whose edges carry
/// the index of the Gibbs factor they transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDag {
    k: usize,
    nodes: BTreeSet<MissingnessPattern>,
    edges: BTreeSet<PatternEdge>,
}

/// Outcome of the root and reachability checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compatibility {
    /// Complete case present with no incoming edge.
    pub complete_case_root: bool,
    /// `(r, i)` pairs with no reachable parent along an `i`-labelled edge.
    pub unreachable: Vec<(MissingnessPattern, usize)>,
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        self.complete_case_root && self.unreachable.is_empty()
    }
}

impl PatternDag {
    pub fn new(k: usize) -> Self {
        PatternDag { k, nodes: BTreeSet::new(), edges: BTreeSet::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn add_node(&mut self, r: MissingnessPattern) -> Result<(), IdentifyError> {
        if r.k() != self.k {
            return Err(IdentifyError::LengthMismatch { expected: self.k, actual: r.k() });
        }
        self.nodes.insert(r);
        Ok(())
    }

    /// Adds `tail -label-> head`; both endpoints must already be nodes and
    /// `label` must be missing in `head`. Duplicates are ignored.
    pub fn add_edge(&mut self, tail: MissingnessPattern, head: MissingnessPattern, label: usize) -> Result<(), IdentifyError> {
        for r in [tail, head] {
            if !self.nodes.contains(&r) {
                return Err(IdentifyError::UnknownPattern(r.to_string()));
            }
        }
        if label >= self.k || !head.is_missing(label) {
            return Err(IdentifyError::BadLabel { edge: format!("{tail} -{}-> {head}", label + 1) });
        }
        if tail == head {
            return Err(IdentifyError::Cycle(tail.to_string()));
        }
        self.edges.insert(PatternEdge { tail, head, label });
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<MissingnessPattern> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<PatternEdge> {
        &self.edges
    }

    pub fn contains(&self, r: MissingnessPattern) -> bool {
        self.nodes.contains(&r)
    }

    /// `pa(r, i)`: tails of edges into `r` labelled `i`.
    pub fn parents(&self, r: MissingnessPattern, i: usize) -> Vec<MissingnessPattern> {
        self.edges
            .iter()
            .filter(|e| e.head == r && e.label == i)
            .map(|e| e.tail)
            .collect()
    }

    /// Parents grouped by label for every node.
    pub fn parent_map(&self) -> BTreeMap<(MissingnessPattern, usize), Vec<MissingnessPattern>> {
        let mut map: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for e in &self.edges {
            map.entry((e.head, e.label)).or_default().push(e.tail);
        }
        map
    }

    pub fn validate_compatibility(&self) -> Compatibility {
        let complete = MissingnessPattern::complete(self.k).ok();
        let complete_case_root = complete
            .map(|c| self.nodes.contains(&c) && !self.edges.iter().any(|e| e.head == c))
            .unwrap_or(false);

        let mut reach = BTreeSet::new();
        if let Some(c) = complete.filter(|c| self.nodes.contains(c)) {
            reach.insert(c);
            let mut stack = vec![c];
            while let Some(r) = stack.pop() {
                for e in self.edges.iter().filter(|e| e.tail == r) {
                    if reach.insert(e.head) {
                        stack.push(e.head);
                    }
                }
            }
        }
        let mut nodes: Vec<_> = self.nodes.iter().copied().collect();
        nodes.sort_by(|a, b| b.cmp(a));
        let mut unreachable = Vec::new();
        for r in nodes {
            for i in r.missing() {
                let ok = self
                    .edges
                    .iter()
                    .any(|e| e.head == r && e.label == i && reach.contains(&e.tail));
                if !ok {
                    unreachable.push((r, i));
                }
            }
        }
        Compatibility { complete_case_root, unreachable }
    }

    /// Kahn's algorithm; among ready nodes the largest pattern value goes
    /// first, which puts the complete case first whenever it is a root.
    pub fn topological_order(&self) -> Result<Vec<MissingnessPattern>, IdentifyError> {
        let mut indeg: BTreeMap<MissingnessPattern, usize> = self.nodes.iter().map(|&r| (r, 0)).collect();
        let mut succ: BTreeMap<MissingnessPattern, BTreeSet<MissingnessPattern>> = BTreeMap::new();
        for e in &self.edges {
            if succ.entry(e.tail).or_default().insert(e.head) {
                *indeg.get_mut(&e.head).expect("edge endpoints are nodes") += 1;
            }
        }
        let mut ready: BTreeSet<MissingnessPattern> =
            indeg.iter().filter(|(_, &d)| d == 0).map(|(&r, _)| r).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(r) = ready.pop_last() {
            order.push(r);
            for &h in succ.get(&r).into_iter().flatten() {
                let d = indeg.get_mut(&h).expect("edge endpoints are nodes");
                *d -= 1;
                if *d == 0 {
                    ready.insert(h);
                }
            }
        }
        if order.len() != self.nodes.len() {
            let stuck = indeg.iter().find(|(_, &d)| d > 0).map(|(r, _)| r.to_string()).unwrap_or_default();
            return Err(IdentifyError::Cycle(stuck));
        }
        Ok(order)
    }

    /// Line format: a `nodes:` header then one `tail -i-> head` per edge.
    pub fn to_text(&self) -> String {
        let mut nodes: Vec<_> = self.nodes.iter().collect();
        nodes.sort_by(|a, b| b.cmp(a));
        let mut out = String::from("nodes:");
        for r in nodes {
            out.push(' ');
            out.push_str(&r.to_string());
        }
        out.push('\n');
        for e in &self.edges {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<PatternDag, IdentifyError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("nodes:"))
            .ok_or_else(|| IdentifyError::Syntax("expected `nodes:` header".into()))?;
        let nodes = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<MissingnessPattern>, _>>()?;
        let k = nodes.first().map_or(0, |r| r.k());
        let mut dag = PatternDag::new(k);
        for r in nodes {
            dag.add_node(r)?;
        }
        for line in lines {
            let bad = || IdentifyError::Syntax(format!("malformed edge line `{line}`"));
            let (tail, rest) = line.split_once(" -").ok_or_else(bad)?;
            let (label, head) = rest.split_once("-> ").ok_or_else(bad)?;
            let label: usize = label.trim().parse().map_err(|_| bad())?;
            if label == 0 {
                return Err(bad());
            }
            dag.add_edge(tail.trim().parse()?, head.trim().parse()?, label - 1)?;
        }
        Ok(dag)
    }
}

impl fmt::Display for PatternDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
