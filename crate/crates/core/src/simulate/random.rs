use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mgraph::{GraphClass, Mark, MGraph, VertexKind};

use super::{FullLawSpec, SimulateError, SpecRole, SpecVar};

/// Number of substantive variables in the large generated law.
pub const F_VARIABLES: usize = 20;
/// How many later indicators each indicator depends on.
pub const F_INDICATOR_REACH: usize = 10;
/// Default seed of [`random_dgp_graph_f`]. Most draws put almost no mass on
/// the complete case (it is a product of twenty uniform factors), which
/// leaves nothing to impute from at moderate `n`; this one gives a law the
/// whole pipeline runs on at `n = 50_000`.
pub const F_DGP_SEED: u64 = 24;

fn binary() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Random binary law that factorizes by `g` with every table entry in
/// `(margin, 1 - margin)`. Each bidirected edge becomes a fresh hidden
/// parent of its two endpoints.
pub fn random_positive_dgp(g: &MGraph, seed: u64, margin: f64) -> Result<FullLawSpec, SimulateError> {
    if g.class() == GraphClass::MCg {
        return Err(SimulateError::Unsupported("law generation for chain graphs".into()));
    }
    if !(0.0..0.5).contains(&margin) {
        return Err(SimulateError::Unsupported(format!("margin {margin} outside [0, 0.5)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taken: HashSet<&str> = g.vertices().iter().map(|v| v.name.as_str()).collect();

    let mut vars: Vec<SpecVar> = Vec::new();
    // hidden parents per graph vertex, as spec indices
    let mut hidden_of: Vec<Vec<usize>> = vec![Vec::new(); g.len()];
    for e in g.edges().filter(|e| e.mark == Mark::Bidirected) {
        let mut name = format!("U{}", vars.len() + 1);
        while taken.contains(name.as_str()) {
            name.push('_');
        }
        hidden_of[e.tail.0].push(vars.len());
        hidden_of[e.head.0].push(vars.len());
        vars.push(SpecVar { name, role: SpecRole::Hidden, categories: binary(), parents: vec![], cpt: vec![] });
    }

    // Kahn over directed edges, lowest vertex id first
    let n = g.len();
    let mut indeg = vec![0usize; n];
    for e in g.edges().filter(|e| e.mark == Mark::Directed) {
        indeg[e.head.0] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut spec_index = vec![usize::MAX; n];
    while let Some(v) = ready.pop_first() {
        let vid = crate::mgraph::VertexId(v);
        let role = match g.kind(vid) {
            VertexKind::Substantive(_) => SpecRole::Substantive,
            VertexKind::Observed => SpecRole::Observed,
            VertexKind::Indicator(k) => SpecRole::Indicator(g.name(g.substantive(k)).to_string()),
        };
        let mut parents: Vec<usize> = g
            .edges()
            .filter(|e| e.mark == Mark::Directed && e.head == vid)
            .map(|e| spec_index[e.tail.0])
            .collect();
        parents.extend(&hidden_of[v]);
        spec_index[v] = vars.len();
        vars.push(SpecVar { name: g.name(vid).to_string(), role, categories: binary(), parents, cpt: vec![] });
        for e in g.edges().filter(|e| e.mark == Mark::Directed && e.tail == vid) {
            indeg[e.head.0] -= 1;
            if indeg[e.head.0] == 0 {
                ready.insert(e.head.0);
            }
        }
    }
    for v in &mut vars {
        let rows = 1usize << v.parents.len();
        v.cpt = (0..rows)
            .map(|_| {
                let p = rng.gen_range(margin..1.0 - margin).max(margin + f64::EPSILON);
                vec![p, 1.0 - p]
            })
            .collect();
    }
    FullLawSpec::new(vars)
}

/// m-DAG of the 20-variable experiment: each `X_i` and `R_i` depends on
/// `X_{i-1}` and `X_{i-2}`, and `R_i` also on `R_{i+1} .. R_{i+10}`.
pub fn graph_f_text() -> String {
    let k = F_VARIABLES;
    let mut out = String::from("class: mdag\n");
    for i in 1..=k {
        writeln!(out, "var X{i}").unwrap();
    }
    for i in 1..=k {
        writeln!(out, "indicator R{i} for X{i}").unwrap();
    }
    for i in 1..=k {
        for d in [1, 2] {
            if i > d {
                writeln!(out, "X{} -> X{i}", i - d).unwrap();
                writeln!(out, "X{} -> R{i}", i - d).unwrap();
            }
        }
        for j in i + 1..=(i + F_INDICATOR_REACH).min(k) {
            writeln!(out, "R{j} -> R{i}").unwrap();
        }
    }
    out
}

/// Random law for [`graph_f_text`]. `p(X_i = 0 | .)` is uniform on (0, 1).
/// `p(R_i = 0 | .)` is 0 when any `R_{i+k}`, `k >= 3`, is 0; otherwise it is
/// uniform on (0, 0.5) times 1.8 when `R_{i+1}` or `R_{i+2}` is 0, and
/// uniform on (0, 1) when none of them is.
pub fn random_dgp_graph_f(seed: u64) -> FullLawSpec {
    let k = F_VARIABLES;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars: Vec<SpecVar> = Vec::with_capacity(2 * k);
    // X1..X20 at indices 0..20, then R20 down to R1
    for i in 1..=k {
        let parents: Vec<usize> = [1, 2].iter().filter(|&&d| i > d).map(|&d| i - d - 1).collect();
        let cpt = (0..1usize << parents.len())
            .map(|_| {
                let p = open_unit(&mut rng);
                vec![p, 1.0 - p]
            })
            .collect();
        vars.push(SpecVar { name: format!("X{i}"), role: SpecRole::Substantive, categories: binary(), parents, cpt });
    }
    let r_index = |j: usize| k + (k - j);
    for i in (1..=k).rev() {
        let mut parents: Vec<usize> = [1, 2].iter().filter(|&&d| i > d).map(|&d| i - d - 1).collect();
        let n_x = parents.len();
        let later: Vec<usize> = (i + 1..=(i + F_INDICATOR_REACH).min(k)).collect();
        parents.extend(later.iter().map(|&j| r_index(j)));
        let rows = 1usize << parents.len();
        let cpt = (0..rows)
            .map(|row| {
                // bit of parent `p` in `row`: last parent is least significant
                let value = |p: usize| (row >> (parents.len() - 1 - p)) & 1;
                let r_zero = |offset: usize| later.iter().position(|&j| j == i + offset).map(|q| value(n_x + q) == 0);
                let far_zero = (3..=F_INDICATOR_REACH).any(|d| r_zero(d) == Some(true));
                let near_zero = r_zero(1) == Some(true) || r_zero(2) == Some(true);
                let p = if far_zero {
                    0.0
                } else if near_zero {
                    open_unit(&mut rng) * 0.5 * 1.8
                } else {
                    open_unit(&mut rng)
                };
                vec![p, 1.0 - p]
            })
            .collect();
        vars.push(SpecVar {
            name: format!("R{i}"),
            role: SpecRole::Indicator(format!("X{i}")),
            categories: binary(),
            parents,
            cpt,
        });
    }
    FullLawSpec::new(vars).expect("generated law is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgraph::parse_mgraph;
    use crate::simulate::DEFAULT_JOINT_LIMIT;

    #[test]
    fn positive_law_on_dag() {
        let g = parse_mgraph("class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> X2\nX2 -> R1\nR1 -> R2\n")
            .unwrap();
        let s = random_positive_dgp(&g, 3, 0.05).unwrap();
        assert_eq!(s.vars().len(), 4);
        let j = s.exact_joint(DEFAULT_JOINT_LIMIT).unwrap();
        assert!(j.probs().iter().all(|&p| p > 0.0));
        assert_eq!(s, random_positive_dgp(&g, 3, 0.05).unwrap());
    }

    #[test]
    fn bidirected_edges_get_hidden_parents() {
        let g = parse_mgraph(
            "class: madmg\nvar U1\nvar X2\nindicator R1 for U1\nindicator R2 for X2\nU1 <-> X2\nR1 <-> R2\n",
        )
        .unwrap();
        let s = random_positive_dgp(&g, 0, 0.05).unwrap();
        let hidden: Vec<&str> = s.vars().iter().filter(|v| v.role == SpecRole::Hidden).map(|v| v.name.as_str()).collect();
        assert_eq!(hidden, ["U1_", "U2"]);
        assert_eq!(s.var("X2").unwrap().parents.len(), 1);
    }

    #[test]
    fn chain_graphs_rejected() {
        let g = parse_mgraph("class: mcg\nvar X\nindicator R for X\n").unwrap();
        assert!(random_positive_dgp(&g, 0, 0.05).is_err());
    }

    #[test]
    fn graph_f_rules() {
        let s = random_dgp_graph_f(5);
        let g = parse_mgraph(&graph_f_text()).unwrap();
        assert_eq!(g.k(), 20);
        crate::simulate::schema_for(&s, &g).unwrap();
        for v in s.vars().iter().filter(|v| matches!(v.role, SpecRole::Indicator(_))) {
            let i: usize = v.name[1..].parse().unwrap();
            let names: Vec<&str> = v.parents.iter().map(|&p| s.vars()[p].name.as_str()).collect();
            for (row, dist) in v.cpt.iter().enumerate() {
                let val = |name: &str| names.iter().position(|n| *n == name).map(|p| (row >> (names.len() - 1 - p)) & 1);
                let far = (3..=10).any(|d| val(&format!("R{}", i + d)) == Some(0));
                let near = val(&format!("R{}", i + 1)) == Some(0) || val(&format!("R{}", i + 2)) == Some(0);
                if far {
                    assert_eq!(dist[0], 0.0);
                } else if near {
                    assert!(dist[0] > 0.0 && dist[0] < 0.9);
                } else {
                    assert!(dist[0] > 0.0 && dist[0] < 1.0);
                }
            }
        }
        assert!(g.check_s1());
    }
}
