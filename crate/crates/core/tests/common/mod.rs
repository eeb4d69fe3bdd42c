#![allow(dead_code)]

use mispr::identify::MissingnessPattern;
use mispr::mgraph::{parse_mgraph, GraphClass, MGraph, MGraphBuilder, Mark};
use mispr::simulate::{FullLawSpec, SpecVar};
use rand::seq::SliceRandom;
use rand::Rng;

const HEADER3: &str = "var X1\nvar X2\nvar X3\nindicator R1 for X1\nindicator R2 for X2\nindicator R3 for X3\n";

/// Three-variable m-DAG whose indicators form a chain.
pub fn dag_3() -> MGraph {
    parse_mgraph(&format!(
        "class: mdag\n{HEADER3}R1 -> R2\nR2 -> R3\nX2 -> R1\nX3 -> R1\nX3 -> R2\nX1 -> R3\nX1 -> X2\nX2 -> X3\nX1 -> X3\n"
    ))
    .unwrap()
}

/// Three-variable m-ADMG with latent confounding.
pub fn admg_3() -> MGraph {
    parse_mgraph(&format!(
        "class: madmg\n{HEADER3}R1 -> R2\nR2 -> R3\nX3 -> R1\nX3 -> R2\nX1 -> R3\nR1 <-> R2\nX1 -> X2\nX2 -> X3\nX1 <-> X3\n"
    ))
    .unwrap()
}

/// Three-variable m-CG with a complete undirected indicator block.
pub fn cg_3() -> MGraph {
    parse_mgraph(&format!(
        "class: mcg\n{HEADER3}R1 -- R2\nR2 -- R3\nR1 -- R3\nX2 -> R1\nX1 -> R2\nX2 -> R3\nX3 -> R2\nX1 -> R3\nX3 -> R1\n\
         X1 -> X2\nX2 -> X3\nX1 -> X3\n"
    ))
    .unwrap()
}

/// Two-variable m-ADMG with cross-censoring.
pub fn cross_2() -> MGraph {
    parse_mgraph(
        "class: madmg\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX2 -> R1\nX1 -> R2\nX1 <-> X2\nX1 -> X2\n",
    )
    .unwrap()
}

/// Three-variable m-DAG where patterns 101 and 100 can be unsupported.
pub fn positivity_3() -> MGraph {
    parse_mgraph(&format!(
        "class: mdag\n{HEADER3}R1 -> R2\nX2 -> R1\nX3 -> R1\nX3 -> R2\nX1 -> R3\nX2 -> R3\nX1 -> X2\nX2 -> X3\nX1 -> X3\n"
    ))
    .unwrap()
}

/// Three-variable m-DAG with indicators pointing backwards.
pub fn incomparable_3() -> MGraph {
    parse_mgraph(&format!(
        "class: mdag\n{HEADER3}R2 -> R1\nR3 -> R1\nX3 -> R2\nX1 -> R3\nX2 -> R3\nX1 -> X2\nX2 -> X3\nX1 -> X3\n"
    ))
    .unwrap()
}

/// Sparse m-CG with a fully observed root.
pub fn sparse_cg_2() -> MGraph {
    parse_mgraph(
        "class: mcg\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nobserved O\n\
         O -> X1\nX1 -> X2\nO -> X2\nO -> R1\nO -> R2\nR1 -- R2\n",
    )
    .unwrap()
}

pub fn p(s: &str) -> MissingnessPattern {
    s.parse().unwrap()
}

pub fn patterns(list: &[&str]) -> Vec<MissingnessPattern> {
    list.iter().map(|s| p(s)).collect()
}

/// Random valid m-DAG or m-ADMG on at most `max_vertices` vertices.
/// Substantive and observed vertices precede indicators in the hidden
/// order, so indicators never point back at them.
pub fn random_mgraph(rng: &mut impl Rng, class: GraphClass, max_vertices: usize) -> MGraph {
    loop {
        let k = rng.gen_range(1..=max_vertices / 2);
        let observed = if 2 * k < max_vertices { rng.gen_range(0..=(max_vertices - 2 * k).min(1)) } else { 0 };
        let mut front: Vec<String> = (1..=k).map(|i| format!("X{i}")).collect();
        front.extend((1..=observed).map(|i| format!("O{i}")));
        front.shuffle(rng);
        let mut back: Vec<String> = (1..=k).map(|i| format!("R{i}")).collect();
        back.shuffle(rng);
        let order: Vec<String> = front.iter().chain(&back).cloned().collect();

        let mut b = MGraphBuilder::new(class);
        for i in 1..=k {
            b = b.var(format!("X{i}"));
        }
        for i in 1..=observed {
            b = b.observed(format!("O{i}"));
        }
        for i in 1..=k {
            b = b.indicator(format!("R{i}"), format!("X{i}"));
        }
        let density = rng.gen_range(0.15..0.6);
        for a in 0..order.len() {
            for c in a + 1..order.len() {
                if rng.gen_bool(density) {
                    b = b.edge(order[a].clone(), order[c].clone(), Mark::Directed);
                } else if class == GraphClass::MAdmg && rng.gen_bool(0.2) {
                    b = b.edge(order[a].clone(), order[c].clone(), Mark::Bidirected);
                }
            }
        }
        if let Ok(g) = b.build() {
            return g;
        }
    }
}

/// Replaces the rows of `name`'s table selected by `when` with `row`.
pub fn patch_cpt(spec: &FullLawSpec, name: &str, when: impl Fn(&[usize]) -> bool, row: Vec<f64>) -> FullLawSpec {
    let mut vars: Vec<SpecVar> = spec.vars().to_vec();
    let pos = spec.position(name).unwrap();
    let cards: Vec<usize> = vars[pos].parents.iter().map(|&q| vars[q].categories.len()).collect();
    for (idx, r) in vars[pos].cpt.iter_mut().enumerate() {
        let mut values = vec![0usize; cards.len()];
        let mut rest = idx;
        for (v, &c) in values.iter_mut().zip(&cards).rev() {
            *v = rest % c;
            rest /= c;
        }
        if when(&values) {
            *r = row.clone();
        }
    }
    FullLawSpec::new(vars).unwrap()
}
