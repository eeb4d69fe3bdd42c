mod common;

use std::time::{Duration, Instant};

use common::*;
use mispr::identify::{pm_id_construct, pm_id_plus_construct, IdentifyError, PatternDag};

fn golden(name: &str) -> PatternDag {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    PatternDag::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn assert_same(got: &PatternDag, want: &PatternDag) {
    assert_eq!(got.to_text(), want.to_text());
    assert_eq!(got.nodes(), want.nodes());
    assert_eq!(got.edges(), want.edges());
}

fn timed<T>(f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    assert!(start.elapsed() < Duration::from_secs(1));
    out
}

#[test]
fn pm_id_same_dag_for_all_three_classes() {
    let want = golden("three_var_pm_id.dag");
    assert_eq!(want.edges().len(), 12);
    for g in [dag_3(), admg_3(), cg_3()] {
        let got = timed(|| pm_id_construct(&g).unwrap());
        assert_same(&got, &want);
    }
}

#[test]
fn pm_id_ignores_support_when_building() {
    // the naive construction on the positivity graph is the full one-less-zero DAG
    let got = pm_id_construct(&positivity_3()).unwrap();
    assert_same(&got, &golden("three_var_pm_id.dag"));
}

#[test]
fn pm_id_plus_routes_around_unsupported_patterns() {
    let support = patterns(&["111", "011", "110", "010", "001", "000"]);
    let got = timed(|| pm_id_plus_construct(&positivity_3(), &support).unwrap());
    assert_same(&got.dag, &golden("positivity_pm_id_plus.dag"));
    for (t, h) in [("111", "001"), ("110", "000"), ("010", "000")] {
        assert!(got.dag.parents(p(h), 0).contains(&p(t)), "{t} -1-> {h}");
    }
    assert!(got.dag.validate_compatibility().is_compatible());
}

#[test]
fn pm_id_plus_borrows_from_incomparable_pattern() {
    let support = patterns(&["111", "110", "011", "100", "001"]);
    let got = timed(|| pm_id_plus_construct(&incomparable_3(), &support).unwrap());
    assert_same(&got.dag, &golden("incomparable_pm_id_plus.dag"));
    assert_eq!(got.dag.parents(p("100"), 2), vec![p("001")]);
}

#[test]
fn sparse_chain_graph_both_constructions() {
    let g = sparse_cg_2();
    assert_same(&pm_id_construct(&g).unwrap(), &golden("sparse_cg_pm_id.dag"));
    let all = patterns(&["11", "10", "01", "00"]);
    let plus = timed(|| pm_id_plus_construct(&g, &all).unwrap());
    assert_same(&plus.dag, &golden("sparse_cg_pm_id_plus.dag"));
    // every other pattern feeds both factors of 00
    assert_eq!(plus.dag.parents(p("00"), 0).len(), 3);
    assert_eq!(plus.dag.parents(p("00"), 1).len(), 3);
}

#[test]
fn compatibility_of_hand_built_dags() {
    let g = cross_2();
    let ok = golden("cross_compatible.dag");
    assert_same(&pm_id_construct(&g).unwrap(), &ok);
    assert!(ok.validate_compatibility().is_compatible());

    let bad = golden("cross_incompatible.dag").validate_compatibility();
    assert!(bad.complete_case_root);
    assert_eq!(bad.unreachable, vec![(p("00"), 1)]);
    assert!(!bad.is_compatible());
}

#[test]
fn complete_case_with_parent_is_not_a_root() {
    let text = "nodes: 11 10 01\n11 -2-> 10\n11 -1-> 01\n";
    let mut d = PatternDag::parse(text).unwrap();
    assert!(d.validate_compatibility().is_compatible());
    d.add_node(p("00")).unwrap();
    let c = d.validate_compatibility();
    assert_eq!(c.unreachable, vec![(p("00"), 0), (p("00"), 1)]);
    // no complete case at all
    let c = PatternDag::parse("nodes: 10 00\n10 -1-> 00\n").unwrap().validate_compatibility();
    assert!(!c.complete_case_root);
}

#[test]
fn golden_files_round_trip() {
    for name in [
        "three_var_pm_id.dag",
        "cross_compatible.dag",
        "cross_incompatible.dag",
        "positivity_pm_id_plus.dag",
        "incomparable_pm_id_plus.dag",
        "sparse_cg_pm_id.dag",
        "sparse_cg_pm_id_plus.dag",
    ] {
        let d = golden(name);
        assert_eq!(PatternDag::parse(&d.to_text()).unwrap(), d, "{name}");
    }
}

#[test]
fn pm_id_plus_fails_without_path_from_complete_case() {
    // both factors of 00 need a pattern differing only outside the blankets
    let g = mispr::mgraph::parse_mgraph(
        "class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> R2\nX2 -> R1\n",
    )
    .unwrap();
    match pm_id_plus_construct(&g, &patterns(&["11", "00"])) {
        Err(IdentifyError::Unidentified { residue }) => assert_eq!(residue, vec![p("00")]),
        other => panic!("expected failure, got {other:?}"),
    }
}

#[test]
fn pm_id_plus_on_full_support_contains_pm_id_edges_for_s1_graphs() {
    for g in [dag_3(), admg_3(), cg_3(), positivity_3(), incomparable_3()] {
        let all = mispr::identify::MissingnessPattern::all(3).unwrap();
        let plus = pm_id_plus_construct(&g, &all).unwrap().dag;
        for e in pm_id_construct(&g).unwrap().edges() {
            assert!(plus.edges().contains(e), "{e}");
        }
    }
}
