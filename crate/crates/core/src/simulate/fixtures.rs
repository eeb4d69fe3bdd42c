use std::fmt;
use std::str::FromStr;

use crate::mgraph::{parse_mgraph, MGraph};

use super::{random, FullLawSpec, SimulateError};

/// Reference data-generating processes. Names ending in `+` contain
/// exact zeros in some missingness table, so not every pattern occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    A,
    APlus,
    B,
    BPlus,
    C,
    CPlus,
    D,
    DPlus,
    EPlus,
    /// 20-variable law drawn at random from a seed.
    FPlus,
}

impl Fixture {
    pub const ALL: [Fixture; 10] = [
        Fixture::A,
        Fixture::APlus,
        Fixture::B,
        Fixture::BPlus,
        Fixture::C,
        Fixture::CPlus,
        Fixture::D,
        Fixture::DPlus,
        Fixture::EPlus,
        Fixture::FPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::A => "a",
            Fixture::APlus => "a+",
            Fixture::B => "b",
            Fixture::BPlus => "b+",
            Fixture::C => "c",
            Fixture::CPlus => "c+",
            Fixture::D => "d",
            Fixture::DPlus => "d+",
            Fixture::EPlus => "e+",
            Fixture::FPlus => "f+",
        }
    }

    fn law_text(self) -> Option<&'static str> {
        Some(match self {
            Fixture::A => include_str!("fixtures/a.law"),
            Fixture::APlus => include_str!("fixtures/a_plus.law"),
            Fixture::B => include_str!("fixtures/b.law"),
            Fixture::BPlus => include_str!("fixtures/b_plus.law"),
            Fixture::C => include_str!("fixtures/c.law"),
            Fixture::CPlus => include_str!("fixtures/c_plus.law"),
            Fixture::D => include_str!("fixtures/d.law"),
            Fixture::DPlus => include_str!("fixtures/d_plus.law"),
            Fixture::EPlus => include_str!("fixtures/e_plus.law"),
            Fixture::FPlus => return None,
        })
    }

    /// Text of the m-graph the law factorizes by.
    pub fn graph_text(self) -> String {
        match self {
            Fixture::A | Fixture::APlus => include_str!("fixtures/a.graph").to_string(),
            Fixture::B | Fixture::BPlus => include_str!("fixtures/b.graph").to_string(),
            Fixture::C | Fixture::CPlus => include_str!("fixtures/c.graph").to_string(),
            Fixture::D | Fixture::DPlus => include_str!("fixtures/d.graph").to_string(),
            Fixture::EPlus => include_str!("fixtures/e.graph").to_string(),
            Fixture::FPlus => random::graph_f_text(),
        }
    }

    pub fn graph(self) -> MGraph {
        parse_mgraph(&self.graph_text()).expect("bundled graph parses")
    }

    /// The law; `seed` only matters for [`Fixture::FPlus`].
    pub fn spec(self, seed: u64) -> FullLawSpec {
        match self.law_text() {
            Some(text) => FullLawSpec::parse(text).expect("bundled law parses"),
            None => random::random_dgp_graph_f(seed),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = SimulateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| SimulateError::UnknownFixture(s.to_string()))
    }
}

/// Law of a named fixture.
pub fn appendix_b_spec(name: &str) -> Result<FullLawSpec, SimulateError> {
    let f: Fixture = name.parse()?;
    if f == Fixture::FPlus {
        return Err(SimulateError::UnknownFixture(format!("{name} (generated; use random_dgp_graph_f)")));
    }
    Ok(f.spec(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{sample_dataset, schema_for, DEFAULT_JOINT_LIMIT};

    #[test]
    fn every_fixture_matches_its_graph() {
        for f in Fixture::ALL {
            let spec = f.spec(1);
            let g = f.graph();
            schema_for(&spec, &g).unwrap_or_else(|e| panic!("{f}: {e}"));
            // every CPT parent is a graph parent (or a hidden variable)
            for v in spec.visible() {
                let id = g.id(&v.name).unwrap();
                let sets = g.structural_sets(id).unwrap();
                for &p in &v.parents {
                    let pv = &spec.vars()[p];
                    if pv.role == crate::simulate::SpecRole::Hidden {
                        continue;
                    }
                    assert!(sets.parents.contains(&g.id(&pv.name).unwrap()), "{f}: {} -> {}", pv.name, v.name);
                }
            }
        }
    }

    #[test]
    fn transcribed_entries() {
        let bp = appendix_b_spec("b+").unwrap();
        assert_eq!(bp.conditional("X2", &["0"], "0"), Some(0.883374));
        let c = appendix_b_spec("c").unwrap();
        assert_eq!(c.conditional("R3", &["1", "1"], "0"), Some(0.577123));
        let e = appendix_b_spec("e+").unwrap();
        for x3 in ["0", "1"] {
            for x4 in ["0", "1"] {
                for x5 in ["0", "1"] {
                    assert_eq!(e.conditional("R2", &[x3, x4, x5, "0"], "0"), Some(0.0));
                }
            }
        }
        assert!(appendix_b_spec("z").is_err());
        assert!(appendix_b_spec("f+").is_err());
    }

    #[test]
    fn round_trip_text() {
        for f in Fixture::ALL.into_iter().filter(|f| *f != Fixture::FPlus) {
            let s = f.spec(0);
            assert_eq!(FullLawSpec::parse(&s.to_text()).unwrap(), s, "{f}");
        }
    }

    #[test]
    fn margin_of_observed_variable() {
        let j = appendix_b_spec("a").unwrap().exact_joint(DEFAULT_JOINT_LIMIT).unwrap();
        let m = j.marginal(&["O"]).unwrap();
        assert!((m.probs()[0] - 0.660453).abs() < 1e-15);
    }

    #[test]
    fn hidden_variables_dropped_from_joint() {
        let j = appendix_b_spec("d").unwrap().exact_joint(DEFAULT_JOINT_LIMIT).unwrap();
        assert_eq!(j.len(), 256);
        assert!(j.position("U1").is_none());
        assert!((j.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn b_plus_never_misses_second_variable() {
        let f = Fixture::BPlus;
        let t = sample_dataset(&f.spec(0), &f.graph(), 5000, 11).unwrap();
        let pats: Vec<String> = t.patterns().iter().map(|p| p.to_string()).collect();
        assert!(pats.iter().all(|p| p == "11" || p == "01"), "{pats:?}");
    }
}
