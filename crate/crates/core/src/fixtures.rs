//! Example graphs shipped with the crate.

use crate::error::Result;
use crate::format::parse_graph;
use crate::graph::MixedGraph;

pub const FIG1_G: &str = include_str!("../fixtures/fig1_g.graph");
pub const FIG2_G: &str = include_str!("../fixtures/fig2_g.graph");
pub const EX4: &str = include_str!("../fixtures/ex4.graph");
pub const MOTIV: &str = include_str!("../fixtures/motiv.graph");
pub const EX5: &str = include_str!("../fixtures/ex5.graph");
pub const MAG1: &str = include_str!("../fixtures/mag1.graph");
pub const RCG1: &str = include_str!("../fixtures/rcg1.graph");

/// `(name, text)` for every fixture.
pub const ALL: [(&str, &str); 7] = [
    ("FIG1_G", FIG1_G),
    ("FIG2_G", FIG2_G),
    ("EX4", EX4),
    ("MOTIV", MOTIV),
    ("EX5", EX5),
    ("MAG1", MAG1),
    ("RCG1", RCG1),
];

pub fn text(name: &str) -> Option<&'static str> {
    ALL.iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, t)| *t)
}

/// Parses a fixture by name; panics on an unknown name.
pub fn graph(name: &str) -> MixedGraph {
    load(name).expect("fixture parses")
}

pub fn load(name: &str) -> Result<MixedGraph> {
    let t = text(name).ok_or_else(|| crate::Error::UnknownNode(name.to_string()))?;
    Ok(parse_graph(t)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::GraphDocument;

    #[test]
    fn fixtures_parse_and_round_trip() {
        for (name, t) in ALL {
            let doc = GraphDocument::parse(t).unwrap();
            assert_eq!(doc.name.as_deref(), Some(name));
            assert_eq!(GraphDocument::parse(&doc.serialize()).unwrap(), doc);
        }
    }

    #[test]
    fn fig2_is_the_expected_graph() {
        let g = graph("FIG2_G");
        assert_eq!(
            g.edge_list_string(),
            "A->B, A->C, A->D, B->D, C--D, C--E, D<->F, E<->F"
        );
    }
}
