//! The shipped model files must stay in lockstep with the library's
//! builders; these tests fail when either side drifts.

use std::path::Path;

use ftbn::{parse_fault_tree, plc, BayesianNetwork};

fn models_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../models"))
}

#[test]
fn shipped_tree_matches_builder() {
    let text = std::fs::read_to_string(models_dir().join("plc.ft")).unwrap();
    let parsed = parse_fault_tree(&text).unwrap();
    let built = plc::fault_tree();
    assert_eq!(parsed.top, built.top);
    assert_eq!(parsed.gates, built.gates);
    assert_eq!(parsed.primaries.len(), built.primaries.len());
    for (a, b) in parsed.primaries.iter().zip(&built.primaries) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.failure, b.failure);
    }
}

#[test]
fn shipped_noisy_network_matches_builder() {
    let text = std::fs::read_to_string(models_dir().join("plc_noisy.json")).unwrap();
    let shipped = BayesianNetwork::from_json_str(&text).unwrap();
    assert_eq!(shipped, plc::noisy_network());
    assert_eq!(text, plc::noisy_network().to_json_string());
}

#[test]
fn shipped_seqdep_network_matches_builder() {
    let text = std::fs::read_to_string(models_dir().join("plc_seqdep.json")).unwrap();
    let shipped = BayesianNetwork::from_json_str(&text).unwrap();
    assert_eq!(shipped, plc::seqdep_network());
    assert_eq!(text, plc::seqdep_network().to_json_string());
}
