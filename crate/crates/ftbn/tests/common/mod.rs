//! Shared test support: seeded random model generators and brute-force
//! oracles, all independent of the library's analysis paths.
#![allow(dead_code)] // each test target uses a different subset

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ftbn::bn::{BayesianNetwork, CptSpec, Node, Variable};
use ftbn::compile::boolean_eval;
use ftbn::ft::{EventId, FaultTree, Gate, GateKind, PrimaryEvent};
use ftbn::reliability::FailureModel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random well-formed monotone fault tree over `n_primaries` primaries
/// with fixed-probability failure models. Some primaries are referenced
/// by several gates, so shared-leaf handling is always exercised.
pub fn random_tree(rng: &mut ChaCha8Rng, n_primaries: usize) -> FaultTree {
    assert!(n_primaries >= 2);
    let primaries: Vec<PrimaryEvent> = (0..n_primaries)
        .map(|i| {
            PrimaryEvent::new(
                format!("p{i}"),
                format!("p{i}"),
                FailureModel::fixed(rng.random_range(0.05..0.5)),
            )
        })
        .collect();

    let mut pool: Vec<EventId> = primaries.iter().map(|p| p.id.clone()).collect();
    pool.shuffle(rng);
    let mut gates: Vec<Gate> = Vec::new();
    let mut gate_counter = 0;

    while pool.len() > 1 {
        let take = rng.random_range(2..=4.min(pool.len()));
        let mut inputs: Vec<EventId> = pool.drain(..take).collect();
        // occasionally re-reference a primary already consumed elsewhere
        if rng.random_bool(0.3) {
            let extra = &primaries[rng.random_range(0..n_primaries)].id;
            if !inputs.contains(extra) {
                inputs.push(extra.clone());
            }
        }
        let n = inputs.len();
        let kind = match rng.random_range(0..3) {
            0 => GateKind::And,
            1 => GateKind::Or,
            _ => GateKind::KofN {
                k: rng.random_range(1..=n),
                n,
            },
        };
        let output = EventId::new(format!("g{gate_counter}"));
        gate_counter += 1;
        gates.push(Gate::new(kind, output.clone(), inputs));
        pool.push(output);
    }

    let ft = FaultTree {
        primaries,
        gates,
        top: pool.pop().unwrap(),
    };
    assert_eq!(ft.validate(), vec![], "generator produced an invalid tree");
    ft
}

/// A random valid network of `n_vars` binary variables mixing full
/// tables, boolean gates, and noisy gates.
pub fn random_net(rng: &mut ChaCha8Rng, n_vars: usize) -> BayesianNetwork {
    let mut nodes: Vec<Node> = Vec::with_capacity(n_vars);
    for i in 0..n_vars {
        let id = format!("v{i:02}");
        let max_parents = i.min(3);
        let n_parents = if max_parents == 0 {
            0
        } else {
            rng.random_range(0..=max_parents)
        };
        let mut choices: Vec<usize> = (0..i).collect();
        choices.shuffle(rng);
        let parents: Vec<_> = choices[..n_parents]
            .iter()
            .map(|&j| ftbn::VarId::from(format!("v{j:02}")))
            .collect();

        let cpt = if parents.is_empty() {
            let p = rng.random_range(0.05..0.95);
            CptSpec::Table {
                rows: vec![vec![1.0 - p, p]],
            }
        } else {
            match rng.random_range(0..4) {
                0 => {
                    let rows = (0..1usize << parents.len())
                        .map(|_| {
                            let p: f64 = rng.random_range(0.0..1.0);
                            vec![1.0 - p, p]
                        })
                        .collect();
                    CptSpec::Table { rows }
                }
                1 if parents.len() >= 2 => match rng.random_range(0..3) {
                    0 => CptSpec::And,
                    1 => CptSpec::Or,
                    _ => CptSpec::KOfN {
                        k: rng.random_range(1..=parents.len()),
                    },
                },
                2 => CptSpec::NoisyOr {
                    c: (0..parents.len())
                        .map(|_| rng.random_range(0.0..1.0))
                        .collect(),
                    leak: rng.random_range(0.0..0.2),
                },
                _ => CptSpec::NoisyAnd {
                    c: (0..parents.len())
                        .map(|_| rng.random_range(0.0..1.0))
                        .collect(),
                },
            }
        };
        nodes.push(Node::new(Variable::binary(id), parents, cpt));
    }
    let net = BayesianNetwork::new(nodes);
    assert_eq!(net.validate(), vec![], "generator produced an invalid net");
    net
}

/// All minimal cut sets of a tree with at most ~16 primaries, directly
/// from the definition: S is an MCS iff S fails the top event and no
/// single removal still does.
pub fn brute_force_mcs(ft: &FaultTree) -> Vec<BTreeSet<EventId>> {
    let ids: Vec<EventId> = ft.primaries.iter().map(|p| p.id.clone()).collect();
    let n = ids.len();
    assert!(n <= 16, "brute force oracle is exponential");

    let eval_mask = |mask: u32| -> bool {
        let assignment: BTreeMap<EventId, bool> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), mask >> i & 1 == 1))
            .collect();
        boolean_eval(ft, &assignment).unwrap()
    };

    let mut out = Vec::new();
    for mask in 1u32..1 << n {
        if !eval_mask(mask) {
            continue;
        }
        let minimal = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .all(|i| !eval_mask(mask & !(1 << i)));
        if minimal {
            out.push(
                (0..n)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| ids[i].clone())
                    .collect(),
            );
        }
    }
    out.sort_by(|a: &BTreeSet<EventId>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Conditional marginal computed from a joint enumeration, independent of
/// variable elimination.
pub fn oracle_marginal(joint: &ftbn::infer::JointEnumeration, var: &str, card: usize) -> Vec<f64> {
    let pos = joint.position_of(var).unwrap();
    let mut mass = vec![0.0; card];
    for (states, m) in joint.entries() {
        mass[states[pos] as usize] += m;
    }
    let z: f64 = mass.iter().sum();
    mass.iter().map(|m| m / z).collect()
}
