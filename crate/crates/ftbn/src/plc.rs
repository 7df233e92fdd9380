//! The bundled case study: a redundant programmable logic controller.
//!
//! The system processes a digital signal through three channels (A, B, C),
//! each with a digital input unit (DI), a CPU and a digital output unit
//! (DO) connected by a channel bus (IObus). Each CPU also reads the other
//! channels' input signals over a tri-bus and takes a 2-of-3 software
//! vote; a hardware voter takes a 2-of-3 vote over the channel outputs.
//! Two independent power supplies complete the system — both must fail to
//! bring it down.
//!
//! The fault tree below captures that architecture; the top event `TE` is
//! loss of the controller output:
//!
//! * `TE = or(PSS, Voter, CH)`
//! * `PSS = and(PS1, PS2)`
//! * `CH = 2 of 3(Ch_A, Ch_B, Ch_C)`
//! * `Ch_X = or(CPU_X, DO_X, IObus_X, In_X)`
//! * `In_X = 2 of 3(Inp_X_A, Inp_X_B, Inp_X_C)` — the software vote
//! * `Inp_X_X = or(DI_X, IObus_X)`; `Inp_X_Y = or(DI_Y, IObus_Y, Tribus_X)`
//!   for `Y ≠ X`
//!
//! with 18 primary events: `PS1`, `PS2`, `Voter`, and per channel `CPU_X`,
//! `DI_X`, `DO_X`, `IObus_X`, `Tribus_X`. Note the sharing: every `DI_Y`
//! and `IObus_Y` feeds input gates of all three channels, which is what
//! makes the Bayesian-network compilation (one root per distinct
//! component) worthwhile.
//!
//! Failure rates come from the study's reliability data and are evaluated
//! at the reference mission time of 4·10⁵ hours. [`published_priors`]
//! carries the component failure probabilities exactly as tabulated in
//! that data (five decimals); analyses reproduce the study's reported
//! figures only with these priors, because the published posteriors were
//! themselves computed from the tabulated values.

use std::collections::BTreeMap;

use crate::bn::{BayesianNetwork, CptSpec, Node, Variable};
use crate::compile::compile;
use crate::ft::{EventId, FaultTree, Gate, GateKind, PrimaryEvent};
use crate::reliability::FailureModel;

/// Mission time (hours) at which the study's figures are reported.
pub const MISSION_TIME_HOURS: f64 = 4.0e5;

const CHANNELS: [char; 3] = ['A', 'B', 'C'];

/// Failure rates per component class, in failures/hour.
pub const FAILURE_RATES: [(&str, f64); 7] = [
    ("IObus", 2.0e-9),
    ("Tribus", 2.0e-9),
    ("Voter", 6.6e-8),
    ("DO", 2.45e-7),
    ("DI", 2.8e-7),
    ("PS", 3.37e-7),
    ("CPU", 4.82e-7),
];

/// Component failure probabilities at the reference mission time, exactly
/// as tabulated in the study's reliability data (five decimals).
pub const PUBLISHED_PROBABILITIES: [(&str, f64); 7] = [
    ("IObus", 0.00080),
    ("Tribus", 0.00080),
    ("Voter", 0.02605),
    ("DO", 0.09335),
    ("DI", 0.10595),
    ("PS", 0.12611),
    ("CPU", 0.17535),
];

fn rate_of(class: &str) -> f64 {
    FAILURE_RATES
        .iter()
        .find(|(c, _)| *c == class)
        .expect("known class")
        .1
}

/// The PLC fault tree: 18 primary events and 18 gates.
pub fn fault_tree() -> FaultTree {
    let mut primaries = vec![
        PrimaryEvent::new("PS1", "PS", FailureModel::exponential(rate_of("PS"))),
        PrimaryEvent::new("PS2", "PS", FailureModel::exponential(rate_of("PS"))),
        PrimaryEvent::new(
            "Voter",
            "Voter",
            FailureModel::exponential(rate_of("Voter")),
        ),
    ];
    for x in CHANNELS {
        for class in ["CPU", "DI", "DO", "IObus", "Tribus"] {
            primaries.push(PrimaryEvent::new(
                format!("{class}_{x}"),
                class,
                FailureModel::exponential(rate_of(class)),
            ));
        }
    }

    let mut gates = Vec::with_capacity(18);
    for x in CHANNELS {
        // software 2-of-3 vote over this channel's view of the three inputs
        for y in CHANNELS {
            let output = format!("Inp_{x}_{y}");
            let mut inputs: Vec<EventId> =
                vec![format!("DI_{y}").into(), format!("IObus_{y}").into()];
            if y != x {
                inputs.push(format!("Tribus_{x}").into());
            }
            gates.push(Gate::new(GateKind::Or, output, inputs));
        }
        gates.push(Gate::new(
            GateKind::KofN { k: 2, n: 3 },
            format!("In_{x}"),
            CHANNELS
                .iter()
                .map(|y| EventId::from(format!("Inp_{x}_{y}")))
                .collect(),
        ));
        gates.push(Gate::new(
            GateKind::Or,
            format!("Ch_{x}"),
            vec![
                format!("CPU_{x}").into(),
                format!("DO_{x}").into(),
                format!("IObus_{x}").into(),
                format!("In_{x}").into(),
            ],
        ));
    }
    gates.push(Gate::new(
        GateKind::KofN { k: 2, n: 3 },
        "CH",
        CHANNELS
            .iter()
            .map(|x| EventId::from(format!("Ch_{x}")))
            .collect(),
    ));
    gates.push(Gate::new(
        GateKind::And,
        "PSS",
        vec!["PS1".into(), "PS2".into()],
    ));
    gates.push(Gate::new(
        GateKind::Or,
        "TE",
        vec!["PSS".into(), "Voter".into(), "CH".into()],
    ));

    FaultTree {
        primaries,
        gates,
        top: "TE".into(),
    }
}

/// The tabulated component failure probabilities, one entry per primary.
pub fn published_priors() -> BTreeMap<EventId, f64> {
    fault_tree()
        .primaries
        .iter()
        .map(|p| {
            let prob = PUBLISHED_PROBABILITIES
                .iter()
                .find(|(c, _)| *c == p.component_class)
                .expect("known class")
                .1;
            (p.id.clone(), prob)
        })
        .collect()
}

/// The PLC network compiled with the tabulated priors.
pub fn network() -> BayesianNetwork {
    let ft = fault_tree();
    let priors = published_priors();
    compile(&ft, &priors).expect("case study compiles").0
}

/// Variant with an uncertain top gate: a spare power supplier, available
/// 30% of the time, may keep the system up when both modeled supplies are
/// down, and a small leak accounts for unmodeled common causes. The top
/// event becomes a noisy-or with c = (0.7, 1, 1) over (PSS, Voter, CH)
/// and leak 10⁻⁴.
pub fn noisy_network() -> BayesianNetwork {
    network()
        .with_dependency(
            "TE",
            vec!["PSS".into(), "Voter".into(), "CH".into()],
            CptSpec::NoisyOr {
                c: vec![0.7, 1.0, 1.0],
                leak: 1e-4,
            },
        )
        .expect("noisy variant is valid")
}

/// Variant with sequentially dependent failures: each power supply is
/// three-state (working / over-voltage / dead) and an over-voltage may
/// damage the CPUs. CPUs become noisy-max children of both supplies with
/// c(over-voltage) = 0.66667 and c(dead) = 1; the power subsystem fails
/// when both supplies are dead (an over-voltage supply still delivers
/// power — its harm is the CPU damage). The tabulated supply failure
/// probability is split evenly between the two failure modes.
pub fn seqdep_network() -> BayesianNetwork {
    let mut net = network();

    let p_ps = PUBLISHED_PROBABILITIES
        .iter()
        .find(|(c, _)| *c == "PS")
        .unwrap()
        .1;
    let half = p_ps / 2.0;
    for ps in ["PS1", "PS2"] {
        let position = net.node_position(ps).expect("supply node exists");
        net.nodes[position] = Node::root(
            Variable::new(ps, vec!["working", "over-voltage", "dead"]),
            vec![1.0 - p_ps, half, half],
        );
    }

    // both supplies dead <=> no power
    let dead_and = CptSpec::Table {
        rows: (0..9)
            .map(|row| {
                if row == 8 {
                    vec![0.0, 1.0]
                } else {
                    vec![1.0, 0.0]
                }
            })
            .collect(),
    };
    net = net
        .with_dependency("PSS", vec!["PS1".into(), "PS2".into()], dead_and)
        .expect("power subsystem accepts three-state parents");

    for x in CHANNELS {
        net = net
            .with_dependency(
                &format!("CPU_{x}"),
                vec!["PS1".into(), "PS2".into()],
                CptSpec::NoisyMax {
                    c: vec![vec![0.66667, 1.0], vec![0.66667, 1.0]],
                    leak: 0.0,
                },
            )
            .expect("supply-induced CPU failure is valid");
    }
    net
}
