//! Acceptance suite for the bundled PLC case study and the library's
//! cross-checked properties. Each test prints one PASS line (visible with
//! `--nocapture`); a failure names the value that missed its tolerance.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;

use ftbn::bn::CptSpec;
use ftbn::compile::{boolean_eval, compile};
use ftbn::cutsets::{minimal_cut_sets, score_cut_sets};
use ftbn::infer::{
    enumerate_joint, marginal, query_probability, top_k_diagnoses, Evidence, Propagator,
    RankedDiagnosis,
};
use ftbn::reliability::{failure_probability, FailureModel, MissionTime};
use ftbn::{plc, BayesianNetwork, EventId, VarId, STATE_FAULTY, STATE_WORKING};

use rand::prelude::*;

const TOL: f64 = 1e-5;

fn assert_close(what: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got:.7}, want {want:.5} (tolerance {tol:e})"
    );
}

fn faulty_set(net: &BayesianNetwork, d: &RankedDiagnosis) -> BTreeSet<String> {
    d.non_working(net)
        .into_iter()
        .map(|(v, _)| v.as_str().to_owned())
        .collect()
}

fn set_of(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| (*s).to_owned()).collect()
}

#[test]
fn criterion_1_component_probability_table() {
    let t = MissionTime::hours(plc::MISSION_TIME_HOURS).unwrap();
    for (class, rate) in plc::FAILURE_RATES {
        let expected = plc::PUBLISHED_PROBABILITIES
            .iter()
            .find(|(c, _)| *c == class)
            .unwrap()
            .1;
        let got = failure_probability(FailureModel::exponential(rate), t);
        assert_close(&format!("P({class})"), got, expected, TOL);
    }
    println!("acceptance criterion 1: component failure probabilities at t=4e5 ... PASS");
}

#[test]
fn criterion_2_event_probabilities() {
    let net = plc::network();
    let p = |var: &str| {
        marginal(&net, &VarId::from(var), &Evidence::none())
            .unwrap()
            .p(STATE_FAULTY)
            .unwrap()
    };
    assert_close("P(TE)", p("TE"), 0.22053, TOL);
    assert_close("P(CH)", p("CH"), 0.18674, TOL);
    for x in ["A", "B", "C"] {
        assert_close(&format!("P(In_{x})"), p(&format!("In_{x}")), 0.03248, TOL);
    }
    println!("acceptance criterion 2: top-event and sub-system probabilities ... PASS");
}

/// Table rows: (member sets that may permute among themselves,
/// unreliability, posterior unreliability, diagnosis posterior).
fn table_2_groups() -> Vec<(Vec<BTreeSet<String>>, f64, f64, f64)> {
    let cpu_pairs = vec![
        set_of(&["CPU_A", "CPU_B"]),
        set_of(&["CPU_B", "CPU_C"]),
        set_of(&["CPU_A", "CPU_C"]),
    ];
    let cpu_do_pairs = vec![
        set_of(&["CPU_A", "DO_C"]),
        set_of(&["CPU_A", "DO_B"]),
        set_of(&["CPU_B", "DO_A"]),
        set_of(&["CPU_B", "DO_C"]),
        set_of(&["CPU_C", "DO_A"]),
        set_of(&["CPU_C", "DO_B"]),
    ];
    vec![
        (cpu_pairs, 0.03075, 0.13943, 0.04533),
        (vec![set_of(&["Voter"])], 0.02605, 0.11812, 0.02681),
        (cpu_do_pairs, 0.01637, 0.07423, 0.02195),
        (vec![set_of(&["PS1", "PS2"])], 0.01590, 0.07212, 0.02088),
    ]
}

#[test]
fn criterion_3_minimal_cut_sets_and_scores() {
    let ft = plc::fault_tree();
    let mcs = minimal_cut_sets(&ft).unwrap();
    assert_eq!(mcs.len(), 59, "expected 59 minimal cut sets");
    assert_eq!(mcs.iter().filter(|c| c.order() == 1).count(), 1);
    assert_eq!(mcs.iter().filter(|c| c.order() == 2).count(), 58);

    let net = plc::network();
    let priors = plc::published_priors();
    let scored = score_cut_sets(&ft, &net, &priors).unwrap();
    assert_eq!(scored.len(), 59);

    let mut row = 0;
    for (sets, unrel, post_unrel, diag_post) in table_2_groups() {
        let got: Vec<BTreeSet<String>> = scored[row..row + sets.len()]
            .iter()
            .map(|s| {
                s.cutset
                    .members()
                    .iter()
                    .map(|m| m.as_str().to_owned())
                    .collect()
            })
            .collect();
        for s in &sets {
            assert!(got.contains(s), "rows {row}..: expected member set {s:?}");
        }
        for s in &scored[row..row + sets.len()] {
            let name = s.cutset.to_string();
            assert_close(
                &format!("{name} unreliability"),
                s.unreliability,
                unrel,
                TOL,
            );
            assert_close(
                &format!("{name} posterior unreliability"),
                s.posterior_unreliability,
                post_unrel,
                TOL,
            );
            assert_close(
                &format!("{name} diagnosis posterior"),
                s.diagnosis_posterior,
                diag_post,
                TOL,
            );
        }
        row += sets.len();
    }
    assert_eq!(row, 11);
    println!("acceptance criterion 3: 59 minimal cut sets, top 11 scores ... PASS");
}

#[test]
fn criterion_4_component_posteriors() {
    let net = plc::network();
    let ev = Evidence::observe("TE", STATE_FAULTY);
    let expected = [
        ("Tribus", 0.00175),
        ("IObus", 0.00208),
        ("Voter", 0.11812),
        ("DI", 0.17167),
        ("PS", 0.17603),
        ("DO", 0.20433),
        ("CPU", 0.38382),
    ];
    for p in plc::fault_tree().primaries {
        let want = expected
            .iter()
            .find(|(c, _)| *c == p.component_class)
            .unwrap()
            .1;
        let got = marginal(&net, &VarId::from(&p.id), &ev)
            .unwrap()
            .p(STATE_FAULTY)
            .unwrap();
        assert_close(&format!("P({} | TE)", p.id), got, want, TOL);
    }
    println!("acceptance criterion 4: component posteriors given system failure ... PASS");
}

#[test]
fn criterion_5_ranked_diagnoses() {
    let net = plc::network();
    let ev = Evidence::observe("TE", STATE_FAULTY);
    let top = top_k_diagnoses(&net, &ev, 18).unwrap();
    assert_eq!(top.len(), 18);

    let mut row = 0;
    for (sets, _, _, diag_post) in table_2_groups() {
        let got: Vec<BTreeSet<String>> = top[row..row + sets.len()]
            .iter()
            .map(|d| faulty_set(&net, d))
            .collect();
        for s in &sets {
            assert!(got.contains(s), "diagnosis rows {row}..: expected {s:?}");
        }
        for d in &top[row..row + sets.len()] {
            assert_close(
                &format!("posterior of {:?}", faulty_set(&net, d)),
                d.posterior,
                diag_post,
                TOL,
            );
        }
        row += sets.len();
    }
    assert_eq!(row, 11);

    let eighteenth = &top[17];
    assert_eq!(
        faulty_set(&net, eighteenth),
        set_of(&["CPU_A", "CPU_B", "CPU_C"]),
        "18th diagnosis must be all three CPUs faulty"
    );
    assert_close(
        "18th diagnosis posterior",
        eighteenth.posterior,
        0.00963,
        TOL,
    );
    println!("acceptance criterion 5: ranked complete diagnoses ... PASS");
}

#[test]
fn criterion_6_noisy_gate_arithmetic() {
    const EXACT: f64 = 1e-9;

    // noisy-or over (PSS, Voter, CH), c = (0.7, 1, 1)
    let rows = CptSpec::NoisyOr {
        c: vec![0.7, 1.0, 1.0],
        leak: 0.0,
    }
    .expand(&[2, 2, 2], 2)
    .unwrap();
    assert_close(
        "noisy-or (faulty,w,w)",
        rows[0b100][1],
        1.0 - (1.0 - 0.7),
        EXACT,
    );
    assert_close("noisy-or (f,f,f)", rows[0b111][1], 1.0, EXACT);

    let rows = CptSpec::NoisyOr {
        c: vec![0.7, 1.0, 1.0],
        leak: 1e-4,
    }
    .expand(&[2, 2, 2], 2)
    .unwrap();
    assert_close(
        "leaky noisy-or (faulty,w,w)",
        rows[0b100][1],
        1.0 - (1.0 - 0.7) * (1.0 - 0.0001),
        EXACT,
    );
    assert_close("leaky noisy-or (w,w,w)", rows[0b000][1], 0.0001, EXACT);
    assert_close(
        "leaky noisy-or (faulty,w,w) print",
        rows[0b100][1],
        0.70003,
        TOL,
    );

    // noisy-and over (PS1, PS2), c = (0.01, 0.01)
    let rows = CptSpec::NoisyAnd {
        c: vec![0.01, 0.01],
    }
    .expand(&[2, 2], 2)
    .unwrap();
    assert_close("noisy-and (f,f)", rows[0b11][1], 1.0, EXACT);
    assert_close("noisy-and (w,w)", rows[0b00][1], 0.01 * 0.01, EXACT);

    // noisy-max over three-state supplies, c = (0.66667, 1) per parent
    let rows = CptSpec::NoisyMax {
        c: vec![vec![0.66667, 1.0], vec![0.66667, 1.0]],
        leak: 0.0,
    }
    .expand(&[3, 3], 2)
    .unwrap();
    assert_close("noisy-max (w,w)", rows[0][1], 0.0, EXACT);
    assert_close("noisy-max (dead,dead)", rows[8][1], 1.0, EXACT);
    let over_voltage_both = rows[4][1];
    assert_close(
        "noisy-max (ov,ov)",
        over_voltage_both,
        1.0 - (1.0 - 0.66667) * (1.0 - 0.66667),
        EXACT,
    );
    assert_close("noisy-max (ov,ov) print", over_voltage_both, 0.88889, TOL);
    println!("acceptance criterion 6: noisy-or / noisy-and / noisy-max arithmetic ... PASS");
}

#[test]
fn criterion_7a_compilation_soundness() {
    // randomized on the PLC network
    let ft = plc::fault_tree();
    let (net, _) = compile(&ft, &plc::published_priors()).unwrap();
    let ids: Vec<EventId> = ft.primaries.iter().map(|p| p.id.clone()).collect();
    let propagator = Propagator::new(&net).unwrap();
    let mut rng = common::rng(701);
    for _ in 0..10_000 {
        let assignment: BTreeMap<EventId, bool> = ids
            .iter()
            .map(|id| (id.clone(), rng.random_bool(0.5)))
            .collect();
        let expected = boolean_eval(&ft, &assignment).unwrap();
        let roots: BTreeMap<VarId, usize> = assignment
            .iter()
            .map(|(id, &b)| (VarId::from(id), b as usize))
            .collect();
        let propagated = propagator.propagate(&roots).unwrap();
        assert_eq!(
            propagated[&VarId::from("TE")] == 1,
            expected,
            "propagation disagrees with boolean evaluation on {assignment:?}"
        );
    }

    // exhaustive on random trees with up to 12 primaries
    for seed in 0..25u64 {
        let mut rng = common::rng(7100 + seed);
        let n = rng.random_range(2..=12);
        let tree = common::random_tree(&mut rng, n);
        let priors =
            ftbn::reliability::probability_table(&tree.primaries, MissionTime::hours(1.0).unwrap());
        let (net, _) = compile(&tree, &priors).unwrap();
        let propagator = Propagator::new(&net).unwrap();
        let ids: Vec<EventId> = tree.primaries.iter().map(|p| p.id.clone()).collect();
        for mask in 0u32..1 << n {
            let assignment: BTreeMap<EventId, bool> = ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), mask >> i & 1 == 1))
                .collect();
            let expected = boolean_eval(&tree, &assignment).unwrap();
            let roots: BTreeMap<VarId, usize> = assignment
                .iter()
                .map(|(id, &b)| (VarId::from(id), b as usize))
                .collect();
            let propagated = propagator.propagate(&roots).unwrap();
            assert_eq!(propagated[&VarId::from(&tree.top)] == 1, expected);
        }
    }
    println!("acceptance criterion 7a: compilation soundness ... PASS");
}

#[test]
fn criterion_7b_elimination_matches_enumeration() {
    let mut rng = common::rng(702);
    for trial in 0..50 {
        let n = rng.random_range(4..=16);
        let net = common::random_net(&mut rng, n);
        let joint = enumerate_joint(&net, &Evidence::none()).unwrap();

        // evidence consistent with the model: take a positive-mass entry
        let pick = rng.random_range(0..joint.len());
        let (sample, _) = joint.entries().nth(pick).unwrap();
        let n_obs = rng.random_range(0..=2usize);
        let mut evidence = Evidence::none();
        let mut observed = BTreeSet::new();
        for _ in 0..n_obs {
            let v = rng.random_range(0..n);
            observed.insert(v);
            let node = &net.nodes[v];
            evidence.set(
                node.id().as_str(),
                node.variable.states[sample[v] as usize].as_str(),
            );
        }
        let conditioned = enumerate_joint(&net, &evidence).unwrap();

        for v in 0..n {
            if observed.contains(&v) {
                continue;
            }
            let id = net.nodes[v].id().clone();
            let dist = marginal(&net, &id, &evidence).unwrap();
            let oracle = common::oracle_marginal(&conditioned, id.as_str(), 2);
            for (s, (got, want)) in dist.probs.iter().zip(&oracle).enumerate() {
                assert!(
                    (got - want).abs() <= 1e-10,
                    "trial {trial}: marginal({id}) state {s}: {got} vs oracle {want}"
                );
            }
        }
    }
    println!(
        "acceptance criterion 7b: variable elimination equals the enumeration oracle ... PASS"
    );
}

#[test]
fn criterion_7c_cut_sets_match_brute_force() {
    for seed in 0..25u64 {
        let mut rng = common::rng(7300 + seed);
        let n = rng.random_range(2..=12);
        let tree = common::random_tree(&mut rng, n);
        let expected = common::brute_force_mcs(&tree);
        let got: Vec<BTreeSet<EventId>> = minimal_cut_sets(&tree)
            .unwrap()
            .into_iter()
            .map(|c| c.members().clone())
            .collect();
        assert_eq!(got, expected, "cut-set family mismatch on seed {seed}");
    }
    println!("acceptance criterion 7c: cut-set families equal brute force ... PASS");
}

#[test]
fn criterion_7d_conditioning_rescales_cut_set_diagnoses() {
    let ft = plc::fault_tree();
    let net = plc::network();
    let priors = plc::published_priors();
    let p_te = marginal(&net, &VarId::from("TE"), &Evidence::none())
        .unwrap()
        .p(STATE_FAULTY)
        .unwrap();
    let te_faulty = Evidence::observe("TE", STATE_FAULTY);

    for cutset in minimal_cut_sets(&ft).unwrap() {
        let mut diagnosis = Evidence::none();
        let mut prior = 1.0;
        for p in &ft.primaries {
            if cutset.contains(p.id.as_str()) {
                diagnosis.set(p.id.as_str(), STATE_FAULTY);
                prior *= priors[&p.id];
            } else {
                diagnosis.set(p.id.as_str(), STATE_WORKING);
                prior *= 1.0 - priors[&p.id];
            }
        }
        let posterior = query_probability(&net, &diagnosis, &te_faulty).unwrap();
        assert!(
            (posterior - prior / p_te).abs() <= 1e-12,
            "cut set {cutset}: posterior {posterior} vs rescaled prior {}",
            prior / p_te
        );
    }
    println!(
        "acceptance criterion 7d: posterior = prior / P(TE) for every cut-set diagnosis ... PASS"
    );
}

#[test]
fn criterion_8_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_ftbn");
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../..");
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "analyze",
            "models/plc.ft",
            "--mission-time",
            "4e5",
            "--target",
            "TE,CH",
        ],
        vec![
            "posterior",
            "models/plc.ft",
            "--mission-time",
            "4e5",
            "--evidence",
            "TE=faulty",
        ],
        vec![
            "cutsets",
            "models/plc.ft",
            "--mission-time",
            "4e5",
            "--format",
            "csv",
        ],
        vec![
            "diagnose",
            "models/plc_noisy.json",
            "--evidence",
            "TE=faulty",
            "--top",
            "5",
            "--format",
            "json",
        ],
        vec!["compile", "models/plc.ft", "--mission-time", "4e5"],
    ];
    for args in runs {
        let run = || {
            let out = Command::new(bin)
                .args(&args)
                .current_dir(root)
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "{args:?}: {:?}", out);
            out.stdout
        };
        assert_eq!(run(), run(), "output of {args:?} is not byte-identical");
    }
    println!("acceptance criterion 8: byte-identical CLI output ... PASS");
}
