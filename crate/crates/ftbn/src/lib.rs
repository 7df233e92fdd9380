//! Fault-tree dependability analysis on discrete Bayesian networks.
//!
//! `ftbn` compiles combinatorial fault trees (AND/OR/k-of-n gates over
//! component failure events) into discrete Bayesian networks and runs exact
//! analysis on the result:
//!
//! * **qualitative** — minimal cut sets of the top event ([`cutsets`]);
//! * **quantitative** — failure probabilities at a mission time, posterior
//!   probabilities under observed evidence, and ranked complete diagnoses
//!   ([`infer`]);
//! * **beyond boolean gates** — noisy-or/and/max gates with leak
//!   probabilities, multi-state components, and dependent failures, which
//!   fault trees cannot express ([`bn`]).
//!
//! A worked case study of a redundant programmable logic controller with
//! 2:3 majority voting ships in [`plc`] and doubles as the test bed for the
//! whole pipeline.
//!
//! ```
//! use ftbn::{compile, marginal, parse_fault_tree, Evidence, MissionTime};
//!
//! let ft = parse_fault_tree(
//!     "primary pump_a rate=1e-5;
//!      primary pump_b rate=1e-5;
//!      event no_flow = and(pump_a, pump_b);
//!      top no_flow;",
//! )?;
//! let t = MissionTime::hours(1.0e4).unwrap();
//! let priors = ftbn::probability_table(&ft.primaries, t);
//! let (net, _report) = compile(&ft, &priors)?;
//! let dist = marginal(&net, &"no_flow".into(), &Evidence::none())?;
//!
//! // both pumps must fail: (1 - e^(-λt))²
//! let p_pump = -(-1e-5_f64 * 1.0e4).exp_m1();
//! assert!((dist.p("faulty").unwrap() - p_pump * p_pump).abs() < 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The user guide under `book/` walks through every concept with runnable
//! examples; its code blocks are compiled and executed as part of `cargo
//! test`.

pub mod bn;
pub mod compile;
pub mod cutsets;
pub mod ft;
pub mod infer;
pub mod plc;
pub mod reliability;

mod index;

pub use bn::{BayesianNetwork, CptSpec, Node, VarId, Variable, STATE_FAULTY, STATE_WORKING};
pub use compile::{boolean_eval, compile, CompilationReport};
pub use cutsets::{minimal_cut_sets, score_cut_sets, unreliability, CutSet, ScoredCutSet};
pub use ft::{parse_fault_tree, EventId, FaultTree, Gate, GateKind, PrimaryEvent};
pub use infer::{
    enumerate_joint, marginal, query_probability, top_k_diagnoses, Distribution, Evidence,
    RankedDiagnosis,
};
pub use reliability::{failure_probability, probability_table, FailureModel, MissionTime};

/// Guide chapters are compiled as doc-tests so the book can never drift
/// from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(fault_trees, "../../../book/src/fault-trees.md");
    chapter!(reliability, "../../../book/src/reliability.md");
    chapter!(
        from_trees_to_networks,
        "../../../book/src/from-trees-to-networks.md"
    );
    chapter!(inference, "../../../book/src/inference.md");
    chapter!(cut_sets, "../../../book/src/cut-sets.md");
    chapter!(
        beyond_boolean_gates,
        "../../../book/src/beyond-boolean-gates.md"
    );
    chapter!(plc_case_study, "../../../book/src/plc-case-study.md");
}
