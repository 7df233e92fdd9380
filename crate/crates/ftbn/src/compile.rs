//! Mapping fault trees into binary Bayesian networks.
//!
//! Every distinct primary event becomes one root node whose prior is its
//! failure probability — leaves that reference the same primary share that
//! single root. Every (gate, output-event) pair becomes a deterministic
//! node whose CPT is the gate's boolean function, kept symbolic so k-of-n
//! gates stay compact. Arcs mirror the tree; the node for the tree's top
//! event is the system-failure variable.

use std::collections::BTreeMap;

use crate::bn::{BayesianNetwork, CptSpec, Node, VarId};
use crate::ft::{Diagnostic, EventId, FaultTree};

/// Summary of a compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompilationReport {
    /// Number of root nodes; equals the number of distinct primary events.
    pub root_count: usize,
    /// Total nodes in the network.
    pub node_count: usize,
    /// For every gate input that is a primary event, the root node backing
    /// that leaf occurrence, keyed by (gate output, input position).
    pub dedup_map: BTreeMap<(EventId, usize), VarId>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("fault tree is invalid: {}", format_diagnostics(.0))]
    InvalidTree(Vec<Diagnostic>),
    #[error("no prior probability for primary event `{0}`")]
    MissingPrior(EventId),
    #[error("prior for `{id}` is {value}, not a probability")]
    PriorOutOfRange { id: EventId, value: f64 },
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Compiles a valid fault tree and a prior table into a Bayesian network.
///
/// Nodes are emitted in topological order with ties broken by id, so the
/// serialized network is byte-stable.
///
/// ```
/// use ftbn::{compile, parse_fault_tree, probability_table, MissionTime};
///
/// let tree = parse_fault_tree(
///     "primary a rate=1e-6; primary b rate=1e-6; event t = and(a, b); top t;",
/// )?;
/// let priors = probability_table(&tree.primaries, MissionTime::hours(1e5).unwrap());
/// let (net, report) = compile(&tree, &priors)?;
/// assert_eq!((report.root_count, report.node_count), (2, 3));
/// assert!(net.validate().is_empty());
/// # Ok::<(), Box<dyn std::error::Error>>(())
/// ```
pub fn compile(
    ft: &FaultTree,
    priors: &BTreeMap<EventId, f64>,
) -> Result<(BayesianNetwork, CompilationReport), CompileError> {
    let diags = ft.validate();
    if !diags.is_empty() {
        return Err(CompileError::InvalidTree(diags));
    }

    let mut nodes = Vec::with_capacity(ft.primaries.len() + ft.gates.len());

    let mut sorted_primaries: Vec<&EventId> = ft.primaries.iter().map(|p| &p.id).collect();
    sorted_primaries.sort();
    for id in sorted_primaries {
        let p = *priors
            .get(id)
            .ok_or_else(|| CompileError::MissingPrior(id.clone()))?;
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(CompileError::PriorOutOfRange {
                id: id.clone(),
                value: p,
            });
        }
        nodes.push(Node::binary_root(VarId::from(id), p));
    }

    // Gates in topological layers, ties by output id: repeatedly emit the
    // id-smallest gate whose inputs are all emitted.
    let mut emitted: std::collections::BTreeSet<&EventId> =
        ft.primaries.iter().map(|p| &p.id).collect();
    let mut pending: Vec<&crate::ft::Gate> = ft.gates.iter().collect();
    pending.sort_by(|a, b| a.output.cmp(&b.output));
    while !pending.is_empty() {
        let ready = pending
            .iter()
            .position(|g| g.inputs.iter().all(|i| emitted.contains(i)))
            .expect("valid tree is acyclic");
        let gate = pending.remove(ready);
        nodes.push(Node::new(
            crate::bn::Variable::binary(VarId::from(&gate.output)),
            gate.inputs.iter().map(VarId::from).collect(),
            CptSpec::from_gate_kind(gate.kind),
        ));
        emitted.insert(&gate.output);
    }

    let dedup_map = ft
        .gates
        .iter()
        .flat_map(|g| {
            g.inputs.iter().enumerate().filter_map(|(i, input)| {
                ft.primary(input.as_str())
                    .map(|p| ((g.output.clone(), i), VarId::from(&p.id)))
            })
        })
        .collect();

    let report = CompilationReport {
        root_count: ft.primaries.len(),
        node_count: nodes.len(),
        dedup_map,
    };
    Ok((BayesianNetwork::new(nodes), report))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("no value assigned to primary event `{0}`")]
    MissingAssignment(EventId),
    #[error("event `{0}` is not defined")]
    UndefinedEvent(EventId),
    #[error("cycle through event `{0}`")]
    Cycle(EventId),
}

/// Value of the top event under a total assignment to the primaries.
///
/// This is the reference boolean semantics of the tree: gates evaluate
/// bottom-up with AND / OR / at-least-k counting.
pub fn boolean_eval(
    ft: &FaultTree,
    assignment: &BTreeMap<EventId, bool>,
) -> Result<bool, EvalError> {
    let mut memo: BTreeMap<&EventId, bool> = BTreeMap::new();
    let mut visiting: std::collections::BTreeSet<&EventId> = std::collections::BTreeSet::new();

    fn eval<'a>(
        ft: &'a FaultTree,
        id: &'a EventId,
        assignment: &BTreeMap<EventId, bool>,
        memo: &mut BTreeMap<&'a EventId, bool>,
        visiting: &mut std::collections::BTreeSet<&'a EventId>,
    ) -> Result<bool, EvalError> {
        if let Some(&v) = memo.get(id) {
            return Ok(v);
        }
        if ft.primary(id.as_str()).is_some() {
            return assignment
                .get(id)
                .copied()
                .ok_or_else(|| EvalError::MissingAssignment(id.clone()));
        }
        let gate = ft
            .gate_for(id.as_str())
            .ok_or_else(|| EvalError::UndefinedEvent(id.clone()))?;
        if !visiting.insert(id) {
            return Err(EvalError::Cycle(id.clone()));
        }
        let mut values = Vec::with_capacity(gate.inputs.len());
        for input in &gate.inputs {
            values.push(eval(ft, input, assignment, memo, visiting)?);
        }
        visiting.remove(id);
        let v = gate.eval(&values);
        memo.insert(id, v);
        Ok(v)
    }

    eval(ft, &ft.top, assignment, &mut memo, &mut visiting)
}
