//! Fault-tree data model, structural validation, and the textual DSL.
//!
//! A fault tree combines binary component-failure events (*primary
//! events*) through AND, OR and k-of-n gates up to a single *top event*
//! that represents system failure. Distinct leaves may reference the same
//! primary event; identity is by id.

mod parser;

pub use parser::{parse_fault_tree, parse_fault_tree_unchecked, ParseError, ParseErrorKind};

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::reliability::FailureModel;

/// Identifier of an event (primary or gate output) in a fault tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(String);

impl EventId {
    pub fn new(id: impl Into<String>) -> Self {
        EventId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId(s.to_owned())
    }
}

impl From<String> for EventId {
    fn from(s: String) -> Self {
        EventId(s)
    }
}

impl Borrow<str> for EventId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl PartialEq<&str> for EventId {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// A component-failure event; the leaves of the tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimaryEvent {
    pub id: EventId,
    /// Component class the event belongs to (e.g. `"CPU"`); defaults to the
    /// id itself when the source carries no class information.
    pub component_class: String,
    pub failure: FailureModel,
}

impl PrimaryEvent {
    pub fn new(id: impl Into<EventId>, class: impl Into<String>, failure: FailureModel) -> Self {
        PrimaryEvent {
            id: id.into(),
            component_class: class.into(),
            failure,
        }
    }
}

/// Gate kind. `KofN` fires when at least `k` of its `n` inputs are faulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Or,
    KofN { k: usize, n: usize },
}

/// A logical gate together with the event it defines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    /// Ordered inputs; each is a primary-event id or another gate's output.
    pub inputs: Vec<EventId>,
    /// The event this gate defines.
    pub output: EventId,
}

impl Gate {
    pub fn new(kind: GateKind, output: impl Into<EventId>, inputs: Vec<EventId>) -> Self {
        Gate {
            kind,
            inputs,
            output: output.into(),
        }
    }

    /// Boolean function of the gate over its input values, counting
    /// repeated inputs once per position.
    pub fn eval(&self, input_values: &[bool]) -> bool {
        let faulty = input_values.iter().filter(|&&v| v).count();
        match self.kind {
            GateKind::And => faulty == input_values.len(),
            GateKind::Or => faulty > 0,
            GateKind::KofN { k, .. } => faulty >= k,
        }
    }
}

/// A fault tree: primaries, gates, and the top event.
///
/// The structure is plain data and may be built in an invalid state;
/// [`FaultTree::validate`] reports every violated invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultTree {
    pub primaries: Vec<PrimaryEvent>,
    pub gates: Vec<Gate>,
    pub top: EventId,
}

/// A violated fault-tree invariant, naming the offending event or gate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Diagnostic {
    #[error("primary event `{0}` is defined more than once")]
    DuplicatePrimary(EventId),
    #[error("event `{0}` is the output of more than one gate")]
    DuplicateGateOutput(EventId),
    #[error("gate output `{0}` collides with a primary event")]
    GateOutputIsPrimary(EventId),
    #[error("gate `{gate}` references undefined event `{input}`")]
    UndefinedInput { gate: EventId, input: EventId },
    #[error("gate `{gate}` has {actual} input(s); at least 2 are required")]
    TooFewInputs { gate: EventId, actual: usize },
    #[error("gate `{gate}` is {k}-of-{n} but has {actual} inputs")]
    KofNArity {
        gate: EventId,
        k: usize,
        n: usize,
        actual: usize,
    },
    #[error("gate `{gate}` has invalid voting threshold {k} of {n}")]
    KofNRange { gate: EventId, k: usize, n: usize },
    #[error("cycle through event `{0}`")]
    Cycle(EventId),
    #[error("top event `{0}` is not the output of any gate")]
    TopUndefined(EventId),
    #[error("gate `{0}` is not reachable from the top event")]
    UnreachableGate(EventId),
    #[error("primary event `{0}` is not referenced by any gate")]
    UnreferencedPrimary(EventId),
    #[error("primary event `{0}` has an invalid failure model")]
    InvalidFailureModel(EventId),
}

impl FaultTree {
    pub fn primary(&self, id: &str) -> Option<&PrimaryEvent> {
        self.primaries.iter().find(|p| p.id.as_str() == id)
    }

    /// The gate defining `id`, if any.
    pub fn gate_for(&self, id: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.output.as_str() == id)
    }

    /// Checks every structural invariant and returns one diagnostic per
    /// violation; an empty list means the tree is well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();

        let mut primary_ids = BTreeSet::new();
        for p in &self.primaries {
            if !primary_ids.insert(p.id.clone()) {
                diags.push(Diagnostic::DuplicatePrimary(p.id.clone()));
            }
            if !p.failure.is_valid() {
                diags.push(Diagnostic::InvalidFailureModel(p.id.clone()));
            }
        }

        let mut gate_outputs = BTreeSet::new();
        for g in &self.gates {
            if !gate_outputs.insert(g.output.clone()) {
                diags.push(Diagnostic::DuplicateGateOutput(g.output.clone()));
            }
            if primary_ids.contains(&g.output) {
                diags.push(Diagnostic::GateOutputIsPrimary(g.output.clone()));
            }
        }

        for g in &self.gates {
            for input in &g.inputs {
                if !primary_ids.contains(input) && !gate_outputs.contains(input) {
                    diags.push(Diagnostic::UndefinedInput {
                        gate: g.output.clone(),
                        input: input.clone(),
                    });
                }
            }
            if g.inputs.len() < 2 {
                diags.push(Diagnostic::TooFewInputs {
                    gate: g.output.clone(),
                    actual: g.inputs.len(),
                });
            }
            if let GateKind::KofN { k, n } = g.kind {
                if k < 1 || k > n {
                    diags.push(Diagnostic::KofNRange {
                        gate: g.output.clone(),
                        k,
                        n,
                    });
                }
                if g.inputs.len() != n {
                    diags.push(Diagnostic::KofNArity {
                        gate: g.output.clone(),
                        k,
                        n,
                        actual: g.inputs.len(),
                    });
                }
            }
        }

        for id in self.find_cycles() {
            diags.push(Diagnostic::Cycle(id));
        }

        if self.gate_for(self.top.as_str()).is_none() {
            diags.push(Diagnostic::TopUndefined(self.top.clone()));
        } else {
            let reachable = self.reachable_from_top();
            for g in &self.gates {
                if !reachable.contains(&g.output) {
                    diags.push(Diagnostic::UnreachableGate(g.output.clone()));
                }
            }
        }

        let referenced: HashSet<&EventId> =
            self.gates.iter().flat_map(|g| g.inputs.iter()).collect();
        for p in &self.primaries {
            if !referenced.contains(&p.id) {
                diags.push(Diagnostic::UnreferencedPrimary(p.id.clone()));
            }
        }

        diags
    }

    /// Gate outputs participating in a cycle, in id order.
    fn find_cycles(&self) -> Vec<EventId> {
        let by_output: HashMap<&str, &Gate> =
            self.gates.iter().map(|g| (g.output.as_str(), g)).collect();

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            InProgress,
            Done,
        }

        fn visit<'a>(
            id: &'a str,
            by_output: &HashMap<&'a str, &'a Gate>,
            marks: &mut HashMap<&'a str, Mark>,
            cyclic: &mut BTreeSet<EventId>,
        ) {
            match marks.get(id) {
                Some(Mark::Done) => return,
                Some(Mark::InProgress) => {
                    cyclic.insert(EventId::from(id));
                    return;
                }
                None => {}
            }
            if let Some(gate) = by_output.get(id) {
                marks.insert(id, Mark::InProgress);
                for input in &gate.inputs {
                    visit(input.as_str(), by_output, marks, cyclic);
                }
            }
            marks.insert(id, Mark::Done);
        }

        let mut marks = HashMap::new();
        let mut cyclic = BTreeSet::new();
        for g in &self.gates {
            visit(g.output.as_str(), &by_output, &mut marks, &mut cyclic);
        }
        cyclic.into_iter().collect()
    }

    fn reachable_from_top(&self) -> BTreeSet<EventId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.top.clone()];
        while let Some(id) = stack.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            if let Some(gate) = self.gate_for(id.as_str()) {
                stack.extend(gate.inputs.iter().cloned());
            }
        }
        seen
    }

    /// Renders the tree back into DSL source. Parsing the result yields a
    /// structurally identical tree (component classes are not part of the
    /// DSL and reset to the event id).
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        for p in &self.primaries {
            match p.failure {
                FailureModel::Exponential { rate } => {
                    out.push_str(&format!("primary {} rate={:?};\n", p.id, rate));
                }
                FailureModel::Fixed { p: prob } => {
                    out.push_str(&format!("primary {} prob={:?};\n", p.id, prob));
                }
            }
        }
        for g in &self.gates {
            let inputs = g
                .inputs
                .iter()
                .map(EventId::as_str)
                .collect::<Vec<_>>()
                .join(", ");
            match g.kind {
                GateKind::And => out.push_str(&format!("event {} = and({});\n", g.output, inputs)),
                GateKind::Or => out.push_str(&format!("event {} = or({});\n", g.output, inputs)),
                GateKind::KofN { k, n } => out.push_str(&format!(
                    "event {} = {} of {}({});\n",
                    g.output, k, n, inputs
                )),
            }
        }
        out.push_str(&format!("top {};\n", self.top));
        out
    }

    /// Per-primary count of gates referencing it.
    pub fn reference_counts(&self) -> BTreeMap<EventId, usize> {
        let mut counts: BTreeMap<EventId, usize> =
            self.primaries.iter().map(|p| (p.id.clone(), 0)).collect();
        for g in &self.gates {
            for input in &g.inputs {
                if let Some(c) = counts.get_mut(input) {
                    *c += 1;
                }
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pump_tree() -> FaultTree {
        FaultTree {
            primaries: vec![
                PrimaryEvent::new("a", "a", FailureModel::fixed(0.1)),
                PrimaryEvent::new("b", "b", FailureModel::fixed(0.2)),
            ],
            gates: vec![Gate::new(GateKind::And, "t", vec!["a".into(), "b".into()])],
            top: "t".into(),
        }
    }

    #[test]
    fn well_formed_tree_validates_clean() {
        assert_eq!(two_pump_tree().validate(), vec![]);
    }

    #[test]
    fn self_cycle_is_reported() {
        let mut ft = two_pump_tree();
        ft.gates.push(Gate::new(
            GateKind::Or,
            "loop",
            vec!["loop".into(), "a".into()],
        ));
        let diags = ft.validate();
        assert!(
            diags.contains(&Diagnostic::Cycle("loop".into())),
            "{diags:?}"
        );
    }

    #[test]
    fn kofn_arity_mismatch_is_reported() {
        let mut ft = two_pump_tree();
        ft.primaries
            .push(PrimaryEvent::new("c", "c", FailureModel::fixed(0.1)));
        ft.primaries
            .push(PrimaryEvent::new("d", "d", FailureModel::fixed(0.1)));
        ft.gates = vec![Gate::new(
            GateKind::KofN { k: 2, n: 3 },
            "t",
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
        )];
        let diags = ft.validate();
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::KofNArity { actual: 4, .. })));
    }

    #[test]
    fn unreferenced_primary_and_unreachable_gate() {
        let mut ft = two_pump_tree();
        ft.primaries.push(PrimaryEvent::new(
            "ghost",
            "ghost",
            FailureModel::fixed(0.1),
        ));
        let diags = ft.validate();
        assert!(diags.contains(&Diagnostic::UnreferencedPrimary("ghost".into())));

        let mut ft = two_pump_tree();
        ft.gates.push(Gate::new(
            GateKind::Or,
            "orphan",
            vec!["a".into(), "b".into()],
        ));
        let diags = ft.validate();
        assert!(diags.contains(&Diagnostic::UnreachableGate("orphan".into())));
    }

    #[test]
    fn gate_functions_are_monotone() {
        // Flipping any input from working to faulty never un-fails a gate;
        // exhaustive over every kind up to 6 inputs.
        let mut kinds = vec![GateKind::And, GateKind::Or];
        for n in 2..=6 {
            for k in 1..=n {
                kinds.push(GateKind::KofN { k, n });
            }
        }
        for kind in kinds {
            let n = match kind {
                GateKind::KofN { n, .. } => n,
                _ => 6,
            };
            let gate = Gate::new(
                kind,
                "g",
                (0..n).map(|i| EventId::new(format!("e{i}"))).collect(),
            );
            for m in 0..(1u32 << n) {
                let vals: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
                let base = gate.eval(&vals);
                for i in 0..n {
                    let mut up = vals.clone();
                    up[i] = true;
                    assert!(
                        gate.eval(&up) || !base,
                        "{kind:?} not monotone at {vals:?} position {i}"
                    );
                }
            }
        }
    }
}
