//! Discrete Bayesian-network model.
//!
//! Networks are lists of [`Node`]s: a variable with an ordered state set,
//! parent references, and a conditional probability table given either as
//! a full table, a deterministic boolean gate, or one of the canonical
//! noisy families. Binary variables follow the convention that state 0 is
//! `working`/false and state 1 is `faulty`/true.
//!
//! # Table layout
//!
//! An expanded CPT has one row per parent-state combination and one column
//! per child state. The row index is the mixed-radix value of the parent
//! states in declared order with the *last* parent varying fastest, so
//! serialized tables are reproducible bit for bit.
//!
//! # Canonical noisy gates
//!
//! With binary parents, `c[i]` is the probability that parent `i` alone
//! triggers (noisy-or) or inhibitor `i` alone fails to hold (noisy-and),
//! and `leak` is the probability of the effect with no modeled cause
//! present:
//!
//! * noisy-or:  `P(child = faulty | config) = 1 − (1 − leak) · ∏_{i faulty} (1 − c[i])`
//! * noisy-and: `P(child = faulty | config) = ∏_{i working} c[i]`
//! * noisy-max: like noisy-or but parents may be multi-state, with one
//!   `c[i][s−1]` per non-working parent state `s` (the working state
//!   implicitly contributes 0).
//!
//! Deterministic specifications are stored symbolically and expanded on
//! demand, which keeps k-of-n gates with many parents compact.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ft::GateKind;
use crate::index;

/// Name of the working/false state of binary variables (index 0).
pub const STATE_WORKING: &str = "working";
/// Name of the faulty/true state of binary variables (index 1).
pub const STATE_FAULTY: &str = "faulty";

/// Identifier of a network variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(String);

impl VarId {
    pub fn new(id: impl Into<String>) -> Self {
        VarId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId(s.to_owned())
    }
}

impl From<String> for VarId {
    fn from(s: String) -> Self {
        VarId(s)
    }
}

impl From<&crate::ft::EventId> for VarId {
    fn from(id: &crate::ft::EventId) -> Self {
        VarId(id.as_str().to_owned())
    }
}

impl Borrow<str> for VarId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl PartialEq<&str> for VarId {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// A discrete variable with at least two named states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub id: VarId,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new(id: impl Into<VarId>, states: Vec<impl Into<String>>) -> Self {
        Variable {
            id: id.into(),
            states: states.into_iter().map(Into::into).collect(),
        }
    }

    /// A working/faulty variable.
    pub fn binary(id: impl Into<VarId>) -> Self {
        Variable::new(id, vec![STATE_WORKING, STATE_FAULTY])
    }

    pub fn card(&self) -> usize {
        self.states.len()
    }

    pub fn is_binary(&self) -> bool {
        self.states.len() == 2
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
}

/// Conditional probability table specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum CptSpec {
    /// Full table; `rows[r][s]` is the probability of child state `s`
    /// given parent combination `r` (see the module docs for row order).
    /// Each row must sum to 1 within 1e-12.
    #[serde(rename = "table")]
    Table { rows: Vec<Vec<f64>> },
    /// Deterministic AND of binary parents.
    #[serde(rename = "and")]
    And,
    /// Deterministic OR of binary parents.
    #[serde(rename = "or")]
    Or,
    /// Deterministic vote: faulty iff at least `k` parents are faulty.
    #[serde(rename = "kofn")]
    KOfN { k: usize },
    /// Noisy-or over binary parents with a leak probability.
    #[serde(rename = "noisy_or")]
    NoisyOr {
        c: Vec<f64>,
        #[serde(default)]
        leak: f64,
    },
    /// Noisy-and over binary parents.
    #[serde(rename = "noisy_and")]
    NoisyAnd { c: Vec<f64> },
    /// Noisy-max: binary child, multi-state parents; `c[i][s-1]` is the
    /// activation probability of parent `i` in state `s` (its working
    /// state 0 contributes nothing).
    #[serde(rename = "noisy_max")]
    NoisyMax {
        c: Vec<Vec<f64>>,
        #[serde(default)]
        leak: f64,
    },
}

impl CptSpec {
    pub fn from_gate_kind(kind: GateKind) -> Self {
        match kind {
            GateKind::And => CptSpec::And,
            GateKind::Or => CptSpec::Or,
            GateKind::KofN { k, .. } => CptSpec::KOfN { k },
        }
    }

    /// Expands the specification into a full table for the given parent
    /// cardinalities and child cardinality.
    pub fn expand(
        &self,
        parent_cards: &[usize],
        child_card: usize,
    ) -> Result<Vec<Vec<f64>>, ModelError> {
        let n_rows = index::table_len(parent_cards).ok_or(ModelError::TableTooLarge)?;
        match self {
            CptSpec::Table { rows } => {
                if rows.len() != n_rows {
                    return Err(ModelError::RowCount {
                        expected: n_rows,
                        got: rows.len(),
                    });
                }
                for (r, row) in rows.iter().enumerate() {
                    if row.len() != child_card {
                        return Err(ModelError::RowLength {
                            row: r,
                            expected: child_card,
                            got: row.len(),
                        });
                    }
                }
                Ok(rows.clone())
            }
            CptSpec::And | CptSpec::Or | CptSpec::KOfN { .. } => {
                require_binary_child(child_card)?;
                if parent_cards.iter().any(|&c| c != 2) {
                    return Err(ModelError::BinaryParentsRequired);
                }
                if let CptSpec::KOfN { k } = *self {
                    if k < 1 || k > parent_cards.len() {
                        return Err(ModelError::KofNRange {
                            k,
                            n: parent_cards.len(),
                        });
                    }
                }
                let mut rows = Vec::with_capacity(n_rows);
                let mut odo = index::Odometer::new(parent_cards);
                while let Some(states) = odo.current() {
                    let faulty = states.iter().filter(|&&s| s == 1).count();
                    let fires = match *self {
                        CptSpec::And => faulty == parent_cards.len(),
                        CptSpec::Or => faulty > 0,
                        CptSpec::KOfN { k } => faulty >= k,
                        _ => unreachable!(),
                    };
                    rows.push(if fires {
                        vec![0.0, 1.0]
                    } else {
                        vec![1.0, 0.0]
                    });
                    odo.advance();
                }
                Ok(rows)
            }
            CptSpec::NoisyOr { c, leak } => {
                require_binary_child(child_card)?;
                if parent_cards.iter().any(|&card| card != 2) {
                    return Err(ModelError::BinaryParentsRequired);
                }
                check_arity(c.len(), parent_cards.len())?;
                check_probability("c", c.iter().copied())?;
                check_probability("leak", [*leak])?;
                let mut rows = Vec::with_capacity(n_rows);
                let mut odo = index::Odometer::new(parent_cards);
                while let Some(states) = odo.current() {
                    let mut no_cause = 1.0 - leak;
                    for (i, &s) in states.iter().enumerate() {
                        if s == 1 {
                            no_cause *= 1.0 - c[i];
                        }
                    }
                    rows.push(vec![no_cause, 1.0 - no_cause]);
                    odo.advance();
                }
                Ok(rows)
            }
            CptSpec::NoisyAnd { c } => {
                require_binary_child(child_card)?;
                if parent_cards.iter().any(|&card| card != 2) {
                    return Err(ModelError::BinaryParentsRequired);
                }
                check_arity(c.len(), parent_cards.len())?;
                check_probability("c", c.iter().copied())?;
                let mut rows = Vec::with_capacity(n_rows);
                let mut odo = index::Odometer::new(parent_cards);
                while let Some(states) = odo.current() {
                    let mut fires = 1.0;
                    for (i, &s) in states.iter().enumerate() {
                        if s == 0 {
                            fires *= c[i];
                        }
                    }
                    rows.push(vec![1.0 - fires, fires]);
                    odo.advance();
                }
                Ok(rows)
            }
            CptSpec::NoisyMax { c, leak } => {
                require_binary_child(child_card)?;
                check_arity(c.len(), parent_cards.len())?;
                for (i, ci) in c.iter().enumerate() {
                    if ci.len() != parent_cards[i] - 1 {
                        return Err(ModelError::NoisyMaxStates {
                            parent: i,
                            expected: parent_cards[i] - 1,
                            got: ci.len(),
                        });
                    }
                    check_probability("c", ci.iter().copied())?;
                }
                check_probability("leak", [*leak])?;
                let mut rows = Vec::with_capacity(n_rows);
                let mut odo = index::Odometer::new(parent_cards);
                while let Some(states) = odo.current() {
                    let mut no_cause = 1.0 - leak;
                    for (i, &s) in states.iter().enumerate() {
                        if s > 0 {
                            no_cause *= 1.0 - c[i][s - 1];
                        }
                    }
                    rows.push(vec![no_cause, 1.0 - no_cause]);
                    odo.advance();
                }
                Ok(rows)
            }
        }
    }
}

fn require_binary_child(child_card: usize) -> Result<(), ModelError> {
    if child_card == 2 {
        Ok(())
    } else {
        Err(ModelError::BinaryChildRequired)
    }
}

fn check_arity(got: usize, expected: usize) -> Result<(), ModelError> {
    if got == expected {
        Ok(())
    } else {
        Err(ModelError::ArityMismatch { expected, got })
    }
}

fn check_probability(what: &str, values: impl IntoIterator<Item = f64>) -> Result<(), ModelError> {
    for v in values {
        if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
            return Err(ModelError::ParameterOutOfRange {
                what: what.to_owned(),
                value: v,
            });
        }
    }
    Ok(())
}

/// Structural error in a network or CPT specification.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(VarId),
    #[error("parameter count {got} does not match {expected} parents")]
    ArityMismatch { expected: usize, got: usize },
    #[error("table has {got} rows, expected {expected}")]
    RowCount { expected: usize, got: usize },
    #[error("table row {row} has {got} entries, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("boolean gates require binary parents")]
    BinaryParentsRequired,
    #[error("this specification requires a binary child")]
    BinaryChildRequired,
    #[error("noisy-max parent {parent} needs {expected} activation probabilities, got {got}")]
    NoisyMaxStates {
        parent: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid voting threshold {k} of {n}")]
    KofNRange { k: usize, n: usize },
    #[error("{what} = {value} is not a probability")]
    ParameterOutOfRange { what: String, value: f64 },
    #[error("table too large")]
    TableTooLarge,
    #[error("adding `{child}` with these parents would create a cycle")]
    CycleIntroduced { child: VarId },
    #[error("node `{0}` is not deterministic")]
    NotDeterministic(VarId),
    #[error("no state assigned for root `{0}`")]
    MissingRootState(VarId),
}

/// A violated network invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BnDiagnostic {
    #[error("variable `{0}` is defined more than once")]
    DuplicateVariable(VarId),
    #[error("variable `{0}` has fewer than two states")]
    TooFewStates(VarId),
    #[error("variable `{0}` has duplicate state names")]
    DuplicateState(VarId),
    #[error("node `{node}` references unknown parent `{parent}`")]
    UnknownParent { node: VarId, parent: VarId },
    #[error("cycle through variable `{0}`")]
    Cycle(VarId),
    #[error("node `{node}`: {error}")]
    BadCpt { node: VarId, error: ModelError },
    #[error("node `{node}` row {row} sums to {sum}, expected 1")]
    RowNotNormalized { node: VarId, row: usize, sum: f64 },
    #[error("node `{node}` row {row} contains a negative or non-finite entry")]
    BadRowEntry { node: VarId, row: usize },
}

/// A variable, its parents, and its CPT.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub variable: Variable,
    pub parents: Vec<VarId>,
    pub cpt: CptSpec,
}

impl Node {
    pub fn new(variable: Variable, parents: Vec<VarId>, cpt: CptSpec) -> Self {
        Node {
            variable,
            parents,
            cpt,
        }
    }

    /// A parentless node with the given distribution over its states.
    pub fn root(variable: Variable, distribution: Vec<f64>) -> Self {
        Node {
            variable,
            parents: Vec::new(),
            cpt: CptSpec::Table {
                rows: vec![distribution],
            },
        }
    }

    /// A parentless binary node with `P(faulty) = p`.
    pub fn binary_root(id: impl Into<VarId>, p: f64) -> Self {
        Node::root(Variable::binary(id), vec![1.0 - p, p])
    }

    pub fn id(&self) -> &VarId {
        &self.variable.id
    }

    pub fn is_root(&self) -> bool {
        self.parents.is_empty()
    }
}

/// A directed acyclic network of discrete variables.
///
/// Plain data, possibly invalid; [`BayesianNetwork::validate`] reports
/// every violated invariant. All analysis entry points require a clean
/// network.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BayesianNetwork {
    pub nodes: Vec<Node>,
}

impl BayesianNetwork {
    pub fn new(nodes: Vec<Node>) -> Self {
        BayesianNetwork { nodes }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id().as_str() == id)
    }

    pub fn node_position(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id().as_str() == id)
    }

    /// Root (parentless) nodes in declaration order.
    pub fn roots(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_root())
    }

    /// Cardinalities of a node's parents, in parent order.
    fn parent_cards(&self, node: &Node) -> Result<Vec<usize>, ModelError> {
        node.parents
            .iter()
            .map(|p| {
                self.node(p.as_str())
                    .map(|n| n.variable.card())
                    .ok_or_else(|| ModelError::UnknownVariable(p.clone()))
            })
            .collect()
    }

    /// Expands the CPT of `id` into a full table (one row per parent
    /// combination, one column per child state).
    pub fn expand_cpt(&self, id: &str) -> Result<Vec<Vec<f64>>, ModelError> {
        let node = self
            .node(id)
            .ok_or_else(|| ModelError::UnknownVariable(VarId::from(id)))?;
        let cards = self.parent_cards(node)?;
        node.cpt.expand(&cards, node.variable.card())
    }

    /// Returns a copy of the network in which `child`'s parents and CPT
    /// are replaced; every other node is untouched.
    ///
    /// Fails if `child` or a parent is unknown, if the new arcs would
    /// create a cycle, or if the CPT does not fit the new parent set.
    pub fn with_dependency(
        &self,
        child: &str,
        new_parents: Vec<VarId>,
        cpt: CptSpec,
    ) -> Result<BayesianNetwork, ModelError> {
        let position = self
            .node_position(child)
            .ok_or_else(|| ModelError::UnknownVariable(VarId::from(child)))?;
        let mut net = self.clone();
        net.nodes[position].parents = new_parents;
        net.nodes[position].cpt = cpt;

        let node = &net.nodes[position];
        let cards = net.parent_cards(node)?;
        node.cpt.expand(&cards, node.variable.card())?;
        if net.topological_order().is_none() {
            return Err(ModelError::CycleIntroduced {
                child: VarId::from(child),
            });
        }
        Ok(net)
    }

    /// Node positions in a parent-before-child order, or `None` if the
    /// graph has a cycle or a dangling parent.
    pub(crate) fn topological_order(&self) -> Option<Vec<usize>> {
        let pos: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id().as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.nodes.len()];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for parent in &node.parents {
                let &p = pos.get(parent.as_str())?;
                indegree[i] += 1;
                children[p].push(i);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| i)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Checks every invariant and returns one diagnostic per violation.
    pub fn validate(&self) -> Vec<BnDiagnostic> {
        let mut diags = Vec::new();

        let mut seen = HashSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id().clone()) {
                diags.push(BnDiagnostic::DuplicateVariable(node.id().clone()));
            }
            if node.variable.card() < 2 {
                diags.push(BnDiagnostic::TooFewStates(node.id().clone()));
            }
            let unique: HashSet<&String> = node.variable.states.iter().collect();
            if unique.len() != node.variable.states.len() {
                diags.push(BnDiagnostic::DuplicateState(node.id().clone()));
            }
        }

        for node in &self.nodes {
            for parent in &node.parents {
                if self.node(parent.as_str()).is_none() {
                    diags.push(BnDiagnostic::UnknownParent {
                        node: node.id().clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        if !diags.is_empty() {
            // Parent resolution failed; cycle and CPT checks would cascade.
            return diags;
        }

        if self.topological_order().is_none() {
            for id in self.cyclic_nodes() {
                diags.push(BnDiagnostic::Cycle(id));
            }
        }

        for node in &self.nodes {
            let cards = match self.parent_cards(node) {
                Ok(c) => c,
                Err(_) => continue,
            };
            match node.cpt.expand(&cards, node.variable.card()) {
                Err(e) => diags.push(BnDiagnostic::BadCpt {
                    node: node.id().clone(),
                    error: e,
                }),
                Ok(rows) => {
                    for (r, row) in rows.iter().enumerate() {
                        if row.iter().any(|&v| !v.is_finite() || v < 0.0) {
                            diags.push(BnDiagnostic::BadRowEntry {
                                node: node.id().clone(),
                                row: r,
                            });
                            continue;
                        }
                        let sum: f64 = row.iter().sum();
                        if (sum - 1.0).abs() > 1e-12 {
                            diags.push(BnDiagnostic::RowNotNormalized {
                                node: node.id().clone(),
                                row: r,
                                sum,
                            });
                        }
                    }
                }
            }
        }

        diags
    }

    fn cyclic_nodes(&self) -> Vec<VarId> {
        let order = {
            // Nodes never removed by Kahn's algorithm sit on or behind a cycle.
            let pos: HashMap<&str, usize> = self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n.id().as_str(), i))
                .collect();
            let mut indegree = vec![0usize; self.nodes.len()];
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
            for (i, node) in self.nodes.iter().enumerate() {
                for parent in &node.parents {
                    if let Some(&p) = pos.get(parent.as_str()) {
                        indegree[i] += 1;
                        children[p].push(i);
                    }
                }
            }
            let mut ready: Vec<usize> = indegree
                .iter()
                .enumerate()
                .filter(|(_, &d)| d == 0)
                .map(|(i, _)| i)
                .collect();
            let mut removed = vec![false; self.nodes.len()];
            while let Some(i) = ready.pop() {
                removed[i] = true;
                for &c in &children[i] {
                    indegree[c] -= 1;
                    if indegree[c] == 0 {
                        ready.push(c);
                    }
                }
            }
            removed
        };
        let mut out: Vec<VarId> = self
            .nodes
            .iter()
            .zip(&order)
            .filter(|(_, &removed)| !removed)
            .map(|(n, _)| n.id().clone())
            .collect();
        out.sort();
        out
    }

    /// Deterministic function row → child state, or `None` if any row of
    /// the expanded CPT is not a point mass.
    pub(crate) fn deterministic_function(&self, node: &Node) -> Option<Vec<usize>> {
        let cards = self.parent_cards(node).ok()?;
        let rows = node.cpt.expand(&cards, node.variable.card()).ok()?;
        let mut map = Vec::with_capacity(rows.len());
        for row in rows {
            let state = row.iter().position(|&v| v == 1.0)?;
            if row.iter().enumerate().any(|(s, &v)| s != state && v != 0.0) {
                return None;
            }
            map.push(state);
        }
        Some(map)
    }

    /// Serializes the network as the interchange JSON document.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("network serializes");
        s.push('\n');
        s
    }

    /// Parses the interchange JSON document.
    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

// Interchange form: nodes carry id/states/parents/cpt flat.
#[derive(Serialize, Deserialize)]
struct NodeRepr {
    id: VarId,
    states: Vec<String>,
    parents: Vec<VarId>,
    cpt: CptSpec,
}

impl From<Node> for NodeRepr {
    fn from(n: Node) -> Self {
        NodeRepr {
            id: n.variable.id,
            states: n.variable.states,
            parents: n.parents,
            cpt: n.cpt,
        }
    }
}

impl From<NodeRepr> for Node {
    fn from(r: NodeRepr) -> Self {
        Node {
            variable: Variable {
                id: r.id,
                states: r.states,
            },
            parents: r.parents,
            cpt: r.cpt,
        }
    }
}

impl Serialize for Node {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        NodeRepr::from(self.clone()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        NodeRepr::deserialize(deserializer).map(Node::from)
    }
}

/// Assignment of state indices to root variables.
pub type RootAssignment = BTreeMap<VarId, usize>;
