//! Exact inference: marginals, joint queries, posteriors under evidence,
//! and ranked complete diagnoses.
//!
//! Queries run variable elimination with a min-fill ordering (ties broken
//! by variable id), which is exact and more than adequate for the
//! tree-like networks produced by compilation. A brute-force joint
//! enumeration is provided as an independent oracle for cross-checking;
//! it is the reference every other operation is tested against.
//!
//! All arithmetic is plain `f64` in linear space. Zero-probability
//! evidence is an error, never a NaN: callers must learn that their
//! observation is impossible under the model.

mod factor;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::bn::{BayesianNetwork, BnDiagnostic, ModelError, VarId};
use factor::Factor;

/// Hard ceiling on enumerable state spaces (2^22 assignments).
const ENUMERATION_LIMIT: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(VarId),
    #[error("variable `{var}` has no state `{state}`")]
    UnknownState { var: VarId, state: String },
    #[error("evidence has probability zero under the model")]
    ImpossibleEvidence,
    #[error("state space of {0} assignments exceeds the enumeration limit of 2^22")]
    StateSpaceTooLarge(u128),
    #[error("invalid network: {0}")]
    InvalidNetwork(BnDiagnostic),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Observed states, `variable → state name`. Also used as the partial
/// assignment in joint queries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence(BTreeMap<VarId, String>);

impl Evidence {
    /// No observations.
    pub fn none() -> Self {
        Evidence::default()
    }

    /// A single observation.
    pub fn observe(var: impl Into<VarId>, state: impl Into<String>) -> Self {
        Evidence::none().with(var, state)
    }

    /// Adds an observation, replacing any previous one for the variable.
    pub fn with(mut self, var: impl Into<VarId>, state: impl Into<String>) -> Self {
        self.0.insert(var.into(), state.into());
        self
    }

    pub fn set(&mut self, var: impl Into<VarId>, state: impl Into<String>) {
        self.0.insert(var.into(), state.into());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &str)> {
        self.0.iter().map(|(v, s)| (v, s.as_str()))
    }
}

impl FromIterator<(VarId, String)> for Evidence {
    fn from_iter<T: IntoIterator<Item = (VarId, String)>>(iter: T) -> Self {
        Evidence(iter.into_iter().collect())
    }
}

/// Exact posterior distribution over one variable's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub var: VarId,
    pub states: Vec<String>,
    pub probs: Vec<f64>,
}

impl Distribution {
    /// Probability of the named state.
    pub fn p(&self, state: &str) -> Option<f64> {
        self.states
            .iter()
            .position(|s| s == state)
            .map(|i| self.probs[i])
    }

    /// State with the highest probability (first on ties).
    pub fn modal_state(&self) -> &str {
        let mut best = 0;
        for i in 1..self.probs.len() {
            if self.probs[i] > self.probs[best] {
                best = i;
            }
        }
        &self.states[best]
    }
}

/// Renders as a JSON map `state → probability` with 6 significant digits.
impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (state, p)) in self.states.iter().zip(&self.probs).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "\"{}\": {}", state, format_significant(*p, 6))?;
        }
        f.write_str("}")
    }
}

/// Formats with the given number of significant digits (fixed notation).
pub(crate) fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// A complete assignment to the network's root variables with its
/// posterior probability.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedDiagnosis {
    /// State of every root variable, by name.
    pub assignment: BTreeMap<VarId, String>,
    pub posterior: f64,
}

impl RankedDiagnosis {
    /// Root variables not in their first (working) state.
    pub fn non_working(&self, net: &BayesianNetwork) -> Vec<(VarId, String)> {
        self.assignment
            .iter()
            .filter(|(var, state)| {
                net.node(var.as_str())
                    .map(|n| n.variable.states.first() != Some(state))
                    .unwrap_or(true)
            })
            .map(|(v, s)| (v.clone(), s.clone()))
            .collect()
    }
}

/// Indexed, validated view of a network: expanded CPTs, topological order,
/// and per-node deterministic functions where they exist.
struct NetView<'a> {
    net: &'a BayesianNetwork,
    ids: Vec<VarId>,
    cards: Vec<usize>,
    parents: Vec<Vec<usize>>,
    rows: Vec<Vec<Vec<f64>>>,
    /// Per node, the stride of each parent in its CPT row index.
    row_strides: Vec<Vec<usize>>,
    topo: Vec<usize>,
    deterministic: Vec<Option<Vec<usize>>>,
}

impl<'a> NetView<'a> {
    fn new(net: &'a BayesianNetwork) -> Result<Self, InferError> {
        if let Some(diag) = net.validate().into_iter().next() {
            return Err(InferError::InvalidNetwork(diag));
        }
        let by_id: HashMap<&str, usize> = net
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id().as_str(), i))
            .collect();
        let ids: Vec<VarId> = net.nodes.iter().map(|n| n.id().clone()).collect();
        let cards: Vec<usize> = net.nodes.iter().map(|n| n.variable.card()).collect();
        let parents: Vec<Vec<usize>> = net
            .nodes
            .iter()
            .map(|n| n.parents.iter().map(|p| by_id[p.as_str()]).collect())
            .collect();
        let mut rows = Vec::with_capacity(net.nodes.len());
        for node in &net.nodes {
            rows.push(net.expand_cpt(node.id().as_str())?);
        }
        let topo = net.topological_order().expect("validated net is acyclic");
        let deterministic = net
            .nodes
            .iter()
            .map(|n| {
                if n.is_root() {
                    None
                } else {
                    net.deterministic_function(n)
                }
            })
            .collect();
        let row_strides = parents
            .iter()
            .map(|ps| {
                let parent_cards: Vec<usize> = ps.iter().map(|&p| cards[p]).collect();
                crate::index::strides(&parent_cards)
            })
            .collect();
        Ok(NetView {
            net,
            ids,
            cards,
            parents,
            rows,
            row_strides,
            topo,
            deterministic,
        })
    }

    fn index_of(&self, var: &str) -> Result<usize, InferError> {
        self.net
            .node_position(var)
            .ok_or_else(|| InferError::UnknownVariable(VarId::from(var)))
    }

    fn resolve(&self, ev: &Evidence) -> Result<BTreeMap<usize, usize>, InferError> {
        let mut out = BTreeMap::new();
        for (var, state) in ev.iter() {
            let i = self.index_of(var.as_str())?;
            let s = self.net.nodes[i]
                .variable
                .state_index(state)
                .ok_or_else(|| InferError::UnknownState {
                    var: var.clone(),
                    state: state.to_owned(),
                })?;
            out.insert(i, s);
        }
        Ok(out)
    }

    /// CPT factors with evidence applied.
    fn reduced_factors(&self, ev: &BTreeMap<usize, usize>) -> Vec<Factor> {
        (0..self.net.nodes.len())
            .map(|i| {
                let parent_cards: Vec<usize> =
                    self.parents[i].iter().map(|&p| self.cards[p]).collect();
                let mut f = Factor::from_cpt(
                    i,
                    self.cards[i],
                    &self.parents[i],
                    &parent_cards,
                    &self.rows[i],
                );
                for (&var, &state) in ev {
                    if f.contains(var) {
                        f = f.reduce(var, state);
                    }
                }
                f
            })
            .collect()
    }

    /// Unnormalized factor over `keep` given the evidence; its total is
    /// the probability of the evidence.
    fn eliminate(&self, keep: &BTreeSet<usize>, ev: &BTreeMap<usize, usize>) -> Factor {
        let mut factors = self.reduced_factors(ev);
        let to_eliminate: BTreeSet<usize> = (0..self.net.nodes.len())
            .filter(|i| !keep.contains(i) && !ev.contains_key(i))
            .collect();

        for var in self.min_fill_order(&factors, &to_eliminate) {
            let (with, without): (Vec<Factor>, Vec<Factor>) =
                factors.into_iter().partition(|f| f.contains(var));
            factors = without;
            if let Some(product) = with.into_iter().reduce(|a, b| a.product(&b)) {
                factors.push(product.sum_out(var));
            }
        }

        factors
            .into_iter()
            .reduce(|a, b| a.product(&b))
            .unwrap_or_else(|| Factor::scalar(1.0))
    }

    /// Min-fill elimination order; ties go to the lexicographically
    /// smaller variable id.
    fn min_fill_order(&self, factors: &[Factor], eliminate: &BTreeSet<usize>) -> Vec<usize> {
        let n = self.net.nodes.len();
        let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for f in factors {
            for (i, &a) in f.scope.iter().enumerate() {
                for &b in &f.scope[i + 1..] {
                    adjacency[a].insert(b);
                    adjacency[b].insert(a);
                }
            }
        }

        let mut remaining = eliminate.clone();
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let mut best: Option<(usize, usize)> = None; // (fill, var)
            for &v in &remaining {
                let neighbors: Vec<usize> = adjacency[v].iter().copied().collect();
                let mut fill = 0;
                for (i, &a) in neighbors.iter().enumerate() {
                    for &b in &neighbors[i + 1..] {
                        if !adjacency[a].contains(&b) {
                            fill += 1;
                        }
                    }
                }
                let better = match best {
                    None => true,
                    Some((best_fill, best_var)) => {
                        fill < best_fill
                            || (fill == best_fill
                                && self.ids[v].as_str() < self.ids[best_var].as_str())
                    }
                };
                if better {
                    best = Some((fill, v));
                }
            }
            let (_, v) = best.expect("remaining is nonempty");
            let neighbors: Vec<usize> = adjacency[v].iter().copied().collect();
            for (i, &a) in neighbors.iter().enumerate() {
                for &b in &neighbors[i + 1..] {
                    adjacency[a].insert(b);
                    adjacency[b].insert(a);
                }
            }
            for &u in &neighbors {
                adjacency[u].remove(&v);
            }
            adjacency[v].clear();
            remaining.remove(&v);
            order.push(v);
        }
        order
    }

    /// Root positions, sorted by variable id.
    fn roots_by_id(&self) -> Vec<usize> {
        let mut roots: Vec<usize> = (0..self.net.nodes.len())
            .filter(|&i| self.parents[i].is_empty())
            .collect();
        roots.sort_by(|&a, &b| self.ids[a].as_str().cmp(self.ids[b].as_str()));
        roots
    }

    fn all_nonroots_deterministic(&self) -> bool {
        (0..self.net.nodes.len())
            .all(|i| self.parents[i].is_empty() || self.deterministic[i].is_some())
    }

    /// Forward-propagates root states through deterministic non-roots.
    /// `states` must hold valid root states; non-root slots are written.
    fn propagate(&self, states: &mut [usize]) -> Result<(), InferError> {
        for &i in &self.topo {
            if self.parents[i].is_empty() {
                continue;
            }
            let function = self.deterministic[i].as_ref().ok_or_else(|| {
                InferError::Model(ModelError::NotDeterministic(self.ids[i].clone()))
            })?;
            let row: usize = self.parents[i]
                .iter()
                .zip(&self.row_strides[i])
                .map(|(&p, &stride)| states[p] * stride)
                .sum();
            states[i] = function[row];
        }
        Ok(())
    }
}

/// Exact posterior distribution of `var` given the evidence.
pub fn marginal(
    net: &BayesianNetwork,
    var: &VarId,
    evidence: &Evidence,
) -> Result<Distribution, InferError> {
    let view = NetView::new(net)?;
    let v = view.index_of(var.as_str())?;
    let ev = view.resolve(evidence)?;
    let states = net.nodes[v].variable.states.clone();

    if let Some(&observed) = ev.get(&v) {
        let z = view.eliminate(&BTreeSet::new(), &ev).total();
        if z <= 0.0 {
            return Err(InferError::ImpossibleEvidence);
        }
        let mut probs = vec![0.0; states.len()];
        probs[observed] = 1.0;
        return Ok(Distribution {
            var: var.clone(),
            states,
            probs,
        });
    }

    let keep: BTreeSet<usize> = [v].into_iter().collect();
    let f = view.eliminate(&keep, &ev);
    debug_assert_eq!(f.scope, vec![v]);
    let z = f.total();
    if z <= 0.0 {
        return Err(InferError::ImpossibleEvidence);
    }
    Ok(Distribution {
        var: var.clone(),
        states,
        probs: f.data.iter().map(|p| p / z).collect(),
    })
}

/// Probability of the evidence itself, P(E).
pub fn evidence_probability(net: &BayesianNetwork, evidence: &Evidence) -> Result<f64, InferError> {
    let view = NetView::new(net)?;
    let ev = view.resolve(evidence)?;
    Ok(view.eliminate(&BTreeSet::new(), &ev).total())
}

/// Exact P(target | evidence) for a partial assignment `target`.
pub fn query_probability(
    net: &BayesianNetwork,
    target: &Evidence,
    evidence: &Evidence,
) -> Result<f64, InferError> {
    let view = NetView::new(net)?;
    let ev = view.resolve(evidence)?;
    let tg = view.resolve(target)?;

    let denominator = view.eliminate(&BTreeSet::new(), &ev).total();
    if denominator <= 0.0 {
        return Err(InferError::ImpossibleEvidence);
    }

    let mut joint = ev.clone();
    for (var, state) in tg {
        if let Some(&observed) = joint.get(&var) {
            if observed != state {
                return Ok(0.0); // target contradicts the evidence
            }
        }
        joint.insert(var, state);
    }
    let numerator = view.eliminate(&BTreeSet::new(), &joint).total();
    Ok(numerator / denominator)
}

/// The `k` highest-posterior complete assignments to the root variables,
/// descending; ties broken by lexicographic assignment order.
///
/// When every non-root is deterministic (compiled fault trees), roots are
/// enumerated with branch-and-bound pruning on the prior mass. Otherwise
/// the joint is enumerated outright, subject to the 2^22 ceiling.
pub fn top_k_diagnoses(
    net: &BayesianNetwork,
    evidence: &Evidence,
    k: usize,
) -> Result<Vec<RankedDiagnosis>, InferError> {
    let view = NetView::new(net)?;
    let ev = view.resolve(evidence)?;
    let roots = view.roots_by_id();
    if k == 0 {
        return Ok(Vec::new());
    }

    let mut candidates: Vec<(f64, Vec<usize>)>;
    let z;
    if view.all_nonroots_deterministic() {
        z = view.eliminate(&BTreeSet::new(), &ev).total();
        if z <= 0.0 {
            return Err(InferError::ImpossibleEvidence);
        }
        candidates = branch_and_bound(&view, &roots, &ev, k)?;
    } else {
        let joint = enumerate_view(&view, &ev)?;
        z = joint.total_mass();
        if z <= 0.0 {
            return Err(InferError::ImpossibleEvidence);
        }
        let mut agg: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (states, mass) in joint.entries() {
            let key: Vec<usize> = roots.iter().map(|&r| states[r] as usize).collect();
            *agg.entry(key).or_insert(0.0) += mass;
        }
        candidates = agg.into_iter().map(|(key, mass)| (mass, key)).collect();
    }

    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    candidates.truncate(k);

    Ok(candidates
        .into_iter()
        .map(|(mass, states)| RankedDiagnosis {
            assignment: roots
                .iter()
                .zip(&states)
                .map(|(&r, &s)| {
                    (
                        view.ids[r].clone(),
                        view.net.nodes[r].variable.states[s].clone(),
                    )
                })
                .collect(),
            posterior: mass / z,
        })
        .collect())
}

/// Depth-first enumeration of root assignments with pruning: a partial
/// prior below the k-th best consistent prior cannot recover, because
/// every remaining factor is at most 1.
fn branch_and_bound(
    view: &NetView,
    roots: &[usize],
    ev: &BTreeMap<usize, usize>,
    k: usize,
) -> Result<Vec<(f64, Vec<usize>)>, InferError> {
    // Per-root priors and domains (evidence pins root domains).
    let mut domains: Vec<Vec<(usize, f64)>> = Vec::with_capacity(roots.len());
    for &r in roots {
        let prior = &view.rows[r][0];
        let mut dom: Vec<(usize, f64)> = match ev.get(&r) {
            Some(&s) => vec![(s, prior[s])],
            None => prior.iter().copied().enumerate().collect(),
        };
        // visit heavier states first so the bound tightens early
        dom.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        domains.push(dom);
    }

    struct Search<'s, 'a> {
        view: &'s NetView<'a>,
        roots: &'s [usize],
        domains: &'s [Vec<(usize, f64)>],
        ev: &'s BTreeMap<usize, usize>,
        k: usize,
        // k-th best consistent priors seen so far, as a min-heap
        bounds: std::collections::BinaryHeap<std::cmp::Reverse<TotalF64>>,
        kept: Vec<(f64, Vec<usize>)>,
        chosen: Vec<usize>,
        buffer: Vec<usize>,
    }

    impl Search<'_, '_> {
        fn bound(&self) -> Option<f64> {
            if self.bounds.len() == self.k {
                self.bounds.peek().map(|r| r.0 .0)
            } else {
                None
            }
        }

        fn dive(&mut self, depth: usize, prior: f64) -> Result<(), InferError> {
            if let Some(bound) = self.bound() {
                if prior < bound {
                    return Ok(());
                }
            }
            if depth == self.roots.len() {
                for (slot, &r) in self.roots.iter().enumerate() {
                    self.buffer[r] = self.chosen[slot];
                }
                self.view.propagate(&mut self.buffer)?;
                let consistent = self
                    .ev
                    .iter()
                    .all(|(&var, &state)| self.buffer[var] == state);
                if consistent {
                    self.kept.push((prior, self.chosen.clone()));
                    self.bounds.push(std::cmp::Reverse(TotalF64(prior)));
                    if self.bounds.len() > self.k {
                        self.bounds.pop();
                    }
                }
                return Ok(());
            }
            for &(state, p) in &self.domains[depth] {
                self.chosen.push(state);
                self.dive(depth + 1, prior * p)?;
                self.chosen.pop();
            }
            Ok(())
        }
    }

    let n = view.net.nodes.len();
    let mut search = Search {
        view,
        roots,
        domains: &domains,
        ev,
        k,
        bounds: std::collections::BinaryHeap::new(),
        kept: Vec::new(),
        chosen: Vec::with_capacity(roots.len()),
        buffer: vec![0; n],
    };
    search.dive(0, 1.0)?;
    Ok(search.kept)
}

#[derive(PartialEq)]
struct TotalF64(f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// The exact joint over all variables, by direct summation of CPT
/// products. Branches with zero probability are skipped, so deterministic
/// nodes do not enlarge the enumeration; the effective state space (the
/// product of non-deterministic cardinalities) must stay within 2^22.
///
/// With evidence, only consistent assignments appear and the masses sum
/// to P(E); with no evidence they sum to 1.
pub fn enumerate_joint(
    net: &BayesianNetwork,
    evidence: &Evidence,
) -> Result<JointEnumeration, InferError> {
    let view = NetView::new(net)?;
    let ev = view.resolve(evidence)?;
    enumerate_view(&view, &ev)
}

fn enumerate_view(
    view: &NetView,
    ev: &BTreeMap<usize, usize>,
) -> Result<JointEnumeration, InferError> {
    let n = view.net.nodes.len();
    let mut effective: u128 = 1;
    for i in 0..n {
        if view.cards[i] > u8::MAX as usize {
            return Err(InferError::StateSpaceTooLarge(u128::MAX));
        }
        if !view.parents[i].is_empty() && view.deterministic[i].is_some() {
            continue;
        }
        effective = effective.saturating_mul(view.cards[i] as u128);
    }
    if effective > ENUMERATION_LIMIT {
        return Err(InferError::StateSpaceTooLarge(effective));
    }

    let mut out = JointEnumeration {
        variables: view.ids.clone(),
        n,
        states: Vec::new(),
        mass: Vec::new(),
    };
    let mut buffer = vec![0usize; n];

    fn recurse(
        view: &NetView,
        ev: &BTreeMap<usize, usize>,
        depth: usize,
        mass: f64,
        buffer: &mut Vec<usize>,
        out: &mut JointEnumeration,
    ) {
        if depth == view.topo.len() {
            out.states.extend(buffer.iter().map(|&s| s as u8));
            out.mass.push(mass);
            return;
        }
        let i = view.topo[depth];
        let row: usize = view.parents[i]
            .iter()
            .zip(&view.row_strides[i])
            .map(|(&p, &stride)| buffer[p] * stride)
            .sum();
        let probs = &view.rows[i][row];
        for (state, &p) in probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            if let Some(&observed) = ev.get(&i) {
                if observed != state {
                    continue;
                }
            }
            buffer[i] = state;
            recurse(view, ev, depth + 1, mass * p, buffer, out);
        }
    }

    recurse(view, ev, 0, 1.0, &mut buffer, &mut out);
    Ok(out)
}

/// Result of [`enumerate_joint`]: every complete assignment with nonzero
/// probability, in a fixed order.
#[derive(Debug, Clone)]
pub struct JointEnumeration {
    /// Variables in network node order; assignment slices follow it.
    pub variables: Vec<VarId>,
    n: usize,
    states: Vec<u8>,
    mass: Vec<f64>,
}

impl JointEnumeration {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Position of a variable within assignment slices.
    pub fn position_of(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.as_str() == var)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u8], f64)> {
        self.states
            .chunks_exact(self.n.max(1))
            .zip(self.mass.iter().copied())
    }

    /// Total mass of assignments satisfying the predicate, summed in
    /// enumeration order.
    pub fn mass_where(&self, mut predicate: impl FnMut(&[u8]) -> bool) -> f64 {
        self.entries()
            .filter(|(states, _)| predicate(states))
            .map(|(_, m)| m)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Reusable forward-propagation handle for networks whose non-roots are
/// all deterministic. Validation and CPT expansion happen once at
/// construction, so propagating many assignments is cheap.
pub struct Propagator<'a> {
    view: NetView<'a>,
}

impl<'a> Propagator<'a> {
    pub fn new(net: &'a BayesianNetwork) -> Result<Self, InferError> {
        Ok(Propagator {
            view: NetView::new(net)?,
        })
    }

    /// Propagates a complete root assignment (state indices) through the
    /// deterministic non-roots, returning the state of every variable.
    pub fn propagate(
        &self,
        root_states: &BTreeMap<VarId, usize>,
    ) -> Result<BTreeMap<VarId, usize>, InferError> {
        let view = &self.view;
        let mut states = vec![0usize; view.ids.len()];
        for (i, state) in states.iter_mut().enumerate() {
            if view.parents[i].is_empty() {
                let s = *root_states.get(&view.ids[i]).ok_or_else(|| {
                    InferError::Model(ModelError::MissingRootState(view.ids[i].clone()))
                })?;
                if s >= view.cards[i] {
                    return Err(InferError::UnknownState {
                        var: view.ids[i].clone(),
                        state: s.to_string(),
                    });
                }
                *state = s;
            }
        }
        view.propagate(&mut states)?;
        Ok(view.ids.iter().cloned().zip(states).collect())
    }
}

/// One-shot convenience for [`Propagator`].
pub fn propagate_deterministic(
    net: &BayesianNetwork,
    root_states: &BTreeMap<VarId, usize>,
) -> Result<BTreeMap<VarId, usize>, InferError> {
    Propagator::new(net)?.propagate(root_states)
}
