//! Qualitative analysis: minimal cut sets and their quantitative scores.
//!
//! A minimal cut set is a set-inclusion-minimal set of primary events
//! whose joint failure forces the top event — a prime implicant of the
//! top event's boolean function. Computation composes families bottom-up
//! over the monotone gate structure (union for OR, pairwise unions for
//! AND, k-subsets for k-of-n) with subset minimization after every step,
//! which is exact for monotone trees.
//!
//! Cut sets are scored three ways, all at one mission time: the classical
//! *unreliability* (product of member priors), the *posterior
//! unreliability* (unreliability divided by the top-event probability —
//! a cut set entails the top event, so conditioning merely rescales), and
//! the *diagnosis posterior* (posterior of the complete diagnosis
//! "members faulty, everything else working" given the top event).
//!
//! These notions only make sense while gates are deterministic. For
//! networks with noisy gates or multi-state variables, use
//! [`top_k_diagnoses`](crate::infer::top_k_diagnoses) instead.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::bn::{BayesianNetwork, VarId, STATE_FAULTY, STATE_WORKING};
use crate::ft::{Diagnostic, EventId, FaultTree, GateKind};
use crate::infer::{self, Evidence, InferError};

/// A set of primary events whose joint failure causes the top event.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutSet {
    members: BTreeSet<EventId>,
}

impl CutSet {
    pub fn new(members: impl IntoIterator<Item = EventId>) -> Self {
        CutSet {
            members: members.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &BTreeSet<EventId> {
        &self.members
    }

    /// Number of members.
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.iter().any(|m| m.as_str() == id)
    }
}

impl std::fmt::Display for CutSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// A cut set with its three quantitative scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCutSet {
    pub cutset: CutSet,
    /// Product of the members' failure probabilities.
    pub unreliability: f64,
    /// Unreliability divided by P(top event).
    pub posterior_unreliability: f64,
    /// Posterior, given the top event, of the complete diagnosis with
    /// exactly the members faulty.
    pub diagnosis_posterior: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CutSetError {
    #[error("fault tree is invalid: {0:?}")]
    InvalidTree(Vec<Diagnostic>),
    #[error("no prior probability for primary event `{0}`")]
    MissingPrior(EventId),
    #[error(transparent)]
    Infer(#[from] InferError),
}

/// Computes the minimal cut sets of a valid fault tree, sorted by order
/// and then lexicographically by members.
pub fn minimal_cut_sets(ft: &FaultTree) -> Result<Vec<CutSet>, CutSetError> {
    let diags = ft.validate();
    if !diags.is_empty() {
        return Err(CutSetError::InvalidTree(diags));
    }

    let mut memo: HashMap<EventId, Vec<BTreeSet<EventId>>> = HashMap::new();
    let mut family = family_of(ft, &ft.top, &mut memo);
    family.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(family
        .into_iter()
        .map(|members| CutSet { members })
        .collect())
}

fn family_of(
    ft: &FaultTree,
    event: &EventId,
    memo: &mut HashMap<EventId, Vec<BTreeSet<EventId>>>,
) -> Vec<BTreeSet<EventId>> {
    if let Some(cached) = memo.get(event) {
        return cached.clone();
    }
    let family = match ft.gate_for(event.as_str()) {
        None => vec![[event.clone()].into_iter().collect()],
        Some(gate) => {
            let inputs: Vec<Vec<BTreeSet<EventId>>> = gate
                .inputs
                .iter()
                .map(|input| family_of(ft, input, memo))
                .collect();
            let combined = match gate.kind {
                GateKind::Or => inputs.into_iter().flatten().collect(),
                GateKind::And => and_compose(&inputs),
                GateKind::KofN { k, .. } => {
                    let mut union = Vec::new();
                    for subset in k_subsets(inputs.len(), k) {
                        let chosen: Vec<Vec<BTreeSet<EventId>>> =
                            subset.iter().map(|&i| inputs[i].clone()).collect();
                        union.extend(and_compose(&chosen));
                    }
                    union
                }
            };
            minimize(combined)
        }
    };
    memo.insert(event.clone(), family.clone());
    family
}

/// Cross-product unions of the given families.
fn and_compose(families: &[Vec<BTreeSet<EventId>>]) -> Vec<BTreeSet<EventId>> {
    let mut acc: Vec<BTreeSet<EventId>> = vec![BTreeSet::new()];
    for family in families {
        let mut next = Vec::with_capacity(acc.len() * family.len());
        for base in &acc {
            for addition in family {
                let mut set = base.clone();
                set.extend(addition.iter().cloned());
                next.push(set);
            }
        }
        acc = minimize(next);
    }
    acc
}

/// Drops duplicates and any set containing another set of the family.
fn minimize(mut family: Vec<BTreeSet<EventId>>) -> Vec<BTreeSet<EventId>> {
    family.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    family.dedup();
    let mut kept: Vec<BTreeSet<EventId>> = Vec::with_capacity(family.len());
    for candidate in family {
        if !kept.iter().any(|m| m.is_subset(&candidate)) {
            kept.push(candidate);
        }
    }
    kept
}

/// All k-element subsets of `0..n` in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Product of the members' prior probabilities.
pub fn unreliability(cutset: &CutSet, priors: &BTreeMap<EventId, f64>) -> Result<f64, CutSetError> {
    let mut product = 1.0;
    for member in &cutset.members {
        product *= priors
            .get(member)
            .ok_or_else(|| CutSetError::MissingPrior(member.clone()))?;
    }
    Ok(product)
}

/// Scores every minimal cut set of `ft` against the compiled network
/// `net`, descending by unreliability (ties by order, then members).
///
/// `net` must be the compilation of `ft` under the same priors.
pub fn score_cut_sets(
    ft: &FaultTree,
    net: &BayesianNetwork,
    priors: &BTreeMap<EventId, f64>,
) -> Result<Vec<ScoredCutSet>, CutSetError> {
    let cutsets = minimal_cut_sets(ft)?;
    let top = VarId::from(&ft.top);
    let p_top = infer::marginal(net, &top, &Evidence::none())?
        .p(STATE_FAULTY)
        .expect("compiled top event is binary");
    let top_faulty = Evidence::observe(top.as_str(), STATE_FAULTY);

    let mut scored = Vec::with_capacity(cutsets.len());
    for cutset in cutsets {
        let unrel = unreliability(&cutset, priors)?;
        let diagnosis: Evidence = ft
            .primaries
            .iter()
            .map(|p| {
                let state = if cutset.contains(p.id.as_str()) {
                    STATE_FAULTY
                } else {
                    STATE_WORKING
                };
                (VarId::from(&p.id), state.to_owned())
            })
            .collect();
        let diagnosis_posterior = infer::query_probability(net, &diagnosis, &top_faulty)?;
        scored.push(ScoredCutSet {
            cutset,
            unreliability: unrel,
            posterior_unreliability: unrel / p_top,
            diagnosis_posterior,
        });
    }
    scored.sort_by(|a, b| {
        b.unreliability
            .total_cmp(&a.unreliability)
            .then_with(|| a.cutset.order().cmp(&b.cutset.order()))
            .then_with(|| a.cutset.cmp(&b.cutset))
    });
    Ok(scored)
}
