//! Time-parameterized component failure probabilities.
//!
//! Components are assumed to have exponentially distributed failure times:
//! a component with failure rate `λ` (failures per hour) is faulty at
//! mission time `t` with probability `1 − e^(−λt)`. Fixed-probability
//! models are also available so priors can be pinned directly, independent
//! of time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ft::{EventId, PrimaryEvent};

/// Failure behavior of a single component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FailureModel {
    /// Exponentially distributed failure time; `rate` is in failures/hour
    /// and must be nonnegative and finite.
    Exponential { rate: f64 },
    /// Time-independent failure probability in `[0, 1]`.
    Fixed { p: f64 },
}

impl FailureModel {
    pub fn exponential(rate: f64) -> Self {
        FailureModel::Exponential { rate }
    }

    pub fn fixed(p: f64) -> Self {
        FailureModel::Fixed { p }
    }

    /// Whether the parameters satisfy the model invariants.
    pub fn is_valid(&self) -> bool {
        match *self {
            FailureModel::Exponential { rate } => rate.is_finite() && rate >= 0.0,
            FailureModel::Fixed { p } => p.is_finite() && (0.0..=1.0).contains(&p),
        }
    }
}

/// A nonnegative, finite mission time in hours.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MissionTime(f64);

impl MissionTime {
    /// Returns `None` unless `hours` is finite and nonnegative.
    pub fn hours(hours: f64) -> Option<Self> {
        (hours.is_finite() && hours >= 0.0).then_some(MissionTime(hours))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Probability that a component is faulty at mission time `t`.
///
/// Exponential models evaluate to `1 − e^(−rate·t)`; fixed models return
/// their probability regardless of `t`. The result is always in `[0, 1]`
/// and nondecreasing in both `t` and the failure rate.
pub fn failure_probability(model: FailureModel, t: MissionTime) -> f64 {
    match model {
        // -exp_m1 avoids cancellation for small λt.
        FailureModel::Exponential { rate } => -(-rate * t.get()).exp_m1(),
        FailureModel::Fixed { p } => p,
    }
}

/// Failure probability of every primary event at mission time `t`.
///
/// One entry per distinct primary id; these are the priors fed to
/// [`compile`](crate::compile::compile).
pub fn probability_table(primaries: &[PrimaryEvent], t: MissionTime) -> BTreeMap<EventId, f64> {
    primaries
        .iter()
        .map(|p| (p.id.clone(), failure_probability(p.failure, t)))
        .collect()
}
