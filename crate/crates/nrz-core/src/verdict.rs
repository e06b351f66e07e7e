//! Shared verdict vocabulary.
//!
//! Every decision procedure in this crate returns one of three statuses. A
//! negative verdict always names the rule that fired and carries the witness
//! data; a positive one carries a construction certificate.

use serde::{Deserialize, Serialize};

/// Outcome of a realizability decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Realizable,
    NotRealizable,
    Unknown,
}

/// A named rule together with the data that made it fire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleWitness {
    /// Stable rule identifier, e.g. `"max_stabilizers"` or `"rank4_odd_n"`.
    pub rule: String,
    /// Human-readable witness data.
    pub data: String,
}

impl RuleWitness {
    pub fn new(rule: impl Into<String>, data: impl Into<String>) -> Self {
        Self {
            rule: rule.into(),
            data: data.into(),
        }
    }
}
