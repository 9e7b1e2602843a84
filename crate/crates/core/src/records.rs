//! Shared result shapes for file and CLI output.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algorithms::Outcome;

/// Which engine produced a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Formula,
    Oracle,
    MonteCarlo,
}

/// A probability mass over outcomes, as floats, tagged with its origin and
/// the couple structure it was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub mass: BTreeMap<Outcome, f64>,
    pub provenance: Provenance,
    pub k: usize,
}

impl OutcomeDistribution {
    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn mass_of(&self, outcome: Outcome) -> f64 {
        self.mass.get(&outcome).copied().unwrap_or(0.0)
    }
}

/// One evaluated quantity: operation name, its parameters, the value, the
/// backend that produced it and (for truncated series) the tail bound.
/// Exact rational values are carried as "p/q" strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValueRecord {
    pub op: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub value: serde_json::Value,
    pub backend: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_bound: Option<f64>,
}

impl ValueRecord {
    pub fn float(op: &str, params: BTreeMap<String, serde_json::Value>, value: f64) -> Self {
        ValueRecord {
            op: op.to_string(),
            params,
            value: serde_json::json!(value),
            backend: Provenance::Formula,
            truncation_bound: None,
        }
    }
}

/// Renders an exact rational as "p/q".
pub fn rational_str(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
