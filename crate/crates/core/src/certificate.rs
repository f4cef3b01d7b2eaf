//! Pass/fail certificates emitted by the hypothesis checkers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One checked condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub condition: String,
    pub pass: bool,
    pub constants: BTreeMap<String, f64>,
    pub witness: Option<Vec<f64>>,
}

impl Certificate {
    pub fn new(condition: impl Into<String>, pass: bool) -> Self {
        Self {
            condition: condition.into(),
            pass,
            constants: BTreeMap::new(),
            witness: None,
        }
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn with_witness(mut self, witness: Option<Vec<f64>>) -> Self {
        self.witness = witness;
        self
    }
}

/// A named group of certificates; passes iff every entry passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub name: String,
    pub pass: bool,
    pub entries: Vec<Certificate>,
    /// Free-form conclusions drawn from passing entries.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conclusions: Vec<String>,
}

impl CertificateReport {
    pub fn new(name: impl Into<String>, entries: Vec<Certificate>) -> Self {
        let pass = entries.iter().all(|c| c.pass);
        Self {
            name: name.into(),
            pass,
            entries,
            conclusions: Vec::new(),
        }
    }

    pub fn entry(&self, condition: &str) -> Option<&Certificate> {
        self.entries.iter().find(|c| c.condition == condition)
    }

    /// First failing entry carrying a witness.
    pub fn first_witness(&self) -> Option<&[f64]> {
        self.entries
            .iter()
            .filter(|c| !c.pass)
            .find_map(|c| c.witness.as_deref())
    }
}
