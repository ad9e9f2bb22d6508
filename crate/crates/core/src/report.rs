//! JSON reports shared by the theorem checks and the command line.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub instances: Vec<Value>,
    pub pass: bool,
    pub witnesses: Vec<Value>,
}

impl Report {
    pub fn new(theorem: impl Into<String>) -> Self {
        Self { theorem: theorem.into(), instances: Vec::new(), pass: true, witnesses: Vec::new() }
    }

    /// Appends an instance and folds its verdict into `pass`.
    pub fn push(&mut self, instance: Value, pass: bool) {
        self.instances.push(instance);
        self.pass &= pass;
    }

    pub fn witness(&mut self, witness: Value) {
        self.witnesses.push(witness);
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("report: {e}")))
    }
}
