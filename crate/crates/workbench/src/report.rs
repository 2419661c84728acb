//! The JSON document printed by every command.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::setup::Setup;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub setup: Option<SetupDigest>,
    pub checks: Vec<Check>,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetupDigest {
    pub independent: Vec<String>,
    pub dependent: Vec<String>,
    pub operators: BTreeMap<String, String>,
    pub sha256: String,
}

impl SetupDigest {
    pub fn of(setup: &Setup) -> Self {
        let sig = &setup.signature;
        let operators: BTreeMap<String, String> =
            setup.operators.iter().map(|(k, op)| (k.clone(), op.display(sig).to_string())).collect();
        let mut canonical = format!("independent={}\ndependent={}\n", sig.independent().join(","), sig.dependent().join(","));
        for (k, v) in &operators {
            let _ = writeln!(canonical, "{k}={v}");
        }
        let _ = write!(canonical, "options={:?}", setup.options);
        let hash = Sha256::digest(canonical.as_bytes());
        let sha256 = hash.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        SetupDigest {
            independent: sig.independent().to_vec(),
            dependent: sig.dependent().to_vec(),
            operators,
            sha256,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    /// Rendered results, in a command-specific order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Labelled>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Labelled {
    pub label: String,
    pub value: String,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check { name: name.into(), ..Check::default() }
    }

    pub fn verdict(mut self, v: impl Into<String>) -> Self {
        self.verdict = Some(v.into());
        self
    }

    pub fn value(mut self, label: impl Into<String>, value: impl ToString) -> Self {
        self.values.push(Labelled { label: label.into(), value: value.to_string() });
        self
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// A plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.verdict {
                Some(v) => {
                    let _ = writeln!(out, "{}: {v}", c.name);
                }
                None => {
                    let _ = writeln!(out, "{}:", c.name);
                }
            }
            for l in &c.values {
                let _ = writeln!(out, "  {} = {}", l.label, l.value);
            }
            if let Some(r) = &c.residual {
                let _ = writeln!(out, "  residual = {r}");
            }
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "  witness = ({})", w.join(", "));
            }
            match &c.detail {
                Some(serde_json::Value::Object(fields)) => {
                    for (k, v) in fields {
                        match v {
                            serde_json::Value::String(s) => writeln!(out, "  {k} = {s}"),
                            other => writeln!(out, "  {k} = {other}"),
                        }
                        .ok();
                    }
                }
                Some(d) => {
                    let _ = writeln!(out, "  {d}");
                }
                None => {}
            }
            if let Some(t) = c.timing_ms {
                let _ = writeln!(out, "  time = {t:.1} ms");
            }
        }
        out
    }
}
