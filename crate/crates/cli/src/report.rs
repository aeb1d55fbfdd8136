//! JSON report documents written to stdout by every command.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use structdiag_core::{Complex64, DiagonalizabilityReport};

pub const TOOL_VERSION: &str = concat!("structdiag ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    /// SHA-256 of the input files' bytes, in argument order.
    pub input_digest: String,
    pub command: String,
    pub payload: Payload,
    #[serde(with = "residual_map")]
    pub residuals: BTreeMap<String, f64>,
}

impl ReportDocument {
    pub fn new(command: &str, input_digest: String, payload: Payload) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            input_digest,
            command: command.to_string(),
            payload,
            residuals: BTreeMap::new(),
        }
    }

    pub fn with_residuals<'a>(mut self, residuals: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        self.residuals
            .extend(residuals.into_iter().map(|(k, v)| (k.to_string(), v)));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn sha256_hex(chunks: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for chunk in chunks {
        hasher.update(chunk);
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Payload {
    Classification(Classification),
    Factors(Factors),
    Decomposition(Decomposition),
    Verification(Verification),
    Failure(Failure),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub holds: bool,
    #[serde(with = "residual")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub structure: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub form: String,
    pub structures: Vec<NamedCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expect: Option<Expectation>,
    /// Present when the matrix is selfadjoint or skewadjoint under a
    /// symplectic or perplectic form.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagonalizability: Option<Diagonalizability>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub value: [f64; 2],
    pub axis_class: String,
    pub multiplicity: usize,
    /// Gram inertia `(p, q, r)` of the eigenspace.
    pub inertia: [usize; 3],
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagonalizability {
    pub decision: bool,
    pub variant: String,
    pub reason: String,
    pub eigenvalues: Vec<EigenvalueEntry>,
}

impl From<&DiagonalizabilityReport> for Diagonalizability {
    fn from(r: &DiagonalizabilityReport) -> Self {
        Self {
            decision: r.decision,
            variant: r.variant.name().to_string(),
            reason: r.reason.clone(),
            eigenvalues: r
                .per_eigenvalue
                .iter()
                .map(|e| EigenvalueEntry {
                    value: pair(e.value),
                    axis_class: e.axis_class.name().to_string(),
                    multiplicity: e.multiplicity,
                    inertia: [e.gram_inertia.p, e.gram_inertia.q, e.gram_inertia.r],
                    balanced: e.balanced,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    pub form: String,
    pub variant: String,
    pub unitary: bool,
    /// Diagonal core `D`, one `[re, im]` per entry.
    pub core: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transform_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagonal_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub form: String,
    pub sign: String,
    pub rank: usize,
    pub core: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub factor_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub mode: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign: Option<String>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub error: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagonalizability: Option<Diagonalizability>,
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Residuals are finite in practice; a non-finite one is written as `null`
/// and read back as infinity so a failing document still parses.
mod residual {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

mod residual_map {
    use std::collections::BTreeMap;

    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &v.is_finite().then_some(*v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw = BTreeMap::<String, Option<f64>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|(k, v)| (k, v.unwrap_or(f64::INFINITY)))
            .collect())
    }
}
