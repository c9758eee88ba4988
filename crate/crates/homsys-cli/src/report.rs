//! Machine-readable reports: verdict rows with anchors and witnesses, the
//! session seed and field, and digests of the certificates a run produced.
//! The JSON form round-trips (parse of an emitted report re-emits the same
//! bytes).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use homsys::derived::describe;
use homsys::field::FieldCfg;
use homsys::theta::{AxiomReport, FiltrationCertificate, ThetaSystem};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Verdict {
    pub anchor: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldOut {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl From<FieldCfg> for FieldOut {
    fn from(f: FieldCfg) -> Self {
        match f {
            FieldCfg::Rational => FieldOut { kind: "rational".into(), p: None },
            FieldCfg::Prime(p) => FieldOut { kind: "prime".into(), p: Some(p) },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub field: FieldOut,
    pub verdicts: Vec<Verdict>,
    pub certificates: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64, field: FieldCfg) -> Self {
        Report {
            command: command.into(),
            seed,
            field: field.into(),
            verdicts: vec![],
            certificates: vec![],
        }
    }

    pub fn push(&mut self, anchor: &str, pass: bool, witness: Option<String>, dims: Option<Vec<usize>>) {
        self.verdicts.push(Verdict { anchor: anchor.into(), pass, witness, dims });
    }

    pub fn push_axioms(&mut self, rep: &AxiomReport) {
        for e in &rep.entries {
            self.verdicts.push(Verdict {
                anchor: e.anchor.clone(),
                pass: e.pass,
                witness: e.witness.clone(),
                dims: e.dims.clone(),
            });
        }
    }

    pub fn add_certificate(&mut self, s: &ThetaSystem, cert: &FiltrationCertificate) {
        self.certificates.push(certificate_digest(s, cert));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("seed: {}\n", self.seed));
        match (&self.field.kind[..], self.field.p) {
            ("prime", Some(p)) => out.push_str(&format!("field: prime p={p}\n")),
            _ => out.push_str("field: rational\n"),
        }
        for v in &self.verdicts {
            let status = if v.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{status}] {}", v.anchor));
            if let Some(d) = &v.dims {
                out.push_str(&format!(" dims={d:?}"));
            }
            if let Some(w) = &v.witness {
                out.push_str(&format!(" -- {w}"));
            }
            out.push('\n');
        }
        for c in &self.certificates {
            out.push_str(&format!("certificate: {c}\n"));
        }
        let overall = if self.all_pass() { "all verdicts pass" } else { "some verdicts fail" };
        out.push_str(&format!("result: {overall}\n"));
        out
    }
}

/// Canonical digest of a filtration certificate: the chain of factor
/// indices, powers and object descriptions, hashed.
pub fn certificate_digest(s: &ThetaSystem, cert: &FiltrationCertificate) -> String {
    let mut text = String::new();
    for st in &cert.steps {
        text.push_str(&format!(
            "step factor={} power={} below={} above={};",
            s.label(st.factor_index),
            st.power,
            describe(&st.below),
            describe(&st.above)
        ));
    }
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("sha256:{:x}", hasher.finalize())
}
