//! The JSON input document: field configuration, seed, quiver, named
//! representations, named derived-category objects, and the system.
//! Matrices are arrays of arrays of exact literals (integers or `"p/q"`
//! strings); floating-point literals are rejected.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use homsys::derived::DbObject;
use homsys::field::{FieldCfg, Matrix, Scalar};
use homsys::quiver::{Quiver, Rep};
use homsys::theta::ThetaSystem;

#[derive(Debug, Deserialize)]
pub struct Document {
    pub field: Option<FieldSpec>,
    pub seed: Option<u64>,
    pub quiver: QuiverSpec,
    #[serde(default)]
    pub reps: BTreeMap<String, RepSpec>,
    #[serde(default)]
    pub objects: BTreeMap<String, Vec<SummandSpec>>,
    pub theta: Option<ThetaSpec>,
    /// Optional named objects proposed as the relative projectives.
    pub projective: Option<FamilySpec>,
    /// Optional named objects proposed as the relative injectives.
    pub injective: Option<FamilySpec>,
    /// Optional probe list for the cotorsion desk check.
    #[serde(default)]
    pub probes: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct FieldSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub p: Option<u64>,
}

#[derive(Debug, Deserialize)]
pub struct QuiverSpec {
    pub vertices: usize,
    pub arrows: Vec<(usize, usize)>,
}

#[derive(Debug, Deserialize)]
pub struct RepSpec {
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<Vec<serde_json::Value>>>,
}

#[derive(Debug, Deserialize, Clone)]
pub struct SummandSpec {
    pub rep: String,
    pub shift: i64,
    #[serde(default = "one")]
    pub mult: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
pub struct ThetaSpec {
    pub order: Vec<usize>,
    pub objects: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct FamilySpec {
    pub objects: Vec<String>,
}

/// Everything a command needs, parsed and validated.
pub struct Session {
    pub field: FieldCfg,
    pub seed: u64,
    pub quiver: Arc<Quiver>,
    pub reps: BTreeMap<String, Rep>,
    pub objects: BTreeMap<String, DbObject>,
    pub theta: Option<ThetaSystem>,
    pub projective: Option<Vec<DbObject>>,
    pub injective: Option<Vec<DbObject>>,
    pub probes: Vec<DbObject>,
}

pub fn parse_field_flag(text: &str) -> Result<FieldCfg> {
    if text == "rational" {
        return Ok(FieldCfg::Rational);
    }
    if let Some(p) = text.strip_prefix("p:") {
        let p: u64 = p.parse().context("prime field flag must be p:<prime>")?;
        let cfg = FieldCfg::Prime(p);
        cfg.validate().map_err(|e| anyhow!("{e}"))?;
        return Ok(cfg);
    }
    bail!("field must be `rational` or `p:<prime>`")
}

fn scalar_from_value(v: &serde_json::Value, field: FieldCfg, at: &str) -> Result<Scalar> {
    match v {
        serde_json::Value::String(s) => {
            Scalar::parse(s, field).map_err(|e| anyhow!("{at}: {e}"))
        }
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| anyhow!("{at}: only exact integer or \"p/q\" literals are allowed"))?;
            Ok(field.from_i64(i))
        }
        other => bail!("{at}: unsupported entry {other}"),
    }
}

/// Parses and validates a document, with the command-line field/seed
/// overrides applied.
pub fn parse_session(
    doc: &Document,
    field_override: Option<FieldCfg>,
    seed_override: Option<u64>,
) -> Result<Session> {
    let field = match (&field_override, &doc.field) {
        (Some(f), _) => *f,
        (None, Some(spec)) => match spec.kind.as_str() {
            "rational" => FieldCfg::Rational,
            "prime" => {
                let p = spec.p.ok_or_else(|| anyhow!("field.p missing for prime field"))?;
                FieldCfg::Prime(p)
            }
            other => bail!("unknown field type {other:?}"),
        },
        (None, None) => FieldCfg::Rational,
    };
    field.validate().map_err(|e| anyhow!("{e}"))?;
    let seed = seed_override.or(doc.seed).unwrap_or(0);

    // quiver: 1-based vertices in the document
    if doc.quiver.vertices == 0 {
        bail!("quiver.vertices must be positive");
    }
    let arrows: Vec<(usize, usize)> = doc
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| {
            if s == 0 || t == 0 || s > doc.quiver.vertices || t > doc.quiver.vertices {
                bail!("quiver.arrows[{ai}]: vertex out of range");
            }
            Ok((s - 1, t - 1))
        })
        .collect::<Result<_>>()?;
    let quiver = Quiver::new(doc.quiver.vertices, arrows)
        .map_err(|e| anyhow!("quiver: {e}"))?;

    // representations
    let mut reps = BTreeMap::new();
    for (name, spec) in &doc.reps {
        if spec.dims.len() != quiver.vertices {
            bail!("reps.{name}.dims: expected {} entries, got {}", quiver.vertices, spec.dims.len());
        }
        if spec.maps.len() != quiver.arrows.len() {
            bail!(
                "reps.{name}.maps: expected {} matrices (one per arrow), got {}",
                quiver.arrows.len(),
                spec.maps.len()
            );
        }
        let mut maps = Vec::with_capacity(spec.maps.len());
        for (ai, rows) in spec.maps.iter().enumerate() {
            let (s, t) = quiver.arrows[ai];
            let want_rows = spec.dims[t];
            let want_cols = spec.dims[s];
            let at = format!("reps.{name}.maps[{ai}]");
            // an arrow with a zero-dimensional endpoint is encoded as []
            if rows.is_empty() && (want_rows == 0 || want_cols == 0) {
                maps.push(Matrix::zero(want_rows, want_cols, field));
                continue;
            }
            if rows.len() != want_rows {
                bail!("{at}: expected {want_rows} rows, got {}", rows.len());
            }
            let mut data = Vec::with_capacity(want_rows);
            for (ri, row) in rows.iter().enumerate() {
                if row.len() != want_cols {
                    bail!("{at}[{ri}]: expected {want_cols} columns, got {}", row.len());
                }
                let mut out = Vec::with_capacity(want_cols);
                for (ci, v) in row.iter().enumerate() {
                    out.push(scalar_from_value(v, field, &format!("{at}[{ri}][{ci}]"))?);
                }
                data.push(out);
            }
            maps.push(Matrix::from_rows(data, want_cols, field));
        }
        let rep = Rep::new(quiver.clone(), field, spec.dims.clone(), maps)
            .map_err(|e| anyhow!("reps.{name}: {e}"))?;
        reps.insert(name.clone(), rep);
    }

    // named derived objects (normalized on construction)
    let mut objects = BTreeMap::new();
    for (name, parts) in &doc.objects {
        let mut raw = Vec::new();
        for (pi, p) in parts.iter().enumerate() {
            let rep = reps
                .get(&p.rep)
                .ok_or_else(|| anyhow!("objects.{name}[{pi}]: unknown representation {:?}", p.rep))?;
            raw.push((rep.clone(), p.shift, p.mult));
        }
        let obj = DbObject::from_parts(&quiver, field, &raw, seed)
            .map_err(|e| anyhow!("objects.{name}: {e}"))?;
        objects.insert(name.clone(), obj);
    }

    let lookup = |name: &str, at: &str| -> Result<DbObject> {
        objects
            .get(name)
            .cloned()
            .ok_or_else(|| anyhow!("{at}: unknown object {name:?}"))
    };

    let theta = match &doc.theta {
        None => None,
        Some(spec) => {
            let mut family = Vec::new();
            for (oi, name) in spec.objects.iter().enumerate() {
                family.push(lookup(name, &format!("theta.objects[{oi}]"))?);
            }
            let order: Vec<usize> = spec
                .order
                .iter()
                .enumerate()
                .map(|(oi, &o)| {
                    if o == 0 || o > family.len() {
                        bail!("theta.order[{oi}]: index out of range");
                    }
                    Ok(o - 1)
                })
                .collect::<Result<_>>()?;
            Some(ThetaSystem::new(family, order, seed).map_err(|e| anyhow!("theta: {e}"))?)
        }
    };

    let parse_family = |spec: &Option<FamilySpec>, at: &str| -> Result<Option<Vec<DbObject>>> {
        match spec {
            None => Ok(None),
            Some(f) => {
                let mut out = Vec::new();
                for (oi, name) in f.objects.iter().enumerate() {
                    out.push(lookup(name, &format!("{at}.objects[{oi}]"))?);
                }
                Ok(Some(out))
            }
        }
    };
    let projective = parse_family(&doc.projective, "projective")?;
    let injective = parse_family(&doc.injective, "injective")?;
    let mut probes = Vec::new();
    for (pi, name) in doc.probes.iter().enumerate() {
        probes.push(lookup(name, &format!("probes[{pi}]"))?);
    }

    Ok(Session { field, seed, quiver, reps, objects, theta, projective, injective, probes })
}
