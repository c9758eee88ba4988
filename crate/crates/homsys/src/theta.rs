//! Homological systems: axiom checkers, the constructive existence of the
//! relative-projective and relative-injective families, filtration
//! certificates with reorder/group transforms, the multiplicity solver,
//! precovers, approximation triangles and cotorsion-pair desk checks.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::derived::{
    db_isomorphic, describe, direct_sum_with_maps, hom_db, hom_db_dim,
    hom_coordinates, layer_copy_indices, layer_object, triangle_verify, Component, DbEntry,
    DbMorphism, DbObject, TriangleCert,
};
use crate::error::{Error, Result};
use crate::field::{FieldCfg, Matrix, Scalar};
use crate::homalg::{
    connecting_class, ext1_space, realize_extension, zero_cocycle_for, Cocycle, Ext1Space,
    ShortExactSeq,
};
use crate::quiver::{decompose, is_isomorphic, morphism_parts, IsoResult, Quiver, Rep, RepMorphism};

/// A family of nonzero objects with a linear order. The family is stored in
/// ascending order internally; `labels[k]` remembers the caller's original
/// index (0-based) of the object now at position `k`.
#[derive(Clone)]
pub struct ThetaSystem {
    pub quiver: Arc<Quiver>,
    pub field: FieldCfg,
    pub theta: Vec<DbObject>,
    pub labels: Vec<usize>,
    pub seed: u64,
}

impl ThetaSystem {
    /// `order` lists the object indices from smallest to largest.
    pub fn new(theta: Vec<DbObject>, order: Vec<usize>, seed: u64) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::Config("a homological system needs at least one object".into()));
        }
        let t = theta.len();
        let mut seen = vec![false; t];
        for &o in &order {
            if o >= t || seen[o] {
                return Err(Error::Config("order must be a permutation of the object indices".into()));
            }
            seen[o] = true;
        }
        if order.len() != t {
            return Err(Error::Config("order length does not match the family size".into()));
        }
        let quiver = theta[0].quiver.clone();
        let field = theta[0].field;
        let sorted: Vec<DbObject> = order.iter().map(|&o| theta[o].clone()).collect();
        Ok(ThetaSystem { quiver, field, theta: sorted, labels: order, seed })
    }

    pub fn size(&self) -> usize {
        self.theta.len()
    }

    /// Original 1-based label of the object at internal position `k`.
    pub fn label(&self, k: usize) -> usize {
        self.labels[k] + 1
    }

    /// The direct power `Theta(k)^p` as an object.
    pub fn theta_power(&self, k: usize, p: usize) -> Result<DbObject> {
        let mut parts = Vec::new();
        for s in &self.theta[k].summands {
            parts.push((s.rep.clone(), s.shift, s.mult * p));
        }
        DbObject::from_parts(&self.quiver, self.field, &parts, self.seed)
    }

    /// The single indecomposable summand of `Theta(k)`; errors when the
    /// object is not a single copy of one indecomposable.
    pub fn theta_indec(&self, k: usize) -> Result<(&Rep, i64)> {
        if self.theta[k].summands.len() != 1 || self.theta[k].summands[0].mult != 1 {
            return Err(Error::Config(format!(
                "system object at position {} is not indecomposable",
                k + 1
            )));
        }
        let s = &self.theta[k].summands[0];
        Ok((&s.rep, s.shift))
    }
}

/// One verdict row of an axiom/criterion report.
#[derive(Debug, Clone)]
pub struct AxiomEntry {
    pub anchor: String,
    pub pass: bool,
    pub witness: Option<String>,
    pub dims: Option<Vec<usize>>,
}

impl AxiomEntry {
    pub fn pass(anchor: &str) -> Self {
        AxiomEntry { anchor: anchor.into(), pass: true, witness: None, dims: None }
    }
    pub fn fail(anchor: &str, witness: String) -> Self {
        AxiomEntry { anchor: anchor.into(), pass: false, witness: Some(witness), dims: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
    pub fn entry(&self, anchor: &str) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.anchor == anchor)
    }
    fn push(&mut self, e: AxiomEntry) {
        self.entries.push(e);
    }
}

/// Checks the system axioms: a valid order (S1), indecomposable objects
/// (S2), one-directional Hom vanishing (S3), the Ext-orthogonality triangle
/// condition (S4) and negative-degree vanishing (S5).
pub fn check_theta_system(s: &ThetaSystem) -> Result<AxiomReport> {
    let t = s.size();
    let mut report = AxiomReport::default();
    report.push(AxiomEntry::pass("S1"));
    // S2: nonzero and indecomposable
    let mut s2 = AxiomEntry::pass("S2");
    for k in 0..t {
        if s.theta[k].is_zero() {
            s2 = AxiomEntry::fail("S2", format!("object {} is zero", s.label(k)));
            break;
        }
        let single = s.theta[k].summands.len() == 1 && s.theta[k].summands[0].mult == 1;
        if !single {
            s2 = AxiomEntry::fail("S2", format!("object {} decomposes", s.label(k)));
            break;
        }
    }
    report.push(s2);
    // S3: Hom(Theta(j), Theta(i)) = 0 for j > i
    let mut s3 = AxiomEntry::pass("S3");
    'outer3: for j in 0..t {
        for i in 0..j {
            let d = hom_db_dim(&s.theta[j], &s.theta[i], 0)?;
            if d != 0 {
                s3 = AxiomEntry::fail(
                    "S3",
                    format!("Hom(Theta({}), Theta({})) has dimension {d}", s.label(j), s.label(i)),
                );
                break 'outer3;
            }
        }
    }
    report.push(s3);
    // S4: Hom(Theta(j), Theta(i)[1]) = 0 for j >= i
    let mut s4 = AxiomEntry::pass("S4");
    'outer4: for j in 0..t {
        for i in 0..=j {
            let d = hom_db_dim(&s.theta[j], &s.theta[i], 1)?;
            if d != 0 {
                s4 = AxiomEntry::fail(
                    "S4",
                    format!(
                        "Hom(Theta({}), Theta({})[1]) has dimension {d}",
                        s.label(j),
                        s.label(i)
                    ),
                );
                break 'outer4;
            }
        }
    }
    report.push(s4);
    // S5: Hom(Theta, Theta[-1]) = 0
    let mut s5 = AxiomEntry::pass("S5");
    'outer5: for a in 0..t {
        for b in 0..t {
            let d = hom_db_dim(&s.theta[a], &s.theta[b], -1)?;
            if d != 0 {
                s5 = AxiomEntry::fail(
                    "S5",
                    format!(
                        "Hom(Theta({}), Theta({})[-1]) has dimension {d}",
                        s.label(a),
                        s.label(b)
                    ),
                );
                break 'outer5;
            }
        }
    }
    report.push(s5);
    Ok(report)
}

// ---------------------------------------------------------------------------
// filtration certificates
// ---------------------------------------------------------------------------

/// One certified step `below -> above -> Theta(factor)^power -> below[1]`.
/// The extension happens on the layer at the factor's shift; other layers
/// of `below` pass through unchanged.
#[derive(Clone)]
pub struct FiltStep {
    pub below: DbObject,
    pub above: DbObject,
    pub factor_index: usize,
    pub power: usize,
    pub ses: ShortExactSeq,
    /// Canonical isomorphism from the normalized layer of `above` onto the
    /// sequence middle, consistent with the triangle maps; chain
    /// compositions across steps go through it.
    pub mid_align: RepMorphism,
    pub tri: TriangleCert,
}

/// An explicit chain of verified triangles witnessing membership in the
/// filtration class of the system.
#[derive(Clone, Default)]
pub struct FiltrationCertificate {
    pub steps: Vec<FiltStep>,
}

impl FiltrationCertificate {
    pub fn empty() -> Self {
        FiltrationCertificate { steps: vec![] }
    }

    pub fn target(&self, s: &ThetaSystem) -> DbObject {
        self.steps
            .last()
            .map(|st| st.above.clone())
            .unwrap_or_else(|| DbObject::zero(s.quiver.clone(), s.field))
    }

    /// Step tallies `[M : Theta(i)]` per system position.
    pub fn counts(&self, t: usize) -> Vec<usize> {
        let mut out = vec![0usize; t];
        for st in &self.steps {
            out[st.factor_index] += st.power;
        }
        out
    }

    pub fn length(&self, t: usize) -> usize {
        self.counts(t).iter().sum()
    }

    pub fn support(&self, t: usize) -> Vec<usize> {
        self.counts(t)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Minimum of the support; `None` encodes the +infinity sentinel of the
    /// zero object.
    pub fn min_index(&self, t: usize) -> Option<usize> {
        self.support(t).first().copied()
    }

    /// Maximum of the support; `None` encodes the -infinity sentinel.
    pub fn max_index(&self, t: usize) -> Option<usize> {
        self.support(t).last().copied()
    }

    /// Sequence of factor indices along the chain (with powers expanded in
    /// place as a single entry per step).
    pub fn factor_sequence(&self) -> Vec<(usize, usize)> {
        self.steps.iter().map(|st| (st.factor_index, st.power)).collect()
    }
}

/// Builds one certified step: extends `below` by `Theta(k)^power` along a
/// cocycle on the layer at the factor's shift. The cocycle must be given
/// for the pair `(theta_rep^power, below-layer rep)`.
pub fn make_step(
    s: &ThetaSystem,
    below: &DbObject,
    k: usize,
    power: usize,
    phi: &Cocycle,
) -> Result<FiltStep> {
    let seed = s.seed;
    let (theta_rep, u) = s.theta_indec(k)?;
    let quo_rep = theta_rep.direct_power(power);
    let lay = below.layer(u);
    let ses = realize_extension(phi, &quo_rep, &lay.rep)?;
    // the new object: extension middle on the active layer, everything else
    // passes through
    let mut parts: Vec<(Rep, i64, usize)> = vec![(ses.mid.clone(), u, 1)];
    for sm in &below.summands {
        if sm.shift != u {
            parts.push((sm.rep.clone(), sm.shift, sm.mult));
        }
    }
    let above = DbObject::from_parts(&s.quiver, s.field, &parts, seed)?;
    let factor_obj = s.theta_power(k, power)?;

    // normalizers of the active layers against the sequence middle/quotient
    let above_layer = layer_object(&above, u);
    let above_idx = layer_copy_indices(&above, u);
    let nau = stalk_pairing(&above_layer, &ses.mid, seed)?;
    let factor_norm = stalk_pairing(&factor_obj, &quo_rep, seed)?;
    let below_idx = layer_copy_indices(below, u);

    // f: below -> above
    let mut f = DbMorphism::zero(below, &above);
    // passive copies: transports between isomorphic copies at other shifts
    {
        let mut used = vec![false; above.copy_count()];
        for &bf in &above_idx {
            used[bf] = true;
        }
        let copies_b = below.copies();
        let copies_a = above.copies();
        for (bf, &(bsi, _)) in copies_b.iter().enumerate() {
            if below.summands[bsi].shift == u {
                continue;
            }
            let mut found = false;
            for (af, &(asi, _)) in copies_a.iter().enumerate() {
                if used[af] || above.summands[asi].shift != below.summands[bsi].shift {
                    continue;
                }
                if let IsoResult::Yes(iso) =
                    is_isomorphic(&below.summands[bsi].rep, &above.summands[asi].rep, seed)?
                {
                    used[af] = true;
                    f.push_entry(DbEntry { src: bf, dst: af, comp: Component::Map(iso) });
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Internal("passive layer matching failed in make_step".into()));
            }
        }
    }
    // active copies: below-layer -> E -> above-layer copies
    for (pos, &bf) in below_idx.iter().enumerate() {
        let layer_incl = &lay.inclusions[pos].1; // copy rep -> layer rep
        for (apos, &af) in above_idx.iter().enumerate() {
            let comp = nau.proj[apos].compose(&ses.incl).compose(layer_incl);
            if !comp.is_zero() {
                f.push_entry(DbEntry { src: bf, dst: af, comp: Component::Map(comp) });
            }
        }
    }
    // g: above -> factor
    let mut g = DbMorphism::zero(&above, &factor_obj);
    for (apos, &af) in above_idx.iter().enumerate() {
        for (fpos, fincl) in factor_norm.incl.iter().enumerate() {
            let _ = fincl;
            let comp = factor_norm.proj[fpos].compose(&ses.proj).compose(&nau.incl[apos]);
            if !comp.is_zero() {
                g.push_entry(DbEntry { src: af, dst: fpos, comp: Component::Map(comp) });
            }
        }
    }
    // h: factor -> below[1], the connecting class layer-wise
    let delta = connecting_class(&ses);
    let mut h = DbMorphism::zero(&factor_obj, &below.shifted(1));
    for (fpos, fincl) in factor_norm.incl.iter().enumerate() {
        for (pos, &bf) in below_idx.iter().enumerate() {
            let layer_proj = &lay.projections[pos].1; // layer rep -> copy rep
            let part = Ext1Space::push(layer_proj, &Ext1Space::pull(&delta, fincl));
            if part.iter().any(|m| !m.is_zero()) {
                h.push_entry(DbEntry { src: fpos, dst: bf, comp: Component::Ext(part) });
            }
        }
    }
    let tri = TriangleCert {
        a: below.clone(),
        b: above.clone(),
        c: factor_obj,
        f,
        g: Some(g),
        h: Some(h),
        seed,
    };
    // canonical alignment: stack the per-copy inclusions of the above layer
    let mid_align = {
        let src = above.layer(u).rep;
        let blocks: Vec<Matrix> = (0..s.quiver.vertices)
            .map(|v| {
                let mut m = Matrix::zero(ses.mid.dims[v], 0, s.field);
                for incl in &nau.incl {
                    m = m.hstack(&incl.blocks[v]);
                }
                m
            })
            .collect();
        let f = RepMorphism { source: src, target: ses.mid.clone(), blocks };
        debug_assert!(f.is_invertible());
        f
    };
    Ok(FiltStep { below: below.clone(), above, factor_index: k, power, ses, mid_align, tri })
}

/// Inclusion/projection data relating a normalized object to an ambient
/// representation whose decomposition it is.
struct StalkPairing {
    incl: Vec<RepMorphism>,
    proj: Vec<RepMorphism>,
}

fn stalk_pairing(obj: &DbObject, ambient: &Rep, seed: u64) -> Result<StalkPairing> {
    if obj.is_zero() {
        if !ambient.is_zero() {
            return Err(Error::Internal("zero object against nonzero ambient".into()));
        }
        return Ok(StalkPairing { incl: vec![], proj: vec![] });
    }
    let d = decompose(ambient, seed)?;
    let field = ambient.field;
    let q = &ambient.quiver;
    let mut d_offsets: Vec<Vec<usize>> = Vec::new();
    let mut d_reps: Vec<Rep> = Vec::new();
    {
        let mut widths = vec![0usize; q.vertices];
        for (rep, mult) in &d.summands {
            for _ in 0..*mult {
                d_offsets.push(widths.clone());
                d_reps.push(rep.clone());
                for v in 0..q.vertices {
                    widths[v] += rep.dims[v];
                }
            }
        }
    }
    let cert = &d.certificate;
    let cert_inv = cert
        .inverse()
        .ok_or_else(|| Error::Internal("decomposition certificate not invertible".into()))?;
    let mut used = vec![false; d_reps.len()];
    let mut incl = Vec::new();
    let mut proj = Vec::new();
    for &(si, _) in &obj.copies() {
        let target_rep = &obj.summands[si].rep;
        let mut found = None;
        for (k, rep) in d_reps.iter().enumerate() {
            if used[k] {
                continue;
            }
            if let IsoResult::Yes(iso) = is_isomorphic(target_rep, rep, seed)? {
                found = Some((k, iso));
                break;
            }
        }
        let (k, iso) = found.ok_or_else(|| Error::Internal("stalk pairing failed".into()))?;
        used[k] = true;
        let incl_blocks: Vec<Matrix> = (0..q.vertices)
            .map(|v| {
                let mut block = Matrix::zero(cert.source.dims[v], target_rep.dims[v], field);
                for r in 0..d_reps[k].dims[v] {
                    for c in 0..target_rep.dims[v] {
                        block.set(d_offsets[k][v] + r, c, iso.blocks[v].at(r, c).clone());
                    }
                }
                cert.blocks[v].mul(&block)
            })
            .collect();
        let iso_inv = iso.inverse().expect("iso certificate invertible");
        let proj_blocks: Vec<Matrix> = (0..q.vertices)
            .map(|v| {
                let slice = Matrix::from_fn(d_reps[k].dims[v], cert.source.dims[v], field, |r, c| {
                    if c == d_offsets[k][v] + r { field.one() } else { field.zero() }
                });
                iso_inv.blocks[v].mul(&slice).mul(&cert_inv.blocks[v])
            })
            .collect();
        incl.push(RepMorphism { source: target_rep.clone(), target: ambient.clone(), blocks: incl_blocks });
        proj.push(RepMorphism { source: ambient.clone(), target: target_rep.clone(), blocks: proj_blocks });
    }
    Ok(StalkPairing { incl, proj })
}

/// Appends a step extending the certificate's target by
/// `Theta(k)^power` along the class with the given coordinates (the zero
/// class gives a split step).
pub fn extend_certificate(
    s: &ThetaSystem,
    cert: &FiltrationCertificate,
    k: usize,
    power: usize,
    class_coords: Option<&[Scalar]>,
) -> Result<FiltrationCertificate> {
    let below = cert.target(s);
    let (theta_rep, u) = s.theta_indec(k)?;
    let quo_rep = theta_rep.direct_power(power);
    let lay_rep = below.layer(u).rep;
    let ext = ext1_space(&quo_rep, &lay_rep)?;
    let phi = match class_coords {
        None => zero_cocycle_for(&quo_rep, &lay_rep),
        Some(coords) => {
            if coords.len() != ext.dim {
                return Err(Error::Shape("class coordinate count mismatch".into()));
            }
            ext.cocycle_from_coords(coords)
        }
    };
    let step = make_step(s, &below, k, power, &phi)?;
    let mut out = cert.clone();
    out.steps.push(step);
    Ok(out)
}

/// Verifies a filtration certificate against a target object and an allowed
/// factor index set: the chain starts at zero, consecutive objects agree,
/// every factor is allowed and correct, and every triangle verifies.
pub fn filtration_verify(
    m: &DbObject,
    cert: &FiltrationCertificate,
    allowed: &[usize],
    s: &ThetaSystem,
) -> Result<bool> {
    let seed = s.seed;
    if cert.steps.is_empty() {
        return Ok(m.is_zero());
    }
    if !cert.steps[0].below.is_zero() {
        return Ok(false);
    }
    for w in cert.steps.windows(2) {
        if db_isomorphic(&w[0].above, &w[1].below, seed)?.is_none() {
            return Ok(false);
        }
    }
    if db_isomorphic(&cert.steps.last().unwrap().above, m, seed)?.is_none() {
        return Ok(false);
    }
    for st in &cert.steps {
        if !allowed.contains(&st.factor_index) {
            return Ok(false);
        }
        // the stated factor object matches Theta(k)^power
        let expected = s.theta_power(st.factor_index, st.power)?;
        if db_isomorphic(&st.tri.c, &expected, seed)?.is_none() {
            return Ok(false);
        }
        if triangle_verify(&st.tri, &[])?.is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Glues certificates along a layered sequence (extension closure): given a
/// certificate for the subobject and one for the quotient of
/// `0 -> A -> B -> C -> 0` on the layer at `shift`, produces a certificate
/// for `B`. The steps of `A` are kept; each step of `C` lifts to the
/// preimage chain inside `B`.
pub fn glue_certificates(
    s: &ThetaSystem,
    cert_a: &FiltrationCertificate,
    cert_c: &FiltrationCertificate,
    ses: &ShortExactSeq,
    shift: i64,
) -> Result<FiltrationCertificate> {
    let seed = s.seed;
    let mut out = cert_a.clone();
    // current subobject of B covered by the chain so far
    let a_layer = cert_a.target(s).layer(shift).rep;
    let mut cur_sub_incl = if a_layer.is_zero() && ses.sub.is_zero() {
        ses.incl.clone()
    } else {
        let align = rep_iso(&a_layer, &ses.sub, seed)?;
        ses.incl.compose(&align)
    };
    let c_target_layer = cert_c.target(s).layer(shift).rep;
    let align_c = if c_target_layer.is_zero() && ses.quo.is_zero() {
        None
    } else {
        Some(rep_iso(&c_target_layer, &ses.quo, seed)?)
    };
    for st in &cert_c.steps {
        if s.theta_indec(st.factor_index)?.1 != shift {
            return Err(Error::Internal(
                "gluing across several active layers is not supported".into(),
            ));
        }
    }
    for (pos, st) in cert_c.steps.iter().enumerate() {
        // inclusion of the chain object into C, aligned to the sequence
        let chain_incl = chain_inclusion_at(cert_c, pos, shift, s)?;
        let into_c = match &align_c {
            Some(al) => al.compose(&chain_incl),
            None => chain_incl,
        };
        let im_incl = morphism_parts(&into_c).image_inclusion;
        let (pre_rep, pre_incl) = preimage_sub(&ses.proj, &im_incl)?;
        // step sequence 0 -> previous sub -> preimage -> theta^p -> 0
        let incl_small = factor_through_inclusion(&cur_sub_incl, &pre_incl)?;
        let quotient = morphism_parts(&incl_small);
        let (theta_rep, _) = s.theta_indec(st.factor_index)?;
        let quo_rep = theta_rep.direct_power(st.power);
        let iso = rep_iso(&quotient.cokernel, &quo_rep, seed)?;
        let ses_step = ShortExactSeq {
            sub: cur_sub_incl.source.clone(),
            mid: pre_rep.clone(),
            quo: quo_rep.clone(),
            incl: incl_small,
            proj: iso.compose(&quotient.cokernel_projection),
        };
        ses_step.verify()?;
        let below = out.target(s);
        let phi = connecting_class(&ses_step);
        let phi = align_class(&phi, &quo_rep, &ses_step.sub, &below.layer(shift).rep, seed)?;
        out.steps.push(make_step(s, &below, st.factor_index, st.power, &phi)?);
        cur_sub_incl = pre_incl;
    }
    Ok(out)
}

/// Inclusion of the `pos`-th chain object of a certificate into the final
/// target, at the layer level. Consecutive steps are composed through the
/// stored canonical alignments, so the images are nested.
fn chain_inclusion_at(
    cert: &FiltrationCertificate,
    pos: usize,
    shift: i64,
    s: &ThetaSystem,
) -> Result<RepMorphism> {
    let mut incl = cert.steps[pos].above.layer(shift).rep.identity();
    for st in &cert.steps[pos + 1..] {
        if s.theta_indec(st.factor_index)?.1 != shift {
            // the step extends a different layer; this layer passes through
            continue;
        }
        // the step's sequence inclusion starts at the below layer, which is
        // the previous above layer literally (the chain is rebuilt to keep
        // this identification)
        if st.ses.incl.source.dims != incl.target.dims {
            return Err(Error::Internal("chain layers out of sync".into()));
        }
        let to_mid = st.ses.incl.compose(&incl);
        let back = st
            .mid_align
            .inverse()
            .ok_or_else(|| Error::Internal("mid alignment not invertible".into()))?;
        incl = back.compose(&to_mid);
    }
    Ok(incl)
}

// ---------------------------------------------------------------------------
// reorder and group
// ---------------------------------------------------------------------------

/// Reorders a certificate so the factor indices are non-increasing along
/// the chain, preserving all multiplicities (repeated adjacent exchanges).
pub fn reorder_filtration(
    s: &ThetaSystem,
    cert: &FiltrationCertificate,
) -> Result<FiltrationCertificate> {
    let mut cur = cert.clone();
    loop {
        let mut swapped = false;
        for i in 0..cur.steps.len().saturating_sub(1) {
            if cur.steps[i].factor_index < cur.steps[i + 1].factor_index {
                let (s1, s2) = exchange_steps(s, &cur.steps[i], &cur.steps[i + 1])?;
                cur.steps[i] = s1;
                cur.steps[i + 1] = s2;
                // rebuild the suffix chain targets to keep literal equality
                for j in (i + 2)..cur.steps.len() {
                    let below = cur.steps[j - 1].above.clone();
                    let rebuilt = rebuild_step_on(s, &below, &cur.steps[j])?;
                    cur.steps[j] = rebuilt;
                }
                swapped = true;
                break;
            }
        }
        if !swapped {
            return Ok(cur);
        }
    }
}

/// Exchanges two adjacent steps `Z -> Y -> t1` and `Y -> X -> t2` (with
/// `t2 > t1` in the order) into `Z -> W -> t2` and `W -> X -> t1`.
fn exchange_steps(s: &ThetaSystem, st1: &FiltStep, st2: &FiltStep) -> Result<(FiltStep, FiltStep)> {
    let seed = s.seed;
    let (t1_rep, u1) = s.theta_indec(st1.factor_index)?;
    let (t2_rep, u2) = s.theta_indec(st2.factor_index)?;
    let z = &st1.below;
    if u1 != u2 {
        // the two extensions act on disjoint layers: reuse the classes
        let lay_z2 = z.layer(u2).rep;
        let quo2 = t2_rep.direct_power(st2.power);
        // the class of step 2 against Y's layer; Y and Z agree on layer u2
        let orig2 = connecting_class(&st2.ses);
        let phi2 = align_class(&orig2, &quo2, &st2.below.layer(u2).rep, &lay_z2, seed)?;
        let new1 = make_step(s, z, st2.factor_index, st2.power, &phi2)?;
        let w = new1.above.clone();
        let lay_w1 = w.layer(u1).rep;
        let quo1 = t1_rep.direct_power(st1.power);
        let orig1 = connecting_class(&st1.ses);
        let phi1 = align_class(&orig1, &quo1, &st1.below.layer(u1).rep, &lay_w1, seed)?;
        let new2 = make_step(s, &w, st1.factor_index, st1.power, &phi1)?;
        if db_isomorphic(&new2.above, &st2.above, seed)?.is_none() {
            return Err(Error::Internal("cross-layer exchange changed the object".into()));
        }
        return Ok((new1, new2));
    }
    // same active layer: module-level exchange through the split quotient
    let u = u1;
    let z_lay = z.layer(u).rep;
    // chain Z_u <= Y_u <= X_u via the two sequences; st2's below layer is
    // st1's above layer, identified with st1.ses.mid by the alignment
    let incl1 = &st1.ses.incl; // Z_u -> Y_u = st1.ses.mid
    let back1 = st1
        .mid_align
        .inverse()
        .ok_or_else(|| Error::Internal("mid alignment not invertible".into()))?;
    let incl2 = st2.ses.incl.compose(&back1); // st1.ses.mid -> X_u
    // composite inclusion Z_u -> X_u and the quotient C = X_u / Z_u
    let comp = incl2.compose(incl1);
    let parts = morphism_parts(&comp);
    let pi = parts.cokernel_projection.clone(); // X_u -> C
    // quotient C -> theta2^q induced from st2's projection
    let quo2_rep = t2_rep.direct_power(st2.power);
    let q_map = factor_through_cokernel(&st2.ses.proj, &pi, &quo2_rep)?;
    // splitting sigma: theta2^q -> C with q_map . sigma = id
    let sigma = find_section(&q_map)?;
    // W_u: preimage of im sigma under pi
    let (w_rep, w_incl) = preimage_sub(&pi, &sigma)?;
    // sequence 1': 0 -> Z_u -> W_u -> theta2^q -> 0
    let z_in_w: RepMorphism = factor_through_inclusion(&comp, &w_incl)?;
    let w_to_t2 = unsection(&sigma, &pi.compose(&w_incl))?;
    let ses1 = ShortExactSeq {
        sub: z_lay.clone(),
        mid: w_rep.clone(),
        quo: quo2_rep.clone(),
        incl: z_in_w,
        proj: w_to_t2,
    };
    ses1.verify()?;
    let phi1 = connecting_class(&ses1);
    let new1 = make_step(s, z, st2.factor_index, st2.power, &phi1)?;
    // sequence 2': 0 -> W_u -> X_u -> theta1^p -> 0
    let quo1_rep = t1_rep.direct_power(st1.power);
    let x_rep = st2.ses.mid.clone();
    let w_parts = morphism_parts(&w_incl);
    let iso_t1 = rep_iso(&w_parts.cokernel, &quo1_rep, seed)?;
    let ses2 = ShortExactSeq {
        sub: w_rep.clone(),
        mid: x_rep.clone(),
        quo: quo1_rep.clone(),
        incl: w_incl.clone(),
        proj: iso_t1.compose(&w_parts.cokernel_projection),
    };
    ses2.verify()?;
    // align the class to the rebuilt chain: new1's above layer maps onto
    // ses1.mid = W by the stored alignment
    let phi2 = connecting_class(&ses2);
    let w_obj = new1.above.clone();
    let realign = new1
        .mid_align
        .inverse()
        .ok_or_else(|| Error::Internal("mid alignment not invertible".into()))?;
    // transport Ext^1(theta1^p, W) to Ext^1(theta1^p, above-layer)
    let phi2_aligned = Ext1Space::push(&realign, &phi2);
    let new2 = make_step(s, &w_obj, st1.factor_index, st1.power, &phi2_aligned)?;
    if db_isomorphic(&new2.above, &st2.above, seed)?.is_none() {
        return Err(Error::Internal("exchange changed the filtered object".into()));
    }
    Ok((new1, new2))
}

/// Re-expresses a class for `(Q, OldLayer)` as a class for `(Q, NewLayer)`
/// along an isomorphism of the layers.
fn align_class(
    orig: &Cocycle,
    quo: &Rep,
    old_layer: &Rep,
    new_layer: &Rep,
    seed: u64,
) -> Result<Cocycle> {
    let _ = quo;
    if old_layer.is_zero() && new_layer.is_zero() {
        return Ok(orig.clone());
    }
    let iso = rep_iso(old_layer, new_layer, seed)?;
    Ok(Ext1Space::push(&iso, orig))
}

fn rep_iso(a: &Rep, b: &Rep, seed: u64) -> Result<RepMorphism> {
    match is_isomorphic(a, b, seed)? {
        IsoResult::Yes(f) => Ok(f),
        _ => Err(Error::Internal("expected isomorphic representations".into())),
    }
}

/// Factors `proj: Y -> Q` through a cokernel projection `pi: X -> C` when
/// `proj` kills the same subobject, giving `C -> Q`.
fn factor_through_cokernel(proj: &RepMorphism, pi: &RepMorphism, quo: &Rep) -> Result<RepMorphism> {
    // solve q_map . pi = proj-composed-with-the-inclusion-of-Y-into-X; here
    // proj is given on the middle X directly (after alignment), so solve
    // q_map . pi = proj
    let field = quo.field;
    let blocks: Vec<Matrix> = (0..quo.quiver.vertices)
        .map(|v| {
            // solve M * pi_v = proj_v  =>  transpose systems
            let a = pi.blocks[v].transpose();
            let b = proj.blocks[v].transpose();
            a.solve_matrix(&b)
                .map(|x| x.transpose())
                .unwrap_or_else(|| Matrix::zero(quo.dims[v], pi.target.dims[v], field))
        })
        .collect();
    let out = RepMorphism { source: pi.target.clone(), target: quo.clone(), blocks };
    out.check()?;
    Ok(out)
}

/// A right inverse of a surjection of representations, found by solving in
/// the hom space.
fn find_section(p: &RepMorphism) -> Result<RepMorphism> {
    let homs = crate::quiver::hom_basis(&p.target, &p.source)?;
    // solve sum c_i (p . h_i) = id in Hom(target, target)
    let idm = p.target.identity();
    let field = p.source.field;
    let cols: Vec<Vec<Scalar>> = homs
        .iter()
        .map(|h| p.compose(h).block_diag_total().vectorize())
        .collect();
    let rhs = idm.block_diag_total().vectorize();
    let mat = Matrix::from_cols(&cols, rhs.len(), field);
    let sol = mat
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("quotient does not split".into()))?;
    let mut acc = RepMorphism::zero(&p.target, &p.source);
    for (c, h) in sol.iter().zip(&homs) {
        acc = acc.add(&h.scale(c));
    }
    Ok(acc)
}

/// The subrepresentation `pi^{-1}(im sigma)` with its inclusion.
fn preimage_sub(pi: &RepMorphism, sigma: &RepMorphism) -> Result<(Rep, RepMorphism)> {
    let field = pi.source.field;
    let q = &pi.source.quiver;
    let bases: Vec<Matrix> = (0..q.vertices)
        .map(|v| {
            // x with pi(x) in im(sigma_v): complement projection of im sigma
            let im_cols: Vec<Vec<Scalar>> = (0..sigma.blocks[v].cols)
                .map(|c| sigma.blocks[v].col(c))
                .collect();
            let proj = crate::algebra::Projection::new(field, pi.target.dims[v], &im_cols);
            let comp_rows = proj.complement.len();
            let pmat = Matrix::from_fn(comp_rows, pi.target.dims[v], field, |r, c| {
                let mut e = vec![field.zero(); pi.target.dims[v]];
                e[c] = field.one();
                proj.project(&e)[r].clone()
            });
            let killer = pmat.mul(&pi.blocks[v]);
            Matrix::from_cols(&killer.kernel_basis(), pi.source.dims[v], field)
        })
        .collect();
    Ok(crate::quiver::sub_rep(&pi.source, &bases))
}

/// Given a section `sigma: Q -> C` and a map `w: W -> C` landing in
/// `im sigma`, produces `sigma^{-1} . w : W -> Q`.
fn unsection(sigma: &RepMorphism, w: &RepMorphism) -> Result<RepMorphism> {
    let field = sigma.source.field;
    let blocks: Vec<Matrix> = (0..sigma.source.quiver.vertices)
        .map(|v| {
            sigma.blocks[v]
                .solve_matrix(&w.blocks[v])
                .unwrap_or_else(|| Matrix::zero(sigma.source.dims[v], w.source.dims[v], field))
        })
        .collect();
    let out = RepMorphism { source: w.source.clone(), target: sigma.source.clone(), blocks };
    out.check()?;
    Ok(out)
}

/// Rebuilds a step so its `below` literally equals the given object (used
/// to restore chain equality after exchanges).
fn rebuild_step_on(s: &ThetaSystem, below: &DbObject, st: &FiltStep) -> Result<FiltStep> {
    let (_, u) = s.theta_indec(st.factor_index)?;
    let quo_rep = s.theta_indec(st.factor_index)?.0.direct_power(st.power);
    let orig = connecting_class(&st.ses);
    let phi = align_class(&orig, &quo_rep, &st.below.layer(u).rep, &below.layer(u).rep, s.seed)?;
    make_step(s, below, st.factor_index, st.power, &phi)
}

/// Merges consecutive equal-index steps into single steps with grouped
/// powers; requires the diagonal Ext-orthogonality of the factors.
pub fn group_filtration(
    s: &ThetaSystem,
    cert: &FiltrationCertificate,
) -> Result<FiltrationCertificate> {
    let mut out = FiltrationCertificate::empty();
    let mut i = 0;
    while i < cert.steps.len() {
        let k = cert.steps[i].factor_index;
        let mut j = i;
        let mut power = 0;
        while j < cert.steps.len() && cert.steps[j].factor_index == k {
            power += cert.steps[j].power;
            j += 1;
        }
        if j == i + 1 {
            // single step: rebuild on the current chain target
            let below = out.target(s);
            out.steps.push(rebuild_step_on(s, &below, &cert.steps[i])?);
        } else {
            // merged step: the composite inclusion below -> top middle has
            // cokernel theta^power by the grouping property
            let below = out.target(s);
            let (theta_rep, u) = s.theta_indec(k)?;
            let quo_rep = theta_rep.direct_power(power);
            let bot_layer_orig = cert.steps[i].below.layer(u).rep.clone();
            // composite inclusion bottom layer -> top middle, converted
            // between chain stages through the stored alignments
            let mut incl = cert.steps[i].ses.incl.clone();
            for idx in (i + 1)..j {
                let back = cert.steps[idx - 1]
                    .mid_align
                    .inverse()
                    .ok_or_else(|| Error::Internal("mid alignment not invertible".into()))?;
                incl = cert.steps[idx].ses.incl.compose(&back).compose(&incl);
            }
            let parts = morphism_parts(&incl);
            let iso = rep_iso(&parts.cokernel, &quo_rep, s.seed)?;
            let ses = ShortExactSeq {
                sub: bot_layer_orig.clone(),
                mid: incl.target.clone(),
                quo: quo_rep.clone(),
                incl: incl.clone(),
                proj: iso.compose(&parts.cokernel_projection),
            };
            ses.verify()?;
            let phi = connecting_class(&ses);
            let phi = align_class(&phi, &quo_rep, &bot_layer_orig, &below.layer(u).rep, s.seed)?;
            out.steps.push(make_step(s, &below, k, power, &phi)?);
        }
        i = j;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// projective system data and checkers
// ---------------------------------------------------------------------------

/// The constructed relative-projective family: objects `Q(i)`, kernels
/// `K(i)` with their filtration certificates, and the defining triangles.
#[derive(Clone)]
pub struct ProjectiveSystemData {
    pub q: Vec<DbObject>,
    pub k: Vec<DbObject>,
    pub eta: Vec<TriangleCert>,
    pub k_certs: Vec<FiltrationCertificate>,
}

/// The dual family for the injective side.
#[derive(Clone)]
pub struct InjectiveSystemData {
    pub y: Vec<DbObject>,
    pub z: Vec<DbObject>,
    pub xi: Vec<TriangleCert>,
    pub z_certs: Vec<FiltrationCertificate>,
}

/// Checks the projective-system axioms PS1-PS5.
pub fn check_projective_system(s: &ThetaSystem, d: &ProjectiveSystemData) -> Result<AxiomReport> {
    let t = s.size();
    let mut report = AxiomReport::default();
    if d.q.len() != t || d.k.len() != t || d.eta.len() != t || d.k_certs.len() != t {
        report.push(AxiomEntry::fail("PS1", "family sizes do not match the system".into()));
        return Ok(report);
    }
    report.push(AxiomEntry::pass("PS1"));
    let mut ps2 = AxiomEntry::pass("PS2");
    for k in 0..t {
        if s.theta[k].is_zero() {
            ps2 = AxiomEntry::fail("PS2", format!("object {} is zero", s.label(k)));
            break;
        }
    }
    report.push(ps2);
    let mut ps3 = AxiomEntry::pass("PS3");
    'ps3: for j in 0..t {
        for i in 0..j {
            if hom_db_dim(&s.theta[j], &s.theta[i], 0)? != 0 {
                ps3 = AxiomEntry::fail(
                    "PS3",
                    format!("Hom(Theta({}), Theta({})) is nonzero", s.label(j), s.label(i)),
                );
                break 'ps3;
            }
        }
    }
    report.push(ps3);
    // PS4: Q(i) indecomposable, and Q orthogonal to Theta at degrees +-1
    let mut ps4 = AxiomEntry::pass("PS4");
    'ps4: for i in 0..t {
        let single = d.q[i].summands.len() == 1 && d.q[i].summands[0].mult == 1;
        if d.q[i].is_zero() || !single {
            ps4 = AxiomEntry::fail("PS4", format!("Q({}) is not indecomposable", s.label(i)));
            break 'ps4;
        }
        for j in 0..t {
            for deg in [-1i64, 1] {
                let dd = hom_db_dim(&d.q[i], &s.theta[j], deg)?;
                if dd != 0 {
                    ps4 = AxiomEntry::fail(
                        "PS4",
                        format!(
                            "Hom(Q({}), Theta({})[{deg}]) has dimension {dd}",
                            s.label(i),
                            s.label(j)
                        ),
                    );
                    break 'ps4;
                }
            }
        }
    }
    report.push(ps4);
    // PS5: eta triangles verify, K-certificates use indices > i, and
    // Hom(K(i)[1], Theta(i)) = 0
    let mut ps5 = AxiomEntry::pass("PS5");
    'ps5: for i in 0..t {
        let tri = &d.eta[i];
        let shape_ok = db_isomorphic(&tri.a, &d.k[i], s.seed)?.is_some()
            && db_isomorphic(&tri.b, &d.q[i], s.seed)?.is_some()
            && db_isomorphic(&tri.c, &s.theta[i], s.seed)?.is_some();
        if !shape_ok {
            ps5 = AxiomEntry::fail("PS5", format!("eta({}) has the wrong endpoints", s.label(i)));
            break 'ps5;
        }
        if let Err(msg) = triangle_verify(tri, &s.theta)? {
            ps5 = AxiomEntry::fail("PS5", format!("eta({}) fails: {msg}", s.label(i)));
            break 'ps5;
        }
        let allowed: Vec<usize> = ((i + 1)..t).collect();
        if !filtration_verify(&d.k[i], &d.k_certs[i], &allowed, s)? {
            ps5 = AxiomEntry::fail(
                "PS5",
                format!("K({}) certificate fails or uses indices <= {}", s.label(i), s.label(i)),
            );
            break 'ps5;
        }
        let dd = hom_db_dim(&d.k[i], &s.theta[i], -1)?;
        if dd != 0 {
            ps5 = AxiomEntry::fail(
                "PS5",
                format!("Hom(K({})[1], Theta({})) has dimension {dd}", s.label(i), s.label(i)),
            );
            break 'ps5;
        }
    }
    report.push(ps5);
    Ok(report)
}

// ---------------------------------------------------------------------------
// duality
// ---------------------------------------------------------------------------

/// Arrow-reversing, matrix-transposing, shift-negating duality transform.
pub struct Dualizer {
    pub primal: Arc<Quiver>,
    pub reversed: Arc<Quiver>,
}

impl Dualizer {
    pub fn new(primal: &Arc<Quiver>) -> Self {
        Dualizer { primal: primal.clone(), reversed: primal.reversed() }
    }

    pub fn rep(&self, r: &Rep) -> Rep {
        r.dual(&self.reversed)
    }

    pub fn rep_back(&self, r: &Rep) -> Rep {
        r.dual(&self.primal)
    }

    /// Dual object; summand order is preserved so flat copies correspond.
    pub fn object(&self, x: &DbObject) -> DbObject {
        DbObject {
            quiver: self.reversed.clone(),
            field: x.field,
            summands: x
                .summands
                .iter()
                .map(|s| crate::derived::DbSummand {
                    rep: self.rep(&s.rep),
                    shift: -s.shift,
                    mult: s.mult,
                })
                .collect(),
        }
    }

    pub fn object_back(&self, x: &DbObject) -> DbObject {
        DbObject {
            quiver: self.primal.clone(),
            field: x.field,
            summands: x
                .summands
                .iter()
                .map(|s| crate::derived::DbSummand {
                    rep: self.rep_back(&s.rep),
                    shift: -s.shift,
                    mult: s.mult,
                })
                .collect(),
        }
    }

    pub fn cocycle(&self, phi: &Cocycle) -> Cocycle {
        phi.iter().map(Matrix::transpose).collect()
    }

    /// Dual morphism (direction reverses).
    pub fn morphism(&self, f: &DbMorphism) -> DbMorphism {
        let source = self.object(&f.target);
        let target = self.object(&f.source);
        let entries = f
            .entries
            .iter()
            .map(|e| DbEntry {
                src: e.dst,
                dst: e.src,
                comp: match &e.comp {
                    Component::Map(m) => Component::Map(m.dual(&self.reversed)),
                    Component::Ext(c) => Component::Ext(self.cocycle(c)),
                },
            })
            .collect();
        DbMorphism { source, target, entries }
    }

    /// Dual triangle: `A -> B -> C -> A[1]` becomes `DC -> DB -> DA -> DC[1]`.
    pub fn triangle(&self, t: &TriangleCert) -> Result<TriangleCert> {
        let g = t.g.as_ref().ok_or_else(|| Error::Internal("dual triangle needs stored maps".into()))?;
        let h = t.h.as_ref().ok_or_else(|| Error::Internal("dual triangle needs stored maps".into()))?;
        Ok(TriangleCert {
            a: self.object(&t.c),
            b: self.object(&t.b),
            c: self.object(&t.a),
            f: self.morphism(g),
            g: Some(self.morphism(&t.f)),
            h: Some(self.morphism(h).shifted(1)),
            seed: t.seed,
        })
    }

    /// Dual system: objects dualized, order reversed.
    pub fn system(&self, s: &ThetaSystem) -> Result<ThetaSystem> {
        let t = s.size();
        let theta: Vec<DbObject> = (0..t).map(|k| self.object(&s.theta[t - 1 - k])).collect();
        Ok(ThetaSystem {
            quiver: self.reversed.clone(),
            field: s.field,
            theta,
            labels: (0..t).map(|k| s.labels[t - 1 - k]).collect(),
            seed: s.seed,
        })
    }
}

/// Checks the injective-system axioms IS1-IS5 by dualizing the data and
/// running the projective checker; the report is relabeled.
pub fn check_injective_system(s: &ThetaSystem, d: &InjectiveSystemData) -> Result<AxiomReport> {
    let dual = Dualizer::new(&s.quiver);
    let ds = dual.system(s)?;
    let t = s.size();
    let mut q = Vec::new();
    let mut k = Vec::new();
    let mut eta = Vec::new();
    let mut k_certs = Vec::new();
    for pos in 0..t {
        // dual-world position pos corresponds to primal position t-1-pos
        let i = t - 1 - pos;
        q.push(dual.object(&d.y[i]));
        k.push(dual.object(&d.z[i]));
        eta.push(dual.triangle(&d.xi[i])?);
        // rebuild the dual filtration certificate by bounded search
        let dz = dual.object(&d.z[i]);
        let allowed: Vec<usize> = ((pos + 1)..t).collect();
        let cert = certificate_search_unbudgeted(&ds, &dz, &allowed)?
            .ok_or_else(|| Error::Internal("dual certificate rebuild failed".into()))?;
        k_certs.push(cert);
    }
    let dd = ProjectiveSystemData { q, k, eta, k_certs };
    let rep = check_projective_system(&ds, &dd)?;
    Ok(AxiomReport {
        entries: rep
            .entries
            .into_iter()
            .map(|e| AxiomEntry { anchor: e.anchor.replace("PS", "IS"), ..e })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// the constructive existence theorem
// ---------------------------------------------------------------------------

/// Constructs the unique relative-projective family by the inductive
/// universal-triangle construction, starting from the top index.
pub fn build_projective_system(s: &ThetaSystem) -> Result<ProjectiveSystemData> {
    let report = check_theta_system(s)?;
    if !report.all_pass() {
        let bad = report.entries.iter().find(|e| !e.pass).unwrap();
        return Err(Error::Config(format!(
            "system axioms fail at {}: {}",
            bad.anchor,
            bad.witness.clone().unwrap_or_default()
        )));
    }
    let t = s.size();
    let seed = s.seed;
    let mut q = vec![DbObject::zero(s.quiver.clone(), s.field); t];
    let mut kk = vec![DbObject::zero(s.quiver.clone(), s.field); t];
    let mut eta: Vec<Option<TriangleCert>> = vec![None; t];
    let mut k_certs = vec![FiltrationCertificate::empty(); t];
    for i in (0..t).rev() {
        // running data: U (indecomposable), the map xi: U -> Theta(i)
        // restricted to the active layer, V = ker(xi) and its certificate
        let (theta_i, u_shift) = s.theta_indec(i)?;
        let mut u_rep = theta_i.clone();
        let cur_shift = u_shift;
        let mut xi_proj = theta_i.identity();
        let mut v_cert = FiltrationCertificate::empty();
        for step in (i + 1)..t {
            let u_obj = DbObject::stalk(&u_rep, cur_shift, seed)?;
            let a = hom_db_dim(&u_obj, &s.theta[step], 1)?;
            if a == 0 {
                continue;
            }
            let (theta_k, k_shift) = s.theta_indec(step)?;
            if k_shift == cur_shift {
                // the classes live in Ext^1(U, theta_k): universal triangle
                // theta_k^a -> E -> U with the Ext group killed
                let (ses, n) = crate::homalg::universal_extension_left(&u_rep, theta_k)?;
                debug_assert_eq!(n, a);
                if !decompose(&ses.mid, seed)?.certified {
                    return Err(Error::Indeterminate(
                        "middle-term decomposition could not be certified over this field; \
                         rerun over a prime field"
                            .into(),
                    ));
                }
                let mid_obj = DbObject::stalk(&ses.mid, cur_shift, seed)?;
                let pairing = stalk_pairing(&mid_obj, &ses.mid, seed)?;
                let mut selected: Option<(Rep, RepMorphism)> = None;
                for (ci, &(si, _)) in mid_obj.copies().iter().enumerate() {
                    let w = mid_obj.summands[si].rep.clone();
                    let g_w = ses.proj.compose(&pairing.incl[ci]); // W -> U
                    // summand selection: the cone of W -> U must lie in
                    // add(theta_k[1]): surjective with kernel a power of
                    // theta_k
                    if !g_w.is_surjective() {
                        continue;
                    }
                    let ker = morphism_parts(&g_w).kernel;
                    if rep_in_add_of(&ker, theta_k, seed)? {
                        selected = Some((w, g_w));
                        break;
                    }
                }
                let Some((w, g_w)) = selected else {
                    return Err(Error::Internal(
                        "no middle-term summand has cone in add(Theta[1])".into(),
                    ));
                };
                // advance the chain: new xi = xi . g_w, V grows by ker g_w
                let new_xi = xi_proj.compose(&g_w);
                let ker_gw = morphism_parts(&g_w);
                let new_v_parts = morphism_parts(&new_xi);
                let v_new = new_v_parts.kernel.clone();
                let v_new_incl = new_v_parts.kernel_inclusion.clone();
                // sequence 0 -> ker(g_w) -> V_new -> V_old -> 0
                let v_old_parts = morphism_parts(&xi_proj);
                let v_old = v_old_parts.kernel.clone();
                let ses_v = {
                    let sub = ker_gw.kernel.clone();
                    // inclusion ker g_w -> V_new: both inside W
                    let incl = factor_through_inclusion(&ker_gw.kernel_inclusion, &v_new_incl)?;
                    // projection V_new -> V_old: restrict g_w
                    let proj_blocks: Vec<Matrix> = (0..s.quiver.vertices)
                        .map(|v| {
                            v_old_parts.kernel_inclusion.blocks[v]
                                .solve_matrix(
                                    &g_w.blocks[v].mul(&v_new_incl.blocks[v]),
                                )
                                .expect("g maps the new kernel onto the old")
                        })
                        .collect();
                    let proj = RepMorphism { source: v_new.clone(), target: v_old.clone(), blocks: proj_blocks };
                    ShortExactSeq { sub, mid: v_new.clone(), quo: v_old.clone(), incl, proj }
                };
                ses_v.verify()?;
                // prepend the new factor to the V-certificate via gluing
                let d_count = ses_v.sub.total_dim() / theta_k.total_dim().max(1);
                v_cert = prepend_factor(s, step, d_count, &ses_v, &v_cert, cur_shift)?;
                u_rep = w;
                xi_proj = new_xi;
            } else if k_shift == cur_shift - 1 {
                // degree-0 classes Hom(U, theta_k); outside the shift-aligned
                // regime used by the bundled systems
                return Err(Error::Internal(
                    "construction across adjacent shifts is not supported for this system".into(),
                ));
            } else {
                return Err(Error::Internal("unexpected shift gap in the construction".into()));
            }
        }
        // finish index i
        let q_obj = DbObject::stalk(&u_rep, cur_shift, seed)?;
        let v_parts = morphism_parts(&xi_proj);
        let k_obj = DbObject::stalk(&v_parts.kernel, cur_shift, seed)?;
        let ses_i = ShortExactSeq {
            sub: v_parts.kernel.clone(),
            mid: u_rep.clone(),
            quo: theta_i.clone(),
            incl: v_parts.kernel_inclusion.clone(),
            proj: xi_proj.clone(),
        };
        ses_i.verify()?;
        let tri = TriangleCert::from_ses(&ses_i, cur_shift, seed)?;
        q[i] = q_obj;
        kk[i] = k_obj;
        eta[i] = Some(tri);
        k_certs[i] = v_cert;
    }
    let data = ProjectiveSystemData {
        q,
        k: kk,
        eta: eta.into_iter().map(Option::unwrap).collect(),
        k_certs,
    };
    let check = check_projective_system(s, &data)?;
    if !check.all_pass() {
        let bad = check.entries.iter().find(|e| !e.pass).unwrap();
        return Err(Error::Internal(format!(
            "constructed family fails {}: {}",
            bad.anchor,
            bad.witness.clone().unwrap_or_default()
        )));
    }
    // non-splitness whenever K(i) is nonzero
    for i in 0..s.size() {
        if !data.k[i].is_zero() {
            let split = data.k[i].direct_sum(&s.theta[i], seed)?;
            if db_isomorphic(&data.q[i], &split, seed)?.is_some() {
                return Err(Error::Internal(format!(
                    "eta({}) splits although K({}) is nonzero",
                    s.label(i),
                    s.label(i)
                )));
            }
        }
    }
    Ok(data)
}

/// Whether a representation lies in `add` of a single indecomposable.
fn rep_in_add_of(m: &Rep, theta: &Rep, seed: u64) -> Result<bool> {
    if m.is_zero() {
        return Ok(true);
    }
    let d = decompose(m, seed)?;
    for (rep, _) in &d.summands {
        if !is_isomorphic(rep, theta, seed)?.is_yes() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Factors an inclusion `A -> X` through a larger subobject `B -> X`,
/// giving `A -> B`.
fn factor_through_inclusion(a_incl: &RepMorphism, b_incl: &RepMorphism) -> Result<RepMorphism> {
    let blocks: Vec<Matrix> = (0..a_incl.source.quiver.vertices)
        .map(|v| {
            b_incl.blocks[v]
                .solve_matrix(&a_incl.blocks[v])
                .expect("the smaller subobject lies inside the larger")
        })
        .collect();
    let out = RepMorphism {
        source: a_incl.source.clone(),
        target: b_incl.source.clone(),
        blocks,
    };
    out.check()?;
    Ok(out)
}

/// Builds the certificate of `V_new` from the sequence
/// `0 -> theta_k^d -> V_new -> V_old -> 0` and the certificate of `V_old`:
/// the factor step is prepended, then the old steps are lifted through
/// preimages by the gluing construction.
fn prepend_factor(
    s: &ThetaSystem,
    k: usize,
    power: usize,
    ses_v: &ShortExactSeq,
    old_cert: &FiltrationCertificate,
    shift: i64,
) -> Result<FiltrationCertificate> {
    let cert_a = if power > 0 {
        let zero_obj = DbObject::zero(s.quiver.clone(), s.field);
        let (theta_rep, tu) = s.theta_indec(k)?;
        debug_assert_eq!(tu, shift);
        let phi = zero_cocycle_for(&theta_rep.direct_power(power), &zero_obj.layer(tu).rep);
        FiltrationCertificate { steps: vec![make_step(s, &zero_obj, k, power, &phi)?] }
    } else {
        FiltrationCertificate::empty()
    };
    glue_certificates(s, &cert_a, old_cert, ses_v, shift)
}

/// Search-based certificate rebuild without an external budget (for dual
/// transforms and membership checks on small objects).
pub fn certificate_search_unbudgeted(
    s: &ThetaSystem,
    m: &DbObject,
    allowed: &[usize],
) -> Result<Option<FiltrationCertificate>> {
    let total = m.total_dim();
    let budget = total + 1;
    certificate_search(s, m, allowed, budget)
}

/// Bounded search for a filtration certificate: peels top factors (split
/// summand peels and layer-level surjections) with backtracking.
pub fn certificate_search(
    s: &ThetaSystem,
    m: &DbObject,
    allowed: &[usize],
    depth_budget: usize,
) -> Result<Option<FiltrationCertificate>> {
    if m.is_zero() {
        return Ok(Some(FiltrationCertificate::empty()));
    }
    if depth_budget == 0 {
        return Ok(None);
    }
    let seed = s.seed;
    for &k in allowed.iter().rev() {
        let (theta_rep, u) = s.theta_indec(k)?;
        let theta_obj = &s.theta[k];
        // split peel: M = rest + Theta(k)
        if m.multiplicity_of(theta_rep, u, seed)? > 0 {
            let mut parts: Vec<(Rep, i64, usize)> = Vec::new();
            let mut removed = false;
            for sm in &m.summands {
                let mut mult = sm.mult;
                if !removed && sm.shift == u && is_isomorphic(&sm.rep, theta_rep, seed)?.is_yes() {
                    mult -= 1;
                    removed = true;
                }
                if mult > 0 {
                    parts.push((sm.rep.clone(), sm.shift, mult));
                }
            }
            let rest = DbObject::from_parts(&s.quiver, s.field, &parts, seed)?;
            if let Some(sub_cert) = certificate_search(s, &rest, allowed, depth_budget - 1)? {
                // rebuild on the found chain: final split step
                let below = sub_cert.target(s);
                let lay = below.layer(u).rep;
                let phi = zero_cocycle_for(&theta_rep.direct_power(1), &lay);
                let step = make_step(s, &below, k, 1, &phi)?;
                if db_isomorphic(&step.above, m, seed)?.is_some() {
                    let mut cert = sub_cert;
                    cert.steps.push(step);
                    return Ok(Some(cert));
                }
            }
        }
        let _ = theta_obj;
        // surjection peel on the active layer
        let lay = m.layer(u);
        if lay.rep.is_zero() {
            continue;
        }
        let homs = crate::quiver::hom_basis(&lay.rep, theta_rep)?;
        if homs.is_empty() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64) << 8);
        let mut candidates: Vec<RepMorphism> = homs.clone();
        for _ in 0..16 {
            let mut acc = RepMorphism::zero(&lay.rep, theta_rep);
            for f in &homs {
                acc = acc.add(&f.scale(&s.field.from_i64(rng.gen_range(-3..=3))));
            }
            candidates.push(acc);
        }
        for cand in candidates {
            if !cand.is_surjective() {
                continue;
            }
            let parts = morphism_parts(&cand);
            // remainder object: kernel on this layer plus the other layers
            let mut rest_parts: Vec<(Rep, i64, usize)> = vec![(parts.kernel.clone(), u, 1)];
            for sm in &m.summands {
                if sm.shift != u {
                    rest_parts.push((sm.rep.clone(), sm.shift, sm.mult));
                }
            }
            let rest = DbObject::from_parts(&s.quiver, s.field, &rest_parts, seed)?;
            if let Some(sub_cert) = certificate_search(s, &rest, allowed, depth_budget - 1)? {
                // final step: extension of rest by theta with the connecting
                // class of 0 -> ker -> layer -> theta -> 0
                let ses = ShortExactSeq {
                    sub: parts.kernel.clone(),
                    mid: lay.rep.clone(),
                    quo: theta_rep.clone(),
                    incl: parts.kernel_inclusion.clone(),
                    proj: cand.clone(),
                };
                if ses.verify().is_err() {
                    continue;
                }
                let below = sub_cert.target(s);
                let phi = connecting_class(&ses);
                let phi = align_class(&phi, theta_rep, &parts.kernel, &below.layer(u).rep, seed)?;
                let step = make_step(s, &below, k, 1, &phi)?;
                if db_isomorphic(&step.above, m, seed)?.is_some() {
                    let mut cert = sub_cert;
                    cert.steps.push(step);
                    return Ok(Some(cert));
                }
            }
        }
    }
    Ok(None)
}

/// Constructs the relative-injective family by duality.
pub fn build_injective_system(s: &ThetaSystem) -> Result<InjectiveSystemData> {
    let dual = Dualizer::new(&s.quiver);
    let ds = dual.system(s)?;
    let built = build_projective_system(&ds)?;
    let t = s.size();
    let back = Dualizer::new(&ds.quiver);
    let mut y = Vec::new();
    let mut z = Vec::new();
    let mut xi = Vec::new();
    let mut z_certs = Vec::new();
    for i in 0..t {
        let pos = t - 1 - i; // dual-world position of primal index i
        y.push(back.object(&built.q[pos]));
        z.push(back.object(&built.k[pos]));
        xi.push(back.triangle(&built.eta[pos])?);
        let zc = back.object(&built.k[pos]);
        let allowed: Vec<usize> = (0..i).collect();
        let cert = certificate_search_unbudgeted(s, &zc, &allowed)?
            .ok_or_else(|| Error::Internal("dual Z certificate rebuild failed".into()))?;
        z_certs.push(cert);
    }
    Ok(InjectiveSystemData { y, z, xi, z_certs })
}

// ---------------------------------------------------------------------------
// multiplicities
// ---------------------------------------------------------------------------

/// Solves `D X = C` with `d_ij = dim Hom(Q(i), Theta(j))` and
/// `c_i = dim Hom(Q(i), M)`; the matrix is checked to be upper triangular
/// with nonzero diagonal in the system order. Errors signal that `M` is not
/// filtered (non-integral or negative solution) or that the system data is
/// inconsistent (singular matrix).
pub fn multiplicities(
    m: &DbObject,
    d: &ProjectiveSystemData,
    s: &ThetaSystem,
    cert: Option<&FiltrationCertificate>,
) -> Result<Vec<usize>> {
    let t = s.size();
    let field = FieldCfg::Rational;
    let mut dmat = Matrix::zero(t, t, field);
    for i in 0..t {
        for j in 0..t {
            let dim = hom_db_dim(&d.q[i], &s.theta[j], 0)?;
            if j < i && dim != 0 {
                return Err(Error::Multiplicity(format!(
                    "hom-count matrix is not upper triangular at ({}, {})",
                    s.label(i),
                    s.label(j)
                )));
            }
            if j == i && dim == 0 {
                return Err(Error::Multiplicity(format!(
                    "hom-count matrix has a zero diagonal at {}",
                    s.label(i)
                )));
            }
            dmat.set(i, j, field.from_i64(dim as i64));
        }
    }
    let c: Vec<Scalar> = (0..t)
        .map(|i| hom_db_dim(&d.q[i], m, 0).map(|v| field.from_i64(v as i64)))
        .collect::<Result<_>>()?;
    let x = dmat
        .solve(&c)
        .ok_or_else(|| Error::Multiplicity("hom-count matrix is singular".into()))?;
    let mut out = Vec::with_capacity(t);
    for (j, v) in x.iter().enumerate() {
        let Scalar::Q(q) = v else { unreachable!() };
        if !q.is_integer() {
            return Err(Error::Multiplicity(format!(
                "non-integral solution {q} at position {}",
                s.label(j)
            )));
        }
        let n = q.to_integer();
        if n < 0.into() {
            return Err(Error::Multiplicity(format!(
                "negative solution {n} at position {}",
                s.label(j)
            )));
        }
        out.push(u64::try_from(n).map_err(|_| Error::Multiplicity("solution overflow".into()))? as usize);
    }
    // dimension screen: the weighted dimension vectors must reproduce M
    let mut expect: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for (j, &xj) in out.iter().enumerate() {
        for sm in &s.theta[j].summands {
            let entry = expect.entry(sm.shift).or_insert_with(|| vec![0; s.quiver.vertices]);
            for v in 0..s.quiver.vertices {
                entry[v] += sm.rep.dims[v] * sm.mult * xj;
            }
        }
    }
    let mut actual: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for sm in &m.summands {
        let entry = actual.entry(sm.shift).or_insert_with(|| vec![0; s.quiver.vertices]);
        for v in 0..s.quiver.vertices {
            entry[v] += sm.rep.dims[v] * sm.mult;
        }
    }
    expect.retain(|_, v| v.iter().any(|&x| x > 0));
    actual.retain(|_, v| v.iter().any(|&x| x > 0));
    if expect != actual {
        return Err(Error::Multiplicity(
            "solved multiplicities do not reproduce the dimension vectors".into(),
        ));
    }
    if let Some(cert) = cert {
        if cert.counts(t) != out {
            return Err(Error::Multiplicity(
                "solver output disagrees with the supplied certificate tallies".into(),
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// precover
// ---------------------------------------------------------------------------

/// Result of the relative-projective precover construction.
pub struct Precover {
    /// `Q0(M)`, a sum of `Q(j)` for `j >= min(M)`.
    pub q0: DbObject,
    /// The precover morphism `Q0(M) -> M`.
    pub epsilon: DbMorphism,
    /// Triangle `Q0 -> M -> N[1] -> Q0[1]` (the rotation of
    /// `N -> Q0 -> M -> N[1]`).
    pub triangle: TriangleCert,
    /// The co-kernel object `N` with its certificate.
    pub n: DbObject,
    pub n_cert: FiltrationCertificate,
}

/// Builds the precover triangle of a filtered object following the reverse
/// induction on the minimal support index.
pub fn projective_precover(
    m: &DbObject,
    cert: &FiltrationCertificate,
    d: &ProjectiveSystemData,
    s: &ThetaSystem,
) -> Result<Precover> {
    let seed = s.seed;
    let t = s.size();
    if m.is_zero() {
        let zero = DbObject::zero(s.quiver.clone(), s.field);
        let f = DbMorphism::zero(&zero, &zero);
        let (c, tri) = TriangleCert::from_cone(&f, seed)?;
        let _ = c;
        return Ok(Precover {
            q0: zero.clone(),
            epsilon: DbMorphism::zero(&zero, &zero),
            triangle: tri,
            n: zero,
            n_cert: FiltrationCertificate::empty(),
        });
    }
    let ordered = reorder_filtration(s, cert)?;
    let grouped = group_filtration(s, &ordered)?;
    // the last grouped step peels the minimal index
    let last = grouped.steps.last().expect("nonzero object has steps").clone();
    let i = last.factor_index;
    let mi = last.power;
    let n_small = last.below.clone();
    let n_small_cert = FiltrationCertificate { steps: grouped.steps[..grouped.steps.len() - 1].to_vec() };
    // epsilon on the recursive part
    let rec = projective_precover(&n_small, &n_small_cert, d, s)?;
    // alpha: Q(i)^mi -> M with (last step's projection) . alpha = beta_i^mi
    let q_i_power = power_object(&d.q[i], mi, seed)?;
    let psi = last.tri.g.clone().expect("step triangles carry their maps"); // M -> Theta(i)^mi
    let target_theta = s.theta_power(i, mi)?;
    let _ = &target_theta;
    let beta_pow = power_morphism(&d.eta[i].g.clone().expect("eta carries maps"), mi, seed)?;
    let hom_qm = hom_db(&q_i_power, &last.above, 0)?;
    let hom_qtheta = hom_db(&q_i_power, &psi.target, 0)?;
    let cols: Vec<Vec<Scalar>> = hom_qm
        .basis
        .iter()
        .map(|b| hom_coordinates(&hom_qtheta, &psi.compose(b)))
        .collect::<Result<_>>()?;
    let rhs = hom_coordinates(&hom_qtheta, &beta_pow)?;
    let mat = Matrix::from_cols(&cols, hom_qtheta.dim, s.field);
    let sol = mat
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("the precover section does not exist".into()))?;
    let mut alpha = DbMorphism::zero(&q_i_power, &last.above);
    for (c, b) in sol.iter().zip(&hom_qm.basis) {
        alpha = alpha.add(&b.scale(c));
    }
    // epsilon = [ f . eps_N, alpha ]: Q0(N) + Q(i)^mi -> M
    let f_last = &last.tri.f; // N -> M
    let (q0, incl_qn, incl_qi, proj_qn, proj_qi) = direct_sum_with_maps(&rec.q0, &q_i_power, seed)?;
    let _ = (&incl_qn, &incl_qi);
    let eps = f_last
        .compose(&rec.epsilon)
        .compose(&proj_qn)
        .add(&alpha.compose(&proj_qi));
    // minimize: drop summand copies while the induced maps
    // Hom(Q(j), Q0) -> Hom(Q(j), M) stay surjective
    let (q0, eps) = minimize_precover(s, d, q0, eps, m)?;
    let (cone, triangle) = TriangleCert::from_cone(&eps, seed)?;
    // the cone is N[1]; its [-1]-shift must be filtered with larger minimum
    let n_obj = cone.shifted(-1);
    let allowed: Vec<usize> = ((i + 1).min(t)..t).collect();
    let n_cert = certificate_search_unbudgeted(s, &n_obj, &allowed)?
        .ok_or_else(|| Error::Internal("precover complement is not filtered above the minimum".into()))?;
    Ok(Precover { q0, epsilon: eps, triangle, n: n_obj, n_cert })
}

/// Whether the induced maps `Hom(Q(j), Q0) -> Hom(Q(j), M)` are surjective
/// for every member of the relative-projective family.
fn is_precover_map(
    s: &ThetaSystem,
    d: &ProjectiveSystemData,
    eps: &DbMorphism,
    m: &DbObject,
) -> Result<bool> {
    for j in 0..s.size() {
        let target_dim = hom_db_dim(&d.q[j], m, 0)?;
        if target_dim == 0 {
            continue;
        }
        let from = hom_db(&d.q[j], &eps.source, 0)?;
        let into = hom_db(&d.q[j], m, 0)?;
        let cols: Vec<Vec<Scalar>> = from
            .basis
            .iter()
            .map(|b| hom_coordinates(&into, &eps.compose(b)))
            .collect::<Result<_>>()?;
        let mat = Matrix::from_cols(&cols, into.dim, s.field);
        if mat.rank() != target_dim {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy right-minimization of a precover: repeatedly removes one summand
/// copy of the source as long as the restriction is still a precover.
fn minimize_precover(
    s: &ThetaSystem,
    d: &ProjectiveSystemData,
    q0: DbObject,
    eps: DbMorphism,
    m: &DbObject,
) -> Result<(DbObject, DbMorphism)> {
    let mut q0 = q0;
    let mut eps = eps;
    'outer: loop {
        let copies = q0.copies();
        for drop in 0..copies.len() {
            let (dsi, _) = copies[drop];
            // source with one copy of summand dsi removed
            let mut summands = q0.summands.clone();
            summands[dsi].mult -= 1;
            let summands: Vec<_> = summands.into_iter().filter(|sm| sm.mult > 0).collect();
            let restricted = DbObject { quiver: q0.quiver.clone(), field: q0.field, summands };
            let mut entries = Vec::new();
            for e in &eps.entries {
                if e.src == drop {
                    continue;
                }
                let src = if e.src > drop { e.src - 1 } else { e.src };
                entries.push(DbEntry { src, dst: e.dst, comp: e.comp.clone() });
            }
            let eps_restricted =
                DbMorphism { source: restricted.clone(), target: eps.target.clone(), entries };
            if is_precover_map(s, d, &eps_restricted, m)? {
                q0 = restricted;
                eps = eps_restricted;
                continue 'outer;
            }
        }
        return Ok((q0, eps));
    }
}

fn power_object(x: &DbObject, p: usize, seed: u64) -> Result<DbObject> {
    let parts: Vec<(Rep, i64, usize)> = x
        .summands
        .iter()
        .map(|s| (s.rep.clone(), s.shift, s.mult * p))
        .collect();
    DbObject::from_parts(&x.quiver, x.field, &parts, seed)
}

/// The p-fold diagonal power of a morphism between power objects.
fn power_morphism(f: &DbMorphism, p: usize, seed: u64) -> Result<DbMorphism> {
    let src = power_object(&f.source, p, seed)?;
    let dst = power_object(&f.target, p, seed)?;
    let mut out = DbMorphism::zero(&src, &dst);
    let src_copies = f.source.copy_count();
    let dst_copies = f.target.copy_count();
    for copy in 0..p {
        for e in &f.entries {
            out.push_entry(DbEntry {
                src: e.src + copy * src_copies,
                dst: e.dst + copy * dst_copies,
                comp: e.comp.clone(),
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// approximation triangles
// ---------------------------------------------------------------------------

/// The two approximation triangles of an object: an embedding into a
/// relative injective with filtered cone, and the dual presentation by a
/// relative projective.
pub struct Approximation {
    pub y: DbObject,
    pub c: DbObject,
    pub c_cert: FiltrationCertificate,
    pub into_y: DbMorphism,
    pub triangle: TriangleCert,
    pub q_dual: DbObject,
    pub k_dual: DbObject,
    pub k_cert: FiltrationCertificate,
    pub dual_triangle: TriangleCert,
}

/// Runs the iterated universal-extension process from the top index down,
/// producing `X -> Y_X -> C_X -> X[1]` with `Y_X` right-orthogonal to the
/// system and `C_X` filtered, plus the dual triangle.
pub fn approximate(x: &DbObject, s: &ThetaSystem) -> Result<Approximation> {
    let (_y, into_y) = approximate_half(x, s)?;
    let (cone, triangle) = TriangleCert::from_cone(&into_y, s.seed)?;
    let c_cert = certificate_search_unbudgeted(s, &cone, &(0..s.size()).collect::<Vec<_>>())?
        .ok_or_else(|| Error::Internal("approximation cone is not filtered".into()))?;
    // dual side
    let dual = Dualizer::new(&s.quiver);
    let ds = dual.system(s)?;
    let dx = dual.object(x);
    let (dy, dinto) = approximate_half(&dx, &ds)?;
    let back = Dualizer::new(&ds.quiver);
    let q_dual = back.object(&dy);
    let dual_from = back.morphism(&dinto); // Q_X -> X in the primal world
    let (dcone, dual_triangle) = TriangleCert::from_cone(&dual_from, s.seed)?;
    let k_dual = dcone.shifted(-1);
    let k_cert = certificate_search_unbudgeted(s, &k_dual, &(0..s.size()).collect::<Vec<_>>())?
        .ok_or_else(|| Error::Internal("dual approximation kernel is not filtered".into()))?;
    Ok(Approximation {
        y: into_y.target.clone(),
        c: cone,
        c_cert,
        into_y,
        triangle,
        q_dual,
        k_dual,
        k_cert,
        dual_triangle,
    })
}

/// One half of the approximation: the composite `X -> Y` with
/// `Hom(Theta(j), Y[1]) = 0` for all `j`, built index by index.
fn approximate_half(x: &DbObject, s: &ThetaSystem) -> Result<(DbObject, DbMorphism)> {
    let seed = s.seed;
    let mut current = x.clone();
    let mut composite = DbMorphism::identity(x);
    for idx in (0..s.size()).rev() {
        let m = hom_db_dim(&s.theta[idx], &current, 1)?;
        if m == 0 {
            continue;
        }
        let (theta_rep, tu) = s.theta_indec(idx)?;
        // classes Theta(idx) -> current[1]: extension classes live against
        // the layer at tu, ordinary maps against the layer at tu - 1
        let lay_ext = current.layer(tu).rep;
        let lay_deg0 = current.layer(tu - 1).rep;
        let ext = ext1_space(theta_rep, &lay_ext)?;
        let hom = crate::quiver::hom_basis(theta_rep, &lay_deg0)?;
        if ext.dim + hom.len() != m {
            return Err(Error::Internal("approximation class count mismatch".into()));
        }
        if !ext.basis.is_empty() && hom.is_empty() {
            // pure extension step at layer tu: universal right extension
            let (ses, mm) = crate::homalg::universal_extension_right(&lay_ext, theta_rep)?;
            debug_assert_eq!(mm, ext.dim);
            let step = replace_layer_step(s, &current, tu, &ses)?;
            composite = step.compose(&composite);
            current = step.target.clone();
        } else if ext.basis.is_empty() && !hom.is_empty() {
            // degree-0 step: the stacked basis map theta^m -> layer at
            // tu-1; the new object replaces the layer by the cokernel
            let power = hom.len();
            let tm = theta_rep.direct_power(power);
            let blocks: Vec<Matrix> = (0..s.quiver.vertices)
                .map(|v| {
                    let mut mstack = Matrix::zero(lay_deg0.dims[v], 0, s.field);
                    for f in &hom {
                        mstack = mstack.hstack(&f.blocks[v]);
                    }
                    mstack
                })
                .collect();
            let h = RepMorphism { source: tm.clone(), target: lay_deg0.clone(), blocks };
            let parts = morphism_parts(&h);
            if !parts.kernel.is_zero() {
                return Err(Error::Internal(
                    "degree-0 approximation step with nonzero kernel is not supported".into(),
                ));
            }
            // new object: cokernel at tu-1, other layers unchanged
            let mut new_parts: Vec<(Rep, i64, usize)> = vec![(parts.cokernel.clone(), tu - 1, 1)];
            for sm in &current.summands {
                if sm.shift != tu - 1 {
                    new_parts.push((sm.rep.clone(), sm.shift, sm.mult));
                }
            }
            let next = DbObject::from_parts(&s.quiver, s.field, &new_parts, seed)?;
            // step morphism: cokernel projection on the layer, identity off
            let step = layer_map_step(s, &current, &next, tu - 1, &parts.cokernel_projection)?;
            composite = step.compose(&composite);
            current = next;
        } else {
            return Err(Error::Internal(
                "mixed approximation step across two layers is not supported for this input".into(),
            ));
        }
    }
    // final orthogonality check
    for j in 0..s.size() {
        if hom_db_dim(&s.theta[j], &current, 1)? != 0 {
            return Err(Error::Internal("approximation failed to clear the extensions".into()));
        }
    }
    Ok((current, composite))
}

/// Step morphism `current -> next` that applies a representation map on one
/// layer and the identity on all other layers.
fn layer_map_step(
    s: &ThetaSystem,
    current: &DbObject,
    next: &DbObject,
    shift: i64,
    map: &RepMorphism,
) -> Result<DbMorphism> {
    let seed = s.seed;
    let mut out = DbMorphism::zero(current, next);
    // active layer
    let lc = current.layer(shift);
    let ln_obj = layer_object(next, shift);
    let ln_idx = layer_copy_indices(next, shift);
    let pair = stalk_pairing(&ln_obj, &map.target, seed)?;
    let cur_idx = layer_copy_indices(current, shift);
    for (pos, &cf) in cur_idx.iter().enumerate() {
        for (npos, &nf) in ln_idx.iter().enumerate() {
            let comp = pair.proj[npos].compose(map).compose(&lc.inclusions[pos].1);
            if !comp.is_zero() {
                out.push_entry(DbEntry { src: cf, dst: nf, comp: Component::Map(comp) });
            }
        }
    }
    // passive layers: identity transports
    let mut used = vec![false; next.copy_count()];
    for &nf in &ln_idx {
        used[nf] = true;
    }
    let ccopies = current.copies();
    let ncopies = next.copies();
    for (cf, &(csi, _)) in ccopies.iter().enumerate() {
        if current.summands[csi].shift == shift {
            continue;
        }
        let mut found = false;
        for (nf, &(nsi, _)) in ncopies.iter().enumerate() {
            if used[nf] || next.summands[nsi].shift != current.summands[csi].shift {
                continue;
            }
            if let IsoResult::Yes(iso) =
                is_isomorphic(&current.summands[csi].rep, &next.summands[nsi].rep, seed)?
            {
                used[nf] = true;
                out.push_entry(DbEntry { src: cf, dst: nf, comp: Component::Map(iso) });
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Internal("passive matching failed in a layer step".into()));
        }
    }
    Ok(out)
}

/// Step morphism embedding the layer of `current` into the middle of an
/// extension sequence; other layers pass through. Returns the morphism
/// `current -> next` where `next` replaces the layer by the middle.
fn replace_layer_step(
    s: &ThetaSystem,
    current: &DbObject,
    shift: i64,
    ses: &ShortExactSeq,
) -> Result<DbMorphism> {
    let seed = s.seed;
    let mut parts: Vec<(Rep, i64, usize)> = vec![(ses.mid.clone(), shift, 1)];
    for sm in &current.summands {
        if sm.shift != shift {
            parts.push((sm.rep.clone(), sm.shift, sm.mult));
        }
    }
    let next = DbObject::from_parts(&s.quiver, s.field, &parts, seed)?;
    layer_map_step(s, current, &next, shift, &ses.incl)
}

// ---------------------------------------------------------------------------
// cotorsion desk check
// ---------------------------------------------------------------------------

/// Report of the cotorsion desk check over a probe set.
pub struct CotorsionReport {
    pub report: AxiomReport,
}

/// For each probe: both approximation decompositions must exist and verify,
/// the relative projectives must be Ext-orthogonal to every filtered object
/// constructed, and the cores must match `add(Q)` and `add(Y)` on the probe
/// set.
pub fn cotorsion_check(
    s: &ThetaSystem,
    d: &ProjectiveSystemData,
    di: &InjectiveSystemData,
    probes: &[DbObject],
) -> Result<CotorsionReport> {
    let seed = s.seed;
    let t = s.size();
    let mut report = AxiomReport::default();
    // the pair orthogonality below is the extension-group convention
    // Hom(X, Y[1]) = 0, not literal Hom vanishing (which the defining
    // triangles would contradict)
    report.push(AxiomEntry {
        anchor: "orthogonality-convention".into(),
        pass: true,
        witness: Some("pairs are tested with Hom(X, Y[1]) = 0".into()),
        dims: None,
    });
    let mut filtered_objects: Vec<DbObject> = s.theta.clone();
    for (pi, x) in probes.iter().enumerate() {
        let approx = approximate(x, s)?;
        let tri_ok = triangle_verify(&approx.triangle, &s.theta)?.is_ok()
            && triangle_verify(&approx.dual_triangle, &s.theta)?.is_ok();
        let y_ok = (0..t)
            .map(|j| hom_db_dim(&s.theta[j], &approx.y, 1))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&v| v == 0);
        let q_ok = (0..t)
            .map(|j| hom_db_dim(&approx.q_dual, &s.theta[j], 1))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&v| v == 0);
        let c_ok = filtration_verify(&approx.c, &approx.c_cert, &(0..t).collect::<Vec<_>>(), s)?;
        let k_ok = filtration_verify(&approx.k_dual, &approx.k_cert, &(0..t).collect::<Vec<_>>(), s)?;
        if tri_ok && y_ok && q_ok && c_ok && k_ok {
            report.push(AxiomEntry::pass(&format!("decomposition[{pi}]")));
        } else {
            report.push(AxiomEntry::fail(
                &format!("decomposition[{pi}]"),
                format!(
                    "triangles {tri_ok}, injective side {y_ok}, projective side {q_ok}, \
                     cone certificate {c_ok}, kernel certificate {k_ok}"
                ),
            ));
        }
        filtered_objects.push(approx.c.clone());
        filtered_objects.push(approx.k_dual.clone());
    }
    // Ext-orthogonality of the relative projectives against every filtered
    // object seen
    let mut orth = AxiomEntry::pass("orthogonality");
    'orth: for qi in &d.q {
        for f in &filtered_objects {
            if hom_db_dim(qi, f, 1)? != 0 {
                orth = AxiomEntry::fail(
                    "orthogonality",
                    format!("Hom({}, {}[1]) is nonzero", describe(qi), describe(f)),
                );
                break 'orth;
            }
        }
    }
    report.push(orth);
    // core identities on the probe set
    let mut core = AxiomEntry::pass("core");
    'core: for x in probes {
        let in_p = (0..t)
            .map(|j| hom_db_dim(x, &s.theta[j], 1))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&v| v == 0);
        let in_i = (0..t)
            .map(|j| hom_db_dim(&s.theta[j], x, 1))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&v| v == 0);
        let in_f = certificate_search_unbudgeted(s, x, &(0..t).collect::<Vec<_>>())?.is_some();
        let in_add_q = in_add_of_family(x, &d.q, seed)?;
        let in_add_y = in_add_of_family(x, &di.y, seed)?;
        if (in_f && in_p) != in_add_q {
            core = AxiomEntry::fail(
                "core",
                format!(
                    "add(Q) mismatch for {}: filtered {in_f}, projective {in_p}, in add(Q) {in_add_q}",
                    describe(x)
                ),
            );
            break 'core;
        }
        if (in_f && in_i) != in_add_y {
            core = AxiomEntry::fail(
                "core",
                format!(
                    "add(Y) mismatch for {}: filtered {in_f}, injective {in_i}, in add(Y) {in_add_y}",
                    describe(x)
                ),
            );
            break 'core;
        }
    }
    report.push(core);
    Ok(CotorsionReport { report })
}

/// Whether every summand of `x` is isomorphic to a member of the family.
pub fn in_add_of_family(x: &DbObject, family: &[DbObject], seed: u64) -> Result<bool> {
    'summand: for sm in &x.summands {
        for f in family {
            for fs in &f.summands {
                if fs.shift == sm.shift && is_isomorphic(&fs.rep, &sm.rep, seed)?.is_yes() {
                    continue 'summand;
                }
            }
        }
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{special_rep, SpecialKind};

    const QQ: FieldCfg = FieldCfg::Rational;

    fn a3() -> Arc<Quiver> {
        Quiver::linear(3)
    }
    fn srep(v: usize) -> Rep {
        special_rep(&a3(), QQ, SpecialKind::Simple, v)
    }
    fn prep(v: usize) -> Rep {
        special_rep(&a3(), QQ, SpecialKind::Projective, v)
    }
    fn irep(v: usize) -> Rep {
        special_rep(&a3(), QQ, SpecialKind::Injective, v)
    }

    fn simples_system() -> ThetaSystem {
        let theta: Vec<DbObject> = (0..3)
            .map(|v| DbObject::stalk(&srep(v), 0, 7).unwrap())
            .collect();
        ThetaSystem::new(theta, vec![0, 1, 2], 7).unwrap()
    }

    fn a3_shift_system() -> ThetaSystem {
        let i2 = irep(1);
        let theta: Vec<DbObject> = (0..3)
            .map(|k| DbObject::stalk(&i2, 2 * k as i64, 7).unwrap())
            .collect();
        ThetaSystem::new(theta, vec![0, 1, 2], 7).unwrap()
    }

    #[test]
    fn theta_axioms_on_the_shifted_family() {
        let s = a3_shift_system();
        let report = check_theta_system(&s).unwrap();
        assert!(report.all_pass(), "{:?}", report.entries);
    }

    #[test]
    fn theta_axioms_on_simples_and_reordered_failure() {
        let s = simples_system();
        assert!(check_theta_system(&s).unwrap().all_pass());
        // reorder S2 before S1: the Ext-direction axiom must fail with the
        // witness carrying Ext^1(S1, S2)
        let theta: Vec<DbObject> = [1usize, 0, 2]
            .iter()
            .map(|&v| DbObject::stalk(&srep(v), 0, 7).unwrap())
            .collect();
        let bad = ThetaSystem::new(theta, vec![0, 1, 2], 7).unwrap();
        let report = check_theta_system(&bad).unwrap();
        assert!(!report.all_pass());
        let s4 = report.entry("S4").unwrap();
        assert!(!s4.pass);
        assert!(s4.witness.as_ref().unwrap().contains("Theta(2)"));
    }

    #[test]
    fn certificate_construction_and_verify() {
        let s = simples_system();
        // radical chain of P(1): S3, then S2, then S1
        let cert = radical_cert_p1(&s);
        let p1 = DbObject::stalk(&prep(0), 0, 7).unwrap();
        assert!(filtration_verify(&p1, &cert, &[0, 1, 2], &s).unwrap());
        assert!(!filtration_verify(&p1, &cert, &[0, 1], &s).unwrap());
        assert_eq!(cert.counts(3), vec![1, 1, 1]);
        // empty certificate for the zero object
        let zero = DbObject::zero(a3(), QQ);
        assert!(filtration_verify(&zero, &FiltrationCertificate::empty(), &[], &s).unwrap());
    }

    fn radical_cert_p1(s: &ThetaSystem) -> FiltrationCertificate {
        // 0 -> S3 -> P2-part -> P1 with factors S3, S2, S1
        let mut cert = FiltrationCertificate::empty();
        cert = extend_certificate(s, &cert, 2, 1, None).unwrap();
        // extend by S2 with the nonsplit class (dim 1)
        let below = cert.target(s);
        let lay = below.layer(0).rep;
        let ext = ext1_space(&srep(1), &lay).unwrap();
        assert_eq!(ext.dim, 1);
        cert = extend_certificate(s, &cert, 1, 1, Some(&[QQ.one()])).unwrap();
        let below = cert.target(s);
        let lay2 = below.layer(0).rep;
        let ext2 = ext1_space(&srep(0), &lay2).unwrap();
        assert_eq!(ext2.dim, 1);
        cert = extend_certificate(s, &cert, 0, 1, Some(&[QQ.one()])).unwrap();
        cert
    }

    #[test]
    fn reorder_and_group() {
        let s = simples_system();
        // build P1 + S3 with factor order (S2, S3, S1-ish): first S2-ish
        // chain out of order
        let mut cert = FiltrationCertificate::empty();
        cert = extend_certificate(&s, &cert, 1, 1, None).unwrap(); // S2
        cert = extend_certificate(&s, &cert, 2, 1, None).unwrap(); // S3 after S2: out of order
        let m = cert.target(&s);
        let ordered = reorder_filtration(&s, &cert).unwrap();
        let seq: Vec<usize> = ordered.factor_sequence().iter().map(|&(k, _)| k).collect();
        assert_eq!(seq, vec![2, 1]);
        assert_eq!(ordered.counts(3), cert.counts(3));
        assert!(filtration_verify(&m, &ordered, &[0, 1, 2], &s).unwrap());
        // grouping merges equal neighbours
        let mut cert2 = FiltrationCertificate::empty();
        cert2 = extend_certificate(&s, &cert2, 2, 1, None).unwrap();
        cert2 = extend_certificate(&s, &cert2, 2, 1, None).unwrap();
        cert2 = extend_certificate(&s, &cert2, 0, 1, None).unwrap();
        let m2 = cert2.target(&s);
        let grouped = group_filtration(&s, &cert2).unwrap();
        assert_eq!(grouped.steps.len(), 2);
        assert_eq!(grouped.steps[0].power, 2);
        assert!(filtration_verify(&m2, &grouped, &[0, 1, 2], &s).unwrap());
    }

    #[test]
    fn build_on_simples_gives_projectives() {
        let s = simples_system();
        let d = build_projective_system(&s).unwrap();
        for (i, expected) in [prep(0), prep(1), prep(2)].iter().enumerate() {
            let exp_obj = DbObject::stalk(expected, 0, 7).unwrap();
            assert!(
                db_isomorphic(&d.q[i], &exp_obj, 7).unwrap().is_some(),
                "Q({}) = {} expected {}",
                i + 1,
                describe(&d.q[i]),
                describe(&exp_obj)
            );
        }
        // K(1) has factors S3, S2; K(2) = S3; K(3) = 0
        assert_eq!(d.k_certs[0].counts(3), vec![0, 1, 1]);
        assert_eq!(d.k_certs[1].counts(3), vec![0, 0, 1]);
        assert!(d.k[2].is_zero());
        assert!(check_projective_system(&s, &d).unwrap().all_pass());
    }

    #[test]
    fn build_on_shifted_family_is_degenerate() {
        let s = a3_shift_system();
        let d = build_projective_system(&s).unwrap();
        for i in 0..3 {
            assert!(db_isomorphic(&d.q[i], &s.theta[i], 7).unwrap().is_some());
            assert!(d.k[i].is_zero());
        }
    }

    #[test]
    fn injective_build_on_simples() {
        let s = simples_system();
        let di = build_injective_system(&s).unwrap();
        for (i, expected) in [irep(0), irep(1), irep(2)].iter().enumerate() {
            let exp_obj = DbObject::stalk(expected, 0, 7).unwrap();
            assert!(
                db_isomorphic(&di.y[i], &exp_obj, 7).unwrap().is_some(),
                "Y({}) = {} expected {}",
                i + 1,
                describe(&di.y[i]),
                describe(&exp_obj)
            );
        }
        assert!(check_injective_system(&s, &di).unwrap().all_pass());
    }

    #[test]
    fn multiplicity_solver_on_p1() {
        let s = simples_system();
        let d = build_projective_system(&s).unwrap();
        let p1 = DbObject::stalk(&prep(0), 0, 7).unwrap();
        let x = multiplicities(&p1, &d, &s, None).unwrap();
        assert_eq!(x, vec![1, 1, 1]);
        // against the explicit certificate
        let cert = radical_cert_p1(&s);
        let x2 = multiplicities(&p1, &d, &s, Some(&cert)).unwrap();
        assert_eq!(x2, vec![1, 1, 1]);
        // theta itself is a standard basis vector
        let x3 = multiplicities(&s.theta[1], &d, &s, None).unwrap();
        assert_eq!(x3, vec![0, 1, 0]);
        // a non-member is rejected
        let bad = DbObject::stalk(&srep(0), 1, 7).unwrap();
        assert!(multiplicities(&bad, &d, &s, None).is_err());
    }

    #[test]
    fn precover_of_i2() {
        let s = simples_system();
        let d = build_projective_system(&s).unwrap();
        // I(2) = extension of S1 by S2
        let i2 = DbObject::stalk(&irep(1), 0, 7).unwrap();
        let cert = {
            let mut c = FiltrationCertificate::empty();
            c = extend_certificate(&s, &c, 1, 1, None).unwrap();
            c = extend_certificate(&s, &c, 0, 1, Some(&[QQ.one()])).unwrap();
            c
        };
        assert!(filtration_verify(&i2, &cert, &[0, 1, 2], &s).unwrap());
        let pre = projective_precover(&i2, &cert, &d, &s).unwrap();
        // Q0 = P(1), complement = S3 with minimum 3 > 1
        let p1 = DbObject::stalk(&prep(0), 0, 7).unwrap();
        assert!(db_isomorphic(&pre.q0, &p1, 7).unwrap().is_some());
        let s3 = DbObject::stalk(&srep(2), 0, 7).unwrap();
        assert!(db_isomorphic(&pre.n, &s3, 7).unwrap().is_some());
        assert_eq!(pre.n_cert.min_index(3), Some(2));
        assert!(triangle_verify(&pre.triangle, &s.theta).unwrap().is_ok());
    }

    #[test]
    fn precover_base_cases() {
        let s = simples_system();
        let d = build_projective_system(&s).unwrap();
        // zero object
        let zero = DbObject::zero(a3(), QQ);
        let pre = projective_precover(&zero, &FiltrationCertificate::empty(), &d, &s).unwrap();
        assert!(pre.q0.is_zero() && pre.n.is_zero());
        // maximal index: Q(3) = Theta(3)
        let cert = extend_certificate(&s, &FiltrationCertificate::empty(), 2, 1, None).unwrap();
        let pre = projective_precover(&s.theta[2], &cert, &d, &s).unwrap();
        assert!(db_isomorphic(&pre.q0, &s.theta[2], 7).unwrap().is_some());
        assert!(pre.n.is_zero());
    }

    #[test]
    fn approximate_examples() {
        let s = simples_system();
        // X = S2: Y = I(2), C = S1
        let x = DbObject::stalk(&srep(1), 0, 7).unwrap();
        let ap = approximate(&x, &s).unwrap();
        let i2 = DbObject::stalk(&irep(1), 0, 7).unwrap();
        assert!(db_isomorphic(&ap.y, &i2, 7).unwrap().is_some());
        let s1 = DbObject::stalk(&srep(0), 0, 7).unwrap();
        assert!(db_isomorphic(&ap.c, &s1, 7).unwrap().is_some());
        // X = S3: Y = I(3) in two steps
        let x = DbObject::stalk(&srep(2), 0, 7).unwrap();
        let ap = approximate(&x, &s).unwrap();
        let i3 = DbObject::stalk(&irep(2), 0, 7).unwrap();
        assert!(db_isomorphic(&ap.y, &i3, 7).unwrap().is_some());
        for j in 0..3 {
            assert_eq!(hom_db_dim(&s.theta[j], &ap.y, 1).unwrap(), 0);
        }
        // degenerate: X with no incoming extensions stays put
        let x = DbObject::stalk(&irep(2), 0, 7).unwrap();
        let ap = approximate(&x, &s).unwrap();
        assert!(db_isomorphic(&ap.y, &x, 7).unwrap().is_some());
        assert!(ap.c.is_zero());
    }

    #[test]
    fn cotorsion_on_theta_probes() {
        let s = simples_system();
        let d = build_projective_system(&s).unwrap();
        let di = build_injective_system(&s).unwrap();
        let probes = s.theta.clone();
        let rep = cotorsion_check(&s, &d, &di, &probes).unwrap();
        assert!(rep.report.all_pass(), "{:?}", rep.report.entries);
    }

    #[test]
    fn glue_preserves_verification() {
        // extension closure: certificates for the ends of a sequence glue
        // to a verifying certificate of the middle
        let s = simples_system();
        // A = S3, C = I2 (filtered by S2 then S1), B = P1 via the nonsplit
        // sequence 0 -> S3 -> P1 -> I2 -> 0
        let cert_a = extend_certificate(&s, &FiltrationCertificate::empty(), 2, 1, None).unwrap();
        let cert_c = {
            let mut c = extend_certificate(&s, &FiltrationCertificate::empty(), 1, 1, None).unwrap();
            c = extend_certificate(&s, &c, 0, 1, Some(&[QQ.one()])).unwrap();
            c
        };
        let a_rep = cert_a.target(&s).layer(0).rep;
        let c_rep = cert_c.target(&s).layer(0).rep;
        let ext = ext1_space(&c_rep, &a_rep).unwrap();
        assert_eq!(ext.dim, 1);
        let ses = crate::homalg::realize_extension(&ext.basis[0], &c_rep, &a_rep).unwrap();
        let glued = glue_certificates(&s, &cert_a, &cert_c, &ses, 0).unwrap();
        let b = DbObject::stalk(&ses.mid, 0, s.seed).unwrap();
        assert!(db_isomorphic(&b, &DbObject::stalk(&prep(0), 0, 7).unwrap(), 7).unwrap().is_some());
        assert!(filtration_verify(&b, &glued, &[0, 1, 2], &s).unwrap());
        assert_eq!(glued.counts(3), vec![1, 1, 1]);
    }

    #[test]
    fn hom_vanishing_propagates_to_filtered_objects() {
        // factors {S3} against factors {S1}: all forward homs vanish, so
        // homs between anything they filter vanish too
        let s = simples_system();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let mut cert_n = FiltrationCertificate::empty();
            for _ in 0..rng.gen_range(1..=3) {
                cert_n = extend_certificate(&s, &cert_n, 2, 1, None).unwrap();
            }
            let mut cert_m = FiltrationCertificate::empty();
            for _ in 0..rng.gen_range(1..=3) {
                cert_m = extend_certificate(&s, &cert_m, 0, 1, None).unwrap();
            }
            let n = cert_n.target(&s); // powers of S3
            let m = cert_m.target(&s); // powers of S1
            assert_eq!(hom_db_dim(&s.theta[2], &s.theta[0], 0).unwrap(), 0);
            assert_eq!(hom_db_dim(&n, &m, 0).unwrap(), 0);
        }
    }

    #[test]
    fn precover_rank_property_of_the_defining_triangles() {
        // for every member W of the family, composing with the defining
        // map surjects Hom(W, Q(i)) onto Hom(W, Theta(i))
        let s = simples_system();
        let d = build_projective_system(&s).unwrap();
        for i in 0..3 {
            let beta = d.eta[i].g.as_ref().unwrap();
            for w in &d.q {
                let from = hom_db(w, &d.q[i], 0).unwrap();
                let into = hom_db(w, &s.theta[i], 0).unwrap();
                if into.dim == 0 {
                    continue;
                }
                let cols: Vec<Vec<Scalar>> = from
                    .basis
                    .iter()
                    .map(|b| crate::derived::hom_coordinates(&into, &beta.compose(b)).unwrap())
                    .collect();
                let mat = Matrix::from_cols(&cols, into.dim, s.field);
                assert_eq!(mat.rank(), into.dim, "index {i}");
            }
        }
    }

    #[test]
    fn constructed_family_is_pairwise_nonisomorphic() {
        for s in [simples_system(), a3_shift_system()] {
            let d = build_projective_system(&s).unwrap();
            for i in 0..3 {
                for j in (i + 1)..3 {
                    assert!(db_isomorphic(&d.q[i], &d.q[j], 7).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn multiplicities_on_the_shifted_system() {
        let s = a3_shift_system();
        let d = build_projective_system(&s).unwrap();
        // Theta(1) + Theta(3): the hom-count matrix is the identity
        let m = s.theta[0].direct_sum(&s.theta[2], 7).unwrap();
        let x = multiplicities(&m, &d, &s, None).unwrap();
        assert_eq!(x, vec![1, 0, 1]);
    }

    #[test]
    fn build_base_case_single_object() {
        let theta = vec![DbObject::stalk(&irep(1), 0, 7).unwrap()];
        let s = ThetaSystem::new(theta, vec![0], 7).unwrap();
        let d = build_projective_system(&s).unwrap();
        assert!(db_isomorphic(&d.q[0], &s.theta[0], 7).unwrap().is_some());
        assert!(d.k[0].is_zero());
        let di = build_injective_system(&s).unwrap();
        assert!(db_isomorphic(&di.y[0], &s.theta[0], 7).unwrap().is_some());
        assert!(di.z[0].is_zero());
    }

    #[test]
    fn tampered_projective_family_fails_orthogonality() {
        let s = simples_system();
        let mut d = build_projective_system(&s).unwrap();
        // replace Q(1) by S(1): the extension against S(2) survives
        d.q[0] = s.theta[0].clone();
        let report = check_projective_system(&s, &d).unwrap();
        let ps4 = report.entry("PS4").unwrap();
        assert!(!ps4.pass);
        assert!(ps4.witness.as_ref().unwrap().contains("Theta(2)[1]"));
    }

    #[test]
    fn duality_round_trip_is_the_identity() {
        let s = simples_system();
        let dual = Dualizer::new(&s.quiver);
        let back = Dualizer::new(&dual.reversed);
        // objects
        for obj in [
            DbObject::stalk(&prep(0), 0, 7).unwrap(),
            DbObject::stalk(&irep(1), 2, 7).unwrap(),
            s.theta[1].direct_sum(&s.theta[2].shifted(-1), 7).unwrap(),
        ] {
            let round = back.object(&dual.object(&obj));
            assert!(db_isomorphic(&obj, &round, 7).unwrap().is_some());
        }
        // triangles: a sequence-based certificate survives two dualizations
        let ext = ext1_space(&srep(0), &srep(1)).unwrap();
        let ses = crate::homalg::realize_extension(&ext.basis[0], &srep(0), &srep(1)).unwrap();
        let tri = TriangleCert::from_ses(&ses, 0, 7).unwrap();
        let round = back.triangle(&dual.triangle(&tri).unwrap()).unwrap();
        assert!(db_isomorphic(&tri.a, &round.a, 7).unwrap().is_some());
        assert!(db_isomorphic(&tri.b, &round.b, 7).unwrap().is_some());
        assert!(db_isomorphic(&tri.c, &round.c, 7).unwrap().is_some());
        assert!(triangle_verify(&round, &s.theta).unwrap().is_ok());
        // the dual system of the dual system has the original order
        let ds = dual.system(&s).unwrap();
        let rs = back.system(&ds).unwrap();
        assert_eq!(rs.labels, s.labels);
    }

    #[test]
    fn build_over_a_prime_field() {
        let field = FieldCfg::Prime(101);
        let q = Quiver::linear(3);
        let theta: Vec<DbObject> = (0..3)
            .map(|v| {
                DbObject::stalk(&special_rep(&q, field, SpecialKind::Simple, v), 0, 7).unwrap()
            })
            .collect();
        let s = ThetaSystem::new(theta, vec![0, 1, 2], 7).unwrap();
        let d = build_projective_system(&s).unwrap();
        for i in 0..3 {
            let expected =
                DbObject::stalk(&special_rep(&q, field, SpecialKind::Projective, i), 0, 7).unwrap();
            assert!(db_isomorphic(&d.q[i], &expected, 7).unwrap().is_some());
        }
    }
}
