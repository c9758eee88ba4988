//! Command implementations: system checks, constructions, solvers and the
//! bundled demonstration pipelines.

use anyhow::{anyhow, bail, Result};

use homsys::demos;
use homsys::derived::{db_isomorphic, describe, hom_db, hom_db_dim, DbObject};
use homsys::field::FieldCfg;
use homsys::strata::{
    a_delta, endo_algebra, exceptional_check, quasi_hereditary_check,
    standardly_stratified_check, EndoStatus,
};
use homsys::theta::{
    approximate, build_injective_system, build_projective_system, certificate_search_unbudgeted,
    check_projective_system, check_theta_system, cotorsion_check, multiplicities,
    projective_precover, ThetaSystem,
};

use crate::doc::Session;
use crate::report::Report;

fn require_theta(session: &Session) -> Result<&ThetaSystem> {
    session
        .theta
        .as_ref()
        .ok_or_else(|| anyhow!("this command needs a `theta` section in the input document"))
}

fn require_object(session: &Session, name: Option<&str>) -> Result<DbObject> {
    let name = name.ok_or_else(|| anyhow!("this command needs --object <name>"))?;
    session
        .objects
        .get(name)
        .cloned()
        .ok_or_else(|| anyhow!("unknown object {name:?}"))
}

pub fn check_theta(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("check-theta", session.seed, session.field);
    report.push_axioms(&check_theta_system(s)?);
    Ok(report)
}

/// Checks proposed relative projectives named in the document, or builds
/// and checks the canonical family when none are named.
pub fn check_projective(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("check-projective", session.seed, session.field);
    match &session.projective {
        None => {
            let d = build_projective_system(s)?;
            report.push_axioms(&check_projective_system(s, &d)?);
            for c in &d.k_certs {
                report.add_certificate(s, c);
            }
        }
        Some(q_family) => {
            report.push_axioms(&check_named_projectives(s, q_family)?);
        }
    }
    Ok(report)
}

/// Axiom checks against a named family: the orthogonality conditions are
/// object-level; the triangle condition is established by locating the
/// kernel of a nonzero map onto each system object and certifying it.
fn check_named_projectives(
    s: &ThetaSystem,
    q_family: &[DbObject],
) -> Result<homsys::theta::AxiomReport> {
    use homsys::theta::{AxiomEntry, AxiomReport};
    let t = s.size();
    let mut rep = AxiomReport::default();
    if q_family.len() != t {
        rep.entries.push(AxiomEntry::fail("PS1", "family size mismatch".into()));
        return Ok(rep);
    }
    rep.entries.push(AxiomEntry::pass("PS1"));
    let mut ps2 = AxiomEntry::pass("PS2");
    for k in 0..t {
        if s.theta[k].is_zero() {
            ps2 = AxiomEntry::fail("PS2", format!("object {} is zero", s.label(k)));
            break;
        }
    }
    rep.entries.push(ps2);
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
    rep.entries.push(ps3);
    let mut ps4 = AxiomEntry::pass("PS4");
    'ps4: for (i, q) in q_family.iter().enumerate() {
        let single = q.summands.len() == 1 && q.summands[0].mult == 1;
        if q.is_zero() || !single {
            ps4 = AxiomEntry::fail("PS4", format!("Q({}) is not indecomposable", s.label(i)));
            break 'ps4;
        }
        for j in 0..t {
            for deg in [-1i64, 1] {
                let d = hom_db_dim(q, &s.theta[j], deg)?;
                if d != 0 {
                    ps4 = AxiomEntry::fail(
                        "PS4",
                        format!(
                            "Hom(Q({}), Theta({})[{deg}]) has dimension {d}",
                            s.label(i),
                            s.label(j)
                        ),
                    );
                    break 'ps4;
                }
            }
        }
    }
    rep.entries.push(ps4);
    // PS5: find a defining triangle for each index
    let mut ps5 = AxiomEntry::pass("PS5");
    'ps5: for i in 0..t {
        let hom = hom_db(&q_family[i], &s.theta[i], 0)?;
        let mut found = false;
        for beta in &hom.basis {
            if beta.is_zero() {
                continue;
            }
            let (cone, _) = match homsys::derived::TriangleCert::from_cone(beta, s.seed) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let k_obj = cone.shifted(-1);
            let allowed: Vec<usize> = ((i + 1)..t).collect();
            if hom_db_dim(&k_obj, &s.theta[i], -1)? != 0 {
                continue;
            }
            if certificate_search_unbudgeted(s, &k_obj, &allowed)?.is_some() {
                found = true;
                break;
            }
        }
        if !found {
            ps5 = AxiomEntry::fail(
                "PS5",
                format!("no defining triangle found for Q({})", s.label(i)),
            );
            break 'ps5;
        }
    }
    rep.entries.push(ps5);
    Ok(rep)
}

pub fn check_injective(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("check-injective", session.seed, session.field);
    match &session.injective {
        None => {
            let di = build_injective_system(s)?;
            report.push_axioms(&homsys::theta::check_injective_system(s, &di)?);
            for c in &di.z_certs {
                report.add_certificate(s, c);
            }
        }
        Some(y_family) => {
            // dual orthogonality conditions on a named family
            use homsys::theta::{AxiomEntry, AxiomReport};
            let t = s.size();
            let mut rep = AxiomReport::default();
            rep.entries.push(if y_family.len() == t {
                AxiomEntry::pass("IS1")
            } else {
                AxiomEntry::fail("IS1", "family size mismatch".into())
            });
            let mut is4 = AxiomEntry::pass("IS4");
            'is4: for (i, y) in y_family.iter().enumerate() {
                for j in 0..t {
                    for deg in [-1i64, 1] {
                        let d = hom_db_dim(&s.theta[j], y, deg)?;
                        if d != 0 {
                            is4 = AxiomEntry::fail(
                                "IS4",
                                format!(
                                    "Hom(Theta({}), Y({})[{deg}]) has dimension {d}",
                                    s.label(j),
                                    s.label(i)
                                ),
                            );
                            break 'is4;
                        }
                    }
                }
            }
            rep.entries.push(is4);
            report.push_axioms(&rep);
        }
    }
    Ok(report)
}

fn family_verdicts(report: &mut Report, s: &ThetaSystem, label: &str, family: &[DbObject]) {
    for (i, obj) in family.iter().enumerate() {
        report.push(
            &format!("{label}({})", s.label(i)),
            true,
            Some(describe(obj)),
            None,
        );
    }
}

pub fn build_projective(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("build-projective", session.seed, session.field);
    let d = build_projective_system(s)?;
    report.push_axioms(&check_projective_system(s, &d)?);
    family_verdicts(&mut report, s, "Q", &d.q);
    for c in &d.k_certs {
        report.add_certificate(s, c);
    }
    Ok(report)
}

pub fn build_injective(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("build-injective", session.seed, session.field);
    let di = build_injective_system(s)?;
    report.push_axioms(&homsys::theta::check_injective_system(s, &di)?);
    family_verdicts(&mut report, s, "Y", &di.y);
    for c in &di.z_certs {
        report.add_certificate(s, c);
    }
    Ok(report)
}

pub fn multiplicity(session: &Session, object: Option<&str>) -> Result<Report> {
    let s = require_theta(session)?;
    let m = require_object(session, object)?;
    let mut report = Report::new("multiplicity", session.seed, session.field);
    let d = build_projective_system(s)?;
    match multiplicities(&m, &d, s, None) {
        Ok(x) => {
            report.push("multiplicities", true, Some(format!("{x:?}")), Some(x));
        }
        Err(e) => {
            report.push("multiplicities", false, Some(e.to_string()), None);
        }
    }
    Ok(report)
}

pub fn precover(session: &Session, object: Option<&str>) -> Result<Report> {
    let s = require_theta(session)?;
    let m = require_object(session, object)?;
    let mut report = Report::new("precover", session.seed, session.field);
    let d = build_projective_system(s)?;
    let all: Vec<usize> = (0..s.size()).collect();
    let Some(cert) = certificate_search_unbudgeted(s, &m, &all)? else {
        report.push("membership", false, Some("object is not filtered by the system".into()), None);
        return Ok(report);
    };
    report.add_certificate(s, &cert);
    let pre = projective_precover(&m, &cert, &d, s)?;
    report.push("Q0", true, Some(describe(&pre.q0)), None);
    report.push("complement", true, Some(describe(&pre.n)), None);
    let min_m = cert.min_index(s.size());
    let min_n = pre.n_cert.min_index(s.size());
    let min_ok = match (min_m, min_n) {
        (_, None) => true,
        (Some(a), Some(b)) => b > a,
        (None, Some(_)) => false,
    };
    report.push(
        "minimum-raises",
        min_ok,
        Some(format!(
            "min(M) = {}, min(N) = {}",
            min_m.map_or("+inf".into(), |v| s.label(v).to_string()),
            min_n.map_or("+inf".into(), |v| s.label(v).to_string()),
        )),
        None,
    );
    let tri = homsys::derived::triangle_verify(&pre.triangle, &s.theta)?;
    report.push("triangle", tri.is_ok(), tri.err(), None);
    report.add_certificate(s, &pre.n_cert);
    Ok(report)
}

pub fn approximate_cmd(session: &Session, object: Option<&str>) -> Result<Report> {
    let s = require_theta(session)?;
    let x = require_object(session, object)?;
    let mut report = Report::new("approximate", session.seed, session.field);
    let ap = approximate(&x, s)?;
    report.push("Y", true, Some(describe(&ap.y)), None);
    report.push("C", true, Some(describe(&ap.c)), None);
    let y_orth = (0..s.size())
        .map(|j| hom_db_dim(&s.theta[j], &ap.y, 1))
        .collect::<homsys::Result<Vec<_>>>()?;
    report.push(
        "injective-side",
        y_orth.iter().all(|&v| v == 0),
        Some(format!("extension dimensions against Y: {y_orth:?}")),
        None,
    );
    let q_orth = (0..s.size())
        .map(|j| hom_db_dim(&ap.q_dual, &s.theta[j], 1))
        .collect::<homsys::Result<Vec<_>>>()?;
    report.push(
        "projective-side",
        q_orth.iter().all(|&v| v == 0),
        Some(format!("extension dimensions from Q: {q_orth:?}")),
        None,
    );
    let all: Vec<usize> = (0..s.size()).collect();
    let c_ok = homsys::theta::filtration_verify(&ap.c, &ap.c_cert, &all, s)?;
    report.push("cone-certificate", c_ok, None, None);
    report.add_certificate(s, &ap.c_cert);
    report.add_certificate(s, &ap.k_cert);
    Ok(report)
}

pub fn cotorsion(session: &Session, probe_budget: usize) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("cotorsion", session.seed, session.field);
    let d = build_projective_system(s)?;
    let di = build_injective_system(s)?;
    let mut probes = if session.probes.is_empty() { s.theta.clone() } else { session.probes.clone() };
    probes.truncate(probe_budget.max(1));
    let rep = cotorsion_check(s, &d, &di, &probes)?;
    report.push_axioms(&rep.report);
    Ok(report)
}

pub fn endo_algebra_cmd(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("endo-algebra", session.seed, session.field);
    let d = build_projective_system(s)?;
    let a = endo_algebra(&d.q, true, session.field)?;
    report.push("dimension", true, None, Some(vec![a.alg.dim]));
    let mut pair_dims = vec![0usize; s.size() * s.size()];
    for &(i, j) in &a.labels {
        pair_dims[i * s.size() + j] += 1;
    }
    report.push("hom-components", true, Some(format!("{pair_dims:?}")), Some(pair_dims));
    report.push("associativity", true, None, None);
    Ok(report)
}

pub fn standardly_stratified(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("standardly-stratified", session.seed, session.field);
    let d = build_projective_system(s)?;
    let a = endo_algebra(&d.q, true, session.field)?;
    let deltas = a_delta(&a, s)?;
    let rep = standardly_stratified_check(&a, &deltas, &d, s)?;
    report.push_axioms(&rep.report);
    Ok(report)
}

pub fn quasi_hereditary(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("quasi-hereditary", session.seed, session.field);
    let d = build_projective_system(s)?;
    let a = endo_algebra(&d.q, true, session.field)?;
    let deltas = a_delta(&a, s)?;
    for (i, st) in quasi_hereditary_check(&a, &deltas, session.seed).iter().enumerate() {
        match st {
            EndoStatus::Division => {
                report.push(&format!("End(Delta({}))", s.label(i)), true, Some("division".into()), None)
            }
            EndoStatus::Not(w) => {
                report.push(&format!("End(Delta({}))", s.label(i)), false, Some(format!("not a division ring: {w}")), None)
            }
            EndoStatus::Indeterminate(w) => {
                report.push(&format!("End(Delta({}))", s.label(i)), false, Some(format!("indeterminate: {w}")), None)
            }
        }
    }
    Ok(report)
}

pub fn exceptional(session: &Session) -> Result<Report> {
    let s = require_theta(session)?;
    let mut report = Report::new("exceptional", session.seed, session.field);
    let rep = exceptional_check(&s.theta, session.field, session.seed)?;
    report.push_axioms(&rep.report);
    report.push("exceptional", rep.exceptional, None, None);
    report.push("strongly-exceptional", rep.strongly_exceptional, None, None);
    Ok(report)
}

// ---------------------------------------------------------------------------
// demo pipelines
// ---------------------------------------------------------------------------

pub fn demo(which: &str, field: FieldCfg, seed: u64) -> Result<Report> {
    match which {
        "a3" => demo_a3(field, seed),
        "simples" => demo_simples(field, seed),
        "strongly-exceptional" => demo_strongly_exceptional(field, seed),
        other => bail!("unknown demo {other:?}; choose a3, simples or strongly-exceptional"),
    }
}

/// The shifted-injective family: the system axioms hold, the family is not
/// an exceptional sequence (witnessed in degree 2), the construction is
/// degenerate and the endomorphism algebra is a product of three copies of
/// the field.
fn demo_a3(field: FieldCfg, seed: u64) -> Result<Report> {
    let mut report = Report::new("demo a3", seed, field);
    let s = demos::shifted_injective_system(field, seed)?;
    let theta_rep = check_theta_system(&s)?;
    report.push_axioms(&theta_rep);
    let exc = exceptional_check(&s.theta, field, seed)?;
    let es3 = exc.report.entry("ES3").ok_or_else(|| anyhow!("missing ES3 entry"))?;
    let witness_ok = !es3.pass
        && es3
            .witness
            .as_deref()
            .is_some_and(|w| w.contains("E3, E2[2]") && w.contains("dimension 1"));
    report.push(
        "not-exceptional",
        witness_ok && !exc.exceptional,
        es3.witness.clone(),
        None,
    );
    let d = build_projective_system(&s)?;
    let mut degenerate = true;
    for i in 0..3 {
        if db_isomorphic(&d.q[i], &s.theta[i], seed)?.is_none() || !d.k[i].is_zero() {
            degenerate = false;
        }
    }
    report.push("Q-equals-Theta", degenerate, None, None);
    let a = endo_algebra(&d.q, true, field)?;
    report.push("endo-dimension", a.alg.dim == 3, None, Some(vec![a.alg.dim]));
    let off_diag = a.labels.iter().filter(|&&(i, j)| i != j).count();
    report.push("endo-off-diagonal", off_diag == 0, None, Some(vec![off_diag]));
    let deltas = a_delta(&a, &s)?;
    let strat = standardly_stratified_check(&a, &deltas, &d, &s)?;
    report.push("standardly-stratified", strat.report.all_pass(), None, None);
    let qh = quasi_hereditary_check(&a, &deltas, seed);
    report.push(
        "quasi-hereditary",
        qh.iter().all(|st| *st == EndoStatus::Division),
        None,
        None,
    );
    for c in &d.k_certs {
        report.add_certificate(&s, c);
    }
    Ok(report)
}

/// The simples pipeline: the construction yields the indecomposable
/// projectives and injectives, the endomorphism algebra is the path
/// algebra, and the multiplicity solver recovers (1,1,1) for the big
/// projective.
fn demo_simples(field: FieldCfg, seed: u64) -> Result<Report> {
    let mut report = Report::new("demo simples", seed, field);
    let s = demos::simples_system(field, seed)?;
    report.push_axioms(&check_theta_system(&s)?);
    let d = build_projective_system(&s)?;
    let q = demos::a3_quiver();
    let mut q_ok = true;
    for i in 0..3 {
        let expected = DbObject::stalk(
            &homsys::quiver::special_rep(&q, field, homsys::quiver::SpecialKind::Projective, i),
            0,
            seed,
        )?;
        if db_isomorphic(&d.q[i], &expected, seed)?.is_none() {
            q_ok = false;
        }
    }
    report.push("Q-is-projectives", q_ok, None, None);
    let di = build_injective_system(&s)?;
    let mut y_ok = true;
    for i in 0..3 {
        let expected = DbObject::stalk(
            &homsys::quiver::special_rep(&q, field, homsys::quiver::SpecialKind::Injective, i),
            0,
            seed,
        )?;
        if db_isomorphic(&di.y[i], &expected, seed)?.is_none() {
            y_ok = false;
        }
    }
    report.push("Y-is-injectives", y_ok, None, None);
    let a = endo_algebra(&d.q, true, field)?;
    report.push("endo-dimension", a.alg.dim == 6, None, Some(vec![a.alg.dim]));
    let p1 = DbObject::stalk(
        &homsys::quiver::special_rep(&q, field, homsys::quiver::SpecialKind::Projective, 0),
        0,
        seed,
    )?;
    let x = multiplicities(&p1, &d, &s, None)?;
    report.push("multiplicities-P1", x == vec![1, 1, 1], Some(format!("{x:?}")), Some(x.clone()));
    for c in &d.k_certs {
        report.add_certificate(&s, c);
    }
    Ok(report)
}

/// The reversed projectives form a strongly exceptional sequence whose
/// endomorphism algebra is quasi-hereditary of dimension six.
fn demo_strongly_exceptional(field: FieldCfg, seed: u64) -> Result<Report> {
    let mut report = Report::new("demo strongly-exceptional", seed, field);
    let family = demos::reversed_projectives(field, seed)?;
    let exc = exceptional_check(&family, field, seed)?;
    report.push_axioms(&exc.report);
    report.push("strongly-exceptional", exc.strongly_exceptional, None, None);
    let s = ThetaSystem::new(family, vec![0, 1, 2], seed).map_err(|e| anyhow!("{e}"))?;
    report.push_axioms(&check_theta_system(&s)?);
    let d = build_projective_system(&s)?;
    let mut degenerate = true;
    for i in 0..3 {
        if db_isomorphic(&d.q[i], &s.theta[i], seed)?.is_none() {
            degenerate = false;
        }
    }
    report.push("Q-equals-E", degenerate, None, None);
    let a = endo_algebra(&d.q, true, field)?;
    report.push("endo-dimension", a.alg.dim == 6, None, Some(vec![a.alg.dim]));
    let deltas = a_delta(&a, &s)?;
    let strat = standardly_stratified_check(&a, &deltas, &d, &s)?;
    report.push("standardly-stratified", strat.report.all_pass(), None, None);
    let qh = quasi_hereditary_check(&a, &deltas, seed);
    report.push(
        "quasi-hereditary",
        qh.iter().all(|st| *st == EndoStatus::Division),
        None,
        None,
    );
    Ok(report)
}
