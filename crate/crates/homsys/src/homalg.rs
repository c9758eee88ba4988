//! Ext^1 spaces with explicit cocycle bases, realization of extensions and
//! universal extensions in both directions, trace subrepresentations, and
//! pullback/pushout constructions.
//!
//! Ext^1(M, N) is computed from the arrow cochain: the cokernel of
//! `delta: ⊕_v Hom(M_v, N_v) -> ⊕_a Hom(M_{s(a)}, N_{t(a)})`,
//! `delta(g)_a = g_t M_a - N_a g_s`. A cocycle is an arrow-indexed family of
//! matrices in exactly the shape the extension construction consumes.

use crate::algebra::Projection;
use crate::error::{Error, Result};
use crate::field::{Matrix, Scalar};
use crate::quiver::{hom_basis, quotient_rep, sub_rep, Rep, RepMorphism};

/// Arrow-indexed cocycle: one matrix of shape `dN_{t(a)} x dM_{s(a)}` per
/// arrow.
pub type Cocycle = Vec<Matrix>;

/// The Ext^1 space of a pair of representations with a chosen cocycle basis
/// and the presentation data needed to compute coordinates of classes.
pub struct Ext1Space {
    pub source: Rep,
    pub target: Rep,
    pub dim: usize,
    pub basis: Vec<Cocycle>,
    arrow_shapes: Vec<(usize, usize)>,
    projection: Projection,
}

impl Ext1Space {
    pub fn zero_cocycle(&self) -> Cocycle {
        self.arrow_shapes
            .iter()
            .map(|&(r, c)| Matrix::zero(r, c, self.source.field))
            .collect()
    }

    fn flatten(&self, phi: &Cocycle) -> Vec<Scalar> {
        let mut v = Vec::new();
        for m in phi {
            v.extend(m.vectorize());
        }
        v
    }

    /// Coordinates of a cocycle's class in the chosen basis.
    pub fn class_coordinates(&self, phi: &Cocycle) -> Vec<Scalar> {
        self.projection.project(&self.flatten(phi))
    }

    /// The cocycle representing given class coordinates.
    pub fn cocycle_from_coords(&self, coords: &[Scalar]) -> Cocycle {
        assert_eq!(coords.len(), self.dim);
        let mut acc = self.zero_cocycle();
        for (c, b) in coords.iter().zip(&self.basis) {
            for (am, bm) in acc.iter_mut().zip(b) {
                *am = am.add(&bm.scale(c));
            }
        }
        acc
    }

    /// Pullback of a class along `f: M' -> M` (precomposition arrow-wise).
    pub fn pull(phi: &Cocycle, f: &RepMorphism) -> Cocycle {
        let q = &f.source.quiver;
        q.arrows
            .iter()
            .enumerate()
            .map(|(ai, &(s, _))| phi[ai].mul(&f.blocks[s]))
            .collect()
    }

    /// Pushforward of a class along `g: N -> N'` (postcomposition).
    pub fn push(g: &RepMorphism, phi: &Cocycle) -> Cocycle {
        let q = &g.source.quiver;
        q.arrows
            .iter()
            .enumerate()
            .map(|(ai, &(_, t))| g.blocks[t].mul(&phi[ai]))
            .collect()
    }
}

/// Computes `Ext^1(M, N)` with an explicit cocycle basis.
pub fn ext1_space(m: &Rep, n: &Rep) -> Result<Ext1Space> {
    if m.quiver != n.quiver || m.field != n.field {
        return Err(Error::Mismatch("ext1_space needs one quiver and field".into()));
    }
    let field = m.field;
    let q = &m.quiver;
    let arrow_shapes: Vec<(usize, usize)> = q
        .arrows
        .iter()
        .map(|&(s, t)| (n.dims[t], m.dims[s]))
        .collect();
    let c1_dim: usize = arrow_shapes.iter().map(|&(r, c)| r * c).sum();
    // columns of delta: one per entry of each g_v
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for v in 0..q.vertices {
        for i in 0..n.dims[v] {
            for j in 0..m.dims[v] {
                // g = elementary matrix E_ij at vertex v
                let mut img = vec![field.zero(); c1_dim];
                let mut off = 0usize;
                for (ai, &(s, t)) in q.arrows.iter().enumerate() {
                    let (rows, colsn) = arrow_shapes[ai];
                    if t == v {
                        // (g_t M_a)[i][jj] = M_a[j][jj]
                        for jj in 0..colsn {
                            let c = m.maps[ai].at(j, jj);
                            if !c.is_zero() {
                                img[off + i * colsn + jj] = img[off + i * colsn + jj].add(c);
                            }
                        }
                    }
                    if s == v {
                        // -(N_a g_s)[ii][j] = -N_a[ii][i]
                        for ii in 0..rows {
                            let c = n.maps[ai].at(ii, i);
                            if !c.is_zero() {
                                img[off + ii * colsn + j] = img[off + ii * colsn + j].sub(c);
                            }
                        }
                    }
                    off += rows * colsn;
                }
                cols.push(img);
            }
        }
    }
    let delta = Matrix::from_cols(&cols, c1_dim, field);
    let image = delta.image_basis();
    let projection = Projection::new(field, c1_dim, &image);
    let dim = projection.complement.len();
    // basis cocycles: the chosen complement vectors, reshaped arrow-wise
    let mut basis = Vec::with_capacity(dim);
    for comp in &projection.complement {
        let mut cocycle = Vec::with_capacity(q.arrows.len());
        let mut off = 0usize;
        for &(rows, colsn) in &arrow_shapes {
            cocycle.push(Matrix::from_fn(rows, colsn, field, |r, c| comp[off + r * colsn + c].clone()));
            off += rows * colsn;
        }
        basis.push(cocycle);
    }
    Ok(Ext1Space { source: m.clone(), target: n.clone(), dim, basis, arrow_shapes, projection })
}

/// A short exact sequence `0 -> sub -> mid -> quo -> 0` of representations.
#[derive(Debug, Clone)]
pub struct ShortExactSeq {
    pub sub: Rep,
    pub mid: Rep,
    pub quo: Rep,
    pub incl: RepMorphism,
    pub proj: RepMorphism,
}

impl ShortExactSeq {
    /// Vertex-wise exactness: inclusion injective, projection surjective,
    /// the composite zero and the ranks matching.
    pub fn verify(&self) -> Result<()> {
        self.incl.check()?;
        self.proj.check()?;
        if !self.incl.is_injective() {
            return Err(Error::Internal("sequence inclusion is not injective".into()));
        }
        if !self.proj.is_surjective() {
            return Err(Error::Internal("sequence projection is not surjective".into()));
        }
        if !self.proj.compose(&self.incl).is_zero() {
            return Err(Error::Internal("projection . inclusion is nonzero".into()));
        }
        for v in 0..self.mid.quiver.vertices {
            if self.sub.dims[v] + self.quo.dims[v] != self.mid.dims[v] {
                return Err(Error::Internal("sequence dimensions do not add up".into()));
            }
        }
        Ok(())
    }

    /// The identity sequence `0 -> 0 -> C -> C -> 0`.
    pub fn identity(c: &Rep) -> Self {
        let zero = Rep::zero(c.quiver.clone(), c.field);
        ShortExactSeq {
            sub: zero.clone(),
            mid: c.clone(),
            quo: c.clone(),
            incl: RepMorphism::zero(&zero, c),
            proj: c.identity(),
        }
    }

    /// Split sequence `0 -> A -> A + C -> C -> 0`.
    pub fn split(a: &Rep, c: &Rep) -> Self {
        realize_extension(&zero_cocycle_for(c, a), c, a).expect("zero cocycle always realizes")
    }
}

/// The zero cocycle in the shape of the pair `(M, N)`.
pub fn zero_cocycle_for(m: &Rep, n: &Rep) -> Cocycle {
    m.quiver
        .arrows
        .iter()
        .map(|&(s, t)| Matrix::zero(n.dims[t], m.dims[s], m.field))
        .collect()
}

/// Realizes a cocycle as the extension `0 -> N -> E -> M -> 0` with middle
/// term `E_v = N_v + M_v` and arrow maps `[[N_a, phi_a], [0, M_a]]`.
pub fn realize_extension(phi: &Cocycle, m: &Rep, n: &Rep) -> Result<ShortExactSeq> {
    let field = m.field;
    let q = &m.quiver;
    if phi.len() != q.arrows.len() {
        return Err(Error::Shape("cocycle arrow count mismatch".into()));
    }
    for (ai, &(s, t)) in q.arrows.iter().enumerate() {
        if phi[ai].rows != n.dims[t] || phi[ai].cols != m.dims[s] {
            return Err(Error::Shape(format!("cocycle block {ai} has wrong shape")));
        }
    }
    let dims: Vec<usize> = (0..q.vertices).map(|v| n.dims[v] + m.dims[v]).collect();
    let maps: Vec<Matrix> = q
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| {
            let top = n.maps[ai].hstack(&phi[ai]);
            let bottom = Matrix::zero(m.dims[t], n.dims[s], field).hstack(&m.maps[ai]);
            top.vstack(&bottom)
        })
        .collect();
    let mid = Rep { quiver: q.clone(), field, dims, maps };
    let incl_blocks = (0..q.vertices)
        .map(|v| {
            Matrix::identity(n.dims[v], field).vstack(&Matrix::zero(m.dims[v], n.dims[v], field))
        })
        .collect();
    let proj_blocks = (0..q.vertices)
        .map(|v| {
            Matrix::zero(m.dims[v], n.dims[v], field).hstack(&Matrix::identity(m.dims[v], field))
        })
        .collect();
    let ses = ShortExactSeq {
        sub: n.clone(),
        mid: mid.clone(),
        quo: m.clone(),
        incl: RepMorphism { source: n.clone(), target: mid.clone(), blocks: incl_blocks },
        proj: RepMorphism { source: mid, target: m.clone(), blocks: proj_blocks },
    };
    ses.verify()?;
    Ok(ses)
}

/// Connecting class of a short exact sequence, as a cocycle for
/// `(quo, sub)`. Round-trips with `realize_extension` on class coordinates.
pub fn connecting_class(ses: &ShortExactSeq) -> Cocycle {
    let field = ses.mid.field;
    let q = &ses.mid.quiver;
    // vertex-wise section of proj and retraction of incl
    let mut sections = Vec::with_capacity(q.vertices);
    let mut retractions = Vec::with_capacity(q.vertices);
    for v in 0..q.vertices {
        let pv = &ses.proj.blocks[v];
        let iv = &ses.incl.blocks[v];
        let sv = pv
            .solve_matrix(&Matrix::identity(ses.quo.dims[v], field))
            .expect("projection is surjective");
        let basis = iv.hstack(&sv);
        let inv = basis.inverse().expect("sub + section spans the middle");
        let rv = Matrix::from_fn(ses.sub.dims[v], ses.mid.dims[v], field, |r, c| inv.at(r, c).clone());
        sections.push(sv);
        retractions.push(rv);
    }
    q.arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| {
            let drift = ses.mid.maps[ai]
                .mul(&sections[s])
                .sub(&sections[t].mul(&ses.quo.maps[ai]));
            retractions[t].mul(&drift)
        })
        .collect()
}

/// Indecomposable summands of `a` flattened with multiplicity, in a
/// deterministic order.
fn summand_copies(a: &Rep) -> Result<Vec<Rep>> {
    let d = crate::quiver::decompose(a, 0)?;
    let mut out = Vec::new();
    for (rep, mult) in d.summands {
        for _ in 0..mult {
            out.push(rep.clone());
        }
    }
    Ok(out)
}

/// Universal extension killing `Ext^1(C, A)` from the left:
/// `0 -> T -> E -> C -> 0` where `T` carries one copy of the relevant
/// indecomposable summand of `A` per basis cocycle (so `n = dim Ext^1(C, A)`
/// cocycles stacked diagonally). Degenerate case `n = 0` returns the
/// identity sequence. The middle term satisfies `Ext^1(E, A) = 0` whenever
/// `Ext^1(A, A) = 0`, and that implication is checked.
pub fn universal_extension_left(c: &Rep, a: &Rep) -> Result<(ShortExactSeq, usize)> {
    let n = ext1_space(c, a)?.dim;
    if n == 0 {
        return Ok((ShortExactSeq::identity(c), 0));
    }
    // one block per basis cocycle of Ext^1(C, sigma), per summand copy sigma
    let mut sub = Rep::zero(c.quiver.clone(), c.field);
    let mut cocycle_rows: Vec<Cocycle> = Vec::new();
    let mut total = 0usize;
    for sigma in summand_copies(a)? {
        let ext = ext1_space(c, &sigma)?;
        for k in 0..ext.dim {
            sub = sub.direct_sum(&sigma);
            cocycle_rows.push(ext.basis[k].clone());
            total += 1;
        }
    }
    if total != n {
        return Err(Error::Internal("per-summand cocycle bases do not add up to Ext^1(C, A)".into()));
    }
    let stacked: Cocycle = c
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| {
            let mut m = Matrix::zero(0, c.dims[s], c.field);
            for row in &cocycle_rows {
                m = m.vstack(&row[ai]);
            }
            debug_assert_eq!(m.rows, sub.dims[t]);
            m
        })
        .collect();
    let ses = realize_extension(&stacked, c, &sub)?;
    if ext1_space(a, a)?.dim == 0 {
        let killed = ext1_space(&ses.mid, a)?;
        if killed.dim != 0 {
            return Err(Error::Internal(
                "universal extension failed to kill Ext^1(E, A) despite Ext^1(A, A) = 0".into(),
            ));
        }
    }
    Ok((ses, n))
}

/// Universal extension killing `Ext^1(theta, -)` from the right:
/// `0 -> N -> N_t -> T -> 0` with one copy of the relevant summand of
/// `theta` per basis cocycle (`m = dim Ext^1(theta, N)` in total), and
/// `Ext^1(theta, N_t) = 0` unconditionally (checked).
pub fn universal_extension_right(n: &Rep, theta: &Rep) -> Result<(ShortExactSeq, usize)> {
    let m = ext1_space(theta, n)?.dim;
    if m == 0 {
        return Ok((ShortExactSeq::identity(n), 0));
    }
    let mut quo = Rep::zero(n.quiver.clone(), n.field);
    let mut cocycle_cols: Vec<Cocycle> = Vec::new();
    let mut total = 0usize;
    for sigma in summand_copies(theta)? {
        let ext = ext1_space(&sigma, n)?;
        for k in 0..ext.dim {
            quo = quo.direct_sum(&sigma);
            cocycle_cols.push(ext.basis[k].clone());
            total += 1;
        }
    }
    if total != m {
        return Err(Error::Internal("per-summand cocycle bases do not add up to Ext^1(theta, N)".into()));
    }
    let stacked: Cocycle = n
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| {
            let mut mat = Matrix::zero(n.dims[t], 0, n.field);
            for col in &cocycle_cols {
                mat = mat.hstack(&col[ai]);
            }
            debug_assert_eq!(mat.cols, quo.dims[s]);
            mat
        })
        .collect();
    let ses = realize_extension(&stacked, &quo, n)?;
    let killed = ext1_space(theta, &ses.mid)?;
    if killed.dim != 0 {
        return Err(Error::Internal("universal extension failed to kill Ext^1(theta, N_t)".into()));
    }
    Ok((ses, m))
}

/// Trace of `M` in `N`: the subrepresentation generated by the images of
/// all morphisms `M -> N`, with its inclusion.
pub fn trace(m: &Rep, n: &Rep) -> Result<(Rep, RepMorphism)> {
    let homs = hom_basis(m, n)?;
    let field = n.field;
    let bases: Vec<Matrix> = (0..n.quiver.vertices)
        .map(|v| {
            let mut stacked = Matrix::zero(n.dims[v], 0, field);
            for f in &homs {
                stacked = stacked.hstack(&f.blocks[v]);
            }
            Matrix::from_cols(&stacked.image_basis(), n.dims[v], field)
        })
        .collect();
    Ok(sub_rep(n, &bases))
}

/// Pullback of `f: X -> Z`, `g: Y -> Z`: the subrepresentation of `X + Y`
/// where both maps agree, with the two projections.
pub fn pullback(f: &RepMorphism, g: &RepMorphism) -> (Rep, RepMorphism, RepMorphism) {
    assert_eq!(f.target.dims, g.target.dims);
    let x = &f.source;
    let y = &g.source;
    let field = x.field;
    let xy = x.direct_sum(y);
    let bases: Vec<Matrix> = (0..x.quiver.vertices)
        .map(|v| {
            let big = f.blocks[v].hstack(&g.blocks[v].neg());
            Matrix::from_cols(&big.kernel_basis(), xy.dims[v], field)
        })
        .collect();
    let (p, incl) = sub_rep(&xy, &bases);
    let to_x = RepMorphism {
        source: p.clone(),
        target: x.clone(),
        blocks: (0..x.quiver.vertices)
            .map(|v| Matrix::from_fn(x.dims[v], p.dims[v], field, |r, c| incl.blocks[v].at(r, c).clone()))
            .collect(),
    };
    let to_y = RepMorphism {
        source: p.clone(),
        target: y.clone(),
        blocks: (0..x.quiver.vertices)
            .map(|v| {
                Matrix::from_fn(y.dims[v], p.dims[v], field, |r, c| {
                    incl.blocks[v].at(x.dims[v] + r, c).clone()
                })
            })
            .collect(),
    };
    debug_assert!(to_x.check().is_ok() && to_y.check().is_ok());
    (p, to_x, to_y)
}

/// Pushout of `f: Z -> X`, `g: Z -> Y`: the quotient of `X + Y` by the
/// antidiagonal image of `Z`, with the two maps into it.
pub fn pushout(f: &RepMorphism, g: &RepMorphism) -> (Rep, RepMorphism, RepMorphism) {
    assert_eq!(f.source.dims, g.source.dims);
    let x = &f.target;
    let y = &g.target;
    let field = x.field;
    let xy = x.direct_sum(y);
    let bases: Vec<Matrix> = (0..x.quiver.vertices)
        .map(|v| {
            let anti = f.blocks[v].vstack(&g.blocks[v].neg());
            Matrix::from_cols(&anti.image_basis(), xy.dims[v], field)
        })
        .collect();
    let (po, proj) = quotient_rep(&xy, &bases);
    let from_x = RepMorphism {
        source: x.clone(),
        target: po.clone(),
        blocks: (0..x.quiver.vertices)
            .map(|v| Matrix::from_fn(po.dims[v], x.dims[v], field, |r, c| proj.blocks[v].at(r, c).clone()))
            .collect(),
    };
    let from_y = RepMorphism {
        source: y.clone(),
        target: po.clone(),
        blocks: (0..x.quiver.vertices)
            .map(|v| {
                Matrix::from_fn(po.dims[v], y.dims[v], field, |r, c| {
                    proj.blocks[v].at(r, x.dims[v] + c).clone()
                })
            })
            .collect(),
    };
    debug_assert!(from_x.check().is_ok() && from_y.check().is_ok());
    (po, from_x, from_y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{is_isomorphic, special_rep, Quiver, SpecialKind};
    use std::sync::Arc;

    use crate::field::FieldCfg;
    const QQ: FieldCfg = FieldCfg::Rational;

    fn a3() -> Arc<Quiver> {
        Quiver::linear(3)
    }
    fn p(v: usize) -> Rep {
        special_rep(&a3(), QQ, SpecialKind::Projective, v)
    }
    fn i(v: usize) -> Rep {
        special_rep(&a3(), QQ, SpecialKind::Injective, v)
    }
    fn s(v: usize) -> Rep {
        special_rep(&a3(), QQ, SpecialKind::Simple, v)
    }

    #[test]
    fn ext_dimensions() {
        // the arrow 1->2 forces a one-dimensional Ext^1(S1, S2)
        assert_eq!(ext1_space(&s(0), &s(1)).unwrap().dim, 1);
        assert_eq!(ext1_space(&s(1), &s(0)).unwrap().dim, 0);
        // projectives have no extensions on the left
        for v in 0..3 {
            for w in 0..3 {
                assert_eq!(ext1_space(&p(v), &s(w)).unwrap().dim, 0);
                assert_eq!(ext1_space(&p(v), &p(w)).unwrap().dim, 0);
            }
        }
        assert_eq!(ext1_space(&i(1), &i(1)).unwrap().dim, 0);
    }

    #[test]
    fn euler_identity_cross_check() {
        use crate::quiver::{euler_form, hom_basis, random_rep};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..25 {
            let m = random_rep(&a3(), QQ, 3, &mut rng);
            let n = random_rep(&a3(), QQ, 3, &mut rng);
            let h = hom_basis(&m, &n).unwrap().len() as i64;
            let e = ext1_space(&m, &n).unwrap().dim as i64;
            assert_eq!(h - e, euler_form(&a3(), &m.dims, &n.dims).unwrap());
        }
    }

    #[test]
    fn realize_zero_is_split() {
        let ses = ShortExactSeq::split(&s(0), &s(1));
        ses.verify().unwrap();
        assert_eq!(ses.mid.dims, vec![1, 1, 0]);
        assert!(ses.mid.maps[0].is_zero());
    }

    #[test]
    fn realize_basis_cocycles() {
        // the nonsplit extension of S1 by S2 is I(2)
        let ext = ext1_space(&s(0), &s(1)).unwrap();
        let ses = realize_extension(&ext.basis[0], &s(0), &s(1)).unwrap();
        ses.verify().unwrap();
        assert!(is_isomorphic(&ses.mid, &i(1), 2).unwrap().is_yes());
        // the nonsplit extension of S2 by S3 is P(2)
        let ext = ext1_space(&s(1), &s(2)).unwrap();
        let ses = realize_extension(&ext.basis[0], &s(1), &s(2)).unwrap();
        assert!(is_isomorphic(&ses.mid, &p(1), 2).unwrap().is_yes());
    }

    #[test]
    fn connecting_class_round_trip() {
        let pairs = [(s(0), s(1)), (s(1), s(2)), (i(2), s(1))];
        for (m, n) in pairs {
            let ext = ext1_space(&m, &n).unwrap();
            for k in 0..ext.dim {
                let ses = realize_extension(&ext.basis[k], &m, &n).unwrap();
                let back = connecting_class(&ses);
                let coords = ext.class_coordinates(&back);
                let expected: Vec<Scalar> =
                    (0..ext.dim).map(|j| QQ.from_i64(i64::from(j == k))).collect();
                assert_eq!(coords, expected);
            }
        }
    }

    #[test]
    fn universal_extension_left_examples() {
        // Ext vanishes: identity sequence
        let (ses, n) = universal_extension_left(&s(1), &s(0)).unwrap();
        assert_eq!(n, 0);
        assert!(ses.sub.is_zero());
        // C = S1, A = S2: n = 1, E = I(2), Ext^1(E, S2) = 0
        let (ses, n) = universal_extension_left(&s(0), &s(1)).unwrap();
        assert_eq!(n, 1);
        assert!(is_isomorphic(&ses.mid, &i(1), 3).unwrap().is_yes());
        assert_eq!(ext1_space(&ses.mid, &s(1)).unwrap().dim, 0);
        // doubled target: n = 2, middle dims (1,2,0)
        let (ses, n) = universal_extension_left(&s(0), &s(1).direct_sum(&s(1))).unwrap();
        assert_eq!(n, 2);
        assert_eq!(ses.mid.dims, vec![1, 2, 0]);
        assert_eq!(ext1_space(&ses.mid, &s(1)).unwrap().dim, 0);
    }

    #[test]
    fn universal_extension_right_examples() {
        let (ses, m) = universal_extension_right(&s(1), &s(2)).unwrap();
        assert_eq!(m, 0);
        assert_eq!(ses.mid.dims, s(1).dims);
        // N = S2, theta = S1: m = 1, middle = I(2), Ext^1(S1, I2) = 0
        let (ses, m) = universal_extension_right(&s(1), &s(0)).unwrap();
        assert_eq!(m, 1);
        assert!(is_isomorphic(&ses.mid, &i(1), 3).unwrap().is_yes());
        assert_eq!(ext1_space(&s(0), &ses.mid).unwrap().dim, 0);
        // N = S3, theta = S2: middle = P(2)
        let (ses, m) = universal_extension_right(&s(2), &s(1)).unwrap();
        assert_eq!(m, 1);
        assert!(is_isomorphic(&ses.mid, &p(1), 3).unwrap().is_yes());
    }

    #[test]
    fn trace_examples() {
        // trace of P(2) in P(1) is the (0,1,1) subrepresentation
        let (tr, incl) = trace(&p(1), &p(0)).unwrap();
        assert_eq!(tr.dims, vec![0, 1, 1]);
        assert!(incl.is_injective());
        // trace(M, M) = M
        let (tr, _) = trace(&p(0), &p(0)).unwrap();
        assert_eq!(tr.dims, p(0).dims);
        // the socle of P(1) is S(3), so S(3) has nonzero trace there,
        // while S(2) admits no nonzero map into P(1)
        let (tr, _) = trace(&s(2), &p(0)).unwrap();
        assert_eq!(tr.dims, vec![0, 0, 1]);
        let (tr, _) = trace(&s(1), &p(0)).unwrap();
        assert!(tr.is_zero());
        // idempotence
        let (tr1, _) = trace(&p(1), &p(0)).unwrap();
        let (tr2, _) = trace(&p(1), &tr1).unwrap();
        assert_eq!(tr2.dims, tr1.dims);
    }

    #[test]
    fn pullback_pushout_shapes() {
        // pull the extension 0 -> S2 -> I2 -> S1 -> 0 back along id
        let ext = ext1_space(&s(0), &s(1)).unwrap();
        let ses = realize_extension(&ext.basis[0], &s(0), &s(1)).unwrap();
        let (pb, to_mid, to_quo) = pullback(&ses.proj, &s(0).identity());
        assert_eq!(pb.dims, ses.mid.dims);
        assert!(to_mid.is_injective() && to_mid.is_surjective());
        assert!(to_quo.is_surjective());
        let (po, from_x, _) = pushout(&ses.incl, &ses.incl);
        assert_eq!(po.total_dim(), ses.mid.total_dim() * 2 - ses.sub.total_dim());
        from_x.check().unwrap();
    }
}
