//! Acyclic quivers, their finite-dimensional representations over an exact
//! field, morphism spaces, vertex-wise (co)kernels and Krull-Schmidt
//! decomposition.
//!
//! Conventions: representations are covariant (an arrow `a: s -> t` acts by
//! a matrix of shape `d_t x d_s` on column vectors); the projective at a
//! vertex is spanned by the paths starting there, the injective by the
//! paths ending there.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, StructAlgebra};
use crate::error::{Error, Result};
use crate::field::{FieldCfg, Matrix, Scalar};
use crate::poly;

/// A finite quiver with vertices `0..n`, required to be acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: usize,
    /// (source, target) per arrow.
    pub arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<(usize, usize)>) -> Result<Arc<Self>> {
        for &(s, t) in &arrows {
            if s >= vertices || t >= vertices {
                return Err(Error::Shape(format!("arrow ({s},{t}) out of range")));
            }
        }
        let q = Quiver { vertices, arrows };
        q.topological_order()?;
        Ok(Arc::new(q))
    }

    /// Topological order of the vertices; errors on a directed cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indeg = vec![0usize; self.vertices];
        for &(_, t) in &self.arrows {
            indeg[t] += 1;
        }
        let mut queue: Vec<usize> = (0..self.vertices).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.vertices);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &(s, t) in &self.arrows {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push(t);
                    }
                }
            }
        }
        if order.len() != self.vertices {
            return Err(Error::Cyclic("directed cycle detected".into()));
        }
        Ok(order)
    }

    /// Linear A_n quiver `0 -> 1 -> ... -> n-1`.
    pub fn linear(n: usize) -> Arc<Self> {
        Quiver::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()).unwrap()
    }

    /// D4 with central vertex 1: arrows 0->1, 1->2, 1->3.
    pub fn d4() -> Arc<Self> {
        Quiver::new(4, vec![(0, 1), (1, 2), (1, 3)]).unwrap()
    }

    /// All directed paths from `from` to `to`, each a list of arrow indices
    /// in traversal order. The trivial path appears when `from == to`.
    pub fn paths(&self, from: usize, to: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(from, Vec::new())];
        while let Some((v, path)) = stack.pop() {
            if v == to {
                out.push(path.clone());
            }
            for (ai, &(s, t)) in self.arrows.iter().enumerate() {
                if s == v {
                    let mut next = path.clone();
                    next.push(ai);
                    stack.push((t, next));
                }
            }
        }
        out.sort();
        out
    }

    pub fn reversed(&self) -> Arc<Quiver> {
        Quiver::new(self.vertices, self.arrows.iter().map(|&(s, t)| (t, s)).collect())
            .expect("reversing preserves acyclicity")
    }
}

/// A representation: one space per vertex, one matrix per arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rep {
    pub quiver: Arc<Quiver>,
    pub field: FieldCfg,
    pub dims: Vec<usize>,
    pub maps: Vec<Matrix>,
}

impl Rep {
    pub fn new(quiver: Arc<Quiver>, field: FieldCfg, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        if dims.len() != quiver.vertices || maps.len() != quiver.arrows.len() {
            return Err(Error::Shape("dimension or map count does not match the quiver".into()));
        }
        for (ai, &(s, t)) in quiver.arrows.iter().enumerate() {
            let m = &maps[ai];
            if m.rows != dims[t] || m.cols != dims[s] {
                return Err(Error::Shape(format!(
                    "arrow {ai} needs a {}x{} matrix, got {}x{}",
                    dims[t], dims[s], m.rows, m.cols
                )));
            }
            if m.field != field {
                return Err(Error::Mismatch("matrix field differs from the representation field".into()));
            }
        }
        Ok(Rep { quiver, field, dims, maps })
    }

    pub fn zero(quiver: Arc<Quiver>, field: FieldCfg) -> Self {
        let dims = vec![0; quiver.vertices];
        let maps = quiver
            .arrows
            .iter()
            .map(|_| Matrix::zero(0, 0, field))
            .collect();
        Rep { quiver, field, dims, maps }
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn direct_sum(&self, rhs: &Rep) -> Rep {
        assert_eq!(self.quiver, rhs.quiver);
        let dims = self.dims.iter().zip(&rhs.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&rhs.maps)
            .map(|(a, b)| a.block_diag(b))
            .collect();
        Rep { quiver: self.quiver.clone(), field: self.field, dims, maps }
    }

    pub fn direct_power(&self, n: usize) -> Rep {
        let mut acc = Rep::zero(self.quiver.clone(), self.field);
        for _ in 0..n {
            acc = acc.direct_sum(self);
        }
        acc
    }

    /// Identity endomorphism.
    pub fn identity(&self) -> RepMorphism {
        let blocks = self.dims.iter().map(|&d| Matrix::identity(d, self.field)).collect();
        RepMorphism { source: self.clone(), target: self.clone(), blocks }
    }

    /// The k-dual representation over the reversed quiver (matrices
    /// transposed arrow-wise).
    pub fn dual(&self, reversed: &Arc<Quiver>) -> Rep {
        assert_eq!(reversed.vertices, self.quiver.vertices);
        let maps = self.maps.iter().map(Matrix::transpose).collect();
        Rep { quiver: reversed.clone(), field: self.field, dims: self.dims.clone(), maps }
    }
}

/// Kinds of distinguished representations attached to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialKind {
    Projective,
    Injective,
    Simple,
}

/// Indecomposable projective/injective/simple at a vertex, with 0/1
/// path-composition matrices.
pub fn special_rep(quiver: &Arc<Quiver>, field: FieldCfg, kind: SpecialKind, v: usize) -> Rep {
    assert!(v < quiver.vertices);
    match kind {
        SpecialKind::Simple => {
            let dims: Vec<usize> = (0..quiver.vertices).map(|w| usize::from(w == v)).collect();
            let maps = quiver
                .arrows
                .iter()
                .map(|&(s, t)| Matrix::zero(dims[t], dims[s], field))
                .collect();
            Rep { quiver: quiver.clone(), field, dims, maps }
        }
        SpecialKind::Projective => {
            let bases: Vec<Vec<Vec<usize>>> = (0..quiver.vertices).map(|w| quiver.paths(v, w)).collect();
            let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
            let maps = quiver
                .arrows
                .iter()
                .enumerate()
                .map(|(ai, &(s, t))| {
                    Matrix::from_fn(dims[t], dims[s], field, |r, c| {
                        // does appending arrow ai to the c-th path give the r-th?
                        let mut extended = bases[s][c].clone();
                        extended.push(ai);
                        if bases[t][r] == extended { field.one() } else { field.zero() }
                    })
                })
                .collect();
            Rep { quiver: quiver.clone(), field, dims, maps }
        }
        SpecialKind::Injective => {
            let bases: Vec<Vec<Vec<usize>>> = (0..quiver.vertices).map(|w| quiver.paths(w, v)).collect();
            let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
            let maps = quiver
                .arrows
                .iter()
                .enumerate()
                .map(|(ai, &(s, t))| {
                    Matrix::from_fn(dims[t], dims[s], field, |r, c| {
                        // dual of precomposition: the c-th path (s -> v)
                        // equals arrow ai followed by the r-th path (t -> v)
                        let mut extended = vec![ai];
                        extended.extend(bases[t][r].iter().copied());
                        if bases[s][c] == extended { field.one() } else { field.zero() }
                    })
                })
                .collect();
            Rep { quiver: quiver.clone(), field, dims, maps }
        }
    }
}

/// Euler form of two dimension vectors:
/// `sum_v d_v e_v - sum_{a: s->t} d_s e_t`.
pub fn euler_form(quiver: &Quiver, d: &[usize], e: &[usize]) -> Result<i64> {
    if d.len() != quiver.vertices || e.len() != quiver.vertices {
        return Err(Error::Shape("dimension vector does not match the quiver".into()));
    }
    let mut acc: i64 = 0;
    for v in 0..quiver.vertices {
        acc += d[v] as i64 * e[v] as i64;
    }
    for &(s, t) in &quiver.arrows {
        acc -= d[s] as i64 * e[t] as i64;
    }
    Ok(acc)
}

/// A morphism of representations: a matrix per vertex satisfying the
/// commutation constraint `f_t M_a = N_a f_s` for every arrow exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMorphism {
    pub source: Rep,
    pub target: Rep,
    pub blocks: Vec<Matrix>,
}

impl RepMorphism {
    pub fn zero(source: &Rep, target: &Rep) -> Self {
        let blocks = (0..source.quiver.vertices)
            .map(|v| Matrix::zero(target.dims[v], source.dims[v], source.field))
            .collect();
        RepMorphism { source: source.clone(), target: target.clone(), blocks }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn check(&self) -> Result<()> {
        for (ai, &(s, t)) in self.source.quiver.arrows.iter().enumerate() {
            let lhs = self.blocks[t].mul(&self.source.maps[ai]);
            let rhs = self.target.maps[ai].mul(&self.blocks[s]);
            if lhs != rhs {
                return Err(Error::Internal(format!("commutation fails on arrow {ai}")));
            }
        }
        Ok(())
    }

    pub fn compose(&self, inner: &RepMorphism) -> RepMorphism {
        assert_eq!(inner.target.dims, self.source.dims);
        let blocks = self
            .blocks
            .iter()
            .zip(&inner.blocks)
            .map(|(a, b)| a.mul(b))
            .collect();
        RepMorphism { source: inner.source.clone(), target: self.target.clone(), blocks }
    }

    pub fn add(&self, rhs: &RepMorphism) -> RepMorphism {
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a.add(b)).collect();
        RepMorphism { source: self.source.clone(), target: self.target.clone(), blocks }
    }

    pub fn scale(&self, s: &Scalar) -> RepMorphism {
        let blocks = self.blocks.iter().map(|b| b.scale(s)).collect();
        RepMorphism { source: self.source.clone(), target: self.target.clone(), blocks }
    }

    pub fn neg(&self) -> RepMorphism {
        let blocks = self.blocks.iter().map(Matrix::neg).collect();
        RepMorphism { source: self.source.clone(), target: self.target.clone(), blocks }
    }

    pub fn is_invertible(&self) -> bool {
        self.source.dims == self.target.dims && self.blocks.iter().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<RepMorphism> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            blocks.push(b.inverse()?);
        }
        Some(RepMorphism { source: self.target.clone(), target: self.source.clone(), blocks })
    }

    /// Vertex-wise injectivity.
    pub fn is_injective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols)
    }

    /// Vertex-wise surjectivity.
    pub fn is_surjective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows)
    }

    pub fn block_diag_total(&self) -> Matrix {
        let mut acc = Matrix::zero(0, 0, self.source.field);
        for b in &self.blocks {
            acc = acc.block_diag(b);
        }
        acc
    }

    pub fn dual(&self, reversed: &Arc<Quiver>) -> RepMorphism {
        RepMorphism {
            source: self.target.dual(reversed),
            target: self.source.dual(reversed),
            blocks: self.blocks.iter().map(Matrix::transpose).collect(),
        }
    }
}

/// Basis of the morphism space `Hom(M, N)` as the kernel of the block
/// commutation-constraint system.
pub fn hom_basis(m: &Rep, n: &Rep) -> Result<Vec<RepMorphism>> {
    if m.quiver != n.quiver {
        return Err(Error::Mismatch("hom_basis needs representations of one quiver".into()));
    }
    if m.field != n.field {
        return Err(Error::Mismatch("hom_basis needs one scalar field".into()));
    }
    let field = m.field;
    let q = &m.quiver;
    // unknown layout: per vertex, row-major entries of f_v (n.dims[v] x m.dims[v])
    let mut offset = vec![0usize; q.vertices + 1];
    for v in 0..q.vertices {
        offset[v + 1] = offset[v] + n.dims[v] * m.dims[v];
    }
    let unknowns = offset[q.vertices];
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (ai, &(s, t)) in q.arrows.iter().enumerate() {
        let ma = &m.maps[ai];
        let na = &n.maps[ai];
        for i in 0..n.dims[t] {
            for j in 0..m.dims[s] {
                let mut row = vec![field.zero(); unknowns];
                // (f_t M_a)[i][j] = sum_k f_t[i][k] * M_a[k][j]
                for k in 0..m.dims[t] {
                    let c = ma.at(k, j);
                    if !c.is_zero() {
                        let idx = offset[t] + i * m.dims[t] + k;
                        row[idx] = row[idx].add(c);
                    }
                }
                // -(N_a f_s)[i][j] = -sum_l N_a[i][l] * f_s[l][j]
                for l in 0..n.dims[s] {
                    let c = na.at(i, l);
                    if !c.is_zero() {
                        let idx = offset[s] + l * m.dims[s] + j;
                        row[idx] = row[idx].sub(c);
                    }
                }
                rows.push(row);
            }
        }
    }
    let constraint = Matrix::from_rows(rows, unknowns, field);
    let kernel = constraint.kernel_basis();
    let mut out = Vec::with_capacity(kernel.len());
    for vecu in kernel {
        let blocks = (0..q.vertices)
            .map(|v| {
                Matrix::from_fn(n.dims[v], m.dims[v], field, |i, j| {
                    vecu[offset[v] + i * m.dims[v] + j].clone()
                })
            })
            .collect();
        let f = RepMorphism { source: m.clone(), target: n.clone(), blocks };
        debug_assert!(f.check().is_ok());
        out.push(f);
    }
    Ok(out)
}

/// Kernel, image and cokernel of a morphism, with induced arrow maps and
/// the witnessing inclusion/projection morphisms.
pub struct MorphismParts {
    pub kernel: Rep,
    pub kernel_inclusion: RepMorphism,
    pub image: Rep,
    pub image_inclusion: RepMorphism,
    pub cokernel: Rep,
    pub cokernel_projection: RepMorphism,
}

/// Builds the subrepresentation spanned by arrow-invariant vertex-wise
/// subspaces; panics if the spans are not invariant.
pub fn sub_rep(ambient: &Rep, vertex_bases: &[Matrix]) -> (Rep, RepMorphism) {
    let field = ambient.field;
    let dims: Vec<usize> = vertex_bases.iter().map(|b| b.cols).collect();
    let maps: Vec<Matrix> = ambient
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| {
            let pushed = ambient.maps[ai].mul(&vertex_bases[s]);
            vertex_bases[t]
                .solve_matrix(&pushed)
                .expect("vertex spans must be arrow-invariant")
        })
        .collect();
    let sub = Rep { quiver: ambient.quiver.clone(), field, dims, maps };
    let incl = RepMorphism {
        source: sub.clone(),
        target: ambient.clone(),
        blocks: vertex_bases.to_vec(),
    };
    debug_assert!(incl.check().is_ok());
    (sub, incl)
}

/// Builds the quotient representation by an arrow-invariant family of
/// vertex-wise subspaces, returning the projection.
pub fn quotient_rep(ambient: &Rep, vertex_bases: &[Matrix]) -> (Rep, RepMorphism) {
    let field = ambient.field;
    let mut projections = Vec::new();
    let mut sections = Vec::new();
    for (v, b) in vertex_bases.iter().enumerate() {
        let cols: Vec<Vec<Scalar>> = (0..b.cols).map(|c| b.col(c)).collect();
        let proj = crate::algebra::Projection::new(field, ambient.dims[v], &cols);
        let qdim = proj.complement.len();
        let pmat = Matrix::from_fn(qdim, ambient.dims[v], field, |r, c| {
            let mut e = vec![field.zero(); ambient.dims[v]];
            e[c] = field.one();
            proj.project(&e)[r].clone()
        });
        let smat = Matrix::from_cols(&proj.complement, ambient.dims[v], field);
        projections.push(pmat);
        sections.push(smat);
    }
    let dims: Vec<usize> = projections.iter().map(|p| p.rows).collect();
    let maps: Vec<Matrix> = ambient
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, &(s, t))| projections[t].mul(&ambient.maps[ai]).mul(&sections[s]))
        .collect();
    let quo = Rep { quiver: ambient.quiver.clone(), field, dims, maps };
    let proj = RepMorphism { source: ambient.clone(), target: quo.clone(), blocks: projections };
    debug_assert!(proj.check().is_ok());
    (quo, proj)
}

pub fn morphism_parts(f: &RepMorphism) -> MorphismParts {
    let field = f.source.field;
    let nv = f.source.quiver.vertices;
    let mut ker_bases = Vec::with_capacity(nv);
    let mut im_bases = Vec::with_capacity(nv);
    for v in 0..nv {
        let b = &f.blocks[v];
        ker_bases.push(Matrix::from_cols(&b.kernel_basis(), b.cols, field));
        im_bases.push(Matrix::from_cols(&b.image_basis(), b.rows, field));
    }
    let (kernel, kernel_inclusion) = sub_rep(&f.source, &ker_bases);
    let (image, image_inclusion) = sub_rep(&f.target, &im_bases);
    let (cokernel, cokernel_projection) = quotient_rep(&f.target, &im_bases);
    for v in 0..nv {
        debug_assert_eq!(kernel.dims[v] + image.dims[v], f.source.dims[v]);
    }
    MorphismParts { kernel, kernel_inclusion, image, image_inclusion, cokernel, cokernel_projection }
}

/// Result of an isomorphism test.
#[derive(Debug, Clone)]
pub enum IsoResult {
    Yes(RepMorphism),
    No,
    Indeterminate,
}

impl IsoResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, IsoResult::Yes(_))
    }
}

fn rep_order_key(m: &Rep) -> (Vec<usize>, Vec<String>) {
    let entries = m
        .maps
        .iter()
        .flat_map(|mat| {
            (0..mat.rows).flat_map(move |r| (0..mat.cols).map(move |c| mat.at(r, c).to_string()))
        })
        .collect();
    (m.dims.clone(), entries)
}

/// Randomized isomorphism test with certificate. Symmetric by construction:
/// the pair is canonically ordered before searching.
pub fn is_isomorphic(m: &Rep, n: &Rep, seed: u64) -> Result<IsoResult> {
    if m.quiver != n.quiver || m.field != n.field {
        return Err(Error::Mismatch("isomorphism test needs one quiver and field".into()));
    }
    if rep_order_key(n) < rep_order_key(m) {
        return Ok(match is_isomorphic(n, m, seed)? {
            IsoResult::Yes(f) => IsoResult::Yes(f.inverse().expect("iso certificate is invertible")),
            other => other,
        });
    }
    if m.dims != n.dims {
        return Ok(IsoResult::No);
    }
    if m.is_zero() {
        return Ok(IsoResult::Yes(RepMorphism::zero(m, n)));
    }
    let fwd = hom_basis(m, n)?;
    let bwd = hom_basis(n, m)?;
    if fwd.len() != bwd.len() {
        return Ok(IsoResult::No);
    }
    if fwd.is_empty() {
        return Ok(IsoResult::No);
    }
    if hom_basis(m, m)?.len() != hom_basis(n, n)?.len() {
        return Ok(IsoResult::No);
    }
    for f in &fwd {
        if f.is_invertible() {
            return Ok(IsoResult::Yes(f.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    for _ in 0..64 {
        let mut acc = RepMorphism::zero(m, n);
        for f in &fwd {
            let c = m.field.from_i64(rng.gen_range(-5..=5));
            acc = acc.add(&f.scale(&c));
        }
        if acc.is_invertible() {
            return Ok(IsoResult::Yes(acc));
        }
    }
    Ok(IsoResult::Indeterminate)
}

/// One indecomposable summand with multiplicity.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub summands: Vec<(Rep, usize)>,
    /// Isomorphism from the direct sum of the listed summands (with
    /// multiplicity, in order) onto the original representation.
    pub certificate: RepMorphism,
    /// True when every summand carries an indecomposability certificate.
    pub certified: bool,
}

impl Decomposition {
    pub fn total(&self) -> Rep {
        let mut acc: Option<Rep> = None;
        for (rep, mult) in &self.summands {
            for _ in 0..*mult {
                acc = Some(match acc {
                    None => rep.clone(),
                    Some(a) => a.direct_sum(rep),
                });
            }
        }
        acc.unwrap_or_else(|| Rep::zero(self.certificate.target.quiver.clone(), self.certificate.target.field))
    }
}

struct Piece {
    rep: Rep,
    inclusion: RepMorphism, // into the original
    certified: bool,
}

/// Endomorphism algebra of a representation as a based algebra together
/// with its faithful total-matrix representation.
pub fn endo_algebra_of_rep(m: &Rep) -> Result<(StructAlgebra, Vec<Matrix>, Vec<RepMorphism>)> {
    let basis = hom_basis(m, m)?;
    let field = m.field;
    let dim = basis.len();
    let totals: Vec<Matrix> = basis.iter().map(RepMorphism::block_diag_total).collect();
    let total_dim = m.total_dim();
    let stacked = Matrix::from_cols(
        &totals.iter().map(Matrix::vectorize).collect::<Vec<_>>(),
        total_dim * total_dim,
        field,
    );
    let coords_of = |f: &RepMorphism| -> Vec<Scalar> {
        stacked
            .solve(&f.block_diag_total().vectorize())
            .expect("endomorphism lies in the span of the basis")
    };
    let unit = coords_of(&m.identity());
    let alg = StructAlgebra::from_products(dim, field, unit, |a, b| {
        coords_of(&basis[a].compose(&basis[b]))
    });
    Ok((alg, totals, basis))
}

fn try_split_once(x: &Rep, rng: &mut ChaCha8Rng) -> Result<SplitOutcome> {
    let (alg, totals, basis) = endo_algebra_of_rep(x)?;
    if basis.len() <= 1 {
        return Ok(SplitOutcome::Certified);
    }
    // candidate endomorphisms: basis elements then seeded combinations
    let mut candidates: Vec<RepMorphism> = basis.clone();
    for _ in 0..32 {
        let mut acc = RepMorphism::zero(x, x);
        for f in &basis {
            acc = acc.add(&f.scale(&x.field.from_i64(rng.gen_range(-4..=4))));
        }
        candidates.push(acc);
    }
    for phi in &candidates {
        if let Some(parts) = split_by_endo(x, phi) {
            return Ok(SplitOutcome::Split(parts));
        }
    }
    // no elementary split: run the structural analysis
    let analysis = algebra::analyze(&alg, &totals, rng);
    if let Some(e_coords) = analysis.idempotent {
        let mut e = RepMorphism::zero(x, x);
        for (c, f) in e_coords.iter().zip(&basis) {
            e = e.add(&f.scale(c));
        }
        let parts = morphism_parts(&e);
        if !parts.kernel.is_zero() && !parts.image.is_zero() {
            return Ok(SplitOutcome::Split(vec![
                (parts.kernel, parts.kernel_inclusion),
                (parts.image, parts.image_inclusion),
            ]));
        }
    }
    match analysis.is_local {
        Some(true) => Ok(SplitOutcome::Certified),
        Some(false) => {
            // an idempotent exists; keep hunting with fresh randomness
            for _ in 0..256 {
                let mut acc = RepMorphism::zero(x, x);
                for f in &basis {
                    acc = acc.add(&f.scale(&x.field.from_i64(rng.gen_range(-9..=9))));
                }
                if let Some(parts) = split_by_endo(x, &acc) {
                    return Ok(SplitOutcome::Split(parts));
                }
            }
            Err(Error::Internal(
                "endomorphism algebra is not local but no splitting was found".into(),
            ))
        }
        None => Ok(SplitOutcome::Uncertified),
    }
}

enum SplitOutcome {
    Split(Vec<(Rep, RepMorphism)>),
    Certified,
    Uncertified,
}

/// Splits along the coprime factors of the minimal polynomial of an
/// endomorphism; `None` when the minimal polynomial is primary.
fn split_by_endo(x: &Rep, phi: &RepMorphism) -> Option<Vec<(Rep, RepMorphism)>> {
    let total = phi.block_diag_total();
    if total.rows == 0 {
        return None;
    }
    let m = poly::min_poly(&total);
    let factors = poly::coprime_factors(&m);
    if factors.len() < 2 {
        return None;
    }
    let field = x.field;
    let mut out = Vec::new();
    for q in &factors {
        let bases: Vec<Matrix> = (0..x.quiver.vertices)
            .map(|v| {
                let qv = poly::eval_matrix(q, &phi.blocks[v]);
                Matrix::from_cols(&qv.kernel_basis(), x.dims[v], field)
            })
            .collect();
        let (sub, incl) = sub_rep(x, &bases);
        if !sub.is_zero() {
            out.push((sub, incl));
        }
    }
    debug_assert!(out.len() >= 2);
    Some(out)
}

/// Krull-Schmidt decomposition. Over a prime field (large enough for the
/// trace-form radical) the result is complete and certified; over the
/// rationals it is best-effort and flagged when a summand resisted
/// certification.
pub fn decompose(m: &Rep, seed: u64) -> Result<Decomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work: Vec<Piece> = Vec::new();
    let mut done: Vec<Piece> = Vec::new();
    if !m.is_zero() {
        work.push(Piece { rep: m.clone(), inclusion: m.identity(), certified: false });
    }
    while let Some(piece) = work.pop() {
        match try_split_once(&piece.rep, &mut rng)? {
            SplitOutcome::Split(parts) => {
                for (sub, incl) in parts {
                    work.push(Piece {
                        rep: sub,
                        inclusion: piece.inclusion.compose(&incl),
                        certified: false,
                    });
                }
            }
            SplitOutcome::Certified => {
                done.push(Piece { certified: true, ..piece });
            }
            SplitOutcome::Uncertified => {
                done.push(Piece { certified: false, ..piece });
            }
        }
    }
    // deterministic order, then group by isomorphism
    done.sort_by_key(|p| rep_order_key(&p.rep));
    let mut groups: Vec<(Rep, Vec<Piece>)> = Vec::new();
    'outer: for piece in done {
        for (rep, members) in groups.iter_mut() {
            if is_isomorphic(rep, &piece.rep, seed)?.is_yes() {
                members.push(piece);
                continue 'outer;
            }
        }
        groups.push((piece.rep.clone(), vec![piece]));
    }
    let certified = groups.iter().all(|(_, ms)| ms.iter().all(|p| p.certified));
    let summands: Vec<(Rep, usize)> = groups.iter().map(|(rep, ms)| (rep.clone(), ms.len())).collect();
    let total = {
        let mut acc = Rep::zero(m.quiver.clone(), m.field);
        for (rep, members) in &groups {
            for _ in 0..members.len() {
                acc = acc.direct_sum(rep);
            }
        }
        acc
    };
    // each member is isomorphic to its group representative; compose the
    // member inclusion with that isomorphism so the certificate really
    // starts at the direct sum of the listed summands
    let mut cert_blocks: Vec<Matrix> = (0..m.quiver.vertices)
        .map(|v| Matrix::zero(m.dims[v], 0, m.field))
        .collect();
    for (rep, members) in &groups {
        for piece in members {
            let iso = match is_isomorphic(rep, &piece.rep, seed)? {
                IsoResult::Yes(f) => f,
                _ => unreachable!("grouping established the isomorphism"),
            };
            let composed = piece.inclusion.compose(&iso);
            for v in 0..m.quiver.vertices {
                cert_blocks[v] = cert_blocks[v].hstack(&composed.blocks[v]);
            }
        }
    }
    let certificate = RepMorphism { source: total.clone(), target: m.clone(), blocks: cert_blocks };
    if !certificate.is_invertible() {
        return Err(Error::Internal("decomposition certificate is not invertible".into()));
    }
    debug_assert!(certificate.check().is_ok());
    Ok(Decomposition { summands, certificate, certified })
}

/// Seeded random representation with per-vertex dimension at most
/// `max_dim`; useful for probe suites.
pub fn random_rep(quiver: &Arc<Quiver>, field: FieldCfg, max_dim: usize, rng: &mut ChaCha8Rng) -> Rep {
    let dims: Vec<usize> = (0..quiver.vertices).map(|_| rng.gen_range(0..=max_dim)).collect();
    let maps = quiver
        .arrows
        .iter()
        .map(|&(s, t)| Matrix::from_fn(dims[t], dims[s], field, |_, _| field.from_i64(rng.gen_range(-2..=2))))
        .collect();
    Rep { quiver: quiver.clone(), field, dims, maps }
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn cycle_is_rejected() {
        assert!(Quiver::new(1, vec![(0, 0)]).is_err());
        assert!(Quiver::new(2, vec![(0, 1), (1, 0)]).is_err());
    }

    /// Independent path-enumeration oracle: brute recursion over arrow
    /// sequences, not reusing `Quiver::paths`.
    fn count_paths_oracle(q: &Quiver, from: usize, to: usize) -> usize {
        fn go(q: &Quiver, v: usize, to: usize) -> usize {
            let mut acc = usize::from(v == to);
            for &(s, t) in &q.arrows {
                if s == v {
                    acc += go(q, t, to);
                }
            }
            acc
        }
        go(q, from, to)
    }

    #[test]
    fn special_reps_match_path_oracle() {
        let q = a3();
        assert_eq!(p(2).dims, vec![0, 0, 1]);
        assert_eq!(i(1).dims, vec![1, 1, 0]);
        assert_eq!(s(0).dims, vec![1, 0, 0]);
        for v in 0..3 {
            let pv = p(v);
            let iv = i(v);
            for w in 0..3 {
                assert_eq!(pv.dims[w], count_paths_oracle(&q, v, w));
                assert_eq!(iv.dims[w], count_paths_oracle(&q, w, v));
            }
        }
        for v in 0..4 {
            let pd4 = special_rep(&Quiver::d4(), QQ, SpecialKind::Projective, v);
            for w in 0..4 {
                assert_eq!(pd4.dims[w], count_paths_oracle(&Quiver::d4(), v, w));
            }
        }
    }

    #[test]
    fn hom_dimensions_on_a3() {
        // End(S2) is one-dimensional
        assert_eq!(hom_basis(&s(1), &s(1)).unwrap().len(), 1);
        // distinct simples have no morphisms
        assert_eq!(hom_basis(&s(0), &s(1)).unwrap().len(), 0);
        // P(2) embeds in P(1): dimension 1 (0-based: p(1) -> p(0))
        assert_eq!(hom_basis(&p(1), &p(0)).unwrap().len(), 1);
        // no maps the other way
        assert_eq!(hom_basis(&p(0), &p(1)).unwrap().len(), 0);
        // forced by the module structure: the socle of P(1) is S(3)
        assert_eq!(hom_basis(&s(2), &p(0)).unwrap().len(), 1);
        assert_eq!(hom_basis(&s(1), &p(0)).unwrap().len(), 0);
    }

    #[test]
    fn euler_form_examples() {
        let q = a3();
        assert_eq!(euler_form(&q, &[1, 0, 0], &[1, 0, 0]).unwrap(), 1);
        assert_eq!(euler_form(&q, &[1, 0, 0], &[0, 1, 0]).unwrap(), -1);
        assert_eq!(euler_form(&q, &[1, 1, 1], &[0, 0, 1]).unwrap(), 0);
    }

    #[test]
    fn morphism_parts_examples() {
        // identity on P(1): kernel 0, image P(1), cokernel 0
        let id = p(0).identity();
        let parts = morphism_parts(&id);
        assert!(parts.kernel.is_zero());
        assert!(parts.cokernel.is_zero());
        assert_eq!(parts.image.dims, p(0).dims);
        // zero morphism: kernel M, cokernel N
        let z = RepMorphism::zero(&s(0), &s(1));
        let parts = morphism_parts(&z);
        assert_eq!(parts.kernel.dims, s(0).dims);
        assert_eq!(parts.cokernel.dims, s(1).dims);
        // the embedding P(2) -> P(1): kernel 0, cokernel S(1)
        let f = hom_basis(&p(1), &p(0)).unwrap().remove(0);
        let parts = morphism_parts(&f);
        assert!(parts.kernel.is_zero());
        assert!(is_isomorphic(&parts.cokernel, &s(0), 1).unwrap().is_yes());
    }

    #[test]
    fn decompose_examples() {
        // S(1) + S(1): one summand with multiplicity 2
        let m = s(0).direct_sum(&s(0));
        let d = decompose(&m, 5).unwrap();
        assert_eq!(d.summands.len(), 1);
        assert_eq!(d.summands[0].1, 2);
        assert!(d.certificate.is_invertible());
        // P(1) is indecomposable
        let d = decompose(&p(0), 5).unwrap();
        assert_eq!(d.summands.len(), 1);
        assert_eq!(d.summands[0].1, 1);
        assert!(d.certified);
        // I(2) + P(3): two distinct summands
        let m = i(1).direct_sum(&p(2));
        let d = decompose(&m, 5).unwrap();
        assert_eq!(d.summands.len(), 2);
        assert!(d.summands.iter().all(|(_, k)| *k == 1));
        // zero decomposes to the empty list
        let d = decompose(&Rep::zero(a3(), QQ), 5).unwrap();
        assert!(d.summands.is_empty());
    }

    #[test]
    fn decompose_dimension_bookkeeping_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for field in [QQ, FieldCfg::Prime(101)] {
            for _ in 0..12 {
                let m = random_rep(&a3(), field, 3, &mut rng);
                let d = decompose(&m, 3).unwrap();
                let mut total = vec![0usize; 3];
                for (rep, mult) in &d.summands {
                    for v in 0..3 {
                        total[v] += rep.dims[v] * mult;
                    }
                }
                assert_eq!(total, m.dims);
                assert!(d.certificate.is_invertible());
                if field == FieldCfg::Prime(101) {
                    assert!(d.certified, "prime-field decompositions are certified");
                }
            }
        }
    }

    #[test]
    fn iso_examples() {
        assert!(is_isomorphic(&p(1), &p(1), 7).unwrap().is_yes());
        assert!(matches!(is_isomorphic(&s(0), &s(1), 7).unwrap(), IsoResult::No));
        // I(3) and P(1) are both the sincere indecomposable
        match is_isomorphic(&i(2), &p(0), 7).unwrap() {
            IsoResult::Yes(f) => assert!(f.is_invertible()),
            other => panic!("expected isomorphism, got {other:?}"),
        }
        // symmetry on swapped arguments
        assert!(is_isomorphic(&p(0), &i(2), 7).unwrap().is_yes());
    }
}
