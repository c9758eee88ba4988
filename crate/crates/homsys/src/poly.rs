//! Univariate polynomial arithmetic over the exact fields, minimal
//! polynomials of matrices, and the factor-splitting routines that back
//! Krull-Schmidt decompositions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{FieldCfg, Matrix, Scalar};

/// Coefficients in ascending degree order; the zero polynomial is the empty
/// vector. Leading coefficient is always nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Scalar>,
    pub field: FieldCfg,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>, field: FieldCfg) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs, field }
    }

    pub fn zero(field: FieldCfg) -> Self {
        Poly { coeffs: vec![], field }
    }

    pub fn one(field: FieldCfg) -> Self {
        Poly { coeffs: vec![field.one()], field }
    }

    pub fn x(field: FieldCfg) -> Self {
        Poly { coeffs: vec![field.zero(), field.one()], field }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> &Scalar {
        self.coeffs.last().expect("lead of zero polynomial")
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv();
        Poly::new(self.coeffs.iter().map(|c| c.mul(&inv)).collect(), self.field)
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero());
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero());
            out.push(a.add(&b));
        }
        Poly::new(out, self.field)
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.mul(s)).collect(), self.field)
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out, self.field)
    }

    /// Euclidean division: returns (quotient, remainder).
    pub fn div_rem(&self, rhs: &Poly) -> (Poly, Poly) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![self.field.zero(); self.coeffs.len().saturating_sub(rhs.coeffs.len()) + 1];
        let lead_inv = rhs.lead().inv();
        while !rem.is_zero() && rem.degree() >= rhs.degree() {
            let shift = rem.degree() - rhs.degree();
            let factor = rem.lead().mul(&lead_inv);
            quot[shift] = quot[shift].add(&factor);
            let mut sub = vec![self.field.zero(); shift];
            sub.extend(rhs.coeffs.iter().map(|c| c.mul(&factor)));
            rem = rem.sub(&Poly::new(sub, self.field));
        }
        (Poly::new(quot, self.field), rem)
    }

    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() { a } else { a.monic() }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.field);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&self.field.from_i64(i as i64)))
            .collect();
        Poly::new(out, self.field)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Evaluates a polynomial at a square matrix.
pub fn eval_matrix(p: &Poly, m: &Matrix) -> Matrix {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut acc = Matrix::zero(n, n, m.field);
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(m);
        if !c.is_zero() {
            acc = acc.add(&Matrix::identity(n, m.field).scale(c));
        }
    }
    acc
}

/// Monic minimal polynomial of a square matrix, by finding the first linear
/// dependence among the vectorized powers `I, M, M^2, ...`.
pub fn min_poly(m: &Matrix) -> Poly {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let field = m.field;
    if n == 0 {
        return Poly::one(field);
    }
    let mut powers: Vec<Vec<Scalar>> = vec![Matrix::identity(n, field).vectorize()];
    let mut cur = Matrix::identity(n, field);
    loop {
        cur = cur.mul(m);
        let candidate = cur.vectorize();
        // does candidate lie in the span of collected powers?
        let stacked = Matrix::from_cols(&powers, n * n, field);
        if let Some(coeffs) = stacked.solve(&candidate) {
            // M^k = sum coeffs_i M^i  =>  min poly = x^k - sum coeffs_i x^i
            let k = powers.len();
            let mut poly = vec![field.zero(); k + 1];
            poly[k] = field.one();
            for (i, c) in coeffs.into_iter().enumerate() {
                poly[i] = c.neg();
            }
            return Poly::new(poly, field);
        }
        powers.push(candidate);
        assert!(powers.len() <= n + 1, "minimal polynomial search exceeded dimension bound");
    }
}

/// Splits a monic polynomial into pairwise-coprime factors whose product is
/// the input. Over `F_p` each factor is a full power of one irreducible;
/// over the rationals the split is squarefree-structure plus rational roots
/// and may be coarser.
pub fn coprime_factors(p: &Poly) -> Vec<Poly> {
    assert!(!p.is_zero());
    let p = p.monic();
    if p.degree() == 0 {
        return vec![];
    }
    match p.field {
        FieldCfg::Prime(_) => {
            let irreducibles = factor_mod_p(&p);
            group_powers(&p, irreducibles)
        }
        FieldCfg::Rational => {
            let parts = rational_split(&p);
            group_powers(&p, parts)
        }
    }
}

/// Given distinct pairwise-coprime "base" factors of `p`, returns the list
/// of maximal powers `base_i^{e_i}` dividing `p` (their product is `p`).
fn group_powers(p: &Poly, bases: Vec<Poly>) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut rem = p.clone();
    for b in bases {
        let mut power = Poly::one(p.field);
        loop {
            let (q, r) = rem.div_rem(&b);
            if r.is_zero() {
                rem = q;
                power = power.mul(&b);
            } else {
                break;
            }
        }
        if power.degree() > 0 {
            out.push(power);
        }
    }
    assert!(rem.degree() == 0, "pairwise-coprime bases must exhaust the polynomial");
    out
}

/// Complete factorization into distinct monic irreducibles over `F_p`
/// (Berlekamp; deterministic splitting by enumerating residues).
fn factor_mod_p(f: &Poly) -> Vec<Poly> {
    let FieldCfg::Prime(pr) = f.field else { unreachable!() };
    let mut stack = vec![squarefree_part_mod_p(f)];
    let mut irreducibles: Vec<Poly> = Vec::new();
    while let Some(g) = stack.pop() {
        if g.degree() == 0 {
            continue;
        }
        if g.degree() == 1 {
            push_unique(&mut irreducibles, g);
            continue;
        }
        let basis = berlekamp_basis(&g);
        if basis.len() == 1 {
            push_unique(&mut irreducibles, g);
            continue;
        }
        // some non-constant basis element splits g over the residue range
        let b = basis
            .iter()
            .find(|b| b.degree() > 0)
            .expect("non-trivial Berlekamp algebra has a non-constant element");
        let mut split_any = false;
        for c in 0..pr {
            let shifted = b.sub(&Poly::new(vec![f.field.from_i64(c as i64)], f.field));
            let d = g.gcd(&shifted);
            if !d.is_zero() && d.degree() > 0 && d.degree() < g.degree() {
                let (q, r) = g.div_rem(&d);
                assert!(r.is_zero());
                stack.push(d);
                stack.push(q);
                split_any = true;
                break;
            }
        }
        assert!(split_any, "Berlekamp element must split a reducible squarefree polynomial");
    }
    irreducibles
}

fn push_unique(list: &mut Vec<Poly>, p: Poly) {
    let p = p.monic();
    if !list.contains(&p) {
        list.push(p);
    }
}

/// Squarefree part over `F_p`, handling inseparable towers `g(x^p)`.
fn squarefree_part_mod_p(f: &Poly) -> Poly {
    let FieldCfg::Prime(pr) = f.field else { unreachable!() };
    let f = f.monic();
    if f.degree() == 0 {
        return f;
    }
    let d = f.derivative();
    if d.is_zero() {
        // f = g(x^p); over F_p the coefficients carry over unchanged
        let mut g = Vec::new();
        for (i, c) in f.coeffs.iter().enumerate() {
            if i % pr as usize == 0 {
                g.push(c.clone());
            } else {
                assert!(c.is_zero());
            }
        }
        return squarefree_part_mod_p(&Poly::new(g, f.field));
    }
    let g = f.gcd(&d);
    let (q, r) = f.div_rem(&g);
    assert!(r.is_zero());
    if g.degree() == 0 {
        q
    } else {
        // q currently holds one copy of each separable irreducible; the gcd
        // may still hide inseparable content
        let tail = squarefree_part_mod_p(&g);
        let shared = q.gcd(&tail);
        let (extra, r2) = tail.div_rem(&shared);
        assert!(r2.is_zero());
        q.mul(&extra)
    }
}

/// Basis of the Berlekamp subalgebra `{ b : b^p = b mod f }` of `F_p[x]/(f)`,
/// returned as polynomials of degree < deg f.
fn berlekamp_basis(f: &Poly) -> Vec<Poly> {
    let FieldCfg::Prime(pr) = f.field else { unreachable!() };
    let n = f.degree();
    let field = f.field;
    // columns of Q: x^{ip} mod f in the basis 1, x, ..., x^{n-1}
    let mut cols = Vec::with_capacity(n);
    let xp = pow_mod(&Poly::x(field), pr as usize, f);
    let mut cur = Poly::one(field);
    for _ in 0..n {
        let mut col = vec![field.zero(); n];
        for (i, c) in cur.coeffs.iter().enumerate() {
            col[i] = c.clone();
        }
        cols.push(col);
        cur = mul_mod(&cur, &xp, f);
    }
    let q = Matrix::from_cols(&cols, n, field);
    let qmi = q.sub(&Matrix::identity(n, field));
    qmi.kernel_basis()
        .into_iter()
        .map(|v| Poly::new(v, field))
        .collect()
}

fn mul_mod(a: &Poly, b: &Poly, m: &Poly) -> Poly {
    a.mul(b).div_rem(m).1
}

fn pow_mod(base: &Poly, mut e: usize, m: &Poly) -> Poly {
    let mut acc = Poly::one(base.field);
    let mut b = base.div_rem(m).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, m);
        }
        b = mul_mod(&b, &b, m);
        e >>= 1;
    }
    acc
}

/// Pairwise-coprime "base" split over the rationals: rational roots are
/// separated individually, everything else is grouped by squarefree
/// structure. The result may be coarser than a full factorization.
fn rational_split(f: &Poly) -> Vec<Poly> {
    let mut bases: Vec<Poly> = Vec::new();
    // squarefree part
    let d = f.derivative();
    let sq = if d.is_zero() { f.clone() } else { f.div_rem(&f.gcd(&d)).0.monic() };
    // peel rational roots from the squarefree part
    let mut rest = sq.clone();
    for root in rational_roots(&sq) {
        let lin = Poly::new(vec![root.neg(), f.field.one()], f.field);
        let (q, r) = rest.div_rem(&lin);
        if r.is_zero() {
            bases.push(lin);
            rest = q;
        }
    }
    if rest.degree() > 0 {
        bases.push(rest.monic());
    }
    bases
}

/// Rational roots of a polynomial with rational coefficients, via the
/// rational-root bound on the primitive integer form. Divisor enumeration is
/// by trial division with a cap, so roots with huge prime factors may be
/// missed; callers treat the split as best-effort.
fn rational_roots(f: &Poly) -> Vec<Scalar> {
    let coeffs: Vec<BigRational> = f
        .coeffs
        .iter()
        .map(|c| match c {
            Scalar::Q(q) => q.clone(),
            _ => unreachable!(),
        })
        .collect();
    // common denominator
    let mut den = BigInt::one();
    for c in &coeffs {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let a0 = ints.iter().find(|c| !c.is_zero());
    let Some(_) = a0 else { return vec![] };
    // x = 0 root
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(Scalar::Q(BigRational::zero()));
    }
    let trailing = ints.iter().find(|c| !c.is_zero()).unwrap().abs();
    let leading = ints.last().unwrap().abs();
    let p_divs = small_divisors(&trailing);
    let q_divs = small_divisors(&leading);
    for p in &p_divs {
        for q in &q_divs {
            for sign in [1i64, -1] {
                let cand = Scalar::Q(BigRational::new(p * BigInt::from(sign), q.clone()));
                if f.eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// All positive divisors found by trial division up to a fixed bound; for
/// numbers with a large prime cofactor the list includes the cofactor
/// multiples so that small-root searches stay useful.
fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut d = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &d * &d <= m && d <= bound {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m = &m / &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        factors.push((m, 1));
    }
    let mut divisors = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for dv in &divisors {
            let mut pe = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pe);
                pe = &pe * &p;
            }
        }
        divisors = next;
        if divisors.len() > 4096 {
            divisors.truncate(4096);
        }
    }
    divisors.sort();
    divisors.dedup();
    divisors
}

#[cfg(test)]
mod tests {
    use super::*;

    const QQ: FieldCfg = FieldCfg::Rational;

    fn poly_i64(cs: &[i64], field: FieldCfg) -> Poly {
        Poly::new(cs.iter().map(|&c| field.from_i64(c)).collect(), field)
    }

    #[test]
    fn min_poly_of_zero_and_diagonal() {
        let z = Matrix::zero(3, 3, QQ);
        assert_eq!(min_poly(&z), poly_i64(&[0, 1], QQ)); // x
        let d = Matrix::from_i64(&[&[1, 0], &[0, 2]], QQ);
        assert_eq!(min_poly(&d), poly_i64(&[2, -3, 1], QQ)); // (x-1)(x-2)
        let j = Matrix::from_i64(&[&[0, 1], &[0, 0]], QQ);
        assert_eq!(min_poly(&j), poly_i64(&[0, 0, 1], QQ)); // x^2
    }

    #[test]
    fn coprime_factors_rational() {
        // x(x-1)(x^2+1): three coprime pieces over Q
        let f = poly_i64(&[0, 1], QQ)
            .mul(&poly_i64(&[-1, 1], QQ))
            .mul(&poly_i64(&[1, 0, 1], QQ));
        let factors = coprime_factors(&f);
        assert_eq!(factors.len(), 3);
        let prod = factors.iter().fold(Poly::one(QQ), |a, b| a.mul(b));
        assert_eq!(prod, f.monic());
    }

    #[test]
    fn coprime_factors_complete_mod_p() {
        let f5 = FieldCfg::Prime(5);
        // x^2+1 = (x-2)(x-3) mod 5
        let f = poly_i64(&[1, 0, 1], f5);
        let factors = coprime_factors(&f);
        assert_eq!(factors.len(), 2);
        // x^2+2 is irreducible mod 5
        let g = poly_i64(&[2, 0, 1], f5);
        assert_eq!(coprime_factors(&g).len(), 1);
        // powers are grouped: (x-1)^2 (x-2)
        let h = poly_i64(&[-1, 1], f5).pow(2).mul(&poly_i64(&[-2, 1], f5));
        let hf = coprime_factors(&h);
        assert_eq!(hf.len(), 2);
        assert!(hf.iter().any(|p| p.degree() == 2));
    }

    #[test]
    fn division_round_trip() {
        let a = poly_i64(&[1, 2, 3, 4], QQ);
        let b = poly_i64(&[1, 1], QQ);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
    }
}
