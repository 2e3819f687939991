//! Multivariate polynomials over F_p, monomial orders, Groebner bases
//! and Hilbert-series invariants.
//!
//! Polynomials are sparse term lists kept in a canonical form (terms
//! strictly descending under graded reverse lexicographic order with the
//! identity variable ranking), so structural equality, hashing and
//! deterministic printing come for free.  A [`MonomialOrder`] is only
//! consulted where the order genuinely matters: leading terms, division,
//! and the Groebner machinery in [`groebner`].
//!
//! Everything here is exact arithmetic in F_p; coefficients are the raw
//! canonical `u64` values of [`crate::gf`].

mod groebner;
mod hilbert;

pub use groebner::{groebner, is_groebner_basis, reduce, s_polynomial};
pub use hilbert::{affine_dim, hilbert_numerator, hilbert_poly, hilbert_series, ideal_degree};

use crate::gf::PrimeField;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

/// Errors from polynomial-level operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// A variable index at or beyond the ring's variable count.
    VarOutOfRange { index: usize, nvars: usize },
    /// The supplied variable ranking is not a permutation of 0..nvars.
    BadPermutation(Vec<usize>),
    /// An operation that needs homogeneous input saw a mixed-degree
    /// generator.
    NotHomogeneous,
    /// Dimension or degree was asked of the unit ideal, whose vanishing
    /// locus is empty.
    UnitIdeal,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::VarOutOfRange { index, nvars } => {
                write!(f, "variable index {index} out of range for {nvars} variables")
            }
            PolyError::BadPermutation(p) => {
                write!(f, "{p:?} is not a permutation of the variable indices")
            }
            PolyError::NotHomogeneous => write!(f, "generators must be homogeneous"),
            PolyError::UnitIdeal => write!(f, "the unit ideal has an empty vanishing locus"),
        }
    }
}

impl std::error::Error for PolyError {}

/// The polynomial ring F_p[x_1, ..., x_m].
///
/// Cheap to copy; carries the coefficient field, the variable count and
/// a display letter.  Printing uses `letter` with 1-based subscripts
/// (`x1`, `x2`, ...), so rings over the same field with the same
/// variable count but different letters compare unequal - they describe
/// different printed alphabets, which matters for file output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    field: PrimeField,
    nvars: usize,
    letter: char,
}

impl Ring {
    /// The ring F_p[x_1, ..., x_m] with the default letter `x`.
    pub fn new(field: PrimeField, nvars: usize) -> Ring {
        Ring { field, nvars, letter: 'x' }
    }

    /// Same ring, custom display letter (`y`, `z`, ...).
    pub fn with_letter(field: PrimeField, nvars: usize, letter: char) -> Ring {
        Ring { field, nvars, letter }
    }

    /// The coefficient field.
    pub fn field(self) -> PrimeField {
        self.field
    }

    /// The number of variables.
    pub fn nvars(self) -> usize {
        self.nvars
    }

    /// The display letter.
    pub fn letter(self) -> char {
        self.letter
    }

    /// The zero polynomial.
    pub fn zero(self) -> Poly {
        Poly { ring: self, terms: Vec::new() }
    }

    /// The constant polynomial `c` (reduced mod p).
    pub fn constant(self, c: i64) -> Poly {
        let v = self.field.elem(c).value();
        if v == 0 {
            self.zero()
        } else {
            Poly { ring: self, terms: vec![(Monomial::one(self.nvars), v)] }
        }
    }

    /// The constant polynomial 1.
    pub fn one(self) -> Poly {
        self.constant(1)
    }

    /// The variable x_{i+1} (0-based index).
    ///
    /// # Errors
    ///
    /// [`PolyError::VarOutOfRange`] when `i >= nvars`.
    pub fn var(self, i: usize) -> Result<Poly, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::VarOutOfRange { index: i, nvars: self.nvars });
        }
        Ok(Poly { ring: self, terms: vec![(Monomial::var(self.nvars, i), 1)] })
    }

    /// A polynomial from `(monomial, signed coefficient)` pairs; repeated
    /// monomials accumulate, zero coefficients vanish.
    pub fn poly_from(self, terms: &[(Monomial, i64)]) -> Poly {
        let mut acc: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), self.nvars, "monomial has wrong variable count");
            let c = self.field.elem(*c).value();
            let entry = acc.entry(m.clone()).or_insert(0);
            *entry = self.field.add_raw(*entry, c);
        }
        Poly::from_btree(self, acc)
    }

    /// The homogeneous linear form with the given signed coefficients,
    /// one per variable.
    pub fn linear_form(self, coeffs: &[i64]) -> Poly {
        assert_eq!(coeffs.len(), self.nvars, "one coefficient per variable");
        let terms: Vec<(Monomial, i64)> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (Monomial::var(self.nvars, i), c))
            .collect();
        self.poly_from(&terms)
    }
}

/// A power product of the ring variables, stored as one exponent per
/// variable.
///
/// The derived-free `Ord` implementation is graded reverse lexicographic
/// with the identity variable ranking - the same comparison as
/// `MonomialOrder::grevlex()` - so sorted containers of monomials agree
/// with the crate's canonical term order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    /// The empty product (all exponents zero).
    pub fn one(nvars: usize) -> Monomial {
        Monomial { exps: vec![0; nvars] }
    }

    /// The single variable x_{i+1}.
    pub fn var(nvars: usize, i: usize) -> Monomial {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps }
    }

    /// A monomial from explicit exponents.
    pub fn from_exps(exps: Vec<u16>) -> Monomial {
        Monomial { exps }
    }

    /// The exponent vector.
    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    /// The number of variables this monomial lives in.
    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    /// The total degree.
    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// True for the empty product.
    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// The product of two monomials.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps }
    }

    /// True when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, when the division is exact.
    pub fn div_into(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(b.checked_sub(*a)?);
        }
        Some(Monomial { exps })
    }

    /// The least common multiple.
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect();
        Monomial { exps }
    }

    /// The greatest common divisor.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| *a.min(b)).collect();
        Monomial { exps }
    }

    /// True when the supports are disjoint (lcm = product).
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// The value of the power product at a point with canonical raw
    /// coordinates.
    pub fn eval_raw(&self, field: PrimeField, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.exps.len());
        let mut acc = 1;
        for (x, &e) in point.iter().zip(&self.exps) {
            if e > 0 {
                acc = field.mul_raw(acc, field.pow_raw(*x, e as u64));
            }
        }
        acc
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        grevlex_cmp(&self.exps, &other.exps)
    }
}

fn grevlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    // Equal degree: the monomial whose last differing exponent is
    // smaller is the larger one.
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            ord => return ord.reverse(),
        }
    }
    Ordering::Equal
}

fn lex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for i in 0..a.len() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// The two supported comparison rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    /// Graded reverse lexicographic: total degree first, ties broken by
    /// the *smaller* trailing exponent.  The default everywhere.
    GrevLex,
    /// Plain lexicographic.
    Lex,
}

/// A monomial order: a comparison rule plus an optional variable
/// ranking.
///
/// The ranking `perm` lists variable indices from most to least
/// significant; `None` means the identity ranking x_1 > x_2 > ... .
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    perm: Option<Vec<usize>>,
}

impl MonomialOrder {
    /// Graded reverse lexicographic with the identity ranking.
    pub fn grevlex() -> MonomialOrder {
        MonomialOrder { kind: OrderKind::GrevLex, perm: None }
    }

    /// Lexicographic with the identity ranking.
    pub fn lex() -> MonomialOrder {
        MonomialOrder { kind: OrderKind::Lex, perm: None }
    }

    /// A custom ranking: `perm[0]` is the most significant variable.
    ///
    /// # Errors
    ///
    /// [`PolyError::BadPermutation`] when `perm` is not a permutation of
    /// `0..perm.len()`.
    pub fn with_ranking(kind: OrderKind, perm: Vec<usize>) -> Result<MonomialOrder, PolyError> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            if i >= perm.len() || seen[i] {
                return Err(PolyError::BadPermutation(perm));
            }
            seen[i] = true;
        }
        Ok(MonomialOrder { kind, perm: Some(perm) })
    }

    /// The comparison rule.
    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    /// Compares two monomials under this order.
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match &self.perm {
            None => match self.kind {
                OrderKind::GrevLex => grevlex_cmp(&a.exps, &b.exps),
                OrderKind::Lex => lex_cmp(&a.exps, &b.exps),
            },
            Some(perm) => {
                let ra: Vec<u16> = perm.iter().map(|&i| a.exps[i]).collect();
                let rb: Vec<u16> = perm.iter().map(|&i| b.exps[i]).collect();
                match self.kind {
                    OrderKind::GrevLex => grevlex_cmp(&ra, &rb),
                    OrderKind::Lex => lex_cmp(&ra, &rb),
                }
            }
        }
    }

    /// The larger of two monomials under this order.
    pub fn max<'a>(&self, a: &'a Monomial, b: &'a Monomial) -> &'a Monomial {
        if self.cmp(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

/// A sparse polynomial over F_p.
///
/// Terms are `(monomial, coefficient)` pairs with nonzero canonical
/// coefficients, kept strictly descending under the canonical (grevlex,
/// identity ranking) order.  Equality and hashing are therefore exact
/// structural comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Ring,
    terms: Vec<(Monomial, u64)>,
}

fn check_same_ring(a: &Poly, b: &Poly, op: &str) {
    assert!(
        a.ring == b.ring,
        "cannot {op} polynomials from different rings ({:?} vs {:?})",
        a.ring, b.ring
    );
}

impl Poly {
    fn from_btree(ring: Ring, acc: BTreeMap<Monomial, u64>) -> Poly {
        let terms: Vec<(Monomial, u64)> =
            acc.into_iter().rev().filter(|&(_, c)| c != 0).collect();
        Poly { ring, terms }
    }

    /// The ring this polynomial lives in.
    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// The terms, strictly descending under the canonical order.
    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// True when every term has the same total degree (the zero
    /// polynomial counts as homogeneous).
    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m0, _)) => {
                let d = m0.degree();
                self.terms.iter().all(|(m, _)| m.degree() == d)
            }
        }
    }

    /// The leading term under `order`, or `None` for zero.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, u64)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
            .map(|(m, c)| (m, *c))
    }

    /// The coefficient of a monomial (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|&(_, c)| c)
            .unwrap_or(0)
    }

    /// `self * c` for a signed scalar.
    pub fn scale(&self, c: i64) -> Poly {
        let f = self.ring.field();
        let c = f.elem(c).value();
        self.scale_raw(c)
    }

    /// `self * c` for a canonical raw scalar.
    pub fn scale_raw(&self, c: u64) -> Poly {
        let f = self.ring.field();
        if c == 0 {
            return self.ring.zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), f.mul_raw(*a, c)))
            .collect();
        Poly { ring: self.ring, terms }
    }

    /// `self * c * m` for a raw scalar and a monomial: the basic step of
    /// polynomial division.
    pub fn mul_term(&self, m: &Monomial, c: u64) -> Poly {
        let f = self.ring.field();
        if c == 0 {
            return self.ring.zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| (t.mul(m), f.mul_raw(*a, c)))
            .collect();
        // Multiplying every monomial by a fixed one preserves the
        // canonical ordering, so no re-sort is needed.
        Poly { ring: self.ring, terms }
    }

    /// Rescales so the leading coefficient under `order` becomes 1.
    pub fn monic(&self, order: &MonomialOrder) -> Poly {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale_raw(self.ring.field().inv_raw(c)),
        }
    }

    /// Evaluates at a point given by canonical raw coordinates.
    pub fn eval_raw(&self, point: &[u64]) -> u64 {
        let f = self.ring.field();
        let mut acc = 0;
        for (m, c) in &self.terms {
            acc = f.add_raw(acc, f.mul_raw(*c, m.eval_raw(f, point)));
        }
        acc
    }

    /// Substitutes `images[i]` for variable i.  The images must all live
    /// in one ring (not necessarily this one) over the same field; the
    /// result lives in the images' ring.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        let target = if images.is_empty() { self.ring } else { images[0].ring };
        for im in images {
            assert!(im.ring == target, "images must share a single ring");
        }
        assert!(
            target.field() == self.ring.field(),
            "substitution cannot change the coefficient field"
        );
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut term = target.constant(0);
            let mut first = true;
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    if first {
                        term = images[i].clone();
                        first = false;
                    } else {
                        term = &term * &images[i];
                    }
                }
            }
            if first {
                term = target.one();
            }
            acc = &acc + &term.scale_raw(*c);
        }
        acc
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        check_same_ring(self, rhs, "add");
        let f = self.ring.field();
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &rhs.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    terms.push((ma.clone(), *ca));
                    i += 1;
                }
                Ordering::Less => {
                    terms.push((mb.clone(), *cb));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add_raw(*ca, *cb);
                    if c != 0 {
                        terms.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&rhs.terms[j..]);
        Poly { ring: self.ring, terms }
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = self.ring.field();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), f.neg_raw(*c)))
            .collect();
        Poly { ring: self.ring, terms }
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        check_same_ring(self, rhs, "multiply");
        let f = self.ring.field();
        let mut acc: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = f.mul_raw(*ca, *cb);
                let entry = acc.entry(m).or_insert(0);
                *entry = f.add_raw(*entry, c);
            }
        }
        Poly::from_btree(self.ring, acc)
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_value_ops!(Add::add, Sub::sub, Mul::mul);

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if *c != 1 || m.is_one() {
                write!(f, "{c}")?;
                if !m.is_one() {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}{}", self.ring.letter, i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// A finite generating set of an ideal, with a lazily computed reduced
/// Groebner basis.
///
/// The cached basis always uses the default grevlex order; requests for
/// other orders recompute on the fly.  The cache is a [`OnceLock`], so
/// concurrent callers race benignly: the first computation wins and
/// everyone shares it.
#[derive(Debug, Clone)]
pub struct IdealBasis {
    ring: Ring,
    gens: Vec<Poly>,
    gb: OnceLock<Vec<Poly>>,
}

impl IdealBasis {
    /// Wraps a generating set, discarding zero generators.
    pub fn new(ring: Ring, gens: Vec<Poly>) -> IdealBasis {
        for g in &gens {
            assert!(g.ring() == ring, "generator from a different ring");
        }
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        IdealBasis { ring, gens, gb: OnceLock::new() }
    }

    /// The ambient ring.
    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// The generators as supplied (zeros dropped).
    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    /// True when every generator is homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        self.gens.iter().all(Poly::is_homogeneous)
    }

    /// The reduced Groebner basis under the default grevlex order,
    /// computed on first use and cached.
    pub fn groebner_basis(&self) -> &[Poly] {
        self.gb.get_or_init(|| groebner(&self.gens, &MonomialOrder::grevlex()))
    }

    /// A reduced Groebner basis under an arbitrary order.  Grevlex
    /// requests are served from (and seed) the cache; other orders are
    /// computed fresh each call.
    pub fn groebner_basis_with(&self, order: &MonomialOrder) -> Vec<Poly> {
        if *order == MonomialOrder::grevlex() {
            self.groebner_basis().to_vec()
        } else {
            groebner(&self.gens, order)
        }
    }

    /// Ideal membership via normal form against the cached basis.
    pub fn contains(&self, f: &Poly) -> bool {
        reduce(f, self.groebner_basis(), &MonomialOrder::grevlex()).is_zero()
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.groebner_basis()
            .iter()
            .any(|g| g.degree() == Some(0))
    }
}
