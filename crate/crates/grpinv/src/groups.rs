//! The groups behind the matrices: explicit element arithmetic.
//!
//! A skew-symmetric B(y) in d variables over F_p defines a group on
//! the set F_p^n x F_p^d with multiplication
//!
//! ```text
//! (v, w) * (v', w') = (v + v', w + w' + t(v, v') / 2),
//! t(v, v')_k = v^T B^(k) v',
//! ```
//!
//! a finite p-group of order p^(n+d), nilpotency class at most 2 and
//! exponent p (for p odd).  Commutators land in the w-part:
//! [(v, w), (v', w')] = (0, t(v, v')), so the derived subgroup is the
//! span of the values of t and the centre is cut out by the adjoint.
//!
//! This module exists to keep the geometry honest: everything the
//! minor ideals claim about a matrix can be cross-checked here by
//! counting actual group elements.

use crate::gf::PrimeField;
use crate::ideals::rank_ideal;
use crate::linforms::{Echelon, FpMatrix, LinFormMatrix};
use crate::poly::affine_dim;
use std::fmt;

/// Errors from building a group out of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// The matrix is not square skew-symmetric with zero diagonal.
    NotSkew,
    /// A structure-constant key was repeated or degenerate.
    BadRelation { i: usize, j: usize, reason: &'static str },
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::NotSkew => write!(f, "the matrix must be skew-symmetric with zero diagonal"),
            GroupError::BadRelation { i, j, reason } => {
                write!(f, "bad relation for generator pair ({i}, {j}): {reason}")
            }
        }
    }
}

impl std::error::Error for GroupError {}

/// An element (v, w) with v in F_p^n and w in F_p^d, coordinates
/// canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub v: Vec<u64>,
    pub w: Vec<u64>,
}

/// A group presented by a skew-symmetric matrix of linear forms.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    field: PrimeField,
    n: usize,
    d: usize,
    matrix: LinFormMatrix,
}

impl GroupSpec {
    /// Wraps a validated skew-symmetric matrix.
    ///
    /// # Errors
    ///
    /// [`GroupError::NotSkew`] when the matrix is not square
    /// skew-symmetric with zero diagonal.
    pub fn new(matrix: LinFormMatrix) -> Result<GroupSpec, GroupError> {
        if !matrix.is_skew() {
            return Err(GroupError::NotSkew);
        }
        Ok(GroupSpec {
            field: matrix.ring().field(),
            n: matrix.rows(),
            d: matrix.ring().nvars(),
            matrix,
        })
    }

    /// The coefficient field.
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Generator count (v-part dimension).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Relation count (w-part dimension).
    pub fn d(&self) -> usize {
        self.d
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &LinFormMatrix {
        &self.matrix
    }

    /// The identity element.
    pub fn identity(&self) -> GroupElement {
        GroupElement { v: vec![0; self.n], w: vec![0; self.d] }
    }

    /// An element from signed coordinates, reduced mod p.
    pub fn element(&self, v: &[i64], w: &[i64]) -> GroupElement {
        assert_eq!(v.len(), self.n, "v-part must have length n");
        assert_eq!(w.len(), self.d, "w-part must have length d");
        GroupElement {
            v: v.iter().map(|&x| self.field.elem(x).value()).collect(),
            w: w.iter().map(|&x| self.field.elem(x).value()).collect(),
        }
    }

    /// The i-th standard generator (e_i, 0).
    pub fn generator(&self, i: usize) -> GroupElement {
        assert!(i < self.n, "generator index out of range");
        let mut g = self.identity();
        g.v[i] = 1;
        g
    }

    /// The bilinear commutator map t(v, v')_k = v^T B^(k) v'.
    pub fn t_map(&self, v: &[u64], vp: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.n);
        assert_eq!(vp.len(), self.n);
        let f = self.field;
        self.matrix
            .slices()
            .iter()
            .map(|slice| {
                let mut acc = 0;
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0 {
                        continue;
                    }
                    let mut row = 0;
                    for (j, &vj) in vp.iter().enumerate() {
                        row = f.add_raw(row, f.mul_raw(slice.get(i, j), vj));
                    }
                    acc = f.add_raw(acc, f.mul_raw(vi, row));
                }
                acc
            })
            .collect()
    }

    /// The group product.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let f = self.field;
        let half = f.half();
        let t = self.t_map(&a.v, &b.v);
        let v = a.v.iter().zip(&b.v).map(|(&x, &y)| f.add_raw(x, y)).collect();
        let w = a
            .w
            .iter()
            .zip(&b.w)
            .zip(&t)
            .map(|((&x, &y), &tk)| f.add_raw(f.add_raw(x, y), f.mul_raw(half, tk)))
            .collect();
        GroupElement { v, w }
    }

    /// The group inverse: (-v, -w).  (The correction term vanishes
    /// because t is alternating.)
    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let f = self.field;
        GroupElement {
            v: a.v.iter().map(|&x| f.neg_raw(x)).collect(),
            w: a.w.iter().map(|&x| f.neg_raw(x)).collect(),
        }
    }

    /// The power g^k.  Since t(v, v) = 0, powers are just scalings:
    /// g^k = (k v, k w); in particular g^p = 1, so the group has
    /// exponent p.
    pub fn pow(&self, a: &GroupElement, k: u64) -> GroupElement {
        let f = self.field;
        let k = k % f.p();
        GroupElement {
            v: a.v.iter().map(|&x| f.mul_raw(k, x)).collect(),
            w: a.w.iter().map(|&x| f.mul_raw(k, x)).collect(),
        }
    }

    /// The commutator [a, b] = a^-1 b^-1 a b = (0, t(v_a, v_b)).
    pub fn commutator(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement { v: vec![0; self.n], w: self.t_map(&a.v, &b.v) }
    }

    /// True when (v, w) commutes with everything: v must kill every
    /// slice (the adjoint evaluated at v vanishes).
    pub fn is_central(&self, a: &GroupElement) -> bool {
        self.matrix
            .slices()
            .iter()
            .all(|slice| slice.left_mul_row(&a.v).iter().all(|&x| x == 0))
    }

    /// Structural invariants of the group, computed from the ideal
    /// side: the derived subgroup has dimension d - dim V(I_1(B)) and
    /// the centre has dimension d + dim V(I_1(B*)).
    pub fn structural_report(&self) -> StructuralReport {
        let derived_dim = self.d - linear_locus_dim(&self.matrix);
        let centre_dim = self.d + linear_locus_dim(&self.matrix.adjoint());
        StructuralReport {
            p: self.field.p(),
            n: self.n,
            d: self.d,
            derived_dim,
            centre_dim,
        }
    }
}

/// dim V(I_1(D)): the solution space of the linear forms that are the
/// entries of D.
fn linear_locus_dim(d: &LinFormMatrix) -> usize {
    let ideal = rank_ideal(d, 1);
    affine_dim(&ideal).expect("entry ideals are homogeneous and proper")
}

/// A summary of the group G_B: its order is p^(n+d), its exponent is p
/// (for the trivial group, 1), and the derived/centre dimensions are
/// F_p-dimensions of the corresponding subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralReport {
    /// The prime.
    pub p: u64,
    /// Generator count: |G| = p^(n+d).
    pub n: usize,
    /// Relation count.
    pub d: usize,
    /// dim of the derived subgroup [G, G] (a subgroup of the w-part).
    pub derived_dim: usize,
    /// dim of the centre Z(G).
    pub centre_dim: usize,
}

impl StructuralReport {
    /// True when the group is abelian.
    pub fn is_abelian(&self) -> bool {
        self.derived_dim == 0
    }

    /// The exponent of the group: p, or 1 for the trivial group.
    pub fn exponent(&self) -> u64 {
        if self.n + self.d == 0 {
            1
        } else {
            self.p
        }
    }

    /// The order as a display string `p^(n+d)`.
    pub fn order_string(&self) -> String {
        format!("{}^{}", self.p, self.n + self.d)
    }
}

/// What a direct walk over group elements found; the independent
/// cross-check for [`StructuralReport`].  Every quantity here is
/// measured with group multiplication alone — no ideals, no kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationCheck {
    /// The number of elements that commute with every other element.
    pub centre_size: u128,
    /// The F_p-dimension of the span of all commutator values.
    pub derived_dim: usize,
    /// Every element satisfied g^p = 1 under repeated multiplication.
    pub exponent_divides_p: bool,
    /// Every commutator commuted with every element (class <= 2).
    pub commutators_central: bool,
}

impl EnumerationCheck {
    /// True when the walk confirms the ideal-theoretic report.
    pub fn agrees_with(&self, report: &StructuralReport) -> bool {
        let p = report.p as u128;
        self.centre_size == p.pow(report.centre_dim as u32)
            && self.derived_dim == report.derived_dim
            && self.exponent_divides_p
            && self.commutators_central
    }
}

impl GroupSpec {
    /// Walks the group directly and measures the centre, the derived
    /// subgroup, the exponent and the nilpotency class with nothing
    /// but [`GroupSpec::mul`] and [`GroupSpec::inv`].
    ///
    /// Commutation only ever depends on the v-parts (w-parts are
    /// central by the shape of the multiplication), so the quadratic
    /// loops run over the p^n v-parts and each commuting v-part
    /// contributes p^d central elements.  The exponent test does walk
    /// all p^(n+d) elements.  Returns `None` when the group order
    /// exceeds `max_order`.
    pub fn enumeration_check(&self, max_order: u128) -> Option<EnumerationCheck> {
        let p = self.field.p();
        let order = (p as u128).checked_pow((self.n + self.d) as u32)?;
        if order > max_order {
            return None;
        }
        let digits = |code: u64, len: usize| -> Vec<u64> {
            let mut c = code;
            (0..len)
                .map(|_| {
                    let r = c % p;
                    c /= p;
                    r
                })
                .collect()
        };
        let vn = p.pow(self.n as u32);
        let chain = |a: &GroupElement, b: &GroupElement| {
            self.mul(&self.mul(&self.inv(a), &self.inv(b)), &self.mul(a, b))
        };
        let id = self.identity();
        let mut central_v = 0u64;
        let mut span = Echelon::new(self.field, self.d);
        let mut seen = std::collections::HashSet::new();
        for a_code in 0..vn {
            let a = GroupElement { v: digits(a_code, self.n), w: vec![0; self.d] };
            let mut commutes_with_all = true;
            for b_code in 0..vn {
                let b = GroupElement { v: digits(b_code, self.n), w: vec![0; self.d] };
                let c = chain(&a, &b);
                if c != id {
                    commutes_with_all = false;
                }
                span.insert(&c.w);
                seen.insert(c);
            }
            if commutes_with_all {
                central_v += 1;
            }
        }
        let mut commutators_central = true;
        for c in &seen {
            for b_code in 0..vn {
                let b = GroupElement { v: digits(b_code, self.n), w: vec![0; self.d] };
                if chain(c, &b) != id {
                    commutators_central = false;
                }
            }
        }
        let mut exponent_divides_p = true;
        for code in 0..order as u64 {
            let all = digits(code, self.n + self.d);
            let el = GroupElement { v: all[..self.n].to_vec(), w: all[self.n..].to_vec() };
            let mut acc = self.identity();
            for _ in 0..p {
                acc = self.mul(&acc, &el);
            }
            if acc != id {
                exponent_divides_p = false;
            }
        }
        Some(EnumerationCheck {
            centre_size: central_v as u128 * (p as u128).pow(self.d as u32),
            derived_dim: span.dim(),
            exponent_divides_p,
            commutators_central,
        })
    }
}

/// Builds the matrix B from structure constants: each relation
/// `(i, j, coeffs)` declares t(e_i, e_j) = coeffs (a d-vector), i.e.
/// B^(k)_{ij} = coeffs[k], mirrored skew-symmetrically.  Unlisted
/// pairs commute.
///
/// # Errors
///
/// [`GroupError::BadRelation`] when i = j, an index is out of range,
/// a coefficient vector has the wrong length, or a pair (in either
/// order) appears twice.
pub fn matrix_from_structure_constants(
    field: PrimeField,
    n: usize,
    d: usize,
    relations: &[(usize, usize, Vec<i64>)],
) -> Result<LinFormMatrix, GroupError> {
    use crate::poly::Ring;
    let ring = Ring::with_letter(field, d, 'y');
    let mut slices = vec![FpMatrix::zero(field, n, n); d];
    let mut seen = std::collections::HashSet::new();
    for (i, j, coeffs) in relations {
        let (i, j) = (*i, *j);
        if i == j {
            return Err(GroupError::BadRelation { i, j, reason: "generators must differ" });
        }
        if i >= n || j >= n {
            return Err(GroupError::BadRelation { i, j, reason: "generator index out of range" });
        }
        if coeffs.len() != d {
            return Err(GroupError::BadRelation { i, j, reason: "need one coefficient per relation variable" });
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(GroupError::BadRelation { i, j, reason: "pair listed twice" });
        }
        for (k, &c) in coeffs.iter().enumerate() {
            let c = field.elem(c).value();
            slices[k].set(i, j, c);
            slices[k].set(j, i, field.neg_raw(c));
        }
    }
    Ok(LinFormMatrix::from_slices(ring, n, n, slices))
}
