//! Matrices of linear forms, 3-tensors and their flattenings.
//!
//! A matrix of linear forms D(y) over F_p in variables y_1..y_d is
//! stored as d constant slices D = D^(1) y_1 + ... + D^(d) y_d
//! ([`LinFormMatrix`]); evaluating at a point is a slice combination,
//! and the group-theoretic change of basis
//!
//! ```text
//! D(y)  ->  X D(yZ) X^T,    X in GL_n, Z in GL_d
//! ```
//!
//! decomposes into [`LinFormMatrix::substitute_vars`] and
//! [`LinFormMatrix::conjugate`].  A [`Tensor3`] holds structure
//! constants a_{ijk}; its three flattenings are matrices of linear
//! forms, and [`Tensor3::act`] is the natural GL x GL x GL action on
//! basis vectors, alpha(e_i) = sum_l A_{li} e_l.
//!
//! The [`LinFormMatrix::adjoint`] of a square D picks up the other
//! pencil hidden in the same tensor: the n x d matrix whose (i, k)
//! entry is sum_j D^(k)_{ij} x_j, recording how D(y) acts on a fixed
//! vector x instead of on the variables.

use crate::gf::PrimeField;
use crate::poly::{Monomial, Poly, Ring};
use std::fmt;

/// A dense matrix over F_p with canonical `u64` entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

fn check_same_shape(a: &FpMatrix, b: &FpMatrix, op: &str) {
    assert!(a.field == b.field, "cannot {op} matrices over different fields");
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "cannot {op} a {}x{} and a {}x{} matrix",
        a.rows, a.cols, b.rows, b.cols
    );
}

impl FpMatrix {
    /// The zero matrix of the given shape.
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    /// The n x n identity.
    pub fn identity(field: PrimeField, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// A matrix from signed integer rows, reduced mod p.
    ///
    /// # Panics
    ///
    /// Panics on ragged rows or an empty row set.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> FpMatrix {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row.iter().map(|&v| field.elem(v).value()));
        }
        FpMatrix { field, rows: rows.len(), cols, data }
    }

    /// The coefficient field.
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The entry at (i, j), canonical.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    /// Sets the entry at (i, j) from a canonical value.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        debug_assert!(v < self.field.p());
        self.data[i * self.cols + j] = v;
    }

    /// Sets the entry at (i, j) from a signed value, reducing mod p.
    pub fn set_signed(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = self.field.elem(v).value();
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// The underlying row-major data.
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    /// The transpose.
    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// `self * c` for a canonical scalar.
    pub fn scale_raw(&self, c: u64) -> FpMatrix {
        let data = self.data.iter().map(|&v| self.field.mul_raw(v, c)).collect();
        FpMatrix { data, ..*self }
    }

    /// `v * self` for a row vector `v` of length `rows`.
    pub fn left_mul_row(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "row vector length must match rows");
        let mut out = vec![0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] = self.field.add_raw(out[j], self.field.mul_raw(vi, self.get(i, j)));
            }
        }
        out
    }

    /// The rank, by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut scratch = self.data.clone();
        rank_in_place(self.field, &mut scratch, self.rows, self.cols, self.cols.min(self.rows) + 1)
    }

    /// True when square and of full rank.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// The inverse, when it exists, by Gauss-Jordan on `[self | I]`.
    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut b = FpMatrix::identity(f, n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| a.get(i, col) != 0)?;
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
                b.data.swap(col * n + j, pivot * n + j);
            }
            let inv = f.inv_raw(a.get(col, col));
            for j in 0..n {
                a.set(col, j, f.mul_raw(a.get(col, j), inv));
                b.set(col, j, f.mul_raw(b.get(col, j), inv));
            }
            for i in 0..n {
                if i != col && a.get(i, col) != 0 {
                    let factor = a.get(i, col);
                    for j in 0..n {
                        let va = f.sub_raw(a.get(i, j), f.mul_raw(factor, a.get(col, j)));
                        let vb = f.sub_raw(b.get(i, j), f.mul_raw(factor, b.get(col, j)));
                        a.set(i, j, va);
                        b.set(i, j, vb);
                    }
                }
            }
        }
        Some(b)
    }

    /// One solution of `self * x = rhs` (column convention), if any.
    pub fn solve(&self, rhs: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(rhs.len(), self.rows);
        let f = self.field;
        let cols = self.cols;
        // Row-reduce the augmented matrix [self | rhs].
        let mut aug: Vec<u64> = Vec::with_capacity(self.rows * (cols + 1));
        for i in 0..self.rows {
            aug.extend_from_slice(self.row(i));
            aug.push(rhs[i]);
        }
        let w = cols + 1;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(pr) = (r..self.rows).find(|&i| aug[i * w + c] != 0) else {
                continue;
            };
            for j in 0..w {
                aug.swap(r * w + j, pr * w + j);
            }
            let inv = f.inv_raw(aug[r * w + c]);
            for j in c..w {
                aug[r * w + j] = f.mul_raw(aug[r * w + j], inv);
            }
            for i in 0..self.rows {
                if i != r && aug[i * w + c] != 0 {
                    let factor = aug[i * w + c];
                    for j in c..w {
                        let sub = f.mul_raw(factor, aug[r * w + j]);
                        aug[i * w + j] = f.sub_raw(aug[i * w + j], sub);
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        // Inconsistent if a zero row has a nonzero right-hand side.
        for i in r..self.rows {
            if aug[i * w + cols] != 0 {
                return None;
            }
        }
        let mut x = vec![0; cols];
        for &(pr, pc) in &pivots {
            x[pc] = aug[pr * w + cols];
        }
        Some(x)
    }

    /// A basis of the right kernel `{ x : self * x = 0 }`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut m = self.data.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut r = 0;
        for c in 0..cols {
            let Some(pr) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            for j in 0..cols {
                m.swap(r * cols + j, pr * cols + j);
            }
            let inv = f.inv_raw(m[r * cols + c]);
            for j in c..cols {
                m[r * cols + j] = f.mul_raw(m[r * cols + j], inv);
            }
            for i in 0..rows {
                if i != r && m[i * cols + c] != 0 {
                    let factor = m[i * cols + c];
                    for j in c..cols {
                        let sub = f.mul_raw(factor, m[r * cols + j]);
                        m[i * cols + j] = f.sub_raw(m[i * cols + j], sub);
                    }
                }
            }
            pivot_of_col[c] = Some(r);
            r += 1;
        }
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![0; cols];
            v[free] = 1;
            for c in 0..cols {
                if let Some(pr) = pivot_of_col[c] {
                    v[c] = f.neg_raw(m[pr * cols + free]);
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Gaussian elimination on a scratch buffer; stops early once `cap`
/// pivots are found and returns the count found.  With
/// `cap = min(rows, cols) + 1` this is the plain rank.
pub(crate) fn rank_in_place(
    field: PrimeField,
    m: &mut [u64],
    rows: usize,
    cols: usize,
    cap: usize,
) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank >= rows || rank >= cap {
            break;
        }
        let Some(pr) = (rank..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        if pr != rank {
            for j in c..cols {
                m.swap(rank * cols + j, pr * cols + j);
            }
        }
        let inv = field.inv_raw(m[rank * cols + c]);
        for i in (rank + 1)..rows {
            let lead = m[i * cols + c];
            if lead == 0 {
                continue;
            }
            let factor = field.mul_raw(lead, inv);
            m[i * cols + c] = 0;
            for j in (c + 1)..cols {
                let sub = field.mul_raw(factor, m[rank * cols + j]);
                m[i * cols + j] = field.sub_raw(m[i * cols + j], sub);
            }
        }
        rank += 1;
    }
    rank
}

/// An incremental row-echelon basis over F_p: rows are kept reduced
/// with strictly increasing pivot columns, so inserting a vector
/// doubles as a linear-independence test.
pub(crate) struct Echelon {
    field: PrimeField,
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub(crate) fn new(field: PrimeField, width: usize) -> Echelon {
        Echelon { field, width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    pub(crate) fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut v = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                let scale = f.mul_raw(c, f.inv_raw(row[piv]));
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.sub_raw(*x, f.mul_raw(scale, r));
                }
            }
        }
        v
    }

    /// Reduces `v` against the basis; if a nonzero remainder is left,
    /// inserts it (keeping echelon shape) and returns true.
    pub(crate) fn insert(&mut self, v: &[u64]) -> bool {
        if self.is_full() {
            return false;
        }
        let v = self.reduce(v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let at = self.pivots.partition_point(|&q| q < piv);
        self.rows.insert(at, v);
        self.pivots.insert(at, piv);
        true
    }
}

impl std::ops::Add for &FpMatrix {
    type Output = FpMatrix;
    fn add(self, rhs: &FpMatrix) -> FpMatrix {
        check_same_shape(self, rhs, "add");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| self.field.add_raw(a, b))
            .collect();
        FpMatrix { data, ..*self }
    }
}

impl std::ops::Sub for &FpMatrix {
    type Output = FpMatrix;
    fn sub(self, rhs: &FpMatrix) -> FpMatrix {
        check_same_shape(self, rhs, "subtract");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| self.field.sub_raw(a, b))
            .collect();
        FpMatrix { data, ..*self }
    }
}

impl std::ops::Neg for &FpMatrix {
    type Output = FpMatrix;
    fn neg(self) -> FpMatrix {
        let data = self.data.iter().map(|&a| self.field.neg_raw(a)).collect();
        FpMatrix { data, ..*self }
    }
}

impl std::ops::Mul for &FpMatrix {
    type Output = FpMatrix;
    fn mul(self, rhs: &FpMatrix) -> FpMatrix {
        assert!(self.field == rhs.field, "cannot multiply matrices over different fields");
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let f = self.field;
        let mut out = FpMatrix::zero(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = f.add_raw(out.get(i, j), f.mul_raw(a, rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Which index of a 3-tensor becomes the variable index when
/// flattening.  The remaining two indices become the matrix shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Variables x_i from the first index: slices are s x t.
    First,
    /// Variables y_j from the second index: slices are r x t.
    Second,
    /// Variables z_k from the third index: slices are r x s.
    Third,
}

impl Axis {
    /// The conventional display letter of the flattening's variables.
    pub fn letter(self) -> char {
        match self {
            Axis::First => 'x',
            Axis::Second => 'y',
            Axis::Third => 'z',
        }
    }
}

/// A 3-tensor a_{ijk} over F_p with shape r x s x t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor3 {
    field: PrimeField,
    dims: [usize; 3],
    data: Vec<u64>,
}

impl Tensor3 {
    /// The zero tensor.
    pub fn zero(field: PrimeField, dims: [usize; 3]) -> Tensor3 {
        Tensor3 { field, dims, data: vec![0; dims[0] * dims[1] * dims[2]] }
    }

    /// A tensor from `(i, j, k, coefficient)` quadruples (0-based);
    /// repeated positions accumulate.
    pub fn from_triples(field: PrimeField, dims: [usize; 3], entries: &[(usize, usize, usize, i64)]) -> Tensor3 {
        let mut t = Tensor3::zero(field, dims);
        for &(i, j, k, c) in entries {
            let idx = t.index(i, j, k);
            t.data[idx] = field.add_raw(t.data[idx], field.elem(c).value());
        }
        t
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        assert!(i < self.dims[0] && j < self.dims[1] && k < self.dims[2], "tensor index out of range");
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    /// The coefficient field.
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// The shape (r, s, t).
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// The coefficient a_{ijk}.
    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.data[self.index(i, j, k)]
    }

    /// The flattening along `axis`, as a matrix of linear forms with
    /// the axis's conventional letter.
    pub fn flatten(&self, axis: Axis) -> LinFormMatrix {
        let [r, s, t] = self.dims;
        let (rows, cols, nvars) = match axis {
            Axis::First => (s, t, r),
            Axis::Second => (r, t, s),
            Axis::Third => (r, s, t),
        };
        let ring = Ring::with_letter(self.field, nvars, axis.letter());
        let mut slices = vec![FpMatrix::zero(self.field, rows, cols); nvars];
        for i in 0..r {
            for j in 0..s {
                for k in 0..t {
                    let c = self.get(i, j, k);
                    if c == 0 {
                        continue;
                    }
                    match axis {
                        Axis::First => slices[i].set(j, k, c),
                        Axis::Second => slices[j].set(i, k, c),
                        Axis::Third => slices[k].set(i, j, c),
                    }
                }
            }
        }
        LinFormMatrix { ring, rows, cols, slices }
    }

    /// The tensor whose `axis`-flattening is `m`.
    pub fn from_flattening(m: &LinFormMatrix, axis: Axis) -> Tensor3 {
        let (rows, cols, nvars) = (m.rows, m.cols, m.ring.nvars());
        let dims = match axis {
            Axis::First => [nvars, rows, cols],
            Axis::Second => [rows, nvars, cols],
            Axis::Third => [rows, cols, nvars],
        };
        let mut t = Tensor3::zero(m.ring.field(), dims);
        for (v, slice) in m.slices.iter().enumerate() {
            for a in 0..rows {
                for b in 0..cols {
                    let c = slice.get(a, b);
                    if c == 0 {
                        continue;
                    }
                    let idx = match axis {
                        Axis::First => t.index(v, a, b),
                        Axis::Second => t.index(a, v, b),
                        Axis::Third => t.index(a, b, v),
                    };
                    t.data[idx] = c;
                }
            }
        }
        t
    }

    /// The action of (A1, A2, A3) on basis vectors,
    /// alpha(e_i) = sum_l (A1)_{li} e_l and likewise for the other two
    /// factors: (alpha t)_{lmn} = sum a_{ijk} (A1)_{li} (A2)_{mj} (A3)_{nk}.
    pub fn act(&self, a1: &FpMatrix, a2: &FpMatrix, a3: &FpMatrix) -> Tensor3 {
        let [r, s, t] = self.dims;
        for (m, d) in [(a1, r), (a2, s), (a3, t)] {
            assert!(m.field == self.field, "matrix field must match tensor field");
            assert!(m.rows == d && m.cols == d, "GL factor has wrong shape");
        }
        let f = self.field;
        let mut out = Tensor3::zero(f, self.dims);
        for i in 0..r {
            for j in 0..s {
                for k in 0..t {
                    let a = self.get(i, j, k);
                    if a == 0 {
                        continue;
                    }
                    for l in 0..r {
                        let c1 = f.mul_raw(a, a1.get(l, i));
                        if c1 == 0 {
                            continue;
                        }
                        for m in 0..s {
                            let c2 = f.mul_raw(c1, a2.get(m, j));
                            if c2 == 0 {
                                continue;
                            }
                            for n in 0..t {
                                let idx = out.index(l, m, n);
                                out.data[idx] =
                                    f.add_raw(out.data[idx], f.mul_raw(c2, a3.get(n, k)));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// A rows x cols matrix whose entries are linear forms in the ring's
/// variables, stored as one constant slice per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinFormMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    slices: Vec<FpMatrix>,
}

impl LinFormMatrix {
    /// The zero matrix of linear forms.
    pub fn zero(ring: Ring, rows: usize, cols: usize) -> LinFormMatrix {
        let slices = vec![FpMatrix::zero(ring.field(), rows, cols); ring.nvars()];
        LinFormMatrix { ring, rows, cols, slices }
    }

    /// A matrix from its variable slices (one per ring variable).
    ///
    /// # Panics
    ///
    /// Panics when the slice count or any slice shape disagrees with
    /// the ring and the stated shape.
    pub fn from_slices(ring: Ring, rows: usize, cols: usize, slices: Vec<FpMatrix>) -> LinFormMatrix {
        assert_eq!(slices.len(), ring.nvars(), "one slice per variable");
        for s in &slices {
            assert!(s.field() == ring.field(), "slice over the wrong field");
            assert!(s.rows == rows && s.cols == cols, "slice of the wrong shape");
        }
        LinFormMatrix { ring, rows, cols, slices }
    }

    /// A matrix from signed integer slices, reduced mod p.
    pub fn from_int_slices(ring: Ring, slices: &[Vec<Vec<i64>>]) -> LinFormMatrix {
        assert!(!slices.is_empty(), "need at least one slice");
        let mats: Vec<FpMatrix> = slices
            .iter()
            .map(|s| FpMatrix::from_rows(ring.field(), s))
            .collect();
        let (rows, cols) = (mats[0].rows, mats[0].cols);
        LinFormMatrix::from_slices(ring, rows, cols, mats)
    }

    /// The ring of the entries.
    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The variable slices.
    pub fn slices(&self) -> &[FpMatrix] {
        &self.slices
    }

    /// The slice of variable `k`.
    pub fn slice(&self, k: usize) -> &FpMatrix {
        &self.slices[k]
    }

    /// The (i, j) entry as a polynomial (a linear form).
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        let nvars = self.ring.nvars();
        let terms: Vec<(Monomial, i64)> = self
            .slices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.get(i, j) != 0)
            .map(|(k, s)| (Monomial::var(nvars, k), s.get(i, j) as i64))
            .collect();
        self.ring.poly_from(&terms)
    }

    /// Evaluation at a point with canonical coordinates:
    /// sum_k v_k D^(k).
    pub fn evaluate(&self, v: &[u64]) -> FpMatrix {
        assert_eq!(v.len(), self.ring.nvars(), "one coordinate per variable");
        let f = self.ring.field();
        let mut out = FpMatrix::zero(f, self.rows, self.cols);
        for (slice, &c) in self.slices.iter().zip(v) {
            if c == 0 {
                continue;
            }
            for (o, &s) in out.data.iter_mut().zip(&slice.data) {
                *o = f.add_raw(*o, f.mul_raw(c, s));
            }
        }
        out
    }

    /// The transpose (entrywise, i.e. each slice transposed).
    pub fn transpose(&self) -> LinFormMatrix {
        let slices = self.slices.iter().map(FpMatrix::transpose).collect();
        LinFormMatrix { ring: self.ring, rows: self.cols, cols: self.rows, slices }
    }

    /// The entrywise negation.
    pub fn neg(&self) -> LinFormMatrix {
        let slices = self.slices.iter().map(|s| -s).collect();
        LinFormMatrix { slices, ..self.clone() }
    }

    /// True when square and skew-symmetric with zero diagonal (each
    /// slice satisfies the condition).
    pub fn is_skew(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let f = self.ring.field();
        self.slices.iter().all(|s| {
            (0..self.rows).all(|i| {
                s.get(i, i) == 0
                    && (0..i).all(|j| s.get(i, j) == f.neg_raw(s.get(j, i)))
            })
        })
    }

    /// The substitution y -> yZ (row-vector convention): the result is
    /// D'(y) = D(yZ), with slices D'^(j) = sum_i Z_{ji} D^(i).
    pub fn substitute_vars(&self, z: &FpMatrix) -> LinFormMatrix {
        let d = self.ring.nvars();
        assert!(z.field == self.ring.field(), "substitution matrix over the wrong field");
        assert!(z.rows == d && z.cols == d, "substitution matrix must be d x d");
        let f = self.ring.field();
        let mut slices = vec![FpMatrix::zero(f, self.rows, self.cols); d];
        for (j, out) in slices.iter_mut().enumerate() {
            for i in 0..d {
                let c = z.get(j, i);
                if c == 0 {
                    continue;
                }
                for (o, &s) in out.data.iter_mut().zip(&self.slices[i].data) {
                    *o = f.add_raw(*o, f.mul_raw(c, s));
                }
            }
        }
        LinFormMatrix { slices, ..self.clone() }
    }

    /// `L * D * R` slice by slice, for constant matrices L and R.
    pub fn left_right(&self, l: &FpMatrix, r: &FpMatrix) -> LinFormMatrix {
        assert_eq!(l.cols, self.rows, "left factor has wrong shape");
        assert_eq!(r.rows, self.cols, "right factor has wrong shape");
        let slices: Vec<FpMatrix> = self.slices.iter().map(|s| &(l * s) * r).collect();
        LinFormMatrix { ring: self.ring, rows: l.rows, cols: r.cols, slices }
    }

    /// The congruence `X * D * X^T` slice by slice.
    pub fn conjugate(&self, x: &FpMatrix) -> LinFormMatrix {
        self.left_right(x, &x.transpose())
    }

    /// The full change of basis `X D(yZ) X^T`.
    pub fn transform(&self, x: &FpMatrix, z: &FpMatrix) -> LinFormMatrix {
        self.substitute_vars(z).conjugate(x)
    }

    /// The adjoint: for a rows x cols matrix D(y) in d variables, the
    /// rows x d matrix in cols variables whose (i, k) entry is
    /// sum_j D^(k)_{ij} x_j - the same tensor read with the column
    /// index as the variable.  Its variables always print as `x`.
    pub fn adjoint(&self) -> LinFormMatrix {
        let d = self.ring.nvars();
        let ring = Ring::with_letter(self.ring.field(), self.cols, 'x');
        let mut slices = vec![FpMatrix::zero(ring.field(), self.rows, d); self.cols];
        for k in 0..d {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    let c = self.slices[k].get(i, j);
                    if c != 0 {
                        slices[j].set(i, k, c);
                    }
                }
            }
        }
        LinFormMatrix { ring, rows: self.rows, cols: d, slices }
    }

    /// The submatrix on the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> LinFormMatrix {
        let slices: Vec<FpMatrix> = self
            .slices
            .iter()
            .map(|s| {
                let mut sub = FpMatrix::zero(s.field, rows.len(), cols.len());
                for (a, &i) in rows.iter().enumerate() {
                    for (b, &j) in cols.iter().enumerate() {
                        sub.set(a, b, s.get(i, j));
                    }
                }
                sub
            })
            .collect();
        LinFormMatrix { ring: self.ring, rows: rows.len(), cols: cols.len(), slices }
    }

    /// The determinant as a polynomial, by cofactor expansion along the
    /// first row.  Exponential in the size; intended for the small
    /// minors this crate works with.
    pub fn det_poly(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.det_rec(&idx, &idx)
    }

    fn det_rec(&self, rows: &[usize], cols: &[usize]) -> Poly {
        if rows.is_empty() {
            return self.ring.one();
        }
        if rows.len() == 1 {
            return self.entry(rows[0], cols[0]);
        }
        let mut acc = self.ring.zero();
        let sub_rows = &rows[1..];
        for (c, &j) in cols.iter().enumerate() {
            let e = self.entry(rows[0], j);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&jj| jj != j)
                .collect();
            let minor = self.det_rec(sub_rows, &rest);
            let signed = if c % 2 == 0 { minor } else { -minor };
            acc = &acc + &(&e * &signed);
        }
        acc
    }

    /// The Pfaffian of a skew-symmetric matrix of even size, by
    /// expansion along the first row:
    /// Pf(D) = sum_j (-1)^j d_{1j} Pf(D minus rows/cols {1, j}).
    /// The sign convention makes the standard symplectic block
    /// y * (e_{12} - e_{21}) have Pfaffian +y.
    ///
    /// # Panics
    ///
    /// Panics when the matrix is not skew or its size is odd.
    pub fn pfaffian(&self) -> Poly {
        assert!(self.is_skew(), "Pfaffian needs a skew-symmetric matrix");
        assert!(self.rows % 2 == 0, "Pfaffian needs even size");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.pf_rec(&idx)
    }

    fn pf_rec(&self, idx: &[usize]) -> Poly {
        if idx.is_empty() {
            return self.ring.one();
        }
        let mut acc = self.ring.zero();
        let i = idx[0];
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            let e = self.entry(i, j);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&k| k != i && k != j)
                .collect();
            let sub = self.pf_rec(&rest);
            // idx = [i, ..., j at position pos]: the sign is (-1)^pos.
            let signed = if pos % 2 == 1 { sub } else { -sub };
            acc = &acc + &(&e * &signed);
        }
        acc
    }
}

impl fmt::Display for LinFormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Errors from interpreting prime-generic integer matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntMatrixError {
    /// A slice is missing, ragged, or not n x n.
    BadShape(String),
    /// An omega slot is out of range, on the diagonal, or collides
    /// with a nonzero base entry.
    BadOmegaSlot { slot: (usize, usize, usize), reason: &'static str },
}

impl fmt::Display for IntMatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntMatrixError::BadShape(msg) => write!(f, "bad matrix shape: {msg}"),
            IntMatrixError::BadOmegaSlot { slot: (k, i, j), reason } => {
                write!(f, "bad omega slot (slice {k}, row {i}, col {j}): {reason}")
            }
        }
    }
}

impl std::error::Error for IntMatrixError {}

/// A square matrix of linear forms with integer coefficients, defined
/// uniformly over all odd primes.
///
/// Entries marked as omega slots are filled, at reduction time, with
/// the field's primitive element (and with its negative at the
/// mirrored position), so a single description can use "a fixed
/// generator of F_p^*" without naming a prime.  Slot indices here are
/// 0-based; the on-disk format is 1-based and converted at parse time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    nvars: usize,
    slices: Vec<Vec<Vec<i64>>>,
    omega_slots: Vec<(usize, usize, usize)>,
}

impl IntMatrix {
    /// Validates shapes and slots.  Omega slots must be off-diagonal
    /// and sit on zero base entries (both the slot and its mirror).
    pub fn new(
        n: usize,
        nvars: usize,
        slices: Vec<Vec<Vec<i64>>>,
        omega_slots: Vec<(usize, usize, usize)>,
    ) -> Result<IntMatrix, IntMatrixError> {
        if slices.len() != nvars {
            return Err(IntMatrixError::BadShape(format!(
                "expected {nvars} slices, found {}",
                slices.len()
            )));
        }
        for (k, s) in slices.iter().enumerate() {
            if s.len() != n || s.iter().any(|row| row.len() != n) {
                return Err(IntMatrixError::BadShape(format!("slice {k} is not {n}x{n}")));
            }
        }
        for &(k, i, j) in &omega_slots {
            let slot = (k, i, j);
            if k >= nvars || i >= n || j >= n {
                return Err(IntMatrixError::BadOmegaSlot { slot, reason: "index out of range" });
            }
            if i == j {
                return Err(IntMatrixError::BadOmegaSlot { slot, reason: "on the diagonal" });
            }
            if slices[k][i][j] != 0 || slices[k][j][i] != 0 {
                return Err(IntMatrixError::BadOmegaSlot {
                    slot,
                    reason: "base entry is not zero",
                });
            }
        }
        Ok(IntMatrix { n, nvars, slices, omega_slots })
    }

    /// Side length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// The integer slices.
    pub fn slices(&self) -> &[Vec<Vec<i64>>] {
        &self.slices
    }

    /// The 0-based omega slots.
    pub fn omega_slots(&self) -> &[(usize, usize, usize)] {
        &self.omega_slots
    }

    /// The same matrix with `extra` zero rows and columns appended.
    /// For a skew matrix this describes the direct product of its
    /// group with an elementary abelian group of rank `extra`.
    pub fn padded(&self, extra: usize) -> IntMatrix {
        let n = self.n + extra;
        let slices = self
            .slices
            .iter()
            .map(|s| {
                s.iter()
                    .map(|row| {
                        let mut row = row.clone();
                        row.resize(n, 0);
                        row
                    })
                    .chain(std::iter::repeat_with(|| vec![0; n]).take(extra))
                    .collect()
            })
            .collect();
        IntMatrix { n, nvars: self.nvars, slices, omega_slots: self.omega_slots.clone() }
    }

    /// The reduction mod p: integer entries reduce canonically, omega
    /// slots become the primitive element omega (and -omega mirrored).
    /// The result uses variable letter `y`.
    pub fn reduce(&self, field: PrimeField) -> LinFormMatrix {
        let ring = Ring::with_letter(field, self.nvars, 'y');
        let mut out = LinFormMatrix::from_int_slices(ring, &self.slices);
        if !self.omega_slots.is_empty() {
            let omega = field.primitive_element().value();
            for &(k, i, j) in &self.omega_slots {
                out.slices[k].set(i, j, omega);
                out.slices[k].set(j, i, field.neg_raw(omega));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use crate::testutil::{
        four_generator_family, random_invertible, random_linform, random_matrix, random_skew,
    };
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn matrix_basics() {
        let f5 = f(5);
        let m = FpMatrix::from_rows(f5, &[vec![1, 2], vec![3, -1]]);
        assert_eq!(m.get(1, 1), 4);
        assert_eq!(m.transpose().get(0, 1), 3);
        let id = FpMatrix::identity(f5, 2);
        assert_eq!(&m * &id, m);
        assert_eq!((&m - &m), FpMatrix::zero(f5, 2, 2));
        assert_eq!(m.left_mul_row(&[1, 1]), vec![4, 1]);
    }

    #[test]
    fn rank_inverse_solve_kernel() {
        let f7 = f(7);
        let m = FpMatrix::from_rows(f7, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        assert!(!m.is_invertible());
        let inv = FpMatrix::from_rows(f7, &[vec![1, 2], vec![3, 4]]);
        let ii = inv.inverse().unwrap();
        assert_eq!(&inv * &ii, FpMatrix::identity(f7, 2));
        // Solve a consistent singular system and reject an inconsistent one.
        let x = m.solve(&[3, 6, 1]).unwrap();
        for (i, &b) in [3u64, 6, 1].iter().enumerate() {
            let got: u64 = (0..3).fold(0, |acc, j| {
                f7.add_raw(acc, f7.mul_raw(m.get(i, j), x[j]))
            });
            assert_eq!(got, b);
        }
        assert_eq!(m.solve(&[1, 0, 0]), None);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            for i in 0..3 {
                let got: u64 = (0..3).fold(0, |acc, j| {
                    f7.add_raw(acc, f7.mul_raw(m.get(i, j), v[j]))
                });
                assert_eq!(got, 0);
            }
        }
    }

    /// The running example tensor: seven basis triples in a 3 x 3 x 2
    /// tensor, whose flattenings are known explicitly.
    fn example_tensor(p: u64) -> Tensor3 {
        Tensor3::from_triples(
            f(p),
            [3, 3, 2],
            &[
                (0, 0, 0, 1),
                (0, 2, 1, 1),
                (1, 0, 1, 1),
                (1, 1, 0, 1),
                (1, 1, 1, 1),
                (2, 0, 0, 1),
                (2, 2, 0, 1),
            ],
        )
    }

    #[test]
    fn flattenings_of_the_running_example() {
        let t = example_tensor(7);
        let f7 = f(7);
        let rx = Ring::with_letter(f7, 3, 'x');
        let ry = Ring::with_letter(f7, 3, 'y');
        let rz = Ring::with_letter(f7, 2, 'z');
        // F1 = [[x1+x3, x2], [x2, x2], [x3, x1]]
        let f1 = LinFormMatrix::from_int_slices(
            rx,
            &[
                vec![vec![1, 0], vec![0, 0], vec![0, 1]],
                vec![vec![0, 1], vec![1, 1], vec![0, 0]],
                vec![vec![1, 0], vec![0, 0], vec![1, 0]],
            ],
        );
        assert_eq!(t.flatten(Axis::First), f1);
        // F2 = [[y1, y3], [y2, y1+y2], [y1+y3, 0]]
        let f2 = LinFormMatrix::from_int_slices(
            ry,
            &[
                vec![vec![1, 0], vec![0, 1], vec![1, 0]],
                vec![vec![0, 0], vec![1, 1], vec![0, 0]],
                vec![vec![0, 1], vec![0, 0], vec![1, 0]],
            ],
        );
        assert_eq!(t.flatten(Axis::Second), f2);
        // F3 = [[z1, 0, z2], [z2, z1+z2, 0], [z1, 0, z1]]
        let f3 = LinFormMatrix::from_int_slices(
            rz,
            &[
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1]],
                vec![vec![0, 0, 1], vec![1, 1, 0], vec![0, 0, 0]],
            ],
        );
        assert_eq!(t.flatten(Axis::Third), f3);
        // Round trip back to the tensor from each flattening.
        assert_eq!(Tensor3::from_flattening(&f1, Axis::First), t);
        assert_eq!(Tensor3::from_flattening(&f2, Axis::Second), t);
        assert_eq!(Tensor3::from_flattening(&f3, Axis::Third), t);
    }

    #[test]
    fn action_on_a_small_tensor_matches_hand_computation() {
        // t = e1 f1 g1 + e1 f2 g2 + e2 f2 g1 in 2 x 2 x 2.
        let f5 = f(5);
        let t = Tensor3::from_triples(f5, [2, 2, 2], &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 1, 0, 1)]);
        let a1 = FpMatrix::from_rows(f5, &[vec![1, 0], vec![1, 1]]);
        let a2 = FpMatrix::from_rows(f5, &[vec![1, -1], vec![-1, 0]]);
        let a3 = FpMatrix::from_rows(f5, &[vec![1, -1], vec![0, 1]]);
        let moved = t.act(&a1, &a2, &a3);
        let rx = Ring::with_letter(f5, 2, 'x');
        let ry = Ring::with_letter(f5, 2, 'y');
        let rz = Ring::with_letter(f5, 2, 'z');
        // F1(moved) = [[2x1+x2, -x1-x2], [-x1-x2, 0]]
        let f1 = LinFormMatrix::from_int_slices(
            rx,
            &[
                vec![vec![2, -1], vec![-1, 0]],
                vec![vec![1, -1], vec![-1, 0]],
            ],
        );
        assert_eq!(moved.flatten(Axis::First), f1);
        // F2(moved) = [[2y1-y2, -y1], [y1-y2, -y1]]
        let f2 = LinFormMatrix::from_int_slices(
            ry,
            &[
                vec![vec![2, -1], vec![1, -1]],
                vec![vec![-1, 0], vec![-1, 0]],
            ],
        );
        assert_eq!(moved.flatten(Axis::Second), f2);
        // F3(moved) = [[2z1-z2, -z1], [z1-z2, -z1]]
        let f3 = LinFormMatrix::from_int_slices(
            rz,
            &[
                vec![vec![2, -1], vec![1, -1]],
                vec![vec![-1, 0], vec![-1, 0]],
            ],
        );
        assert_eq!(moved.flatten(Axis::Third), f3);
    }

    #[test]
    fn skew_matrices_have_opposite_first_flattenings() {
        // B = [[0, z1, z2], [-z1, 0, z1+z2], [-z2, -z1-z2, 0]].
        let f5 = f(5);
        let rz = Ring::with_letter(f5, 2, 'z');
        let b = LinFormMatrix::from_int_slices(
            rz,
            &[
                vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]],
                vec![vec![0, 0, 1], vec![0, 0, 1], vec![-1, -1, 0]],
            ],
        );
        assert!(b.is_skew());
        let t = Tensor3::from_flattening(&b, Axis::Third);
        let f1 = t.flatten(Axis::First);
        let f2 = t.flatten(Axis::Second);
        assert_eq!(f1.slices(), f2.neg().slices());
        assert_eq!(t.flatten(Axis::Third).slices(), b.slices());
    }

    #[test]
    fn evaluation_combines_slices() {
        let f7 = f(7);
        let ry = Ring::with_letter(f7, 2, 'y');
        let d = LinFormMatrix::from_int_slices(
            ry,
            &[
                vec![vec![1, 0], vec![0, 2]],
                vec![vec![0, 3], vec![1, 0]],
            ],
        );
        // At (2, 1): 2*slice1 + slice2.
        let got = d.evaluate(&[2, 1]);
        let want = FpMatrix::from_rows(f7, &[vec![2, 3], vec![1, 4]]);
        assert_eq!(got, want);
        let e = d.entry(0, 1);
        assert_eq!(e.to_string(), "3*y2");
        assert_eq!(e.eval_raw(&[2, 1]), 3);
    }

    #[test]
    fn substitution_then_evaluation_commutes() {
        let mut rng = StdRng::seed_from_u64(11);
        for p in [3u64, 5, 7] {
            let field = f(p);
            let ry = Ring::with_letter(field, 3, 'y');
            for _ in 0..40 {
                let d = random_linform(&mut rng, ry, 4, 4);
                let z = random_matrix(&mut rng, field, 3, 3);
                let v: Vec<u64> = (0..3).map(|_| rng.gen_range(0..p)).collect();
                // D(yZ) at y = v  equals  D at y = vZ.
                let lhs = d.substitute_vars(&z).evaluate(&v);
                let rhs = d.evaluate(&z.left_mul_row(&v));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn transform_conjugates_evaluations() {
        let mut rng = StdRng::seed_from_u64(12);
        let field = f(5);
        let ry = Ring::with_letter(field, 2, 'y');
        for _ in 0..40 {
            let d = random_linform(&mut rng, ry, 3, 3);
            let x = random_invertible(&mut rng, field, 3);
            let z = random_invertible(&mut rng, field, 2);
            let v: Vec<u64> = (0..2).map(|_| rng.gen_range(0..5)).collect();
            let lhs = d.transform(&x, &z).evaluate(&v);
            let rhs = &(&x * &d.evaluate(&z.left_mul_row(&v))) * &x.transpose();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn adjoints_of_the_four_generator_family() {
        // Check the printed adjoints of B1, B2, B5 and B6 at p = 5,
        // where omega = 2.
        let family = four_generator_family(5);
        let f5 = f(5);
        let rx = Ring::with_letter(f5, 4, 'x');
        let adj = |slices: [[[i64; 3]; 4]; 4]| -> LinFormMatrix {
            let v: Vec<Vec<Vec<i64>>> = slices
                .iter()
                .map(|s| s.iter().map(|r| r.to_vec()).collect())
                .collect();
            LinFormMatrix::from_int_slices(rx, &v)
        };
        // B1*: rows (x2, x3, x4 / -x1, 0, 0 / 0, -x1, 0 / 0, 0, -x1).
        let b1_adj = adj([
            [[0, 0, 0], [-1, 0, 0], [0, -1, 0], [0, 0, -1]],
            [[1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]],
            [[0, 1, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]],
            [[0, 0, 1], [0, 0, 0], [0, 0, 0], [0, 0, 0]],
        ]);
        assert_eq!(family[0].adjoint(), b1_adj);
        // B2*: rows (x2, x3, 0 / -x1, 0, x3 / 0, -x1, -x2 / 0, 0, 0).
        let b2_adj = adj([
            [[0, 0, 0], [-1, 0, 0], [0, -1, 0], [0, 0, 0]],
            [[1, 0, 0], [0, 0, 0], [0, 0, -1], [0, 0, 0]],
            [[0, 1, 0], [0, 0, 1], [0, 0, 0], [0, 0, 0]],
            [[0, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]],
        ]);
        assert_eq!(family[1].adjoint(), b2_adj);
        // B5*: rows (x2, x4, 0 / -x1, x3, 0 / 0, -x2, x4 / 0, -x1, -x3).
        let b5_adj = adj([
            [[0, 0, 0], [-1, 0, 0], [0, 0, 0], [0, -1, 0]],
            [[1, 0, 0], [0, 0, 0], [0, -1, 0], [0, 0, 0]],
            [[0, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, -1]],
            [[0, 1, 0], [0, 0, 0], [0, 0, 1], [0, 0, 0]],
        ]);
        assert_eq!(family[4].adjoint(), b5_adj);
        // B6* at omega = 2:
        // rows (x2, x3, x4 / -x1, 2 x4, 0 / x4, -x1, 0 / -x3, -2 x2, -x1).
        let b6_adj = adj([
            [[0, 0, 0], [-1, 0, 0], [0, -1, 0], [0, 0, -1]],
            [[1, 0, 0], [0, 0, 0], [0, 0, 0], [0, -2, 0]],
            [[0, 1, 0], [0, 0, 0], [0, 0, 0], [-1, 0, 0]],
            [[0, 0, 1], [0, 2, 0], [1, 0, 0], [0, 0, 0]],
        ]);
        assert_eq!(family[5].adjoint(), b6_adj);
        // Every member is skew and 4 x 4 in 3 variables.
        for b in &family {
            assert!(b.is_skew());
            assert_eq!((b.rows(), b.cols()), (4, 4));
            assert_eq!(b.ring().nvars(), 3);
        }
    }

    #[test]
    fn adjoint_repacks_the_same_tensor() {
        // (B*)^(j) slices hold exactly the entries B^(k)_{ij}: check on
        // random matrices by comparing coefficients position by position.
        let mut rng = StdRng::seed_from_u64(13);
        let field = f(7);
        let ry = Ring::with_letter(field, 3, 'y');
        for _ in 0..20 {
            let b = random_linform(&mut rng, ry, 4, 4);
            let adj = b.adjoint();
            assert_eq!((adj.rows(), adj.cols()), (4, 3));
            assert_eq!(adj.ring().nvars(), 4);
            for k in 0..3 {
                for i in 0..4 {
                    for j in 0..4 {
                        assert_eq!(adj.slice(j).get(i, k), b.slice(k).get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn pfaffian_small_cases() {
        let field = f(7);
        let r1 = Ring::with_letter(field, 1, 'y');
        // The standard symplectic block times y1 has Pfaffian +y1.
        let block = LinFormMatrix::from_int_slices(
            r1,
            &[vec![vec![0, 1], vec![-1, 0]]],
        );
        assert_eq!(block.pfaffian(), r1.var(0).unwrap());
        // Two symplectic blocks: Pfaffian y1^2.
        let two = LinFormMatrix::from_int_slices(
            r1,
            &[vec![
                vec![0, 1, 0, 0],
                vec![-1, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, -1, 0],
            ]],
        );
        let y1 = r1.var(0).unwrap();
        assert_eq!(two.pfaffian(), &y1 * &y1);
        // B5 has Pfaffian y1 y3 + y2^2; B1 is degenerate with Pfaffian 0.
        let family = four_generator_family(7);
        let ry = Ring::with_letter(field, 3, 'y');
        let y = |i: usize| ry.var(i).unwrap();
        assert_eq!(family[4].pfaffian(), &(&y(0) * &y(2)) + &(&y(1) * &y(1)));
        assert!(family[0].pfaffian().is_zero());
    }

    #[test]
    fn pfaffian_squares_to_the_determinant() {
        let mut rng = StdRng::seed_from_u64(14);
        for p in [3u64, 5] {
            let field = f(p);
            for n in [2usize, 4, 6] {
                let ry = Ring::with_letter(field, 2, 'y');
                for _ in 0..8 {
                    let b = random_skew(&mut rng, ry, n);
                    let pf = b.pfaffian();
                    assert_eq!(&pf * &pf, b.det_poly());
                }
            }
        }
    }

    #[test]
    fn odd_skew_determinant_vanishes() {
        let mut rng = StdRng::seed_from_u64(15);
        let ry = Ring::with_letter(f(5), 3, 'y');
        for _ in 0..10 {
            let b = random_skew(&mut rng, ry, 5);
            assert!(b.det_poly().is_zero());
        }
    }

    #[test]
    fn omega_slots_reduce_per_prime() {
        let m = IntMatrix::new(
            2,
            1,
            vec![vec![vec![0, 0], vec![0, 0]]],
            vec![(0, 0, 1)],
        )
        .unwrap();
        // omega = 2 at p = 5, omega = 3 at p = 7.
        let at5 = m.reduce(f(5));
        assert_eq!(at5.slice(0).get(0, 1), 2);
        assert_eq!(at5.slice(0).get(1, 0), 3); // -2 mod 5
        let at7 = m.reduce(f(7));
        assert_eq!(at7.slice(0).get(0, 1), 3);
        assert_eq!(at7.slice(0).get(1, 0), 4); // -3 mod 7
        assert!(at5.is_skew() && at7.is_skew());
    }

    #[test]
    fn int_matrix_validation_errors() {
        assert!(matches!(
            IntMatrix::new(2, 1, vec![], vec![]),
            Err(IntMatrixError::BadShape(_))
        ));
        assert!(matches!(
            IntMatrix::new(2, 1, vec![vec![vec![0, 0]]], vec![]),
            Err(IntMatrixError::BadShape(_))
        ));
        let zero = vec![vec![vec![0, 0], vec![0, 0]]];
        assert!(matches!(
            IntMatrix::new(2, 1, zero.clone(), vec![(0, 0, 0)]),
            Err(IntMatrixError::BadOmegaSlot { reason: "on the diagonal", .. })
        ));
        assert!(matches!(
            IntMatrix::new(2, 1, zero.clone(), vec![(1, 0, 1)]),
            Err(IntMatrixError::BadOmegaSlot { reason: "index out of range", .. })
        ));
        let nonzero = vec![vec![vec![0, 2], vec![-2, 0]]];
        assert!(matches!(
            IntMatrix::new(2, 1, nonzero, vec![(0, 0, 1)]),
            Err(IntMatrixError::BadOmegaSlot { reason: "base entry is not zero", .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn action_composes_contravariantly(seed in 0u64..1000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let field = f(5);
            let t = {
                let mut t = Tensor3::zero(field, [2, 3, 2]);
                for i in 0..2 {
                    for j in 0..3 {
                        for k in 0..2 {
                            let idx = t.index(i, j, k);
                            t.data[idx] = rng.gen_range(0..5);
                        }
                    }
                }
                t
            };
            let id = [
                FpMatrix::identity(field, 2),
                FpMatrix::identity(field, 3),
                FpMatrix::identity(field, 2),
            ];
            prop_assert_eq!(t.act(&id[0], &id[1], &id[2]), t.clone());
            let a = [
                random_invertible(&mut rng, field, 2),
                random_invertible(&mut rng, field, 3),
                random_invertible(&mut rng, field, 2),
            ];
            let b = [
                random_invertible(&mut rng, field, 2),
                random_invertible(&mut rng, field, 3),
                random_invertible(&mut rng, field, 2),
            ];
            let twice = t.act(&a[0], &a[1], &a[2]).act(&b[0], &b[1], &b[2]);
            let composed = t.act(&(&b[0] * &a[0]), &(&b[1] * &a[1]), &(&b[2] * &a[2]));
            prop_assert_eq!(twice, composed);
        }

        #[test]
        fn flattening_transformation_law(seed in 0u64..1000) {
            // F1(alpha t)(x) = A2 F1(t)(x A1) A3^T, and its two siblings.
            let mut rng = StdRng::seed_from_u64(seed);
            let field = f(7);
            let t = {
                let mut t = Tensor3::zero(field, [3, 2, 2]);
                for i in 0..3 {
                    for j in 0..2 {
                        for k in 0..2 {
                            let idx = t.index(i, j, k);
                            t.data[idx] = rng.gen_range(0..7);
                        }
                    }
                }
                t
            };
            let a1 = random_invertible(&mut rng, field, 3);
            let a2 = random_invertible(&mut rng, field, 2);
            let a3 = random_invertible(&mut rng, field, 2);
            let moved = t.act(&a1, &a2, &a3);
            let lhs1 = moved.flatten(Axis::First);
            let rhs1 = t
                .flatten(Axis::First)
                .substitute_vars(&a1)
                .left_right(&a2, &a3.transpose());
            prop_assert_eq!(lhs1, rhs1);
            let lhs2 = moved.flatten(Axis::Second);
            let rhs2 = t
                .flatten(Axis::Second)
                .substitute_vars(&a2)
                .left_right(&a1, &a3.transpose());
            prop_assert_eq!(lhs2, rhs2);
            let lhs3 = moved.flatten(Axis::Third);
            let rhs3 = t
                .flatten(Axis::Third)
                .substitute_vars(&a3)
                .left_right(&a1, &a2.transpose());
            prop_assert_eq!(lhs3, rhs3);
        }
    }
}
