//! Brute-force isomorphism testing for tiny instances.
//!
//! Two skew matrices B and C over the same ring present isomorphic
//! groups exactly when some X in GL_n and Z in GL_d satisfy
//! X B(yZ) X^T = C(y).  This module searches for such a pair
//! exhaustively, so its verdicts are definitive in both directions —
//! at a cost that explodes with the dimensions.  A budget gate keeps
//! the explosion honest: when the search space is too large the
//! oracle refuses rather than guessing.
//!
//! The search enumerates Z in GL_d (usually the small side) and then
//! builds X row by row.  Once rows x_1..x_k and Z are fixed, the
//! required identity pins each further row down to an affine
//! subspace: entry (a, k) of the identity reads x_a B'(j) x_k^T =
//! C(j)_{a,k} with B' = B(yZ), which is linear in x_k.  The tree of
//! consistent prefixes is therefore tiny whenever the matrices are
//! far from equivalent, and never worse than |GL_n| per Z.

use crate::gf::PrimeField;
use crate::linforms::{Echelon, FpMatrix, LinFormMatrix};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Default cap on |GL_n| * |GL_d|, the worst-case search size.
pub const DEFAULT_ISO_BUDGET: u64 = 100_000_000;

/// A certified equivalence: X B(yZ) X^T = C(y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    /// The basis change on generators, in GL_n.
    pub x: FpMatrix,
    /// The basis change on relations, in GL_d.
    pub z: FpMatrix,
}

/// The oracle's three possible answers.  `NonIsomorphic` is only ever
/// returned after an exhaustive search, so it is a proof, not a guess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    /// A verified witness.
    Isomorphic(IsoWitness),
    /// No witness exists.
    NonIsomorphic,
    /// The search space exceeds the budget; no verdict.
    BudgetExceeded {
        /// |GL_n| * |GL_d| for the given shape.
        required: u128,
        /// The cap that was in force.
        budget: u64,
    },
}

impl fmt::Display for IsoOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoOutcome::Isomorphic(_) => write!(f, "isomorphic"),
            IsoOutcome::NonIsomorphic => write!(f, "non-isomorphic"),
            IsoOutcome::BudgetExceeded { required, budget } => write!(
                f,
                "undecided: search space of {required} exceeds the budget {budget}"
            ),
        }
    }
}

/// |GL_n(F_p)| = prod over i of (p^n - p^i).
pub fn gl_order(p: u64, n: usize) -> u128 {
    let pn = (p as u128).pow(n as u32);
    let mut order = 1u128;
    let mut pi = 1u128;
    for _ in 0..n {
        order = order.saturating_mul(pn - pi);
        pi *= p as u128;
    }
    order
}

/// Checks both forms of the defining identity:
/// X B(yZ) X^T = C(y) and X B*(xX) Z^T = C*(x).  The two are
/// equivalent on paper; checking both exercises the adjoint
/// construction every time a witness is accepted.  Non-invertible
/// X or Z never verifies.
pub fn verify_witness(b: &LinFormMatrix, c: &LinFormMatrix, w: &IsoWitness) -> bool {
    if !w.x.is_invertible() || !w.z.is_invertible() {
        return false;
    }
    if b.transform(&w.x, &w.z) != *c {
        return false;
    }
    let lhs = b.adjoint().substitute_vars(&w.x).left_right(&w.x, &w.z.transpose());
    lhs == c.adjoint()
}

/// All invertible d x d matrices over F_p, in a canonical order: rows
/// are chosen low-to-high, each row scanned by its little-endian
/// base-p integer code, dependent rows skipped.
fn enumerate_gl(field: PrimeField, d: usize) -> Vec<FpMatrix> {
    let p = field.p();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    fn rec(
        field: PrimeField,
        p: u64,
        d: usize,
        rows: &mut Vec<Vec<u64>>,
        out: &mut Vec<FpMatrix>,
    ) {
        if rows.len() == d {
            let mut m = FpMatrix::zero(field, d, d);
            for (i, row) in rows.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    m.set(i, j, x);
                }
            }
            out.push(m);
            return;
        }
        let mut v = vec![0u64; d];
        loop {
            // Advance the odometer first so v starts at (1, 0, ..).
            let mut c = 0;
            while c < d {
                v[c] += 1;
                if v[c] < p {
                    break;
                }
                v[c] = 0;
                c += 1;
            }
            if c == d {
                return;
            }
            let mut basis = Echelon::new(field, d);
            for r in rows.iter() {
                basis.insert(r);
            }
            if basis.insert(&v) {
                rows.push(v.clone());
                rec(field, p, d, rows, out);
                rows.pop();
            }
        }
    }
    rec(field, p, d, &mut rows, &mut out);
    out
}

/// The first witness (in canonical order) with relation change `z`,
/// if any: builds X row by row, each row constrained to the affine
/// subspace the already-fixed rows impose.
fn search_x_for_z(b: &LinFormMatrix, c: &LinFormMatrix, z: &FpMatrix) -> Option<FpMatrix> {
    let field = b.ring().field();
    let n = b.rows();
    let d = b.ring().nvars();
    let bz = b.substitute_vars(z);
    let c_slices = c.slices();

    struct Ctx<'a> {
        field: PrimeField,
        n: usize,
        d: usize,
        bz_slices: &'a [FpMatrix],
        c_slices: &'a [FpMatrix],
        /// fixed_rows[a] holds, for each slice j, the row vector
        /// x_a * B'(j) — the coefficients of the linear constraints
        /// row a imposes on every later row.
        constraint_rows: Vec<Vec<Vec<u64>>>,
        rows: Vec<Vec<u64>>,
    }

    fn rec(ctx: &mut Ctx<'_>) -> Option<Vec<Vec<u64>>> {
        let k = ctx.rows.len();
        if k == ctx.n {
            return Some(ctx.rows.clone());
        }
        let field = ctx.field;
        // Assemble the linear system on the next row: one equation
        // per (fixed row a, slice j).
        let eqs = k * ctx.d;
        let mut sys = FpMatrix::zero(field, eqs, ctx.n);
        let mut rhs = vec![0u64; eqs];
        for a in 0..k {
            for j in 0..ctx.d {
                let row = &ctx.constraint_rows[a][j];
                for (col, &coef) in row.iter().enumerate() {
                    sys.set(a * ctx.d + j, col, coef);
                }
                rhs[a * ctx.d + j] = ctx.c_slices[j].get(a, k);
            }
        }
        let particular = sys.solve(&rhs)?;
        let kernel = sys.kernel();
        // Walk the affine solution space in canonical coefficient
        // order.
        let p = field.p();
        let mut coeffs = vec![0u64; kernel.len()];
        loop {
            let mut v = particular.clone();
            for (co, kv) in coeffs.iter().zip(&kernel) {
                if *co != 0 {
                    for (x, &kx) in v.iter_mut().zip(kv) {
                        *x = field.add_raw(*x, field.mul_raw(*co, kx));
                    }
                }
            }
            let mut basis = Echelon::new(field, ctx.n);
            for r in &ctx.rows {
                basis.insert(r);
            }
            if basis.insert(&v) {
                let per_slice: Vec<Vec<u64>> =
                    ctx.bz_slices.iter().map(|s| s.left_mul_row(&v)).collect();
                ctx.rows.push(v);
                ctx.constraint_rows.push(per_slice);
                if let Some(found) = rec(ctx) {
                    return Some(found);
                }
                ctx.rows.pop();
                ctx.constraint_rows.pop();
            }
            // Odometer over the kernel coefficients.
            let mut c = 0;
            while c < coeffs.len() {
                coeffs[c] += 1;
                if coeffs[c] < p {
                    break;
                }
                coeffs[c] = 0;
                c += 1;
            }
            if c == coeffs.len() {
                return None;
            }
        }
    }

    let mut ctx = Ctx {
        field,
        n,
        d,
        bz_slices: bz.slices(),
        c_slices,
        constraint_rows: Vec::new(),
        rows: Vec::new(),
    };
    let rows = rec(&mut ctx)?;
    let mut x = FpMatrix::zero(field, n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            x.set(i, j, v);
        }
    }
    Some(x)
}

/// Exhaustive isomorphism test with the default budget and thread
/// count.
pub fn isomorphic_bruteforce(b: &LinFormMatrix, c: &LinFormMatrix, budget: u64) -> IsoOutcome {
    isomorphic_bruteforce_with(b, c, budget, crate::rankloci::thread_count())
}

/// Exhaustive isomorphism test, every knob explicit.  The verdict and
/// the returned witness are independent of `threads`: workers scan
/// disjoint blocks of the candidate sequence and the witness from the
/// earliest block wins, with workers on later blocks cancelled
/// cooperatively.
pub fn isomorphic_bruteforce_with(
    b: &LinFormMatrix,
    c: &LinFormMatrix,
    budget: u64,
    threads: usize,
) -> IsoOutcome {
    assert_eq!(b.ring(), c.ring(), "both matrices must share a ring");
    assert_eq!(b.rows(), c.rows(), "both matrices must share a shape");
    assert!(b.is_skew() && c.is_skew(), "isomorphism testing expects skew matrices");
    let field = b.ring().field();
    let p = field.p();
    let n = b.rows();
    let d = b.ring().nvars();

    let required = gl_order(p, n).saturating_mul(gl_order(p, d));
    if required > budget as u128 {
        return IsoOutcome::BudgetExceeded { required, budget };
    }

    let zs = enumerate_gl(field, d);
    let threads = threads.max(1).min(zs.len().max(1));
    if threads <= 1 {
        for z in &zs {
            if let Some(x) = search_x_for_z(b, c, z) {
                let w = IsoWitness { x, z: z.clone() };
                debug_assert!(verify_witness(b, c, &w));
                return IsoOutcome::Isomorphic(w);
            }
        }
        return IsoOutcome::NonIsomorphic;
    }

    // Contiguous blocks of Z-candidates; a worker aborts once some
    // earlier block has already produced a witness.
    let best_block = AtomicUsize::new(usize::MAX);
    let per = zs.len() / threads;
    let extra = zs.len() % threads;
    let found = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        let mut at = 0usize;
        for t in 0..threads {
            let len = per + usize::from(t < extra);
            let block = &zs[at..at + len];
            at += len;
            let best = &best_block;
            handles.push(scope.spawn(move || {
                for z in block {
                    if best.load(Ordering::Relaxed) < t {
                        return None;
                    }
                    if let Some(x) = search_x_for_z(b, c, z) {
                        best.fetch_min(t, Ordering::Relaxed);
                        return Some(IsoWitness { x, z: z.clone() });
                    }
                }
                None
            }));
        }
        let results: Vec<Option<IsoWitness>> =
            handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect();
        results.into_iter().flatten().next()
    });
    match found {
        Some(w) => {
            debug_assert!(verify_witness(b, c, &w));
            IsoOutcome::Isomorphic(w)
        }
        None => IsoOutcome::NonIsomorphic,
    }
}
