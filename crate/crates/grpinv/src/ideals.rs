//! Determinantal ideals of a matrix of linear forms.
//!
//! For D(y) of shape r x c, the ideal I_k(D) is generated by the k x k
//! minors of D; its vanishing locus is exactly the set of points where
//! rank D(y) < k, giving the nested chain
//! V(I_1) <= V(I_2) <= ... <= V(I_min(r,c)).
//!
//! For skew-symmetric D the minor on (rows I, cols J) equals the minor
//! on (rows J, cols I) up to the sign (-1)^k, so [`minors`] keeps only
//! one of each mirrored pair - the generated ideal is unchanged and
//! the Groebner runs see roughly half the generators.

use crate::linforms::LinFormMatrix;
use crate::poly::{IdealBasis, Poly};

/// All size-`k` subsets of `0..n`, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance the rightmost index that has room to move.
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The k x k minors of `d`, as polynomials: zero minors are omitted,
/// exact duplicates are removed, and for skew-symmetric input only one
/// of each (rows, cols)/(cols, rows) mirror pair is kept.  The result
/// is sorted, hence deterministic.
///
/// `k = 0` gives the unit minor (the constant 1); `k` larger than the
/// matrix admits gives no minors.
pub fn minors(d: &LinFormMatrix, k: usize) -> Vec<Poly> {
    if k == 0 {
        return vec![d.ring().one()];
    }
    if k > d.rows() || k > d.cols() {
        return Vec::new();
    }
    let skew = d.is_skew();
    let row_sets = combinations(d.rows(), k);
    let col_sets = combinations(d.cols(), k);
    let mut out = Vec::new();
    for (ri, rows) in row_sets.iter().enumerate() {
        for (ci, cols) in col_sets.iter().enumerate() {
            // Mirror dedup: for skew D the (J, I) minor is +-1 times
            // the (I, J) minor, so keep only I <= J.
            if skew && ci < ri {
                continue;
            }
            let m = d.submatrix(rows, cols).det_poly();
            if !m.is_zero() {
                out.push(m);
            }
        }
    }
    out.sort_by(|a, b| a.terms().cmp(b.terms()));
    out.dedup();
    out
}

/// One rank ideal I_k(D) wrapped as a lazy [`IdealBasis`].
#[derive(Debug, Clone)]
pub struct RankIdeal {
    k: usize,
    ideal: IdealBasis,
}

impl RankIdeal {
    /// The minor size k.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The ideal, with its lazily cached Groebner basis.
    pub fn ideal(&self) -> &IdealBasis {
        &self.ideal
    }
}

/// The full vector of rank ideals I_1(D), ..., I_min(r,c)(D).
///
/// Construction only expands the minors; each entry's Groebner basis
/// is computed on first use and cached inside the [`IdealBasis`], so
/// concurrent consumers share one computation per (matrix, k).
#[derive(Debug, Clone)]
pub struct RankIdealVector {
    entries: Vec<RankIdeal>,
}

impl RankIdealVector {
    /// Expands all minor ideals of `d`.
    pub fn new(d: &LinFormMatrix) -> RankIdealVector {
        let max_k = d.rows().min(d.cols());
        let entries = (1..=max_k)
            .map(|k| RankIdeal { k, ideal: IdealBasis::new(d.ring(), minors(d, k)) })
            .collect();
        RankIdealVector { entries }
    }

    /// The entries, ascending in k.
    pub fn entries(&self) -> &[RankIdeal] {
        &self.entries
    }

    /// The ideal I_k, if k is within range (k >= 1).
    pub fn ideal(&self, k: usize) -> Option<&IdealBasis> {
        self.entries.get(k.checked_sub(1)?).map(RankIdeal::ideal)
    }
}

/// Convenience: the single ideal I_k(D) as a lazy basis.
pub fn rank_ideal(d: &LinFormMatrix, k: usize) -> IdealBasis {
    IdealBasis::new(d.ring(), minors(d, k))
}
