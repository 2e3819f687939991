//! Exhaustive point counting on rank loci, without Groebner bases.
//!
//! For a matrix of linear forms D(y) in d variables over F_p, the
//! rank locus V(I_k) is the set of points v in F_p^d where every k x k
//! minor vanishes, i.e. where rank D(v) < k.  This module counts the
//! rational points of every locus at once by enumerating F_p^d and
//! tallying exact ranks, and records the linear span of each locus's
//! points as it goes.
//!
//! Two routes are provided on purpose.  [`rank_profile`] is the fast
//! path: entries are linear forms, so rank D(lambda v) = rank D(v) for
//! lambda != 0 and one representative per punctured line suffices — a
//! (p-1)x speedup — walked with an odometer whose every step updates
//! the evaluated matrix by adding a single slice.  It splits the work
//! across threads.  [`rank_profile_naive`] walks all p^d points one by
//! one on a single thread with none of those tricks; it exists so the
//! fast path has something independent to be checked against.

use crate::gf::PrimeField;
use crate::linforms::{rank_in_place, Echelon, LinFormMatrix};
use std::fmt;

/// Default cap on the number of evaluation points, ~10^9.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Errors from the enumeration kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    /// The point space is larger than the allowed budget.
    BudgetExceeded {
        /// Points that would have to be visited: p^d.
        required: u128,
        /// The cap that was in force.
        budget: u64,
    },
}

impl fmt::Display for EnumerationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerationError::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration needs {required} points but the budget allows {budget}; \
                 raise the budget to proceed"
            ),
        }
    }
}

impl std::error::Error for EnumerationError {}

/// The exact distribution of ranks of D(v) over v in F_p^d, together
/// with the span dimensions of the rank loci.
///
/// `counts[r]` is the number of points where the evaluated matrix has
/// rank exactly r; the counts sum to p^d and `counts[0] >= 1` because
/// the origin always evaluates to the zero matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    p: u64,
    nvars: usize,
    counts: Vec<u64>,
    span_dims: Vec<usize>,
}

impl RankProfile {
    /// The prime of the field the points live over.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The dimension d of the point space F_p^d.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// `counts[r]` = number of points of rank exactly r, for
    /// r = 0 ..= min(rows, cols).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The number of rational points of V(I_k), i.e. points where the
    /// rank is at most k - 1.  For k past the matrix size every point
    /// qualifies.
    pub fn vanishing_count(&self, k: usize) -> u64 {
        assert!(k >= 1, "minor size k must be at least 1");
        self.counts.iter().take(k).sum::<u64>()
            + if k > self.counts.len() {
                let extra = self.total() - self.counts.iter().sum::<u64>();
                debug_assert_eq!(extra, 0);
                extra
            } else {
                0
            }
    }

    /// All n_p(I_k) for k = 1 ..= min(rows, cols): the sizes of the
    /// nested chain V(I_1) within V(I_2) within ... — nondecreasing.
    pub fn chain_counts(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.counts.len() - 1);
        let mut acc = 0;
        for &c in &self.counts[..self.counts.len() - 1] {
            acc += c;
            out.push(acc);
        }
        out
    }

    /// `span_dims[k-1]` = dim of the F_p-linear span of the points of
    /// V(I_k), for k = 1 ..= min(rows, cols).
    pub fn span_dims(&self) -> &[usize] {
        &self.span_dims
    }

    /// Total number of points visited: p^d.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Per-chunk tallies: rank counts over projective representatives and
/// echelon bases of the points of each exact rank.
struct ChunkTally {
    counts: Vec<u64>,
    bases: Vec<Echelon>,
}

impl ChunkTally {
    fn new(field: PrimeField, nvars: usize, max_rank: usize) -> ChunkTally {
        ChunkTally {
            counts: vec![0; max_rank + 1],
            bases: (0..=max_rank).map(|_| Echelon::new(field, nvars)).collect(),
        }
    }

    fn merge(&mut self, other: ChunkTally) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        for (a, b) in self.bases.iter_mut().zip(other.bases) {
            for row in b.rows() {
                a.insert(row);
            }
        }
    }
}

/// Walks the projective representatives with global indices in
/// [start, end) and tallies ranks and spans.
///
/// Representatives are ordered by level: level l consists of the
/// vectors with v[l] = 1, v[i] = 0 for i < l, and v[i] free for
/// i > l, enumerated with coordinate l+1 moving fastest.  Every
/// punctured line through the origin contains exactly one such
/// vector, so the levels together have (p^d - 1)/(p - 1) entries.
fn tally_range(d_mat: &LinFormMatrix, start: u128, end: u128, tally: &mut ChunkTally) {
    let ring = d_mat.ring();
    let field = ring.field();
    let p = field.p() as u128;
    let d = ring.nvars();
    let (rows, cols) = (d_mat.rows(), d_mat.cols());
    let max_rank = rows.min(cols);
    let cells = rows * cols;
    let slice_data: Vec<&[u64]> = d_mat.slices().iter().map(|s| s.data()).collect();

    let mut scratch = vec![0u64; cells];
    let mut level_base = 0u128; // global index where the current level starts
    for level in 0..d {
        let level_size = p.pow((d - 1 - level) as u32);
        let lo = start.max(level_base);
        let hi = end.min(level_base + level_size);
        if lo < hi {
            // Seed the point from the offset's base-p digits.
            let mut v = vec![0u64; d];
            v[level] = 1;
            let mut offset = lo - level_base;
            for c in (level + 1)..d {
                v[c] = (offset % p) as u64;
                offset /= p;
            }
            let mut m = d_mat.evaluate(&v).data().to_vec();
            let mut remaining = hi - lo;
            loop {
                scratch.copy_from_slice(&m);
                let r = rank_in_place(field, &mut scratch, rows, cols, max_rank + 1);
                tally.counts[r] += 1;
                if !tally.bases[r].is_full() {
                    tally.bases[r].insert(&v);
                }
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
                // Odometer step: every changed coordinate moves by
                // +1 mod p, so the evaluated matrix gains one slice
                // per changed coordinate.
                for c in (level + 1)..d {
                    for (cell, &s) in m.iter_mut().zip(slice_data[c]) {
                        *cell = field.add_raw(*cell, s);
                    }
                    v[c] += 1;
                    if v[c] < p as u64 {
                        break;
                    }
                    v[c] = 0;
                }
            }
        }
        level_base += level_size;
    }
}

/// How many threads to use: `GRPINV_THREADS` when set to a positive
/// integer, otherwise the machine's available parallelism.
pub fn thread_count() -> usize {
    if let Ok(s) = std::env::var("GRPINV_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn check_budget(d_mat: &LinFormMatrix, budget: u64) -> Result<u128, EnumerationError> {
    let p = d_mat.ring().field().p() as u128;
    let d = d_mat.ring().nvars() as u32;
    let required = p
        .checked_pow(d)
        .filter(|&n| n <= budget as u128)
        .ok_or(EnumerationError::BudgetExceeded {
            required: p.checked_pow(d).unwrap_or(u128::MAX),
            budget,
        })?;
    Ok(required)
}

/// The rank distribution of D(v) over all v in F_p^d, with the default
/// point budget and `GRPINV_THREADS` (or all cores) worth of threads.
pub fn rank_profile(d_mat: &LinFormMatrix) -> Result<RankProfile, EnumerationError> {
    rank_profile_with(d_mat, DEFAULT_BUDGET, thread_count())
}

/// [`rank_profile`] with an explicit point budget.
pub fn rank_profile_with_budget(
    d_mat: &LinFormMatrix,
    budget: u64,
) -> Result<RankProfile, EnumerationError> {
    rank_profile_with(d_mat, budget, thread_count())
}

/// [`rank_profile`] with every knob explicit.  The result is
/// identical for every `threads >= 1`: chunks only ever merge by
/// adding counts and uniting spans.
pub fn rank_profile_with(
    d_mat: &LinFormMatrix,
    budget: u64,
    threads: usize,
) -> Result<RankProfile, EnumerationError> {
    check_budget(d_mat, budget)?;
    let ring = d_mat.ring();
    let field = ring.field();
    let p = field.p() as u128;
    let d = ring.nvars();
    let max_rank = d_mat.rows().min(d_mat.cols());
    let reps = (p.pow(d as u32) - 1) / (p - 1);

    let threads = threads.max(1).min(reps.max(1) as usize);
    let mut tally = ChunkTally::new(field, d, max_rank);
    if threads <= 1 {
        tally_range(d_mat, 0, reps, &mut tally);
    } else {
        let per = reps / threads as u128;
        let extra = (reps % threads as u128) as usize;
        let parts = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            let mut at = 0u128;
            for t in 0..threads {
                let len = per + u128::from(t < extra);
                let (start, end) = (at, at + len);
                at = end;
                handles.push(scope.spawn(move || {
                    let mut local = ChunkTally::new(field, d, max_rank);
                    tally_range(d_mat, start, end, &mut local);
                    local
                }));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .collect::<Vec<_>>()
        });
        for part in parts {
            tally.merge(part);
        }
    }

    // Weight the line representatives and put back the origin.
    let mut counts: Vec<u64> = tally.counts.iter().map(|&c| c * (p as u64 - 1)).collect();
    counts[0] += 1;
    let span_dims = span_dims_from_bases(field, d, &tally.bases);
    Ok(RankProfile { p: field.p(), nvars: d, counts, span_dims })
}

/// Prefix-unions of the exact-rank bases: the span of V(I_k) is the
/// span of all points of rank < k.
fn span_dims_from_bases(field: PrimeField, width: usize, bases: &[Echelon]) -> Vec<usize> {
    let mut acc = Echelon::new(field, width);
    let mut out = Vec::with_capacity(bases.len() - 1);
    for basis in &bases[..bases.len() - 1] {
        for row in basis.rows() {
            acc.insert(row);
        }
        out.push(acc.dim());
    }
    out
}

/// The rank profile of the adjoint matrix: the distribution of
/// rank B*(x) over x in F_p^n, whose counts partition the group's
/// noncentral elements by centralizer size.
pub fn adjoint_rank_profile(b: &LinFormMatrix) -> Result<RankProfile, EnumerationError> {
    rank_profile(&b.adjoint())
}

/// [`adjoint_rank_profile`] with an explicit point budget.
pub fn adjoint_rank_profile_with_budget(
    b: &LinFormMatrix,
    budget: u64,
) -> Result<RankProfile, EnumerationError> {
    rank_profile_with_budget(&b.adjoint(), budget)
}

/// Single-threaded full enumeration of all p^d points, evaluating the
/// matrix afresh at every point.  No projective shortcut, no shared
/// code with the fast path beyond the rank routine: this is the
/// cross-check oracle.
pub fn rank_profile_naive(
    d_mat: &LinFormMatrix,
    budget: u64,
) -> Result<RankProfile, EnumerationError> {
    check_budget(d_mat, budget)?;
    let ring = d_mat.ring();
    let field = ring.field();
    let p = field.p();
    let d = ring.nvars();
    let max_rank = d_mat.rows().min(d_mat.cols());
    let mut counts = vec![0u64; max_rank + 1];
    let mut bases: Vec<Echelon> = (0..=max_rank).map(|_| Echelon::new(field, d)).collect();
    let mut v = vec![0u64; d];
    loop {
        let r = d_mat.evaluate(&v).rank();
        counts[r] += 1;
        bases[r].insert(&v);
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
            break;
        }
    }
    let span_dims = span_dims_from_bases(field, d, &bases);
    Ok(RankProfile { p, nvars: d, counts, span_dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::minors;
    use crate::poly::Ring;
    use crate::testutil::{four_generator_family, random_invertible, random_linform, random_skew};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn staircase(p: u64) -> LinFormMatrix {
        let field = PrimeField::new(p).unwrap();
        let rz = Ring::with_letter(field, 3, 'z');
        LinFormMatrix::from_int_slices(
            rz,
            &[
                vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
                vec![vec![0, 0, 1], vec![0, 1, 0], vec![0, 0, 0]],
                vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 1]],
            ],
        )
    }

    #[test]
    fn zero_matrix_profile_is_all_origin_rank() {
        let field = PrimeField::new(3).unwrap();
        let ry = Ring::with_letter(field, 3, 'y');
        let z = LinFormMatrix::zero(ry, 4, 4);
        let profile = rank_profile(&z).unwrap();
        assert_eq!(profile.counts()[0], 27);
        assert_eq!(profile.total(), 27);
        for k in 1..=4 {
            assert_eq!(profile.vanishing_count(k), 27);
        }
        // Every point lies in every locus, so every span is full.
        assert_eq!(profile.span_dims(), &[3, 3, 3, 3]);
    }

    #[test]
    fn four_generator_top_counts_match_known_values() {
        // n_p(I_4(B)) for B1..B6: p^3, p^3, 2p^2 - p, p^2, p^2, p.
        for p in [3u64, 5, 7] {
            let family = four_generator_family(p);
            let want = [p * p * p, p * p * p, 2 * p * p - p, p * p, p * p, p];
            for (b, &w) in family.iter().zip(&want) {
                let profile = rank_profile(b).unwrap();
                assert_eq!(profile.vanishing_count(4), w, "p={p}");
                assert_eq!(profile.total(), p * p * p);
            }
        }
    }

    #[test]
    fn four_generator_adjoint_counts_match_known_values() {
        // n_p(I_3(B*)) for B1..B6: p^3, p^4, 2p^3 - p^2, p^3,
        // p^3 + p^2 - p, p^2.
        for p in [3u64, 5] {
            let family = four_generator_family(p);
            let want = [
                p * p * p,
                p * p * p * p,
                2 * p * p * p - p * p,
                p * p * p,
                p * p * p + p * p - p,
                p * p,
            ];
            for (b, &w) in family.iter().zip(&want) {
                let profile = adjoint_rank_profile(b).unwrap();
                assert_eq!(profile.vanishing_count(3), w, "p={p}");
                assert_eq!(profile.total(), p * p * p * p);
            }
        }
    }

    #[test]
    fn staircase_chain_counts() {
        for p in [3u64, 5, 7] {
            let profile = rank_profile(&staircase(p)).unwrap();
            assert_eq!(profile.chain_counts(), vec![1, p, 3 * p * p - 3 * p + 1]);
        }
    }

    #[test]
    fn fast_path_agrees_with_naive_and_with_minor_vanishing() {
        let mut rng = StdRng::seed_from_u64(41);
        for p in [3u64, 5] {
            let field = PrimeField::new(p).unwrap();
            for _ in 0..4 {
                let ry = Ring::with_letter(field, 2, 'y');
                let d_mat = random_linform(&mut rng, ry, 3, 2);
                let fast = rank_profile(&d_mat).unwrap();
                let naive = rank_profile_naive(&d_mat, DEFAULT_BUDGET).unwrap();
                assert_eq!(fast, naive);
                // Count points where all k x k minors vanish, straight
                // from the ideals module.
                for k in 1..=2usize {
                    let mins = minors(&d_mat, k);
                    let mut by_minors = 0u64;
                    for a in 0..p {
                        for b in 0..p {
                            if mins.iter().all(|m| m.eval_raw(&[a, b]) == 0) {
                                by_minors += 1;
                            }
                        }
                    }
                    assert_eq!(fast.vanishing_count(k), by_minors, "p={p} k={k}");
                }
            }
        }
    }

    #[test]
    fn profiles_are_invariant_under_equivalence() {
        let mut rng = StdRng::seed_from_u64(42);
        let field = PrimeField::new(5).unwrap();
        let ry = Ring::with_letter(field, 3, 'y');
        for _ in 0..5 {
            let b = random_skew(&mut rng, ry, 4);
            let x = random_invertible(&mut rng, field, 4);
            let z = random_invertible(&mut rng, field, 3);
            let c = b.transform(&x, &z);
            assert_eq!(rank_profile(&b).unwrap(), rank_profile(&c).unwrap());
        }
        // Rectangular: left and right factors may differ.
        for _ in 0..5 {
            let d_mat = random_linform(&mut rng, ry, 3, 4);
            let x = random_invertible(&mut rng, field, 3);
            let y = random_invertible(&mut rng, field, 4);
            let z = random_invertible(&mut rng, field, 3);
            let moved = d_mat.substitute_vars(&z).left_right(&x, &y);
            assert_eq!(rank_profile(&d_mat).unwrap(), rank_profile(&moved).unwrap());
        }
    }

    #[test]
    fn skew_matrices_have_no_odd_ranks() {
        let mut rng = StdRng::seed_from_u64(43);
        for p in [3u64, 7] {
            let field = PrimeField::new(p).unwrap();
            let ry = Ring::with_letter(field, 2, 'y');
            for n in [3usize, 4, 5] {
                let b = random_skew(&mut rng, ry, n);
                let profile = rank_profile(&b).unwrap();
                for (r, &c) in profile.counts().iter().enumerate() {
                    if r % 2 == 1 {
                        assert_eq!(c, 0, "odd rank {r} at p={p} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_the_answer() {
        let mut rng = StdRng::seed_from_u64(44);
        let field = PrimeField::new(7).unwrap();
        let ry = Ring::with_letter(field, 3, 'y');
        let b = random_skew(&mut rng, ry, 5);
        let reference = rank_profile_with(&b, DEFAULT_BUDGET, 1).unwrap();
        for threads in [2usize, 3, 5, 8, 64] {
            assert_eq!(rank_profile_with(&b, DEFAULT_BUDGET, threads).unwrap(), reference);
        }
    }

    #[test]
    fn budget_refusal_reports_the_required_size() {
        let b = four_generator_family(7).remove(0);
        let err = rank_profile_with_budget(&b, 100).unwrap_err();
        assert_eq!(err, EnumerationError::BudgetExceeded { required: 343, budget: 100 });
        assert!(err.to_string().contains("343"));
        assert!(rank_profile_with_budget(&b, 343).is_ok());
    }

    #[test]
    fn span_dims_grow_along_the_chain() {
        // B1 evaluates to rank 0 only at the origin and rank 2
        // everywhere else: spans are (0, 0, full, full).
        let b1 = &four_generator_family(5)[0];
        let profile = rank_profile(b1).unwrap();
        assert_eq!(profile.counts(), &[1, 0, 124, 0, 0]);
        assert_eq!(profile.span_dims(), &[0, 0, 3, 3]);
        // Staircase: V(I_1) is the origin, V(I_2) the z1-axis,
        // V(I_3) the union of three coordinate planes.
        let profile = rank_profile(&staircase(5)).unwrap();
        assert_eq!(profile.span_dims(), &[0, 1, 3]);
    }

    #[test]
    fn naive_route_respects_the_budget_too() {
        let b = four_generator_family(5).remove(2);
        assert!(rank_profile_naive(&b, 10).is_err());
        let naive = rank_profile_naive(&b, 125).unwrap();
        assert_eq!(naive.vanishing_count(4), 2 * 25 - 5);
    }

    #[test]
    fn vanishing_counts_beyond_the_matrix_size_cover_everything() {
        let profile = rank_profile(&staircase(3)).unwrap();
        assert_eq!(profile.vanishing_count(4), 27);
        assert_eq!(profile.vanishing_count(9), 27);
    }
}
