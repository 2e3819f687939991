//! Invariant vectors and family partitioning.
//!
//! Everything computed here is preserved by the equivalence
//! B(y) -> X B(yZ) X^T (X, Z invertible), so equal groups get equal
//! fingerprints and distinct fingerprints certify non-isomorphism.
//! The converse is false: a fingerprint match proves nothing, and
//! [`partition`] is careful to claim only separations.
//!
//! A fingerprint collects, per prime: for each minor size k, the
//! rational point count of V(I_k(B)), the affine dimension and degree
//! of I_k(B), and the dimension of the span of V(I_k)'s points; the
//! same four measures for the adjoint's ideals; and the derived and
//! centre dimensions of the group.  Each measure can be switched off,
//! and a measure that was not computed is recorded as absent — never
//! conflated with the value zero.

use crate::gf::{FieldError, PrimeField};
use crate::groups::GroupSpec;
use crate::ideals::rank_ideal;
use crate::linforms::{IntMatrix, LinFormMatrix};
use crate::poly::{affine_dim, ideal_degree};
use crate::rankloci::{rank_profile_with_budget, EnumerationError, DEFAULT_BUDGET};
use std::collections::BTreeSet;
use std::fmt;

/// Errors from fingerprinting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FingerprintError {
    /// The matrix is not skew-symmetric after reduction.
    NotSkew { label: String },
    /// A requested prime is unusable.
    BadPrime(FieldError),
    /// A family mixes shapes.
    ShapeMismatch { label: String, expected: (usize, usize), found: (usize, usize) },
}

impl fmt::Display for FingerprintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FingerprintError::NotSkew { label } => {
                write!(f, "matrix {label:?} is not skew-symmetric with zero diagonal")
            }
            FingerprintError::BadPrime(e) => write!(f, "bad prime: {e}"),
            FingerprintError::ShapeMismatch { label, expected, found } => write!(
                f,
                "matrix {label:?} has shape (n, d) = {found:?} but the family started with {expected:?}"
            ),
        }
    }
}

impl std::error::Error for FingerprintError {}

impl From<FieldError> for FingerprintError {
    fn from(e: FieldError) -> FingerprintError {
        FingerprintError::BadPrime(e)
    }
}

/// Which measures to compute.  Point counts and span dimensions come
/// from one enumeration pass (cheap until p^d grows); dimensions and
/// degrees run Buchberger per ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FingerprintOptions {
    /// Enumerate rational points: fills `points` and `span_dim`.
    pub point_counts: bool,
    /// Run the ideal machinery: fills `affine_dim` and `degree`.
    pub ideal_measures: bool,
    /// Cap on enumeration size; blowing it leaves the enumeration
    /// measures absent rather than failing.
    pub budget: u64,
}

impl Default for FingerprintOptions {
    fn default() -> FingerprintOptions {
        FingerprintOptions { point_counts: true, ideal_measures: true, budget: DEFAULT_BUDGET }
    }
}

/// The four measures of one determinantal ideal.  `None` means "not
/// computed", never "zero".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IdealStats {
    /// Rational points of the vanishing locus.
    pub points: Option<u64>,
    /// Affine dimension (Krull dimension of the coordinate ring).
    pub affine_dim: Option<u64>,
    /// Degree: 0 when the locus is projectively empty.
    pub degree: Option<u64>,
    /// Dimension of the linear span of the locus's rational points.
    pub span_dim: Option<u64>,
}

/// All invariants of one matrix at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeStats {
    /// The prime.
    pub p: u64,
    /// Stats of I_k(B) for k = 1..=n (index k-1).
    pub direct: Vec<IdealStats>,
    /// Stats of I_k(B*) for k = 1..=min(n, d) (index k-1).
    pub adjoint: Vec<IdealStats>,
    /// F_p-dimension of the derived subgroup.
    pub derived_dim: u64,
    /// F_p-dimension of the centre.
    pub centre_dim: u64,
}

/// The assembled invariant vector of one matrix over a list of primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    /// Matrix side length (generator count).
    pub n: usize,
    /// Variable count (relation count).
    pub d: usize,
    /// Per-prime stats, ascending in p.
    pub per_prime: Vec<PrimeStats>,
}

fn ideal_stats_for(
    matrix: &LinFormMatrix,
    options: &FingerprintOptions,
) -> Vec<IdealStats> {
    let levels = matrix.rows().min(matrix.cols());
    let mut stats = vec![
        IdealStats { points: None, affine_dim: None, degree: None, span_dim: None };
        levels
    ];
    if options.point_counts {
        match rank_profile_with_budget(matrix, options.budget) {
            Ok(profile) => {
                for (k, stat) in stats.iter_mut().enumerate() {
                    stat.points = Some(profile.vanishing_count(k + 1));
                    stat.span_dim = Some(profile.span_dims()[k] as u64);
                }
            }
            Err(EnumerationError::BudgetExceeded { .. }) => {}
        }
    }
    if options.ideal_measures {
        for (k, stat) in stats.iter_mut().enumerate() {
            let ideal = rank_ideal(matrix, k + 1);
            // Minor ideals are homogeneous and proper, so both
            // measures are always defined.
            stat.affine_dim =
                Some(affine_dim(&ideal).expect("minor ideals are homogeneous") as u64);
            stat.degree = Some(ideal_degree(&ideal).expect("minor ideals are proper"));
        }
    }
    stats
}

/// The invariants of one skew matrix over one concrete field.
pub fn prime_stats(
    b: &LinFormMatrix,
    options: &FingerprintOptions,
) -> Result<PrimeStats, FingerprintError> {
    let group = GroupSpec::new(b.clone())
        .map_err(|_| FingerprintError::NotSkew { label: String::new() })?;
    let report = group.structural_report();
    Ok(PrimeStats {
        p: b.ring().field().p(),
        direct: ideal_stats_for(b, options),
        adjoint: ideal_stats_for(&b.adjoint(), options),
        derived_dim: report.derived_dim as u64,
        centre_dim: report.centre_dim as u64,
    })
}

/// The fingerprint of a prime-generic matrix over a list of primes
/// (deduplicated and sorted; order of the input list is irrelevant).
pub fn fingerprint(
    m: &IntMatrix,
    primes: &[u64],
    options: &FingerprintOptions,
) -> Result<Fingerprint, FingerprintError> {
    let ps: BTreeSet<u64> = primes.iter().copied().collect();
    let mut per_prime = Vec::with_capacity(ps.len());
    for p in ps {
        let field = PrimeField::new(p)?;
        per_prime.push(prime_stats(&m.reduce(field), options)?);
    }
    Ok(Fingerprint { n: m.n(), d: m.nvars(), per_prime })
}

/// Which matrix an invariant is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// The matrix B itself.
    Direct,
    /// The adjoint B*.
    Adjoint,
}

/// A prime-independent invariant name; pairs with a prime to address
/// one coordinate of a fingerprint.
///
/// The display/parse syntax is the one the command line uses:
/// `np4` (points of V(I_4(B))), `dim4`, `deg4`, `span4`, with an
/// `adj` suffix for the adjoint side (`np3adj`), plus the structural
/// `derived` and `centre`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantKey {
    /// n_p(I_k): rational point count.
    Points { side: Side, k: usize },
    /// Affine dimension of the ideal.
    AffineDim { side: Side, k: usize },
    /// Degree of the ideal.
    Degree { side: Side, k: usize },
    /// Span dimension of the locus's points.
    SpanDim { side: Side, k: usize },
    /// Dimension of the derived subgroup.
    DerivedDim,
    /// Dimension of the centre.
    CentreDim,
}

impl fmt::Display for InvariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = |side: &Side| if *side == Side::Adjoint { "adj" } else { "" };
        match self {
            InvariantKey::Points { side, k } => write!(f, "np{k}{}", suffix(side)),
            InvariantKey::AffineDim { side, k } => write!(f, "dim{k}{}", suffix(side)),
            InvariantKey::Degree { side, k } => write!(f, "deg{k}{}", suffix(side)),
            InvariantKey::SpanDim { side, k } => write!(f, "span{k}{}", suffix(side)),
            InvariantKey::DerivedDim => write!(f, "derived"),
            InvariantKey::CentreDim => write!(f, "centre"),
        }
    }
}

impl std::str::FromStr for InvariantKey {
    type Err = String;

    fn from_str(s: &str) -> Result<InvariantKey, String> {
        match s {
            "derived" => return Ok(InvariantKey::DerivedDim),
            "centre" | "center" => return Ok(InvariantKey::CentreDim),
            _ => {}
        }
        let (body, side) = match s.strip_suffix("adj") {
            Some(body) => (body, Side::Adjoint),
            None => (s, Side::Direct),
        };
        let split = body.find(|c: char| c.is_ascii_digit()).ok_or_else(|| bad_key(s))?;
        let (word, num) = body.split_at(split);
        let k: usize = num.parse().map_err(|_| bad_key(s))?;
        if k == 0 {
            return Err(bad_key(s));
        }
        match word {
            "np" => Ok(InvariantKey::Points { side, k }),
            "dim" => Ok(InvariantKey::AffineDim { side, k }),
            "deg" => Ok(InvariantKey::Degree { side, k }),
            "span" => Ok(InvariantKey::SpanDim { side, k }),
            _ => Err(bad_key(s)),
        }
    }
}

fn bad_key(s: &str) -> String {
    format!(
        "unknown invariant {s:?}; use np<k>, dim<k>, deg<k>, span<k>, \
         optionally suffixed adj, or derived/centre"
    )
}

impl Fingerprint {
    /// Every coordinate as `(prime, key, value)`, in a fixed order:
    /// primes ascending, keys in their canonical order.  Absent values
    /// appear as `None`.
    pub fn coordinates(&self) -> Vec<(u64, InvariantKey, Option<u64>)> {
        let mut out = Vec::new();
        for stats in &self.per_prime {
            out.extend(stats.coordinates());
        }
        out
    }

    /// Looks up one coordinate; `None` if the key is out of range for
    /// this shape or the prime was not computed.
    pub fn get(&self, p: u64, key: InvariantKey) -> Option<u64> {
        let stats = self.per_prime.iter().find(|s| s.p == p)?;
        stats.get(key)
    }
}

impl PrimeStats {
    fn coordinates(&self) -> Vec<(u64, InvariantKey, Option<u64>)> {
        let mut out = Vec::new();
        for (side, list) in [(Side::Direct, &self.direct), (Side::Adjoint, &self.adjoint)] {
            for (idx, stat) in list.iter().enumerate() {
                let k = idx + 1;
                out.push((self.p, InvariantKey::Points { side, k }, stat.points));
                out.push((self.p, InvariantKey::AffineDim { side, k }, stat.affine_dim));
                out.push((self.p, InvariantKey::Degree { side, k }, stat.degree));
                out.push((self.p, InvariantKey::SpanDim { side, k }, stat.span_dim));
            }
        }
        out.push((self.p, InvariantKey::DerivedDim, Some(self.derived_dim)));
        out.push((self.p, InvariantKey::CentreDim, Some(self.centre_dim)));
        out
    }

    /// Looks up one coordinate by key.
    pub fn get(&self, key: InvariantKey) -> Option<u64> {
        let pick = |side: Side, k: usize| -> Option<IdealStats> {
            let list = if side == Side::Direct { &self.direct } else { &self.adjoint };
            list.get(k.checked_sub(1)?).copied()
        };
        match key {
            InvariantKey::Points { side, k } => pick(side, k)?.points,
            InvariantKey::AffineDim { side, k } => pick(side, k)?.affine_dim,
            InvariantKey::Degree { side, k } => pick(side, k)?.degree,
            InvariantKey::SpanDim { side, k } => pick(side, k)?.span_dim,
            InvariantKey::DerivedDim => Some(self.derived_dim),
            InvariantKey::CentreDim => Some(self.centre_dim),
        }
    }
}

/// A family partitioned by fingerprint equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    /// The input labels, in input order.
    pub labels: Vec<String>,
    /// The fingerprints, aligned with `labels`.
    pub fingerprints: Vec<Fingerprint>,
    /// Classes of indices into `labels`; each class sorted ascending,
    /// classes ordered by their smallest member.
    pub classes: Vec<Vec<usize>>,
    /// A small set of coordinates that induces the same partition,
    /// found by greedy set cover over the label pairs that must be
    /// separated.  Empty when everything is in one class.
    pub separating: Vec<(u64, InvariantKey)>,
}

impl PartitionReport {
    /// The classes as label lists.
    pub fn classes_by_label(&self) -> Vec<Vec<&str>> {
        self.classes
            .iter()
            .map(|class| class.iter().map(|&i| self.labels[i].as_str()).collect())
            .collect()
    }
}

/// Partitions a family of prime-generic matrices by fingerprint
/// equality over the given primes.
///
/// Only separations are meaningful: two labels in different classes
/// are certainly non-isomorphic, while sharing a class proves nothing.
pub fn partition(
    family: &[(String, IntMatrix)],
    primes: &[u64],
    options: &FingerprintOptions,
) -> Result<PartitionReport, FingerprintError> {
    let labels: Vec<String> = family.iter().map(|(l, _)| l.clone()).collect();
    let mut fingerprints = Vec::with_capacity(family.len());
    for (label, m) in family {
        if let Some((_, first)) = family.first() {
            if (m.n(), m.nvars()) != (first.n(), first.nvars()) {
                return Err(FingerprintError::ShapeMismatch {
                    label: label.clone(),
                    expected: (first.n(), first.nvars()),
                    found: (m.n(), m.nvars()),
                });
            }
        }
        fingerprints.push(fingerprint(m, primes, options).map_err(|e| match e {
            FingerprintError::NotSkew { .. } => FingerprintError::NotSkew { label: label.clone() },
            other => other,
        })?);
    }

    // Group by exact equality, preserving first-seen order.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..fingerprints.len() {
        match classes.iter_mut().find(|c| fingerprints[c[0]] == fingerprints[i]) {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }

    let separating = greedy_separating_set(&fingerprints, &classes);
    Ok(PartitionReport { labels, fingerprints, classes, separating })
}

/// Greedy set cover: repeatedly picks the coordinate that separates
/// the most not-yet-separated pairs of distinct-fingerprint labels,
/// breaking ties toward the canonically smallest coordinate, until
/// the chosen set induces the full partition.
fn greedy_separating_set(
    fingerprints: &[Fingerprint],
    classes: &[Vec<usize>],
) -> Vec<(u64, InvariantKey)> {
    if fingerprints.is_empty() {
        return Vec::new();
    }
    let class_of = {
        let mut map = vec![0; fingerprints.len()];
        for (c, class) in classes.iter().enumerate() {
            for &i in class {
                map[i] = c;
            }
        }
        map
    };
    let coords: Vec<Vec<(u64, InvariantKey, Option<u64>)>> =
        fingerprints.iter().map(|f| f.coordinates()).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..fingerprints.len() {
        for j in (i + 1)..fingerprints.len() {
            if class_of[i] != class_of[j] {
                pairs.push((i, j));
            }
        }
    }
    let mut chosen = Vec::new();
    let coord_count = coords[0].len();
    while !pairs.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (covered, coordinate index)
        for c in 0..coord_count {
            let covered = pairs
                .iter()
                .filter(|&&(i, j)| coords[i][c].2 != coords[j][c].2)
                .count();
            if covered > 0 && best.map_or(true, |(b, _)| covered > b) {
                best = Some((covered, c));
            }
        }
        let Some((_, c)) = best else {
            // Cannot happen: pairs differ somewhere by construction.
            unreachable!("fingerprints in different classes must differ in some coordinate");
        };
        pairs.retain(|&(i, j)| coords[i][c].2 == coords[j][c].2);
        chosen.push((coords[0][c].0, coords[0][c].1));
    }
    chosen.sort();
    chosen.dedup();
    chosen
}
