//! Geometric invariants for finite p-groups of class 2 and exponent p.
//!
//! Every such group on n generators with derived subgroup of rank d
//! corresponds to a skew-symmetric n x n matrix of linear forms in d
//! variables over the prime field F_p, and isomorphism of groups becomes
//! simultaneous row/column/variable equivalence of matrices.  This crate
//! computes invariants of that equivalence: point counts, dimensions,
//! degrees and linear spans of the rank loci cut out by the minor ideals
//! of the matrix and of its adjoint, over one or several primes.
//!
//! The main layers, bottom up:
//!
//! * [`gf`] - arithmetic in F_p for odd primes p < 2^16;
//! * [`poly`] - multivariate polynomials, Groebner bases, Hilbert series;
//! * [`linforms`] - matrices of linear forms, 3-tensors, flattenings,
//!   the adjoint construction, and Pfaffians;
//! * [`groups`] - the groups themselves: explicit element arithmetic and
//!   structural reports, for cross-checking the geometry;
//! * [`ideals`] - determinantal ideals of a matrix of linear forms;
//! * [`rankloci`] - fast point enumeration of rank loci over F_p;
//! * [`fingerprint`] - invariant fingerprints and family partitioning;
//! * [`isom`] - brute-force isomorphism testing for small instances;
//! * [`cli`] - the file formats and subcommands behind the `grpinv` binary.

pub mod cli;
pub mod fingerprint;
pub mod gf;
pub mod groups;
pub mod ideals;
pub mod isom;
pub mod linforms;
pub mod poly;
pub mod rankloci;

#[cfg(test)]
pub(crate) mod testutil;
