//! Hilbert series, dimension and degree of homogeneous ideals.
//!
//! For a homogeneous ideal I in F_p[x_1..x_d], the graded dimensions of
//! R/I match those of R/lt(I), so everything reduces to a monomial
//! ideal once a Groebner basis is known.  The numerator N(t) with
//! HS_{R/I}(t) = N(t) / (1-t)^d is computed by the classic pivot
//! recursion
//!
//! ```text
//! N(J + (m)) = N(J) - t^deg(m) * N(J : m)
//! ```
//!
//! with memoization on the minimal generator set.  Writing
//! N(t) = (1-t)^e * Q(t) with Q(1) != 0 then gives:
//!
//! * affine dimension of the vanishing locus: d - e;
//! * degree: Q(1) when the dimension is positive, 0 for a locus that is
//!   a finite scheme supported at the origin;
//! * Hilbert polynomial: sum_j q_j * binom(t - j + a - 1, a - 1) where
//!   a = d - e, expanded over the rationals.

use super::{IdealBasis, Monomial, MonomialOrder, PolyError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;

/// Leading monomials of the (cached, grevlex) Groebner basis,
/// minimalized: no generator divides another.
fn lead_monomials(ideal: &IdealBasis) -> Vec<Monomial> {
    let order = MonomialOrder::grevlex();
    let mons: Vec<Monomial> = ideal
        .groebner_basis()
        .iter()
        .map(|g| g.leading_term(&order).unwrap().0.clone())
        .collect();
    minimalize(mons)
}

/// Drops monomials divisible by another in the set; result sorted.
fn minimalize(mut mons: Vec<Monomial>) -> Vec<Monomial> {
    mons.sort();
    mons.dedup();
    let mut out: Vec<Monomial> = Vec::with_capacity(mons.len());
    // Ascending canonical order means a divisor can only appear earlier.
    for m in mons {
        if !out.iter().any(|g| g.divides(&m)) {
            out.push(m);
        }
    }
    out
}

/// Polynomial subtraction with a shift: `a -= t^shift * b`.
fn sub_shifted(a: &mut Vec<i64>, b: &[i64], shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, 0);
    }
    for (k, &c) in b.iter().enumerate() {
        a[k + shift] -= c;
    }
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn numerator_rec(
    mons: &[Monomial],
    memo: &mut HashMap<Vec<Monomial>, Vec<i64>>,
) -> Vec<i64> {
    if mons.is_empty() {
        return vec![1];
    }
    if mons.len() == 1 {
        let d = mons[0].degree() as usize;
        let mut n = vec![0; d + 1];
        n[0] = 1;
        n[d] -= 1;
        return n;
    }
    if let Some(hit) = memo.get(mons) {
        return hit.clone();
    }
    // Pivot on the largest generator: its colon ideal tends to collapse.
    let (rest, pivot) = mons.split_at(mons.len() - 1);
    let pivot = &pivot[0];
    let rest: Vec<Monomial> = rest.to_vec();
    let colon: Vec<Monomial> = minimalize(
        rest.iter()
            .map(|g| pivot.gcd(g).div_into(g).unwrap())
            .collect(),
    );
    let mut n = numerator_rec(&rest, memo);
    let nc = numerator_rec(&colon, memo);
    sub_shifted(&mut n, &nc, pivot.degree() as usize);
    memo.insert(mons.to_vec(), n.clone());
    n
}

/// The Hilbert-series numerator N(t) of R/I, as coefficients of
/// ascending powers of t (trailing zeros trimmed).
///
/// # Errors
///
/// [`PolyError::NotHomogeneous`] when a generator mixes degrees.
pub fn hilbert_numerator(ideal: &IdealBasis) -> Result<Vec<i64>, PolyError> {
    if !ideal.is_homogeneous() {
        return Err(PolyError::NotHomogeneous);
    }
    let mons = lead_monomials(ideal);
    let mut memo = HashMap::new();
    let mut n = numerator_rec(&mons, &mut memo);
    while n.last() == Some(&0) {
        n.pop();
    }
    Ok(n)
}

/// Divides by (1 - t) when exact, i.e. when the coefficients sum to 0.
fn div_one_minus_t(n: &[i64]) -> Option<Vec<i64>> {
    if n.iter().sum::<i64>() != 0 {
        return None;
    }
    // N = (1-t) Q  <=>  q_k = sum of the first k+1 coefficients of N.
    let mut q = Vec::with_capacity(n.len().saturating_sub(1));
    let mut acc = 0;
    for &c in &n[..n.len().saturating_sub(1)] {
        acc += c;
        q.push(acc);
    }
    while q.last() == Some(&0) {
        q.pop();
    }
    Some(q)
}

/// N(t) factored as (1-t)^e * Q(t) with Q(1) != 0; returns (e, Q).
fn strip_unit_roots(mut n: Vec<i64>) -> (usize, Vec<i64>) {
    let mut e = 0;
    while let Some(q) = div_one_minus_t(&n) {
        n = q;
        e += 1;
    }
    (e, n)
}

fn reduced_numerator(ideal: &IdealBasis) -> Result<(usize, Vec<i64>), PolyError> {
    let n = hilbert_numerator(ideal)?;
    // A vanishing numerator means HS(R/I) = 0: the ideal is the unit
    // ideal and its locus is empty.
    if n.is_empty() {
        return Err(PolyError::UnitIdeal);
    }
    Ok(strip_unit_roots(n))
}

/// The dimension of the affine vanishing locus of a homogeneous ideal.
///
/// The locus is a cone, so it is nonempty (it contains the origin) and
/// its dimension is the Krull dimension of R/I.  The zero ideal gives
/// the whole space (dimension = number of variables); an ideal whose
/// locus is just the origin gives 0.
///
/// # Errors
///
/// [`PolyError::NotHomogeneous`] for mixed-degree generators;
/// [`PolyError::UnitIdeal`] when the ideal contains a unit (empty
/// locus).
pub fn affine_dim(ideal: &IdealBasis) -> Result<usize, PolyError> {
    let (e, _) = reduced_numerator(ideal)?;
    Ok(ideal.ring().nvars() - e)
}

/// The degree of the vanishing locus: Q(1) for positive-dimensional
/// loci (the zero ideal has degree 1), and 0 by convention when the
/// locus is the origin alone.
///
/// # Errors
///
/// As for [`affine_dim`].
pub fn ideal_degree(ideal: &IdealBasis) -> Result<u64, PolyError> {
    let (e, q) = reduced_numerator(ideal)?;
    if e == ideal.ring().nvars() {
        return Ok(0);
    }
    let q1: i64 = q.iter().sum();
    debug_assert!(q1 > 0, "reduced numerator must be positive at t = 1");
    Ok(q1 as u64)
}

/// The Hilbert polynomial of R/I as rational coefficients of ascending
/// powers of t; the empty vector is the zero polynomial (dimension-0
/// loci).  For t large, HP(t) equals the Hilbert function dim (R/I)_t.
///
/// # Errors
///
/// As for [`affine_dim`].
pub fn hilbert_poly(ideal: &IdealBasis) -> Result<Vec<BigRational>, PolyError> {
    let (e, q) = reduced_numerator(ideal)?;
    let a = ideal.ring().nvars() - e;
    if a == 0 {
        return Ok(Vec::new());
    }
    let mut hp = vec![BigRational::zero(); a];
    for (j, &c) in q.iter().enumerate() {
        // binom(t - j + a - 1, a - 1) as a polynomial in t:
        // prod_{i=1}^{a-1} (t - j + a - i) / (a - 1)!
        let mut term = vec![BigRational::from_integer(BigInt::from(c))];
        for i in 1..a {
            let shift = BigRational::from_integer(BigInt::from(a as i64 - j as i64 - i as i64));
            // term *= (t + shift)
            let mut next = vec![BigRational::zero(); term.len() + 1];
            for (k, coeff) in term.iter().enumerate() {
                next[k] += coeff * &shift;
                next[k + 1] += coeff;
            }
            term = next;
        }
        let fact: BigInt = (1..a as i64).map(BigInt::from).product();
        let fact = BigRational::from_integer(fact);
        for (k, coeff) in term.into_iter().enumerate() {
            hp[k] += coeff / &fact;
        }
    }
    while hp.last().map(Zero::is_zero) == Some(true) {
        hp.pop();
    }
    Ok(hp)
}

/// The first `upto + 1` coefficients of the Hilbert series of R/I,
/// i.e. dim (R/I)_t for t = 0..=upto, obtained by expanding
/// N(t)/(1-t)^d as a power series.
///
/// # Errors
///
/// [`PolyError::NotHomogeneous`] for mixed-degree generators.
pub fn hilbert_series(ideal: &IdealBasis, upto: usize) -> Result<Vec<u64>, PolyError> {
    let n = hilbert_numerator(ideal)?;
    let d = ideal.ring().nvars();
    // 1/(1-t)^d = sum_k binom(k + d - 1, d - 1) t^k.
    let mut inv = vec![0i64; upto + 1];
    for (k, slot) in inv.iter_mut().enumerate() {
        let mut b: i64 = 1;
        for i in 0..d.saturating_sub(1) {
            b = b * (k as i64 + d as i64 - 1 - i as i64) / (i as i64 + 1);
        }
        *slot = if d == 0 && k > 0 { 0 } else { b };
    }
    let mut out = Vec::with_capacity(upto + 1);
    for t in 0..=upto {
        let mut acc = 0i64;
        for (j, &c) in n.iter().enumerate().take(t + 1) {
            acc += c * inv[t - j];
        }
        debug_assert!(acc >= 0, "graded dimensions cannot be negative");
        out.push(acc as u64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{IdealBasis, Monomial, Poly, Ring};
    use super::*;
    use crate::gf::PrimeField;
    use num_traits::One;
    use proptest::prelude::*;

    fn ring(p: u64, nvars: usize) -> Ring {
        Ring::with_letter(PrimeField::new(p).unwrap(), nvars, 'z')
    }

    fn mono(r: Ring, e: &[u16]) -> Poly {
        r.poly_from(&[(Monomial::from_exps(e.to_vec()), 1)])
    }

    #[test]
    fn hyperplane_in_three_space() {
        let r = ring(3, 3);
        let ideal = IdealBasis::new(r, vec![r.var(0).unwrap()]);
        assert_eq!(hilbert_numerator(&ideal).unwrap(), vec![1, -1]);
        assert_eq!(affine_dim(&ideal).unwrap(), 2);
        assert_eq!(ideal_degree(&ideal).unwrap(), 1);
        let one = BigRational::from_integer(1.into());
        assert_eq!(hilbert_poly(&ideal).unwrap(), vec![one.clone(), one]);
    }

    #[test]
    fn triple_product_surface() {
        let r = ring(5, 3);
        let ideal = IdealBasis::new(r, vec![mono(r, &[1, 1, 1])]);
        assert_eq!(affine_dim(&ideal).unwrap(), 2);
        assert_eq!(ideal_degree(&ideal).unwrap(), 3);
        // HP(t) = 3t.
        let hp = hilbert_poly(&ideal).unwrap();
        assert_eq!(hp, vec![BigRational::zero(), BigRational::from_integer(3.into())]);
    }

    #[test]
    fn zero_ideal_is_the_whole_space() {
        let r = ring(7, 4);
        let ideal = IdealBasis::new(r, vec![]);
        assert_eq!(hilbert_numerator(&ideal).unwrap(), vec![1]);
        assert_eq!(affine_dim(&ideal).unwrap(), 4);
        assert_eq!(ideal_degree(&ideal).unwrap(), 1);
        // HP(t) = binom(t+3, 3) = (t^3 + 6t^2 + 11t + 6)/6.
        let hp = hilbert_poly(&ideal).unwrap();
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(hp, vec![q(1, 1), q(11, 6), q(1, 1), q(1, 6)]);
    }

    #[test]
    fn origin_only_locus_has_dimension_and_degree_zero() {
        let r = ring(3, 2);
        let ideal = IdealBasis::new(r, vec![r.var(0).unwrap(), r.var(1).unwrap()]);
        assert_eq!(hilbert_numerator(&ideal).unwrap(), vec![1, -2, 1]);
        assert_eq!(affine_dim(&ideal).unwrap(), 0);
        assert_eq!(ideal_degree(&ideal).unwrap(), 0);
        assert!(hilbert_poly(&ideal).unwrap().is_empty());
    }

    #[test]
    fn unit_and_inhomogeneous_ideals_are_rejected() {
        let r = ring(3, 2);
        let unit = IdealBasis::new(r, vec![r.constant(2)]);
        assert_eq!(affine_dim(&unit), Err(PolyError::UnitIdeal));
        let z1 = r.var(0).unwrap();
        let mixed = IdealBasis::new(r, vec![&z1 + &r.one()]);
        assert_eq!(affine_dim(&mixed), Err(PolyError::NotHomogeneous));
        assert_eq!(ideal_degree(&mixed), Err(PolyError::NotHomogeneous));
    }

    #[test]
    fn line_with_embedded_structure() {
        // (z1 z2, z2^2, z1 z3, z3^2, z2 z3): the z1-axis; HF = 1,3,1,1,...
        let r = ring(3, 3);
        let ideal = IdealBasis::new(
            r,
            vec![
                mono(r, &[1, 1, 0]),
                mono(r, &[0, 2, 0]),
                mono(r, &[1, 0, 1]),
                mono(r, &[0, 0, 2]),
                mono(r, &[0, 1, 1]),
            ],
        );
        assert_eq!(affine_dim(&ideal).unwrap(), 1);
        assert_eq!(ideal_degree(&ideal).unwrap(), 1);
        assert_eq!(hilbert_series(&ideal, 5).unwrap(), vec![1, 3, 1, 1, 1, 1]);
    }

    /// Brute-force Hilbert function of a *monomial* ideal: count the
    /// degree-t monomials divisible by no generator.
    fn monomial_hf(nvars: usize, gens: &[Monomial], t: usize) -> u64 {
        fn enumerate(nvars: usize, deg: usize) -> Vec<Monomial> {
            let mut out = Vec::new();
            let mut exps = vec![0u16; nvars];
            fn rec(exps: &mut Vec<u16>, i: usize, left: usize, out: &mut Vec<Monomial>) {
                if i + 1 == exps.len() {
                    exps[i] = left as u16;
                    out.push(Monomial::from_exps(exps.clone()));
                    return;
                }
                for e in 0..=left {
                    exps[i] = e as u16;
                    rec(exps, i + 1, left - e, out);
                }
            }
            rec(&mut exps, 0, deg, &mut out);
            out
        }
        enumerate(nvars, t)
            .into_iter()
            .filter(|m| !gens.iter().any(|g| g.divides(m)))
            .count() as u64
    }

    /// Brute-force Hilbert function of an arbitrary homogeneous ideal
    /// over F_p, by pure linear algebra: dim (R/I)_t is the number of
    /// degree-t monomials minus the rank of the multiples m*g of the
    /// generators.  Completely independent of the Groebner machinery.
    fn linear_algebra_hf(ideal: &IdealBasis, t: usize) -> u64 {
        let r = ideal.ring();
        let nvars = r.nvars();
        fn enumerate(nvars: usize, deg: usize) -> Vec<Monomial> {
            let mut out = Vec::new();
            let mut exps = vec![0u16; nvars];
            fn rec(exps: &mut Vec<u16>, i: usize, left: usize, out: &mut Vec<Monomial>) {
                if i + 1 == exps.len() {
                    exps[i] = left as u16;
                    out.push(Monomial::from_exps(exps.clone()));
                    return;
                }
                for e in 0..=left {
                    exps[i] = e as u16;
                    rec(exps, i + 1, left - e, out);
                }
            }
            rec(&mut exps, 0, deg, &mut out);
            out
        }
        let basis = enumerate(nvars, t);
        let index: std::collections::HashMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for g in ideal.gens() {
            let dg = g.degree().unwrap() as usize;
            if dg > t {
                continue;
            }
            for m in enumerate(nvars, t - dg) {
                let prod = g.mul_term(&m, 1);
                let mut row = vec![0u64; basis.len()];
                for (mm, c) in prod.terms() {
                    row[index[mm]] = *c;
                }
                rows.push(row);
            }
        }
        // Gaussian elimination over F_p.
        let field = r.field();
        let mut rank = 0usize;
        let mut mat = rows;
        let cols = basis.len();
        for col in 0..cols {
            let Some(pivot) = (rank..mat.len()).find(|&i| mat[i][col] != 0) else {
                continue;
            };
            mat.swap(rank, pivot);
            let inv = field.inv_raw(mat[rank][col]);
            for i in 0..mat.len() {
                if i != rank && mat[i][col] != 0 {
                    let factor = field.mul_raw(mat[i][col], inv);
                    for j in col..cols {
                        let sub = field.mul_raw(factor, mat[rank][j]);
                        mat[i][j] = field.sub_raw(mat[i][j], sub);
                    }
                }
            }
            rank += 1;
        }
        (basis.len() - rank) as u64
    }

    #[test]
    fn series_matches_linear_algebra_on_a_nonmonomial_ideal() {
        let r = ring(7, 3);
        let z1 = r.var(0).unwrap();
        let z2 = r.var(1).unwrap();
        let z3 = r.var(2).unwrap();
        let ideal = IdealBasis::new(
            r,
            vec![
                &(&z1 * &z2) - &(&z3 * &z3),
                &(&z2 * &z2) + &(&z1 * &z3),
            ],
        );
        let series = hilbert_series(&ideal, 8).unwrap();
        for t in 0..=8 {
            assert_eq!(series[t], linear_algebra_hf(&ideal, t), "degree {t}");
        }
    }

    #[test]
    fn polynomial_matches_series_past_the_numerator_degree() {
        let r = ring(5, 3);
        let z1 = r.var(0).unwrap();
        let z2 = r.var(1).unwrap();
        let z3 = r.var(2).unwrap();
        let ideal = IdealBasis::new(
            r,
            vec![&(&z1 * &z2) - &(&z3 * &z3), (&z1 * &z1).clone()],
        );
        let n = hilbert_numerator(&ideal).unwrap();
        let d = r.nvars();
        let start = n.len().saturating_sub(d).max(0);
        let series = hilbert_series(&ideal, 9).unwrap();
        let hp = hilbert_poly(&ideal).unwrap();
        let eval = |t: usize| -> u64 {
            let t = BigRational::from_integer((t as i64).into());
            let mut acc = BigRational::zero();
            let mut pow = BigRational::one();
            for c in &hp {
                acc += c * &pow;
                pow *= &t;
            }
            assert!(acc.is_integer());
            let v: BigInt = acc.to_integer();
            u64::try_from(v).unwrap()
        };
        for t in start..=9 {
            assert_eq!(series[t], eval(t), "degree {t}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn numerator_route_matches_divisibility_counts(
            seed in prop::collection::vec((0u16..3, 0u16..3, 0u16..3), 1..6),
        ) {
            let r = ring(3, 3);
            let gens: Vec<Poly> = seed
                .iter()
                .filter(|&&(a, b, c)| a + b + c > 0)
                .map(|&(a, b, c)| mono(r, &[a, b, c]))
                .collect();
            prop_assume!(!gens.is_empty());
            let mons: Vec<Monomial> =
                gens.iter().map(|g| g.terms()[0].0.clone()).collect();
            let ideal = IdealBasis::new(r, gens);
            let series = hilbert_series(&ideal, 8).unwrap();
            for t in 0..=8usize {
                prop_assert_eq!(series[t], monomial_hf(3, &mons, t));
            }
        }

        #[test]
        fn series_matches_linear_algebra_on_random_binomial_ideals(
            seed in prop::collection::vec((0usize..6, 0usize..6, 1u64..5), 1..4),
        ) {
            // Random differences of degree-2 monomials in 3 variables.
            let r = ring(5, 3);
            let quads: Vec<Monomial> = {
                let mut v = Vec::new();
                for i in 0..3u16 {
                    for j in i..3u16 {
                        let mut e = vec![0u16; 3];
                        e[i as usize] += 1;
                        e[j as usize] += 1;
                        v.push(Monomial::from_exps(e));
                    }
                }
                v
            };
            let gens: Vec<Poly> = seed
                .iter()
                .map(|&(i, j, c)| {
                    let a = r.poly_from(&[(quads[i].clone(), 1)]);
                    let b = r.poly_from(&[(quads[j].clone(), c as i64)]);
                    &a - &b
                })
                .filter(|g| !g.is_zero())
                .collect();
            prop_assume!(!gens.is_empty());
            let ideal = IdealBasis::new(r, gens);
            let series = hilbert_series(&ideal, 7).unwrap();
            for t in 0..=7usize {
                prop_assert_eq!(series[t], linear_algebra_hf(&ideal, t));
            }
        }
    }
}
