//! Arithmetic in the prime field F_p for odd primes p < 2^16.
//!
//! [`PrimeField`] is a tiny context object carrying the modulus; it hands
//! out canonical [`Fp`] values (always in `0..p`) and also exposes raw
//! `u64` helpers for the hot loops in [`crate::rankloci`], where wrapping
//! every scalar in a struct would be wasted motion.  The bound p < 2^16
//! keeps every intermediate product below 2^32, so plain `u64` arithmetic
//! never overflows.

use std::fmt;

/// Errors raised when building a field or inverting an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    /// The requested modulus is not prime.
    NotPrime(u64),
    /// The requested modulus is the even prime 2, which is excluded:
    /// the constructions in this crate need 2 to be invertible.
    EvenPrime,
    /// The requested modulus is too large (must be < 2^16).
    TooLarge(u64),
    /// Attempted to invert zero.
    ZeroInverse,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
            FieldError::EvenPrime => write!(f, "p = 2 is not supported; the modulus must be odd"),
            FieldError::TooLarge(p) => write!(f, "{p} is out of range; the modulus must be < 2^16"),
            FieldError::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
        }
    }
}

impl std::error::Error for FieldError {}

/// The field F_p for an odd prime p < 2^16.
///
/// Copyable and cheap; two fields compare equal exactly when their moduli
/// agree.  All element-level operations live on [`Fp`]; the `*_raw`
/// methods here work on bare `u64` values already reduced to `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Builds F_p, validating the modulus.
    ///
    /// # Errors
    ///
    /// Returns [`FieldError::NotPrime`] for composite moduli,
    /// [`FieldError::EvenPrime`] for p = 2, and [`FieldError::TooLarge`]
    /// for p >= 2^16.
    pub fn new(p: u64) -> Result<PrimeField, FieldError> {
        if p >= 1 << 16 {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 {
            return Err(FieldError::EvenPrime);
        }
        Ok(PrimeField { p })
    }

    /// The modulus.
    #[inline]
    pub fn p(self) -> u64 {
        self.p
    }

    /// The canonical representative of `n` modulo p, for signed input.
    #[inline]
    pub fn elem(self, n: i64) -> Fp {
        let p = self.p as i64;
        let r = n.rem_euclid(p) as u64;
        Fp { value: r, field: self }
    }

    /// The canonical representative of `n` modulo p, for unsigned input.
    #[inline]
    pub fn from_u64(self, n: u64) -> Fp {
        Fp { value: n % self.p, field: self }
    }

    /// The additive identity.
    #[inline]
    pub fn zero(self) -> Fp {
        Fp { value: 0, field: self }
    }

    /// The multiplicative identity.
    #[inline]
    pub fn one(self) -> Fp {
        Fp { value: 1, field: self }
    }

    /// `a + b` on canonical raw values.
    #[inline]
    pub fn add_raw(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    /// `a - b` on canonical raw values.
    #[inline]
    pub fn sub_raw(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    /// `-a` on a canonical raw value.
    #[inline]
    pub fn neg_raw(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// `a * b` on canonical raw values.
    #[inline]
    pub fn mul_raw(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    /// `a^e` on a canonical raw value, by square and multiply.
    pub fn pow_raw(self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^-1` on a canonical raw value, via Fermat: a^(p-2).
    ///
    /// # Panics
    ///
    /// Panics if `a == 0`; hot paths must guard for zero themselves.
    /// Use [`Fp::inv`] for the checked variant.
    #[inline]
    pub fn inv_raw(self, a: u64) -> u64 {
        assert!(a != 0, "zero has no inverse in F_{}", self.p);
        self.pow_raw(a, self.p - 2)
    }

    /// The inverse of 2, i.e. (p+1)/2.  Group multiplication uses this
    /// constant on every call, so it is worth a dedicated accessor.
    #[inline]
    pub fn half(self) -> u64 {
        (self.p + 1) / 2
    }

    /// The smallest positive primitive root modulo p.
    ///
    /// Candidates g = 2, 3, ... are accepted once g^((p-1)/q) != 1 for
    /// every prime q dividing p - 1; the first hit is returned, so the
    /// choice is deterministic.
    pub fn primitive_element(self) -> Fp {
        let factors = prime_factors(self.p - 1);
        for g in 2..self.p {
            if factors.iter().all(|&q| self.pow_raw(g, (self.p - 1) / q) != 1) {
                return Fp { value: g, field: self };
            }
        }
        unreachable!("every prime field has a primitive root");
    }
}

/// Distinct prime factors of `n`, by trial division.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// An element of F_p in canonical form (`0 <= value < p`).
///
/// Elements remember their field, and the arithmetic operators check that
/// both operands come from the same field: mixing moduli is a programming
/// error and panics rather than producing garbage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    field: PrimeField,
}

impl Fp {
    /// The canonical representative in `0..p`.
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    /// The field this element belongs to.
    #[inline]
    pub fn field(self) -> PrimeField {
        self.field
    }

    /// True for the additive identity.
    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// The multiplicative inverse.
    ///
    /// # Errors
    ///
    /// Returns [`FieldError::ZeroInverse`] when `self` is zero.
    pub fn inv(self) -> Result<Fp, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Fp { value: self.field.inv_raw(self.value), field: self.field })
    }

    /// `self^e`.
    pub fn pow(self, e: u64) -> Fp {
        Fp { value: self.field.pow_raw(self.value, e), field: self.field }
    }

    /// The multiplicative order of a nonzero element.
    ///
    /// # Panics
    ///
    /// Panics on zero, which generates no cyclic group.
    pub fn order(self) -> u64 {
        assert!(self.value != 0, "zero has no multiplicative order");
        let mut k = 1;
        let mut acc = self.value;
        while acc != 1 {
            acc = self.field.mul_raw(acc, self.value);
            k += 1;
        }
        k
    }
}

fn check_same_field(a: Fp, b: Fp, op: &str) {
    assert!(
        a.field == b.field,
        "cannot {op} elements of F_{} and F_{}",
        a.field.p, b.field.p
    );
}

impl std::ops::Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        check_same_field(self, rhs, "add");
        Fp { value: self.field.add_raw(self.value, rhs.value), field: self.field }
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        check_same_field(self, rhs, "subtract");
        Fp { value: self.field.sub_raw(self.value, rhs.value), field: self.field }
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        check_same_field(self, rhs, "multiply");
        Fp { value: self.field.mul_raw(self.value, rhs.value), field: self.field }
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { value: self.field.neg_raw(self.value), field: self.field }
    }
}

/// Prints just the canonical value; the modulus is context the caller
/// already has.
impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(PrimeField::new(0), Err(FieldError::NotPrime(0)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(PrimeField::new(2), Err(FieldError::EvenPrime));
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
        assert_eq!(PrimeField::new(91), Err(FieldError::NotPrime(91)));
        assert_eq!(PrimeField::new(65537), Err(FieldError::TooLarge(65537)));
        assert_eq!(PrimeField::new(1 << 16), Err(FieldError::TooLarge(1 << 16)));
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn canonical_representatives() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(f3.elem(-1).value(), 2);
        assert_eq!(f3.elem(-3).value(), 0);
        assert_eq!(f3.elem(7).value(), 1);
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.from_u64(7).value(), 0);
        assert_eq!(f7.from_u64(13).value(), 6);
    }

    #[test]
    fn small_arithmetic_by_hand() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!((f7.elem(5) + f7.elem(4)).value(), 2);
        assert_eq!((f7.elem(3) * f7.elem(5)).value(), 1);
        assert_eq!((f7.elem(2) - f7.elem(5)).value(), 4);
        assert_eq!((-f7.elem(3)).value(), 4);
        assert_eq!((-f7.elem(0)).value(), 0);
        assert_eq!(f7.elem(3).inv().unwrap().value(), 5);
        assert_eq!(f7.elem(2).pow(10).value(), 2); // 1024 = 146*7 + 2
    }

    #[test]
    fn zero_has_no_inverse() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.zero().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    #[should_panic(expected = "cannot add")]
    fn mixing_moduli_panics() {
        let f3 = PrimeField::new(3).unwrap();
        let f5 = PrimeField::new(5).unwrap();
        let _ = f3.one() + f5.one();
    }

    #[test]
    fn inverse_matches_fermat_exhaustively() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p {
                let inv = f.inv_raw(a);
                assert_eq!(f.mul_raw(a, inv), 1, "a * a^-1 != 1 for a = {a} in F_{p}");
                assert_eq!(inv, f.pow_raw(a, p - 2));
            }
        }
    }

    #[test]
    fn half_is_inverse_of_two() {
        for p in [3u64, 5, 7, 11, 101, 65521] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(f.mul_raw(2, f.half()), 1);
        }
    }

    #[test]
    fn primitive_elements_match_known_values() {
        let cases = [(3u64, 2u64), (5, 2), (7, 3), (11, 2), (13, 2), (23, 5), (191, 19)];
        for (p, g) in cases {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(f.primitive_element().value(), g, "primitive root of {p}");
        }
    }

    #[test]
    fn primitive_element_has_full_order_and_is_smallest() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101] {
            let f = PrimeField::new(p).unwrap();
            let g = f.primitive_element();
            assert_eq!(g.order(), p - 1, "order of claimed root mod {p}");
            for h in 2..g.value() {
                assert!(f.from_u64(h).order() < p - 1, "{h} is a smaller root mod {p}");
            }
        }
    }

    fn arb_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![3u64, 5, 7, 11, 13, 31, 127, 251, 4099, 65521])
    }

    proptest! {
        #[test]
        fn field_axioms(p in arb_prime(), a in 0u64..65536, b in 0u64..65536, c in 0u64..65536) {
            let f = PrimeField::new(p).unwrap();
            let (a, b, c) = (f.from_u64(a), f.from_u64(b), f.from_u64(c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a + (-a), f.zero());
            prop_assert_eq!(a - b, a + (-b));
            prop_assert_eq!(a * f.one(), a);
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv().unwrap(), f.one());
            }
        }
    }
}
