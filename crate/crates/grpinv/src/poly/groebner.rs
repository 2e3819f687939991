//! Buchberger's algorithm and polynomial division.
//!
//! The implementation is the classic critical-pair loop with the two
//! standard discards - the coprime-leading-term criterion and the chain
//! criterion - followed by full interreduction, so [`groebner`] returns
//! *the* reduced Groebner basis of the ideal: monic, minimal, tails in
//! normal form, sorted ascending by leading monomial.  That uniqueness
//! is what makes basis output usable in deterministic reports.

use super::{Monomial, MonomialOrder, Poly};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// The normal form of `f` under multivariate division by `basis`.
///
/// Every term of the result is divisible by no leading term of `basis`.
/// When several divisors apply, the earliest basis element wins, so the
/// result is deterministic for any fixed basis sequence; for a Groebner
/// basis it is the unique normal form regardless of sequence order.
pub fn reduce(f: &Poly, basis: &[Poly], order: &MonomialOrder) -> Poly {
    let ring = f.ring();
    let field = ring.field();
    let leads: Vec<(&Monomial, u64)> = basis
        .iter()
        .map(|g| g.leading_term(order).expect("zero polynomial in basis"))
        .collect();
    let mut work = f.clone();
    let mut remainder = ring.zero();
    'outer: while let Some((m, c)) = work.leading_term(order) {
        let m = m.clone();
        for (g, (lm, lc)) in basis.iter().zip(&leads) {
            if let Some(q) = lm.div_into(&m) {
                let scale = field.mul_raw(c, field.inv_raw(*lc));
                work = &work - &g.mul_term(&q, scale);
                continue 'outer;
            }
        }
        // No divisor: the leading term is already reduced.
        let t = Poly::from_btree(ring, [(m.clone(), c)].into_iter().collect());
        remainder = &remainder + &t;
        work = &work - &t;
    }
    remainder
}

/// The S-polynomial of `f` and `g`:
/// `lcm/lt(f) * f - lcm/lt(g) * g`, which cancels the leading terms.
pub fn s_polynomial(f: &Poly, g: &Poly, order: &MonomialOrder) -> Poly {
    let field = f.ring().field();
    let (lmf, lcf) = f.leading_term(order).expect("s_polynomial of zero");
    let (lmg, lcg) = g.leading_term(order).expect("s_polynomial of zero");
    let lcm = lmf.lcm(lmg);
    let uf = lmf.div_into(&lcm).expect("lcm divisible by lt(f)");
    let ug = lmg.div_into(&lcm).expect("lcm divisible by lt(g)");
    let a = f.mul_term(&uf, field.inv_raw(lcf));
    let b = g.mul_term(&ug, field.inv_raw(lcg));
    &a - &b
}

/// A critical pair, ordered so the heap pops the smallest lcm first
/// (the normal selection strategy).
struct Pair {
    lcm: Monomial,
    i: usize,
    j: usize,
    /// Cached comparison key: grevlex-canonical ordering of `lcm` is a
    /// valid selection heuristic for any admissible order.
    coprime: bool,
}

impl PartialEq for Pair {
    fn eq(&self, other: &Pair) -> bool {
        self.lcm == other.lcm && self.i == other.i && self.j == other.j
    }
}
impl Eq for Pair {}
impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Pair) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pair {
    fn cmp(&self, other: &Pair) -> Ordering {
        // Reversed: BinaryHeap is a max-heap and we want minimal lcm.
        other
            .lcm
            .cmp(&self.lcm)
            .then_with(|| (other.i, other.j).cmp(&(self.i, self.j)))
    }
}

/// The reduced Groebner basis of the ideal generated by `gens`.
///
/// Zero generators are ignored; an empty generating set yields an empty
/// basis.  The result is monic, minimal, fully interreduced and sorted
/// ascending by leading monomial, hence unique for (ideal, order).
pub fn groebner(gens: &[Poly], order: &MonomialOrder) -> Vec<Poly> {
    let mut basis: Vec<Poly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic(order))
        .collect();
    if basis.is_empty() {
        return Vec::new();
    }

    let lead = |p: &Poly| -> Monomial { p.leading_term(order).unwrap().0.clone() };

    let mut pairs: BinaryHeap<Pair> = BinaryHeap::new();
    let mut alive: Vec<(usize, usize)> = Vec::new();
    let push_pair = |pairs: &mut BinaryHeap<Pair>,
                         alive: &mut Vec<(usize, usize)>,
                         basis: &[Poly],
                         i: usize,
                         j: usize| {
        let lmi = basis[i].leading_term(order).unwrap().0;
        let lmj = basis[j].leading_term(order).unwrap().0;
        pairs.push(Pair {
            lcm: lmi.lcm(lmj),
            i,
            j,
            coprime: lmi.coprime(lmj),
        });
        alive.push((i, j));
    };

    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            push_pair(&mut pairs, &mut alive, &basis, i, j);
        }
    }

    while let Some(pair) = pairs.pop() {
        alive.retain(|&(i, j)| (i, j) != (pair.i, pair.j));
        // Buchberger's first criterion: coprime leading terms always
        // reduce to zero.
        if pair.coprime {
            continue;
        }
        // Chain criterion: if some lt(k) divides the lcm and both
        // flanking pairs are already settled, this pair is redundant.
        let chain = (0..basis.len()).any(|k| {
            if k == pair.i || k == pair.j {
                return false;
            }
            if !lead(&basis[k]).divides(&pair.lcm) {
                return false;
            }
            let key = |a: usize, b: usize| (a.min(b), a.max(b));
            !alive.contains(&key(pair.i, k)) && !alive.contains(&key(pair.j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[pair.i], &basis[pair.j], order);
        let r = reduce(&s, &basis, order);
        if !r.is_zero() {
            let r = r.monic(order);
            basis.push(r);
            let new = basis.len() - 1;
            for i in 0..new {
                push_pair(&mut pairs, &mut alive, &basis, i, new);
            }
        }
    }

    // Minimalize: drop elements whose leading monomial another leading
    // monomial divides.
    let leads: Vec<Monomial> = basis.iter().map(&lead).collect();
    let mut keep: Vec<Poly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = leads
            .iter()
            .enumerate()
            .any(|(j, lm)| j != i && lm.divides(&leads[i]) && (lm != &leads[i] || j < i));
        if !redundant {
            keep.push(g.clone());
        }
    }

    // Tail-reduce each survivor against the others.
    let mut reduced: Vec<Poly> = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<Poly> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let r = reduce(&keep[i], &others, order);
        if !r.is_zero() {
            reduced.push(r.monic(order));
        }
    }

    reduced.sort_by(|a, b| {
        let la = a.leading_term(order).unwrap().0;
        let lb = b.leading_term(order).unwrap().0;
        order.cmp(la, lb)
    });
    reduced
}

/// Buchberger's criterion as a predicate: true when every S-polynomial
/// of `basis` reduces to zero.  Used as an independent check on
/// [`groebner`] output.
pub fn is_groebner_basis(basis: &[Poly], order: &MonomialOrder) -> bool {
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let s = s_polynomial(&basis[i], &basis[j], order);
            if !reduce(&s, basis, order).is_zero() {
                return false;
            }
        }
    }
    true
}
