//! Shared helpers for the unit tests: seeded random matrices and the
//! small reference families the tests keep coming back to.

use crate::gf::PrimeField;
use crate::linforms::{FpMatrix, IntMatrix, LinFormMatrix};
use crate::poly::Ring;
use rand::rngs::StdRng;
use rand::Rng;

pub(crate) fn random_matrix(rng: &mut StdRng, field: PrimeField, rows: usize, cols: usize) -> FpMatrix {
    let mut m = FpMatrix::zero(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.gen_range(0..field.p()));
        }
    }
    m
}

pub(crate) fn random_invertible(rng: &mut StdRng, field: PrimeField, n: usize) -> FpMatrix {
    loop {
        let m = random_matrix(rng, field, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

pub(crate) fn random_linform(rng: &mut StdRng, ring: Ring, rows: usize, cols: usize) -> LinFormMatrix {
    let slices = (0..ring.nvars())
        .map(|_| random_matrix(rng, ring.field(), rows, cols))
        .collect();
    LinFormMatrix::from_slices(ring, rows, cols, slices)
}

pub(crate) fn random_skew(rng: &mut StdRng, ring: Ring, n: usize) -> LinFormMatrix {
    let field = ring.field();
    let slices = (0..ring.nvars())
        .map(|_| {
            let mut s = FpMatrix::zero(field, n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.gen_range(0..field.p());
                    s.set(i, j, v);
                    s.set(j, i, field.neg_raw(v));
                }
            }
            s
        })
        .collect();
    LinFormMatrix::from_slices(ring, n, n, slices)
}

/// The six 4 x 4 skew families in 3 variables that the tests reproduce
/// invariants for, as prime-generic integer matrices (B6 carries an
/// omega slot).
pub(crate) fn four_generator_ints() -> Vec<IntMatrix> {
    let plain = |slices: [[[i64; 4]; 4]; 3]| -> IntMatrix {
        let v: Vec<Vec<Vec<i64>>> = slices
            .iter()
            .map(|s| s.iter().map(|r| r.to_vec()).collect())
            .collect();
        IntMatrix::new(4, 3, v, vec![]).unwrap()
    };
    let mut family = vec![
        // B1: first row (0, y1, y2, y3), nothing else.
        plain([
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 1, 0], [0, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [-1, 0, 0, 0]],
        ]),
        // B2: y1, y2 in the first row, y3 at (2, 3); last row zero.
        plain([
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 1, 0], [0, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 0]],
        ]),
        // B3: y1, y2 in the first row, y3 at (2, 4).
        plain([
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 1, 0], [0, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, -1, 0, 0]],
        ]),
        // B4: full first row plus y3 at (2, 3).
        plain([
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 1, 0], [0, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
        ]),
        // B5: y1 at (1,2), y2 at (1,4) and (2,3), y3 at (3,4).
        plain([
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
            [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
            [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
        ]),
    ];
    // B6: full first row, y1 at (3, 4), y2 at (1, 3), omega*y2 at (2, 4).
    family.push(
        IntMatrix::new(
            4,
            3,
            vec![
                vec![
                    vec![0, 1, 0, 0],
                    vec![-1, 0, 0, 0],
                    vec![0, 0, 0, 1],
                    vec![0, 0, -1, 0],
                ],
                vec![
                    vec![0, 0, 1, 0],
                    vec![0, 0, 0, 0],
                    vec![-1, 0, 0, 0],
                    vec![0, 0, 0, 0],
                ],
                vec![
                    vec![0, 0, 0, 1],
                    vec![0, 0, 0, 0],
                    vec![0, 0, 0, 0],
                    vec![-1, 0, 0, 0],
                ],
            ],
            vec![(1, 1, 3)],
        )
        .unwrap(),
    );
    family
}

/// The six-member family reduced at a prime.
pub(crate) fn four_generator_family(p: u64) -> Vec<LinFormMatrix> {
    let field = PrimeField::new(p).unwrap();
    four_generator_ints().iter().map(|m| m.reduce(field)).collect()
}
