//! Smith normal form over the integers.
//!
//! Only the invariant factors are produced; the unimodular transforms are not
//! tracked since nothing downstream needs them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Returns the nonzero invariant factors `d_1 | d_2 | ... | d_r` of an integer
/// matrix, where `r` is its rank. All factors are positive.
pub fn invariant_factors(matrix: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = matrix.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = matrix[0].len();
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut factors = Vec::new();

    for t in 0..rows.min(cols) {
        if !move_min_to(&mut a, t) {
            break;
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                move_min_to(&mut a, t);
                continue;
            }
            // Row and column cleared; enforce divisibility of the remaining block.
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t]))
            });
            match offender {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        factors.push(a[t][t].abs());
    }
    factors
}

/// Moves the entry of least nonzero absolute value in the block `[t.., t..]`
/// to position `(t, t)`. Returns false when the block is zero.
fn move_min_to(a: &mut [Vec<BigInt>], t: usize) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    let Some((i, j)) = best else {
        return false;
    };
    a.swap(t, i);
    for row in a.iter_mut() {
        row.swap(t, j);
    }
    true
}
