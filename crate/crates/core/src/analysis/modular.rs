//! Exact solution of sparse integer symmetric positive definite systems.
//!
//! The system is factored as `L D L^T` modulo a sequence of 31-bit primes,
//! the residues are combined by the Chinese remainder theorem, and the
//! rational solution is recovered by rational reconstruction. A candidate is
//! accepted only after an exact integer residual check.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Deterministic Miller-Rabin for 32-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Primes below `2^31` in decreasing order.
fn primes() -> impl Iterator<Item = u64> {
    (1u64 << 30..(1u64 << 31)).rev().filter(|&n| is_prime(n))
}

/// Solves `A y = c (mod p)` for a symmetric matrix given by full sparse rows.
/// Returns `None` when a pivot vanishes modulo `p`.
fn ldl_solve_mod(rows: &[Vec<(usize, i64)>], rhs: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = rows.len();
    let reduce = |v: i64| v.rem_euclid(p as i64) as u64;
    let mut dinv = vec![0u64; n];
    // cols[k]: entries (j, l_jk) of column k of L below the diagonal.
    let mut cols: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    let mut w = vec![0u64; n];
    let mut mark = vec![usize::MAX; n];
    let mut z = vec![0u64; n];
    let mut heap = BinaryHeap::new();
    for i in 0..n {
        let mut diag = 0;
        for &(j, v) in &rows[i] {
            if j < i {
                w[j] = reduce(v);
                if mark[j] != i {
                    mark[j] = i;
                    heap.push(Reverse(j));
                }
            } else if j == i {
                diag = reduce(v);
            }
        }
        let mut zi = rhs[i];
        while let Some(Reverse(k)) = heap.pop() {
            let wk = w[k];
            w[k] = 0;
            if wk == 0 {
                continue;
            }
            let l = wk * dinv[k] % p;
            for &(j, ljk) in &cols[k] {
                w[j] = (w[j] + p - wk * ljk % p) % p;
                if mark[j] != i {
                    mark[j] = i;
                    heap.push(Reverse(j));
                }
            }
            diag = (diag + p - l * wk % p) % p;
            zi = (zi + p - l * z[k] % p) % p;
            cols[k].push((i, l));
        }
        if diag == 0 {
            return None;
        }
        dinv[i] = inv_mod(diag, p);
        z[i] = zi;
    }
    let mut y = vec![0u64; n];
    for i in (0..n).rev() {
        let mut s = z[i] * dinv[i] % p;
        for &(j, l) in &cols[i] {
            s = (s + p - l * y[j] % p) % p;
        }
        y[i] = s;
    }
    Some(y)
}

/// `a/b ≡ x (mod m)` with `|a|, b ≤ bound`, if such a fraction exists.
fn reconstruct(x: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// `A y - c` is zero, with `y = num / den`.
fn verify(rows: &[Vec<(usize, i64)>], rhs: &[BigInt], num: &[BigInt], den: &BigInt) -> bool {
    rows.iter().zip(rhs).all(|(row, c)| {
        let lhs = row
            .iter()
            .fold(BigInt::zero(), |acc, &(j, v)| acc + &num[j] * v);
        lhs == c * den
    })
}

/// Tries to recover `y` with a common denominator from the residues modulo `m`.
fn recover(residues: &[BigInt], m: &BigInt) -> Option<(Vec<BigInt>, BigInt)> {
    let bound = (m / 2u32).sqrt();
    let half = m / 2u32;
    let mut den = BigInt::one();
    for x in residues {
        let mut t = (x * &den).mod_floor(m);
        if t > half {
            t -= m;
        }
        if t.abs() > bound {
            let (_, b) = reconstruct(&t, m, &bound)?;
            den *= &b;
            if den > bound {
                return None;
            }
        }
    }
    let num = residues
        .iter()
        .map(|x| {
            let mut t = (x * &den).mod_floor(m);
            if t > half {
                t -= m;
            }
            t
        })
        .collect();
    Some((num, den))
}

/// Exact solution of `A y = c` for a nonsingular symmetric integer matrix whose
/// leading minors in the given row order are nonzero. Returns the numerators
/// and a common positive denominator.
pub fn solve_spd(rows: &[Vec<(usize, i64)>], rhs: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let n = rows.len();
    if n == 0 {
        return Some((Vec::new(), BigInt::one()));
    }
    // Cramer plus Hadamard: |num| ≤ H · max-column bound, den ≤ H.
    let log_h: f64 = rows
        .iter()
        .map(|r| 0.5 * r.iter().map(|&(_, v)| (v as f64).powi(2)).sum::<f64>().log2())
        .sum();
    let c_bits = rhs.iter().map(|c| c.bits()).max().unwrap_or(0) as f64 + (n as f64).log2() + 1.0;
    let limit_bits = (2.0 * log_h + c_bits + 4.0).ceil() as u64 + 64;

    let mut m = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n];
    let mut next_check = 2usize;
    let mut used = 0usize;
    for p in primes() {
        let c_mod: Vec<u64> = rhs
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0))
            .collect();
        let Some(y) = ldl_solve_mod(rows, &c_mod, p) else {
            continue;
        };
        let pb = BigInt::from(p);
        let m_inv = inv_mod((&m % &pb).to_u64().unwrap_or(0), p);
        for (a, &r) in acc.iter_mut().zip(&y) {
            let cur = (&*a % &pb).to_u64().unwrap_or(0);
            let step = (r + p - cur) % p * m_inv % p;
            if step != 0 {
                *a += &m * step;
            }
        }
        m *= &pb;
        used += 1;
        let exhausted = m.bits() > limit_bits;
        if used >= next_check || exhausted {
            next_check = used + used / 4 + 1;
            if let Some((num, den)) = recover(&acc, &m) {
                if verify(rows, rhs, &num, &den) {
                    return Some((num, den));
                }
            }
            if exhausted {
                return None;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
    }

    #[test]
    fn reconstruction_round_trip() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(999_983u64);
        let bound = (&m / 2u32).sqrt();
        for (a, b) in [(3i64, 7i64), (-5, 11), (0, 1), (123, 456)] {
            let g = a.gcd(&b);
            let inv = BigInt::from(b).extended_gcd(&m).x;
            let x = (BigInt::from(a) * inv).mod_floor(&m);
            let (p, q) = reconstruct(&x, &m, &bound).unwrap();
            assert_eq!(BigRational::new(p, q), BigRational::new((a / g).into(), (b / g).into()));
        }
    }

    #[test]
    fn tridiagonal_system() {
        // 2y_i - y_{i-1} - y_{i+1} = c_i, the Dirichlet problem on a path.
        let n = 5;
        let rows: Vec<Vec<(usize, i64)>> = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2)];
                if i > 0 {
                    r.push((i - 1, -1));
                }
                if i + 1 < n {
                    r.push((i + 1, -1));
                }
                r
            })
            .collect();
        let mut rhs = vec![BigInt::zero(); n];
        rhs[0] = BigInt::from(1);
        rhs[n - 1] = BigInt::from(13);
        let (num, den) = solve_spd(&rows, &rhs).unwrap();
        let y: Vec<BigRational> = num.iter().map(|v| BigRational::new(v.clone(), den.clone())).collect();
        for (i, v) in y.iter().enumerate() {
            assert_eq!(*v, BigRational::from_integer((1 + 2 * (i as i64 + 1)).into()));
        }
    }
}
