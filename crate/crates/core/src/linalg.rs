//! Exact rank, echelon form and nullspace over the rationals.
//!
//! Rows are cleared of denominators and reduced with fraction-free
//! (Bareiss) elimination over the integers; the echelon rows are then
//! normalized into reduced row-echelon form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigRational>>,
}

/// Reduced row-echelon form: the nonzero rows and their pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rows: Vec<Vec<BigRational>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![vec![BigRational::zero(); cols]; rows],
        }
    }

    pub fn from_rows(cols: usize, data: Vec<Vec<BigRational>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigRational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.data[i][j] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i][j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn rref(&self) -> Rref {
        rref(&self.data, self.cols)
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Canonical nullspace basis: the reduced row-echelon basis of the kernel.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let r = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &r.pivots {
            is_pivot[p] = true;
        }
        let raw: Vec<Vec<BigRational>> = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in r.rows.iter().zip(&r.pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect();
        rref(&raw, self.cols).rows
    }
}

/// Reduced row-echelon form of `rows` (each of length `cols`).
pub fn rref(rows: &[Vec<BigRational>], cols: usize) -> Rref {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let pivots = bareiss(&mut a, cols);

    let mut out: Vec<Vec<BigRational>> = Vec::with_capacity(pivots.len());
    for (r, &p) in pivots.iter().enumerate() {
        let lead = a[r][p].clone();
        out.push(
            a[r].iter()
                .map(|v| BigRational::new(v.clone(), lead.clone()))
                .collect(),
        );
    }
    // Back-substitute so each pivot column is a unit vector.
    for r in (0..out.len()).rev() {
        let p = pivots[r];
        let (above, rest) = out.split_at_mut(r);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            let f = row[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(pivot_row).skip(p) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    Rref { rows: out, pivots }
}

fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    row.iter()
        .map(|v| v.numer() * (&l / v.denom()))
        .collect()
}

/// Fraction-free forward elimination in place; returns the pivot columns.
/// Rows `0..rank` of `a` hold the echelon form afterwards.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> Vec<usize> {
    let n = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pv = &pivot_row[c];
        for row in bottom.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let num = pv * &row[j] - &lead * &pivot_row[j];
                debug_assert!(num.is_multiple_of(&prev), "Bareiss division must be exact");
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        // Earlier rows keep their own scale; only rows below participate.
        prev = pv.clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// Plain Gauss-Jordan over the rationals, used as an independent route.
    fn naive_rref(rows: &[Vec<BigRational>], cols: usize) -> Rref {
        let mut a = rows.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = BigRational::one() / a[r][c].clone();
            for v in a[r].iter_mut() {
                *v *= &inv;
            }
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..cols {
                        let d = &f * &a[r][j];
                        a[i][j] -= d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Rref { rows: a, pivots }
    }

    #[test]
    fn rank_examples() {
        let m = Matrix::from_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::zeros(3, 4).rank(), 0);
        let id = Matrix::from_i64(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(id.rank(), 2);
    }

    #[test]
    fn nullspace_examples() {
        let m = Matrix::from_i64(&[vec![1, 1, 0], vec![0, 0, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![q(1, 1), q(-1, 1), q(0, 1)]]);
        // Zero matrix: identity basis.
        let ns = Matrix::zeros(2, 3).nullspace();
        assert_eq!(ns.len(), 3);
        assert_eq!(ns[0][0], q(1, 1));
        // Empty codomain.
        let m = Matrix::from_rows(2, Vec::new());
        assert_eq!(m.nullspace().len(), 2);
    }

    #[test]
    fn rational_entries() {
        let m = Matrix::from_rows(2, vec![vec![q(1, 2), q(1, 3)], vec![q(3, 2), q(1, 1)]]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![q(1, 1), q(-3, 2)]]);
        assert!(m.mul_vec(&ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn matches_naive_on_l_shaped_example() {
        let m = Matrix::from_i64(&[
            vec![0, 2, 4, 0, 1],
            vec![0, 1, 2, 1, 0],
            vec![0, 3, 6, 1, 1],
            vec![5, 0, 0, 0, 7],
        ]);
        assert_eq!(m.rref(), naive_rref(&m.data, m.cols));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
            (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
                prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)
            })
        }

        proptest! {
            #[test]
            fn bareiss_agrees_with_gauss_jordan(rows in small_matrix()) {
                let m = Matrix::from_i64(&rows);
                prop_assert_eq!(m.rref(), naive_rref(&m.data, m.cols));
            }

            #[test]
            fn rank_nullity(rows in small_matrix()) {
                let m = Matrix::from_i64(&rows);
                let ns = m.nullspace();
                prop_assert_eq!(m.rank() + ns.len(), m.cols());
                for v in &ns {
                    prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
                }
                // The kernel basis is itself in reduced row-echelon form.
                let again = rref(&ns, m.cols());
                prop_assert_eq!(again.rows, ns);
            }
        }
    }
}
