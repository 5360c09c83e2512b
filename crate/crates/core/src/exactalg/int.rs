use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{check_prime, MatrixError, PrimeFieldMatrix, RationalMatrix};

/// Dense matrix with arbitrary-precision integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{cols} columns"),
                found: format!("{} columns", bad.len()),
            });
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| BigInt::from(rows[i][j])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Entrywise residues modulo a prime.
    pub fn reduce_mod_p(&self, p: u64) -> Result<PrimeFieldMatrix, MatrixError> {
        let q = check_prime(p)?;
        let modulus = BigInt::from(q);
        let mut out = PrimeFieldMatrix::zeros(p, self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let r = self.get(i, j).mod_floor(&modulus);
                let r = r.to_u32().expect("residue below a u32 modulus");
                if r != 0 {
                    out.set(i, j, r);
                }
            }
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.rows, self.cols, |i, j| BigRational::from_integer(self.get(i, j).clone()))
    }

    /// Exact rank over the rationals by fraction-free (Bareiss) elimination.
    ///
    /// After step `k` every live entry is a `(k+1) x (k+1)` minor of the
    /// input, so the division by the previous pivot is exact.
    pub fn rank(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut prev = BigInt::from(1);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    a.swap(piv * cols + j, r * cols + j);
                }
            }
            let pivot = a[r * cols + c].clone();
            for i in r + 1..rows {
                let lead = a[i * cols + c].clone();
                for j in c + 1..cols {
                    let t = &pivot * &a[i * cols + j] - &lead * &a[r * cols + j];
                    debug_assert!((&t % &prev).is_zero());
                    a[i * cols + j] = t / &prev;
                }
                a[i * cols + c] = BigInt::zero();
            }
            prev = pivot;
            r += 1;
        }
        r
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        Ok(IntMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_examples() {
        let m = IntMatrix::from_rows(&[vec![-1]]).unwrap();
        assert_eq!(m.reduce_mod_p(2).unwrap().to_rows(), vec![vec![1]]);
        let m = IntMatrix::from_rows(&[vec![3, -4], vec![5, 6]]).unwrap();
        assert_eq!(m.reduce_mod_p(3).unwrap().to_rows(), vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(m.reduce_mod_p(9), Err(MatrixError::NotPrime(9)));
    }

    #[test]
    fn bareiss_rank_small() {
        assert_eq!(IntMatrix::zeros(4, 4).rank(), 0);
        let v = IntMatrix::from_rows(&[vec![1, 1, 1], vec![1, 2, 4], vec![1, 3, 9]]).unwrap();
        assert_eq!(v.rank(), 3);
        let dep = IntMatrix::from_rows(&[vec![2, 4, 6], vec![1, 2, 3], vec![0, 0, 1]]).unwrap();
        assert_eq!(dep.rank(), 2);
        // zero column before a pivot
        let z = IntMatrix::from_rows(&[vec![0, 3, 1], vec![0, 6, 2], vec![0, 1, 5]]).unwrap();
        assert_eq!(z.rank(), 2);
    }

    #[test]
    fn bareiss_agrees_with_rational_elimination() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(0..9), rng.gen_range(0..9));
            let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            let m = if r == 0 { IntMatrix::zeros(0, c) } else { IntMatrix::from_rows(&rows).unwrap() };
            assert_eq!(m.rank(), m.to_rational().rank());
        }
    }
}
