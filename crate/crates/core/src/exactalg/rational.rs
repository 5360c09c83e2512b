use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::MatrixError;

/// Parses `a`, `-a` or `a/b` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Dense matrix of exact rationals. `BigRational` keeps every entry in
/// lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors of common length `cols`.
    pub fn from_row_vecs(cols: usize, rows: &[Vec<BigRational>]) -> Result<Self, MatrixError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{cols} columns"),
                found: format!("{} columns", bad.len()),
            });
        }
        Ok(RationalMatrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        let conv: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        Self::from_row_vecs(cols, &conv)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Reduced row-echelon form with pivot columns; zero rows are dropped.
    ///
    /// Pivot choice: first nonzero entry in column order, rows scanned top-down.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut pivots = Vec::new();
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
            let inv = a[r * cols + c].recip();
            for j in c..cols {
                a[r * cols + j] = &a[r * cols + j] * &inv;
            }
            for i in 0..rows {
                if i == r || a[i * cols + c].is_zero() {
                    continue;
                }
                let f = a[i * cols + c].clone();
                for j in c..cols {
                    let t = &f * &a[r * cols + j];
                    a[i * cols + j] -= t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.truncate(r * cols);
        (RationalMatrix { rows: r, cols, data: a }, pivots)
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RationalMatrix) -> Result<Self, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} columns", self.cols),
                found: format!("{} columns", other.cols),
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(RationalMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(BigRational::zero(), |acc, k| acc + self.get(i, k) * rhs.get(k, j))
        }))
    }
}

/// Whether `v` lies in the row span of `basis`.
pub fn membership(v: &[BigRational], basis: &RationalMatrix) -> Result<bool, MatrixError> {
    if v.len() != basis.cols() {
        return Err(MatrixError::DimensionMismatch {
            expected: format!("vector of length {}", basis.cols()),
            found: format!("vector of length {}", v.len()),
        });
    }
    if v.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    let (echelon, pivots) = basis.rref();
    // reduce v against the echelon rows; v is in the span iff the remainder vanishes
    let mut rem = v.to_vec();
    for (r, &c) in pivots.iter().enumerate() {
        if rem[c].is_zero() {
            continue;
        }
        let f = rem[c].clone();
        for (j, e) in echelon.row(r).iter().enumerate() {
            if !e.is_zero() {
                rem[j] -= &f * e;
            }
        }
    }
    Ok(rem.iter().all(Zero::is_zero))
}

impl RationalMatrix {
    pub fn membership(&self, v: &[BigRational]) -> Result<bool, MatrixError> {
        membership(v, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn v(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::zeros(4, 4).rank(), 0);
        let van = RationalMatrix::from_i64_rows(&[vec![1, 1, 1], vec![1, 2, 4], vec![1, 3, 9]]).unwrap();
        assert_eq!(van.rank(), 3);
    }

    #[test]
    fn membership_examples() {
        let b = RationalMatrix::from_i64_rows(&[vec![1, 0]]).unwrap();
        assert!(!membership(&v(&[1, 1]), &b).unwrap());
        assert!(membership(&v(&[2, 0]), &b).unwrap());
        let b = RationalMatrix::from_i64_rows(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert!(membership(&v(&[1, 2, 3]), &b).unwrap());
        assert!(!membership(&v(&[1, 2, 4]), &b).unwrap());
        assert!(membership(&v(&[1, 2]), &b).is_err());
    }

    #[test]
    fn membership_agrees_with_rank_test() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let cols = rng.gen_range(1..6);
            let rows: Vec<Vec<i64>> =
                (0..rng.gen_range(1..5)).map(|_| (0..cols).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            let basis = RationalMatrix::from_i64_rows(&rows).unwrap();
            let x: Vec<i64> = (0..cols).map(|_| rng.gen_range(-2..=2)).collect();
            let stacked = basis.vstack(&RationalMatrix::from_i64_rows(&[x.clone()]).unwrap()).unwrap();
            assert_eq!(membership(&v(&x), &basis).unwrap(), stacked.rank() == basis.rank());
        }
    }

    #[test]
    fn rref_is_canonical() {
        let a = RationalMatrix::from_i64_rows(&[vec![2, 4, 0], vec![1, 3, 1]]).unwrap();
        let b = RationalMatrix::from_i64_rows(&[vec![3, 7, 1], vec![1, 2, 0], vec![4, 9, 1]]).unwrap();
        assert_eq!(a.rref(), b.rref());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("6/-4"), Some(BigRational::new((-3).into(), 2.into())));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
