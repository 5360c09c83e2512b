use super::{check_prime, Gf2Matrix, MatrixError};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Storage {
    Packed(Gf2Matrix),
    Dense(Vec<u32>),
}

/// Dense matrix over GF(p). Entries are always stored reduced into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFieldMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    storage: Storage,
}

fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat: a^(p-2)
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Residue of a signed integer modulo `p`, in `[0, p)`.
pub(crate) fn residue_i64(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Schoolbook rank over GF(p) on a row-major residue buffer (consumed).
fn dense_rank(mut a: Vec<u32>, rows: usize, cols: usize, p: u32) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = inv_mod(a[r * cols + c], p);
        for j in c..cols {
            a[r * cols + j] = mul_mod(a[r * cols + j], inv, p);
        }
        for i in r + 1..rows {
            let f = a[i * cols + c];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for j in c..cols {
                let t = mul_mod(neg, a[r * cols + j], p);
                a[i * cols + j] = add_mod(a[i * cols + j], t, p);
            }
        }
        r += 1;
    }
    r
}

impl PrimeFieldMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self, MatrixError> {
        let p = check_prime(p)?;
        let storage = if p == 2 {
            Storage::Packed(Gf2Matrix::zeros(rows, cols))
        } else {
            Storage::Dense(vec![0; rows * cols])
        };
        Ok(PrimeFieldMatrix { p, rows, cols, storage })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Entries given as arbitrary integers and reduced modulo `p`.
    pub fn from_fn(
        p: u64,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> i64,
    ) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(p, rows, cols)?;
        let q = m.p;
        for i in 0..rows {
            for j in 0..cols {
                let v = residue_i64(f(i, j), q);
                if v != 0 {
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{cols} columns"),
                found: format!("{} columns", bad.len()),
            });
        }
        Self::from_fn(p, rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn from_gf2(m: Gf2Matrix) -> Self {
        PrimeFieldMatrix { p: 2, rows: m.rows(), cols: m.cols(), storage: Storage::Packed(m) }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        match &self.storage {
            Storage::Packed(m) => m.get(i, j) as u32,
            Storage::Dense(a) => a[i * self.cols + j],
        }
    }

    /// Sets an entry; `value` is reduced modulo `p`.
    pub fn set(&mut self, i: usize, j: usize, value: u32) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        let v = value % self.p;
        match &mut self.storage {
            Storage::Packed(m) => m.set(i, j, v == 1),
            Storage::Dense(a) => a[i * self.cols + j] = v,
        }
    }

    /// The packed view when `p = 2`.
    pub fn as_gf2(&self) -> Option<&Gf2Matrix> {
        match &self.storage {
            Storage::Packed(m) => Some(m),
            Storage::Dense(_) => None,
        }
    }

    pub fn into_gf2(self) -> Option<Gf2Matrix> {
        match self.storage {
            Storage::Packed(m) => Some(m),
            Storage::Dense(_) => None,
        }
    }

    fn residues(&self) -> Vec<u32> {
        match &self.storage {
            Storage::Dense(a) => a.clone(),
            Storage::Packed(m) => {
                let mut out = Vec::with_capacity(self.rows * self.cols);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        out.push(m.get(i, j) as u32);
                    }
                }
                out
            }
        }
    }

    /// Exact rank over GF(p). Uses the bit-packed kernel when `p = 2`.
    pub fn rank(&self) -> usize {
        match &self.storage {
            Storage::Packed(m) => m.rank(),
            Storage::Dense(a) => dense_rank(a.clone(), self.rows, self.cols, self.p),
        }
    }

    /// Rank through the schoolbook residue path regardless of `p`.
    pub fn rank_generic(&self) -> usize {
        dense_rank(self.residues(), self.rows, self.cols, self.p)
    }

    pub fn transpose(&self) -> Self {
        match &self.storage {
            Storage::Packed(m) => Self::from_gf2(m.transpose()),
            Storage::Dense(a) => {
                let mut t = vec![0; a.len()];
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        t[j * self.rows + i] = a[i * self.cols + j];
                    }
                }
                PrimeFieldMatrix { p: self.p, rows: self.cols, cols: self.rows, storage: Storage::Dense(t) }
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.storage {
            Storage::Packed(m) => m.is_symmetric(),
            Storage::Dense(_) => {
                self.rows == self.cols
                    && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
            }
        }
    }

    pub fn mul(&self, rhs: &PrimeFieldMatrix) -> Result<PrimeFieldMatrix, MatrixError> {
        if self.p != rhs.p {
            return Err(MatrixError::FieldMismatch(self.p, rhs.p));
        }
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        if let (Storage::Packed(a), Storage::Packed(b)) = (&self.storage, &rhs.storage) {
            return Ok(Self::from_gf2(a.mul(b)));
        }
        let p = self.p as u64;
        let mut out = vec![0u32; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cell = &mut out[i * rhs.cols + j];
                    *cell = ((*cell as u64 + a * rhs.get(k, j) as u64) % p) as u32;
                }
            }
        }
        Ok(PrimeFieldMatrix { p: self.p, rows: self.rows, cols: rhs.cols, storage: Storage::Dense(out) })
    }

    /// `self * self^T`.
    pub fn gram(&self) -> PrimeFieldMatrix {
        self.mul(&self.transpose()).expect("dimensions agree by construction")
    }

    /// Dot product of rows `i` and `j` under the standard bilinear form.
    pub fn row_dot(&self, i: usize, j: usize) -> u32 {
        match &self.storage {
            Storage::Packed(m) => m.row_dot(i, m, j) as u32,
            Storage::Dense(a) => {
                let p = self.p as u64;
                let (ri, rj) = (&a[i * self.cols..(i + 1) * self.cols], &a[j * self.cols..(j + 1) * self.cols]);
                ri.iter().zip(rj).fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % p) as u32
            }
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn composite_rejected_at_construction() {
        assert_eq!(PrimeFieldMatrix::zeros(6, 2, 2), Err(MatrixError::NotPrime(6)));
    }

    #[test]
    fn small_ranks() {
        assert_eq!(PrimeFieldMatrix::identity(2, 3).unwrap().rank(), 3);
        let m = PrimeFieldMatrix::from_rows(2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 1);
        // [[1,2],[2,4]] is singular over every field
        let m = PrimeFieldMatrix::from_rows(7, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
        // det = 3, singular only mod 3
        let rows = vec![vec![1, 1], vec![1, 4]];
        assert_eq!(PrimeFieldMatrix::from_rows(3, &rows).unwrap().rank(), 1);
        assert_eq!(PrimeFieldMatrix::from_rows(5, &rows).unwrap().rank(), 2);
    }

    #[test]
    fn entries_reduced_into_range() {
        let m = PrimeFieldMatrix::from_rows(5, &[vec![-1, 12, 5]]).unwrap();
        assert_eq!(m.to_rows(), vec![vec![4, 2, 0]]);
    }

    #[test]
    fn packed_and_generic_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for size in [1usize, 5, 17, 64, 65, 130, 256] {
            for _ in 0..3 {
                let rank_cap = rng.gen_range(0..=size);
                // product of random size x cap and cap x size to get controlled rank
                let a = PrimeFieldMatrix::from_fn(2, size, rank_cap, |_, _| rng.gen_range(0..2)).unwrap();
                let b = PrimeFieldMatrix::from_fn(2, rank_cap, size, |_, _| rng.gen_range(0..2)).unwrap();
                let m = a.mul(&b).unwrap();
                assert_eq!(m.rank(), m.rank_generic(), "size {size}");
                assert!(m.rank() <= rank_cap);
            }
        }
    }

    #[test]
    fn dense_multiplication_and_gram() {
        let a = PrimeFieldMatrix::from_rows(5, &[vec![1, 2], vec![3, 4]]).unwrap();
        let g = a.gram();
        assert_eq!(g.to_rows(), vec![vec![0, 11 % 5], vec![1, 0]]);
        assert_eq!(a.row_dot(0, 1), 1);
        assert!(g.is_symmetric());
    }
}
