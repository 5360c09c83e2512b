use rayon::prelude::*;

/// Width of the row-update batches used by [`Gf2Matrix::rank`] and the
/// multiplication kernels. A batch of `k` rows is expanded into a table of
/// all `2^k` XOR combinations, so each target row is touched once per batch.
pub(crate) const BATCH: usize = 8;

/// Rows below this count are updated serially.
const PAR_ROWS: usize = 512;

/// Dense bit-packed matrix over GF(2). Row `i`, column `j` lives in bit
/// `j % 64` of word `i * words_per_row + j / 64`; padding bits are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 32 && self.cols <= 64 {
            for i in 0..self.rows {
                let line: String = (0..self.cols)
                    .map(|j| if self.get(i, j) { '1' } else { '.' })
                    .collect();
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub(crate) fn bit(words: &[u64], j: usize) -> bool {
    (words[j >> 6] >> (j & 63)) & 1 == 1
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Parity of the AND of two packed vectors.
#[inline]
pub(crate) fn dot(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

/// Builds the `2^k` XOR combinations of `gens` (each `width` words).
fn combination_table(gens: &[&[u64]], width: usize) -> Vec<u64> {
    let k = gens.len();
    let mut table = vec![0u64; (1usize << k) * width];
    for idx in 1..(1usize << k) {
        let low = idx.trailing_zeros() as usize;
        let prev = idx & (idx - 1);
        let (head, tail) = table.split_at_mut(idx * width);
        let dst = &mut tail[..width];
        dst.copy_from_slice(&head[prev * width..(prev + 1) * width]);
        xor_into(dst, gens[low]);
    }
    table
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        Gf2Matrix { rows, cols, wpr, data: vec![0; rows * wpr] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Parallel row-wise constructor. `fill` receives the row index and the
    /// zeroed packed row to populate; bits beyond `cols` must stay clear.
    pub fn from_row_fn<F>(rows: usize, cols: usize, fill: F) -> Self
    where
        F: Fn(usize, &mut [u64]) + Sync,
    {
        let mut m = Self::zeros(rows, cols);
        let wpr = m.wpr;
        if wpr > 0 {
            m.data
                .par_chunks_mut(wpr)
                .enumerate()
                .for_each(|(i, row)| fill(i, row));
        }
        m.clear_padding();
        m
    }

    /// Assembles a matrix whose rows are the given packed vectors.
    pub fn from_packed_rows(cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        let wpr = m.wpr;
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&r[..wpr]);
        }
        m.clear_padding();
        m
    }

    /// Assembles a `rows x columns.len()` matrix from packed column vectors.
    pub fn from_packed_columns(rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (w, &word) in col.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let i = w * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    if i < rows {
                        m.set(i, c, true);
                    }
                }
            }
        }
        m
    }

    fn clear_padding(&mut self) {
        let extra = self.wpr * 64 - self.cols;
        if extra == 0 || self.wpr == 0 {
            return;
        }
        let mask = u64::MAX >> extra;
        for i in 0..self.rows {
            self.data[i * self.wpr + self.wpr - 1] &= mask;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        bit(self.row(i), j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.wpr + (j >> 6)];
        if value {
            *w |= 1 << (j & 63);
        } else {
            *w &= !(1 << (j & 63));
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.wpr..(i + 1) * self.wpr]
    }

    #[inline]
    /// Parallel iterator over mutable rows; requires `cols > 0`.
    pub(crate) fn rows_mut_par(&mut self) -> rayon::slice::ChunksMut<'_, u64> {
        self.data.par_chunks_mut(self.wpr)
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.wpr..(i + 1) * self.wpr]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.wpr);
        head[lo * self.wpr..(lo + 1) * self.wpr].swap_with_slice(&mut tail[..self.wpr]);
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        let w = self.wpr;
        if dst < src {
            let (head, tail) = self.data.split_at_mut(src * w);
            xor_into(&mut head[dst * w..(dst + 1) * w], &tail[..w]);
        } else {
            let (head, tail) = self.data.split_at_mut(dst * w);
            xor_into(&mut tail[..w], &head[src * w..(src + 1) * w]);
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.data.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn row_weight(&self, i: usize) -> u32 {
        self.row(i).iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (w, &word) in self.row(i).iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let j = w * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none() && self.rows == self.cols
    }

    /// First `(i, j)` with `i < j` and `M[i][j] != M[j][i]`, scanning row-major.
    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        if self.transpose() == *self {
            return None;
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Rank by batched Gaussian elimination.
    ///
    /// Pivots are chosen column by column, taking the first row (top-down)
    /// whose reduced entry is nonzero. Up to [`BATCH`] pivot rows are kept
    /// mutually reduced and applied lazily: the reduced value of a candidate
    /// row at column `c` is its stored bit XOR the pivot-row bits selected by
    /// its entries in the pending pivot columns. Once a batch is full the
    /// combinations are tabulated and every remaining row is updated with a
    /// single table lookup.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let n = m.rows;
        let wpr = m.wpr;
        let mut top = 0;
        let mut col = 0;
        while top < n && col < m.cols {
            let mut pivots: Vec<usize> = Vec::with_capacity(BATCH);
            while pivots.len() < BATCH && col < m.cols {
                let k = pivots.len();
                let found = (top + k..n).find(|&i| {
                    let row = m.row(i);
                    let mut v = bit(row, col);
                    for (l, &p) in pivots.iter().enumerate() {
                        if bit(row, p) && m.get(top + l, col) {
                            v = !v;
                        }
                    }
                    v
                });
                if let Some(i) = found {
                    let slot = top + k;
                    m.swap_rows(i, slot);
                    for (l, &p) in pivots.iter().enumerate() {
                        if m.get(slot, p) {
                            m.xor_row(slot, top + l);
                        }
                    }
                    for l in 0..k {
                        if m.get(top + l, col) {
                            m.xor_row(top + l, slot);
                        }
                    }
                    pivots.push(col);
                }
                col += 1;
            }
            let k = pivots.len();
            if k == 0 {
                break;
            }
            let start = pivots[0] >> 6;
            let width = wpr - start;
            let gens: Vec<&[u64]> = (0..k).map(|l| &m.row(top + l)[start..]).collect();
            let table = combination_table(&gens, width);
            let below = &mut m.data[(top + k) * wpr..];
            let apply = |row: &mut [u64]| {
                let mut idx = 0usize;
                for (l, &p) in pivots.iter().enumerate() {
                    idx |= (bit(row, p) as usize) << l;
                }
                if idx != 0 {
                    xor_into(&mut row[start..], &table[idx * width..(idx + 1) * width]);
                }
            };
            if n - top - k >= PAR_ROWS {
                below.par_chunks_mut(wpr).for_each(apply);
            } else {
                below.chunks_mut(wpr).for_each(apply);
            }
            top += k;
        }
        top
    }

    /// Plain one-pivot-at-a-time elimination; kept as an independent check
    /// on the batched path.
    pub fn rank_unbatched(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(p, r);
            for i in r + 1..m.rows {
                if m.get(i, c) {
                    m.xor_row(i, r);
                }
            }
            r += 1;
        }
        r
    }

    /// Matrix product using Four-Russians tables. The output is processed in
    /// tiles of rows and column words so each tile stays cache resident while
    /// the 8-row blocks of `rhs` are streamed through it.
    pub fn mul(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        const TILE_ROWS: usize = 1024;
        const TILE_WORDS: usize = 32;
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Gf2Matrix::zeros(self.rows, rhs.cols);
        let width = rhs.wpr;
        if width == 0 || self.rows == 0 || rhs.rows == 0 {
            return out;
        }
        let lhs = &*self;
        let work = |(tile, chunk): (usize, &mut [u64])| {
            let first = tile * TILE_ROWS;
            let nrows = chunk.len() / width;
            let mut table = vec![0u64; 256 * TILE_WORDS];
            for w0 in (0..width).step_by(TILE_WORDS) {
                let cw = TILE_WORDS.min(width - w0);
                for block in (0..rhs.rows).step_by(BATCH) {
                    let end = (block + BATCH).min(rhs.rows);
                    for idx in 1..(1usize << (end - block)) {
                        let low = idx.trailing_zeros() as usize;
                        let prev = idx & (idx - 1);
                        let (head, tail) = table.split_at_mut(idx * cw);
                        let dst = &mut tail[..cw];
                        dst.copy_from_slice(&head[prev * cw..(prev + 1) * cw]);
                        xor_into(dst, &rhs.row(block + low)[w0..w0 + cw]);
                    }
                    // blocks start at multiples of 8, so the selector is one byte
                    let (word, shift) = (block >> 6, block & 63);
                    let mask = (1u64 << (end - block)) - 1;
                    for r in 0..nrows {
                        let idx = ((lhs.row(first + r)[word] >> shift) & mask) as usize;
                        if idx != 0 {
                            let dst = &mut chunk[r * width + w0..r * width + w0 + cw];
                            xor_into(dst, &table[idx * cw..(idx + 1) * cw]);
                        }
                    }
                }
            }
        };
        out.data.par_chunks_mut(TILE_ROWS * width).enumerate().for_each(work);
        out
    }

    /// `self * self^T`: the Gram matrix of the rows under the standard dot product.
    pub fn gram(&self) -> Gf2Matrix {
        self.mul(&self.transpose())
    }

    /// Dot product of rows `i` of `self` and `j` of `other`.
    pub fn row_dot(&self, i: usize, other: &Gf2Matrix, j: usize) -> bool {
        dot(self.row(i), other.row(j))
    }

    pub fn to_bits(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> Gf2Matrix {
        Gf2Matrix::from_fn(rows, cols, |_, _| rng.gen_bool(density))
    }

    #[test]
    fn identity_and_repeated_row() {
        assert_eq!(Gf2Matrix::identity(3).rank(), 3);
        let m = Gf2Matrix::from_fn(2, 2, |_, _| true);
        assert_eq!(m.rank(), 1);
        assert_eq!(Gf2Matrix::zeros(5, 7).rank(), 0);
        assert_eq!(Gf2Matrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn batched_rank_matches_unbatched() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let rows = rng.gen_range(0..90);
            let cols = rng.gen_range(0..150);
            let density = [0.02, 0.1, 0.5][trial % 3];
            let mut m = random(&mut rng, rows, cols, density);
            // force dependencies
            if rows > 4 {
                let a = rng.gen_range(0..rows);
                let b = rng.gen_range(0..rows);
                if a != b {
                    let r: Vec<u64> = m.row(b).to_vec();
                    m.row_mut(a).copy_from_slice(&r);
                }
            }
            assert_eq!(m.rank(), m.rank_unbatched(), "{rows}x{cols}");
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn low_rank_product_has_expected_rank_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random(&mut rng, 200, 37, 0.5);
        let b = random(&mut rng, 37, 180, 0.5);
        let c = a.mul(&b);
        assert!(c.rank() <= 37);
        assert_eq!(c.rank(), c.rank_unbatched());
    }

    #[test]
    fn multiplication_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let (n, k, m) = (rng.gen_range(1..40), rng.gen_range(1..80), rng.gen_range(1..70));
            let a = random(&mut rng, n, k, 0.4);
            let b = random(&mut rng, k, m, 0.4);
            let c = a.mul(&b);
            for i in 0..n {
                for j in 0..m {
                    let naive = (0..k).filter(|&t| a.get(i, t) && b.get(t, j)).count() % 2 == 1;
                    assert_eq!(c.get(i, j), naive);
                }
            }
        }
    }

    #[test]
    fn gram_is_symmetric_and_matches_dots() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&mut rng, 70, 130, 0.3);
        let g = a.gram();
        assert!(g.is_symmetric());
        for i in 0..70 {
            for j in 0..70 {
                assert_eq!(g.get(i, j), a.row_dot(i, &a, j));
            }
        }
    }

    #[test]
    fn column_assembly_is_transpose_of_row_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(&mut rng, 67, 13, 0.5);
        let t = a.transpose();
        let cols: Vec<Vec<u64>> = (0..13).map(|j| t.row(j).to_vec()).collect();
        assert_eq!(Gf2Matrix::from_packed_columns(67, &cols), a);
    }
}
