//! Symmetric factorization `M = B·B^T` over GF(2) with `rank(M)` columns,
//! orthogonal representations built from it, and nearly orthogonal systems.
//!
//! The factorization reduces a residual matrix `S` (initially `M`) by
//! symmetric rank-one and rank-two updates:
//!
//! * while `S` has a 1 on its diagonal at `i` (lowest index first), take
//!   `v = S e_i` and set `S += v v^T`, which zeroes row and column `i` and
//!   lowers the rank by one. `v` becomes a column of `B`.
//! * once the diagonal is zero, take the first nonzero row `i`, its first set
//!   column `j`, `x = S e_i`, `y = S e_j`, and set `S += x y^T + y x^T`,
//!   lowering the rank by two.
//!
//! A pair `(x, y)` is absorbed into an existing column `b` through
//! `b b^T + x y^T + y x^T = (b+x)(b+x)^T + (b+y)(b+y)^T + (b+x+y)(b+x+y)^T`,
//! so `t` unit steps and `k` pairs give `t + 2k = rank(M)` columns provided
//! `t >= 1`, which a nonzero diagonal guarantees.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{Gf2Matrix, MatrixError, PrimeFieldMatrix};
use crate::guard::{gf2_bytes, ResourceGuard};
use crate::kneser::{odd_girth_exceeds, Complement, GKGraph, GKParams, Graph};
use crate::polyrep::{representing_matrix_mod_p_only, PolyRepError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorizeError {
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: entries ({row},{col}) and ({col},{row}) differ")]
    AsymmetricInput { row: usize, col: usize },
    #[error("every diagonal entry is zero; no B with rank-many columns is guaranteed")]
    AllZeroDiagonal,
    #[error("B*B^T differs from M at ({row},{col})")]
    ProductMismatch { row: usize, col: usize },
    #[error("expected a matrix over GF(2), got GF({0})")]
    WrongField(u32),
    #[error("{vectors} vectors for a graph on {n} vertices")]
    DimensionMismatch { vectors: usize, n: usize },
    #[error(transparent)]
    PolyRep(#[from] PolyRepError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2SymmetricFactorization {
    pub m: Gf2Matrix,
    pub rank: usize,
    /// `n x rank`.
    pub b: Gf2Matrix,
}

/// Residual `S` with deferred outer-product updates: the true row `k` is the
/// stored row XOR the sum of `b_l` over pending terms with `a_l[k] = 1`.
struct Residual {
    rows: Gf2Matrix,
    pending: Vec<(Vec<u64>, Vec<u64>)>,
}

const MAX_PENDING: usize = 8;

impl Residual {
    fn current_row(&self, i: usize) -> Vec<u64> {
        let mut row = self.rows.row(i).to_vec();
        for (a, b) in &self.pending {
            if a[i >> 6] >> (i & 63) & 1 == 1 {
                xor(&mut row, b);
            }
        }
        row
    }

    fn push(&mut self, a: Vec<u64>, b: Vec<u64>) {
        self.pending.push((a, b));
        if self.pending.len() >= MAX_PENDING {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let k = self.pending.len();
        let width = self.rows.words_per_row();
        let mut table = vec![0u64; (1 << k) * width];
        for idx in 1..1usize << k {
            let low = idx.trailing_zeros() as usize;
            let prev = idx & (idx - 1);
            let (head, tail) = table.split_at_mut(idx * width);
            let dst = &mut tail[..width];
            dst.copy_from_slice(&head[prev * width..(prev + 1) * width]);
            xor(dst, &self.pending[low].1);
        }
        let pending = &self.pending;
        let update = |(i, row): (usize, &mut [u64])| {
            let mut idx = 0;
            for (l, (a, _)) in pending.iter().enumerate() {
                idx |= ((a[i >> 6] >> (i & 63) & 1) as usize) << l;
            }
            if idx != 0 {
                xor(row, &table[idx * width..(idx + 1) * width]);
            }
        };
        self.rows.rows_mut_par().enumerate().for_each(update);
        self.pending.clear();
    }
}

fn xor(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

/// Factorizes a symmetric GF(2) matrix with a nonzero diagonal entry as
/// `M = B·B^T` where `B` has `rank(M)` columns. The product is checked
/// before returning.
pub fn lempel_factorize(m: &Gf2Matrix) -> Result<Gf2SymmetricFactorization, FactorizeError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(FactorizeError::NotSquare { rows: n, cols: m.cols() });
    }
    if let Some((row, col)) = m.first_asymmetry() {
        return Err(FactorizeError::AsymmetricInput { row, col });
    }
    let mut diag = vec![0u64; n.div_ceil(64)];
    for i in 0..n {
        if m.get(i, i) {
            diag[i >> 6] |= 1 << (i & 63);
        }
    }
    if diag.iter().all(|&w| w == 0) {
        return Err(FactorizeError::AllZeroDiagonal);
    }
    let mut s = Residual { rows: m.clone(), pending: Vec::new() };
    let mut units: Vec<Vec<u64>> = Vec::new();
    while let Some(i) = first_set_bit(&diag) {
        let v = s.current_row(i);
        debug_assert!(v[i >> 6] >> (i & 63) & 1 == 1);
        // (v v^T) has diagonal v, since v_k^2 = v_k
        xor(&mut diag, &v);
        s.push(v.clone(), v.clone());
        units.push(v);
    }
    let mut pairs: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
    // zero rows stay zero under these updates, so one forward scan suffices
    let mut i = 0;
    while i < n {
        let x = s.current_row(i);
        let Some(j) = first_set_bit(&x) else {
            i += 1;
            continue;
        };
        let y = s.current_row(j);
        s.push(x.clone(), y.clone());
        s.push(y.clone(), x.clone());
        pairs.push((x, y));
    }
    let mut columns = units;
    for (x, y) in pairs {
        let b = columns.pop().expect("at least one unit column");
        let mut bx = b.clone();
        xor(&mut bx, &x);
        let mut by = b;
        xor(&mut by, &y);
        let mut bxy = bx.clone();
        xor(&mut bxy, &y);
        columns.push(bx);
        columns.push(by);
        columns.push(bxy);
    }
    let rank = columns.len();
    let b = Gf2Matrix::from_packed_rows(n, &columns).transpose();
    let product = b.gram();
    if product != *m {
        let (row, col) = first_difference(&product, m);
        return Err(FactorizeError::ProductMismatch { row, col });
    }
    Ok(Gf2SymmetricFactorization { m: m.clone(), rank, b })
}

fn first_difference(a: &Gf2Matrix, b: &Gf2Matrix) -> (usize, usize) {
    for i in 0..a.rows() {
        if let Some(k) = a.row(i).iter().zip(b.row(i)).position(|(x, y)| x != y) {
            let diff = a.row(i)[k] ^ b.row(i)[k];
            return (i, k * 64 + diff.trailing_zeros() as usize);
        }
    }
    (0, 0)
}

/// One vector per vertex over GF(p), stored as the rows of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorAssignment {
    pub vectors: PrimeFieldMatrix,
}

impl VectorAssignment {
    pub fn new(vectors: PrimeFieldMatrix) -> Self {
        VectorAssignment { vectors }
    }

    pub fn field(&self) -> u32 {
        self.vectors.modulus()
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.rows() == 0
    }

    /// JSON form. Over GF(2) each vector is hex of its bytes, coordinate `j`
    /// in bit `j % 8` of byte `j / 8`; otherwise a list of residues.
    pub fn to_json(&self, graph: serde_json::Value, verified: bool) -> serde_json::Value {
        let vectors: Vec<serde_json::Value> = match self.vectors.as_gf2() {
            Some(g) => (0..g.rows())
                .map(|i| {
                    let bytes: Vec<u8> = g.row(i).iter().flat_map(|w| w.to_le_bytes()).take(g.cols().div_ceil(8)).collect();
                    serde_json::Value::String(hex::encode(bytes))
                })
                .collect(),
            None => self.vectors.to_rows().into_iter().map(|r| serde_json::json!(r)).collect(),
        };
        serde_json::json!({
            "field": self.field(),
            "t": self.dim(),
            "vectors": vectors,
            "graph": graph,
            "verified": verified,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let field = v["field"].as_u64().ok_or("missing field")?;
        let t = v["t"].as_u64().ok_or("missing t")? as usize;
        let list = v["vectors"].as_array().ok_or("missing vectors")?;
        if field == 2 {
            let mut rows = Vec::with_capacity(list.len());
            for item in list {
                let bytes = hex::decode(item.as_str().ok_or("vector is not a hex string")?).map_err(|e| e.to_string())?;
                if bytes.len() != t.div_ceil(8) {
                    return Err(format!("vector has {} bytes, expected {}", bytes.len(), t.div_ceil(8)));
                }
                let mut words = vec![0u64; t.div_ceil(64)];
                for (k, byte) in bytes.iter().enumerate() {
                    words[k / 8] |= (*byte as u64) << (8 * (k % 8));
                }
                if t % 64 != 0 && words.last().is_some_and(|w| w >> (t % 64) != 0) {
                    return Err("bits set beyond dimension".into());
                }
                rows.push(words);
            }
            Ok(VectorAssignment::new(PrimeFieldMatrix::from_gf2(Gf2Matrix::from_packed_rows(t, &rows))))
        } else {
            let rows: Vec<Vec<i64>> = serde_json::from_value(v["vectors"].clone()).map_err(|e| e.to_string())?;
            if rows.iter().any(|r| r.len() != t || r.iter().any(|&x| x < 0 || x as u64 >= field)) {
                return Err("vector entries must be residues of length t".into());
            }
            let m = if rows.is_empty() {
                PrimeFieldMatrix::zeros(field, 0, t)
            } else {
                PrimeFieldMatrix::from_rows(field, &rows)
            }
            .map_err(|e| e.to_string())?;
            Ok(VectorAssignment::new(m))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OrthoViolation {
    SelfOrthogonal { vertex: usize },
    AdjacentNotOrthogonal { u: usize, v: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoVerdict {
    pub holds: bool,
    pub violation: Option<OrthoViolation>,
}

/// Vertex counts above this use the Gram-matrix path over GF(2).
const GRAM_THRESHOLD: usize = 4096;

/// Checks `<u_v, u_v> != 0` for every vertex and `<u_v, u_w> = 0` for every
/// edge `vw`. Over GF(2) with many vertices the Gram matrix is formed once
/// and scanned instead of taking pairwise dot products.
pub fn verify_orthogonal_representation<G: Graph + Sync>(
    a: &VectorAssignment,
    g: &G,
) -> Result<OrthoVerdict, FactorizeError> {
    let n = g.order();
    if a.len() != n {
        return Err(FactorizeError::DimensionMismatch { vectors: a.len(), n });
    }
    let vecs = &a.vectors;
    if let Some(vertex) = (0..n).find(|&v| vecs.row_dot(v, v) == 0) {
        let violation = Some(OrthoViolation::SelfOrthogonal { vertex });
        return Ok(OrthoVerdict { holds: false, violation });
    }
    let violation = match vecs.as_gf2() {
        Some(b) if n > GRAM_THRESHOLD => {
            let gram = b.gram();
            (0..n).into_par_iter().find_map_first(|u| {
                set_bits(gram.row(u))
                    .find(|&v| v != u && g.adjacent(u, v))
                    .map(|v| OrthoViolation::AdjacentNotOrthogonal { u: u.min(v), v: u.max(v) })
            })
        }
        _ => (0..n).into_par_iter().find_map_first(|u| {
            g.neighbors(u)
                .into_iter()
                .filter(|&v| v > u)
                .find(|&v| vecs.row_dot(u, v) != 0)
                .map(|v| OrthoViolation::AdjacentNotOrthogonal { u, v })
        }),
    };
    Ok(OrthoVerdict { holds: violation.is_none(), violation })
}

fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + b)
        })
    })
}

/// The orthogonal representation of the complement of `K(d, s, m)` read off
/// the factorization of its representing matrix modulo 2.
#[derive(Clone, Debug)]
pub struct ComplementRepresentation {
    pub params: GKParams,
    pub factorization: Gf2SymmetricFactorization,
    pub assignment: VectorAssignment,
}

pub fn orthogonal_rep_of_complement(
    params: GKParams,
    guard: &ResourceGuard,
) -> Result<ComplementRepresentation, FactorizeError> {
    let n = params.vertex_count();
    // M, its working copy, the Gram matrix and B with its transpose
    guard.check("complement representation", n, 4 * gf2_bytes(n, n)).map_err(PolyRepError::from)?;
    let m = representing_matrix_mod_p_only(params, 2, guard)?.into_gf2().expect("p = 2 is packed");
    let factorization = lempel_factorize(&m)?;
    let assignment = VectorAssignment::new(PrimeFieldMatrix::from_gf2(factorization.b.clone()));
    Ok(ComplementRepresentation { params, factorization, assignment })
}

impl ComplementRepresentation {
    pub fn verify(&self) -> Result<OrthoVerdict, FactorizeError> {
        let g = GKGraph::build(self.params);
        verify_orthogonal_representation(&self.assignment, &Complement(&g))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearlyOrthogonalVerdict {
    pub holds: bool,
    pub self_orthogonal: Option<usize>,
    /// Three vectors with pairwise nonzero inner products.
    pub triple: Option<[usize; 3]>,
}

/// Graph on the vectors of a system joining pairs with nonzero inner
/// product, read from the Gram matrix.
struct NonOrthogonality {
    gram: Gf2Matrix,
}

impl Graph for NonOrthogonality {
    fn order(&self) -> usize {
        self.gram.rows()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.gram.get(u, v)
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        set_bits(self.gram.row(u)).filter(|&v| v != u).collect()
    }
}

/// Systems larger than this look for triangles with row intersections of
/// the Gram matrix instead of layered search.
const BFS_TRIANGLE_LIMIT: usize = 5000;

/// A system over GF(2) is nearly orthogonal when no vector is
/// self-orthogonal and among any three vectors some pair is orthogonal, i.e.
/// its non-orthogonality graph is triangle-free.
pub fn nearly_orthogonal_check(system: &Gf2Matrix) -> NearlyOrthogonalVerdict {
    let n = system.rows();
    if let Some(v) = (0..n).find(|&v| !system.row_dot(v, system, v)) {
        return NearlyOrthogonalVerdict { holds: false, self_orthogonal: Some(v), triple: None };
    }
    let g = NonOrthogonality { gram: system.gram() };
    let triple = if n <= BFS_TRIANGLE_LIMIT {
        let verdict = odd_girth_exceeds(&g, 3).expect("3 is a valid bound");
        verdict.witness.map(|w| [w[0], w[1], w[2]])
    } else {
        first_triangle(&g.gram)
    };
    NearlyOrthogonalVerdict { holds: triple.is_none(), self_orthogonal: None, triple }
}

/// A triangle `u < v`, `w` in the graph whose adjacency rows are those of
/// `adj`, a symmetric matrix with all-ones diagonal. Rows `u` and `v` of an
/// edge always share bits `u` and `v`, so a third common bit is a triangle.
fn first_triangle(adj: &Gf2Matrix) -> Option<[usize; 3]> {
    (0..adj.rows()).into_par_iter().find_map_first(|u| {
        let ru = adj.row(u);
        set_bits(ru).filter(|&v| v > u).find_map(|v| {
            let rv = adj.row(v);
            let common: u32 = ru.iter().zip(rv).map(|(a, b)| (a & b).count_ones()).sum();
            if common <= 2 {
                return None;
            }
            set_bits(ru).find(|&w| w != u && w != v && adj.get(v, w)).map(|w| [u, v, w])
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::ExplicitGraph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf2(rows: &[&[u8]]) -> Gf2Matrix {
        Gf2Matrix::from_fn(rows.len(), rows.first().map_or(0, |r| r.len()), |i, j| rows[i][j] == 1)
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(density) {
                    m.set(i, j, true);
                    m.set(j, i, true);
                }
            }
        }
        m
    }

    #[test]
    fn small_examples() {
        let f = lempel_factorize(&gf2(&[&[1]])).unwrap();
        assert_eq!(f.b, gf2(&[&[1]]));
        let f = lempel_factorize(&gf2(&[&[1, 1], &[1, 1]])).unwrap();
        assert_eq!(f.rank, 1);
        assert_eq!(f.b, gf2(&[&[1], &[1]]));
        assert_eq!(lempel_factorize(&gf2(&[&[0, 1], &[1, 0]])), Err(FactorizeError::AllZeroDiagonal));
        assert_eq!(lempel_factorize(&Gf2Matrix::zeros(3, 3)), Err(FactorizeError::AllZeroDiagonal));
        assert_eq!(
            lempel_factorize(&gf2(&[&[1, 1], &[0, 1]])),
            Err(FactorizeError::AsymmetricInput { row: 0, col: 1 })
        );
        assert!(matches!(lempel_factorize(&Gf2Matrix::zeros(2, 3)), Err(FactorizeError::NotSquare { .. })));
    }

    #[test]
    fn alternating_block_is_absorbed() {
        // diag(1) plus a hyperbolic plane: rank 3, needs the pair step
        let m = gf2(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let f = lempel_factorize(&m).unwrap();
        assert_eq!(f.rank, 3);
        assert_eq!(f.b.gram(), m);
    }

    #[test]
    fn random_symmetric_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let n = rng.gen_range(1..=64);
            let mut m = random_symmetric(&mut rng, n, [0.05, 0.3, 0.5][trial % 3]);
            if (0..n).all(|i| !m.get(i, i)) {
                let i = rng.gen_range(0..n);
                m.set(i, i, true);
            }
            let f = lempel_factorize(&m).unwrap();
            assert_eq!(f.b.cols(), m.rank());
            assert_eq!(f.b.gram(), m);
        }
    }

    #[test]
    fn zero_diagonal_random_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = rng.gen_range(1..=40);
            let mut m = random_symmetric(&mut rng, n, 0.4);
            for i in 0..n {
                m.set(i, i, false);
            }
            assert_eq!(lempel_factorize(&m), Err(FactorizeError::AllZeroDiagonal));
        }
    }

    #[test]
    fn complement_representation_small_cases() {
        let rep = orthogonal_rep_of_complement(GKParams::new(4, 2, 1).unwrap(), &ResourceGuard::default()).unwrap();
        assert_eq!(rep.assignment.dim(), 3);
        assert_eq!(rep.assignment.len(), 6);
        assert!(rep.verify().unwrap().holds);
        let rep = orthogonal_rep_of_complement(GKParams::new(5, 3, 3).unwrap(), &ResourceGuard::default()).unwrap();
        assert_eq!(rep.assignment.dim(), 1);
        assert!(rep.verify().unwrap().holds);
        for (d, s, m) in [(6, 3, 1), (7, 3, 2), (8, 4, 2), (9, 4, 1)] {
            let rep = orthogonal_rep_of_complement(GKParams::new(d, s, m).unwrap(), &ResourceGuard::default()).unwrap();
            assert!(rep.verify().unwrap().holds);
            assert!(rep.assignment.dim() as u64 <= GKParams::new(d, s, m).unwrap().rank_bound());
        }
    }

    #[test]
    fn orthogonality_checks() {
        let k4 = ExplicitGraph::complete(4);
        let basis = VectorAssignment::new(PrimeFieldMatrix::identity(3, 4).unwrap());
        assert!(verify_orthogonal_representation(&basis, &k4).unwrap().holds);
        let even = VectorAssignment::new(PrimeFieldMatrix::from_gf2(gf2(&[&[1, 0], &[1, 1]])));
        let v = verify_orthogonal_representation(&even, &ExplicitGraph::empty(2)).unwrap();
        assert_eq!(v.violation, Some(OrthoViolation::SelfOrthogonal { vertex: 1 }));
        let same = VectorAssignment::new(PrimeFieldMatrix::from_gf2(gf2(&[&[1, 0], &[1, 0]])));
        let v = verify_orthogonal_representation(&same, &ExplicitGraph::complete(2)).unwrap();
        assert_eq!(v.violation, Some(OrthoViolation::AdjacentNotOrthogonal { u: 0, v: 1 }));
        assert!(verify_orthogonal_representation(&same, &k4).is_err());
    }

    #[test]
    fn gram_and_pairwise_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = GRAM_THRESHOLD + 10;
        let flags: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.01)).collect();
        let b = Gf2Matrix::from_fn(n, 10, |i, j| j == i % 8 || (j >= 8 && flags[i]));
        let a = VectorAssignment::new(PrimeFieldMatrix::from_gf2(b.clone()));
        let g = ExplicitGraph::from_predicate(n, |u, v| u % 8 != v % 8 && (u + v) % 97 == 0);
        let fast = verify_orthogonal_representation(&a, &g).unwrap();
        let slow: Option<OrthoViolation> = (0..n)
            .flat_map(|u| g.neighbors(u).into_iter().filter(move |&v| v > u).map(move |v| (u, v)))
            .find(|&(u, v)| b.row_dot(u, &b, v))
            .map(|(u, v)| OrthoViolation::AdjacentNotOrthogonal { u, v });
        assert_eq!(fast.holds, slow.is_none());
    }

    #[test]
    fn nearly_orthogonal_examples() {
        assert!(nearly_orthogonal_check(&Gf2Matrix::identity(5)).holds);
        let v = nearly_orthogonal_check(&gf2(&[&[1, 0], &[1, 0], &[1, 0]]));
        assert!(!v.holds);
        let mut t = v.triple.unwrap();
        t.sort();
        assert_eq!(t, [0, 1, 2]);
        let v = nearly_orthogonal_check(&gf2(&[&[1, 1], &[1, 0]]));
        assert_eq!(v.self_orthogonal, Some(0));
    }

    #[test]
    fn triangle_search_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..40 {
            let n = rng.gen_range(3..=60);
            let mut m = random_symmetric(&mut rng, n, [0.02, 0.05, 0.1, 0.3][trial % 4]);
            for i in 0..n {
                m.set(i, i, true);
            }
            let bfs = odd_girth_exceeds(&NonOrthogonality { gram: m.clone() }, 3).unwrap();
            let bits = first_triangle(&m);
            assert_eq!(bfs.exceeds, bits.is_none());
            if let Some([u, v, w]) = bits {
                assert!(u != w && v != w && m.get(u, v) && m.get(u, w) && m.get(v, w));
            }
        }
    }

    #[test]
    fn non_orthogonal_pairs_are_graph_edges() {
        for (d, m) in [(6u32, 1u32), (8, 1), (10, 1), (12, 2)] {
            let params = GKParams::new(d, d / 2, m).unwrap();
            let rep = orthogonal_rep_of_complement(params, &ResourceGuard::default()).unwrap();
            let g = GKGraph::build(params);
            let b = &rep.factorization.b;
            let gram = b.gram();
            for u in 0..g.order() {
                for v in set_bits(gram.row(u)).filter(|&v| v != u) {
                    assert!(g.adjacent(u, v));
                }
            }
        }
    }

    #[test]
    fn assignment_json_round_trip() {
        let rep = orthogonal_rep_of_complement(GKParams::new(6, 3, 1).unwrap(), &ResourceGuard::default()).unwrap();
        let json = rep.assignment.to_json(serde_json::json!({"d": 6}), true);
        assert_eq!(VectorAssignment::from_json(&json).unwrap(), rep.assignment);
        let a = VectorAssignment::new(PrimeFieldMatrix::from_rows(5, &[vec![1, 4], vec![0, 2]]).unwrap());
        assert_eq!(VectorAssignment::from_json(&a.to_json(serde_json::Value::Null, false)).unwrap(), a);
    }
}
