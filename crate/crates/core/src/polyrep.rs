//! Low-rank representing matrices of `K(d, s, m)` from the integer-valued
//! polynomial `q(x) = C(x - m, s - m)`.
//!
//! The matrix has entry `q(|A ∩ B|)` at `(A, B)`. Since `q(s) = 1` and `q`
//! vanishes on `m..s-1`, it represents the graph over every field. Writing
//! `q(t) = sum_j c_j C(t, j)` with forward differences `c_j` gives
//! `M = B_incl · diag(c_|S|) · B_incl^T`, where `B_incl` is the inclusion
//! matrix of vertices against all subsets `S` with `|S| <= s - m`. Its column
//! count `R = sum_{i <= s-m} C(d, i)` bounds the rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{check_prime, prime_matrix_digest, Gf2Matrix, IntMatrix, MatrixError, PrimeFieldMatrix};
use crate::guard::{gf2_bytes, GuardError, ResourceGuard};
use crate::kneser::{binomial, vertex_rank, GKGraph, GKParams, Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyRepError {
    #[error("need 1 <= m <= s, got s={s}, m={m}")]
    Range { s: u32, m: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Guard(#[from] GuardError),
    #[error("matrix is {rows}x{cols} but the graph has {n} vertices")]
    DimensionMismatch { rows: usize, cols: usize, n: usize },
}

/// Generalized binomial `C(x, k)` for any integer `x`.
pub fn binomial_signed(x: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= x - i;
        den *= i + 1;
    }
    num / den
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonCoefficients {
    pub s: u32,
    pub m: u32,
    /// `c_0 .. c_{s-m}`.
    pub c: Vec<BigInt>,
}

pub fn newton_coefficients(s: u32, m: u32) -> Result<NewtonCoefficients, PolyRepError> {
    if m < 1 || m > s {
        return Err(PolyRepError::Range { s, m });
    }
    let k = s - m;
    let values: Vec<BigInt> = (0..=k as i64).map(|t| binomial_signed(t - m as i64, k)).collect();
    let c = (0..=k as usize)
        .map(|j| {
            let mut acc = BigInt::zero();
            for (i, v) in values.iter().enumerate().take(j + 1) {
                let term = binomial_signed(j as i64, i as u32) * v;
                if (j - i) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
        .collect();
    Ok(NewtonCoefficients { s, m, c })
}

impl NewtonCoefficients {
    /// `q(t) = C(t - m, s - m)` evaluated directly.
    pub fn q(&self, t: i64) -> BigInt {
        binomial_signed(t - self.m as i64, self.s - self.m)
    }

    /// `sum_j c_j C(t, j)`; equals `q(t)` for every integer `t`.
    pub fn newton_value(&self, t: i64) -> BigInt {
        self.c.iter().enumerate().map(|(j, c)| c * binomial_signed(t, j as u32)).sum()
    }
}

/// `q(|A ∩ B|)` for every possible intersection size `0..=s`.
fn q_table(params: &GKParams) -> Vec<BigInt> {
    let k = params.s - params.m;
    (0..=params.s as i64).map(|t| binomial_signed(t - params.m as i64, k)).collect()
}

/// The integer matrix with entry `q(|A ∩ B|)`.
pub fn representing_matrix_integer(params: GKParams, guard: &ResourceGuard) -> Result<IntMatrix, PolyRepError> {
    let n = params.vertex_count();
    guard.check("integer representing matrix", n, n.saturating_mul(n).saturating_mul(40))?;
    let g = GKGraph::build(params);
    let table = q_table(&params);
    Ok(IntMatrix::from_fn(n as usize, n as usize, |i, j| table[g.intersection(i, j) as usize].clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRepFactorization {
    pub params: GKParams,
    pub coefficients: NewtonCoefficients,
    /// `R`, the number of columns.
    pub r: usize,
    /// Column subsets as masks, ordered by size and then colex.
    pub columns: Vec<u64>,
    /// `n x R`, entry 1 iff the column subset is contained in the vertex.
    pub incl: Gf2Matrix,
    /// `c_|S|` for each column `S`.
    pub diag: Vec<BigInt>,
}

/// Every subset of `[d]` of size at most `top`, by size then colex.
fn small_subsets(d: u32, top: u32) -> Vec<u64> {
    let mut out = vec![0u64];
    for k in 1..=top.min(d) {
        let count = binomial(d as u64, k as u64).expect("d <= 64");
        let mut x: u64 = u64::MAX >> (64 - k);
        for i in 0..count {
            out.push(x);
            if i + 1 < count {
                let c = x & x.wrapping_neg();
                let r = x + c;
                x = (((r ^ x) >> 2) / c) | r;
            }
        }
    }
    out
}

pub fn inclusion_factorization(params: GKParams, guard: &ResourceGuard) -> Result<PolyRepFactorization, PolyRepError> {
    let n = params.vertex_count();
    let r = params.rank_bound();
    guard.check("inclusion matrix", n, gf2_bytes(n, r))?;
    let top = params.s - params.m;
    let coefficients = newton_coefficients(params.s, params.m)?;
    let columns = small_subsets(params.d, top);
    debug_assert_eq!(columns.len() as u64, r);
    // column index of S is offset[|S|] + colex rank of S among |S|-subsets
    let mut offset = vec![0u64; top as usize + 2];
    for k in 0..=top as usize {
        offset[k + 1] = offset[k] + binomial(params.d as u64, k as u64).unwrap();
    }
    let g = GKGraph::build(params);
    let d = params.d;
    let incl = Gf2Matrix::from_row_fn(n as usize, r as usize, |i, row| {
        let a = g.mask(i);
        // walk the submasks of A, keeping those of size <= top
        let mut sub = a;
        loop {
            let k = sub.count_ones();
            if k <= top {
                let col = offset[k as usize] + vertex_rank(sub, d, k).expect("submask of a vertex");
                row[(col >> 6) as usize] |= 1 << (col & 63);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & a;
        }
    });
    let diag = columns.iter().map(|s| coefficients.c[s.count_ones() as usize].clone()).collect();
    Ok(PolyRepFactorization { params, coefficients, r: r as usize, columns, incl, diag })
}

impl PolyRepFactorization {
    /// `B_incl · diag · B_incl^T` computed from the stored factors. Uses
    /// checked `i128` sums and falls back to big integers on overflow.
    pub fn product(&self) -> IntMatrix {
        let n = self.incl.rows();
        let small: Option<Vec<i128>> = self.diag.iter().map(|c| c.to_i128()).collect();
        let entry_big = |i: usize, j: usize| -> BigInt {
            let mut acc = BigInt::zero();
            for_common_columns(&self.incl, i, j, |c| acc += &self.diag[c]);
            acc
        };
        IntMatrix::from_fn(n, n, |i, j| {
            if let Some(small) = &small {
                let mut acc: Option<i128> = Some(0);
                for_common_columns(&self.incl, i, j, |c| acc = acc.and_then(|a| a.checked_add(small[c])));
                if let Some(v) = acc {
                    return BigInt::from(v);
                }
            }
            entry_big(i, j)
        })
    }

    /// First entry where the product differs from `m`, if any.
    pub fn first_mismatch(&self, m: &IntMatrix) -> Option<(usize, usize)> {
        let n = self.incl.rows();
        if m.rows() != n || m.cols() != n {
            return Some((0, 0));
        }
        let p = self.product();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| p.get(i, j) != m.get(i, j))
    }
}

fn for_common_columns(b: &Gf2Matrix, i: usize, j: usize, mut f: impl FnMut(usize)) {
    for (w, (x, y)) in b.row(i).iter().zip(b.row(j)).enumerate() {
        let mut both = x & y;
        while both != 0 {
            f(w * 64 + both.trailing_zeros() as usize);
            both &= both - 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RepViolation {
    ZeroDiagonal { vertex: usize },
    NonAdjacentNonzero { row: usize, col: usize, value: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentsVerdict {
    pub holds: bool,
    /// First violation in row-major order.
    pub violation: Option<RepViolation>,
}

/// Checks that `m` represents `g`: nonzero diagonal and zeros at every
/// distinct non-adjacent pair, in both orientations.
pub fn verify_represents<G: Graph + Sync>(m: &PrimeFieldMatrix, g: &G) -> Result<RepresentsVerdict, PolyRepError> {
    let n = g.order();
    if m.rows() != n || m.cols() != n {
        return Err(PolyRepError::DimensionMismatch { rows: m.rows(), cols: m.cols(), n });
    }
    let row_violation = |i: usize| -> Option<RepViolation> {
        if m.get(i, i) == 0 {
            return Some(RepViolation::ZeroDiagonal { vertex: i });
        }
        let bad = |j: usize| j != i && !g.adjacent(i, j);
        match m.as_gf2() {
            Some(b) => {
                for (w, &word) in b.row(i).iter().enumerate() {
                    let mut word = word;
                    while word != 0 {
                        let j = w * 64 + word.trailing_zeros() as usize;
                        word &= word - 1;
                        if bad(j) {
                            return Some(RepViolation::NonAdjacentNonzero { row: i, col: j, value: 1 });
                        }
                    }
                }
                None
            }
            None => (0..n).find(|&j| m.get(i, j) != 0 && bad(j)).map(|j| RepViolation::NonAdjacentNonzero {
                row: i,
                col: j,
                value: m.get(i, j),
            }),
        }
    };
    let violation = (0..n).into_par_iter().find_map_first(row_violation);
    Ok(RepresentsVerdict { holds: violation.is_none(), violation })
}

/// `q(|A ∩ B|)` reduced modulo `p`, built entrywise.
pub fn representing_matrix_mod_p_only(
    params: GKParams,
    p: u64,
    guard: &ResourceGuard,
) -> Result<PrimeFieldMatrix, PolyRepError> {
    let p32 = check_prime(p)?;
    let n = params.vertex_count();
    let bytes = if p32 == 2 { gf2_bytes(n, n) } else { n.saturating_mul(n).saturating_mul(4) };
    guard.check("representing matrix", n, bytes)?;
    let g = GKGraph::build(params);
    let residues: Vec<u32> =
        q_table(&params).iter().map(|v| v.mod_floor(&BigInt::from(p32)).to_u32().unwrap()).collect();
    let n = n as usize;
    if p32 == 2 {
        let masks = g.masks();
        let m = Gf2Matrix::from_row_fn(n, n, |i, row| {
            let a = masks[i];
            for (j, &b) in masks.iter().enumerate() {
                if residues[(a & b).count_ones() as usize] == 1 {
                    row[j >> 6] |= 1 << (j & 63);
                }
            }
        });
        Ok(PrimeFieldMatrix::from_gf2(m))
    } else {
        Ok(PrimeFieldMatrix::from_fn(p, n, n, |i, j| residues[g.intersection(i, j) as usize] as i64)?)
    }
}

/// The representing matrix modulo `p` with its measured properties.
#[derive(Clone, Debug)]
pub struct ModPRepresentation {
    pub params: GKParams,
    pub p: u32,
    pub matrix: PrimeFieldMatrix,
    pub rank: usize,
    /// `R = sum_{i <= s-m} C(d, i)`.
    pub bound: u64,
    pub symmetric: bool,
    pub represents: RepresentsVerdict,
}

pub fn representing_matrix_mod_p(
    params: GKParams,
    p: u64,
    guard: &ResourceGuard,
) -> Result<ModPRepresentation, PolyRepError> {
    let matrix = representing_matrix_mod_p_only(params, p, guard)?;
    let g = GKGraph::build(params);
    let represents = verify_represents(&matrix, &g)?;
    Ok(ModPRepresentation {
        params,
        p: matrix.modulus(),
        rank: matrix.rank(),
        bound: params.rank_bound(),
        symmetric: matrix.is_symmetric(),
        represents,
        matrix,
    })
}

impl ModPRepresentation {
    pub fn rank_within_bound(&self) -> bool {
        self.rank as u64 <= self.bound
    }

    pub fn verified(&self) -> bool {
        self.represents.holds && self.symmetric && self.rank_within_bound()
    }

    pub fn certificate_fragment(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.params.d,
            "s": self.params.s,
            "m": self.params.m,
            "p": self.p,
            "n": self.matrix.rows(),
            "R": self.bound,
            "rank": self.rank,
            "symmetric": self.symmetric,
            "represents": self.represents.holds,
            "matrix_digest": prime_matrix_digest(&self.matrix),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::ExplicitGraph;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn all_params(max_d: u32) -> impl Iterator<Item = GKParams> {
        (1..=max_d).flat_map(|d| (1..=d).flat_map(move |s| (1..=s).map(move |m| GKParams::new(d, s, m).unwrap())))
    }

    #[test]
    fn newton_examples() {
        assert_eq!(newton_coefficients(2, 1).unwrap().c, ints(&[-1, 1]));
        assert_eq!(newton_coefficients(4, 4).unwrap().c, ints(&[1]));
        let c = newton_coefficients(6, 2).unwrap();
        assert_eq!(c.c, ints(&[5, -4, 3, -2, 1]));
        let at6: BigInt = c.c.iter().enumerate().map(|(j, x)| x * binomial_signed(6, j as u32)).sum();
        assert_eq!(at6, BigInt::one());
        assert!(newton_coefficients(3, 0).is_err());
        assert!(newton_coefficients(3, 4).is_err());
    }

    #[test]
    fn newton_identity_and_zeros() {
        for s in 1..=12 {
            for m in 1..=s {
                let c = newton_coefficients(s, m).unwrap();
                for t in 0..=s as i64 {
                    assert_eq!(c.newton_value(t), c.q(t), "s={s} m={m} t={t}");
                }
                for t in m..s {
                    assert!(c.q(t as i64).is_zero());
                }
                assert!(c.q(s as i64).is_one());
            }
        }
    }

    #[test]
    fn signed_binomial() {
        assert_eq!(binomial_signed(-1, 1), BigInt::from(-1));
        assert_eq!(binomial_signed(-2, 3), BigInt::from(-4));
        assert_eq!(binomial_signed(5, 2), BigInt::from(10));
        assert_eq!(binomial_signed(2, 5), BigInt::zero());
    }

    #[test]
    fn integer_matrix_small_case() {
        let p = GKParams::new(4, 2, 1).unwrap();
        let m = representing_matrix_integer(p, &ResourceGuard::default()).unwrap();
        // {1,2} is vertex 0 and {3,4} is vertex 5
        assert_eq!(m.get(0, 5), &BigInt::from(-1));
        assert!(m.is_symmetric());
        for i in 0..6 {
            assert!(m.get(i, i).is_one());
        }
        assert!(m.get(0, 1).is_zero());
        let tight = ResourceGuard { max_vertices: 5, ..Default::default() };
        assert!(matches!(representing_matrix_integer(p, &tight), Err(PolyRepError::Guard(_))));
    }

    #[test]
    fn factorization_matches_entrywise_matrix() {
        for p in all_params(8) {
            let f = inclusion_factorization(p, &ResourceGuard::default()).unwrap();
            assert_eq!(f.r as u64, p.rank_bound());
            let m = representing_matrix_integer(p, &ResourceGuard::default()).unwrap();
            assert_eq!(f.first_mismatch(&m), None, "{p}");
        }
    }

    #[test]
    fn factorization_degenerate_case() {
        let p = GKParams::new(5, 3, 3).unwrap();
        let f = inclusion_factorization(p, &ResourceGuard::default()).unwrap();
        assert_eq!(f.r, 1);
        assert_eq!(f.diag, ints(&[1]));
        assert_eq!(f.incl.count_ones(), 10);
        assert_eq!(f.columns, vec![0]);
    }

    #[test]
    fn column_order_by_size_then_colex() {
        let cols = small_subsets(4, 2);
        assert_eq!(cols, vec![0, 0b1, 0b10, 0b100, 0b1000, 0b11, 0b101, 0b110, 0b1001, 0b1010, 0b1100]);
    }

    #[test]
    fn mod_two_small_case() {
        let p = GKParams::new(4, 2, 1).unwrap();
        let rep = representing_matrix_mod_p(p, 2, &ResourceGuard::default()).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expected = i == j || i + j == 5;
                assert_eq!(rep.matrix.get(i, j) == 1, expected);
            }
        }
        assert_eq!(rep.rank, 3);
        assert_eq!(rep.bound, 5);
        assert!(rep.verified());
        assert!(representing_matrix_mod_p(p, 4, &ResourceGuard::default()).is_err());
    }

    #[test]
    fn all_ones_when_m_equals_s() {
        for prime in [2, 3, 7] {
            let rep = representing_matrix_mod_p(GKParams::new(6, 3, 3).unwrap(), prime, &ResourceGuard::default()).unwrap();
            assert_eq!(rep.rank, 1);
            assert!(rep.verified());
        }
    }

    #[test]
    fn verify_represents_basic_cases() {
        let k4 = ExplicitGraph::complete(4);
        let path = ExplicitGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        for prime in [2u64, 3] {
            let id = PrimeFieldMatrix::identity(prime, 4).unwrap();
            assert!(verify_represents(&id, &path).unwrap().holds);
            let ones = PrimeFieldMatrix::from_fn(prime, 4, 4, |_, _| 1).unwrap();
            assert!(verify_represents(&ones, &k4).unwrap().holds);
            let v = verify_represents(&ones, &path).unwrap();
            assert_eq!(v.violation, Some(RepViolation::NonAdjacentNonzero { row: 0, col: 2, value: 1 }));
        }
        let mut z = PrimeFieldMatrix::identity(5, 3).unwrap();
        z.set(1, 1, 0);
        let v = verify_represents(&z, &ExplicitGraph::empty(3)).unwrap();
        assert_eq!(v.violation, Some(RepViolation::ZeroDiagonal { vertex: 1 }));
        assert!(verify_represents(&z, &k4).is_err());
    }

    #[test]
    fn rank_chain_for_small_parameters() {
        for p in all_params(7) {
            let m = representing_matrix_integer(p, &ResourceGuard::default()).unwrap();
            let q_rank = m.rank();
            assert!(q_rank as u64 <= p.rank_bound());
            for prime in [2, 3, 5] {
                let rep = representing_matrix_mod_p(p, prime, &ResourceGuard::default()).unwrap();
                assert!(rep.verified(), "{p} mod {prime}");
                assert!(rep.rank <= q_rank);
                assert_eq!(rep.matrix, m.reduce_mod_p(prime).unwrap());
            }
        }
    }

    #[test]
    fn certificate_fragment_fields() {
        let rep = representing_matrix_mod_p(GKParams::new(5, 2, 1).unwrap(), 3, &ResourceGuard::default()).unwrap();
        let v = rep.certificate_fragment();
        assert_eq!(v["n"], 10);
        assert_eq!(v["R"], 6);
        assert_eq!(v["matrix_digest"].as_str().unwrap().len(), 64);
    }
}
