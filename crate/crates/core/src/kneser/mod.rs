//! Generalized Kneser graphs `K(d, s, m)`: vertices are the `s`-subsets of a
//! `d`-element ground set, and two subsets are adjacent when they share
//! fewer than `m` elements. With `m = 1` this is the ordinary Kneser graph.
//!
//! Subsets are `u64` bit masks over `{0, .., d-1}` (so `d <= 64`); vertex
//! indices follow colexicographic order.

mod girth;
mod graph;

pub use girth::{odd_girth_exceeds, odd_girth_exceeds_from, GirthCheck, GirthMode, GirthOutcome, OddGirthVerdict};
pub use graph::{Complement, ExplicitGraph, Graph};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid parameters d={d}, s={s}, m={m}: need 1 <= m <= s <= d <= 64")]
    InvalidParams { d: u32, s: u32, m: u32 },
    #[error("vertex count C({d},{s}) does not fit in memory addressing")]
    TooManyVertices { d: u32, s: u32 },
    #[error("index {index} out of range for C({d},{s}) = {count}")]
    IndexOutOfRange { index: u64, d: u32, s: u32, count: u64 },
    #[error("mask {mask:#x} is not an {s}-subset of a {d}-set")]
    BadMask { mask: u64, d: u32, s: u32 },
    #[error("odd girth bound must be odd and at least 3, got {0}")]
    BadCycleLength(usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

/// Exact binomial coefficient in `u64`; `None` on overflow. `C(n, k) = 0` for `k > n`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `sum_{i=0}^{top} C(d, i)`, the rank bound `R` of the inclusion factorization.
pub fn binomial_prefix_sum(d: u32, top: u32) -> u64 {
    (0..=top.min(d) as u64).map(|i| binomial(d as u64, i).expect("d <= 64")).sum()
}

/// Colexicographic rank of an `s`-subset: `sum_i C(a_i, i + 1)` over its
/// elements `a_0 < a_1 < ...`.
pub fn vertex_rank(mask: u64, d: u32, s: u32) -> Result<u64, GraphError> {
    if mask.count_ones() != s || (d < 64 && mask >> d != 0) {
        return Err(GraphError::BadMask { mask, d, s });
    }
    let mut rank = 0;
    let mut rest = mask;
    let mut i = 1;
    while rest != 0 {
        let a = rest.trailing_zeros() as u64;
        rest &= rest - 1;
        rank += binomial(a, i).expect("within u64");
        i += 1;
    }
    Ok(rank)
}

/// Inverse of [`vertex_rank`].
pub fn vertex_unrank(index: u64, d: u32, s: u32) -> Result<u64, GraphError> {
    let count = binomial(d as u64, s as u64).ok_or(GraphError::TooManyVertices { d, s })?;
    if index >= count || s > d {
        return Err(GraphError::IndexOutOfRange { index, d, s, count });
    }
    let mut mask = 0u64;
    let mut rest = index;
    let mut top = d as u64;
    for i in (1..=s as u64).rev() {
        // largest a < top with C(a, i) <= rest
        let mut a = top - 1;
        while binomial(a, i).expect("within u64") > rest {
            a -= 1;
        }
        rest -= binomial(a, i).expect("within u64");
        mask |= 1 << a;
        top = a;
    }
    Ok(mask)
}

/// 1-based element list, for display.
pub fn mask_elements(mask: u64) -> Vec<u32> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GKParams {
    pub d: u32,
    pub s: u32,
    pub m: u32,
}

impl GKParams {
    pub fn new(d: u32, s: u32, m: u32) -> Result<Self, GraphError> {
        if !(1 <= m && m <= s && s <= d && d <= 64) {
            return Err(GraphError::InvalidParams { d, s, m });
        }
        binomial(d as u64, s as u64)
            .filter(|&n| n <= usize::MAX as u64 / 2)
            .ok_or(GraphError::TooManyVertices { d, s })?;
        Ok(GKParams { d, s, m })
    }

    pub fn vertex_count(&self) -> u64 {
        binomial(self.d as u64, self.s as u64).expect("checked at construction")
    }

    /// `R = sum_{i <= s - m} C(d, i)`.
    pub fn rank_bound(&self) -> u64 {
        binomial_prefix_sum(self.d, self.s - self.m)
    }

    /// Common vertex degree `sum_{i < m} C(s, i) C(d - s, s - i)`.
    pub fn degree(&self) -> u64 {
        let (d, s) = (self.d as u64, self.s as u64);
        (0..self.m as u64)
            .map(|i| binomial(s, i).unwrap() * binomial(d - s, s - i).unwrap())
            .sum()
    }
}

impl std::fmt::Display for GKParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K({},{},{})", self.d, self.s, self.m)
    }
}

/// `K(d, s, m)` with vertices in colex order. Adjacency is recomputed from
/// the masks on demand.
#[derive(Clone, Debug)]
pub struct GKGraph {
    params: GKParams,
    vertices: Vec<u64>,
}

impl GKGraph {
    pub fn build(params: GKParams) -> Self {
        let n = params.vertex_count() as usize;
        let mut vertices = Vec::with_capacity(n);
        // Gosper's hack walks s-subsets in increasing mask order, which is colex order.
        let mut x: u64 = u64::MAX >> (64 - params.s);
        for _ in 0..n {
            vertices.push(x);
            if vertices.len() == n {
                break;
            }
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
        GKGraph { params, vertices }
    }

    pub fn params(&self) -> GKParams {
        self.params
    }

    pub fn mask(&self, v: usize) -> u64 {
        self.vertices[v]
    }

    pub fn masks(&self) -> &[u64] {
        &self.vertices
    }

    pub fn intersection(&self, u: usize, v: usize) -> u32 {
        (self.vertices[u] & self.vertices[v]).count_ones()
    }

    pub fn edge_count(&self) -> u64 {
        self.vertices.len() as u64 * self.params.degree() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).flat_map(move |u| (u + 1..n).filter(move |&v| self.adjacent(u, v)).map(move |v| (u, v)))
    }

    /// Materialized neighbor lists.
    pub fn to_explicit(&self) -> ExplicitGraph {
        let n = self.vertices.len();
        ExplicitGraph::from_adjacency((0..n).map(|u| self.neighbors(u)).collect())
    }

    /// JSON export: parameters, vertex encoding and optionally the edge list.
    pub fn export_json(&self, with_edges: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "d": self.params.d,
            "s": self.params.s,
            "m": self.params.m,
            "n": self.vertices.len(),
            "degree": self.params.degree(),
            "vertex_encoding": "vertex i is the i-th s-subset of {1..d} in colexicographic order; \
                                masks list bit b-1 for element b",
        });
        if with_edges {
            let edges: Vec<[usize; 2]> = self.edges().map(|(a, b)| [a, b]).collect();
            v["masks"] = serde_json::json!(self.vertices);
            v["edges"] = serde_json::json!(edges);
        }
        v
    }
}

impl Graph for GKGraph {
    fn order(&self) -> usize {
        self.vertices.len()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.intersection(u, v) < self.params.m
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        let a = self.vertices[u];
        let m = self.params.m;
        self.vertices
            .iter()
            .enumerate()
            .filter(|&(v, &b)| v != u && (a & b).count_ones() < m)
            .map(|(v, _)| v)
            .collect()
    }
}
