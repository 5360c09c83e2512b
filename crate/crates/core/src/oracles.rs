//! Exhaustive ground truth on tiny graphs: minrank over GF(p), orthogonality
//! dimension over GF(2), graph homomorphisms and multichromatic numbers.
//! Every search runs under an [`OracleBudget`]; running out is reported as
//! [`OracleError::BudgetExceeded`] and never turned into a bound.

use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactalg::check_prime;
use crate::kneser::{ExplicitGraph, GKGraph, GKParams, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_vertices: usize,
    /// Largest dimension (od) or color count (multichromatic) tried.
    pub max_dimension: usize,
    /// Matrices enumerated or search nodes visited.
    pub max_steps: u64,
    pub max_seconds: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 12, max_dimension: 16, max_steps: 200_000_000, max_seconds: 600 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Step and clock accounting shared by the searches.
struct Meter {
    budget: OracleBudget,
    steps: u64,
    start: Instant,
}

impl Meter {
    fn new(budget: OracleBudget) -> Self {
        Meter { budget, steps: 0, start: Instant::now() }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return Err(OracleError::BudgetExceeded(format!("more than {} steps", self.budget.max_steps)));
        }
        if self.steps & 0xffff == 0 && self.start.elapsed() > Duration::from_secs(self.budget.max_seconds) {
            return Err(OracleError::BudgetExceeded(format!("more than {} s", self.budget.max_seconds)));
        }
        Ok(())
    }
}

fn check_vertices(n: usize, budget: &OracleBudget) -> Result<(), OracleError> {
    if n > budget.max_vertices {
        return Err(OracleError::BudgetExceeded(format!("{n} vertices, cap {}", budget.max_vertices)));
    }
    Ok(())
}

/// Independence number by subset enumeration (tiny graphs only).
pub fn independence_number<G: Graph>(g: &G) -> usize {
    let n = g.order();
    assert!(n < 32, "independence_number is exhaustive");
    let adj: Vec<u32> = (0..n).map(|u| g.neighbors(u).iter().fold(0, |m, &v| m | 1 << v)).collect();
    let mut best = 0;
    for set in 0u32..1 << n {
        let ones = set.count_ones() as usize;
        if ones > best && (0..n).all(|u| set >> u & 1 == 0 || adj[u] & set == 0) {
            best = ones;
        }
    }
    best
}

fn rank_gf2_rows(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &r in rows {
        let mut x = r;
        while x != 0 {
            let top = 63 - x.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = x;
                rank += 1;
                break;
            }
            x ^= basis[top];
        }
    }
    rank
}

fn rank_mod_p(mut a: Vec<Vec<u32>>, p: u32) -> usize {
    let n = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let inv = |x: u32| -> u32 {
        let (mut acc, mut base, mut e) = (1u64, x as u64, p as u64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..n).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let f = inv(a[r][c]) as u64;
        for j in c..cols {
            a[r][j] = (a[r][j] as u64 * f % p as u64) as u32;
        }
        for i in r + 1..n {
            let g = a[i][c] as u64;
            if g != 0 {
                for j in c..cols {
                    a[i][j] = ((a[i][j] as u64 + (p as u64 - g) * a[r][j] as u64) % p as u64) as u32;
                }
            }
        }
        r += 1;
        if r == n {
            break;
        }
    }
    r
}

/// Exact minrank over GF(p): the least rank of a matrix with nonzero
/// diagonal and zeros at distinct non-adjacent pairs. Both orientations of
/// every edge are independent free entries, and for `p > 2` every nonzero
/// diagonal value is tried. Stops early at the independence number, which
/// bounds the minrank from below.
pub fn minrank_exact<G: Graph>(g: &G, p: u64, budget: &OracleBudget) -> Result<usize, OracleError> {
    let p = check_prime(p).map_err(|e| OracleError::Invalid(e.to_string()))?;
    let n = g.order();
    check_vertices(n, budget)?;
    if n == 0 {
        return Ok(0);
    }
    let free: Vec<(usize, usize)> =
        (0..n).flat_map(|u| g.neighbors(u).into_iter().map(move |v| (u, v))).collect();
    let total = (p as u128 - 1).checked_pow(n as u32).and_then(|d| d.checked_mul((p as u128).checked_pow(free.len() as u32)?));
    if total.is_none_or(|t| t > budget.max_steps as u128) {
        return Err(OracleError::BudgetExceeded(format!(
            "{} free entries over GF({p}) exceed {} matrices",
            free.len(),
            budget.max_steps
        )));
    }
    let floor = independence_number(g);
    let mut meter = Meter::new(*budget);
    let mut best = n;
    if p == 2 {
        let mut rows: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        // Gray code: step k flips the free entry indexed by the lowest set bit of k
        for k in 0u64..1 << free.len() {
            meter.tick()?;
            if k > 0 {
                let (u, v) = free[k.trailing_zeros() as usize];
                rows[u] ^= 1 << v;
            }
            best = best.min(rank_gf2_rows(&rows));
            if best == floor {
                break;
            }
        }
        return Ok(best);
    }
    let slots = n + free.len();
    let mut digits = vec![0u32; slots];
    loop {
        meter.tick()?;
        let mut a = vec![vec![0u32; n]; n];
        for i in 0..n {
            a[i][i] = digits[i] + 1;
        }
        for (k, &(u, v)) in free.iter().enumerate() {
            a[u][v] = digits[n + k];
        }
        best = best.min(rank_mod_p(a, p));
        if best == floor {
            break;
        }
        // mixed radix increment: diagonal digits in 0..p-1, free digits in 0..p
        let mut pos = 0;
        loop {
            if pos == slots {
                return Ok(best);
            }
            let radix = if pos < n { p - 1 } else { p };
            digits[pos] += 1;
            if digits[pos] < radix {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
    Ok(best)
}

/// Smallest `t` admitting odd-weight vectors in GF(2)^t, one per vertex,
/// with adjacent vertices orthogonal. `t = n` always works (distinct unit
/// vectors), so the search stops there at the latest.
pub fn od_exact_gf2<G: Graph>(g: &G, budget: &OracleBudget) -> Result<usize, OracleError> {
    let n = g.order();
    check_vertices(n, budget)?;
    if n == 0 {
        return Ok(0);
    }
    let mut meter = Meter::new(*budget);
    let order = search_order(g);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|u| g.neighbors(u)).collect();
    for t in 1..=n {
        if t > budget.max_dimension || t > 20 {
            return Err(OracleError::BudgetExceeded(format!("dimension {t} above cap")));
        }
        let odd: Vec<u32> = (1u32..1 << t).filter(|v| v.count_ones() % 2 == 1).collect();
        let mut assigned: Vec<Option<u32>> = vec![None; n];
        if od_search(0, &order, &nbrs, &odd, &mut assigned, &mut meter)? {
            return Ok(t);
        }
    }
    unreachable!("unit vectors give an assignment in dimension n")
}

fn od_search(
    depth: usize,
    order: &[usize],
    nbrs: &[Vec<usize>],
    odd: &[u32],
    assigned: &mut [Option<u32>],
    meter: &mut Meter,
) -> Result<bool, OracleError> {
    let Some(&v) = order.get(depth) else { return Ok(true) };
    for &x in odd {
        meter.tick()?;
        let ok = nbrs[v].iter().all(|&w| assigned[w].is_none_or(|y| (x & y).count_ones() % 2 == 0));
        if ok {
            assigned[v] = Some(x);
            if od_search(depth + 1, order, nbrs, odd, assigned, meter)? {
                return Ok(true);
            }
            assigned[v] = None;
        }
    }
    Ok(false)
}

/// Vertices by decreasing degree, ties by index.
fn search_order<G: Graph>(g: &G) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.order()).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(g.neighbors(u).len()));
    order
}

/// Whether some map `V(G) -> V(H)` sends edges to edges.
pub fn homomorphism_exists<G: Graph, H: Graph>(g: &G, h: &H, budget: &OracleBudget) -> Result<bool, OracleError> {
    check_vertices(g.order(), budget)?;
    let mut meter = Meter::new(*budget);
    hom_search(g, h, None, &mut meter)
}

type Bits = Vec<u64>;

fn bits_with(n: usize, items: impl IntoIterator<Item = usize>) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64)];
    for i in items {
        b[i >> 6] |= 1 << (i & 63);
    }
    b
}

/// Backtracking with forward checking: each unassigned vertex keeps the set
/// of targets still compatible with its assigned neighbors, and the vertex
/// with the fewest candidates (lowest index on ties) is branched on next.
/// `pin` fixes one vertex's image.
fn hom_search<G: Graph, H: Graph>(
    g: &G,
    h: &H,
    pin: Option<(usize, usize)>,
    meter: &mut Meter,
) -> Result<bool, OracleError> {
    let (n, m) = (g.order(), h.order());
    if n == 0 {
        return Ok(true);
    }
    if m == 0 {
        return Ok(false);
    }
    let g_nbrs: Vec<Vec<usize>> = (0..n).map(|u| g.neighbors(u)).collect();
    let h_nbrs: Vec<Bits> = (0..m).map(|x| bits_with(m, h.neighbors(x))).collect();
    let mut domains: Vec<Bits> = vec![bits_with(m, 0..m); n];
    if let Some((v, x)) = pin {
        domains[v] = bits_with(m, [x]);
    }
    let mut assigned = vec![false; n];
    hom_step(&g_nbrs, &h_nbrs, &mut domains, &mut assigned, meter)
}

fn hom_step(
    g_nbrs: &[Vec<usize>],
    h_nbrs: &[Bits],
    domains: &mut Vec<Bits>,
    assigned: &mut Vec<bool>,
    meter: &mut Meter,
) -> Result<bool, OracleError> {
    let count = |b: &Bits| b.iter().map(|w| w.count_ones()).sum::<u32>();
    let Some(v) = (0..assigned.len()).filter(|&v| !assigned[v]).min_by_key(|&v| (count(&domains[v]), v)) else {
        return Ok(true);
    };
    let candidates: Vec<usize> = domains[v]
        .iter()
        .enumerate()
        .flat_map(|(k, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b))
        .collect();
    assigned[v] = true;
    for x in candidates {
        meter.tick()?;
        let saved: Vec<(usize, Bits)> =
            g_nbrs[v].iter().filter(|&&w| !assigned[w]).map(|&w| (w, domains[w].clone())).collect();
        let mut dead = false;
        for (w, _) in &saved {
            for (d, a) in domains[*w].iter_mut().zip(&h_nbrs[x]) {
                *d &= a;
            }
            if domains[*w].iter().all(|&d| d == 0) {
                dead = true;
            }
        }
        if !dead && hom_step(g_nbrs, h_nbrs, domains, assigned, meter)? {
            return Ok(true);
        }
        for (w, d) in saved {
            domains[w] = d;
        }
    }
    assigned[v] = false;
    Ok(false)
}

/// `χ_k(G)`: the least `t` with a homomorphism `G -> K(t, k)`. Vertex 0 of
/// `G` is pinned to the first `k`-set, which loses nothing because `K(t, k)`
/// is vertex-transitive.
pub fn multichromatic_exact<G: Graph>(g: &G, k: usize, budget: &OracleBudget) -> Result<usize, OracleError> {
    if k == 0 {
        return Err(OracleError::Invalid("k must be positive".into()));
    }
    let n = g.order();
    check_vertices(n, budget)?;
    if n == 0 {
        return Ok(0);
    }
    let mut meter = Meter::new(*budget);
    // k * n colors always suffice (disjoint blocks per vertex)
    for t in k..=k * n {
        if t > budget.max_dimension {
            return Err(OracleError::BudgetExceeded(format!("{t} colors above cap {}", budget.max_dimension)));
        }
        let params = GKParams::new(t as u32, k as u32, 1).map_err(|e| OracleError::Invalid(e.to_string()))?;
        let target = GKGraph::build(params).to_explicit();
        if hom_search(g, &target, Some((0, 0)), &mut meter)? {
            return Ok(t);
        }
    }
    unreachable!("k * n colors always suffice")
}

/// SHA-256 of the graph's canonical `{n, edges}` JSON.
pub fn instance_digest(g: &ExplicitGraph) -> String {
    hex::encode(Sha256::digest(g.to_json().to_string().as_bytes()))
}

/// One results-ledger line.
pub fn ledger_entry(
    op: &str,
    g: &ExplicitGraph,
    params: serde_json::Value,
    outcome: &Result<serde_json::Value, OracleError>,
) -> serde_json::Value {
    let (status, value) = match outcome {
        Ok(v) => ("done", v.clone()),
        Err(OracleError::BudgetExceeded(why)) => ("budget-exceeded", serde_json::Value::String(why.clone())),
        Err(OracleError::Invalid(why)) => ("invalid", serde_json::Value::String(why.clone())),
    };
    serde_json::json!({
        "op": op,
        "instance_digest": instance_digest(g),
        "n": g.order(),
        "params": params,
        "status": status,
        "value": value,
    })
}

/// Appends one JSON line to the ledger file.
pub fn append_ledger(path: &Path, entry: &serde_json::Value) -> std::io::Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{entry}")
}
