//! End-to-end certificates for generalized Kneser graphs, closed-form bound
//! evaluators, and exact search for the point where the rank bound `R`
//! drops below the vertex count.
//!
//! Every verdict is decided in exact integer or rational arithmetic. Floats
//! appear only as display values in [`BoundReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactalg::{matrix_digest, prime_matrix_digest, read_matrix, write_prime_to, AnyMatrix, MatrixError, PrimeFieldMatrix};
use crate::factorize::{
    lempel_factorize, nearly_orthogonal_check, verify_orthogonal_representation, FactorizeError,
    NearlyOrthogonalVerdict, OrthoVerdict, VectorAssignment,
};
use crate::kneser::{Complement, GKGraph, GKParams, GirthCheck, GirthMode, GirthOutcome, GraphError};
use crate::polyrep::{representing_matrix_mod_p_only, verify_represents, PolyRepError, RepViolation};
use crate::guard::ResourceGuard;

#[derive(Debug, Error)]
pub enum ClaimError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("d = {d} is not a positive multiple of {modulus}")]
    Divisibility { d: u32, modulus: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    PolyRep(#[from] PolyRepError),
    #[error(transparent)]
    Factorize(#[from] FactorizeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

impl ClaimError {
    /// True when the failure is a resource limit rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            ClaimError::PolyRep(PolyRepError::Guard(_)) | ClaimError::Factorize(FactorizeError::PolyRep(PolyRepError::Guard(_)))
        )
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> ClaimError {
    ClaimError::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), ClaimError> {
    if cond {
        Ok(())
    } else {
        Err(ClaimError::Range(msg()))
    }
}

// ---------------------------------------------------------------------------
// closed-form evaluators

/// `⌈k/s⌉·(d − 2s) + 2k`, the conjectured value of the `k`-fold chromatic
/// number of `K(d, s)`.
pub fn stahl_rhs(k: u64, s: u64, d: u64) -> Result<BigInt, ClaimError> {
    require(k >= 1 && s >= 1 && d >= 2 * s, || format!("need k >= 1, s >= 1, d >= 2s; got k={k}, s={s}, d={d}"))?;
    Ok(BigInt::from(k.div_ceil(s)) * BigInt::from(d - 2 * s) + BigInt::from(2 * k))
}

/// `⌈k/2⌉·(d − 4) + 2k`, the `k`-subspace orthogonality dimension of `K(d, 2)`.
pub fn thm_s2_value(k: u64, d: u64) -> Result<BigInt, ClaimError> {
    require(k >= 1 && d >= 4, || format!("need k >= 1, d >= 4; got k={k}, d={d}"))?;
    Ok(BigInt::from(k.div_ceil(2)) * BigInt::from(d - 4) + BigInt::from(2 * k))
}

/// `(k − ⌈(k+1)/s⌉ + 1)/(s − 1) · d − c`. The additive constant `c` depends
/// on `s` and `k` in a way that is not pinned down, so the caller supplies it.
pub fn thm_general_lower(k: u64, s: u64, d: u64, c: &BigRational) -> Result<BigRational, ClaimError> {
    require(s >= 3 && k >= s && d >= 2 * s && !c.is_negative(), || {
        format!("need k >= s >= 3, d >= 2s, c >= 0; got k={k}, s={s}, d={d}, c={c}")
    })?;
    let num = BigInt::from(k) - BigInt::from((k + 1).div_ceil(s)) + 1;
    Ok(BigRational::new(num * BigInt::from(d), BigInt::from(s - 1)) - c)
}

/// `k·d/s`.
pub fn bukh_cox_lower(k: u64, s: u64, d: u64) -> Result<BigRational, ClaimError> {
    require(k >= 1 && s >= 1 && d >= 2 * s, || format!("need k >= 1, s >= 1, d >= 2s; got k={k}, s={s}, d={d}"))?;
    Ok(BigRational::new(BigInt::from(k) * BigInt::from(d), BigInt::from(s)))
}

// ---------------------------------------------------------------------------
// sign vectors

/// Vertex `A` of `K(d, s, m)` gets `w_A ∈ {±1}^d`, `+1` exactly on `A`.
/// Vectors are kept unnormalized; dividing inner products by `d` normalizes.
#[derive(Clone, Debug)]
pub struct SignVectorAssignment {
    d: u32,
    masks: Vec<u64>,
}

impl SignVectorAssignment {
    pub fn new(g: &GKGraph) -> Self {
        SignVectorAssignment { d: g.params().d, masks: g.masks().to_vec() }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn vector(&self, v: usize) -> Vec<i8> {
        (0..self.d).map(|i| if self.masks[v] >> i & 1 == 1 { 1 } else { -1 }).collect()
    }

    /// Coordinatewise `sum_i w_u[i]·w_v[i]`.
    pub fn inner_product(&self, u: usize, v: usize) -> i64 {
        self.vector(u).iter().zip(self.vector(v)).map(|(&a, b)| (a * b) as i64).sum()
    }

    pub fn normalized_inner_product(&self, u: usize, v: usize) -> BigRational {
        BigRational::new(self.inner_product(u, v).into(), self.d.into())
    }

    pub fn symmetric_difference(&self, u: usize, v: usize) -> u32 {
        (self.masks[u] ^ self.masks[v]).count_ones()
    }
}

/// Outcome of checking `⟨w_A, w_B⟩/d ≤ −1/2` on every edge, in the integer
/// form `4·|A△B| ≥ 3d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorColoringCheck {
    pub holds: bool,
    pub adjacent_pairs: u64,
    pub min_symmetric_difference: Option<u32>,
    /// `(d − 2·min |A△B|)/d` over edges, reduced.
    pub max_inner_product: Option<String>,
    pub violation: Option<[usize; 2]>,
}

pub fn vector_coloring_check(g: &GKGraph) -> VectorColoringCheck {
    use crate::kneser::Graph;
    let w = SignVectorAssignment::new(g);
    let d = w.d();
    let n = w.len();
    let (pairs, min, violation) = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut pairs = 0u64;
            let mut min = u32::MAX;
            let mut violation = None;
            for v in u + 1..n {
                if g.adjacent(u, v) {
                    pairs += 1;
                    let x = w.symmetric_difference(u, v);
                    min = min.min(x);
                    if violation.is_none() && 4 * x < 3 * d {
                        violation = Some([u, v]);
                    }
                }
            }
            (pairs, min, violation)
        })
        .reduce(|| (0, u32::MAX, None), |a, b| (a.0 + b.0, a.1.min(b.1), a.2.or(b.2)));
    let min = (pairs > 0).then_some(min);
    VectorColoringCheck {
        holds: violation.is_none(),
        adjacent_pairs: pairs,
        min_symmetric_difference: min,
        max_inner_product: min
            .map(|x| BigRational::new(BigInt::from(d) - 2 * BigInt::from(x), BigInt::from(d)).to_string()),
        violation,
    }
}

// ---------------------------------------------------------------------------
// certificates

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimId {
    /// `K(d, d/2, d/(2ℓ))` has odd girth above `ℓ` and a representing
    /// matrix of rank at most `R`.
    #[serde(rename = "odd-cycle-free-minrank")]
    OddCycleFreeMinrank,
    /// The complement of the triangle-free `K(d, d/2, d/6)` has a GF(2)
    /// orthogonal representation of dimension `rank(M)`.
    #[serde(rename = "triangle-free-od")]
    TriangleFreeOd,
    /// `K(d, d/2, d/8)` has vector chromatic number at most 3 while its
    /// complement has minrank at least `n / rank(M)`.
    #[serde(rename = "vchrom3-minrank")]
    Vchrom3Minrank,
}

impl ClaimId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::OddCycleFreeMinrank => "odd-cycle-free-minrank",
            ClaimId::TriangleFreeOd => "triangle-free-od",
            ClaimId::Vchrom3Minrank => "vchrom3-minrank",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertParams {
    pub d: u32,
    pub s: u32,
    pub m: u32,
    pub ell: Option<u32>,
    pub p: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Measured {
    pub n: u64,
    #[serde(rename = "R")]
    pub rank_bound: u64,
    /// Exact `R < n`.
    #[serde(rename = "R_below_n")]
    pub rank_bound_below_n: bool,
    pub degree: u64,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub girth: Option<GirthCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub represents: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub represents_violation: Option<RepViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_within_bound: Option<bool>,
    /// Column count of `B` in `M = B·B^T`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement_representation: Option<OrthoVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nearly_orthogonal: Option<NearlyOrthogonalVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_dim_below_n: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector_coloring: Option<VectorColoringCheck>,
    /// `⌈n / rank⌉`, a lower bound on the minrank of the complement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement_minrank_lower: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    /// Relative to the directory holding the certificate.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: ClaimId,
    pub params: CertParams,
    pub measured: Measured,
    pub digests: BTreeMap<String, String>,
    pub artifacts: Vec<Artifact>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub toolkit_version: String,
    pub run_config: serde_json::Value,
    pub timestamp: String,
    pub content_digest: String,
}

/// Matrices and vector lists are written as files only up to this many
/// vertices; larger certificates keep digests and are re-verified by
/// regeneration.
pub const ARTIFACT_MAX_VERTICES: u64 = 5000;

/// Default odd-girth mode switches from all sources to a single source above
/// this many vertices.
pub const EXHAUSTIVE_GIRTH_MAX_VERTICES: u64 = 5000;

pub const MATRIX_ARTIFACT: &str = "representing_matrix";
pub const VECTORS_ARTIFACT: &str = "complement_vectors";
pub const FACTOR_DIGEST: &str = "factor";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Certificate {
    fn new(claim: ClaimId, params: GKParams, ell: Option<u32>, p: u32) -> Self {
        let n = params.vertex_count();
        let rank_bound = params.rank_bound();
        let degree = params.degree();
        Certificate {
            claim,
            params: CertParams { d: params.d, s: params.s, m: params.m, ell, p },
            measured: Measured {
                n,
                rank_bound,
                rank_bound_below_n: rank_bound < n,
                degree,
                degenerate: degree <= 1,
                ..Measured::default()
            },
            digests: BTreeMap::new(),
            artifacts: Vec::new(),
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            run_config: serde_json::Value::Null,
            timestamp: String::new(),
            content_digest: String::new(),
        }
    }

    pub fn graph_params(&self) -> Result<GKParams, ClaimError> {
        Ok(GKParams::new(self.params.d, self.params.s, self.params.m)?)
    }

    /// File stem shared by the certificate and its artifacts.
    pub fn stem(&self) -> String {
        format!("{}-d{}-p{}", self.claim, self.params.d, self.params.p)
    }

    /// SHA-256 over the canonical JSON with `timestamp` and `content_digest`
    /// removed.
    pub fn compute_content_digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("certificate serializes");
        let obj = v.as_object_mut().expect("certificate is an object");
        obj.remove("timestamp");
        obj.remove("content_digest");
        sha256_hex(serde_json::to_string(&v).expect("value serializes").as_bytes())
    }

    /// Stamps the current time and recomputes the content digest.
    pub fn seal(&mut self) {
        self.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        self.content_digest = self.compute_content_digest();
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Writes `<stem>.json` into `dir` and returns its path.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf, ClaimError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join(format!("{}.json", self.stem()));
        fs::write(&path, self.to_json_pretty() + "\n").map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    pub fn read_from(path: &Path) -> Result<Self, ClaimError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| ClaimError::Malformed(e.to_string()))
    }

    fn emit(&mut self, dir: &Path, name: &str, suffix: &str, bytes: &[u8]) -> Result<(), ClaimError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let file = format!("{}.{suffix}", self.stem());
        let path = dir.join(&file);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.artifacts.push(Artifact { name: name.into(), path: file, sha256: sha256_hex(bytes) });
        Ok(())
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn default_girth_mode(n: u64) -> GirthMode {
    if n <= EXHAUSTIVE_GIRTH_MAX_VERTICES {
        GirthMode::Exhaustive
    } else {
        GirthMode::Transitive
    }
}

fn girth_stage(cert: &mut Certificate, g: &GKGraph, ell: u32, mode: Option<GirthMode>) -> Result<GirthOutcome, ClaimError> {
    let mode = mode.unwrap_or_else(|| default_girth_mode(cert.measured.n));
    let check = if matches!(mode, GirthMode::Exhaustive) {
        GirthCheck::run(&g.to_explicit(), ell as usize, mode)?
    } else {
        GirthCheck::run(g, ell as usize, mode)?
    };
    match (&check.mode, check.outcome) {
        (GirthMode::Transitive, _) => cert.note(format!(
            "odd girth searched from vertex 0 only; coordinate permutations act transitively on vertices, \
             so every odd cycle of length <= {ell} has a copy through vertex 0"
        )),
        (GirthMode::Sampled { .. }, GirthOutcome::NoViolationInSample) => cert.note(
            "odd girth checked on sampled induced subgraphs only; no short odd cycle found, which does not prove \
             there is none",
        ),
        _ => {}
    }
    if check.outcome == GirthOutcome::Refuted {
        cert.note(format!("odd cycle of length <= {ell} found: {:?}", check.witness.as_deref().unwrap_or(&[])));
    }
    let outcome = check.outcome;
    cert.measured.girth = Some(check);
    Ok(outcome)
}

/// Builds `M` modulo `p`, records its digest, symmetry, rank and whether it
/// represents the graph. Returns the matrix and whether every check passed.
fn representation_stage(
    cert: &mut Certificate,
    g: &GKGraph,
    p: u64,
    guard: &ResourceGuard,
    out: Option<&Path>,
) -> Result<(PrimeFieldMatrix, bool), ClaimError> {
    let matrix = representing_matrix_mod_p_only(g.params(), p, guard)?;
    let represents = verify_represents(&matrix, g)?;
    let symmetric = matrix.is_symmetric();
    let rank = matrix.rank();
    let within = rank as u64 <= cert.measured.rank_bound;
    let m = &mut cert.measured;
    m.symmetric = Some(symmetric);
    m.represents = Some(represents.holds);
    m.represents_violation = represents.violation.clone();
    m.rank = Some(rank);
    m.rank_within_bound = Some(within);
    cert.digests.insert(MATRIX_ARTIFACT.into(), prime_matrix_digest(&matrix));
    if !represents.holds {
        cert.note(format!("matrix does not represent the graph: {:?}", represents.violation));
    }
    if !symmetric {
        cert.note("matrix is not symmetric");
    }
    if !within {
        cert.note(format!("rank {rank} exceeds R = {}", cert.measured.rank_bound));
    }
    if let Some(dir) = out.filter(|_| cert.measured.n <= ARTIFACT_MAX_VERTICES) {
        let mut buf = Vec::new();
        write_prime_to(&matrix, &mut buf).map_err(|e| io_err(dir, e))?;
        cert.emit(dir, MATRIX_ARTIFACT, "matrix.txt", &buf)?;
    }
    if cert.measured.rank_bound >= cert.measured.n {
        cert.note(format!(
            "R = {} >= n = {}: the rank bound is vacuous at this size",
            cert.measured.rank_bound, cert.measured.n
        ));
    }
    Ok((matrix, represents.holds && symmetric && within))
}

fn divisible(d: u32, modulus: u32) -> Result<(), ClaimError> {
    if d == 0 || d % modulus != 0 {
        return Err(ClaimError::Divisibility { d, modulus });
    }
    Ok(())
}

fn combine(checks_hold: bool, girth: GirthOutcome) -> Verdict {
    match (checks_hold, girth) {
        (false, _) | (_, GirthOutcome::Refuted) => Verdict::Refuted,
        (true, GirthOutcome::Verified) => Verdict::Verified,
        (true, GirthOutcome::NoViolationInSample) => Verdict::Inconclusive,
    }
}

/// `K(d, d/2, d/(2ℓ))`: odd girth above `ℓ`, and a representing matrix
/// modulo `p` of rank at most `R`.
pub fn cycle_free_certificate(
    ell: u32,
    d: u32,
    p: u64,
    mode: Option<GirthMode>,
    guard: &ResourceGuard,
    out: Option<&Path>,
) -> Result<Certificate, ClaimError> {
    require(ell >= 3 && ell % 2 == 1, || format!("cycle length must be odd and >= 3, got {ell}"))?;
    divisible(d, 2 * ell)?;
    let params = GKParams::new(d, d / 2, d / (2 * ell))?;
    let mut cert = Certificate::new(ClaimId::OddCycleFreeMinrank, params, Some(ell), p as u32);
    let g = GKGraph::build(params);
    let (_, reps_ok) = representation_stage(&mut cert, &g, p, guard, out)?;
    let girth = girth_stage(&mut cert, &g, ell, mode)?;
    if cert.measured.degenerate {
        cert.note("every vertex has degree 1: the graph is a perfect matching of complementary sets");
    }
    cert.verdict = combine(reps_ok, girth);
    cert.seal();
    Ok(cert)
}

/// The full GF(2) pipeline on the triangle-free `K(d, d/2, d/6)`: graph,
/// representing matrix, `M = B·B^T`, the rows of `B` as an orthogonal
/// representation of the complement, and the nearly orthogonal check.
pub fn triangle_free_od_certificate(
    d: u32,
    guard: &ResourceGuard,
    out: Option<&Path>,
) -> Result<Certificate, ClaimError> {
    divisible(d, 6)?;
    let params = GKParams::new(d, d / 2, d / 6)?;
    let n = params.vertex_count();
    // M, the elimination copy, the stored copy in the factorization and a Gram matrix
    guard
        .check("triangle-free pipeline", n, 4 * crate::guard::gf2_bytes(n, n))
        .map_err(PolyRepError::from)?;
    let mut cert = Certificate::new(ClaimId::TriangleFreeOd, params, Some(3), 2);
    let g = GKGraph::build(params);
    let (matrix, reps_ok) = representation_stage(&mut cert, &g, 2, guard, out)?;
    let girth = girth_stage(&mut cert, &g, 3, None)?;
    let m = matrix.into_gf2().expect("p = 2 is packed");
    let b = match lempel_factorize(&m) {
        Ok(f) => f.b,
        Err(e @ (FactorizeError::ProductMismatch { .. } | FactorizeError::AllZeroDiagonal | FactorizeError::AsymmetricInput { .. })) => {
            cert.measured.product_verified = Some(false);
            cert.note(format!("factorization failed: {e}"));
            cert.verdict = Verdict::Refuted;
            cert.seal();
            return Ok(cert);
        }
        Err(e) => return Err(e.into()),
    };
    drop(m);
    let r = b.cols();
    let mut ok = reps_ok;
    cert.measured.product_verified = Some(true);
    cert.measured.factor_dim = Some(r);
    cert.measured.factor_dim_below_n = Some((r as u64) < n);
    if cert.measured.rank != Some(r) {
        ok = false;
        cert.note(format!("factor has {r} columns but rank(M) = {:?}", cert.measured.rank));
    }
    if r as u64 >= n {
        cert.note(format!("dimension {r} >= n = {n}: no saving over the trivial representation at this size"));
    }
    let assignment = VectorAssignment::new(PrimeFieldMatrix::from_gf2(b));
    cert.digests.insert(FACTOR_DIGEST.into(), prime_matrix_digest(&assignment.vectors));
    let ortho = verify_orthogonal_representation(&assignment, &Complement(&g))?;
    if !ortho.holds {
        ok = false;
        cert.note(format!("rows of B are not an orthogonal representation of the complement: {:?}", ortho.violation));
    }
    let nearly = nearly_orthogonal_check(assignment.vectors.as_gf2().expect("p = 2 is packed"));
    if !nearly.holds {
        ok = false;
        cert.note(format!(
            "rows of B are not nearly orthogonal: self-orthogonal {:?}, triple {:?}",
            nearly.self_orthogonal, nearly.triple
        ));
    }
    if let Some(dir) = out.filter(|_| n <= ARTIFACT_MAX_VERTICES) {
        let graph = serde_json::json!({ "complement_of": g.export_json(false) });
        let json = assignment.to_json(graph, ortho.holds);
        let bytes = serde_json::to_vec_pretty(&json).expect("json serializes");
        cert.emit(dir, VECTORS_ARTIFACT, "vectors.json", &bytes)?;
    }
    cert.measured.complement_representation = Some(ortho);
    cert.measured.nearly_orthogonal = Some(nearly);
    cert.verdict = combine(ok, girth);
    cert.seal();
    Ok(cert)
}

/// `K(d, d/2, d/8)`: sign vectors give vector chromatic number at most 3
/// (checked on every edge in integers), and the rank `r` of the representing
/// matrix modulo `p` bounds the complement's minrank below by `⌈n/r⌉`.
pub fn vchrom3_certificate(
    d: u32,
    p: u64,
    guard: &ResourceGuard,
    out: Option<&Path>,
) -> Result<Certificate, ClaimError> {
    divisible(d, 8)?;
    let params = GKParams::new(d, d / 2, d / 8)?;
    let mut cert = Certificate::new(ClaimId::Vchrom3Minrank, params, None, p as u32);
    let g = GKGraph::build(params);
    let (_, reps_ok) = representation_stage(&mut cert, &g, p, guard, out)?;
    let coloring = vector_coloring_check(&g);
    if let Some([u, v]) = coloring.violation {
        cert.note(format!("edge ({u},{v}) has 4|A△B| < 3d"));
    }
    let n = cert.measured.n;
    let rank = cert.measured.rank.expect("set by representation stage") as u64;
    if rank > 0 {
        cert.measured.complement_minrank_lower = Some(n.div_ceil(rank));
    }
    let ok = reps_ok && coloring.holds;
    cert.measured.vector_coloring = Some(coloring);
    cert.verdict = if ok { Verdict::Verified } else { Verdict::Refuted };
    cert.seal();
    Ok(cert)
}

// ---------------------------------------------------------------------------
// re-verification

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reverification {
    pub stored: Verdict,
    pub reproduced: Verdict,
    pub mismatches: Vec<String>,
}

impl Reverification {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty() && self.stored == self.reproduced
    }
}

/// Checks the content digest and every artifact of a stored certificate,
/// then reruns its pipeline and compares parameters, measurements, digests,
/// notes and verdict.
pub fn verify_certificate(path: &Path, guard: &ResourceGuard) -> Result<Reverification, ClaimError> {
    let cert = Certificate::read_from(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut mismatches = Vec::new();
    if cert.compute_content_digest() != cert.content_digest {
        mismatches.push("content digest does not match certificate contents".to_string());
    }
    let params = cert.graph_params()?;
    let g = GKGraph::build(params);
    for a in &cert.artifacts {
        let file = dir.join(&a.path);
        let bytes = fs::read(&file).map_err(|e| io_err(&file, e))?;
        if sha256_hex(&bytes) != a.sha256 {
            mismatches.push(format!("artifact {} has a different sha256", a.path));
            continue;
        }
        let text = String::from_utf8(bytes).map_err(|e| io_err(&file, e))?;
        match a.name.as_str() {
            MATRIX_ARTIFACT => {
                let m = match read_matrix(&text)? {
                    AnyMatrix::Prime(m) => m,
                    _ => return Err(ClaimError::Malformed(format!("{} is not over a prime field", a.path))),
                };
                if cert.digests.get(MATRIX_ARTIFACT) != Some(&matrix_digest(&AnyMatrix::Prime(m.clone()))) {
                    mismatches.push("matrix artifact digest differs from recorded digest".into());
                }
                if cert.measured.rank != Some(m.rank()) {
                    mismatches.push("rank of matrix artifact differs from recorded rank".into());
                }
                if cert.measured.represents != Some(verify_represents(&m, &g)?.holds) {
                    mismatches.push("representation check on matrix artifact differs".into());
                }
            }
            VECTORS_ARTIFACT => {
                let json: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| ClaimError::Malformed(e.to_string()))?;
                let vectors = VectorAssignment::from_json(&json).map_err(ClaimError::Malformed)?;
                if cert.measured.factor_dim != Some(vectors.dim()) {
                    mismatches.push("vector artifact dimension differs from recorded dimension".into());
                }
                let holds = verify_orthogonal_representation(&vectors, &Complement(&g))?.holds;
                if cert.measured.complement_representation.as_ref().map(|v| v.holds) != Some(holds) {
                    mismatches.push("orthogonality check on vector artifact differs".into());
                }
            }
            other => mismatches.push(format!("unknown artifact kind {other}")),
        }
    }
    let p = cert.params.p as u64;
    let rerun = match cert.claim {
        ClaimId::OddCycleFreeMinrank => {
            let ell = cert.params.ell.ok_or_else(|| ClaimError::Malformed("missing ell".into()))?;
            let mode = cert.measured.girth.as_ref().map(|c| c.mode.clone());
            cycle_free_certificate(ell, cert.params.d, p, mode, guard, None)?
        }
        ClaimId::TriangleFreeOd => triangle_free_od_certificate(cert.params.d, guard, None)?,
        ClaimId::Vchrom3Minrank => vchrom3_certificate(cert.params.d, p, guard, None)?,
    };
    if rerun.params != cert.params {
        mismatches.push("parameters differ on rerun".into());
    }
    if rerun.measured != cert.measured {
        mismatches.push("measured quantities differ on rerun".into());
    }
    if rerun.digests != cert.digests {
        mismatches.push("digests differ on rerun".into());
    }
    if rerun.notes != cert.notes {
        mismatches.push("notes differ on rerun".into());
    }
    Ok(Reverification { stored: cert.verdict, reproduced: rerun.verdict, mismatches })
}

// ---------------------------------------------------------------------------
// crossover search

/// How `m` depends on `d` (with `s = d/2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MRule {
    /// `m = d/(2ℓ)`, `d` a multiple of `2ℓ`.
    Ell(u32),
    /// `m = d/8`, `d` a multiple of 8.
    Eighth,
}

impl MRule {
    pub fn modulus(&self) -> u32 {
        match self {
            MRule::Ell(ell) => 2 * ell,
            MRule::Eighth => 8,
        }
    }
}

impl FromStr for MRule {
    type Err = ClaimError;

    fn from_str(s: &str) -> Result<Self, ClaimError> {
        if s == "eighth" {
            return Ok(MRule::Eighth);
        }
        let ell = s
            .strip_prefix("ell:")
            .and_then(|x| x.parse::<u32>().ok())
            .ok_or_else(|| ClaimError::Range(format!("rule must be `ell:<odd>` or `eighth`, got {s:?}")))?;
        require(ell >= 3 && ell % 2 == 1 && ell <= 1000, || format!("ell must be odd in 3..=1000, got {ell}"))?;
        Ok(MRule::Ell(ell))
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MRule::Ell(ell) => write!(f, "ell:{ell}"),
            MRule::Eighth => f.write_str("eighth"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub d: u32,
    pub m: u32,
    /// `C(d, d/2)`.
    pub n: BigUint,
    /// `sum_{i <= d/2 - m} C(d, i)`.
    pub r: BigUint,
    /// `log2` of the estimate `2^{H(1/2 - m/d)·d}`; display only.
    pub entropy_log2: f64,
    /// Exact `R < n`.
    pub r_below_n: bool,
    /// `1 - log R / log n`; display only.
    pub delta: f64,
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    (x >> shift).to_f64().expect("fits in 64 bits").log2() + shift as f64
}

fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x].iter().filter(|&&t| t > 0.0).map(|&t| -t * t.log2()).sum()
}

impl BoundReport {
    pub fn new(d: u32, m: u32) -> Self {
        let s = d / 2;
        let mut c = BigUint::one();
        let mut r = BigUint::zero();
        for i in 0..s {
            if i + m <= s {
                r += &c;
            }
            c = c * BigUint::from(d - i) / BigUint::from(i + 1);
        }
        if m == 0 {
            r += &c;
        }
        let n = c;
        let r_below_n = r < n;
        let (ln, lr) = (log2_big(&n), log2_big(&r));
        BoundReport {
            d,
            m,
            entropy_log2: binary_entropy(0.5 - m as f64 / d as f64) * d as f64,
            delta: if ln > 0.0 { 1.0 - lr / ln } else { 0.0 },
            r_below_n,
            n,
            r,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "m": self.m,
            "n": self.n.to_string(),
            "R": self.r.to_string(),
            "R_below_n": self.r_below_n,
            "entropy_log2": self.entropy_log2,
            "delta": self.delta,
        })
    }
}

pub const CROSSOVER_MAX_D: u32 = 10_000;

/// One report per admissible `d <= d_max`.
pub fn crossover_search(rule: MRule, d_max: u32) -> Result<Vec<BoundReport>, ClaimError> {
    require(d_max <= CROSSOVER_MAX_D, || format!("d_max must be at most {CROSSOVER_MAX_D}, got {d_max}"))?;
    let k = rule.modulus();
    let ds: Vec<u32> = (1..=d_max / k).map(|i| i * k).collect();
    Ok(ds.into_par_iter().map(|d| BoundReport::new(d, d / k)).collect())
}

/// Smallest `d` in the list with exact `R < n`.
pub fn minimal_crossover(reports: &[BoundReport]) -> Option<u32> {
    reports.iter().filter(|r| r.r_below_n).map(|r| r.d).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::Graph;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn formula_values() {
        assert_eq!(stahl_rhs(1, 2, 5).unwrap(), 3.into());
        assert_eq!(stahl_rhs(2, 2, 5).unwrap(), 5.into());
        assert_eq!(stahl_rhs(4, 3, 6).unwrap(), 8.into());
        assert_eq!(thm_s2_value(1, 4).unwrap(), 2.into());
        assert_eq!(thm_s2_value(2, 5).unwrap(), 5.into());
        assert_eq!(thm_s2_value(4, 6).unwrap(), 12.into());
        assert_eq!(thm_general_lower(3, 3, 6, &BigRational::zero()).unwrap(), rat(6, 1));
        assert_eq!(bukh_cox_lower(2, 2, 6).unwrap(), rat(6, 1));
        assert_eq!(bukh_cox_lower(4, 3, 8).unwrap(), rat(32, 3));
        for d in 6..30u64 {
            let c = rat(5, 7);
            assert_eq!(thm_general_lower(4, 3, d, &c).unwrap(), rat(3 * d as i64, 2) - &c);
            for ell in 1..5u64 {
                for s in 3..6u64 {
                    if d >= 2 * s && ell * s - 1 >= s {
                        assert_eq!(thm_general_lower(ell * s - 1, s, d, &c).unwrap(), rat((ell * d) as i64, 1) - &c);
                    }
                }
            }
            assert_eq!(bukh_cox_lower(3, 3, d).unwrap(), rat(d as i64, 1));
        }
    }

    #[test]
    fn formula_ranges() {
        assert!(stahl_rhs(0, 2, 5).is_err());
        assert!(stahl_rhs(1, 3, 5).is_err());
        assert!(thm_s2_value(1, 3).is_err());
        assert!(thm_general_lower(2, 3, 6, &BigRational::zero()).is_err());
        assert!(thm_general_lower(3, 2, 6, &BigRational::zero()).is_err());
        assert!(thm_general_lower(3, 3, 6, &rat(-1, 2)).is_err());
        assert!(bukh_cox_lower(1, 4, 7).is_err());
    }

    #[test]
    fn formula_identities() {
        for d in 4..40u64 {
            for k in 1..20u64 {
                assert_eq!(thm_s2_value(k, d).unwrap(), stahl_rhs(k, 2, d).unwrap());
                for s in 1..=d / 2 {
                    if k % s == 0 {
                        let lhs = bukh_cox_lower(k, s, d).unwrap();
                        assert_eq!(lhs, BigRational::from(stahl_rhs(k, s, d).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn sign_vectors() {
        let g = GKGraph::build(GKParams::new(8, 4, 2).unwrap());
        let w = SignVectorAssignment::new(&g);
        for u in 0..w.len() {
            assert_eq!(w.vector(u).iter().filter(|&&x| x == 1).count(), 4);
            for v in 0..w.len() {
                let x = w.symmetric_difference(u, v) as i64;
                assert_eq!(w.inner_product(u, v), 8 - 2 * x);
                assert_eq!(w.normalized_inner_product(u, v), rat(8 - 2 * x, 8));
            }
        }
    }

    #[test]
    fn vector_coloring_small() {
        let g = GKGraph::build(GKParams::new(8, 4, 1).unwrap());
        let c = vector_coloring_check(&g);
        assert!(c.holds);
        assert_eq!(c.adjacent_pairs, 35);
        assert_eq!(c.min_symmetric_difference, Some(8));
        assert_eq!(c.max_inner_product.as_deref(), Some("-1"));
        // m = 3 lets |A△B| = 4 through
        let g = GKGraph::build(GKParams::new(8, 4, 3).unwrap());
        let c = vector_coloring_check(&g);
        assert!(!c.holds);
        let [u, v] = c.violation.unwrap();
        assert!(g.adjacent(u, v) && 4 * (g.mask(u) ^ g.mask(v)).count_ones() < 24);
    }

    #[test]
    fn crossover_values() {
        let r = BoundReport::new(6, 1);
        assert_eq!((r.r.to_string(), r.n.to_string(), r.r_below_n), ("22".into(), "20".into(), false));
        let r = BoundReport::new(12, 2);
        assert_eq!((r.r.to_string(), r.n.to_string(), r.r_below_n), ("794".into(), "924".into(), true));
        let r = BoundReport::new(16, 2);
        assert_eq!((r.r.to_string(), r.n.to_string(), r.r_below_n), ("14893".into(), "12870".into(), false));
        let r = BoundReport::new(18, 3);
        assert_eq!((r.r.to_string(), r.n.to_string()), ("31180".into(), "48620".into()));
        let reports = crossover_search(MRule::Ell(3), 60).unwrap();
        assert_eq!(reports.len(), 10);
        assert_eq!(minimal_crossover(&reports), Some(12));
        for rep in &reports {
            let p = GKParams::new(rep.d, rep.d / 2, rep.m).unwrap();
            assert_eq!(rep.r, BigUint::from(p.rank_bound()));
            assert_eq!(rep.n, BigUint::from(p.vertex_count()));
        }
        assert!(crossover_search(MRule::Eighth, 10_001).is_err());
        assert!(!crossover_search(MRule::Eighth, 16).unwrap()[1].r_below_n);
    }

    #[test]
    fn large_crossover_logs_finite() {
        let r = BoundReport::new(6000, 1000);
        assert!(r.r_below_n);
        assert!(r.delta > 0.0 && r.delta < 1.0 && r.entropy_log2.is_finite());
        assert!((log2_big(&r.n) - 5993.0).abs() < 10.0);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("ell:3".parse::<MRule>().unwrap(), MRule::Ell(3));
        assert_eq!("eighth".parse::<MRule>().unwrap(), MRule::Eighth);
        assert!("ell:4".parse::<MRule>().is_err());
        assert!("ell".parse::<MRule>().is_err());
        assert_eq!(MRule::Ell(5).to_string(), "ell:5");
    }

    #[test]
    fn claim_ids_serialize() {
        for c in [ClaimId::OddCycleFreeMinrank, ClaimId::TriangleFreeOd, ClaimId::Vchrom3Minrank] {
            assert_eq!(serde_json::to_value(c).unwrap(), serde_json::json!(c.as_str()));
        }
    }

    #[test]
    fn cycle_free_small_instances() {
        let guard = ResourceGuard::default();
        let c = cycle_free_certificate(3, 6, 2, None, &guard, None).unwrap();
        assert_eq!(c.verdict, Verdict::Verified);
        assert_eq!((c.measured.n, c.measured.rank_bound, c.measured.rank_bound_below_n), (20, 22, false));
        assert!(c.notes.iter().any(|n| n.contains("vacuous")));
        let c = cycle_free_certificate(5, 10, 3, None, &guard, None).unwrap();
        assert_eq!(c.params.m, 1);
        assert!(c.measured.degenerate);
        assert_eq!(c.verdict, Verdict::Verified);
        assert!(matches!(cycle_free_certificate(3, 10, 2, None, &guard, None), Err(ClaimError::Divisibility { .. })));
        assert!(cycle_free_certificate(4, 16, 2, None, &guard, None).is_err());
    }

    #[test]
    fn sampled_girth_is_inconclusive() {
        let mode = GirthMode::Sampled { samples: 3, size: 8, seed: 1 };
        let c = cycle_free_certificate(3, 6, 2, Some(mode), &ResourceGuard::default(), None).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn triangle_free_small() {
        let c = triangle_free_od_certificate(6, &ResourceGuard::default(), None).unwrap();
        assert_eq!(c.verdict, Verdict::Verified);
        assert_eq!(c.measured.factor_dim, c.measured.rank);
        assert!(matches!(triangle_free_od_certificate(8, &ResourceGuard::default(), None), Err(ClaimError::Divisibility { .. })));
    }

    #[test]
    fn vchrom_small() {
        let c = vchrom3_certificate(8, 2, &ResourceGuard::default(), None).unwrap();
        assert_eq!(c.verdict, Verdict::Verified);
        let vc = c.measured.vector_coloring.as_ref().unwrap();
        assert_eq!(vc.max_inner_product.as_deref(), Some("-1"));
        let r = c.measured.rank.unwrap() as u64;
        assert_eq!(c.measured.complement_minrank_lower, Some(70u64.div_ceil(r)));
    }

    #[test]
    fn content_digest_ignores_timestamp() {
        let mut c = vchrom3_certificate(8, 3, &ResourceGuard::default(), None).unwrap();
        let before = c.content_digest.clone();
        c.timestamp = "other".into();
        assert_eq!(c.compute_content_digest(), before);
        c.notes.push("x".into());
        assert_ne!(c.compute_content_digest(), before);
    }

    #[test]
    fn round_trip_and_reverify() {
        let dir = tempfile::tempdir().unwrap();
        let guard = ResourceGuard::default();
        let c = triangle_free_od_certificate(6, &guard, Some(dir.path())).unwrap();
        assert_eq!(c.artifacts.len(), 2);
        let path = c.write_to(dir.path()).unwrap();
        assert_eq!(Certificate::read_from(&path).unwrap(), c);
        let r = verify_certificate(&path, &guard).unwrap();
        assert!(r.consistent(), "{:?}", r.mismatches);

        // tamper with the matrix artifact
        let mpath = dir.path().join(&c.artifacts[0].path);
        let mut text = fs::read_to_string(&mpath).unwrap();
        text.push('\n');
        fs::write(&mpath, text).unwrap();
        let r = verify_certificate(&path, &guard).unwrap();
        assert!(!r.consistent());
    }
}
