//! Exact subspace constructions over the rationals: vectors avoiding a finite
//! union of proper subspaces (via the moment curve), subspaces meeting a
//! family in prescribed dimensions, and subspaces avoiding a family.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{membership, parse_rational, RationalMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("a vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("subspace {index} of the collection contains U")]
    CoveringCollection { index: usize },
    #[error("no uncovered point among the first {bound} curve points")]
    ScanBoundExceeded { bound: u64 },
    #[error("U is the zero subspace")]
    ZeroSubspace,
    #[error("subspace {index} of the collection is not contained in U")]
    NotContained { index: usize },
    #[error("requested dimension {requested} exceeds dim U = {dim}")]
    TargetDimension { requested: usize, dim: usize },
    #[error("dim(U ∩ W) = {found} exceeds {limit} for subspace {index}")]
    PreconditionViolated { index: usize, found: usize, limit: usize },
    #[error("bad subspace JSON: {0}")]
    Parse(String),
}

/// A subspace of `Q^ambient`, stored as its reduced row-echelon basis so
/// equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix,
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient: usize,
    basis: Vec<Vec<String>>,
}

impl Subspace {
    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: &[Vec<BigRational>]) -> Result<Self, SubspaceError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(SubspaceError::VectorLength { expected: ambient, found: v.len() });
        }
        let m = RationalMatrix::from_row_vecs(ambient, vectors).expect("lengths checked");
        Ok(Subspace { ambient, basis: m.rref().0 })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: RationalMatrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        let id: Vec<Vec<BigRational>> = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        Self::span(ambient, &id).expect("square identity")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Echelon basis rows.
    pub fn basis(&self) -> Vec<Vec<BigRational>> {
        self.basis.row_vecs()
    }

    pub fn contains(&self, v: &[BigRational]) -> Result<bool, SubspaceError> {
        if v.len() != self.ambient {
            return Err(SubspaceError::VectorLength { expected: self.ambient, found: v.len() });
        }
        Ok(membership(v, &self.basis).expect("lengths checked"))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool, SubspaceError> {
        self.same_ambient(other)?;
        Ok(self.sum(other)?.dim() == self.dim())
    }

    fn same_ambient(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.ambient != other.ambient {
            return Err(SubspaceError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.same_ambient(other)?;
        let stacked = self.basis.vstack(&other.basis).expect("same width");
        Ok(Subspace { ambient: self.ambient, basis: stacked.rref().0 })
    }

    /// Zassenhaus: reduce `[[V1, V1], [V2, 0]]`; rows whose left half
    /// vanishes carry a basis of the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.same_ambient(other)?;
        let t = self.ambient;
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(self.dim() + other.dim());
        for r in self.basis.row_vecs() {
            rows.push(r.iter().chain(r.iter()).cloned().collect());
        }
        for r in other.basis.row_vecs() {
            rows.push(r.into_iter().chain(std::iter::repeat_n(BigRational::zero(), t)).collect());
        }
        let (echelon, _) = RationalMatrix::from_row_vecs(2 * t, &rows).expect("uniform width").rref();
        let inter: Vec<Vec<BigRational>> = echelon
            .row_vecs()
            .into_iter()
            .filter(|r| r[..t].iter().all(Zero::is_zero))
            .map(|r| r[t..].to_vec())
            .collect();
        Subspace::span(t, &inter)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let basis = self.basis.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        serde_json::to_value(SubspaceJson { ambient: self.ambient, basis }).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, SubspaceError> {
        let parsed: SubspaceJson = serde_json::from_value(v.clone()).map_err(|e| SubspaceError::Parse(e.to_string()))?;
        let rows = parsed
            .basis
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| parse_rational(x).ok_or_else(|| SubspaceError::Parse(format!("bad rational `{x}`"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::span(parsed.ambient, &rows)
    }
}

/// Result of the moment-curve scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uncovered {
    pub vector: Vec<BigRational>,
    /// Curve parameter of the returned point.
    pub alpha: u64,
    /// Curve points examined, including the returned one.
    pub candidates: u64,
    /// `|W| (dim U - 1) + 1`.
    pub bound: u64,
}

/// Finds `u in U` outside every member of `family`, scanning the points
/// `sum_j alpha^j b_j` (echelon basis `b_j` of `U`) for `alpha = 0, 1, ..`.
/// For each `W` with `U ∩ W` proper, membership is the vanishing of a nonzero
/// polynomial of degree `< dim U` in `alpha`, so some point among the first
/// `|W| (dim U - 1) + 1` works.
pub fn uncovered_vector(u: &Subspace, family: &[Subspace]) -> Result<Uncovered, SubspaceError> {
    for w in family {
        u.same_ambient(w)?;
    }
    if u.dim() == 0 {
        return Err(SubspaceError::ZeroSubspace);
    }
    for (index, w) in family.iter().enumerate() {
        if w.contains_subspace(u)? {
            return Err(SubspaceError::CoveringCollection { index });
        }
    }
    let basis = u.basis();
    let bound = family.len() as u64 * (basis.len() as u64 - 1) + 1;
    for alpha in 0..bound {
        let a = BigRational::from_integer(alpha.into());
        let mut point = vec![BigRational::zero(); u.ambient];
        let mut power = BigRational::one();
        for b in &basis {
            for (x, y) in point.iter_mut().zip(b) {
                *x += &power * y;
            }
            power *= &a;
        }
        let mut covered = false;
        for w in family {
            if w.contains(&point)? {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok(Uncovered { vector: point, alpha, candidates: alpha + 1, bound });
        }
    }
    Err(SubspaceError::ScanBoundExceeded { bound })
}

/// Builds `U' ⊆ U` with `dim U' = target` and
/// `dim(U' ∩ W) = max(0, dim W + target - dim U)` for every `W` in `family`
/// (each a subspace of `U`). `U'` grows one vector at a time; each new
/// vector avoids `U'` itself and every `U' + W` that is still proper in `U`.
pub fn graded_subspace(u: &Subspace, family: &[Subspace], target: usize) -> Result<Subspace, SubspaceError> {
    if target > u.dim() {
        return Err(SubspaceError::TargetDimension { requested: target, dim: u.dim() });
    }
    for (index, w) in family.iter().enumerate() {
        if !u.contains_subspace(w)? {
            return Err(SubspaceError::NotContained { index });
        }
    }
    let mut current = Subspace::zero(u.ambient);
    while current.dim() < target {
        let mut avoid = vec![current.clone()];
        for w in family {
            let joined = current.sum(w)?;
            if joined.dim() < u.dim() {
                avoid.push(joined);
            }
        }
        let next = uncovered_vector(u, &avoid)?;
        current = current.sum(&Subspace::span(u.ambient, &[next.vector])?)?;
    }
    Ok(current)
}

/// Builds `U' ⊆ U` of dimension `dim U - limit` meeting every `W` in
/// `family` trivially, given `dim(U ∩ W) <= limit` for each.
pub fn avoiding_subspace(u: &Subspace, family: &[Subspace], limit: usize) -> Result<Subspace, SubspaceError> {
    if limit > u.dim() {
        return Err(SubspaceError::TargetDimension { requested: limit, dim: u.dim() });
    }
    let mut inside = Vec::with_capacity(family.len());
    for (index, w) in family.iter().enumerate() {
        let meet = u.intersect(w)?;
        if meet.dim() > limit {
            return Err(SubspaceError::PreconditionViolated { index, found: meet.dim(), limit });
        }
        inside.push(meet);
    }
    graded_subspace(u, &inside, u.dim() - limit)
}
