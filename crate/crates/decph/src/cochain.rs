//! Typed cochain spaces. Every operator in the library is a `LinearMap`
//! carrying its domain and codomain descriptors, and every composition or
//! application checks them, so a cochain of the wrong kind or degree is a
//! runtime error with a readable message instead of a silent shape match.

use crate::error::{DecError, Result};
use crate::sparse;
use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which complex a cochain lives on: the primal complex, the interior dual,
/// the primal boundary, or the dual of the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Primal,
    Dual,
    PrimalBoundary,
    DualBoundary,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceKind::Primal => "primal",
            SpaceKind::Dual => "dual",
            SpaceKind::PrimalBoundary => "primal_boundary",
            SpaceKind::DualBoundary => "dual_boundary",
        };
        write!(f, "{}", s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CochainSpace {
    pub kind: SpaceKind,
    pub degree: usize,
    pub dim: usize,
}

impl CochainSpace {
    pub fn new(kind: SpaceKind, degree: usize, dim: usize) -> Self {
        CochainSpace { kind, degree, dim }
    }
}

impl fmt::Display for CochainSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} (dim {})", self.kind, self.degree, self.dim)
    }
}

/// A real-valued cochain: one value per cell of its space.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub space: CochainSpace,
    pub values: Vec<f64>,
}

impl Cochain {
    pub fn new(space: CochainSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.dim {
            return Err(DecError::SpaceMismatch {
                expected: space.to_string(),
                got: format!("vector of length {}", values.len()),
            });
        }
        Ok(Cochain { space, values })
    }

    pub fn zeros(space: CochainSpace) -> Self {
        Cochain {
            values: vec![0.0; space.dim],
            space,
        }
    }
}

/// A linear map between cochain spaces, stored sparse.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub domain: CochainSpace,
    pub codomain: CochainSpace,
    pub matrix: CsrMatrix<f64>,
}

impl LinearMap {
    pub fn new(domain: CochainSpace, codomain: CochainSpace, matrix: CsrMatrix<f64>) -> Self {
        assert_eq!(
            matrix.ncols(),
            domain.dim,
            "matrix columns must match domain dimension"
        );
        assert_eq!(
            matrix.nrows(),
            codomain.dim,
            "matrix rows must match codomain dimension"
        );
        LinearMap {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn identity(space: CochainSpace) -> Self {
        LinearMap::new(space, space, sparse::identity(space.dim))
    }

    pub fn zero(domain: CochainSpace, codomain: CochainSpace) -> Self {
        LinearMap::new(domain, codomain, sparse::zeros(codomain.dim, domain.dim))
    }

    pub fn apply(&self, x: &Cochain) -> Result<Cochain> {
        if x.space != self.domain {
            return Err(DecError::SpaceMismatch {
                expected: self.domain.to_string(),
                got: x.space.to_string(),
            });
        }
        Cochain::new(self.codomain, sparse::apply(&self.matrix, &x.values))
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        sparse::apply(&self.matrix, x)
    }

    /// self after other: (self.compose(other))(x) = self(other(x)).
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if other.codomain != self.domain {
            return Err(DecError::SpaceMismatch {
                expected: self.domain.to_string(),
                got: other.codomain.to_string(),
            });
        }
        Ok(LinearMap::new(
            other.domain,
            self.codomain,
            sparse::matmul(&self.matrix, &other.matrix),
        ))
    }

    /// Transpose of the matrix, re-typed to the stated spaces. The caller
    /// supplies the spaces because transposition moves between primal and
    /// dual complexes; dimensions are still checked.
    /// Same matrix, new space descriptors. For operators whose matrix acts
    /// across complexes, such as an identity from an effort space onto a
    /// rate space of the same dimension.
    pub fn retyped(&self, domain: CochainSpace, codomain: CochainSpace) -> LinearMap {
        assert_eq!(domain.dim, self.domain.dim, "retyped domain dimension");
        assert_eq!(codomain.dim, self.codomain.dim, "retyped codomain dimension");
        LinearMap::new(domain, codomain, self.matrix.clone())
    }

    pub fn transpose_retyped(&self, domain: CochainSpace, codomain: CochainSpace) -> LinearMap {
        assert_eq!(domain.dim, self.codomain.dim, "retyped domain dimension");
        assert_eq!(codomain.dim, self.domain.dim, "retyped codomain dimension");
        LinearMap::new(domain, codomain, sparse::transpose(&self.matrix))
    }

    pub fn scale(&self, factor: f64) -> LinearMap {
        LinearMap::new(
            self.domain,
            self.codomain,
            sparse::scale(&self.matrix, factor),
        )
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(DecError::SpaceMismatch {
                expected: format!("{} -> {}", self.domain, self.codomain),
                got: format!("{} -> {}", other.domain, other.codomain),
            });
        }
        Ok(LinearMap::new(
            self.domain,
            self.codomain,
            sparse::add(&self.matrix, &other.matrix),
        ))
    }
}

/// A linear map between direct sums of cochain spaces, stored as one
/// sparse matrix with slot offsets. This is the carrier for the canonical
/// and reduced structure maps, whose domains mix primal, dual and boundary
/// spaces.
#[derive(Debug, Clone)]
pub struct StackedMap {
    pub domain: Vec<CochainSpace>,
    pub codomain: Vec<CochainSpace>,
    pub matrix: CsrMatrix<f64>,
}

fn offsets(spaces: &[CochainSpace]) -> Vec<usize> {
    let mut out = Vec::with_capacity(spaces.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in spaces {
        acc += s.dim;
        out.push(acc);
    }
    out
}

pub fn stacked_dim(spaces: &[CochainSpace]) -> usize {
    spaces.iter().map(|s| s.dim).sum()
}

impl StackedMap {
    /// Assemble from blocks (codomain slot, domain slot, map). Slots not
    /// mentioned are zero. Every block's spaces must match its slots.
    pub fn from_blocks(
        domain: Vec<CochainSpace>,
        codomain: Vec<CochainSpace>,
        blocks: &[(usize, usize, &LinearMap)],
    ) -> Result<Self> {
        let row_off = offsets(&codomain);
        let col_off = offsets(&domain);
        let mut triplets = Vec::new();
        for &(ci, di, map) in blocks {
            if map.codomain != codomain[ci] || map.domain != domain[di] {
                return Err(DecError::SpaceMismatch {
                    expected: format!("{} -> {}", domain[di], codomain[ci]),
                    got: format!("{} -> {}", map.domain, map.codomain),
                });
            }
            for (r, c, v) in map.matrix.triplet_iter() {
                triplets.push((row_off[ci] + r, col_off[di] + c, *v));
            }
        }
        Ok(StackedMap {
            matrix: sparse::from_triplets(
                *row_off.last().unwrap(),
                *col_off.last().unwrap(),
                &triplets,
            ),
            domain,
            codomain,
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, stacked: &[f64]) -> Vec<f64> {
        sparse::apply(&self.matrix, stacked)
    }

    /// Split a stacked domain vector into cochains, one per slot.
    pub fn split_domain(&self, stacked: &[f64]) -> Result<Vec<Cochain>> {
        split(&self.domain, stacked)
    }

    pub fn split_codomain(&self, stacked: &[f64]) -> Result<Vec<Cochain>> {
        split(&self.codomain, stacked)
    }

    /// self after other.
    pub fn compose(&self, other: &StackedMap) -> Result<StackedMap> {
        if other.codomain != self.domain {
            return Err(DecError::SpaceMismatch {
                expected: self
                    .domain
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" + "),
                got: other
                    .codomain
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" + "),
            });
        }
        Ok(StackedMap {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: sparse::matmul(&self.matrix, &other.matrix),
        })
    }

    /// Extract one block as a typed map.
    pub fn block(&self, codomain_slot: usize, domain_slot: usize) -> LinearMap {
        let row_off = offsets(&self.codomain);
        let col_off = offsets(&self.domain);
        let (r0, r1) = (row_off[codomain_slot], row_off[codomain_slot + 1]);
        let (c0, c1) = (col_off[domain_slot], col_off[domain_slot + 1]);
        let triplets: Vec<(usize, usize, f64)> = self
            .matrix
            .triplet_iter()
            .filter(|(r, c, _)| *r >= r0 && *r < r1 && *c >= c0 && *c < c1)
            .map(|(r, c, v)| (r - r0, c - c0, *v))
            .collect();
        LinearMap::new(
            self.domain[domain_slot],
            self.codomain[codomain_slot],
            sparse::from_triplets(r1 - r0, c1 - c0, &triplets),
        )
    }
}

/// Concatenate slot cochains into one stacked vector.
pub fn stack(cochains: &[&Cochain]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cochains.iter().map(|c| c.values.len()).sum());
    for c in cochains {
        out.extend_from_slice(&c.values);
    }
    out
}

pub fn split(spaces: &[CochainSpace], stacked: &[f64]) -> Result<Vec<Cochain>> {
    if stacked.len() != stacked_dim(spaces) {
        return Err(DecError::SpaceMismatch {
            expected: format!("stacked vector of length {}", stacked_dim(spaces)),
            got: format!("length {}", stacked.len()),
        });
    }
    let mut out = Vec::with_capacity(spaces.len());
    let mut pos = 0;
    for &s in spaces {
        out.push(Cochain::new(s, stacked[pos..pos + s.dim].to_vec())?);
        pos += s.dim;
    }
    Ok(out)
}
