//! Discrete operators as typed linear maps.
//!
//! Cochains are integrated quantities, so the duality pairing between
//! complementary primal and dual cochains is the plain dot product of
//! value vectors, graded by (-1)^{ab} when the dual argument is written
//! first. The dual exterior derivative and the boundary derivative are
//! signed transposes of the primal derivative and the trace:
//!
//!   d_i^m = (-1)^{n-m} (d^{n-m-1})^T      on interior-dual m-cochains,
//!   d_b^m = (-1)^{n-m-1} (tr^{n-m-1})^T   on dual-boundary m-cochains.
//!
//! Dual m-cells are the (truncated) duals of primal (n-m)-simplices, and
//! dual-boundary m-cells are the duals, inside the boundary complex, of
//! boundary (n-1-m)-simplices; both are index-identified with their primal
//! counterparts, which is what makes the transposes well-typed.

use crate::cochain::{Cochain, CochainSpace, LinearMap, SpaceKind};
use crate::error::{DecError, Result};
use crate::mesh::ComplexSkeleton;
use crate::sign;
use crate::sparse;

/// The cochain space of the given kind and degree over a complex.
pub fn space(c: &ComplexSkeleton, kind: SpaceKind, degree: usize) -> Result<CochainSpace> {
    let n = c.dim();
    let dim = match kind {
        SpaceKind::Primal => {
            if degree > n {
                return Err(DecError::DegreeOutOfRange { degree, dim: n });
            }
            c.simplex_count(degree)
        }
        SpaceKind::Dual => {
            if degree > n {
                return Err(DecError::DegreeOutOfRange { degree, dim: n });
            }
            c.simplex_count(n - degree)
        }
        SpaceKind::PrimalBoundary => {
            if degree >= n {
                return Err(DecError::DegreeOutOfRange { degree, dim: n });
            }
            c.boundary_count(degree)
        }
        SpaceKind::DualBoundary => {
            if degree >= n {
                return Err(DecError::DegreeOutOfRange { degree, dim: n });
            }
            c.boundary_count(n - 1 - degree)
        }
    };
    Ok(CochainSpace::new(kind, degree, dim))
}

/// d^k: primal k -> primal k+1, the transpose of the signed incidence of
/// (k+1)-simplices over k-simplices.
pub fn exterior_derivative(c: &ComplexSkeleton, k: usize) -> Result<LinearMap> {
    let n = c.dim();
    if k >= n {
        return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
    }
    Ok(LinearMap::new(
        space(c, SpaceKind::Primal, k)?,
        space(c, SpaceKind::Primal, k + 1)?,
        sparse::transpose(c.incidence(k)),
    ))
}

/// d_i^{n-q}: interior-dual (n-q) -> interior-dual (n-q+1), equal to
/// (-1)^q (d^{n-p})^T with p + q = n + 1.
pub fn dual_exterior_derivative(c: &ComplexSkeleton, n_minus_q: usize, q: usize) -> Result<LinearMap> {
    let n = c.dim();
    if n_minus_q + q != n || q == 0 || q > n {
        return Err(DecError::InvalidArgument(format!(
            "inconsistent dual-derivative degrees: n-q = {}, q = {}, n = {}",
            n_minus_q, q, n
        )));
    }
    let m = n_minus_q;
    let d = exterior_derivative(c, n - m - 1)?;
    let retyped = d.transpose_retyped(
        space(c, SpaceKind::Dual, m)?,
        space(c, SpaceKind::Dual, m + 1)?,
    );
    Ok(retyped.scale(sign::sign_dual_derivative(n, m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Primal,
    Dual,
}

/// tr^k: restriction of k-cochains to boundary k-cells.
///
/// The primal trace selects the values on boundary k-simplices. The dual
/// trace exists canonically only at degree 0, where each dual-boundary
/// 0-cell is the boundary point of the dual of the unique top simplex
/// behind the corresponding boundary face; higher dual degrees admit no
/// single-cell selection and are rejected.
pub fn trace_map(c: &ComplexSkeleton, k: usize, kind: TraceKind) -> Result<LinearMap> {
    let n = c.dim();
    match kind {
        TraceKind::Primal => {
            if k >= n {
                return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
            }
            if c.boundary_count(k) == 0 {
                return Err(DecError::InvalidArgument(format!(
                    "no boundary cells of degree {}",
                    k
                )));
            }
            let triplets: Vec<(usize, usize, f64)> = c
                .boundary_cells(k)
                .iter()
                .enumerate()
                .map(|(row, &cell)| (row, cell, 1.0))
                .collect();
            Ok(LinearMap::new(
                space(c, SpaceKind::Primal, k)?,
                space(c, SpaceKind::PrimalBoundary, k)?,
                sparse::from_triplets(c.boundary_count(k), c.simplex_count(k), &triplets),
            ))
        }
        TraceKind::Dual => {
            if k != 0 {
                return Err(DecError::InvalidArgument(format!(
                    "dual trace is canonical only at degree 0 \
                     (each boundary face has a unique adjacent top simplex); got {}",
                    k
                )));
            }
            let triplets: Vec<(usize, usize, f64)> = c
                .boundary_adjacent_top()
                .iter()
                .enumerate()
                .map(|(row, &top)| (row, top, 1.0))
                .collect();
            Ok(LinearMap::new(
                space(c, SpaceKind::Dual, 0)?,
                space(c, SpaceKind::DualBoundary, 0)?,
                sparse::from_triplets(
                    c.boundary_count(n - 1),
                    c.simplex_count(n),
                    &triplets,
                ),
            ))
        }
    }
}

/// d_b^{n-q}: dual-boundary (n-q) -> interior-dual (n-q+1), equal to
/// (-1)^{n-p} (tr^{n-p})^T with p + q = n + 1.
pub fn boundary_dual_derivative(c: &ComplexSkeleton, n_minus_q: usize) -> Result<LinearMap> {
    let n = c.dim();
    if n_minus_q >= n {
        return Err(DecError::InvalidArgument(format!(
            "inconsistent boundary-derivative degree: n-q = {}, n = {}",
            n_minus_q, n
        )));
    }
    let m = n_minus_q;
    let tr = trace_map(c, n - m - 1, TraceKind::Primal)?;
    let retyped = tr.transpose_retyped(
        space(c, SpaceKind::DualBoundary, m)?,
        space(c, SpaceKind::Dual, m + 1)?,
    );
    Ok(retyped.scale(sign::sign_boundary_derivative(n, m)))
}

/// Hodge star: primal k -> interior-dual n-k, diagonal with entries
/// dual measure / primal measure.
pub fn hodge_star(c: &ComplexSkeleton, k: usize) -> Result<LinearMap> {
    let n = c.dim();
    if k > n {
        return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
    }
    let mut entries = Vec::with_capacity(c.simplex_count(k));
    for (i, (&p, &d)) in c
        .primal_measures(k)
        .iter()
        .zip(c.dual_measures(k))
        .enumerate()
    {
        if !(p > 0.0) {
            return Err(DecError::Singular(format!(
                "primal {}-simplex {} has non-positive measure {}",
                k, i, p
            )));
        }
        entries.push(d / p);
    }
    Ok(LinearMap::new(
        space(c, SpaceKind::Primal, k)?,
        space(c, SpaceKind::Dual, n - k)?,
        sparse::diagonal(&entries),
    ))
}

/// Inverse-direction Hodge star: interior-dual n-k -> primal k, diagonal
/// with entries primal measure / dual measure.
pub fn hodge_star_dual(c: &ComplexSkeleton, k: usize) -> Result<LinearMap> {
    let n = c.dim();
    if k > n {
        return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
    }
    let mut entries = Vec::with_capacity(c.simplex_count(k));
    for (i, (&p, &d)) in c
        .primal_measures(k)
        .iter()
        .zip(c.dual_measures(k))
        .enumerate()
    {
        if !(d > 0.0) {
            return Err(DecError::Singular(format!(
                "dual cell of {}-simplex {} has non-positive measure {}",
                k, i, d
            )));
        }
        entries.push(p / d);
    }
    Ok(LinearMap::new(
        space(c, SpaceKind::Dual, n - k)?,
        space(c, SpaceKind::Primal, k)?,
        sparse::diagonal(&entries),
    ))
}

/// Discrete wedge pairing of complementary cochains over the complex or
/// its boundary: the dot product of value vectors, times (-1)^{ab} when
/// the dual-kind argument is written first.
pub fn duality_pairing(n: usize, a: &Cochain, b: &Cochain) -> Result<f64> {
    let mismatch = || DecError::SpaceMismatch {
        expected: format!("complementary spaces over an {}-complex", n),
        got: format!("{} and {}", a.space, b.space),
    };
    let (primal_first, degree_sum_target) = match (a.space.kind, b.space.kind) {
        (SpaceKind::Primal, SpaceKind::Dual) => (true, n),
        (SpaceKind::Dual, SpaceKind::Primal) => (false, n),
        (SpaceKind::PrimalBoundary, SpaceKind::DualBoundary) => (true, n - 1),
        (SpaceKind::DualBoundary, SpaceKind::PrimalBoundary) => (false, n - 1),
        _ => return Err(mismatch()),
    };
    if a.space.degree + b.space.degree != degree_sum_target || a.space.dim != b.space.dim {
        return Err(mismatch());
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    let grade = if primal_first {
        1.0
    } else {
        sign::wedge_swap_sign(a.space.degree, b.space.degree)
    };
    Ok(grade * dot)
}
