//! Oriented simplicial complexes for n in {1, 2} with circumcentric duals.
//!
//! Simplices of each degree are stored as sorted vertex tuples in
//! lexicographic order, with an orientation sign relative to the sorted
//! tuple: lower-degree simplices are oriented by their sorted tuple
//! (sign +1), top simplices carry the builder's orientation. The signed
//! incidence entry between a face and a cosimplex is (-1)^i o(face) o(cell)
//! where i is the position of the removed vertex in the sorted tuple.
//!
//! Dual cells are circumcentric and truncated at the boundary: the dual of
//! a k-simplex is assembled from elementary pieces spanned by circumcenters
//! of the simplices above it, so cells of boundary simplices simply have
//! fewer pieces. Dual 0-cells (duals of top simplices) carry measure 1.

mod interval;
mod io;
mod strip;
mod validate;

pub use interval::build_interval_complex;
pub use io::{read_mesh_file, write_mesh_file, MeshFile};
pub use strip::build_triangle_strip_complex;
pub use validate::{validate_complex, CheckResult, ValidationReport};

use crate::error::{DecError, Result};
use crate::sparse;
use nalgebra_sparse::CsrMatrix;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ComplexSkeleton {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    /// simplices[k] = sorted vertex tuples of the k-simplices, lex order.
    simplices: Vec<Vec<Vec<usize>>>,
    /// orientations[k][i] = +-1, the sign of simplex i relative to its
    /// sorted tuple.
    orientations: Vec<Vec<f64>>,
    /// incidence[k] = signed boundary matrix of (k+1)-simplices over
    /// k-simplices.
    incidence: Vec<CsrMatrix<f64>>,
    circumcenters: Vec<Vec<Vec<f64>>>,
    primal_measures: Vec<Vec<f64>>,
    /// dual_measures[k][i] = measure of the (truncated) dual (n-k)-cell of
    /// k-simplex i.
    dual_measures: Vec<Vec<f64>>,
    /// boundary_flags[k][i] = true iff k-simplex i lies on the boundary,
    /// for k < n.
    boundary_flags: Vec<Vec<bool>>,
    /// boundary_cells[k] = sorted indices of the boundary k-simplices.
    boundary_cells: Vec<Vec<usize>>,
}

impl ComplexSkeleton {
    /// Build the full skeleton from oriented top simplices. 1D top
    /// simplices are edges oriented as given; 2D top simplices are
    /// triangles whose given vertex order fixes their orientation.
    pub fn from_simplices(
        dim: usize,
        vertices: Vec<Vec<f64>>,
        top_simplices: &[Vec<usize>],
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(DecError::InvalidArgument(format!(
                "complex dimension must be 1 or 2, got {}",
                dim
            )));
        }
        if vertices.is_empty() {
            return Err(DecError::InvalidMesh("no vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(DecError::InvalidMesh(format!(
                    "vertex {} has {} coordinates, expected {}",
                    i,
                    v.len(),
                    dim
                )));
            }
        }
        if top_simplices.is_empty() {
            return Err(DecError::InvalidMesh("no top simplices".into()));
        }
        let nverts = vertices.len();
        for t in top_simplices {
            if t.len() != dim + 1 {
                return Err(DecError::InvalidMesh(format!(
                    "top simplex {:?} has {} vertices, expected {}",
                    t,
                    t.len(),
                    dim + 1
                )));
            }
            for &v in t {
                if v >= nverts {
                    return Err(DecError::InvalidMesh(format!(
                        "simplex {:?} references missing vertex {}",
                        t, v
                    )));
                }
            }
            let mut sorted = t.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != dim + 1 {
                return Err(DecError::InvalidMesh(format!(
                    "degenerate simplex {:?}",
                    t
                )));
            }
        }

        // Canonicalize top simplices: sorted tuple + permutation parity.
        let mut top: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for t in top_simplices {
            let (sorted, sign) = canonicalize(t);
            if top.insert(sorted, sign).is_some() {
                return Err(DecError::InvalidMesh(format!(
                    "duplicate top simplex {:?}",
                    t
                )));
            }
        }

        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
        let mut orientations: Vec<Vec<f64>> = vec![Vec::new(); dim + 1];
        for (tuple, sign) in &top {
            simplices[dim].push(tuple.clone());
            orientations[dim].push(*sign);
        }
        // Lower skeletons: all faces, sorted tuples, lex order, sign +1.
        for k in (0..dim).rev() {
            let mut faces: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
            for tuple in &simplices[k + 1] {
                for i in 0..tuple.len() {
                    let mut face = tuple.clone();
                    face.remove(i);
                    faces.insert(face, ());
                }
            }
            simplices[k] = faces.into_keys().collect();
            orientations[k] = vec![1.0; simplices[k].len()];
        }
        if simplices[0].len() != nverts {
            return Err(DecError::InvalidMesh(format!(
                "{} of {} vertices are used by simplices",
                simplices[0].len(),
                nverts
            )));
        }

        // Signed incidence matrices.
        let mut incidence = Vec::new();
        for k in 0..dim {
            let index: BTreeMap<&[usize], usize> = simplices[k]
                .iter()
                .enumerate()
                .map(|(i, t)| (t.as_slice(), i))
                .collect();
            let mut triplets = Vec::new();
            for (col, tuple) in simplices[k + 1].iter().enumerate() {
                let o_cell = orientations[k + 1][col];
                for i in 0..tuple.len() {
                    let mut face = tuple.clone();
                    face.remove(i);
                    let row = index[face.as_slice()];
                    let o_face = orientations[k][row];
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    triplets.push((row, col, sign * o_cell * o_face));
                }
            }
            incidence.push(sparse::from_triplets(
                simplices[k].len(),
                simplices[k + 1].len(),
                &triplets,
            ));
        }

        // Boundary identification: (n-1)-simplices with exactly one
        // cosimplex, then their faces.
        let mut boundary_flags: Vec<Vec<bool>> = simplices[..dim]
            .iter()
            .map(|level| vec![false; level.len()])
            .collect();
        {
            let top_inc = &incidence[dim - 1];
            let mut counts = vec![0usize; simplices[dim - 1].len()];
            for (r, _, _) in top_inc.triplet_iter() {
                counts[r] += 1;
            }
            for (i, &c) in counts.iter().enumerate() {
                if c == 1 {
                    boundary_flags[dim - 1][i] = true;
                } else if c != 2 {
                    return Err(DecError::InvalidMesh(format!(
                        "face {} is incident to {} top simplices; \
                         the complex is not manifold-like",
                        i, c
                    )));
                }
            }
            if dim == 2 {
                let index: BTreeMap<&[usize], usize> = simplices[0]
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (t.as_slice(), i))
                    .collect();
                for (i, tuple) in simplices[1].iter().enumerate() {
                    if boundary_flags[1][i] {
                        for &v in tuple {
                            boundary_flags[0][index[[v].as_slice()]] = true;
                        }
                    }
                }
            }
        }
        let boundary_cells: Vec<Vec<usize>> = boundary_flags
            .iter()
            .map(|flags| {
                flags
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        if boundary_cells[dim - 1].is_empty() {
            return Err(DecError::InvalidMesh(
                "complex has empty boundary; boundary ports need one".into(),
            ));
        }

        // Circumcenters and primal measures.
        let mut circumcenters: Vec<Vec<Vec<f64>>> = Vec::new();
        let mut primal_measures: Vec<Vec<f64>> = Vec::new();
        for level in &simplices {
            let mut centers = Vec::new();
            let mut measures = Vec::new();
            for tuple in level {
                let pts: Vec<&[f64]> = tuple.iter().map(|&v| vertices[v].as_slice()).collect();
                centers.push(circumcenter(&pts)?);
                measures.push(simplex_measure(&pts));
            }
            circumcenters.push(centers);
            primal_measures.push(measures);
        }

        // Dual measures from elementary pieces: for every ascending chain
        // of simplices above a k-simplex, the span of their circumcenters.
        let mut dual_measures: Vec<Vec<f64>> = simplices
            .iter()
            .map(|level| vec![0.0; level.len()])
            .collect();
        dual_measures[dim].fill(1.0);
        if dim >= 1 {
            // Dual of (n-1)-simplices: distance from their circumcenter to
            // the circumcenter of each incident top simplex.
            for (row, col, _) in incidence[dim - 1].triplet_iter() {
                let a = &circumcenters[dim - 1][row];
                let b = &circumcenters[dim][col];
                dual_measures[dim - 1][row] += distance(a, b);
            }
        }
        if dim == 2 {
            // Dual of vertices: triangles (vertex, edge circumcenter,
            // triangle circumcenter) over incident chains.
            let vertex_index: BTreeMap<&[usize], usize> = simplices[0]
                .iter()
                .enumerate()
                .map(|(i, t)| (t.as_slice(), i))
                .collect();
            for (edge_row, tri_col, _) in incidence[1].triplet_iter() {
                let ce = &circumcenters[1][edge_row];
                let ct = &circumcenters[2][tri_col];
                for &v in &simplices[1][edge_row] {
                    let vi = vertex_index[[v].as_slice()];
                    let pts = [vertices[v].as_slice(), ce.as_slice(), ct.as_slice()];
                    dual_measures[0][vi] += triangle_area(&pts);
                }
            }
        }

        Ok(ComplexSkeleton {
            dim,
            vertices,
            simplices,
            orientations,
            incidence,
            circumcenters,
            primal_measures,
            dual_measures,
            boundary_flags,
            boundary_cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplex_count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn orientations(&self, k: usize) -> &[f64] {
        &self.orientations[k]
    }

    /// Signed boundary matrix of (k+1)-simplices over k-simplices.
    pub fn incidence(&self, k: usize) -> &CsrMatrix<f64> {
        &self.incidence[k]
    }

    pub fn circumcenters(&self, k: usize) -> &[Vec<f64>] {
        &self.circumcenters[k]
    }

    pub fn primal_measures(&self, k: usize) -> &[f64] {
        &self.primal_measures[k]
    }

    pub fn dual_measures(&self, k: usize) -> &[f64] {
        &self.dual_measures[k]
    }

    pub fn boundary_flags(&self, k: usize) -> &[bool] {
        &self.boundary_flags[k]
    }

    /// Indices of boundary k-simplices, ascending. Defined for k < dim.
    pub fn boundary_cells(&self, k: usize) -> &[usize] {
        &self.boundary_cells[k]
    }

    /// Number of boundary k-simplices; also the dimension of the
    /// dual-boundary space of degree n-1-k.
    pub fn boundary_count(&self, k: usize) -> usize {
        self.boundary_cells.get(k).map_or(0, Vec::len)
    }

    /// For each boundary (n-1)-simplex, the index of its unique incident
    /// top simplex. This identification realizes the trace of dual
    /// 0-cochains onto the dual boundary.
    pub fn boundary_adjacent_top(&self) -> Vec<usize> {
        let inc = &self.incidence[self.dim - 1];
        let mut adjacent = Vec::with_capacity(self.boundary_cells[self.dim - 1].len());
        for &face in &self.boundary_cells[self.dim - 1] {
            let row = inc.row(face);
            debug_assert_eq!(row.nnz(), 1);
            adjacent.push(row.col_indices()[0]);
        }
        adjacent
    }
}

/// Sort a vertex tuple and report the permutation parity as a sign.
fn canonicalize(tuple: &[usize]) -> (Vec<usize>, f64) {
    let mut t = tuple.to_vec();
    let mut sign = 1.0;
    // Insertion sort with swap counting; tuples have at most 3 entries.
    for i in 1..t.len() {
        let mut j = i;
        while j > 0 && t[j - 1] > t[j] {
            t.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    (t, sign)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn triangle_area(pts: &[&[f64]; 3]) -> f64 {
    let ux = pts[1][0] - pts[0][0];
    let uy = pts[1][1] - pts[0][1];
    let vx = pts[2][0] - pts[0][0];
    let vy = pts[2][1] - pts[0][1];
    0.5 * (ux * vy - uy * vx).abs()
}

/// Signed area of a triangle in its given vertex order (positive when
/// counterclockwise).
pub(crate) fn signed_area(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let ux = b[0] - a[0];
    let uy = b[1] - a[1];
    let vx = c[0] - a[0];
    let vy = c[1] - a[1];
    0.5 * (ux * vy - uy * vx)
}

fn simplex_measure(pts: &[&[f64]]) -> f64 {
    match pts.len() {
        1 => 1.0,
        2 => distance(pts[0], pts[1]),
        3 => triangle_area(&[pts[0], pts[1], pts[2]]),
        _ => unreachable!("simplices have at most 3 vertices"),
    }
}

fn circumcenter(pts: &[&[f64]]) -> Result<Vec<f64>> {
    match pts.len() {
        1 => Ok(pts[0].to_vec()),
        2 => Ok(pts[0]
            .iter()
            .zip(pts[1])
            .map(|(a, b)| 0.5 * (a + b))
            .collect()),
        3 => {
            let (ax, ay) = (pts[0][0], pts[0][1]);
            let (bx, by) = (pts[1][0], pts[1][1]);
            let (cx, cy) = (pts[2][0], pts[2][1]);
            let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
            if d.abs() < 1e-14 {
                return Err(DecError::NotWellCentered(format!(
                    "collinear triangle vertices near ({}, {})",
                    ax, ay
                )));
            }
            let a2 = ax * ax + ay * ay;
            let b2 = bx * bx + by * by;
            let c2 = cx * cx + cy * cy;
            let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
            let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
            Ok(vec![ux, uy])
        }
        _ => unreachable!("simplices have at most 3 vertices"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_tracks_parity() {
        assert_eq!(canonicalize(&[1, 2, 3]), (vec![1, 2, 3], 1.0));
        assert_eq!(canonicalize(&[2, 1, 3]), (vec![1, 2, 3], -1.0));
        assert_eq!(canonicalize(&[3, 1, 2]), (vec![1, 2, 3], 1.0));
        assert_eq!(canonicalize(&[5, 1]), (vec![1, 5], -1.0));
    }

    #[test]
    fn rejects_degenerate_and_dangling() {
        let verts = vec![vec![0.0], vec![1.0]];
        assert!(ComplexSkeleton::from_simplices(1, verts.clone(), &[vec![0, 0]]).is_err());
        assert!(ComplexSkeleton::from_simplices(1, verts.clone(), &[vec![0, 5]]).is_err());
        let three = vec![vec![0.0], vec![1.0], vec![2.0]];
        // Vertex 2 unused by any simplex.
        assert!(ComplexSkeleton::from_simplices(1, three, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn interval_incidence_signs() {
        let verts = vec![vec![0.0], vec![0.5], vec![1.0]];
        let c = ComplexSkeleton::from_simplices(1, verts, &[vec![0, 1], vec![1, 2]]).unwrap();
        let d = crate::sparse::to_dense(c.incidence(0));
        // Edge [a,b] has -1 at a, +1 at b.
        assert_eq!(d[(0, 0)], -1.0);
        assert_eq!(d[(1, 0)], 1.0);
        assert_eq!(d[(1, 1)], -1.0);
        assert_eq!(d[(2, 1)], 1.0);
        assert_eq!(c.boundary_cells(0), &[0, 2]);
        assert_eq!(c.boundary_adjacent_top(), vec![0, 1]);
    }

    #[test]
    fn circumcenter_of_equilateral_is_centroid() {
        let h = 3.0_f64.sqrt() / 2.0;
        let pts: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]];
        let c = circumcenter(&pts).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-12);
        assert!((c[1] - h / 3.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_orientation_sign_enters_incidence() {
        // One ccw triangle given as (0, 2, 1) relative to sorted (0, 1, 2):
        // odd permutation, so the stored orientation is -1 and boundary
        // signs flip relative to the sorted tuple.
        let verts = vec![vec![0.0, 0.0], vec![0.5, 3.0_f64.sqrt() / 2.0], vec![1.0, 0.0]];
        let c = ComplexSkeleton::from_simplices(2, verts, &[vec![0, 2, 1]]).unwrap();
        assert_eq!(c.orientations(2), &[-1.0]);
        let d2 = crate::sparse::to_dense(c.incidence(1));
        // Sorted faces of (0,1,2): [1,2] sign +1, [0,2] sign -1, [0,1] +1,
        // all times the -1 orientation.
        let edges = c.simplices(1);
        for (i, e) in edges.iter().enumerate() {
            let expected = match e.as_slice() {
                [1, 2] => -1.0,
                [0, 2] => 1.0,
                [0, 1] => -1.0,
                _ => panic!("unexpected edge {:?}", e),
            };
            assert_eq!(d2[(i, 0)], expected);
        }
    }
}
