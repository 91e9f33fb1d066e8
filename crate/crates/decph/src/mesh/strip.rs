use super::{signed_area, ComplexSkeleton};
use crate::error::{DecError, Result};

/// Structured strip of equilateral triangles: rows x cols rhombic cells,
/// two counterclockwise triangles each. Vertex rows alternate a half-edge
/// horizontal offset so every triangle is equilateral, hence well-centered.
pub fn build_triangle_strip_complex(
    rows: usize,
    cols: usize,
    edge_len: f64,
) -> Result<ComplexSkeleton> {
    if rows == 0 || cols == 0 {
        return Err(DecError::InvalidArgument(
            "strip needs rows >= 1 and cols >= 1".into(),
        ));
    }
    if !(edge_len > 0.0) || !edge_len.is_finite() {
        return Err(DecError::InvalidArgument(format!(
            "edge length must be positive and finite, got {}",
            edge_len
        )));
    }
    let row_height = edge_len * 3.0_f64.sqrt() / 2.0;
    let per_row = cols + 1;
    let mut vertices = Vec::with_capacity((rows + 1) * per_row);
    for i in 0..=rows {
        let offset = if i % 2 == 0 { 0.0 } else { 0.5 * edge_len };
        for j in 0..per_row {
            vertices.push(vec![j as f64 * edge_len + offset, i as f64 * row_height]);
        }
    }
    let vid = |i: usize, j: usize| i * per_row + j;
    let mut triangles = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let (a, b, c, d) = (vid(i, j), vid(i, j + 1), vid(i + 1, j), vid(i + 1, j + 1));
            if i % 2 == 0 {
                // Upper row shifted right: apex of the up-triangle is c.
                triangles.push(vec![a, b, c]);
                triangles.push(vec![b, d, c]);
            } else {
                // Lower row shifted right: apex of the down-triangle is a.
                triangles.push(vec![a, d, c]);
                triangles.push(vec![a, b, d]);
            }
        }
    }
    let complex = ComplexSkeleton::from_simplices(2, vertices, &triangles)?;
    // Circumcenter containment, tested in the stored tuple's own winding.
    for (t, tuple) in complex.simplices(2).iter().enumerate() {
        let verts = complex.vertices();
        let (a, b, c) = (
            verts[tuple[0]].as_slice(),
            verts[tuple[1]].as_slice(),
            verts[tuple[2]].as_slice(),
        );
        let winding = signed_area(a, b, c).signum();
        let cc = &complex.circumcenters(2)[t];
        for (p, q) in [(a, b), (b, c), (c, a)] {
            // Barycentric sign of the circumcenter against edge (p, q).
            let side = (q[0] - p[0]) * (cc[1] - p[1]) - (q[1] - p[1]) * (cc[0] - p[0]);
            if side * winding <= 0.0 {
                return Err(DecError::NotWellCentered(format!(
                    "triangle {} does not contain its circumcenter",
                    t
                )));
            }
        }
    }
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_by_one_counts_and_euler() {
        let c = build_triangle_strip_complex(1, 1, 1.0).unwrap();
        assert_eq!(c.simplex_count(0), 4);
        assert_eq!(c.simplex_count(1), 5);
        assert_eq!(c.simplex_count(2), 2);
        let euler = c.simplex_count(0) as i64 - c.simplex_count(1) as i64
            + c.simplex_count(2) as i64;
        assert_eq!(euler, 1);
    }

    #[test]
    fn one_by_two_counts() {
        let c = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        assert_eq!(c.simplex_count(0), 6);
        assert_eq!(c.simplex_count(1), 9);
        assert_eq!(c.simplex_count(2), 4);
    }

    #[test]
    fn triangles_are_equilateral_and_ccw() {
        for (rows, cols) in [(1, 1), (2, 1), (1, 2), (3, 4)] {
            let c = build_triangle_strip_complex(rows, cols, 1.0).unwrap();
            let expected_area = 3.0_f64.sqrt() / 4.0;
            for &m in c.primal_measures(2) {
                assert_abs_diff_eq!(m, expected_area, epsilon = 1e-12);
            }
            for &m in c.primal_measures(1) {
                assert_abs_diff_eq!(m, 1.0, epsilon = 1e-12);
            }
            // Given orientation is counterclockwise: positive signed area.
            for (tuple, &o) in c.simplices(2).iter().zip(c.orientations(2)) {
                let v = c.vertices();
                let area = signed_area(
                    v[tuple[0]].as_slice(),
                    v[tuple[1]].as_slice(),
                    v[tuple[2]].as_slice(),
                ) * o;
                assert!(area > 0.0);
            }
        }
    }

    #[test]
    fn dual_areas_sum_to_total_area() {
        for (rows, cols) in [(1, 1), (2, 1), (1, 2), (2, 3)] {
            let c = build_triangle_strip_complex(rows, cols, 1.0).unwrap();
            let total_primal: f64 = c.primal_measures(2).iter().sum();
            let total_dual: f64 = c.dual_measures(0).iter().sum();
            assert_abs_diff_eq!(total_dual, total_primal, epsilon = 1e-12);
        }
    }

    #[test]
    fn interior_and_boundary_dual_edge_measures() {
        let c = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        let inradius = 1.0 / (2.0 * 3.0_f64.sqrt());
        for (i, &m) in c.dual_measures(1).iter().enumerate() {
            let expected = if c.boundary_flags(1)[i] {
                inradius
            } else {
                2.0 * inradius
            };
            assert_abs_diff_eq!(m, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_triangle_strip_complex(0, 1, 1.0).is_err());
        assert!(build_triangle_strip_complex(1, 0, 1.0).is_err());
        assert!(build_triangle_strip_complex(1, 1, 0.0).is_err());
    }
}
