use super::ComplexSkeleton;
use crate::error::{DecError, Result};

/// Uniform subdivision of [0, length] into `cells` edges oriented
/// left-to-right. Dual 0-cells sit at edge midpoints; dual 1-cells of the
/// endpoint vertices are truncated to half cells.
pub fn build_interval_complex(length: f64, cells: usize) -> Result<ComplexSkeleton> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(DecError::InvalidArgument(format!(
            "interval length must be positive and finite, got {}",
            length
        )));
    }
    if cells == 0 {
        return Err(DecError::InvalidArgument(
            "interval needs at least one cell".into(),
        ));
    }
    let h = length / cells as f64;
    let vertices: Vec<Vec<f64>> = (0..=cells).map(|i| vec![i as f64 * h]).collect();
    let edges: Vec<Vec<usize>> = (0..cells).map(|i| vec![i, i + 1]).collect();
    ComplexSkeleton::from_simplices(1, vertices, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_cell_unit_interval() {
        let c = build_interval_complex(1.0, 2).unwrap();
        assert_eq!(c.simplex_count(0), 3);
        assert_eq!(c.simplex_count(1), 2);
        let xs: Vec<f64> = c.vertices().iter().map(|v| v[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        // Dual 0-cells at edge midpoints.
        let mids: Vec<f64> = c.circumcenters(1).iter().map(|p| p[0]).collect();
        assert_eq!(mids, vec![0.25, 0.75]);
        // Truncated dual 1-cell measures.
        let dm = c.dual_measures(0);
        assert_abs_diff_eq!(dm[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(dm[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dm[2], 0.25, epsilon = 1e-15);
        assert_eq!(c.boundary_cells(0), &[0, 2]);
    }

    #[test]
    fn single_cell_interval() {
        let c = build_interval_complex(1.0, 1).unwrap();
        assert_eq!(c.simplex_count(0), 2);
        assert_eq!(c.simplex_count(1), 1);
        assert_eq!(c.circumcenters(1)[0][0], 0.5);
        let dm = c.dual_measures(0);
        assert_abs_diff_eq!(dm[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dm[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn four_cells_of_length_two() {
        let c = build_interval_complex(2.0, 4).unwrap();
        for &m in c.primal_measures(1) {
            assert_abs_diff_eq!(m, 0.5, epsilon = 1e-15);
        }
        // Interior dual 1-cells all measure 0.5.
        for i in 1..4 {
            assert_abs_diff_eq!(c.dual_measures(0)[i], 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_interval_complex(0.0, 2).is_err());
        assert!(build_interval_complex(-1.0, 2).is_err());
        assert!(build_interval_complex(1.0, 0).is_err());
        assert!(build_interval_complex(f64::NAN, 2).is_err());
    }

    #[test]
    fn dual_measures_sum_to_length() {
        for cells in [1, 2, 5, 50] {
            let c = build_interval_complex(3.0, cells).unwrap();
            let total: f64 = c.dual_measures(0).iter().sum();
            assert_abs_diff_eq!(total, 3.0, epsilon = 1e-12);
        }
    }
}
