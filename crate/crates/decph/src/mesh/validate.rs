use super::{signed_area, ComplexSkeleton};
use crate::sparse;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
    pub offending_cells: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dimension: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl ValidationReport {
    fn push(&mut self, name: &str, pass: bool, details: String, offenders: Vec<usize>) {
        self.pass &= pass;
        self.checks.push(CheckResult {
            name: name.to_string(),
            pass,
            details,
            offending_cells: offenders,
        });
    }
}

/// Run every structural invariant check and report pass/fail per check
/// with offending cell indices. Never errors: failures live in the report.
pub fn validate_complex(c: &ComplexSkeleton) -> ValidationReport {
    let n = c.dim();
    let mut report = ValidationReport {
        dimension: n,
        checks: Vec::new(),
        pass: true,
    };

    // Boundary of boundary vanishes exactly. Entries are small integers,
    // so f64 products and sums are exact.
    if n >= 2 {
        let composite = sparse::matmul(c.incidence(0), c.incidence(1));
        let bad: Vec<usize> = composite
            .triplet_iter()
            .filter(|(_, _, v)| **v != 0.0)
            .map(|(_, col, _)| col)
            .collect();
        report.push(
            "boundary_of_boundary",
            bad.is_empty(),
            "incidence composite must vanish exactly".into(),
            bad,
        );
    } else {
        report.push(
            "boundary_of_boundary",
            true,
            "vacuous in one dimension".into(),
            Vec::new(),
        );
    }

    for k in 1..=n {
        let bad: Vec<usize> = c
            .primal_measures(k)
            .iter()
            .enumerate()
            .filter(|(_, &m)| !(m > 0.0))
            .map(|(i, _)| i)
            .collect();
        report.push(
            &format!("positive_primal_measures_{}", k),
            bad.is_empty(),
            format!("every primal {}-simplex must have positive measure", k),
            bad,
        );
    }
    for k in 0..n {
        let bad: Vec<usize> = c
            .dual_measures(k)
            .iter()
            .enumerate()
            .filter(|(_, &m)| !(m > 0.0))
            .map(|(i, _)| i)
            .collect();
        report.push(
            &format!("positive_dual_measures_{}", k),
            bad.is_empty(),
            format!("every dual cell of a {}-simplex must have positive measure", k),
            bad,
        );
    }

    // Both builders triangulate a topological disk, so the alternating
    // simplex count must come out to 1.
    {
        let mut chi = 0i64;
        for k in 0..=n {
            let count = c.simplex_count(k) as i64;
            chi += if k % 2 == 0 { count } else { -count };
        }
        report.push(
            "euler_characteristic",
            chi == 1,
            format!("alternating simplex count is {}; a disk gives 1", chi),
            Vec::new(),
        );
    }

    // Orientation consistency: every interior (n-1)-simplex receives
    // opposite induced orientations from its two top simplices.
    {
        let inc = c.incidence(n - 1);
        let mut bad = Vec::new();
        for face in 0..c.simplex_count(n - 1) {
            let row = inc.row(face);
            let sum: f64 = row.values().iter().sum();
            let ok = match row.nnz() {
                1 => true,
                2 => sum == 0.0,
                _ => false,
            };
            if !ok {
                bad.push(face);
            }
        }
        report.push(
            "orientation_consistency",
            bad.is_empty(),
            "interior faces must carry opposite induced orientations".into(),
            bad,
        );
    }

    if n == 2 {
        let mut bad = Vec::new();
        for (t, (tuple, &o)) in c.simplices(2).iter().zip(c.orientations(2)).enumerate() {
            let v = c.vertices();
            let area = signed_area(
                v[tuple[0]].as_slice(),
                v[tuple[1]].as_slice(),
                v[tuple[2]].as_slice(),
            ) * o;
            if !(area > 0.0) {
                bad.push(t);
            }
        }
        report.push(
            "counterclockwise_triangles",
            bad.is_empty(),
            "triangles must be positively oriented".into(),
            bad,
        );

        // Well-centeredness: the circumcenter lies strictly inside.
        let mut outside = Vec::new();
        for (t, tuple) in c.simplices(2).iter().enumerate() {
            let v = c.vertices();
            let cc = &c.circumcenters(2)[t];
            let pts = [
                v[tuple[0]].as_slice(),
                v[tuple[1]].as_slice(),
                v[tuple[2]].as_slice(),
            ];
            let orient = signed_area(pts[0], pts[1], pts[2]).signum();
            for i in 0..3 {
                let (p, q) = (pts[i], pts[(i + 1) % 3]);
                let side = (q[0] - p[0]) * (cc[1] - p[1]) - (q[1] - p[1]) * (cc[0] - p[0]);
                if side * orient <= 0.0 {
                    outside.push(t);
                    break;
                }
            }
        }
        report.push(
            "well_centered",
            outside.is_empty(),
            "every triangle must contain its circumcenter".into(),
            outside,
        );
    }

    // Boundary identification: recount faces incident to one top simplex.
    {
        let inc = c.incidence(n - 1);
        let mut counts = vec![0usize; c.simplex_count(n - 1)];
        for (r, _, _) in inc.triplet_iter() {
            counts[r] += 1;
        }
        let recomputed: Vec<usize> = counts
            .iter()
            .enumerate()
            .filter(|(_, &cnt)| cnt == 1)
            .map(|(i, _)| i)
            .collect();
        let stored = c.boundary_cells(n - 1);
        report.push(
            "boundary_identification",
            recomputed == stored,
            "boundary faces are exactly those incident to one top simplex".into(),
            Vec::new(),
        );
        // The dual boundary is index-identified with the primal boundary,
        // so the 0-cell count of the dual boundary must match.
        report.push(
            "dual_boundary_count",
            c.boundary_count(n - 1) == stored.len(),
            "dual-boundary 0-cells correspond one-to-one with boundary faces".into(),
            Vec::new(),
        );
    }

    // Dual cells tile the complex: total top-dimensional dual measure
    // equals total primal measure.
    {
        let primal: f64 = c.primal_measures(n).iter().sum();
        let dual: f64 = c.dual_measures(0).iter().sum();
        let rel = (primal - dual).abs() / primal.max(f64::MIN_POSITIVE);
        report.push(
            "dual_measure_total",
            rel < 1e-12,
            format!(
                "dual cells of vertices must tile the complex \
                 (relative mismatch {:.3e})",
                rel
            ),
            Vec::new(),
        );
    }

    report
}
