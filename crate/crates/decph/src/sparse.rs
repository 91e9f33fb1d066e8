//! Thin helpers over `nalgebra_sparse`. The library stores every operator
//! as CSR; these wrappers keep triplet assembly, transposition, scaling and
//! densification in one place so the rest of the code never touches raw
//! index arrays.

use nalgebra::DMatrix;
use nalgebra_sparse::CooMatrix;
pub use nalgebra_sparse::CsrMatrix;

/// Build a CSR matrix from (row, col, value) triplets. Duplicate entries
/// are summed.
pub fn from_triplets(
    nrows: usize,
    ncols: usize,
    triplets: &[(usize, usize, f64)],
) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(nrows, ncols);
    for &(r, c, v) in triplets {
        coo.push(r, c, v);
    }
    CsrMatrix::from(&coo)
}

/// Zero matrix of the given shape.
pub fn zeros(nrows: usize, ncols: usize) -> CsrMatrix<f64> {
    CsrMatrix::from(&CooMatrix::new(nrows, ncols))
}

/// Identity matrix.
pub fn identity(n: usize) -> CsrMatrix<f64> {
    CsrMatrix::identity(n)
}

/// Diagonal matrix from a slice of entries.
pub fn diagonal(entries: &[f64]) -> CsrMatrix<f64> {
    let triplets: Vec<(usize, usize, f64)> = entries
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, i, v))
        .collect();
    from_triplets(entries.len(), entries.len(), &triplets)
}

pub fn transpose(m: &CsrMatrix<f64>) -> CsrMatrix<f64> {
    m.transpose()
}

pub fn scale(m: &CsrMatrix<f64>, factor: f64) -> CsrMatrix<f64> {
    let mut out = m.clone();
    for v in out.values_mut() {
        *v *= factor;
    }
    out
}

pub fn to_dense(m: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut dense = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.triplet_iter() {
        dense[(r, c)] = *v;
    }
    dense
}

/// Apply to a vector without densifying.
pub fn apply(m: &CsrMatrix<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), x.len(), "matrix-vector shape mismatch");
    let mut y = vec![0.0; m.nrows()];
    for (r, row) in m.row_iter().enumerate() {
        let mut acc = 0.0;
        for (c, v) in row.col_indices().iter().zip(row.values()) {
            acc += v * x[*c];
        }
        y[r] = acc;
    }
    y
}

pub fn matmul(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> CsrMatrix<f64> {
    a * b
}

pub fn add(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> CsrMatrix<f64> {
    a + b
}

/// Exact entrywise equality after dropping explicit zeros. Used by the
/// structural identity checks (d after d, conversion block equality) where
/// the result must hold in exact floating-point arithmetic, not just to a
/// tolerance.
pub fn exactly_equal(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> bool {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return false;
    }
    let da = to_dense(a);
    let db = to_dense(b);
    da == db
}

/// Largest absolute entry of a - b; infinity norm of the difference.
pub fn max_abs_diff(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let d = to_dense(a) - to_dense(b);
    d.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Serialize as sorted COO triplet lines `row col value`, one per entry,
/// values in full round-trip precision. Zero entries are dropped.
pub fn to_coo_text(m: &CsrMatrix<f64>) -> String {
    let mut entries: Vec<(usize, usize, f64)> = m
        .triplet_iter()
        .filter(|(_, _, v)| **v != 0.0)
        .map(|(r, c, v)| (r, c, *v))
        .collect();
    entries.sort_by_key(|&(r, c, _)| (r, c));
    let mut out = String::new();
    for (r, c, v) in entries {
        out.push_str(&format!("{} {} {:.16e}\n", r, c, v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 5.0)]);
        let d = to_dense(&m);
        assert_eq!(d[(0, 0)], 3.0);
        assert_eq!(d[(1, 1)], 5.0);
        assert_eq!(d[(0, 1)], 0.0);
    }

    #[test]
    fn apply_matches_dense() {
        let m = from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, -2.0), (1, 1, 4.0)]);
        let y = apply(&m, &[1.0, 2.0, 3.0]);
        assert_eq!(y, vec![-5.0, 8.0]);
    }

    #[test]
    fn transpose_round_trip() {
        let m = from_triplets(2, 3, &[(0, 1, 2.0), (1, 2, -1.0)]);
        let tt = transpose(&transpose(&m));
        assert!(exactly_equal(&m, &tt));
    }

    #[test]
    fn scale_negates() {
        let m = from_triplets(1, 1, &[(0, 0, 3.0)]);
        let s = scale(&m, -1.0);
        assert_eq!(to_dense(&s)[(0, 0)], -3.0);
    }

    #[test]
    fn coo_text_is_sorted_and_skips_zeros() {
        let m = from_triplets(2, 2, &[(1, 0, 2.0), (0, 1, 1.0), (0, 0, 0.0)]);
        let text = to_coo_text(&m);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("0 1 "));
        assert!(lines[1].starts_with("1 0 "));
    }

    #[test]
    fn diagonal_builds() {
        let m = diagonal(&[2.0, 0.25]);
        let d = to_dense(&m);
        assert_eq!(d[(0, 0)], 2.0);
        assert_eq!(d[(1, 1)], 0.25);
    }
}
