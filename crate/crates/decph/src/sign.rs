//! Every structural sign in the library is produced here, from the integer
//! data (n, k, p, q) alone. Keeping them in one place makes each exponent
//! testable against the hand-derived tables below; sign drift between
//! modules is the dominant failure mode for this kind of code.

/// (-1)^e as f64.
pub fn neg_one_pow(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// r = pq + 1 for a Dirac structure with primal/dual degrees p + q = n + 1.
pub fn dirac_r(p: usize, q: usize) -> usize {
    p * q + 1
}

/// Sign of the f_p row blocks: (-1)^r with r = pq + 1.
pub fn sign_flow_p(p: usize, q: usize) -> f64 {
    neg_one_pow(dirac_r(p, q))
}

/// Sign of the boundary-flow row: f_b = (-1)^p tr^{n-p} e_p.
pub fn sign_flow_b(p: usize) -> f64 {
    neg_one_pow(p)
}

/// d_i on dual m-cochains is (-1)^{n-m} times the transpose of d^{n-m-1}.
pub fn sign_dual_derivative(n: usize, m: usize) -> f64 {
    neg_one_pow(n - m)
}

/// d_b on dual-boundary m-cochains is (-1)^{n-m-1} times the transpose of
/// tr^{n-m-1}.
pub fn sign_boundary_derivative(n: usize, m: usize) -> f64 {
    neg_one_pow(n - m - 1)
}

/// Graded-commutativity sign of the discrete wedge: writing a degree-a form
/// left of a degree-b form instead of the other way round costs (-1)^{ab}.
pub fn wedge_swap_sign(deg_a: usize, deg_b: usize) -> f64 {
    neg_one_pow(deg_a * deg_b)
}

/// Canonical sharp: pi-dot = -(-1)^{k(n-k)} (e_rho + d_b eb).
pub fn sign_canonical_pi(n: usize, k: usize) -> f64 {
    -neg_one_pow(k * (n - k))
}

/// Cotangent lift of the quotient map: the rho-block is
/// (-1)^{n-k} d_i^{n-k-1}, the graded-pairing adjoint of d^k.
pub fn sign_cotangent_rho(n: usize, k: usize) -> f64 {
    neg_one_pow(n - k)
}

/// Reduced sharp: pi-dot equals -(-1)^{k(n-k)} times
/// ((-1)^{n-k} d_i^{n-k-1} e_rho + d_b^{n-k-1} e_b). Same prefactor as the
/// canonical row; composing the quotient maps introduces no further sign.
pub fn sign_reduced_pi(n: usize, k: usize) -> f64 {
    sign_canonical_pi(n, k)
}

/// Effort slot signs: the effort is the coordinate gradient of H times the
/// graded sign of its pairing slot. Canonical rho-slot pairs a dual (n-k)
/// effort with a primal k flow.
pub fn sign_effort_canonical_rho(n: usize, k: usize) -> f64 {
    wedge_swap_sign(n - k, k)
}

/// Reduced rho-slot pairs a dual (n-k-1) effort with a primal (k+1) flow.
pub fn sign_effort_reduced_rho(n: usize, k: usize) -> f64 {
    wedge_swap_sign(n - k - 1, k + 1)
}

/// Sign conversion from reduced-sharp variables to simplicial-Dirac
/// variables with (p, q) = (n-k, k+1): only the boundary channels rescale.
pub fn sign_convert_eb(n: usize, k: usize) -> f64 {
    neg_one_pow(n - k)
}

pub fn sign_convert_fb(n: usize, k: usize) -> f64 {
    neg_one_pow(n - k + 1)
}

/// Boundary-effort constraint left over by the conversion:
/// e_b = (-1)^{n-k} tr^k e_rho-bar.
pub fn sign_boundary_constraint(n: usize, k: usize) -> f64 {
    neg_one_pow(n - k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_one_pow_alternates() {
        assert_eq!(neg_one_pow(0), 1.0);
        assert_eq!(neg_one_pow(1), -1.0);
        assert_eq!(neg_one_pow(2), 1.0);
        assert_eq!(neg_one_pow(7), -1.0);
    }

    // Hand tables for every (n, k) with n in {1, 2}, 0 <= k < n, and the
    // matching structure parameters (p, q) = (n-k, k+1). Derived once on
    // paper; the code must reproduce them exactly.

    #[test]
    fn dirac_structure_signs() {
        // (p, q) = (1, 1): r = 2.
        assert_eq!(dirac_r(1, 1), 2);
        assert_eq!(sign_flow_p(1, 1), 1.0);
        assert_eq!(sign_flow_b(1), -1.0);
        // (p, q) = (2, 1) and (1, 2): r = 3.
        assert_eq!(dirac_r(2, 1), 3);
        assert_eq!(sign_flow_p(2, 1), -1.0);
        assert_eq!(sign_flow_b(2), 1.0);
        assert_eq!(dirac_r(1, 2), 3);
        assert_eq!(sign_flow_p(1, 2), -1.0);
    }

    #[test]
    fn dual_derivative_signs() {
        // n = 1: d_i^0 = -(d^0)^T.
        assert_eq!(sign_dual_derivative(1, 0), -1.0);
        // n = 2: d_i^0 = +(d^1)^T, d_i^1 = -(d^0)^T.
        assert_eq!(sign_dual_derivative(2, 0), 1.0);
        assert_eq!(sign_dual_derivative(2, 1), -1.0);
    }

    #[test]
    fn boundary_derivative_signs() {
        // n = 1: d_b^0 = +(tr^0)^T.
        assert_eq!(sign_boundary_derivative(1, 0), 1.0);
        // n = 2: d_b^0 = -(tr^1)^T, d_b^1 = +(tr^0)^T.
        assert_eq!(sign_boundary_derivative(2, 0), -1.0);
        assert_eq!(sign_boundary_derivative(2, 1), 1.0);
    }

    #[test]
    fn canonical_and_reduced_row_signs() {
        assert_eq!(sign_canonical_pi(1, 0), -1.0); // k(n-k) = 0
        assert_eq!(sign_canonical_pi(2, 0), -1.0); // 0
        assert_eq!(sign_canonical_pi(2, 1), 1.0); // 1
        for &(n, k) in &[(1usize, 0usize), (2, 0), (2, 1)] {
            assert_eq!(sign_reduced_pi(n, k), sign_canonical_pi(n, k));
        }
    }

    #[test]
    fn cotangent_signs() {
        assert_eq!(sign_cotangent_rho(1, 0), -1.0);
        assert_eq!(sign_cotangent_rho(2, 0), 1.0);
        assert_eq!(sign_cotangent_rho(2, 1), -1.0);
    }

    #[test]
    fn wedge_swap_signs() {
        assert_eq!(wedge_swap_sign(0, 1), 1.0);
        assert_eq!(wedge_swap_sign(1, 1), -1.0);
        assert_eq!(wedge_swap_sign(1, 2), 1.0);
        assert_eq!(wedge_swap_sign(2, 0), 1.0);
    }

    #[test]
    fn effort_slot_signs() {
        // 1D slots are all trivial.
        assert_eq!(sign_effort_canonical_rho(1, 0), 1.0);
        assert_eq!(sign_effort_reduced_rho(1, 0), 1.0);
        // n = 2: canonical rho-slot pairs dual 2 with primal 0 (even),
        // dual 1 with primal 1 (odd) for k = 1.
        assert_eq!(sign_effort_canonical_rho(2, 0), 1.0);
        assert_eq!(sign_effort_canonical_rho(2, 1), -1.0);
        // Reduced rho-slot: dual 1 with primal 1 for k = 0 (odd),
        // dual 0 with primal 2 for k = 1 (even).
        assert_eq!(sign_effort_reduced_rho(2, 0), -1.0);
        assert_eq!(sign_effort_reduced_rho(2, 1), 1.0);
    }

    #[test]
    fn conversion_signs() {
        assert_eq!(sign_convert_eb(1, 0), -1.0);
        assert_eq!(sign_convert_fb(1, 0), 1.0);
        assert_eq!(sign_convert_eb(2, 0), 1.0);
        assert_eq!(sign_convert_fb(2, 0), -1.0);
        assert_eq!(sign_convert_eb(2, 1), -1.0);
        assert_eq!(sign_convert_fb(2, 1), 1.0);
        assert_eq!(sign_boundary_constraint(1, 0), -1.0);
        assert_eq!(sign_boundary_constraint(2, 0), 1.0);
        assert_eq!(sign_boundary_constraint(2, 1), -1.0);
    }
}
