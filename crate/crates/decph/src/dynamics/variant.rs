//! System variants, selected by name at runtime.
//!
//! Both variants integrate the same physics and share the quadratic energy
//! built from the two material coefficients. The canonical variant evolves
//! the potential state itself; the reduced variant evolves its exterior
//! derivative, which quotients out the constant-shift gauge freedom. The
//! structure matrices are assembled so that the quotient map intertwines
//! the two flows exactly, block by block:
//!
//!   canonical: d/dt [rho; pi] = [[0,        B       ], [(-1)^k d_i A d, 0]] z + s d_b e_b
//!   reduced:   d/dt [rho_bar; pi] = [[0, d B], [(-1)^k d_i A,   0]] z + s d_b e_b
//!
//! with s = sign_canonical_pi(n, k). Composing the canonical blocks with
//! diag(d^k, I) reproduces the reduced blocks, so projected canonical
//! trajectories and reduced trajectories agree to solver rounding.

use crate::cochain::{Cochain, CochainSpace, LinearMap, SpaceKind, StackedMap};
use crate::dynamics::QuadraticHamiltonian;
use crate::error::{DecError, Result};
use crate::mesh::ComplexSkeleton;
use crate::ops::{self, TraceKind};
use crate::sign;
use crate::sparse;
use nalgebra_sparse::CsrMatrix;

/// A linear port-Hamiltonian system assembled on a simplicial complex:
/// dz/dt = M z + G e_b, H(z) = 1/2 z^T Q z, f_b = -tr e_pi.
#[derive(Debug, Clone)]
pub struct LinearPHSystem {
    pub variant: String,
    pub n: usize,
    pub k: usize,
    /// [rho-like space, momentum space]; the state stacks one cochain from
    /// each.
    pub state_spaces: [CochainSpace; 2],
    /// Boundary effort space (dual boundary, degree n-k-1).
    pub boundary_space: CochainSpace,
    /// Boundary flow space (primal boundary, degree k).
    pub flow_boundary_space: CochainSpace,
    /// M: interconnection applied to the state.
    pub structure: CsrMatrix<f64>,
    /// G: injection of boundary efforts into the momentum equation.
    pub input: CsrMatrix<f64>,
    /// Q: symmetric energy form, H = 1/2 z^T Q z.
    pub energy: CsrMatrix<f64>,
    /// tr^k e_pi as a matrix on the state; the boundary flow output is the
    /// negative of this.
    pub trace_velocity: CsrMatrix<f64>,
    /// Feedback law F with e_b = F z zeroing the momentum rate on every
    /// boundary cell (a velocity clamp).
    pub clamp_feedback: CsrMatrix<f64>,
    /// Reordering sign in the boundary power P_b = power_sign <e_b, f_b>.
    pub power_sign: f64,
}

impl LinearPHSystem {
    pub fn state_dim(&self) -> usize {
        self.state_spaces[0].dim + self.state_spaces[1].dim
    }

    pub fn boundary_dim(&self) -> usize {
        self.boundary_space.dim
    }

    pub fn hamiltonian(&self, z: &[f64]) -> f64 {
        let qz = sparse::apply(&self.energy, z);
        debug_assert_eq!(qz.len(), z.len());
        0.5 * z.iter().zip(qz.iter()).map(|(a, b)| a * b).sum::<f64>()
    }

    /// tr^k e_pi(z): the velocity trace on boundary cells.
    pub fn boundary_velocity(&self, z: &[f64]) -> Vec<f64> {
        sparse::apply(&self.trace_velocity, z)
    }

    /// Boundary flow output f_b = -tr^k e_pi(z).
    pub fn boundary_flow(&self, z: &[f64]) -> Vec<f64> {
        self.boundary_velocity(z).iter().map(|v| -v).collect()
    }

    /// Instantaneous boundary power P_b(z, e_b); the balance dH/dt = P_b
    /// holds identically in (z, e_b).
    pub fn power(&self, z: &[f64], boundary_effort: &[f64]) -> f64 {
        let f_b = self.boundary_flow(z);
        self.power_sign
            * boundary_effort
                .iter()
                .zip(f_b.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    /// Clamp efforts F z (all boundary cells).
    pub fn clamp_efforts(&self, z: &[f64]) -> Vec<f64> {
        sparse::apply(&self.clamp_feedback, z)
    }

    /// Split a state vector into its two cochains.
    pub fn split_state(&self, z: &[f64]) -> Result<(Cochain, Cochain)> {
        let parts = crate::cochain::split(&self.state_spaces, z)?;
        let mut it = parts.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    }
}

/// One registered system variant: builds the system matrices and knows how
/// to form its initial state from canonical (u, p) data.
pub trait SystemVariant {
    fn name(&self) -> &'static str;
    fn build(
        &self,
        c: &ComplexSkeleton,
        k: usize,
        tension: f64,
        density: f64,
    ) -> Result<LinearPHSystem>;
    /// Initial state from the canonical pair: u is a primal k-cochain and p
    /// a dual (n-k)-cochain. The reduced variant quotients u through d^k.
    fn initial_state(&self, c: &ComplexSkeleton, k: usize, u: &Cochain, p: &Cochain)
        -> Result<Vec<f64>>;
}

fn check_degree(c: &ComplexSkeleton, k: usize) -> Result<()> {
    let n = c.dim();
    if k >= n {
        return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
    }
    Ok(())
}

fn check_cochain(label: &str, expected: &CochainSpace, got: &Cochain) -> Result<()> {
    if &got.space != expected {
        return Err(DecError::InvalidArgument(format!(
            "{} must live in {:?}, got {:?}",
            label, expected, got.space
        )));
    }
    Ok(())
}

struct Assembly {
    rho_space: CochainSpace,
    pi_space: CochainSpace,
    structure: StackedMap,
    input: StackedMap,
    energy: StackedMap,
    trace_velocity: StackedMap,
    clamp_feedback: StackedMap,
}

/// Shared assembly; `reduced` switches where the derivative d^k sits.
fn assemble(
    c: &ComplexSkeleton,
    k: usize,
    tension: f64,
    density: f64,
    reduced: bool,
) -> Result<Assembly> {
    let n = c.dim();
    check_degree(c, k)?;
    let ham = QuadraticHamiltonian::new(c, k, tension, density)?;
    let d = ops::exterior_derivative(c, k)?;
    let di = ops::dual_exterior_derivative(c, n - k - 1, k + 1)?;
    let db = ops::boundary_dual_derivative(c, n - k - 1)?;
    let tr = ops::trace_map(c, k, TraceKind::Primal)?;
    let s = sign::sign_canonical_pi(n, k);

    let rho_space = if reduced {
        ops::space(c, SpaceKind::Primal, k + 1)?
    } else {
        ops::space(c, SpaceKind::Primal, k)?
    };
    let pi_space = ops::space(c, SpaceKind::Dual, n - k)?;
    let state = [rho_space, pi_space];

    // rho rate: e_pi for the canonical state, d^k e_pi for the reduced one.
    let m01 = if reduced {
        d.compose(&ham.kinetic)?
    } else {
        ham.kinetic.clone()
    };
    // pi rate from the rho-like effort; the variant effort signs collapse
    // to the same (-1)^k prefactor in both presentations.
    let m10 = if reduced {
        di.compose(&ham.potential)?.scale(sign::neg_one_pow(k))
    } else {
        di.compose(&ham.potential)?
            .compose(&d)?
            .scale(sign::neg_one_pow(k))
    };
    let structure = StackedMap::from_blocks(
        state.to_vec(),
        state.to_vec(),
        &[(0, 1, &m01), (1, 0, &m10)],
    )?;

    let input_block = db.scale(s);
    let boundary_space = input_block.domain;
    let input = StackedMap::from_blocks(
        vec![boundary_space],
        state.to_vec(),
        &[(1, 0, &input_block)],
    )?;

    // Energy blocks: the rho-like block is A for the reduced state and
    // d^T A d canonically; the canonical one is exactly -m10.
    let q00 = if reduced {
        ham.potential.clone()
    } else {
        m10.scale(-1.0)
    };
    let q11 = ham.kinetic.clone();
    let energy = StackedMap::from_blocks(
        state.to_vec(),
        vec![q00.codomain, q11.codomain],
        &[(0, 0, &q00), (1, 1, &q11)],
    )?;

    let trace_block = tr.compose(&ham.kinetic)?;
    let trace_velocity = StackedMap::from_blocks(
        state.to_vec(),
        vec![trace_block.codomain],
        &[(0, 1, &trace_block)],
    )?;

    // Velocity clamp: boundary rows of the momentum equation, inverted
    // through the input coefficient s (-1)^k (its own inverse).
    let select = LinearMap::new(
        m10.codomain,
        boundary_space,
        sparse::from_triplets(
            c.boundary_count(k),
            c.simplex_count(k),
            &c.boundary_cells(k)
                .iter()
                .enumerate()
                .map(|(row, &cell)| (row, cell, 1.0))
                .collect::<Vec<_>>(),
        ),
    );
    let clamp_block = select
        .compose(&m10)?
        .scale(-s * sign::neg_one_pow(k));
    let clamp_feedback = StackedMap::from_blocks(
        state.to_vec(),
        vec![boundary_space],
        &[(0, 0, &clamp_block)],
    )?;

    Ok(Assembly {
        rho_space: state[0],
        pi_space: state[1],
        structure,
        input,
        energy,
        trace_velocity,
        clamp_feedback,
    })
}

fn finish(c: &ComplexSkeleton, k: usize, variant: &str, a: Assembly) -> Result<LinearPHSystem> {
    let n = c.dim();
    Ok(LinearPHSystem {
        variant: variant.to_string(),
        n,
        k,
        state_spaces: [a.rho_space, a.pi_space],
        boundary_space: ops::space(c, SpaceKind::DualBoundary, n - k - 1)?,
        flow_boundary_space: ops::space(c, SpaceKind::PrimalBoundary, k)?,
        structure: a.structure.matrix,
        input: a.input.matrix,
        energy: a.energy.matrix,
        trace_velocity: a.trace_velocity.matrix,
        clamp_feedback: a.clamp_feedback.matrix,
        power_sign: sign::wedge_swap_sign(n - k - 1, k),
    })
}

pub struct CanonicalVariant;

impl SystemVariant for CanonicalVariant {
    fn name(&self) -> &'static str {
        "canonical"
    }

    fn build(
        &self,
        c: &ComplexSkeleton,
        k: usize,
        tension: f64,
        density: f64,
    ) -> Result<LinearPHSystem> {
        let a = assemble(c, k, tension, density, false)?;
        finish(c, k, self.name(), a)
    }

    fn initial_state(
        &self,
        c: &ComplexSkeleton,
        k: usize,
        u: &Cochain,
        p: &Cochain,
    ) -> Result<Vec<f64>> {
        check_degree(c, k)?;
        let n = c.dim();
        check_cochain("u", &ops::space(c, SpaceKind::Primal, k)?, u)?;
        check_cochain("p", &ops::space(c, SpaceKind::Dual, n - k)?, p)?;
        Ok(crate::cochain::stack(&[u, p]))
    }
}

pub struct ReducedVariant;

impl SystemVariant for ReducedVariant {
    fn name(&self) -> &'static str {
        "reduced"
    }

    fn build(
        &self,
        c: &ComplexSkeleton,
        k: usize,
        tension: f64,
        density: f64,
    ) -> Result<LinearPHSystem> {
        let a = assemble(c, k, tension, density, true)?;
        finish(c, k, self.name(), a)
    }

    fn initial_state(
        &self,
        c: &ComplexSkeleton,
        k: usize,
        u: &Cochain,
        p: &Cochain,
    ) -> Result<Vec<f64>> {
        check_degree(c, k)?;
        let n = c.dim();
        check_cochain("u", &ops::space(c, SpaceKind::Primal, k)?, u)?;
        check_cochain("p", &ops::space(c, SpaceKind::Dual, n - k)?, p)?;
        let rho_bar = ops::exterior_derivative(c, k)?.apply(u)?;
        Ok(crate::cochain::stack(&[&rho_bar, p]))
    }
}

/// All registered variants.
pub fn variant_registry() -> Vec<Box<dyn SystemVariant>> {
    vec![Box::new(CanonicalVariant), Box::new(ReducedVariant)]
}

/// Find a variant by name.
pub fn lookup_variant(name: &str) -> Result<Box<dyn SystemVariant>> {
    variant_registry()
        .into_iter()
        .find(|v| v.name() == name)
        .ok_or_else(|| {
            DecError::InvalidArgument(format!(
                "unknown system variant '{}'; registered variants: {}",
                name,
                variant_registry()
                    .iter()
                    .map(|v| v.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh;

    fn interval(cells: usize) -> ComplexSkeleton {
        mesh::build_interval_complex(1.0, cells).unwrap()
    }

    #[test]
    fn registry_has_both_variants() {
        let names: Vec<&str> = variant_registry().iter().map(|v| v.name()).collect();
        assert_eq!(names, vec!["canonical", "reduced"]);
        assert!(lookup_variant("canonical").is_ok());
        assert!(lookup_variant("midpoint").is_err());
    }

    #[test]
    fn canonical_string_matrices_match_hand_assembly() {
        // N = 2, L = 1, T = 1, mu = 1: h = 1/2, A = diag(2, 2) on edges,
        // B = diag(1/h_dual) = diag(4, 2, 4) on vertices.
        let c = interval(2);
        let sys = lookup_variant("canonical")
            .unwrap()
            .build(&c, 0, 1.0, 1.0)
            .unwrap();
        assert_eq!(sys.state_dim(), 6);
        assert_eq!(sys.boundary_dim(), 2);
        let m = sparse::to_dense(&sys.structure);
        // rho rows: du/dt = B pi, B = diag(4, 2, 4).
        assert_eq!(m[(0, 3)], 4.0);
        assert_eq!(m[(1, 4)], 2.0);
        assert_eq!(m[(2, 5)], 4.0);
        assert_eq!(m[(2, 4)], 0.0);
        // pi rows: -d^T A d = -T/h * tridiag(-1, ...): row for vertex 1 is
        // (2, -4, 2).
        assert_eq!(m[(4, 0)], 2.0);
        assert_eq!(m[(4, 1)], -4.0);
        assert_eq!(m[(4, 2)], 2.0);
        assert_eq!(m[(3, 0)], -2.0);
        assert_eq!(m[(3, 1)], 2.0);
        // Input: s = sign_canonical_pi(1, 0) = -1, d_b = tr^T, so G has
        // -1 at the two boundary momentum rows.
        let g = sparse::to_dense(&sys.input);
        assert_eq!(g[(3, 0)], -1.0);
        assert_eq!(g[(5, 1)], -1.0);
        assert_eq!(g.iter().filter(|v| **v != 0.0).count(), 2);
    }

    #[test]
    fn energy_matches_quadratic_form() {
        let c = interval(2);
        let sys = lookup_variant("canonical")
            .unwrap()
            .build(&c, 0, 2.0, 0.5)
            .unwrap();
        // u = (0, 1, 0), p = 0: H = 1/2 T sum (du)^2 / h = 1/2*2*(1*2+1*2) = 4.
        let z = vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!((sys.hamiltonian(&z) - 4.0).abs() < 1e-14);
        // u = 0, p = unit momentum on middle dual cell (measure 1/2):
        // H = 1/2 p^2 / (mu h_dual) = 1/2 * 1 / (0.5 * 0.5) = 2.
        let z = vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert!((sys.hamiltonian(&z) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quotient_intertwines_structure_and_input() {
        // P M_c = M_r P and P G_c = G_r with P = diag(d^k, I), bit exact.
        for (c, ks) in [
            (interval(5), vec![0usize]),
            (mesh::build_triangle_strip_complex(2, 1, 1.0).unwrap(), vec![0usize, 1]),
        ] {
            for &k in &ks {
                let canonical = lookup_variant("canonical")
                    .unwrap()
                    .build(&c, k, 1.5, 0.7)
                    .unwrap();
                let reduced = lookup_variant("reduced")
                    .unwrap()
                    .build(&c, k, 1.5, 0.7)
                    .unwrap();
                let d = ops::exterior_derivative(&c, k).unwrap();
                let p = StackedMap::from_blocks(
                    canonical.state_spaces.to_vec(),
                    reduced.state_spaces.to_vec(),
                    &[
                        (0, 0, &d),
                        (1, 1, &LinearMap::identity(canonical.state_spaces[1])),
                    ],
                )
                .unwrap();
                let pm = sparse::matmul(&p.matrix, &canonical.structure);
                let mp = sparse::matmul(&reduced.structure, &p.matrix);
                assert!(sparse::exactly_equal(&pm, &mp));
                let pg = sparse::matmul(&p.matrix, &canonical.input);
                assert!(sparse::exactly_equal(&pg, &reduced.input));
            }
        }
    }

    #[test]
    fn canonical_energy_factors_through_derivative() {
        // H_c(u, p) = H_r(d u, p) exactly, so constants are invisible.
        let c = interval(4);
        let canonical = lookup_variant("canonical").unwrap();
        let reduced = lookup_variant("reduced").unwrap();
        let sys_c = canonical.build(&c, 0, 3.0, 2.0).unwrap();
        let sys_r = reduced.build(&c, 0, 3.0, 2.0).unwrap();
        let u = Cochain::new(
            ops::space(&c, SpaceKind::Primal, 0).unwrap(),
            vec![0.3, -0.1, 0.7, 0.2, -0.5],
        )
        .unwrap();
        let p = Cochain::new(
            ops::space(&c, SpaceKind::Dual, 1).unwrap(),
            vec![0.1, 0.2, -0.3, 0.05, 0.4],
        )
        .unwrap();
        let zc = canonical.initial_state(&c, 0, &u, &p).unwrap();
        let zr = reduced.initial_state(&c, 0, &u, &p).unwrap();
        assert_eq!(sys_c.hamiltonian(&zc), sys_r.hamiltonian(&zr));
        let shifted = Cochain::new(u.space, u.values.iter().map(|v| v + 5.0).collect()).unwrap();
        let zs = canonical.initial_state(&c, 0, &shifted, &p).unwrap();
        assert!((sys_c.hamiltonian(&zs) - sys_c.hamiltonian(&zc)).abs() < 1e-12);
    }

    #[test]
    fn clamp_zeroes_boundary_momentum_rate() {
        for name in ["canonical", "reduced"] {
            let c = interval(6);
            let sys = lookup_variant(name).unwrap().build(&c, 0, 1.0, 1.0).unwrap();
            let dim = sys.state_dim();
            let mut z = vec![0.0; dim];
            for (i, v) in z.iter_mut().enumerate() {
                *v = (i as f64 * 0.37).sin();
            }
            let e_b = sys.clamp_efforts(&z);
            let rate_open = sparse::apply(&sys.structure, &z);
            let injected = sparse::apply(&sys.input, &e_b);
            let rho_dim = sys.state_spaces[0].dim;
            // Momentum rows sit after the rho block; boundary cells are
            // vertices 0 and 6.
            for &cell in c.boundary_cells(0) {
                let row = rho_dim + cell;
                assert_eq!(rate_open[row] + injected[row], 0.0);
            }
        }
    }

    #[test]
    fn rejects_top_degree() {
        let c = interval(3);
        assert!(lookup_variant("canonical").unwrap().build(&c, 1, 1.0, 1.0).is_err());
    }
}
