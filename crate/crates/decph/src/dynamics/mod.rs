//! Time integration of the canonical and reduced port-Hamiltonian systems.
//!
//! The state stacks two cochains, a rho-like potential variable and a
//! momentum, and evolves by
//!
//!   dz/dt = M z + G e_b(t, z),    H(z) = 1/2 z^T Q z,
//!
//! with the boundary effort e_b supplied per boundary cell by a signal law.
//! The chain rule gives dH/dt = (Q z)^T (M z + G e_b), and the block signs
//! of M, G, Q make this collapse to the boundary power
//!
//!   dH/dt = P_b(z, e_b) = sigma <e_b, f_b>,    f_b = -tr^k e_pi(z),
//!
//! identically in (z, e_b), with sigma the wedge reordering sign. The
//! implicit midpoint rule inherits that identity exactly: for a quadratic
//! H, H(z1) - H(z0) = (z1 - z0)^T Q z_m with z_m the step midpoint, so the
//! discrete energy balance holds to solver rounding, not to O(dt^2).
//! Each step applies a Cayley transform (I - dt/2 M)^{-1} (I + dt/2 M)
//! plus the boundary injection; one LU factorization serves a whole run.

pub mod config;
pub mod signal;
pub mod variant;

pub use config::SimConfig;
pub use signal::{compile_signal, lookup_signal, signal_registry, CellLaw, SignalSpec, TimeSignal};
pub use variant::{lookup_variant, variant_registry, LinearPHSystem, SystemVariant};

use crate::cochain::{Cochain, LinearMap};
use crate::error::{DecError, Result};
use crate::mesh::ComplexSkeleton;
use crate::ops;
use crate::sparse;
use nalgebra::{DMatrix, DVector, Dyn};
use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

/// Quadratic energy H(rho_bar, pi) = 1/2 <A rho_bar, rho_bar> plus
/// 1/2 <B pi, pi> with diagonal positive definite A, B built from the
/// Hodge stars and the two material coefficients.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    /// A = tension * star: primal (k+1) -> dual (n-k-1).
    pub potential: LinearMap,
    /// B = (1/density) * star_dual: dual (n-k) -> primal k.
    pub kinetic: LinearMap,
}

impl QuadraticHamiltonian {
    pub fn new(c: &ComplexSkeleton, k: usize, tension: f64, density: f64) -> Result<Self> {
        let n = c.dim();
        if k >= n {
            return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
        }
        if !(tension > 0.0) || !tension.is_finite() {
            return Err(DecError::InvalidArgument(format!(
                "tension coefficient must be positive and finite, got {}",
                tension
            )));
        }
        if !(density > 0.0) || !density.is_finite() {
            return Err(DecError::InvalidArgument(format!(
                "density coefficient must be positive and finite, got {}",
                density
            )));
        }
        Ok(QuadraticHamiltonian {
            potential: ops::hodge_star(c, k + 1)?.scale(tension),
            kinetic: ops::hodge_star_dual(c, k)?.scale(1.0 / density),
        })
    }

    /// Energy of a reduced pair (rho_bar, pi).
    pub fn value(&self, rho_bar: &Cochain, pi: &Cochain) -> Result<f64> {
        let a_rho = self.potential.apply(rho_bar)?;
        let b_pi = self.kinetic.apply(pi)?;
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        Ok(0.5 * dot(&a_rho.values, &rho_bar.values) + 0.5 * dot(&b_pi.values, &pi.values))
    }

    /// Raw gradient (A rho_bar, B pi); the variants attach their own effort
    /// signs on top of this.
    pub fn gradient(&self, rho_bar: &Cochain, pi: &Cochain) -> Result<(Cochain, Cochain)> {
        Ok((self.potential.apply(rho_bar)?, self.kinetic.apply(pi)?))
    }
}

/// Per-cell boundary laws for one system, in boundary-cell order.
#[derive(Debug, Clone)]
pub struct BoundaryLaws {
    pub cells: Vec<CellLaw>,
}

impl BoundaryLaws {
    pub fn new(cells: Vec<CellLaw>) -> Self {
        BoundaryLaws { cells }
    }

    pub fn uniform(law: CellLaw, dim: usize) -> Self {
        BoundaryLaws {
            cells: vec![law; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    /// Time-driven efforts; clamped cells contribute zero here and get
    /// their effort from the feedback instead.
    pub fn open_effort(&self, t: f64) -> Vec<f64> {
        self.cells
            .iter()
            .map(|law| match law {
                CellLaw::Open(f) => f.eval(t),
                CellLaw::VelocityClamp => 0.0,
            })
            .collect()
    }

    /// The system clamp feedback restricted to the clamped cells.
    pub fn active_feedback(&self, sys: &LinearPHSystem) -> CsrMatrix<f64> {
        let kept: Vec<(usize, usize, f64)> = sys
            .clamp_feedback
            .triplet_iter()
            .filter(|(row, _, _)| matches!(self.cells[*row], CellLaw::VelocityClamp))
            .map(|(row, col, v)| (row, col, *v))
            .collect();
        sparse::from_triplets(sys.boundary_dim(), sys.state_dim(), &kept)
    }
}

/// One accepted implicit midpoint step.
#[derive(Debug, Clone)]
pub struct StepSample {
    pub midpoint_time: f64,
    pub power: f64,
    pub boundary_effort: Vec<f64>,
    pub boundary_flow: Vec<f64>,
}

/// Implicit midpoint integrator for one (system, laws, dt) triple; the
/// backward operator is factored once.
pub struct MidpointStepper<'a> {
    system: &'a LinearPHSystem,
    laws: BoundaryLaws,
    dt: f64,
    forward: CsrMatrix<f64>,
    active_feedback: CsrMatrix<f64>,
    backward_lu: nalgebra::linalg::LU<f64, Dyn, Dyn>,
}

impl<'a> MidpointStepper<'a> {
    pub fn new(system: &'a LinearPHSystem, laws: &BoundaryLaws, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(DecError::InvalidArgument(format!(
                "step size must be positive and finite, got {}",
                dt
            )));
        }
        if laws.dim() != system.boundary_dim() {
            return Err(DecError::InvalidArgument(format!(
                "{} boundary laws for {} boundary cells",
                laws.dim(),
                system.boundary_dim()
            )));
        }
        let active_feedback = laws.active_feedback(system);
        let effective = sparse::add(
            &system.structure,
            &sparse::matmul(&system.input, &active_feedback),
        );
        let dim = system.state_dim();
        let forward = sparse::add(&sparse::identity(dim), &sparse::scale(&effective, 0.5 * dt));
        let backward = DMatrix::identity(dim, dim) - sparse::to_dense(&effective) * (0.5 * dt);
        let backward_lu = backward.lu();
        if !backward_lu.is_invertible() {
            return Err(DecError::Internal(
                "implicit midpoint operator is singular at this step size".into(),
            ));
        }
        Ok(MidpointStepper {
            system,
            laws: laws.clone(),
            dt,
            forward,
            active_feedback,
            backward_lu,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Effective closed-loop generator M + G F_active.
    pub fn effective_matrix(&self) -> CsrMatrix<f64> {
        sparse::add(
            &self.system.structure,
            &sparse::matmul(&self.system.input, &self.active_feedback),
        )
    }

    /// Advance one step from (z, t); the sample carries the midpoint power
    /// data that enters the energy balance.
    pub fn step(&self, z: &[f64], t: f64) -> Result<(Vec<f64>, StepSample)> {
        let t_mid = t + 0.5 * self.dt;
        let open = self.laws.open_effort(t_mid);
        let mut rhs = sparse::apply(&self.forward, z);
        for (r, inj) in rhs
            .iter_mut()
            .zip(sparse::apply(&self.system.input, &open))
        {
            *r += self.dt * inj;
        }
        let z_next = self
            .backward_lu
            .solve(&DVector::from_column_slice(&rhs))
            .ok_or_else(|| DecError::Internal("midpoint solve failed".into()))?;
        let z_next: Vec<f64> = z_next.iter().copied().collect();
        let z_mid: Vec<f64> = z
            .iter()
            .zip(z_next.iter())
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mut effort = open;
        for (e, fb) in effort
            .iter_mut()
            .zip(sparse::apply(&self.active_feedback, &z_mid))
        {
            *e += fb;
        }
        let power = self.system.power(&z_mid, &effort);
        let flow = self.system.boundary_flow(&z_mid);
        Ok((
            z_next,
            StepSample {
                midpoint_time: t_mid,
                power,
                boundary_effort: effort,
                boundary_flow: flow,
            },
        ))
    }
}

/// Full trajectory of one run. Row i of the scalar columns belongs to time
/// t_i = i dt; the power at row i is the midpoint power of the step ending
/// there, the cumulative boundary energy is its midpoint-rule sum, and the
/// balance residual is recomputed per row as
/// |H(t_i) - H(0) - E_b(t_i)|.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub variant: String,
    pub dt: f64,
    pub times: Vec<f64>,
    pub hamiltonian: Vec<f64>,
    pub boundary_power: Vec<f64>,
    pub boundary_energy: Vec<f64>,
    pub balance_residual: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub boundary_efforts: Vec<Vec<f64>>,
    pub boundary_flows: Vec<Vec<f64>>,
}

impl SimulationRecord {
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn final_residual(&self) -> f64 {
        *self.balance_residual.last().unwrap_or(&0.0)
    }

    pub fn max_residual(&self) -> f64 {
        self.balance_residual.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_hamiltonian(&self) -> f64 {
        self.hamiltonian.iter().cloned().fold(0.0, f64::max)
    }
}

/// Integrate `steps` midpoint steps from z0.
pub fn simulate(
    system: &LinearPHSystem,
    laws: &BoundaryLaws,
    z0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<SimulationRecord> {
    if z0.len() != system.state_dim() {
        return Err(DecError::InvalidArgument(format!(
            "initial state has dimension {}, system expects {}",
            z0.len(),
            system.state_dim()
        )));
    }
    if steps == 0 {
        return Err(DecError::InvalidArgument(
            "a run needs at least one step".into(),
        ));
    }
    let stepper = MidpointStepper::new(system, laws, dt)?;
    let mut record = SimulationRecord {
        variant: system.variant.clone(),
        dt,
        times: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        boundary_power: Vec::with_capacity(steps + 1),
        boundary_energy: Vec::with_capacity(steps + 1),
        balance_residual: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        boundary_efforts: Vec::with_capacity(steps),
        boundary_flows: Vec::with_capacity(steps),
    };
    let h0 = system.hamiltonian(z0);
    record.times.push(0.0);
    record.hamiltonian.push(h0);
    record.boundary_power.push(0.0);
    record.boundary_energy.push(0.0);
    record.balance_residual.push(0.0);
    record.states.push(z0.to_vec());
    let mut z = z0.to_vec();
    let mut supplied = 0.0;
    for i in 0..steps {
        let t = i as f64 * dt;
        let (z_next, sample) = stepper.step(&z, t)?;
        z = z_next;
        supplied += dt * sample.power;
        let h = system.hamiltonian(&z);
        record.times.push((i + 1) as f64 * dt);
        record.hamiltonian.push(h);
        record.boundary_power.push(sample.power);
        record.boundary_energy.push(supplied);
        record.balance_residual.push((h - h0 - supplied).abs());
        record.states.push(z.clone());
        record.boundary_efforts.push(sample.boundary_effort);
        record.boundary_flows.push(sample.boundary_flow);
    }
    Ok(record)
}

/// Dense closed-loop generator for spectral checks.
pub fn closed_loop_matrix(system: &LinearPHSystem, laws: &BoundaryLaws) -> DMatrix<f64> {
    let effective = sparse::add(
        &system.structure,
        &sparse::matmul(&system.input, &laws.active_feedback(system)),
    );
    sparse::to_dense(&effective)
}

/// Smallest nonzero oscillation frequency of a generator: the least
/// |Im lambda| above a relative floor that separates genuine modes from
/// rounding noise on the zero modes.
pub fn fundamental_frequency(generator: &DMatrix<f64>) -> Option<f64> {
    let eigs = generator.clone().complex_eigenvalues();
    let ims: Vec<f64> = eigs.iter().map(|l| l.im.abs()).collect();
    let top = ims.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let floor = 1e-6 * top;
    ims.into_iter()
        .filter(|w| *w > floor)
        .fold(None, |acc: Option<f64>, w| {
            Some(acc.map_or(w, |a| a.min(w)))
        })
}

/// Side-by-side gauge comparison: the canonical run, the canonical run
/// with a gauge-shifted initial potential, and the reduced run started
/// from the quotient of the unshifted state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeComparison {
    /// max_t |H_shifted(t) - H(t)|.
    pub hamiltonian_difference: f64,
    /// sup-norm distance of the momentum trajectories.
    pub pi_sup_distance: f64,
    /// sup-norm distance of the projected (quotient) trajectories.
    pub projected_sup_distance: f64,
    /// sup-norm distance of projected canonical vs reduced trajectories.
    pub canonical_vs_reduced_sup: f64,
}

/// Run the three trajectories and measure the gauge invariances.
#[allow(clippy::too_many_arguments)]
pub fn gauge_shift_comparison(
    c: &ComplexSkeleton,
    k: usize,
    tension: f64,
    density: f64,
    laws: &BoundaryLaws,
    u0: &Cochain,
    p0: &Cochain,
    alpha: &[f64],
    dt: f64,
    steps: usize,
) -> Result<GaugeComparison> {
    let canonical = lookup_variant("canonical")?;
    let reduced = lookup_variant("reduced")?;
    let sys_c = canonical.build(c, k, tension, density)?;
    let sys_r = reduced.build(c, k, tension, density)?;
    let gauge = crate::reduction::GaugeAction::new(c, k)?;
    let u_shifted = gauge.shift(u0, alpha)?;

    let z_plain = canonical.initial_state(c, k, u0, p0)?;
    let z_shift = canonical.initial_state(c, k, &u_shifted, p0)?;
    let z_red = reduced.initial_state(c, k, u0, p0)?;

    let rec_plain = simulate(&sys_c, laws, &z_plain, dt, steps)?;
    let rec_shift = simulate(&sys_c, laws, &z_shift, dt, steps)?;
    let rec_red = simulate(&sys_r, laws, &z_red, dt, steps)?;

    let d = ops::exterior_derivative(c, k)?;
    let rho_dim = sys_c.state_spaces[0].dim;
    let project = |z: &[f64]| -> Vec<f64> {
        let mut out = d.apply_vec(&z[..rho_dim]);
        out.extend_from_slice(&z[rho_dim..]);
        out
    };
    let sup = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };

    let mut report = GaugeComparison {
        hamiltonian_difference: 0.0,
        pi_sup_distance: 0.0,
        projected_sup_distance: 0.0,
        canonical_vs_reduced_sup: 0.0,
    };
    for i in 0..rec_plain.times.len() {
        report.hamiltonian_difference = report
            .hamiltonian_difference
            .max((rec_plain.hamiltonian[i] - rec_shift.hamiltonian[i]).abs());
        report.pi_sup_distance = report.pi_sup_distance.max(sup(
            &rec_plain.states[i][rho_dim..],
            &rec_shift.states[i][rho_dim..],
        ));
        let proj_plain = project(&rec_plain.states[i]);
        let proj_shift = project(&rec_shift.states[i]);
        report.projected_sup_distance = report
            .projected_sup_distance
            .max(sup(&proj_plain, &proj_shift));
        report.canonical_vs_reduced_sup = report
            .canonical_vs_reduced_sup
            .max(sup(&proj_plain, &rec_red.states[i]));
    }
    Ok(report)
}
