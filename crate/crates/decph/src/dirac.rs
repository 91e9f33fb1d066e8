//! Simplicial Dirac structures over a primal/dual cell complex.
//!
//! Two presentations of the same interconnection geometry are built here
//! from the shared operator and sign tables. `SimplicialDiracStructure` is
//! the flow/effort form with explicit boundary port blocks,
//!
//! ```text
//!   f_p = (-1)^r (d_i e_q + d_b e_b)    r = pq + 1
//!   f_q = d e_p
//!   f_b = (-1)^p tr e_p
//! ```
//!
//! on degrees p + q = n + 1. `CanonicalStructure` is the phase-space form
//! whose graph couples state rates to energy gradients and a boundary
//! effort. Both implement `DiracStructure`, which fixes the bilinear form
//! the structure must be maximally isotropic under; `check_maximal_isotropy`
//! verifies that numerically and reports the graph dimension.
//!
//! Every block carries its sign from `sign`, and `flip_block` returns a
//! copy with one block negated so tests can confirm each sign is
//! load-bearing: a single flip must break isotropy by an O(1) residual.

use crate::cochain::{stack, stacked_dim, Cochain, CochainSpace, LinearMap, StackedMap};
use crate::error::{DecError, Result};
use crate::mesh::ComplexSkeleton;
use crate::ops::{self, TraceKind};
use crate::sign;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The six spaces of the flow/effort presentation with parameters (p, q),
/// p + q = n + 1.
#[derive(Debug, Clone, Copy)]
pub struct FlowEffortSpaces {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// dual p
    pub flow_p: CochainSpace,
    /// primal q
    pub flow_q: CochainSpace,
    /// primal boundary n - p
    pub flow_b: CochainSpace,
    /// primal n - p
    pub effort_p: CochainSpace,
    /// dual n - q
    pub effort_q: CochainSpace,
    /// dual boundary n - q
    pub effort_b: CochainSpace,
}

impl FlowEffortSpaces {
    pub fn new(complex: &ComplexSkeleton, p: usize, q: usize) -> Result<Self> {
        let n = complex.dim();
        if p + q != n + 1 || p < 1 || q < 1 {
            return Err(DecError::InvalidArgument(format!(
                "flow/effort degrees must satisfy p + q = n + 1 with p, q >= 1; \
                 got p = {}, q = {} on an n = {} complex",
                p, q, n
            )));
        }
        use crate::cochain::SpaceKind::*;
        Ok(FlowEffortSpaces {
            n,
            p,
            q,
            flow_p: ops::space(complex, Dual, p)?,
            flow_q: ops::space(complex, Primal, q)?,
            flow_b: ops::space(complex, PrimalBoundary, n - p)?,
            effort_p: ops::space(complex, Primal, n - p)?,
            effort_q: ops::space(complex, Dual, n - q)?,
            effort_b: ops::space(complex, DualBoundary, n - q)?,
        })
    }

    pub fn flow_spaces(&self) -> Vec<CochainSpace> {
        vec![self.flow_p, self.flow_q, self.flow_b]
    }

    pub fn effort_spaces(&self) -> Vec<CochainSpace> {
        vec![self.effort_p, self.effort_q, self.effort_b]
    }

    pub fn flow_dim(&self) -> usize {
        self.flow_p.dim + self.flow_q.dim + self.flow_b.dim
    }

    pub fn effort_dim(&self) -> usize {
        self.effort_p.dim + self.effort_q.dim + self.effort_b.dim
    }
}

/// One element (f, e) of the flow/effort structure.
#[derive(Debug, Clone)]
pub struct DiracElement {
    pub flow_p: Cochain,
    pub flow_q: Cochain,
    pub flow_b: Cochain,
    pub effort_p: Cochain,
    pub effort_q: Cochain,
    pub effort_b: Cochain,
}

/// Names for the four blocks of the flow/effort structure map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureBlock {
    DualDerivative,
    BoundaryDerivative,
    PrimalDerivative,
    Trace,
}

impl StructureBlock {
    pub const ALL: [StructureBlock; 4] = [
        StructureBlock::DualDerivative,
        StructureBlock::BoundaryDerivative,
        StructureBlock::PrimalDerivative,
        StructureBlock::Trace,
    ];
}

impl fmt::Display for StructureBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureBlock::DualDerivative => "dual_derivative",
            StructureBlock::BoundaryDerivative => "boundary_derivative",
            StructureBlock::PrimalDerivative => "primal_derivative",
            StructureBlock::Trace => "trace",
        };
        write!(f, "{}", s)
    }
}

impl FromStr for StructureBlock {
    type Err = DecError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual_derivative" => Ok(StructureBlock::DualDerivative),
            "boundary_derivative" => Ok(StructureBlock::BoundaryDerivative),
            "primal_derivative" => Ok(StructureBlock::PrimalDerivative),
            "trace" => Ok(StructureBlock::Trace),
            other => Err(DecError::InvalidArgument(format!(
                "unknown structure block '{}'; expected one of dual_derivative, \
                 boundary_derivative, primal_derivative, trace",
                other
            ))),
        }
    }
}

/// Flow/effort Dirac structure with boundary port, assembled from the
/// exterior derivative, its dual, the boundary dual derivative and the
/// trace, each carrying its sign.
#[derive(Debug, Clone)]
pub struct SimplicialDiracStructure {
    pub spaces: FlowEffortSpaces,
    dual_derivative: LinearMap,
    boundary_derivative: LinearMap,
    primal_derivative: LinearMap,
    trace: LinearMap,
}

impl SimplicialDiracStructure {
    pub fn new(complex: &ComplexSkeleton, p: usize, q: usize) -> Result<Self> {
        let spaces = FlowEffortSpaces::new(complex, p, q)?;
        let n = spaces.n;
        let r_sign = sign::sign_flow_p(p, q);
        let tr_sign = sign::sign_flow_b(p);
        Ok(SimplicialDiracStructure {
            spaces,
            dual_derivative: ops::dual_exterior_derivative(complex, n - q, q)?.scale(r_sign),
            boundary_derivative: ops::boundary_dual_derivative(complex, n - q)?.scale(r_sign),
            primal_derivative: ops::exterior_derivative(complex, n - p)?,
            trace: ops::trace_map(complex, n - p, TraceKind::Primal)?.scale(tr_sign),
        })
    }

    /// Copy with one block negated. Used to show every sign is load-bearing.
    pub fn flip_block(&self, block: StructureBlock) -> Self {
        let mut out = self.clone();
        let target = match block {
            StructureBlock::DualDerivative => &mut out.dual_derivative,
            StructureBlock::BoundaryDerivative => &mut out.boundary_derivative,
            StructureBlock::PrimalDerivative => &mut out.primal_derivative,
            StructureBlock::Trace => &mut out.trace,
        };
        *target = target.scale(-1.0);
        out
    }

    pub fn block(&self, block: StructureBlock) -> &LinearMap {
        match block {
            StructureBlock::DualDerivative => &self.dual_derivative,
            StructureBlock::BoundaryDerivative => &self.boundary_derivative,
            StructureBlock::PrimalDerivative => &self.primal_derivative,
            StructureBlock::Trace => &self.trace,
        }
    }

    pub fn apply(
        &self,
        e_p: &Cochain,
        e_q: &Cochain,
        e_b: &Cochain,
    ) -> Result<(Cochain, Cochain, Cochain)> {
        let f_p = Cochain::new(
            self.spaces.flow_p,
            self.dual_derivative
                .apply(e_q)?
                .values
                .iter()
                .zip(&self.boundary_derivative.apply(e_b)?.values)
                .map(|(a, b)| a + b)
                .collect(),
        )?;
        let f_q = self.primal_derivative.apply(e_p)?;
        let f_b = self.trace.apply(e_p)?;
        Ok((f_p, f_q, f_b))
    }

    pub fn element_from_efforts(
        &self,
        e_p: Cochain,
        e_q: Cochain,
        e_b: Cochain,
    ) -> Result<DiracElement> {
        let (f_p, f_q, f_b) = self.apply(&e_p, &e_q, &e_b)?;
        Ok(DiracElement {
            flow_p: f_p,
            flow_q: f_q,
            flow_b: f_b,
            effort_p: e_p,
            effort_q: e_q,
            effort_b: e_b,
        })
    }

    /// The whole effort-to-flow map as one stacked matrix, slot order
    /// (e_p, e_q, e_b) to (f_p, f_q, f_b).
    pub fn effort_to_flow_map(&self) -> Result<StackedMap> {
        StackedMap::from_blocks(
            self.spaces.effort_spaces(),
            self.spaces.flow_spaces(),
            &[
                (0, 1, &self.dual_derivative),
                (0, 2, &self.boundary_derivative),
                (1, 0, &self.primal_derivative),
                (2, 0, &self.trace),
            ],
        )
    }
}

/// Names for the four blocks of the canonical structure map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalBlock {
    RhoRate,
    PiFromRho,
    PiFromBoundary,
    BoundaryRate,
}

impl CanonicalBlock {
    pub const ALL: [CanonicalBlock; 4] = [
        CanonicalBlock::RhoRate,
        CanonicalBlock::PiFromRho,
        CanonicalBlock::PiFromBoundary,
        CanonicalBlock::BoundaryRate,
    ];
}

impl fmt::Display for CanonicalBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CanonicalBlock::RhoRate => "rho_rate",
            CanonicalBlock::PiFromRho => "pi_from_rho",
            CanonicalBlock::PiFromBoundary => "pi_from_boundary",
            CanonicalBlock::BoundaryRate => "boundary_rate",
        };
        write!(f, "{}", s)
    }
}

impl FromStr for CanonicalBlock {
    type Err = DecError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho_rate" => Ok(CanonicalBlock::RhoRate),
            "pi_from_rho" => Ok(CanonicalBlock::PiFromRho),
            "pi_from_boundary" => Ok(CanonicalBlock::PiFromBoundary),
            "boundary_rate" => Ok(CanonicalBlock::BoundaryRate),
            other => Err(DecError::InvalidArgument(format!(
                "unknown canonical block '{}'; expected one of rho_rate, \
                 pi_from_rho, pi_from_boundary, boundary_rate",
                other
            ))),
        }
    }
}

/// Canonical phase-space structure for a configuration density of primal
/// degree k and momentum of dual degree n - k:
///
/// ```text
///   rho_dot   = e_pi
///   pi_dot    = -(-1)^{k(n-k)} (e_rho + d_b e_b)
///   rho_b_dot = -tr e_pi
/// ```
///
/// Its bilinear form pairs the boundary effort against the trace of the
/// configuration rate, which is exactly what makes the graph isotropic.
#[derive(Debug, Clone)]
pub struct CanonicalStructure {
    pub n: usize,
    pub k: usize,
    /// primal k
    pub rho_space: CochainSpace,
    /// dual n - k
    pub pi_space: CochainSpace,
    /// primal boundary k
    pub rho_b_space: CochainSpace,
    /// dual n - k
    pub e_rho_space: CochainSpace,
    /// primal k
    pub e_pi_space: CochainSpace,
    /// dual boundary n - k - 1
    pub e_b_space: CochainSpace,
    rho_rate: LinearMap,
    pi_from_rho: LinearMap,
    pi_from_boundary: LinearMap,
    boundary_rate: LinearMap,
    trace_rho: LinearMap,
}

impl CanonicalStructure {
    pub fn new(complex: &ComplexSkeleton, k: usize) -> Result<Self> {
        let n = complex.dim();
        if k >= n {
            return Err(DecError::DegreeOutOfRange { degree: k, dim: n });
        }
        use crate::cochain::SpaceKind::*;
        let rho_space = ops::space(complex, Primal, k)?;
        let pi_space = ops::space(complex, Dual, n - k)?;
        let rho_b_space = ops::space(complex, PrimalBoundary, k)?;
        let e_rho_space = ops::space(complex, Dual, n - k)?;
        let e_pi_space = ops::space(complex, Primal, k)?;
        let e_b_space = ops::space(complex, DualBoundary, n - k - 1)?;
        let s = sign::sign_canonical_pi(n, k);
        let trace_rho = ops::trace_map(complex, k, TraceKind::Primal)?;
        Ok(CanonicalStructure {
            n,
            k,
            rho_space,
            pi_space,
            rho_b_space,
            e_rho_space,
            e_pi_space,
            e_b_space,
            rho_rate: LinearMap::identity(e_pi_space).retyped(e_pi_space, rho_space),
            pi_from_rho: LinearMap::identity(e_rho_space).retyped(e_rho_space, pi_space).scale(s),
            pi_from_boundary: ops::boundary_dual_derivative(complex, n - k - 1)?.scale(s),
            boundary_rate: trace_rho.clone().retyped(e_pi_space, rho_b_space).scale(-1.0),
            trace_rho,
        })
    }

    pub fn flip_block(&self, block: CanonicalBlock) -> Self {
        let mut out = self.clone();
        let target = match block {
            CanonicalBlock::RhoRate => &mut out.rho_rate,
            CanonicalBlock::PiFromRho => &mut out.pi_from_rho,
            CanonicalBlock::PiFromBoundary => &mut out.pi_from_boundary,
            CanonicalBlock::BoundaryRate => &mut out.boundary_rate,
        };
        *target = target.scale(-1.0);
        out
    }

    pub fn block(&self, block: CanonicalBlock) -> &LinearMap {
        match block {
            CanonicalBlock::RhoRate => &self.rho_rate,
            CanonicalBlock::PiFromRho => &self.pi_from_rho,
            CanonicalBlock::PiFromBoundary => &self.pi_from_boundary,
            CanonicalBlock::BoundaryRate => &self.boundary_rate,
        }
    }

    pub fn flow_spaces_vec(&self) -> Vec<CochainSpace> {
        vec![self.rho_space, self.pi_space, self.rho_b_space]
    }

    pub fn effort_spaces_vec(&self) -> Vec<CochainSpace> {
        vec![self.e_rho_space, self.e_pi_space, self.e_b_space]
    }

    /// The structure map as one stacked matrix, slot order
    /// (e_rho, e_pi, e_b) to (rho_dot, pi_dot, rho_b_dot).
    pub fn sharp_map(&self) -> Result<StackedMap> {
        StackedMap::from_blocks(
            self.effort_spaces_vec(),
            self.flow_spaces_vec(),
            &[
                (0, 1, &self.rho_rate),
                (1, 0, &self.pi_from_rho),
                (1, 2, &self.pi_from_boundary),
                (2, 1, &self.boundary_rate),
            ],
        )
    }

    pub fn apply(
        &self,
        e_rho: &Cochain,
        e_pi: &Cochain,
        e_b: &Cochain,
    ) -> Result<(Cochain, Cochain, Cochain)> {
        let rho_dot = self.rho_rate.apply(e_pi)?;
        let pi_dot = Cochain::new(
            self.pi_space,
            self.pi_from_rho
                .apply(e_rho)?
                .values
                .iter()
                .zip(&self.pi_from_boundary.apply(e_b)?.values)
                .map(|(a, b)| a + b)
                .collect(),
        )?;
        let rho_b_dot = self.boundary_rate.apply(e_pi)?;
        Ok((rho_dot, pi_dot, rho_b_dot))
    }
}

/// Common interface for numeric isotropy checking: a structure is the
/// graph of a flow map over efforts, together with the bilinear form it
/// must be maximally isotropic under.
pub trait DiracStructure {
    fn structure_id(&self) -> String;
    fn effort_spaces(&self) -> Vec<CochainSpace>;
    fn flow_spaces(&self) -> Vec<CochainSpace>;
    /// Stacked flows from stacked efforts.
    fn flows_from_efforts(&self, efforts: &[f64]) -> Result<Vec<f64>>;
    /// The symmetric pairing of two graph elements (f1, e1), (f2, e2).
    fn pairing(&self, f1: &[f64], e1: &[f64], f2: &[f64], e2: &[f64]) -> Result<f64>;
}

impl DiracStructure for SimplicialDiracStructure {
    fn structure_id(&self) -> String {
        format!(
            "simplicial_dirac(n={},p={},q={})",
            self.spaces.n, self.spaces.p, self.spaces.q
        )
    }

    fn effort_spaces(&self) -> Vec<CochainSpace> {
        self.spaces.effort_spaces()
    }

    fn flow_spaces(&self) -> Vec<CochainSpace> {
        self.spaces.flow_spaces()
    }

    fn flows_from_efforts(&self, efforts: &[f64]) -> Result<Vec<f64>> {
        let e = crate::cochain::split(&self.effort_spaces(), efforts)?;
        let (f_p, f_q, f_b) = self.apply(&e[0], &e[1], &e[2])?;
        Ok(stack(&[&f_p, &f_q, &f_b]))
    }

    fn pairing(&self, f1: &[f64], e1: &[f64], f2: &[f64], e2: &[f64]) -> Result<f64> {
        let n = self.spaces.n;
        let f1 = crate::cochain::split(&self.flow_spaces(), f1)?;
        let e1 = crate::cochain::split(&self.effort_spaces(), e1)?;
        let f2 = crate::cochain::split(&self.flow_spaces(), f2)?;
        let e2 = crate::cochain::split(&self.effort_spaces(), e2)?;
        Ok(ops::duality_pairing(n, &e1[0], &f2[0])?
            + ops::duality_pairing(n, &e1[1], &f2[1])?
            + ops::duality_pairing(n, &e2[0], &f1[0])?
            + ops::duality_pairing(n, &e2[1], &f1[1])?
            + ops::duality_pairing(n, &e1[2], &f2[2])?
            + ops::duality_pairing(n, &e2[2], &f1[2])?)
    }
}

impl DiracStructure for CanonicalStructure {
    fn structure_id(&self) -> String {
        format!("canonical(n={},k={})", self.n, self.k)
    }

    fn effort_spaces(&self) -> Vec<CochainSpace> {
        self.effort_spaces_vec()
    }

    fn flow_spaces(&self) -> Vec<CochainSpace> {
        self.flow_spaces_vec()
    }

    fn flows_from_efforts(&self, efforts: &[f64]) -> Result<Vec<f64>> {
        let e = crate::cochain::split(&self.effort_spaces_vec(), efforts)?;
        let (rho_dot, pi_dot, rho_b_dot) = self.apply(&e[0], &e[1], &e[2])?;
        Ok(stack(&[&rho_dot, &pi_dot, &rho_b_dot]))
    }

    fn pairing(&self, f1: &[f64], e1: &[f64], f2: &[f64], e2: &[f64]) -> Result<f64> {
        let n = self.n;
        let f1 = crate::cochain::split(&self.flow_spaces_vec(), f1)?;
        let e1 = crate::cochain::split(&self.effort_spaces_vec(), e1)?;
        let f2 = crate::cochain::split(&self.flow_spaces_vec(), f2)?;
        let e2 = crate::cochain::split(&self.effort_spaces_vec(), e2)?;
        // Boundary term pairs e_b against the trace of the configuration
        // rate, not against the boundary flow slot.
        let tr_rho_dot_1 = self.trace_rho.apply(&f1[0])?;
        let tr_rho_dot_2 = self.trace_rho.apply(&f2[0])?;
        Ok(ops::duality_pairing(n, &e1[0], &f2[0])?
            + ops::duality_pairing(n, &e1[1], &f2[1])?
            + ops::duality_pairing(n, &e2[0], &f1[0])?
            + ops::duality_pairing(n, &e2[1], &f1[1])?
            + ops::duality_pairing(n, &e1[2], &tr_rho_dot_2)?
            + ops::duality_pairing(n, &e2[2], &tr_rho_dot_1)?)
    }
}

/// Result of a numeric maximal-isotropy check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub structure_id: String,
    pub samples: usize,
    pub max_self_pairing: f64,
    pub max_cross_pairing: f64,
    pub dim_d: usize,
    pub dim_f: usize,
    pub pass: bool,
}

/// Sample random efforts, check that all self and cross pairings of graph
/// elements vanish to `tol`, and confirm the graph dimension equals the
/// flow-space dimension by the rank of the stacked graph matrix.
pub fn check_maximal_isotropy(
    structure: &dyn DiracStructure,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<IsotropyReport> {
    let effort_dim = stacked_dim(&structure.effort_spaces());
    let flow_dim = stacked_dim(&structure.flow_spaces());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..effort_dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
    };
    let mut max_self = 0.0_f64;
    let mut max_cross = 0.0_f64;
    for _ in 0..samples {
        let e1 = draw(&mut rng);
        let e2 = draw(&mut rng);
        let f1 = structure.flows_from_efforts(&e1)?;
        let f2 = structure.flows_from_efforts(&e2)?;
        max_self = max_self.max(structure.pairing(&f1, &e1, &f1, &e1)?.abs());
        max_self = max_self.max(structure.pairing(&f2, &e2, &f2, &e2)?.abs());
        max_cross = max_cross.max(structure.pairing(&f1, &e1, &f2, &e2)?.abs());
    }

    // Graph dimension: rank of [B; I] over effort coordinates, where B maps
    // the i-th effort basis vector to its flows.
    let mut stacked = nalgebra::DMatrix::<f64>::zeros(flow_dim + effort_dim, effort_dim);
    for j in 0..effort_dim {
        let mut e = vec![0.0; effort_dim];
        e[j] = 1.0;
        let f = structure.flows_from_efforts(&e)?;
        for (i, v) in f.iter().enumerate() {
            stacked[(i, j)] = *v;
        }
        stacked[(flow_dim + j, j)] = 1.0;
    }
    let svd = stacked.svd(false, false);
    let s_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let dim_d = if s_max == 0.0 {
        0
    } else {
        svd.singular_values.iter().filter(|s| **s > 1e-10 * s_max).count()
    };

    let pass = max_self <= tol && max_cross <= tol && dim_d == flow_dim;
    Ok(IsotropyReport {
        structure_id: structure.structure_id(),
        samples,
        max_self_pairing: max_self,
        max_cross_pairing: max_cross,
        dim_d,
        dim_f: flow_dim,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_interval_complex, build_triangle_strip_complex};
    use crate::sparse;

    #[test]
    fn interval_flow_effort_dimensions() {
        let c = build_interval_complex(1.0, 2).unwrap();
        let s = FlowEffortSpaces::new(&c, 1, 1).unwrap();
        assert_eq!(s.flow_p.dim, 3);
        assert_eq!(s.flow_q.dim, 2);
        assert_eq!(s.flow_b.dim, 2);
        assert_eq!(s.flow_dim(), 7);
        assert_eq!(s.effort_dim(), 7);

        let c1 = build_interval_complex(1.0, 1).unwrap();
        let s1 = FlowEffortSpaces::new(&c1, 1, 1).unwrap();
        assert_eq!(s1.flow_dim(), 5);
        assert_eq!(s1.effort_dim(), 5);
    }

    #[test]
    fn strip_flow_effort_dimensions() {
        let c = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        let v = c.simplex_count(0);
        let e = c.simplex_count(1);
        let t = c.simplex_count(2);
        let bv = c.boundary_count(0);
        let be = c.boundary_count(1);

        let s21 = FlowEffortSpaces::new(&c, 2, 1).unwrap();
        assert_eq!(s21.flow_dim(), v + e + bv);
        assert_eq!(s21.effort_dim(), v + e + bv);

        let s12 = FlowEffortSpaces::new(&c, 1, 2).unwrap();
        assert_eq!(s12.flow_dim(), e + t + be);
        assert_eq!(s12.effort_dim(), e + t + be);
    }

    #[test]
    fn rejects_bad_degree_pairs() {
        let c = build_interval_complex(1.0, 2).unwrap();
        assert!(FlowEffortSpaces::new(&c, 1, 2).is_err());
        assert!(FlowEffortSpaces::new(&c, 2, 0).is_err());
    }

    #[test]
    fn blocks_trace_to_operators_and_signs() {
        // Every block is the shared operator times the shared sign,
        // bit-exact down to the raw transpose form.
        let c = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        for (p, q) in [(1usize, 2usize), (2, 1)] {
            let d = SimplicialDiracStructure::new(&c, p, q).unwrap();
            let n = 2;
            let r = sign::sign_flow_p(p, q);

            let raw = ops::exterior_derivative(&c, q - 1).unwrap();
            let expected = sparse::scale(
                &sparse::transpose(&raw.matrix),
                r * sign::neg_one_pow(q),
            );
            assert!(sparse::exactly_equal(
                &d.block(StructureBlock::DualDerivative).matrix,
                &expected
            ));

            let raw_tr = ops::trace_map(&c, q - 1, TraceKind::Primal).unwrap();
            let expected_b = sparse::scale(
                &sparse::transpose(&raw_tr.matrix),
                r * sign::sign_boundary_derivative(n, n - q),
            );
            assert!(sparse::exactly_equal(
                &d.block(StructureBlock::BoundaryDerivative).matrix,
                &expected_b
            ));

            let expected_d = ops::exterior_derivative(&c, n - p).unwrap().matrix;
            assert!(sparse::exactly_equal(
                &d.block(StructureBlock::PrimalDerivative).matrix,
                &expected_d
            ));

            let expected_tr = sparse::scale(
                &ops::trace_map(&c, n - p, TraceKind::Primal).unwrap().matrix,
                sign::sign_flow_b(p),
            );
            assert!(sparse::exactly_equal(
                &d.block(StructureBlock::Trace).matrix,
                &expected_tr
            ));
        }
    }

    #[test]
    fn interval_structure_is_maximally_isotropic() {
        for cells in [1usize, 2, 5] {
            let c = build_interval_complex(1.0, cells).unwrap();
            let d = SimplicialDiracStructure::new(&c, 1, 1).unwrap();
            let report = check_maximal_isotropy(&d, 200, 1e-12, 42).unwrap();
            assert!(report.pass, "cells = {}: {:?}", cells, report);
            assert_eq!(report.dim_d, report.dim_f);
        }
    }

    #[test]
    fn strip_structures_are_maximally_isotropic() {
        let c = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        for (p, q) in [(1usize, 2usize), (2, 1)] {
            let d = SimplicialDiracStructure::new(&c, p, q).unwrap();
            let report = check_maximal_isotropy(&d, 200, 1e-12, 42).unwrap();
            assert!(report.pass, "(p,q) = ({},{}): {:?}", p, q, report);
        }
    }

    #[test]
    fn canonical_structures_are_maximally_isotropic() {
        let c1 = build_interval_complex(1.0, 3).unwrap();
        let d = CanonicalStructure::new(&c1, 0).unwrap();
        let report = check_maximal_isotropy(&d, 200, 1e-12, 7).unwrap();
        assert!(report.pass, "{:?}", report);

        let c2 = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        for k in [0usize, 1] {
            let d = CanonicalStructure::new(&c2, k).unwrap();
            let report = check_maximal_isotropy(&d, 200, 1e-12, 7).unwrap();
            assert!(report.pass, "k = {}: {:?}", k, report);
        }
    }

    #[test]
    fn any_single_block_flip_breaks_isotropy() {
        let c = build_interval_complex(1.0, 2).unwrap();
        let d = SimplicialDiracStructure::new(&c, 1, 1).unwrap();
        for block in StructureBlock::ALL {
            let bad = d.flip_block(block);
            let report = check_maximal_isotropy(&bad, 50, 1e-12, 3).unwrap();
            assert!(
                report.max_self_pairing >= 1e-3,
                "flip of {} went undetected: {:?}",
                block,
                report
            );
        }

        // The boundary_rate block does not enter the canonical bilinear
        // form (its boundary term pairs e_b with tr rho_dot), so its flip
        // is caught by the reduction composition check, not here.
        let canon = CanonicalStructure::new(&c, 0).unwrap();
        for block in [
            CanonicalBlock::RhoRate,
            CanonicalBlock::PiFromRho,
            CanonicalBlock::PiFromBoundary,
        ] {
            let bad = canon.flip_block(block);
            let report = check_maximal_isotropy(&bad, 50, 1e-12, 3).unwrap();
            assert!(
                report.max_self_pairing >= 1e-3,
                "flip of {} went undetected: {:?}",
                block,
                report
            );
        }
    }

    #[test]
    fn stacked_map_agrees_with_apply() {
        let c = build_triangle_strip_complex(1, 2, 1.0).unwrap();
        let d = SimplicialDiracStructure::new(&c, 2, 1).unwrap();
        let map = d.effort_to_flow_map().unwrap();
        let dim = stacked_dim(&d.effort_spaces());
        let efforts: Vec<f64> = (0..dim).map(|i| (i as f64) * 0.25 - 1.0).collect();
        let via_map = map.apply(&efforts);
        let via_apply = d.flows_from_efforts(&efforts).unwrap();
        assert_eq!(via_map, via_apply);

        let canon = CanonicalStructure::new(&c, 1).unwrap();
        let map = canon.sharp_map().unwrap();
        let dim = stacked_dim(&canon.effort_spaces_vec());
        let efforts: Vec<f64> = (0..dim).map(|i| 1.0 - (i as f64) * 0.5).collect();
        assert_eq!(
            map.apply(&efforts),
            canon.flows_from_efforts(&efforts).unwrap()
        );
    }

    #[test]
    fn isotropy_report_serializes() {
        let c = build_interval_complex(1.0, 2).unwrap();
        let d = SimplicialDiracStructure::new(&c, 1, 1).unwrap();
        let report = check_maximal_isotropy(&d, 10, 1e-12, 1).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"structure_id\""));
        assert!(text.contains("\"dim_d\":7"));
        let back: IsotropyReport = serde_json::from_str(&text).unwrap();
        assert!(back.pass);
    }
}
