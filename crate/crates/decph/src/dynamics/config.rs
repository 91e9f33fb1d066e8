//! Run configuration: the JSON schema, validation with field paths, and
//! assembly into a ready-to-integrate run.

use crate::cochain::{Cochain, SpaceKind};
use crate::dynamics::signal::{compile_signal, CellLaw, SignalSpec};
use crate::dynamics::variant::{lookup_variant, LinearPHSystem};
use crate::dynamics::BoundaryLaws;
use crate::error::{DecError, Result};
use crate::mesh::{self, ComplexSkeleton};
use crate::ops;
use serde::{Deserialize, Serialize};

fn config_err(path: &str, message: impl Into<String>) -> DecError {
    DecError::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Top-level run configuration. The material coefficients have no
/// defaults; a config that omits them is rejected at parse time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub mesh: MeshSpec,
    pub k: usize,
    pub variant: String,
    #[serde(rename = "T")]
    pub tension: f64,
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialSpec,
    pub boundary: BoundarySpec,
    /// Pass threshold for the final balance residual, relative to
    /// max(1, max H). Optional; 1e-10 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance_tol: Option<f64>,
}

/// Either an interval ({length, cells}) or a triangle strip
/// ({rows, cols, edge_len}); mixing the two groups is rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_len: Option<f64>,
}

impl MeshSpec {
    pub fn interval(length: f64, cells: usize) -> Self {
        MeshSpec {
            length: Some(length),
            cells: Some(cells),
            rows: None,
            cols: None,
            edge_len: None,
        }
    }

    pub fn strip(rows: usize, cols: usize, edge_len: f64) -> Self {
        MeshSpec {
            length: None,
            cells: None,
            rows: Some(rows),
            cols: Some(cols),
            edge_len: Some(edge_len),
        }
    }

    pub fn build(&self) -> Result<ComplexSkeleton> {
        let interval = self.length.is_some() || self.cells.is_some();
        let strip = self.rows.is_some() || self.cols.is_some() || self.edge_len.is_some();
        match (interval, strip) {
            (true, true) => Err(config_err(
                "mesh",
                "give either {length, cells} or {rows, cols, edge_len}, not a mix",
            )),
            (false, false) => Err(config_err(
                "mesh",
                "give either {length, cells} or {rows, cols, edge_len}",
            )),
            (true, false) => {
                let length = self
                    .length
                    .ok_or_else(|| config_err("mesh.length", "required for an interval mesh"))?;
                let cells = self
                    .cells
                    .ok_or_else(|| config_err("mesh.cells", "required for an interval mesh"))?;
                mesh::build_interval_complex(length, cells)
                    .map_err(|e| config_err("mesh", e.to_string()))
            }
            (false, true) => {
                let rows = self
                    .rows
                    .ok_or_else(|| config_err("mesh.rows", "required for a strip mesh"))?;
                let cols = self
                    .cols
                    .ok_or_else(|| config_err("mesh.cols", "required for a strip mesh"))?;
                let edge_len = self
                    .edge_len
                    .ok_or_else(|| config_err("mesh.edge_len", "required for a strip mesh"))?;
                mesh::build_triangle_strip_complex(rows, cols, edge_len)
                    .map_err(|e| config_err("mesh", e.to_string()))
            }
        }
    }
}

/// Initial data in canonical variables: a primal k-cochain u and a
/// momentum density p per dual cell. The reduced variant derives its
/// state as (d u, p).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub u: FieldSpec,
    pub p: FieldSpec,
}

/// One initial field. Sine data is available on interval meshes with
/// k = 0; samples work everywhere. For u the samples are the cochain
/// values themselves; for p they are momentum densities, integrated
/// against the dual cell measures.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    Sine { amplitude: f64, mode: usize },
    Samples { values: Vec<f64> },
}

/// Boundary signal per side. Sides split the boundary cells by the x
/// coordinate of their circumcenters relative to the mesh midline; on an
/// interval that is exactly the two endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub left: SignalSpec,
    pub right: SignalSpec,
}

fn x_extent(c: &ComplexSkeleton) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in c.vertices() {
        lo = lo.min(v[0]);
        hi = hi.max(v[0]);
    }
    (lo, hi)
}

fn sine_profile(
    c: &ComplexSkeleton,
    k: usize,
    amplitude: f64,
    mode: usize,
    path: &str,
) -> Result<Vec<f64>> {
    if c.dim() != 1 || k != 0 {
        return Err(config_err(
            &format!("{}.kind", path),
            "sine initial data needs an interval mesh with k = 0; use samples here",
        ));
    }
    if mode == 0 {
        return Err(config_err(&format!("{}.mode", path), "mode must be >= 1"));
    }
    let (lo, hi) = x_extent(c);
    let span = hi - lo;
    Ok(c.vertices()
        .iter()
        .map(|v| amplitude * (mode as f64 * std::f64::consts::PI * (v[0] - lo) / span).sin())
        .collect())
}

/// Build the potential cochain from its spec.
pub fn build_initial_u(
    c: &ComplexSkeleton,
    k: usize,
    spec: &FieldSpec,
    path: &str,
) -> Result<Cochain> {
    let space = ops::space(c, SpaceKind::Primal, k)?;
    match spec {
        FieldSpec::Zero => Ok(Cochain::zeros(space)),
        FieldSpec::Samples { values } => {
            if values.len() != space.dim {
                return Err(config_err(
                    &format!("{}.values", path),
                    format!("expected {} values, got {}", space.dim, values.len()),
                ));
            }
            Cochain::new(space, values.clone())
        }
        FieldSpec::Sine { amplitude, mode } => {
            let values = sine_profile(c, k, *amplitude, *mode, path)?;
            Cochain::new(space, values)
        }
    }
}

/// Build the momentum cochain from its spec: densities times the dual
/// cell measures.
pub fn build_initial_p(
    c: &ComplexSkeleton,
    k: usize,
    spec: &FieldSpec,
    path: &str,
) -> Result<Cochain> {
    let n = c.dim();
    let space = ops::space(c, SpaceKind::Dual, n - k)?;
    let measures = c.dual_measures(k);
    match spec {
        FieldSpec::Zero => Ok(Cochain::zeros(space)),
        FieldSpec::Samples { values } => {
            if values.len() != space.dim {
                return Err(config_err(
                    &format!("{}.values", path),
                    format!("expected {} values, got {}", space.dim, values.len()),
                ));
            }
            Cochain::new(
                space,
                values.iter().zip(measures).map(|(d, m)| d * m).collect(),
            )
        }
        FieldSpec::Sine { amplitude, mode } => {
            let density = sine_profile(c, k, *amplitude, *mode, path)?;
            Cochain::new(
                space,
                density.iter().zip(measures).map(|(d, m)| d * m).collect(),
            )
        }
    }
}

/// Compile the two side signals into per-cell laws, assigning cells to
/// sides by circumcenter x coordinate.
pub fn assemble_laws(c: &ComplexSkeleton, k: usize, spec: &BoundarySpec) -> Result<BoundaryLaws> {
    let left = compile_signal(&spec.left, "boundary.left")?;
    let right = compile_signal(&spec.right, "boundary.right")?;
    let (lo, hi) = x_extent(c);
    let mid = 0.5 * (lo + hi);
    let centers = c.circumcenters(k);
    let cells: Vec<CellLaw> = c
        .boundary_cells(k)
        .iter()
        .map(|&cell| if centers[cell][0] <= mid { left } else { right })
        .collect();
    Ok(BoundaryLaws::new(cells))
}

/// Everything needed to run: mesh, system, laws, initial state, grid.
#[derive(Debug)]
pub struct PreparedRun {
    pub complex: ComplexSkeleton,
    pub system: LinearPHSystem,
    pub laws: BoundaryLaws,
    pub initial_state: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub balance_tol: f64,
}

impl SimConfig {
    /// Validate every field and assemble the run. Errors carry the
    /// config path of the offending field.
    pub fn prepare(&self) -> Result<PreparedRun> {
        let complex = self.mesh.build()?;
        let n = complex.dim();
        if self.k >= n {
            return Err(config_err(
                "k",
                format!("k must be below the mesh dimension {}", n),
            ));
        }
        if !(self.tension > 0.0) || !self.tension.is_finite() {
            return Err(config_err("T", "must be positive and finite"));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(config_err("mu", "must be positive and finite"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(config_err("dt", "must be positive and finite"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(config_err("t_end", "must be positive and finite"));
        }
        let steps_f = self.t_end / self.dt;
        let steps = steps_f.round();
        if (steps_f - steps).abs() > 1e-9 * steps_f.max(1.0) || steps < 1.0 {
            return Err(config_err(
                "t_end",
                format!("must be a whole number of dt steps, got t_end/dt = {}", steps_f),
            ));
        }
        let balance_tol = self.balance_tol.unwrap_or(1e-10);
        if !(balance_tol > 0.0) || !balance_tol.is_finite() {
            return Err(config_err("balance_tol", "must be positive and finite"));
        }
        let variant = lookup_variant(&self.variant).map_err(|_| {
            config_err(
                "variant",
                format!(
                    "unknown variant '{}'; registered: {}",
                    self.variant,
                    crate::dynamics::variant_registry()
                        .iter()
                        .map(|v| v.name())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            )
        })?;
        let system = variant.build(&complex, self.k, self.tension, self.mu)?;
        let u = build_initial_u(&complex, self.k, &self.initial.u, "initial.u")?;
        let p = build_initial_p(&complex, self.k, &self.initial.p, "initial.p")?;
        let initial_state = variant.initial_state(&complex, self.k, &u, &p)?;
        let laws = assemble_laws(&complex, self.k, &self.boundary)?;
        Ok(PreparedRun {
            complex,
            system,
            laws,
            initial_state,
            dt: self.dt,
            steps: steps as usize,
            balance_tol,
        })
    }
}
