//! Boundary effort signals, selected by name at runtime.
//!
//! A signal kind turns a config entry into the law for one boundary cell:
//! either an explicit function of time (zero, constant, sine) or the
//! velocity clamp, which closes the loop through the system's own boundary
//! feedback row so the boundary displacement rate stays zero.

use crate::error::{DecError, Result};
use serde::{Deserialize, Serialize};

/// Raw config entry for one side of the boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

impl SignalSpec {
    pub fn zero() -> Self {
        SignalSpec {
            kind: "zero".into(),
            value: None,
            amplitude: None,
            omega: None,
            phase: None,
        }
    }
}

/// a * sin(omega t + phase) + offset; covers zero and constant as
/// degenerate cases.
#[derive(Debug, Clone, Copy)]
pub struct TimeSignal {
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub offset: f64,
}

impl TimeSignal {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.phase).sin() + self.offset
    }
}

/// The compiled law for one boundary cell.
#[derive(Debug, Clone, Copy)]
pub enum CellLaw {
    /// Effort is this function of time.
    Open(TimeSignal),
    /// Effort is the system's boundary feedback row applied to the state,
    /// chosen so the boundary velocity trace vanishes.
    VelocityClamp,
}

/// One registered signal kind: validates its parameters and compiles a
/// cell law.
pub trait SignalKind {
    fn name(&self) -> &'static str;
    fn build(&self, spec: &SignalSpec, path: &str) -> Result<CellLaw>;
}

fn reject_params(spec: &SignalSpec, path: &str, allowed: &[&str]) -> Result<()> {
    let present: [(&str, bool); 4] = [
        ("value", spec.value.is_some()),
        ("amplitude", spec.amplitude.is_some()),
        ("omega", spec.omega.is_some()),
        ("phase", spec.phase.is_some()),
    ];
    for (field, here) in present {
        if here && !allowed.contains(&field) {
            return Err(DecError::Config {
                path: format!("{}.{}", path, field),
                message: format!("not a parameter of the '{}' signal", spec.kind),
            });
        }
    }
    Ok(())
}

struct Zero;

impl SignalKind for Zero {
    fn name(&self) -> &'static str {
        "zero"
    }

    fn build(&self, spec: &SignalSpec, path: &str) -> Result<CellLaw> {
        reject_params(spec, path, &[])?;
        Ok(CellLaw::Open(TimeSignal {
            amplitude: 0.0,
            omega: 0.0,
            phase: 0.0,
            offset: 0.0,
        }))
    }
}

struct Constant;

impl SignalKind for Constant {
    fn name(&self) -> &'static str {
        "constant"
    }

    fn build(&self, spec: &SignalSpec, path: &str) -> Result<CellLaw> {
        reject_params(spec, path, &["value"])?;
        let value = spec.value.ok_or_else(|| DecError::Config {
            path: format!("{}.value", path),
            message: "the 'constant' signal requires a value".into(),
        })?;
        Ok(CellLaw::Open(TimeSignal {
            amplitude: 0.0,
            omega: 0.0,
            phase: 0.0,
            offset: value,
        }))
    }
}

struct Sine;

impl SignalKind for Sine {
    fn name(&self) -> &'static str {
        "sine"
    }

    fn build(&self, spec: &SignalSpec, path: &str) -> Result<CellLaw> {
        reject_params(spec, path, &["amplitude", "omega", "phase"])?;
        let amplitude = spec.amplitude.ok_or_else(|| DecError::Config {
            path: format!("{}.amplitude", path),
            message: "the 'sine' signal requires an amplitude".into(),
        })?;
        let omega = spec.omega.ok_or_else(|| DecError::Config {
            path: format!("{}.omega", path),
            message: "the 'sine' signal requires an angular frequency".into(),
        })?;
        Ok(CellLaw::Open(TimeSignal {
            amplitude,
            omega,
            phase: spec.phase.unwrap_or(0.0),
            offset: 0.0,
        }))
    }
}

struct Fixed;

impl SignalKind for Fixed {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn build(&self, spec: &SignalSpec, path: &str) -> Result<CellLaw> {
        reject_params(spec, path, &[])?;
        Ok(CellLaw::VelocityClamp)
    }
}

/// All registered signal kinds.
pub fn signal_registry() -> Vec<Box<dyn SignalKind>> {
    vec![
        Box::new(Zero),
        Box::new(Constant),
        Box::new(Sine),
        Box::new(Fixed),
    ]
}

/// Find a signal kind by name.
pub fn lookup_signal(name: &str) -> Result<Box<dyn SignalKind>> {
    signal_registry()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| DecError::InvalidArgument(format!(
            "unknown signal kind '{}'; registered kinds: {}",
            name,
            signal_registry()
                .iter()
                .map(|s| s.name())
                .collect::<Vec<_>>()
                .join(", ")
        )))
}

/// Compile one spec into a cell law, reporting errors under `path`.
pub fn compile_signal(spec: &SignalSpec, path: &str) -> Result<CellLaw> {
    let kind = lookup_signal(&spec.kind).map_err(|_| DecError::Config {
        path: format!("{}.kind", path),
        message: format!(
            "unknown signal kind '{}'; registered kinds: {}",
            spec.kind,
            signal_registry()
                .iter()
                .map(|s| s.name())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    })?;
    kind.build(spec, path)
}
