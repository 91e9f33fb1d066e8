use super::ComplexSkeleton;
use crate::error::{DecError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MESH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexBlock {
    pub degree: usize,
    pub tuples: Vec<Vec<usize>>,
    pub orientations: Vec<i8>,
}

/// On-disk mesh document. Field order is the struct order, so repeated
/// writes of the same complex are byte-identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub format_version: u32,
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<SimplexBlock>,
    pub boundary_flags: Vec<Vec<bool>>,
}

impl MeshFile {
    pub fn from_complex(c: &ComplexSkeleton) -> Self {
        let simplices = (0..=c.dim())
            .map(|k| SimplexBlock {
                degree: k,
                tuples: c.simplices(k).to_vec(),
                orientations: c.orientations(k).iter().map(|&o| o as i8).collect(),
            })
            .collect();
        let boundary_flags = (0..c.dim()).map(|k| c.boundary_flags(k).to_vec()).collect();
        MeshFile {
            format_version: MESH_FORMAT_VERSION,
            dimension: c.dim(),
            vertices: c.vertices().to_vec(),
            simplices,
            boundary_flags,
        }
    }

    /// Rebuild the complex from the stored top simplices, then cross-check
    /// the remaining stored data so a hand-edited file cannot smuggle in an
    /// inconsistent skeleton.
    pub fn into_complex(self) -> Result<ComplexSkeleton> {
        if self.format_version != MESH_FORMAT_VERSION {
            return Err(DecError::InvalidArgument(format!(
                "unsupported mesh format version {} (expected {})",
                self.format_version, MESH_FORMAT_VERSION
            )));
        }
        let top = self
            .simplices
            .iter()
            .find(|b| b.degree == self.dimension)
            .ok_or_else(|| DecError::InvalidMesh("missing top-degree simplex block".into()))?;
        if top.orientations.len() != top.tuples.len() {
            return Err(DecError::InvalidMesh(
                "orientation list length differs from tuple count".into(),
            ));
        }
        let oriented: Vec<Vec<usize>> = top
            .tuples
            .iter()
            .zip(&top.orientations)
            .map(|(t, &o)| {
                let mut t = t.clone();
                if o == -1 && t.len() >= 2 {
                    t.swap(0, 1);
                }
                t
            })
            .collect();
        let complex = ComplexSkeleton::from_simplices(self.dimension, self.vertices, &oriented)?;
        for block in &self.simplices {
            if block.degree > self.dimension {
                return Err(DecError::InvalidMesh(format!(
                    "simplex block of degree {} exceeds dimension",
                    block.degree
                )));
            }
            if block.tuples.len() != complex.simplex_count(block.degree) {
                return Err(DecError::InvalidMesh(format!(
                    "degree-{} block lists {} simplices, reconstruction has {}",
                    block.degree,
                    block.tuples.len(),
                    complex.simplex_count(block.degree)
                )));
            }
        }
        for (k, flags) in self.boundary_flags.iter().enumerate() {
            if flags != complex.boundary_flags(k) {
                return Err(DecError::InvalidMesh(format!(
                    "stored degree-{} boundary flags contradict the reconstruction",
                    k
                )));
            }
        }
        Ok(complex)
    }
}

pub fn write_mesh_file(c: &ComplexSkeleton, path: &Path) -> Result<()> {
    let doc = MeshFile::from_complex(c);
    let json = serde_json::to_string_pretty(&doc)?;
    crate::write_atomic(path, json.as_bytes())
}

pub fn read_mesh_file(path: &Path) -> Result<ComplexSkeleton> {
    let text = std::fs::read_to_string(path)?;
    let doc: MeshFile = serde_json::from_str(&text)?;
    doc.into_complex()
}
