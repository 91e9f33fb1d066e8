//! Discrete exterior calculus on oriented simplicial complexes with
//! circumcentric duals, Dirac structures built from the discrete operators,
//! gauge-symmetry Poisson reduction as explicit linear-map composition, and
//! port-Hamiltonian dynamics with boundary energy ports.
//!
//! The layering is strict: `mesh` knows geometry, `ops` turns geometry into
//! typed linear maps, `dirac` and `reduction` combine maps into structures
//! and verify their identities, `dynamics` integrates them in time. All
//! structural signs come from the `sign` module.

// Positivity guards are written `!(x > 0.0)` so NaN fails them; the
// suggested `x <= 0.0` would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cochain;
pub mod dirac;
pub mod dynamics;
pub mod error;
pub mod mesh;
pub mod ops;
pub mod reduction;
pub mod sign;
pub mod sparse;

pub use cochain::{Cochain, CochainSpace, LinearMap, SpaceKind};
pub use error::{DecError, Result};
pub use mesh::ComplexSkeleton;

use std::path::Path;

/// Write a file atomically: write to a sibling temp file, then rename.
/// Readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| DecError::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = parent.join(tmp_name);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join(format!("decph-atomic-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
