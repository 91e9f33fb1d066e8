pub mod mesh;
pub mod reduce;
pub mod simulate;
pub mod verify;

use decph::Result;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Global flags shared by every subcommand.
pub struct Context {
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn ensure_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    decph::write_atomic(path, &bytes)
}
