use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

pub mod compare;
pub mod encode;
pub mod level_stats;
pub mod simulate;

/// Settings shared by every subcommand.
pub struct Context {
    pub workers: Option<usize>,
    /// Overrides read from `--config`.
    pub file: Map<String, Value>,
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

/// Writes a file through `f`, tagging I/O errors with the path.
pub fn write_with(path: &Path, f: impl FnOnce(&mut dyn Write) -> percolimit::Result<()>) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| match e {
        percolimit::Error::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
        e => e.into(),
    })?;
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_manifest(dir: &Path, manifest: &percolimit::Manifest) -> Result<(), CliError> {
    write_text(&dir.join("manifest.json"), &(manifest.to_json() + "\n"))
}

/// Runs `f` inside a pool of `workers` threads.
pub fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    let pool = b.build().map_err(|e| CliError::Usage(format!("workers: {e}")))?;
    Ok(pool.install(f))
}
