use std::io::{BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Writes `path` through a temporary file in the same directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> stable_rerank::Result<()>,
) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: &dyn std::fmt::Display| CliError::data(format!("{}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(|e| fail(&e))?;
    let tmp = NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    let mut w = BufWriter::new(tmp);
    body(&mut w).map_err(|e| CliError::at(path, e))?;
    let tmp = w.into_inner().map_err(|e| fail(&e.into_error()))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}
