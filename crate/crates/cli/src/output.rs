use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Collects the artifacts written by one command.
#[derive(Default)]
pub struct Outputs {
    pub written: Vec<String>,
}

fn parent(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails early, before any computation, when `path` cannot be created.
pub fn check_writable(field: &str, path: &Option<PathBuf>) -> CliResult<()> {
    if let Some(p) = path {
        let dir = parent(p);
        if !dir.is_dir() {
            return Err(CliError::usage(
                field,
                format!("directory {} does not exist", dir.display()),
            ));
        }
        if p.is_dir() {
            return Err(CliError::usage(
                field,
                format!("{} is a directory", p.display()),
            ));
        }
    }
    Ok(())
}

impl Outputs {
    /// Writes through a temporary file in the target directory, then renames.
    pub fn write(
        &mut self,
        field: &str,
        path: &Path,
        body: impl FnOnce(&mut dyn Write) -> scalecalc::Result<()>,
    ) -> CliResult<()> {
        let io_err = |e: std::io::Error| CliError::usage(field, format!("{}: {e}", path.display()));
        let tmp = NamedTempFile::new_in(parent(path)).map_err(io_err)?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            body(&mut w)?;
            w.flush().map_err(io_err)?;
        }
        tmp.persist(path).map_err(|e| io_err(e.error))?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(
        &mut self,
        field: &str,
        path: &Path,
        value: &T,
    ) -> CliResult<()> {
        self.write(field, path, |w| {
            serde_json::to_writer_pretty(&mut *w, value)
                .map_err(|e| scalecalc::Error::Format(e.to_string()))?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }
}

pub fn read_file(field: &str, path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::usage(field, format!("{}: {e}", path.display())))
}
