//! Artifact collection and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Dot,
    Svg,
}

/// Artifacts are staged in memory and only written once a command has
/// finished computing, so a failing run leaves nothing behind.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Format, String)>,
    extra: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, format: Format, contents: String) {
        self.files.push((name.into(), format, contents));
    }

    /// A file written regardless of the format selection (grid images).
    pub fn add_always(&mut self, name: impl Into<String>, contents: String) {
        self.extra.push((name.into(), contents));
    }

    /// Writes the selected formats into `dir`; returns the written paths.
    pub fn commit(self, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let selected = self
            .files
            .into_iter()
            .filter(|(_, f, _)| formats.is_empty() || formats.contains(f))
            .map(|(n, _, c)| (n, c));
        let mut written = Vec::new();
        for (name, contents) in selected.chain(self.extra) {
            let path = dir.join(&name);
            write_atomic(&path, contents.as_bytes())?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("staging {}", path.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
