//! Atomic artifact writes and the manifest that accompanies each artifact.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub manifest_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub artifact: PathBuf,
    pub wall_time_seconds: f64,
    pub threads: usize,
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    artifact.with_file_name(name)
}

/// Writes `contents` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_manifest(artifact: &Path, manifest: &Manifest<'_>) -> std::io::Result<PathBuf> {
    let path = manifest_path(artifact);
    let mut body = serde_json::to_vec_pretty(manifest).map_err(std::io::Error::other)?;
    body.push(b'\n');
    write_atomic(&path, &body)?;
    Ok(path)
}
