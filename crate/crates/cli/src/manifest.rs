//! Run manifests: config echo, wall times, exit status, and a checksummed
//! inventory of every file in the run directory.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::{CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the run directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub step: u64,
    pub t: f64,
    pub velocity_file: String,
    pub stress_file: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupEntry {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub code_version: String,
    pub experiment: String,
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub start_unix_ms: u128,
    pub end_unix_ms: u128,
    /// "ok" or "blow-up".
    pub exit_status: String,
    pub blowup: Option<BlowupEntry>,
    pub t_end: f64,
    pub epsilon: f64,
    pub snapshots: Vec<SnapshotEntry>,
    pub files: Vec<FileEntry>,
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn sha256_file(path: &Path) -> Result<(u64, String)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    Ok((bytes.len() as u64, sha256_hex(&bytes)))
}

/// Recursively list files under `dir` (relative paths, sorted), skipping the
/// manifest itself.
pub fn inventory(dir: &Path) -> Result<Vec<FileEntry>> {
    let mut paths = Vec::new();
    collect_files(dir, dir, &mut paths)?;
    paths.sort();
    let mut entries = Vec::with_capacity(paths.len());
    for rel in paths {
        if rel == MANIFEST_NAME {
            continue;
        }
        let (bytes, sha256) = sha256_file(&dir.join(&rel))?;
        entries.push(FileEntry {
            path: rel,
            bytes,
            sha256,
        });
    }
    Ok(entries)
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    for entry in std::fs::read_dir(dir)
        .map_err(|e| CliError::io(format!("cannot list {}: {e}", dir.display())))?
    {
        let entry = entry?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path
                .strip_prefix(root)
                .expect("entry under root")
                .to_string_lossy()
                .replace('\\', "/");
            out.push(rel);
        }
    }
    Ok(())
}

impl RunManifest {
    /// Write atomically: serialize to a temp file, then rename into place.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::io(format!("manifest serialization: {e}")))?;
        let tmp = dir.join(format!("{MANIFEST_NAME}.tmp"));
        let final_path = dir.join(MANIFEST_NAME);
        std::fs::write(&tmp, body.as_bytes())?;
        std::fs::rename(&tmp, &final_path)?;
        Ok(final_path)
    }

    pub fn read(dir: &Path) -> Result<RunManifest> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
    }

    /// Verify that every listed file exists with a matching checksum.
    pub fn verify_files(&self, dir: &Path) -> Result<()> {
        for f in &self.files {
            let path = dir.join(&f.path);
            if !path.is_file() {
                return Err(CliError::Checksum(format!("missing file {}", f.path)));
            }
            let (bytes, sha) = sha256_file(&path)?;
            if bytes != f.bytes || sha != f.sha256 {
                return Err(CliError::Checksum(format!(
                    "{}: expected {} ({} bytes), found {} ({} bytes)",
                    f.path, f.sha256, f.bytes, sha, bytes
                )));
            }
        }
        Ok(())
    }
}
