//! Run manifests and atomic output writing.
//!
//! Every command writes a manifest listing the effective configuration, the
//! seeds, and an FNV-1a hash of every input and artifact, enough to verify a
//! bit-for-bit reproduction within one build.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde_json::{json, Value};

pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn hash_file(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(format!("{:016x}", fnv64(&bytes)))
}

/// Writes via a temp file in the same directory, then renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Creates the output directory; refuses to reuse a non-empty one without
/// `force`.
pub fn prepare_out_dir(path: &Path, force: bool) -> anyhow::Result<()> {
    if path.exists() {
        let non_empty = std::fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .next()
            .is_some();
        if non_empty && !force {
            bail!(
                "output directory {} is not empty (pass --force to overwrite)",
                path.display()
            );
        }
    } else {
        std::fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))?;
    }
    Ok(())
}

pub struct ManifestBuilder {
    command: String,
    config: Value,
    seeds: Vec<u64>,
    inputs: Vec<(String, String)>,
    artifacts: Vec<(String, String)>,
    out_dir: PathBuf,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: Value, seeds: &[u64], out_dir: &Path) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config,
            seeds: seeds.to_vec(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
            out_dir: out_dir.to_path_buf(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> anyhow::Result<()> {
        self.inputs
            .push((path.display().to_string(), hash_file(path)?));
        Ok(())
    }

    /// Records an artifact by its path relative to the output directory.
    pub fn record_artifact(&mut self, relative: &str) -> anyhow::Result<()> {
        let full = self.out_dir.join(relative);
        self.artifacts
            .push((relative.to_string(), hash_file(&full)?));
        Ok(())
    }

    pub fn write(self) -> anyhow::Result<()> {
        let manifest = json!({
            "command": self.command,
            "config": self.config,
            "seeds": self.seeds,
            "inputs": self.inputs.iter().map(|(p, h)| json!({"path": p, "fnv64": h})).collect::<Vec<_>>(),
            "artifacts": self.artifacts.iter().map(|(p, h)| json!({"path": p, "fnv64": h})).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&manifest)?;
        write_atomic(&self.out_dir.join("manifest.json"), text.as_bytes())
    }
}
