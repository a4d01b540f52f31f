use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Output directory plus the digest of every file written to it.
pub struct Output {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
        self.files.insert(name.to_string(), sha256_hex(data));
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.bytes(name, s.as_bytes())
    }

    /// Let `write` produce the file, then record its digest.
    pub fn csv(&mut self, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        write(&path).with_context(|| format!("writing {}", path.display()))?;
        let data = std::fs::read(&path)?;
        self.files.insert(name.to_string(), sha256_hex(&data));
        Ok(())
    }

    pub fn manifest(
        mut self,
        verb: &str,
        raw_config: &[u8],
        cfg: &ExperimentConfig,
        failed: &[String],
    ) -> Result<()> {
        let files = std::mem::take(&mut self.files);
        let m = json!({
            "verb": verb,
            "config_sha256": sha256_hex(raw_config),
            "versions": {
                "breaklab": env!("CARGO_PKG_VERSION"),
            },
            "precision": cfg.precision,
            "seed": cfg.seed,
            "levels": cfg.levels,
            "failed_checks": failed,
            "files": files,
        });
        self.json("manifest.json", &m)
    }
}
