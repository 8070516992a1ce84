//! Output directory bookkeeping: hash-stamped CSV files and the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::CliError;

pub struct Output {
    pub dir: PathBuf,
    pub hash: String,
    files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// First line of every CSV we write.
pub fn hash_line(hash: &str) -> String {
    format!("# config_sha256={hash}\n")
}

impl Output {
    pub fn create(dir: &Path, hash: &str) -> Result<Output, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::new("io", format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            hash: hash.to_string(),
            files: BTreeMap::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write `body` (a CSV with header) behind the config-hash line.
    pub fn write_csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let text = hash_line(&self.hash) + body;
        self.write(name, &text)
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, text)
            .map_err(|e| CliError::new("io", format!("cannot write {}: {e}", path.display())))?;
        self.files
            .insert(name.to_string(), sha256_hex(text.as_bytes()));
        Ok(())
    }

    /// Record a file written elsewhere (e.g. incrementally).
    pub fn register(&mut self, name: &str) -> Result<(), CliError> {
        let bytes = fs::read(self.path(name))?;
        self.files.insert(name.to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn finish(self, command: &str, config: &Config, workers: usize) -> Result<(), CliError> {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = json!({
            "command": command,
            "config_sha256": self.hash,
            "seed": config.seed,
            "shots": config.shots,
            "workers": workers,
            "version": env!("CARGO_PKG_VERSION"),
            "created_unix": created,
            "files": self.files,
            "config": config,
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        let path = self.path("manifest.json");
        fs::write(&path, text)
            .map_err(|e| CliError::new("io", format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Shortest round-trip form; `inf` for infinities.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}
