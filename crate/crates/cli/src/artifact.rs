use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub fn version() -> &'static str {
    option_env!("LANSLAB_VERSION").unwrap_or(concat!("v", env!("CARGO_PKG_VERSION")))
}

/// What was run and with which parameters; its hash tags every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub out_dir: String,
    pub seed: u64,
    pub version: String,
    /// Command-specific selections such as suites or sweep axes.
    pub selection: Value,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn new(command: &str, config_path: Option<&Path>, out_dir: &Path, selection: Value, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            out_dir: out_dir.display().to_string(),
            seed: config.seed,
            version: version().to_string(),
            selection,
            config: config.clone(),
        }
    }

    /// SHA-256 of the canonical JSON of the command, selection and resolved config;
    /// paths are left out so a relocated run keeps its hash.
    pub fn hash(&self) -> String {
        let canonical = json!({
            "command": self.command,
            "selection": self.selection,
            "config": self.config,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Output directory that stamps every file with the manifest hash.
pub struct Artifacts {
    root: PathBuf,
    hash: String,
    seed: u64,
}

impl Artifacts {
    pub fn create(root: &Path, manifest: &RunManifest) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        let out = Self { root: root.to_path_buf(), hash: manifest.hash(), seed: manifest.seed };
        let mut value = serde_json::to_value(manifest)?;
        value["manifest_hash"] = Value::String(out.hash.clone());
        out.write_raw("manifest.json", &value)?;
        Ok(out)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn child(&self, name: &str) -> anyhow::Result<Self> {
        let root = self.root.join(name);
        fs::create_dir_all(&root)?;
        Ok(Self { root, hash: self.hash.clone(), seed: self.seed })
    }

    fn write_raw(&self, name: &str, value: &Value) -> anyhow::Result<()> {
        let path = self.root.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// `{"manifest_hash", "seed", "body"}` as pretty JSON.
    pub fn json(&self, name: &str, body: &impl Serialize) -> anyhow::Result<()> {
        let value = json!({
            "manifest_hash": self.hash,
            "seed": self.seed,
            "body": serde_json::to_value(body)?,
        });
        self.write_raw(name, &value)
    }

    /// CSV with a leading `# manifest <hash> seed <seed>` comment line.
    pub fn csv(&self, name: &str, body: &str) -> anyhow::Result<()> {
        let path = self.root.join(name);
        let text = format!("# manifest {} seed {}\n{body}", self.hash, self.seed);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Comma-joined rows of floats at full precision.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_paths() {
        let c = RunConfig::default();
        let a = RunManifest::new("verify", Some(Path::new("a.toml")), Path::new("x"), json!(["bernstein"]), &c);
        let b = RunManifest::new("verify", None, Path::new("y"), json!(["bernstein"]), &c);
        assert_eq!(a.hash(), b.hash());
        let other = RunManifest::new("verify", None, Path::new("y"), json!(["heat"]), &c);
        assert_ne!(a.hash(), other.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
