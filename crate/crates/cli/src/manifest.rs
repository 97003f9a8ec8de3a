use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ombench_core::fingerprint::sha256_hex;
use serde::Serialize;
use serde_json::Value;

/// Provenance record written next to every output. Paths are reduced to
/// file names and the worker count is left out, so identical inputs give
/// identical manifests wherever and however the run happens.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub report: Value,
}

fn basename(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Collects input fingerprints as they are read and writes outputs.
pub struct Run {
    manifest: RunManifest,
}

impl Run {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                seed,
                config: Value::Null,
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                report: Value::Null,
            },
        }
    }

    pub fn read(&mut self, path: &Path) -> anyhow::Result<Vec<u8>> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.manifest.inputs.insert(basename(path), sha256_hex(&bytes));
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> anyhow::Result<String> {
        String::from_utf8(self.read(path)?).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.insert(basename(path), sha256_hex(bytes));
        Ok(())
    }

    pub fn config<T: Serialize>(&mut self, config: &T) {
        self.manifest.config = serde_json::to_value(config).expect("config is serializable");
    }

    pub fn report<T: Serialize>(&mut self, report: &T) {
        self.manifest.report = serde_json::to_value(report).expect("report is serializable");
    }

    /// Writes the manifest to `path`.
    pub fn finish(self, path: PathBuf) -> anyhow::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(&self.manifest)?;
        bytes.push(b'\n');
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// `<output>.manifest.json` beside a single-file output.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
