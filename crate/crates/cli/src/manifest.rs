//! Output directory bookkeeping and the run manifest written beside it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a Value,
    config_hash: String,
    seed: u64,
    inputs: &'a BTreeMap<String, String>,
    outputs: &'a BTreeMap<String, String>,
    versions: BTreeMap<&'static str, &'static str>,
}

/// Collects the files of one run and their digests.
pub struct Outputs {
    dir: PathBuf,
    inputs: BTreeMap<String, String>,
    files: BTreeMap<String, String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            inputs: BTreeMap::new(),
            files: BTreeMap::new(),
        })
    }

    /// Records an input file by content digest.
    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), sha256_hex(bytes));
    }

    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    /// The config hash covers the settings and the input digests, so two
    /// runs with equal hashes must produce identical outputs.
    pub fn finish(self, command: &str, config: &Value, seed: u64) -> std::io::Result<()> {
        let keyed = serde_json::json!({ "config": config, "inputs": self.inputs, "seed": seed });
        let m = Manifest {
            command,
            config,
            config_hash: sha256_hex(keyed.to_string().as_bytes()),
            seed,
            inputs: &self.inputs,
            outputs: &self.files,
            versions: BTreeMap::from([
                ("hypspec", env!("CARGO_PKG_VERSION")),
                ("hypspec-core", hypspec_core::VERSION),
            ]),
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
        fs::write(self.dir.join("manifest.json"), text)
    }
}
