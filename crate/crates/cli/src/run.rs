//! Run manifests: what was run, on which bytes, producing which bytes.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "frameforge";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Effective arguments after config expansion, minus output location
    /// and thread count.
    pub argv: Vec<String>,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

/// Named after the first output, so runs of one subcommand with different
/// outputs (one model per task, say) keep separate manifests.
pub fn manifest_name(manifest: &RunManifest) -> String {
    let stem = manifest
        .outputs
        .first()
        .and_then(|o| Path::new(&o.path).file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| manifest.subcommand.clone());
    format!("{stem}.run.json")
}

pub struct Run {
    out: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn new(out: &Path, subcommand: &str, argv: Vec<String>) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("creating output directory {}", out.display()))?;
        let config_hash = sha256_hex(argv.join("\n").as_bytes());
        Ok(Run {
            out: out.to_path_buf(),
            manifest: RunManifest {
                tool: TOOL.into(),
                version: VERSION.into(),
                subcommand: subcommand.into(),
                argv,
                config_hash,
                seed: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
            },
        })
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    /// Records an input file's digest and hands the path back.
    pub fn input<'a>(&mut self, path: &'a Path) -> Result<&'a Path> {
        let sha256 = digest_file(path)?;
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256,
        });
        Ok(path)
    }

    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        let path = self.out.join(manifest_name(&self.manifest));
        let mut json = serde_json::to_string_pretty(&self.manifest)?;
        json.push('\n');
        fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
