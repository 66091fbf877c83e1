//! Run manifests: enough to regenerate every output byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Written next to each output as `<out>.manifest.json`. Holds no
/// timestamps or host data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, `--threads` removed.
    pub args: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub config: Value,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// Where a command's primary output goes.
pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Writes `text` to the output path (plus manifest) or to stdout.
    pub fn emit(&self, text: &str, command: &str, inputs: &[PathBuf], config: Value) -> Result<()> {
        let Some(out) = &self.out else {
            print!("{text}");
            return Ok(());
        };
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args: recorded_args(),
            inputs: inputs.iter().map(|p| FileDigest::of(p)).collect::<Result<_>>()?,
            config,
            outputs: vec![FileDigest { path: out.display().to_string(), sha256: sha256_hex(text.as_bytes()) }],
        };
        let mpath = RunManifest::path_for(out);
        let body = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&mpath, body).with_context(|| format!("writing {}", mpath.display()))?;
        Ok(())
    }
}

thread_local! {
    static ARGS: std::cell::RefCell<Vec<String>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Records the invocation for the manifest; `--threads` affects scheduling
/// only and is dropped.
pub fn set_recorded_args(args: &[String]) {
    let mut kept = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--threads" {
            skip = true;
            continue;
        }
        if a.starts_with("--threads=") {
            continue;
        }
        kept.push(a.clone());
    }
    ARGS.with(|cell| *cell.borrow_mut() = kept);
}

fn recorded_args() -> Vec<String> {
    ARGS.with(|cell| cell.borrow().clone())
}
