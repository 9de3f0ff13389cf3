use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use focn_core::structure::AccessReceipt;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
pub struct Access {
    pub neighbor_queries: u64,
    pub tuple_queries: u64,
}

/// Everything needed to reproduce a run, plus digests of what it read and
/// wrote.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub jobs: usize,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub access: Option<Access>,
    pub wall_time_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, jobs: usize) -> Self {
        RunManifest {
            command: command.to_string(),
            flags: BTreeMap::new(),
            seed,
            jobs,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            access: None,
            wall_time_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn flag(&mut self, name: &str, value: impl ToString) {
        self.flags.insert(name.to_string(), value.to_string());
    }

    /// Reads a file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), digest(&bytes));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// Writes a file and records its digest.
    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.insert(path.display().to_string(), digest(contents.as_bytes()));
        Ok(())
    }

    pub fn stdout(&mut self, contents: &str) {
        self.outputs.insert("<stdout>".into(), digest(contents.as_bytes()));
    }

    pub fn receipt(&mut self, r: AccessReceipt) {
        self.access = Some(Access {
            neighbor_queries: r.neighbor_queries,
            tuple_queries: r.tuple_queries,
        });
    }

    pub fn save(mut self, path: &Path) -> Result<()> {
        if let Some(t) = self.started {
            self.wall_time_ms = t.elapsed().as_millis();
        }
        let json = serde_json::to_string_pretty(&self)? + "\n";
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))
    }
}
