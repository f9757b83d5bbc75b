use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;
use crate::io::write_json;

/// Everything needed to repeat a run, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<String>,
    pub timings_secs: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &'static str, seed: u64, config: &impl Serialize) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config: serde_json::to_value(config).expect("arguments serialize"),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings_secs: BTreeMap::new(),
        }
    }

    pub fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn timing(&mut self, phase: &str, secs: f64) {
        self.timings_secs.insert(phase.to_string(), secs);
    }

    pub fn write(mut self, dir: &Path) -> CliResult<()> {
        self.output("manifest.json");
        write_json(&dir.join("manifest.json"), &self)
    }
}
