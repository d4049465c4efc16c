//! Run manifests: the config echo plus everything realized during a run.
//!
//! The manifest is written in the config format. Run metadata lives under
//! `run.` keys, which the config parser skips, so
//! `epi <command> --config manifest.txt` reproduces the run.

use std::fmt::Write as _;

use super::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config: ExperimentConfig,
    /// Realized quantities and per-replica seeds, in insertion order.
    pub entries: Vec<(String, String)>,
    pub wall_ms: u128,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            entries: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn record(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# epi run manifest\n");
        s.push_str(&self.config.to_text());
        let _ = writeln!(s, "run.command = {}", self.command);
        let _ = writeln!(s, "run.version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "run.rng = chacha8 key(seed, family) stream((L << 32) | replica)");
        let _ = writeln!(s, "run.wall_ms = {}", self.wall_ms);
        for (k, v) in &self.entries {
            let _ = writeln!(s, "run.{k} = {v}");
        }
        s
    }
}
