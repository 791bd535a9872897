use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

/// Summary of one command run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub checks_total: u64,
    pub checks_failed: u64,
    pub wall_time_ms: u64,
    pub artifacts: Vec<PathBuf>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            parameters: BTreeMap::new(),
            checks_total: 0,
            checks_failed: 0,
            wall_time_ms: 0,
            artifacts: Vec::new(),
            started: Some(Instant::now()),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Records `total` checks of which `failed` failed.
    pub fn checks(&mut self, total: u64, failed: u64) {
        self.checks_total += total;
        self.checks_failed += failed;
    }

    pub fn check(&mut self, ok: bool) {
        self.checks(1, u64::from(!ok));
    }

    pub fn artifact(&mut self, path: PathBuf) {
        self.artifacts.push(path);
    }

    pub fn finish(&mut self) {
        if let Some(t) = self.started {
            self.wall_time_ms = t.elapsed().as_millis() as u64;
        }
    }

    pub fn passed(&self) -> bool {
        self.checks_failed == 0
    }
}
