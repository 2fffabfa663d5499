use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, value: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, value, detail: detail.into() }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub ok: bool,
    pub checks: Vec<Check>,
    pub payload: Value,
    pub wall_time_s: f64,
}

/// Accumulates checks for one command run.
pub struct Run {
    command: String,
    config_hash: String,
    seed: u64,
    started: Instant,
    pub checks: Vec<Check>,
}

impl Run {
    pub fn new(command: &str, config: &impl Serialize, extra: &[u8], seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(config).expect("config serializes"));
        h.update(extra);
        let config_hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Run { command: command.into(), config_hash, seed, started: Instant::now(), checks: Vec::new() }
    }

    pub fn check(&mut self, name: &str, pass: bool, value: f64, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, value, detail));
    }

    pub fn finish(self, payload: Value) -> Report {
        Report {
            ok: self.checks.iter().all(|c| c.pass),
            command: self.command,
            config_hash: self.config_hash,
            seed: self.seed,
            checks: self.checks,
            payload,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| CliError::Unwritable(format!("{}: {e}", path.display())))
}

/// Fixed 15-significant-digit rendering used by every CSV cell.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.14e}")
}

pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Lexicographic order on the first `key_len` columns.
pub fn sort_rows(rows: &mut [Vec<f64>], key_len: usize) {
    rows.sort_by(|a, b| {
        a[..key_len]
            .iter()
            .zip(&b[..key_len])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}
