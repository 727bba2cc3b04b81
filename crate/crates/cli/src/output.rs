//! Run manifests and atomic file output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use ssggm::priors::Elicited;
use ssggm::Hyperparams;

use crate::error::CliError;

/// Everything needed to reproduce a run. `hash` covers every field except
/// `timings`, the output directory in `config` and the hash itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub dataset_hash: Option<String>,
    pub elicited: Option<Elicited>,
    pub hyper: Option<Hyperparams>,
    pub version: String,
    pub timings: BTreeMap<String, f64>,
    pub hash: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            dataset_hash: None,
            elicited: None,
            hyper: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timings: BTreeMap::new(),
            hash: String::new(),
        }
    }

    /// Computes `hash`; call once every reproducibility field is set.
    pub fn seal(&mut self) -> Result<(), CliError> {
        let mut config = self.config.clone();
        if let Some(map) = config.as_object_mut() {
            map.remove("out_dir");
        }
        let body = serde_json::json!({
            "command": self.command,
            "config": config,
            "seed": self.seed,
            "dataset_hash": self.dataset_hash,
            "elicited": self.elicited,
            "hyper": self.hyper,
            "version": self.version,
        });
        let text = serde_json::to_string(&body)?;
        self.hash = Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Ok(())
    }
}

/// Writes `bytes` to `path` via a temporary file in the same directory and
/// a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Scientific notation with 17 significant digits, which round-trips exactly.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn manifest_line(hash: &str) -> String {
    format!("# manifest {hash}\n")
}

/// Headerless numeric matrix, one row per line.
pub fn matrix_csv(m: &DMatrix<f64>, hash: &str) -> String {
    let mut out = manifest_line(hash);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| num(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// CSV with a header row; `rows` are already formatted fields.
pub fn table_csv(header: &[&str], rows: &[Vec<String>], hash: &str) -> String {
    let mut out = manifest_line(hash);
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

const DRAWS_MAGIC: &[u8; 8] = b"SSGGMDR1";

/// Draws sidecar: magic, 64-byte manifest hash, then the encoded draws.
pub fn write_draws(path: &Path, draws: &ssggm::inference::EdgeDraws, hash: &str) -> Result<(), CliError> {
    let mut bytes = DRAWS_MAGIC.to_vec();
    let mut h = hash.as_bytes().to_vec();
    h.resize(64, b' ');
    bytes.extend_from_slice(&h);
    bytes.extend_from_slice(&draws.encode());
    write_atomic(path, &bytes)
}

pub fn read_draws(path: &Path) -> Result<ssggm::inference::EdgeDraws, CliError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 72 || &bytes[..8] != DRAWS_MAGIC {
        return Err(CliError::Domain(ssggm::Error::Parse(format!(
            "{} is not a draws file",
            path.display()
        ))));
    }
    Ok(ssggm::inference::EdgeDraws::decode(&bytes[72..])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123_456_789.123_456_79, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn manifest_hash_ignores_timings_and_output_location() {
        let mut a = RunManifest::new("fit", serde_json::json!({"x": 1}), 3);
        a.seal().unwrap();
        let mut b = a.clone();
        b.timings.insert("total".into(), 1.5);
        b.config = serde_json::json!({"x": 1, "out_dir": "elsewhere"});
        b.seal().unwrap();
        assert_eq!(a.hash, b.hash);
        b.seed = 4;
        b.seal().unwrap();
        assert_ne!(a.hash, b.hash);
    }
}
