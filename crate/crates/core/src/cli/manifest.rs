use crate::error::Result;
use crate::triplet::ProcessSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Provenance attached to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub spec_name: Option<String>,
    /// SHA-256 of the canonical spec JSON.
    pub spec_hash: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub n_paths: Option<u64>,
    pub tool_version: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

pub fn spec_hash(spec: &ProcessSpec) -> String {
    hex::encode(Sha256::digest(spec.canonical_json().as_bytes()))
}

impl RunManifest {
    pub fn new(command: &str, spec: &ProcessSpec, config: serde_json::Value, seed: u64, n_paths: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            spec_name: spec.name.clone(),
            spec_hash: spec_hash(spec),
            config,
            seed,
            n_paths,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_clock_seconds = started.elapsed().as_secs_f64();
        self
    }

    /// `# key: value` lines for CSV headers.
    pub fn header_lines(&self) -> Vec<String> {
        let v = serde_json::to_value(self).expect("manifest serializes");
        let obj = v.as_object().expect("manifest is an object");
        obj.iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("# {k}: {s}"),
                other => format!("# {k}: {other}"),
            })
            .collect()
    }

    /// Reads the manifest block back from a CSV written by [`write_csv`].
    pub fn from_csv_header(text: &str) -> Option<RunManifest> {
        let mut obj = serde_json::Map::new();
        for line in text.lines().take_while(|l| l.starts_with("# ")) {
            let (k, v) = line[2..].split_once(": ")?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.to_string()));
            obj.insert(k.to_string(), value);
        }
        serde_json::from_value(serde_json::Value::Object(obj)).ok()
    }
}

/// Writes to `path`, or stdout when `None`.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

pub fn write_csv(path: Option<&Path>, manifest: &RunManifest, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = sink(path)?;
    for l in manifest.header_lines() {
        writeln!(w, "{l}")?;
    }
    writeln!(w, "{}", columns.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: Option<&Path>, manifest: &RunManifest, report: &T) -> Result<()> {
    let mut w = sink(path)?;
    let doc = serde_json::json!({ "manifest": manifest, "report": report });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ProcessSpec::brownian(1.0);
        assert_eq!(spec_hash(&a), spec_hash(&ProcessSpec::brownian(1.0)));
        assert_ne!(spec_hash(&a), spec_hash(&ProcessSpec::brownian(2.0)));
        assert_eq!(spec_hash(&a).len(), 64);
    }

    #[test]
    fn csv_header_round_trips() {
        let m = RunManifest::new(
            "estimate",
            &ProcessSpec::brownian(1.0),
            serde_json::json!({"steps": 64}),
            7,
            Some(100),
        );
        let text = m.header_lines().join("\n") + "\nt,estimate,se\n";
        assert_eq!(RunManifest::from_csv_header(&text), Some(m));
    }
}
