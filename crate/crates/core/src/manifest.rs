//! Run manifests written next to every output.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, enough to re-run the invocation.
    pub argv: Vec<String>,
    /// Fully resolved configuration.
    pub config: serde_json::Value,
    pub tool_version: String,
    pub started_unix: f64,
    pub finished_unix: Option<f64>,
    pub exit_status: Option<i32>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl RunManifest {
    pub fn begin(subcommand: &str, argv: Vec<String>, config: serde_json::Value) -> RunManifest {
        RunManifest {
            subcommand: subcommand.into(),
            argv,
            config,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: now(),
            finished_unix: None,
            exit_status: None,
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn finish(&mut self, exit_status: i32) {
        self.finished_unix = Some(now());
        self.exit_status = Some(exit_status);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| crate::Error::Config(format!("bad manifest {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut m = RunManifest::begin("simulate", vec!["--config".into(), "a.cfg".into()], serde_json::json!({"nx": 64}));
        m.finish(0);
        let dir = std::env::temp_dir().join(format!("wv-manifest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run_manifest.json");
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap(), m);
        std::fs::remove_dir_all(&dir).ok();
    }
}
