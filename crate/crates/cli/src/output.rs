use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

pub const MANIFEST_FILE: &str = "manifest.json";

static PROCESS_START: OnceLock<Instant> = OnceLock::new();

/// Marks the start of the wall-time measurement reported in the manifest.
pub fn start_clock() {
    PROCESS_START.get_or_init(Instant::now);
}

/// Files written by one command. Dropping an unfinished run removes them, so a
/// failed command leaves no partial outputs behind.
pub struct RunDir {
    dir: PathBuf,
    written: Vec<String>,
    created_dir: bool,
    finished: bool,
}

impl RunDir {
    pub fn create(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new(), created_dir, finished: false })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes the manifest last and marks the run complete.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C, seed: u64, workers: usize) -> Result<()> {
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            workers,
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            wall_time_seconds: PROCESS_START.get_or_init(Instant::now).elapsed().as_secs_f64(),
            outputs: self.written.clone(),
        };
        self.json(MANIFEST_FILE, &manifest)?;
        self.finished = true;
        Ok(())
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        if self.finished {
            return;
        }
        for name in &self.written {
            let _ = fs::remove_file(self.dir.join(name));
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    /// Effective thread count; results do not depend on it.
    pub workers: usize,
    pub version: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfinished_run_removes_its_files() {
        let t = tempfile::tempdir().unwrap();
        let dir = t.path().join("new");
        {
            let mut run = RunDir::create(&dir).unwrap();
            run.csv("a.csv", [(1.0, 2.0)]).unwrap();
            run.json("b.json", &[1, 2]).unwrap();
            assert!(dir.join("a.csv").exists());
        }
        assert!(!dir.exists());

        let kept = t.path().join("kept");
        fs::create_dir(&kept).unwrap();
        fs::write(kept.join("other"), "x").unwrap();
        drop(RunDir::create(&kept).unwrap());
        assert!(kept.join("other").exists());
    }

    #[test]
    fn finished_run_lists_outputs() {
        let t = tempfile::tempdir().unwrap();
        let mut run = RunDir::create(t.path()).unwrap();
        run.csv("a.csv", [(1.5, 2.0)]).unwrap();
        run.finish("test", &serde_json::json!({"k": 1}), 4, 1).unwrap();
        let text = fs::read_to_string(t.path().join("a.csv")).unwrap();
        assert_eq!(text, "1.5,2.0\n");
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(t.path().join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(m["outputs"][0], "a.csv");
        assert_eq!(m["seed"], 4);
    }
}
