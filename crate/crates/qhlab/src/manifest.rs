//! `manifest.txt`: one `key = value` per line, rewritten on every update.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Running,
    Ok,
    Failed { exit_code: i32, reason: String },
}

impl Status {
    fn render(&self) -> String {
        match self {
            Status::Running => "running".into(),
            Status::Ok => "ok".into(),
            Status::Failed { .. } => "failed".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub grid: String,
    pub started: String,
    pub finished: Option<String>,
    pub outputs: Vec<String>,
    pub results: Vec<(String, String)>,
    pub status: Status,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Newlines would break the line format.
fn flat(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

impl RunManifest {
    pub fn new(cfg: &RunConfig, grid: String) -> Self {
        RunManifest {
            command: cfg.command.name().to_string(),
            params: cfg.raw.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            grid,
            started: now(),
            finished: None,
            outputs: Vec::new(),
            results: Vec::new(),
            status: Status::Running,
        }
    }

    pub fn render(&self) -> String {
        let mut lines = vec![
            format!("command = {}", self.command),
            format!("version = {VERSION}"),
            format!("status = {}", self.status.render()),
        ];
        match &self.status {
            Status::Failed { exit_code, reason } => {
                lines.push(format!("exit_code = {exit_code}"));
                lines.push(format!("error = {}", flat(reason)));
            }
            Status::Ok => lines.push("exit_code = 0".into()),
            Status::Running => {}
        }
        lines.push(format!("grid = {}", flat(&self.grid)));
        lines.push(format!("started = {}", self.started));
        if let Some(f) = &self.finished {
            lines.push(format!("finished = {f}"));
        }
        lines.extend(self.params.iter().map(|(k, v)| format!("param.{k} = {}", flat(v))));
        lines.extend(self.results.iter().map(|(k, v)| format!("result.{k} = {}", flat(v))));
        lines.push(format!("outputs = {}", self.outputs.len()));
        lines.extend(self.outputs.iter().enumerate().map(|(i, o)| format!("output.{i} = {o}")));
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let tmp = dir.join(".manifest.tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(self.render().as_bytes())?;
        f.sync_all()?;
        fs::rename(tmp, dir.join(MANIFEST_NAME))?;
        Ok(())
    }

    pub fn finish(&mut self, status: Status) {
        self.status = status;
        self.finished = Some(now());
    }
}

/// Parses a manifest back into ordered `(key, value)` pairs.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, String)>> {
    fs::read_to_string(path)?
        .lines()
        .map(|l| {
            l.split_once(" = ")
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| CliError::usage(format!("malformed manifest line `{l}`")))
        })
        .collect()
}

/// Values recorded under `result.*`; floats keep 17 significant digits.
pub trait ManifestValue {
    fn render(&self) -> String;
}

impl ManifestValue for f64 {
    fn render(&self) -> String {
        format!("{self:.16e}")
    }
}

impl ManifestValue for usize {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ManifestValue for bool {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ManifestValue for &str {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ManifestValue for String {
    fn render(&self) -> String {
        self.clone()
    }
}

impl<T: ManifestValue> ManifestValue for &T {
    fn render(&self) -> String {
        (*self).render()
    }
}

/// An output directory whose files are all registered in its manifest.
#[derive(Debug)]
pub struct RunDir {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl RunDir {
    /// Creates the directory and writes the initial manifest.
    pub fn create(cfg: &RunConfig, grid: String) -> Result<Self> {
        fs::create_dir_all(&cfg.output_dir)?;
        let run = RunDir { dir: cfg.output_dir.clone(), manifest: RunManifest::new(cfg, grid) };
        run.manifest.write(&run.dir)?;
        Ok(run)
    }

    /// Registers `name` in the manifest (before the file is written) and
    /// returns its path.
    pub fn output(&mut self, name: &str) -> Result<PathBuf> {
        if !self.manifest.outputs.iter().any(|o| o == name) {
            self.manifest.outputs.push(name.to_string());
            self.manifest.write(&self.dir)?;
        }
        Ok(self.dir.join(name))
    }

    pub fn result(&mut self, key: &str, value: impl ManifestValue) {
        self.manifest.results.push((key.to_string(), value.render()));
    }

    pub fn finish(&mut self, status: Status) -> Result<()> {
        self.manifest.finish(status);
        self.manifest.write(&self.dir)
    }
}
