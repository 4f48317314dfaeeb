use crate::io::{read_json, write_json, Failure};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tol: f64,
    pub seed: u64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, as given.
    pub args: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    pub config: ConfigEcho,
    pub version: String,
    pub wall_time_ms: u128,
    pub exit_code: i32,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn write(&self) -> Result<(), Failure> {
        write_json(&manifest_path(&self.output), self)
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        read_json(path)
    }
}
