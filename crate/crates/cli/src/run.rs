//! Output directory bookkeeping: echoed config, outputs and the manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub struct RunDir {
    dir: PathBuf,
    command: String,
    inputs: Vec<(PathBuf, String)>,
    outputs: Vec<(String, String)>,
    started: Instant,
}

impl RunDir {
    /// Creates `dir`, hashes the inputs and writes `config.txt`.
    pub fn create(dir: &Path, command: &str, cfg: &RunConfig, inputs: &[&Path]) -> Result<RunDir> {
        let started = Instant::now();
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut run = RunDir {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started,
        };
        for p in inputs {
            let bytes = read_input(p)?;
            run.inputs.push((p.to_path_buf(), sha256_hex(&bytes)));
        }
        run.write("config.txt", cfg.echo().as_bytes())?;
        Ok(run)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes a new output file; refuses to overwrite any input.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(name);
        if let Ok(target) = path.canonicalize() {
            for (input, _) in &self.inputs {
                if input.canonicalize().is_ok_and(|i| i == target) {
                    bail!(crate::UsageError(format!("output {} would overwrite an input", path.display())));
                }
            }
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.retain(|(n, _)| n != name);
        self.outputs.push((name.to_string(), sha256_hex(bytes)));
        Ok(path)
    }

    /// Writes `manifest.txt`; the only file carrying times.
    pub fn finish(self, threads: usize) -> Result<()> {
        let mut m = String::new();
        m.push_str(&format!("command = {}\n", self.command));
        m.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
        m.push_str(&format!(
            "formats = EIT1 v{}, EITF v{}, EIM1 v{}, catalog v{}\n",
            innerspeech_core::trialset::EIT1_VERSION,
            innerspeech_core::features::EITF_VERSION,
            innerspeech_core::models::EIM1_VERSION,
            innerspeech_core::features::CATALOG_VERSION
        ));
        m.push_str(&format!("threads = {threads}\n"));
        let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        m.push_str(&format!("finished_unix = {unix}\n"));
        m.push_str(&format!("wall_time_s = {:.3}\n", self.started.elapsed().as_secs_f64()));
        for (p, h) in &self.inputs {
            m.push_str(&format!("input = {} sha256:{h}\n", p.display()));
        }
        for (n, h) in &self.outputs {
            m.push_str(&format!("output = {n} sha256:{h}\n"));
        }
        let path = self.path("manifest.txt");
        fs::write(&path, m).with_context(|| format!("writing {}", path.display()))
    }
}
