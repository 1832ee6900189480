//! Flat `key=value` experiment configuration.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{config, Result};
use crate::spec::{parse_alphas, parse_model, parse_procedures, parse_real, ModelSpec, ProcedureChoice};

/// Procedures compared in the simulation study when none are listed.
pub const DEFAULT_PROCEDURES: &str = "bh,suncai,datadriven";
/// Alpha grid when none is given.
pub const DEFAULT_ALPHAS: &str = "0.05:0.7:0.05";

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub alphas: Vec<f64>,
    pub procedures: Vec<ProcedureChoice>,
    pub n: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// `None` means one thread per core.
    pub threads: Option<usize>,
    pub out: PathBuf,
}

/// Raw key/value pairs; later entries override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: Vec<(String, String)>,
    base_dir: PathBuf,
}

const KEYS: &[&str] = &["model", "pi0", "alphas", "procedures", "n", "trials", "seed", "threads", "out"];

impl RawConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut raw = RawConfig {
            entries: Vec::new(),
            base_dir: base_dir.to_path_buf(),
        };
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config(format!("line {}: expected key=value", i + 1)))?;
            raw.set(k.trim(), v.trim()).map_err(|e| config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(raw)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Sets or overrides one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(config(format!("unknown key `{key}`")));
        }
        self.entries.push((key.to_string(), value.to_string()));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<usize>() {
                Ok(c) if c >= 1 => Ok(c),
                _ => Err(config(format!("{key}: `{v}` is not a positive integer"))),
            },
        }
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let model_text = self.get("model").ok_or_else(|| config("model: missing"))?;
        let pi0 = self.get("pi0").map_or(Ok(0.75), |v| parse_real("pi0", v))?;
        let model = parse_model(model_text, pi0, &self.base_dir)?;
        let alphas = parse_alphas(self.get("alphas").unwrap_or(DEFAULT_ALPHAS))?;
        if let Some(bad) = alphas.iter().find(|a| **a <= 0.0 || **a >= 1.0) {
            return Err(config(format!("alphas: {bad} is not in (0,1)")));
        }
        let procedures = parse_procedures(self.get("procedures").unwrap_or(DEFAULT_PROCEDURES), model.null())?;
        let master_seed = match self.get("seed") {
            None => 1,
            Some(v) => v.parse().map_err(|_| config(format!("seed: `{v}` is not a 64-bit integer")))?,
        };
        let threads = match self.get("threads") {
            None | Some("auto") => None,
            Some(_) => Some(self.count("threads", 1)?),
        };
        Ok(ExperimentConfig {
            alphas,
            procedures,
            n: self.count("n", 500)?,
            trials: self.count("trials", 1000)?,
            master_seed,
            threads,
            out: PathBuf::from(self.get("out").unwrap_or("simulation.csv")),
            model,
        })
    }
}
