//! Run configuration: table paths, precision, and output settings, read
//! from a simple `key = value` text file.

use anyhow::{bail, Context, Result};
use psi_bound::{Engine, Precision};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "PSI_BOUND_CONFIG";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown output format {other:?} (expected text, csv, or json)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision: u32,
    pub density_table: PathBuf,
    pub interval_table: PathBuf,
    pub zeros_file: Option<PathBuf>,
    pub sig_digits: usize,
    pub format: OutputFormat,
    pub zero_count: String,
    pub r_constant: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: 200,
            density_table: PathBuf::from("data/density_a077.csv"),
            interval_table: PathBuf::from("data/interval_a077.csv"),
            zeros_file: None,
            sig_digits: 5,
            format: OutputFormat::Text,
            zero_count: "hsw".into(),
            r_constant: None,
        }
    }
}

impl RunConfig {
    /// Load from an explicit path, the PSI_BOUND_CONFIG variable, or fall
    /// back to defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).map(PathBuf::from),
        };
        let mut cfg = RunConfig::default();
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut pairs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let Some((k, v)) = s.split_once('=') else {
                bail!("{}:{}: expected key = value", path.display(), i + 1);
            };
            pairs.insert(k.trim().to_string(), v.trim().to_string());
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |v: &str| -> PathBuf {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        for (k, v) in &pairs {
            match k.as_str() {
                "precision" => cfg.precision = v.parse().context("precision must be an integer")?,
                "density_table" => cfg.density_table = resolve(v),
                "interval_table" => cfg.interval_table = resolve(v),
                "zeros_file" => cfg.zeros_file = Some(resolve(v)),
                "sig_digits" => cfg.sig_digits = v.parse().context("sig_digits must be an integer")?,
                "format" => cfg.format = OutputFormat::parse(v)?,
                "zero_count" => cfg.zero_count = v.clone(),
                "r" => cfg.r_constant = Some(v.clone()),
                other => bail!("{}: unknown config key {other:?}", path.display()),
            }
        }
        Ok(cfg)
    }

    pub fn build_engine(&self) -> Result<Engine> {
        let prec = Precision::new(self.precision)
            .map_err(|e| anyhow::anyhow!("invalid precision: {e}"))?;
        let mut engine = Engine::from_files(prec, &self.density_table, &self.interval_table)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        match self.zero_count.as_str() {
            "hsw" => {}
            "rosser" => engine.zero_count = psi_bound::ZeroCountConstants::rosser(prec),
            other => bail!("unknown zero_count {other:?} (expected hsw or rosser)"),
        }
        if let Some(r) = &self.r_constant {
            engine.globals = engine
                .globals
                .clone()
                .with_r(prec, r)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
        }
        Ok(engine)
    }
}
