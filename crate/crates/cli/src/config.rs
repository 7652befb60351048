//! `key = value` run configuration. Flags given on the command line win
//! over the file.

use std::path::{Path, PathBuf};

use cwlap_core::oracle_solver::IndexOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("format must be csv or json, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub solver_tol: Option<f64>,
    pub scan_step: Option<f64>,
}

pub const KEYS: [&str; 5] = ["cache", "format", "output", "solver_tol", "scan_step"];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut c = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| format!("config line {}: {msg}", no + 1);
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|_| at(format!("'{v}' is not a number")));
            match k {
                "cache" => c.cache = Some(PathBuf::from(v)),
                "format" => c.format = Some(v.parse().map_err(at)?),
                "output" => c.output = Some(PathBuf::from(v)),
                "solver_tol" => c.solver_tol = Some(num(v)?),
                "scan_step" => c.scan_step = Some(num(v)?),
                _ => return Err(at(format!("unknown key '{k}' (known: {})", KEYS.join(", ")))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }
}

/// Everything a command needs after flags, environment and file are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cache: PathBuf,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub solver: IndexOptions,
}

impl RunConfig {
    /// `cache` already folds in CWLAP_CACHE, which clap reads.
    pub fn merge(
        file: FileConfig,
        cache: Option<PathBuf>,
        format: Option<Format>,
        output: Option<PathBuf>,
    ) -> Self {
        let mut solver = IndexOptions::default();
        if let Some(t) = file.solver_tol {
            solver.tol = t;
        }
        if let Some(s) = file.scan_step {
            solver.scan_step = s;
        }
        Self {
            cache: cache
                .or(file.cache)
                .unwrap_or_else(|| PathBuf::from(cwlap_core::bessel::DEFAULT_CACHE_PATH)),
            format: format.or(file.format).unwrap_or(Format::Csv),
            output: output.or(file.output),
            solver,
        }
    }
}
