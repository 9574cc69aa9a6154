//! `key=value` job configuration. Command-line flags take precedence.

use std::path::Path;

use dpow_core::doldkan::EngineConfig;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FileConfig {
    pub rank_cap: Option<usize>,
    pub nnz_cap: Option<u128>,
    pub primes: Option<Vec<u64>>,
    pub sequential: Option<bool>,
}

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config { line, msg: msg.into() }
}

pub fn parse_primes(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| format!("not a prime list: {s}")))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if let Some(q) = v.iter().find(|&&q| !dpow_core::exactlin::is_prime(q)) {
                Err(format!("{q} is not a prime"))
            } else {
                Ok(v)
            }
        })
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = FileConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad(k + 1, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "rank_cap" => cfg.rank_cap = Some(value.parse().map_err(|_| bad(k + 1, "rank_cap must be an integer"))?),
                "nnz_cap" => cfg.nnz_cap = Some(value.parse().map_err(|_| bad(k + 1, "nnz_cap must be an integer"))?),
                "primes" => cfg.primes = Some(parse_primes(value).map_err(|m| bad(k + 1, m))?),
                "sequential" => {
                    cfg.sequential = Some(value.parse().map_err(|_| bad(k + 1, "sequential must be true or false"))?)
                }
                other => return Err(bad(k + 1, format!("unknown key {other}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => Self::parse(&std::fs::read_to_string(p)?),
        }
    }
}

/// Budget and scheduling flags shared by every command.
#[derive(clap::Args, Clone, Debug, Default)]
pub struct EngineFlags {
    /// key=value file with rank_cap, nnz_cap, primes, sequential
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, global = true)]
    pub rank_cap: Option<usize>,
    #[arg(long, global = true)]
    pub nnz_cap: Option<u128>,
    /// run the engine on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl EngineFlags {
    pub fn resolve(&self) -> Result<(EngineConfig, FileConfig), CliError> {
        let file = FileConfig::load(self.config.as_deref())?;
        let mut cfg = EngineConfig::default();
        if let Some(c) = self.rank_cap.or(file.rank_cap) {
            cfg.rank_cap = c;
        }
        if let Some(c) = self.nnz_cap.or(file.nnz_cap) {
            cfg.nnz_cap = c;
        }
        if self.sequential || file.sequential == Some(true) {
            cfg.exec = dpow_core::Exec::Sequential;
        }
        Ok((cfg, file))
    }
}
