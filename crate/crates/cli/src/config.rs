//! Settings shared by all subcommands: flags override environment
//! variables, which override the config file, which overrides defaults.
//!
//! The config file is flat TOML (`tamc.toml` in the working directory unless
//! `--config` is given):
//!
//! ```toml
//! solver = "/usr/local/bin/z3"
//! timeout_ms = 60000
//! seed = 0
//! assume_multiplicative = false
//! max_orders = 100
//! bound = 12
//! denom = 1
//! num_bound = 1
//! budget_s = 300
//! jobs = 4
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tamc_core::presburger::SolverConfig;

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub solver: Option<PathBuf>,
    pub timeout_ms: Option<u64>,
    pub seed: Option<u64>,
    pub assume_multiplicative: Option<bool>,
    pub max_orders: Option<usize>,
    pub bound: Option<u64>,
    pub denom: Option<i64>,
    pub num_bound: Option<i64>,
    pub budget_s: Option<u64>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    /// Reads `path`, or `tamc.toml` if present when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let (path, required) = match path {
            Some(p) => (p.to_path_buf(), true),
            None => (PathBuf::from("tamc.toml"), false),
        };
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) if !required => return Ok(FileConfig::default()),
            Err(e) => return Err(CliError::input(format!("{}: {e}", path.display()))),
        };
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn solver(&self, flag_path: Option<&PathBuf>, flag_timeout: Option<u64>, flag_seed: Option<u64>) -> SolverConfig {
        let env = SolverConfig::default();
        let env_path = std::env::var_os("TAMC_SOLVER").map(PathBuf::from);
        let env_timeout = std::env::var("TAMC_TIMEOUT_MS").ok().and_then(|s| s.parse().ok());
        SolverConfig {
            path: flag_path
                .cloned()
                .or(env_path)
                .or_else(|| self.solver.clone())
                .unwrap_or(env.path),
            timeout_ms: flag_timeout
                .or(env_timeout)
                .or(self.timeout_ms)
                .unwrap_or(env.timeout_ms),
            seed: flag_seed.or(self.seed).unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_keys_parse() {
        let c: FileConfig = toml::from_str("solver = \"z3\"\ntimeout_ms = 5\njobs = 2\n").unwrap();
        assert_eq!(c.timeout_ms, Some(5));
        assert_eq!(c.jobs, Some(2));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }

    #[test]
    fn flags_win() {
        let c = FileConfig {
            seed: Some(3),
            ..Default::default()
        };
        let s = c.solver(None, Some(10), Some(9));
        assert_eq!((s.timeout_ms, s.seed), (10, 9));
        assert_eq!(c.solver(None, None, None).seed, 3);
    }
}
