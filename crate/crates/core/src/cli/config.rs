//! `key = value` configuration files.
//!
//! Each key names a long flag of some subcommand (`iter_tol` and
//! `iter-tol` are the same key). Keys are turned into flags and spliced in
//! directly after the subcommand, so anything given on the command line
//! comes later and wins.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::CommandFactory;

use super::args::Cli;
use super::CliError;

/// Parsed configuration file, keys normalized to flag spelling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub path: Option<PathBuf>,
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: Option<&Path>) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value, got {raw:?}", n + 1)))?;
            let key = key.trim().replace('_', "-");
            if key.is_empty() {
                return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { path: path.map(Path::to_path_buf), values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, Some(path))
    }

    /// Flags for `subcommand`. Keys belonging only to other subcommands are
    /// skipped; keys no subcommand knows are an error.
    pub fn to_flags(&self, subcommand: &str) -> Result<Vec<OsString>, CliError> {
        let mut cmd = Cli::command();
        cmd.build();
        let sub = cmd
            .find_subcommand(subcommand)
            .ok_or_else(|| CliError::Usage(format!("unknown subcommand {subcommand:?}")))?;
        let mut flags = Vec::new();
        for (key, value) in &self.values {
            if matches!(key.as_str(), "config" | "seed" | "out-dir") {
                // global options are handled on the command line only
                return Err(CliError::Usage(format!("config key {key:?} must be given as a flag")));
            }
            let arg = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str()));
            let Some(arg) = arg else {
                let known =
                    cmd.get_subcommands().any(|s| s.get_arguments().any(|a| a.get_long() == Some(key.as_str())));
                if known {
                    continue;
                }
                return Err(CliError::Usage(format!("unknown config key {key:?}")));
            };
            if arg.get_action().takes_values() {
                flags.push(OsString::from(format!("--{key}")));
                flags.push(OsString::from(value));
            } else {
                match value.as_str() {
                    "true" | "yes" | "1" => flags.push(OsString::from(format!("--{key}"))),
                    "false" | "no" | "0" => {}
                    other => {
                        return Err(CliError::Usage(format!("config key {key:?} expects true/false, got {other:?}")))
                    }
                }
            }
        }
        Ok(flags)
    }
}

/// The `--config` path, if any, and the index of the subcommand token.
pub(crate) fn scan(args: &[OsString]) -> (Option<PathBuf>, Option<usize>) {
    let names: Vec<String> = Cli::command().get_subcommands().map(|s| s.get_name().to_string()).collect();
    let mut config = None;
    let mut sub = None;
    let mut k = 1;
    while k < args.len() {
        let a = args[k].to_string_lossy();
        if a == "--config" {
            config = args.get(k + 1).map(PathBuf::from);
            k += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else if sub.is_none() && names.iter().any(|n| *n == a) {
            sub = Some(k);
        }
        k += 1;
    }
    (config, sub)
}

/// `args` with the config flags spliced in after the subcommand.
pub(crate) fn merge(args: Vec<OsString>) -> Result<(Vec<OsString>, ConfigFile), CliError> {
    let (path, sub) = scan(&args);
    let (Some(path), Some(sub)) = (path, sub) else {
        return Ok((args, ConfigFile::default()));
    };
    let file = ConfigFile::load(&path)?;
    let flags = file.to_flags(&args[sub].to_string_lossy())?;
    let mut merged = args[..=sub].to_vec();
    merged.extend(flags);
    merged.extend_from_slice(&args[sub + 1..]);
    Ok((merged, file))
}
