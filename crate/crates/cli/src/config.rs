//! `key = value` config files.
//!
//! Entries become `--key value` flags placed right after the subcommand name,
//! so anything given on the command line later wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use crate::UsageError;

const SUBCOMMANDS: [&str; 6] = ["sweep-chi", "sweep-n", "optimal-chi", "wigner", "montecarlo", "design"];

/// Parses a config file into flag tokens.
pub fn read_flags(path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_flags(&text)
}

pub fn parse_flags(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(UsageError(format!("config line {}: bad key", lineno + 1)).into());
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => out.push(format!("--{key}={value}").into()),
        }
    }
    Ok(out)
}

/// Returns the `--config` path given on the command line, if any.
fn config_path(argv: &[OsString]) -> Result<Option<OsString>> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it
                .next()
                .cloned()
                .map(Some)
                .ok_or_else(|| UsageError("--config needs a path".into()).into());
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(p.into()));
        }
    }
    Ok(None)
}

/// Inserts config-file flags after the subcommand token.
pub fn expand_argv(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let flags = read_flags(Path::new(&path))?;
    let Some(pos) = argv.iter().position(|a| SUBCOMMANDS.iter().any(|s| a == s)) else {
        return Ok(argv);
    };
    let mut out = argv[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}
