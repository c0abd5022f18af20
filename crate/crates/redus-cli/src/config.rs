//! Flat `key=value` config files. Keys match the long flag names with
//! either dashes or underscores; `#` starts a comment. Flags always win.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut entries = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(key.trim().replace('-', "_"), value.trim().to_owned());
        }
        Ok(ConfigFile { entries })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::usage(format!("config key {key}: cannot parse value {raw:?}"))
            }),
        }
    }
}

/// flag > config file > default.
pub fn resolve<T: FromStr>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
    default: T,
) -> CliResult<T> {
    Ok(match flag {
        Some(v) => v,
        None => config.get(key)?.unwrap_or(default),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_and_resolves() {
        let mut path = std::env::temp_dir();
        path.push(format!("redus-cfg-{}.conf", std::process::id()));
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# comment\nepochs = 7\nbatch-size=64\n").unwrap();
        let cfg = ConfigFile::load(Some(&path)).unwrap();
        std::fs::remove_file(&path).ok();

        assert_eq!(resolve(None, &cfg, "epochs", 10u32).unwrap(), 7);
        assert_eq!(resolve(Some(3u32), &cfg, "epochs", 10).unwrap(), 3);
        assert_eq!(resolve(None, &cfg, "batch_size", 32usize).unwrap(), 64);
        assert_eq!(resolve(None, &cfg, "lr", 0.01f64).unwrap(), 0.01);
    }

    #[test]
    fn rejects_malformed_lines() {
        let mut path = std::env::temp_dir();
        path.push(format!("redus-cfg-bad-{}.conf", std::process::id()));
        std::fs::write(&path, "epochs 7\n").unwrap();
        let err = ConfigFile::load(Some(&path)).unwrap_err();
        std::fs::remove_file(&path).ok();
        assert_eq!(err.exit_code(), 2);
    }
}
