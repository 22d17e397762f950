//! Layered experiment configuration: hard-coded defaults, overridden by a
//! `key=value` config file, overridden by explicit command-line flags.
//! Every resolved value is recorded so the output header can state the full
//! effective configuration, and config keys no parameter consumed are
//! rejected by name.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

/// Failure modes split by exit code: bad invocations exit 2, failures while
/// running a valid experiment exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<plslab::Error> for CliError {
    fn from(e: plslab::Error) -> Self {
        match e {
            // Rejected parameter values trace back to the invocation.
            plslab::Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Resolves parameters one by one, consuming config-file entries and
/// remembering every effective value for the output header.
pub struct Resolver {
    config: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    /// Load the optional config file: one `key=value` per line, `#` comments
    /// and blank lines ignored.
    pub fn new(config_path: Option<&Path>) -> CliResult<Self> {
        let mut config = BTreeMap::new();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::Usage(format!(
                        "config line {} is not key=value: {raw:?}",
                        lineno + 1
                    )));
                };
                if config
                    .insert(key.trim().to_string(), value.trim().to_string())
                    .is_some()
                {
                    return Err(CliError::Usage(format!(
                        "config sets {} twice",
                        key.trim()
                    )));
                }
            }
        }
        Ok(Resolver {
            config,
            resolved: BTreeMap::new(),
        })
    }

    fn resolve<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> CliResult<T> {
        let from_config = self.config.remove(key);
        let value = if let Some(v) = flag {
            v
        } else if let Some(s) = from_config {
            s.parse().map_err(|_| {
                CliError::Usage(format!("config value for {key} does not parse: {s:?}"))
            })?
        } else {
            default
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    pub fn f64(&mut self, key: &str, flag: Option<f64>, default: f64) -> CliResult<f64> {
        self.resolve(key, flag, default)
    }

    pub fn usize(&mut self, key: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        self.resolve(key, flag, default)
    }

    pub fn string(&mut self, key: &str, flag: Option<String>, default: &str) -> CliResult<String> {
        self.resolve(key, flag, default.to_string())
    }

    /// A comma-separated list of reals (for grids).
    pub fn f64_list(
        &mut self,
        key: &str,
        flag: Option<String>,
        default: &str,
    ) -> CliResult<Vec<f64>> {
        let raw = self.resolve(key, flag, default.to_string())?;
        raw.split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| {
                    CliError::Usage(format!("list entry in {key} does not parse: {s:?}"))
                })
            })
            .collect()
    }

    /// One of a fixed set of words.
    pub fn choice(
        &mut self,
        key: &str,
        flag: Option<String>,
        default: &str,
        allowed: &[&str],
    ) -> CliResult<String> {
        let value = self.string(key, flag, default)?;
        if !allowed.contains(&value.as_str()) {
            return Err(CliError::Usage(format!(
                "{key} must be one of {allowed:?}, got {value:?}"
            )));
        }
        Ok(value)
    }

    /// Every config key must have been consumed by some parameter.
    pub fn finish(self) -> CliResult<BTreeMap<String, String>> {
        if let Some(key) = self.config.keys().next() {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
        Ok(self.resolved)
    }
}

/// CSV assembly: a `#` header naming the experiment, seed, and the full
/// resolved configuration, then a column-name row, then data rows. The
/// whole artifact is built in memory and written atomically so failed runs
/// leave no partial files.
pub struct CsvDoc {
    buf: String,
}

impl CsvDoc {
    pub fn new(subcommand: &str, seed: u64, resolved: &BTreeMap<String, String>) -> Self {
        let mut buf = format!("# plslab {subcommand} seed={seed}\n# config:");
        for (k, v) in resolved {
            buf.push_str(&format!(" {k}={v}"));
        }
        buf.push('\n');
        CsvDoc { buf }
    }

    pub fn columns(&mut self, names: &[&str]) {
        self.buf.push_str(&names.join(","));
        self.buf.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn write_out(self, out: Option<&Path>) -> CliResult<()> {
        match out {
            Some(path) => std::fs::write(path, self.buf)?,
            None => print!("{}", self.buf),
        }
        Ok(())
    }
}

/// Canonical float formatting for data cells: six decimal places.
pub fn num(v: f64) -> String {
    format!("{v:.6}")
}

/// Scientific formatting for statistics that live across many orders of
/// magnitude.
pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}
