use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Format, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(format!("unknown format '{s}' (expected json, csv or text)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

/// Settings shared by all subcommands. `None` means "use the command's default".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub precision: Option<u32>,
    pub order: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub no_timestamp: bool,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

pub const CONFIG_KEYS: [&str; 9] = ["precision", "order", "grid", "tol", "format", "out", "threads", "seed", "no_timestamp"];

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Some(true),
        "0" | "false" | "no" | "off" => Some(false),
        _ => None,
    }
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are ignored,
/// keys may use `-` or `_`. Later lines override earlier ones.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line, message };
        let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected key = value, found '{content}'")))?;
        let key = key.trim().replace('-', "_").to_ascii_lowercase();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(format!("missing value for '{key}'")));
        }
        let num = |what: &str| err(format!("'{key}' expects {what}, found '{value}'"));
        match key.as_str() {
            "precision" => {
                let p: u32 = value.parse().map_err(|_| num("an integer"))?;
                if !(32..=1 << 16).contains(&p) {
                    return Err(err(format!("precision must be in 32..=65536 bits, found {p}")));
                }
                cfg.precision = Some(p);
            }
            "order" => cfg.order = Some(value.parse().map_err(|_| num("an integer"))?),
            "grid" => cfg.grid = Some(value.parse().map_err(|_| num("an integer"))?),
            "tol" => {
                let t: f64 = value.parse().map_err(|_| num("a number"))?;
                if !(t.is_finite() && t >= 0.0) {
                    return Err(err("tol must be a finite nonnegative number".into()));
                }
                cfg.tol = Some(t);
            }
            "format" => cfg.format = Some(value.parse().map_err(err)?),
            "out" => cfg.out = Some(value.to_string()),
            "threads" => cfg.threads = Some(value.parse().map_err(|_| num("an integer"))?),
            "seed" => cfg.seed = Some(value.parse().map_err(|_| num("an integer"))?),
            "no_timestamp" => cfg.no_timestamp = parse_bool(value).ok_or_else(|| num("a boolean"))?,
            _ => return Err(err(format!("unknown key '{key}' (known: {})", CONFIG_KEYS.join(", ")))),
        }
    }
    Ok(cfg)
}

impl RunConfig {
    /// `other` wins wherever it sets a value.
    pub fn merged(&self, other: &RunConfig) -> RunConfig {
        RunConfig {
            precision: other.precision.or(self.precision),
            order: other.order.or(self.order),
            grid: other.grid.or(self.grid),
            tol: other.tol.or(self.tol),
            format: other.format.or(self.format),
            out: other.out.clone().or_else(|| self.out.clone()),
            threads: other.threads.or(self.threads),
            seed: other.seed.or(self.seed),
            no_timestamp: other.no_timestamp || self.no_timestamp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_keys_and_comments() {
        let c = parse_config("# defaults\nprecision = 256\norder=10 # inline\n\nformat = CSV\nno-timestamp = yes\n").unwrap();
        assert_eq!(c.precision, Some(256));
        assert_eq!(c.order, Some(10));
        assert_eq!(c.format, Some(Format::Csv));
        assert!(c.no_timestamp);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_config("order = 3\nbogus = 1").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_config("precision = 8").is_err());
        assert!(parse_config("tol = -1").is_err());
        assert!(parse_config("order").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config("order = 8\nseed = 3").unwrap();
        let flags = RunConfig { order: Some(12), ..RunConfig::default() };
        let m = file.merged(&flags);
        assert_eq!(m.order, Some(12));
        assert_eq!(m.seed, Some(3));
    }
}
