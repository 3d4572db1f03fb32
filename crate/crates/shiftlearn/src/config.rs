//! Run configuration: one flat TOML table. Environment variables named
//! `SHIFTLEARN_<KEY>` override the file and command-line flags override both.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shiftlearn_core::template::ExtractParams;
use shiftlearn_core::Rational;

use crate::error::{CliError, Result};

pub const ENV_PREFIX: &str = "SHIFTLEARN_";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Base directory; the relative paths below resolve against it.
    pub data: PathBuf,
    pub rosters: PathBuf,
    pub requests: PathBuf,
    pub demand: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manual: Option<PathBuf>,
    pub catalogue: PathBuf,
    pub out: PathBuf,
    pub n_min: u32,
    pub n_max: u32,
    /// Thresholds are decimal or `p/q` strings so they stay exact.
    pub tau_u: String,
    pub tau_c: String,
    pub tau_f: String,
    pub exclusion: bool,
    pub time_budget: u64,
    pub seed: u64,
    pub t3_slack: u32,
    pub t4_slack_lo: u32,
    pub t4_slack_hi: u32,
    pub demoted_weight: u32,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: PathBuf::from("."),
            rosters: PathBuf::from("rosters"),
            requests: PathBuf::from("requests"),
            demand: PathBuf::from("demand.csv"),
            mapping: None,
            manual: None,
            catalogue: PathBuf::from("catalogue.toml"),
            out: PathBuf::from("out"),
            n_min: 2,
            n_max: 7,
            tau_u: "1.25".into(),
            tau_c: "0.15".into(),
            tau_f: "0.5".into(),
            exclusion: true,
            time_budget: 60,
            seed: 0,
            t3_slack: 1,
            t4_slack_lo: 1,
            t4_slack_hi: 1,
            demoted_weight: 1,
            jobs: 1,
        }
    }
}

/// Reads `1.25`, `5/4` or `1` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i64, i64) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
        return (q != 0).then(|| Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || frac.len() > 12 {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let scale = 10i64.pow(frac.len() as u32);
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let v = Rational::new(whole.checked_mul(scale)?.checked_add(part)?, scale);
    Some(if neg { -v } else { v })
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// File (if any), then environment overrides from `env`.
    pub fn load(file: Option<&Path>, env: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut table = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        let defaults = toml::Table::try_from(RunConfig::default()).expect("defaults serialize");
        for (k, v) in env {
            let Some(key) = k.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let key = key.to_ascii_lowercase();
            let value = match defaults.get(&key) {
                Some(toml::Value::Integer(_)) => toml::Value::Integer(
                    v.parse()
                        .map_err(|_| CliError::Config(format!("{k}: expected an integer, got `{v}`")))?,
                ),
                Some(toml::Value::Boolean(_)) => toml::Value::Boolean(
                    v.parse()
                        .map_err(|_| CliError::Config(format!("{k}: expected true or false, got `{v}`")))?,
                ),
                Some(_) | None if matches!(key.as_str(), "mapping" | "manual") || defaults.contains_key(&key) => {
                    toml::Value::String(v)
                }
                _ => return Err(CliError::Config(format!("{k}: unknown setting `{key}`"))),
            };
            table.insert(key, value);
        }
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.jobs == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ExtractParams> {
        let rat = |name: &str, s: &str| {
            parse_rational(s).ok_or_else(|| CliError::Config(format!("{name}: cannot read `{s}` as a number")))
        };
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(CliError::Config(format!(
                "n_min={} n_max={} is not a window range",
                self.n_min, self.n_max
            )));
        }
        Ok(ExtractParams {
            n_min: self.n_min,
            n_max: self.n_max,
            tau_u: rat("tau_u", &self.tau_u)?,
            tau_c: rat("tau_c", &self.tau_c)?,
            tau_f: rat("tau_f", &self.tau_f)?,
        })
    }

    pub fn path(&self, p: &Path) -> PathBuf {
        self.data.join(p)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.data.join(&self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let text = RunConfig::default().to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, RunConfig::default());
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn defaults_are_the_published_settings() {
        let p = RunConfig::default().params().unwrap();
        assert_eq!(p, ExtractParams::default());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.15"), Some(Rational::new(3, 20)));
        assert_eq!(parse_rational("5/4"), Some(Rational::new(5, 4)));
        assert_eq!(parse_rational("2"), Some(Rational::from_integer(2)));
        assert_eq!(parse_rational("-.5"), Some(Rational::new(-1, 2)));
        assert_eq!(parse_rational("1.2.3"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn env_beats_file() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("c.toml");
        std::fs::write(&f, "tau_c = \"0.2\"\nseed = 4\n").unwrap();
        let env = vec![
            ("SHIFTLEARN_SEED".to_string(), "9".to_string()),
            ("SHIFTLEARN_EXCLUSION".to_string(), "false".to_string()),
            ("PATH".to_string(), "/bin".to_string()),
        ];
        let c = RunConfig::load(Some(&f), env).unwrap();
        assert_eq!((c.seed, c.exclusion, c.tau_c.as_str()), (9, false, "0.2"));
    }

    #[test]
    fn bad_values_are_configuration_errors() {
        let env = vec![("SHIFTLEARN_SEED".to_string(), "many".to_string())];
        assert_eq!(RunConfig::load(None, env).unwrap_err().exit_code(), 3);
        let env = vec![("SHIFTLEARN_TAU_U".to_string(), "high".to_string())];
        assert_eq!(RunConfig::load(None, env).unwrap_err().exit_code(), 3);
        let env = vec![("SHIFTLEARN_COLOUR".to_string(), "red".to_string())];
        assert_eq!(RunConfig::load(None, env).unwrap_err().exit_code(), 3);
    }
}
