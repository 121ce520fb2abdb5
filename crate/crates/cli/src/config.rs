//! Flat `key = value` configuration. Keys use the long flag names with
//! `-` or `_` interchangeably; `#` starts a comment line.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::Context;
use clap::ValueEnum;

use crate::Invalid;

const KEYS: &[&str] = &[
    "workers",
    "variant",
    "spectrum",
    "enumerate",
    "ensemble",
    "snr",
    "snr_start",
    "snr_stop",
    "snr_step",
    "snr_convention",
    "theta_policy",
    "dstar",
    "base_bound",
    "truncate",
    "max_k",
    "code",
    "trials",
    "seed",
    "format",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let lno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Invalid(format!("config line {lno}: expected `key = value`")).into());
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Invalid(format!("config line {lno}: unknown key `{key}`")).into());
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Invalid(format!("config line {lno}: duplicate key `{key}`")).into());
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if set, else the parsed config value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> anyhow::Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Invalid(format!("config key `{key}`: cannot parse `{v}`")).into())
            })
            .transpose()
    }

    pub fn pick_enum<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> anyhow::Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|_| Invalid(format!("config key `{key}`: unknown value `{v}`")).into())
            })
            .transpose()
    }

    /// Two whitespace-separated integers, as for `ensemble`.
    pub fn pick_pair(&self, flag: Option<Vec<usize>>, key: &str) -> anyhow::Result<Option<(usize, usize)>> {
        if let Some(v) = flag {
            return Ok(Some((v[0], v[1])));
        }
        let Some(raw) = self.raw(key) else {
            return Ok(None);
        };
        let parts: Vec<usize> = raw
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| Invalid(format!("config key `{key}`: expected two integers")))?;
        match parts[..] {
            [a, b] => Ok(Some((a, b))),
            _ => Err(Invalid(format!("config key `{key}`: expected two integers")).into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::ConventionArg;

    #[test]
    fn flags_win_over_config() {
        let cfg = Config::parse("# defaults\nsnr-step = 0.5\nsnr_convention=es-n0\nensemble = 100 95\n").unwrap();
        assert_eq!(cfg.pick::<f64>(None, "snr_step").unwrap(), Some(0.5));
        assert_eq!(cfg.pick(Some(0.25), "snr_step").unwrap(), Some(0.25));
        assert_eq!(cfg.pick::<f64>(None, "snr_start").unwrap(), None);
        assert_eq!(
            cfg.pick_enum::<ConventionArg>(None, "snr_convention").unwrap(),
            Some(ConventionArg::EsN0)
        );
        assert_eq!(cfg.pick_pair(None, "ensemble").unwrap(), Some((100, 95)));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("nonsense\n").is_err());
        assert!(Config::parse("colour = red\n").is_err());
        assert!(Config::parse("seed = 1\nseed = 2\n").is_err());
        let cfg = Config::parse("seed = x\n").unwrap();
        assert!(cfg.pick::<u64>(None, "seed").is_err());
    }
}
