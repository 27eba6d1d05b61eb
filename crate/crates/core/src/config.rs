//! Suite configuration: flat `key = value` files and their validation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mode_space::{parse_modeset, ModeSet, WaveVector};
use crate::report::OutputFormat;

pub const SUITES: [&str; 8] = [
    "canonical-commutators",
    "observable-commutators",
    "decomposition-compare",
    "gauge-hiding",
    "counter-rotating",
    "field-consistency",
    "dirac",
    "all",
];

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    /// Half list of a negation-closed grid.
    pub grid: Option<Vec<WaveVector>>,
    /// `(|k|, l_max)`.
    pub shell: Option<(f64, i64)>,
    pub n_max: Option<u32>,
    /// Overrides every equality tolerance of the suite.
    pub tol: Option<f64>,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub dim_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: "all".into(),
            grid: None,
            shell: None,
            n_max: None,
            tol: None,
            seed: DEFAULT_SEED,
            format: OutputFormat::Text,
            out: None,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment, later keys win.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected 'key = value'", lineno + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse '{v}'")))
}

/// `kx,ky,kz;kx,ky,kz` inline, or a path to a mode-set file.
pub fn parse_grid_spec(v: &str) -> Result<Vec<WaveVector>> {
    let ms = if Path::new(v).is_file() {
        parse_modeset(&std::fs::read_to_string(v)?)?
    } else {
        parse_modeset(&v.replace(';', "\n"))?
    };
    match ms {
        ModeSet::CartesianGrid(g) => Ok(g.half_list()),
        ModeSet::SphericalShell(_) => Err(Error::InvalidConfig("--grid expects wave vectors, not a shell".into())),
    }
}

/// `|k|,lmax`.
pub fn parse_shell_spec(v: &str) -> Result<(f64, i64)> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidConfig(format!("shell: expected '|k|,lmax', got '{v}'")));
    }
    Ok((parse_num("shell", parts[0])?, parse_num("shell", parts[1])?))
}

impl SuiteConfig {
    /// Applies recognised keys on top of `self`.
    pub fn apply(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in map {
            match k.as_str() {
                "suite" => self.suite = v.clone(),
                "grid" => self.grid = Some(parse_grid_spec(v)?),
                "shell" => self.shell = Some(parse_shell_spec(v)?),
                "nmax" | "n_max" => self.n_max = Some(parse_num(k, v)?),
                "tol" => self.tol = Some(parse_num(k, v)?),
                "seed" => self.seed = parse_num(k, v)?,
                "format" => self.format = v.parse()?,
                "out" => self.out = Some(PathBuf::from(v)),
                "dim_cap" => self.dim_cap = parse_num(k, v)?,
                other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut c = Self::default();
        c.apply(&parse_key_values(&std::fs::read_to_string(path)?)?)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::UnknownSuite(self.suite.clone()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.n_max == Some(0) {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        if let Some((r, l)) = self.shell {
            if !(r > 0.0) {
                return Err(Error::InvalidConfig("shell radius must be positive".into()));
            }
            if l < 0 {
                return Err(Error::NegativeLmax(l));
            }
        }
        if matches!(&self.grid, Some(g) if g.is_empty()) {
            return Err(Error::InvalidConfig("grid has no modes".into()));
        }
        Ok(())
    }

    /// Settings that affect results, for the report header.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("suite".into(), self.suite.clone());
        if let Some(g) = &self.grid {
            let s: Vec<String> = g
                .iter()
                .map(|k| {
                    let [x, y, z] = k.components();
                    format!("{x},{y},{z}")
                })
                .collect();
            m.insert("grid".into(), s.join(";"));
        }
        if let Some((r, l)) = self.shell {
            m.insert("shell".into(), format!("{r},{l}"));
        }
        if let Some(n) = self.n_max {
            m.insert("nmax".into(), n.to_string());
        }
        if let Some(t) = self.tol {
            m.insert("tol".into(), format!("{t:e}"));
        }
        m.insert("seed".into(), self.seed.to_string());
        m.insert("dim_cap".into(), self.dim_cap.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values_and_overrides() {
        let map = parse_key_values("# demo\nsuite = dirac\nnmax=3\ndim-cap = 4096\ngrid = 0,0,1;1,0,0\n").unwrap();
        let mut c = SuiteConfig::default();
        c.apply(&map).unwrap();
        assert_eq!(c.suite, "dirac");
        assert_eq!(c.n_max, Some(3));
        assert_eq!(c.dim_cap, 4096);
        assert_eq!(c.grid.as_ref().unwrap().len(), 2);
        c.apply(&BTreeMap::from([("suite".to_string(), "all".to_string())])).unwrap();
        assert_eq!(c.suite, "all");
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_key_values("no equals sign").is_err());
        let mut c = SuiteConfig::default();
        assert!(c.apply(&BTreeMap::from([("colour".to_string(), "red".to_string())])).is_err());
        c.suite = "nonexistent".into();
        assert_eq!(c.validate(), Err(Error::UnknownSuite("nonexistent".into())));
        let c = SuiteConfig { tol: Some(0.0), ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        assert!(parse_shell_spec("1.0").is_err());
        assert_eq!(parse_shell_spec("2,1").unwrap(), (2.0, 1));
    }
}
