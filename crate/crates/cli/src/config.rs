//! Run configuration from `key = value` lines.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Angle-sum and shape-product tolerance for geometric verification.
    pub geometric_tol: f64,
    /// Residual tolerance for horoball tangencies.
    pub tangency_tol: f64,
    pub prime_bound: u64,
    /// Longest accepted L/R word.
    pub max_depth: usize,
    pub output_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config { geometric_tol: 1e-8, tangency_tol: 1e-9, prime_bound: hyptri::congruence::DEFAULT_PRIME_BOUND, max_depth: 10_000, output_dir: PathBuf::from(".") }
    }
}

impl Config {
    /// Defaults overridden by the entries of `text`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').with_context(|| format!("config line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| format!("config line {}: {key} {what}", i + 1);
            match key {
                "geometric_tol" => c.geometric_tol = value.parse().with_context(|| bad("is not a number"))?,
                "tangency_tol" => c.tangency_tol = value.parse().with_context(|| bad("is not a number"))?,
                "prime_bound" => c.prime_bound = value.parse().with_context(|| bad("is not a nonnegative integer"))?,
                "max_depth" => c.max_depth = value.parse().with_context(|| bad("is not a nonnegative integer"))?,
                "output_dir" => c.output_dir = PathBuf::from(value.trim_matches('"')),
                _ => bail!("config line {}: unknown key `{key}`", i + 1),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("geometric_tol", self.geometric_tol), ("tangency_tol", self.tangency_tol)] {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if self.prime_bound < 1 {
            bail!("prime_bound must be at least 1");
        }
        if self.max_depth < 1 {
            bail!("max_depth must be at least 1");
        }
        if self.output_dir.as_os_str().is_empty() {
            bail!("output_dir is empty");
        }
        Ok(())
    }
}
