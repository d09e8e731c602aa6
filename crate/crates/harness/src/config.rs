use std::path::{Path, PathBuf};
use std::sync::Arc;

use bkpd_precision::PrecisionContext;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Everything a suite run depends on. The seed fixes all randomness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub p: u64,
    pub e: usize,
    /// Coefficients of `E`, constant term first. `None` means `u^e + p`.
    pub eisenstein: Option<Vec<i64>>,
    /// p-adic digits `N`.
    pub digits: u32,
    /// Base u-adic cutoff `M`; `None` means `3 e p^2`.
    pub cutoff: Option<usize>,
    pub depth: usize,
    /// Largest rank drawn by the round-trip suite.
    pub d: usize,
    /// Fixed height, or `None` to draw `r <= min(3, p - 2)` per instance.
    pub r: Option<usize>,
    pub seed: u64,
    pub count: usize,
    pub suite: Option<String>,
    pub out: Option<PathBuf>,
    /// Record wall-clock time per case. Off by default so that output is
    /// byte-stable.
    pub timing: bool,
    /// Number of `λ` factors for the example suite; `None` for the full
    /// product up to the cutoff.
    pub lambda_terms: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            p: 3,
            e: 1,
            eisenstein: None,
            digits: 8,
            cutoff: None,
            depth: 3,
            d: 2,
            r: None,
            seed: 0,
            count: 20,
            suite: None,
            out: None,
            timing: false,
            lambda_terms: None,
        }
    }
}

impl SuiteConfig {
    pub fn eisenstein_coeffs(&self) -> Vec<i64> {
        match &self.eisenstein {
            Some(c) => c.clone(),
            None => {
                let mut c = vec![0; self.e + 1];
                c[0] = self.p as i64;
                c[self.e] = 1;
                c
            }
        }
    }

    pub fn base_cutoff(&self) -> usize {
        self.cutoff.unwrap_or(3 * self.e * (self.p * self.p) as usize)
    }

    pub fn context(&self) -> Result<Arc<PrecisionContext>, HarnessError> {
        let coeffs = self.eisenstein_coeffs();
        if coeffs.len() != self.e + 1 {
            return Err(HarnessError::ConfigInvalid(format!(
                "E has degree {} but e = {}",
                coeffs.len().saturating_sub(1),
                self.e
            )));
        }
        let ctx = PrecisionContext::new(self.p, coeffs, self.digits, self.base_cutoff(), self.depth)
            .map_err(|e| HarnessError::ConfigInvalid(e.to_string()))?;
        if let Some(r) = self.r {
            ctx.check_height(r).map_err(|e| HarnessError::ConfigInvalid(e.to_string()))?;
        }
        Ok(Arc::new(ctx))
    }

    /// Applies one `key = value` setting. Keys match the command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let bad = |what: &str| HarnessError::ConfigInvalid(format!("{key}: cannot parse {value:?} as {what}"));
        let value = value.trim();
        match key.trim() {
            "p" => self.p = value.parse().map_err(|_| bad("a prime"))?,
            "e" => self.e = value.parse().map_err(|_| bad("a degree"))?,
            "E" => {
                let c = parse_poly(value)?;
                self.e = c.len().saturating_sub(1);
                self.eisenstein = Some(c);
            }
            "N" => self.digits = value.parse().map_err(|_| bad("a digit count"))?,
            "M" => self.cutoff = Some(value.parse().map_err(|_| bad("a cutoff"))?),
            "depth" => self.depth = value.parse().map_err(|_| bad("a depth"))?,
            "d" => self.d = value.parse().map_err(|_| bad("a rank"))?,
            "r" => self.r = Some(value.parse().map_err(|_| bad("a height"))?),
            "seed" => self.seed = value.parse().map_err(|_| bad("a seed"))?,
            "count" => self.count = value.parse().map_err(|_| bad("a count"))?,
            "suite" => self.suite = Some(value.to_string()),
            "out" => self.out = Some(PathBuf::from(value)),
            "timing" => self.timing = value.parse().map_err(|_| bad("true or false"))?,
            "lambda_terms" => self.lambda_terms = Some(value.parse().map_err(|_| bad("a count"))?),
            other => return Err(HarnessError::ConfigInvalid(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = SuiteConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::ConfigInvalid(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }
}

/// Parses an integer polynomial in `u` such as `u^2 + 5`, `u+3` or
/// `u^3 - 3u + 3`. A comma-separated list is read as coefficients from the
/// constant term up.
pub fn parse_poly(s: &str) -> Result<Vec<i64>, HarnessError> {
    let bad = || HarnessError::ConfigInvalid(format!("cannot parse polynomial {s:?}"));
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.contains(',') {
        return s.split(',').map(|t| t.parse().map_err(|_| bad())).collect();
    }
    let s = s.replace('²', "^2").replace('³', "^3").replace('*', "");
    let mut coeffs: Vec<i64> = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body[1.min(body.len())..].find(['+', '-']).map_or(body.len(), |i| i + 1);
        let (term, tail) = body.split_at(end);
        rest = tail;
        let (c, k) = match term.split_once('u') {
            None => (term.parse::<i64>().map_err(|_| bad())?, 0),
            Some((c, pow)) => {
                let c = if c.is_empty() { 1 } else { c.parse().map_err(|_| bad())? };
                let k = match pow.strip_prefix('^') {
                    Some(k) => k.parse().map_err(|_| bad())?,
                    None if pow.is_empty() => 1,
                    None => return Err(bad()),
                };
                (c, k)
            }
        };
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0);
        }
        coeffs[k] += sign * c;
    }
    if coeffs.is_empty() {
        return Err(bad());
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        assert_eq!(parse_poly("u+3").unwrap(), vec![3, 1]);
        assert_eq!(parse_poly("u² + 5").unwrap(), vec![5, 0, 1]);
        assert_eq!(parse_poly("u^3 - 3u + 3").unwrap(), vec![3, -3, 0, 1]);
        assert_eq!(parse_poly("5,0,1").unwrap(), vec![5, 0, 1]);
        assert!(parse_poly("u^x").is_err());
    }

    #[test]
    fn flat_file() {
        let mut cfg = SuiteConfig::default();
        cfg.apply_text("p = 5\n# comment\nE = u^2+5\nN=6 # trailing\nseed = 7\n").unwrap();
        assert_eq!((cfg.p, cfg.e, cfg.digits, cfg.seed), (5, 2, 6, 7));
        assert_eq!(cfg.base_cutoff(), 150);
        assert!(cfg.context().is_ok());
        assert!(cfg.apply_text("bogus = 1").is_err());
    }

    #[test]
    fn corrupted_eisenstein_is_rejected() {
        let mut cfg = SuiteConfig::default();
        cfg.set("E", "u+9").unwrap();
        assert!(matches!(cfg.context(), Err(HarnessError::ConfigInvalid(_))));
    }
}
