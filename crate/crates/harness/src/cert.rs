use bkpd_tower::{Agreement, FilDegree, Window};
use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

/// Smallest window on which a PASS may be claimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tolerance {
    pub min_digits: i32,
    /// Fraction `1/udeg_divisor` of the nominal cutoff at the compared level.
    pub udeg_divisor: usize,
}

impl Tolerance {
    /// `N - 2` digits on half the cutoff.
    pub fn standard(digits: u32) -> Self {
        Tolerance { min_digits: digits as i32 - 2, udeg_divisor: 2 }
    }

    pub fn judge_window(&self, w: Window, cutoff: usize) -> Verdict {
        if w.covers(self.min_digits, cutoff / self.udeg_divisor) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }

    /// A disagreement is a FAIL whatever its window.
    pub fn judge(&self, a: &Agreement, cutoff: usize) -> Verdict {
        match a {
            Agreement::Agree(w) => self.judge_window(*w, cutoff),
            Agreement::Differ { .. } => Verdict::Fail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub index: usize,
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<FilDegree>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub millis: Option<u64>,
}

impl Case {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Case { index: 0, name: name.into(), verdict, window: None, residual: None, detail: None, millis: None }
    }

    pub fn with_window(mut self, w: Window) -> Self {
        self.window = Some(w);
        self
    }

    pub fn with_residual(mut self, r: FilDegree) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    /// Exact check: PASS or FAIL.
    pub fn exact(name: impl Into<String>, ok: bool) -> Self {
        Case::new(name, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn from_agreement(name: impl Into<String>, a: &Agreement, tol: &Tolerance, cutoff: usize) -> Self {
        let case = Case::new(name, tol.judge(a, cutoff)).with_window(a.window());
        match a {
            Agreement::Differ { degree, valuation, .. } => {
                case.with_detail(format!("differs at u^{degree} with valuation {valuation}"))
            }
            Agreement::Agree(_) => case,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub suite: String,
    pub version: String,
    pub config: SuiteConfig,
    pub tolerance: Tolerance,
    pub summary: Summary,
    pub cases: Vec<Case>,
    /// Command output such as a recovered vector.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub data: Option<serde_json::Value>,
}

impl Certificate {
    /// Numbers the cases in order and tallies verdicts.
    pub fn new(suite: impl Into<String>, config: &SuiteConfig, tolerance: Tolerance, mut cases: Vec<Case>) -> Self {
        let mut summary = Summary::default();
        for (i, c) in cases.iter_mut().enumerate() {
            c.index = i;
            match c.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Inconclusive => summary.inconclusive += 1,
            }
        }
        Certificate {
            schema: crate::json::SCHEMA,
            suite: suite.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            tolerance,
            summary,
            cases,
            data: None,
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.summary.fail > 0 {
            Verdict::Fail
        } else if self.summary.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    /// 0 all PASS, 1 any FAIL, 2 INCONCLUSIVE but no FAIL.
    pub fn exit_code(&self) -> i32 {
        match self.verdict() {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}
