//! Seeded verification suites, JSON forms and certificates behind the
//! `bkpd` command-line tool.

mod cert;
mod config;
pub mod json;
mod suites;

use thiserror::Error;

pub use cert::{Case, Certificate, Summary, Tolerance, Verdict};
pub use config::{parse_poly, SuiteConfig};
pub use suites::{
    contraction_cases, descend_chain, example, instance_rng, legendre_case, random_frak_s, random_s, ring_suite,
    roundtrip, roundtrip_case, validate_module, Example,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("schema version {found} does not match {expected}")]
    SchemaMismatch { expected: u32, found: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
