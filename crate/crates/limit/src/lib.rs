//! The inverse limit `lim_{φ,n} Fil^0(𝓜 ⊗_S S_n[z_n^{-1}])` at finite depth.
//!
//! A chain element at level `n` is stored by its `e`-coordinates `w_n`, with
//! `ξ_n = z_n^{-r} (e) w_n`. Compatibility `(φ_𝓜 ⊗ φ)(ξ_{n+1}) = ξ_n` reads
//! `φ(E)^r w_n = φ(B) φ(w_{n+1})`.

mod chain;
mod descent;
mod recover;

use bkpd_breuil::BreuilError;
use bkpd_tower::{Agreement, TowerError};
use thiserror::Error;

pub use chain::{
    chain_from_vector, check_compat, filr_generator_chain, frobenius_down, generator_chain, lift, Chain,
    ChainElement, CompatCertificate,
};
pub use descent::{descend, descend_with, Descent};
pub use recover::{recover_filtered, Recovery, RecoveryCheck};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("chain is not φ-compatible between levels {} and {level}: {residual:?}", level - 1)]
    Incompatible { level: usize, residual: Agreement },
    #[error("no element at level {level} maps to the given one: {source}")]
    NoExtension { level: usize, source: TowerError },
    #[error("descent contradicts the chain at level {level}: {detail}")]
    DescentContradiction { level: usize, detail: String },
    #[error("descent inconclusive: {0}")]
    DescentInconclusive(String),
    #[error("level {level} exceeds the tower depth {depth}")]
    DepthExceeded { level: usize, depth: usize },
    #[error(transparent)]
    Breuil(#[from] BreuilError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}
