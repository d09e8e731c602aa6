//! Exact integer and valuation kernel.
//!
//! Everything in the tower crates bottoms out here: the global
//! [`PrecisionContext`], the capped-relative [`PadicCoeff`], factorial
//! valuations and the two contraction sequences that bound how fast
//! filtration degrees grow under Frobenius.

mod coeff;
mod context;
mod contraction;
mod error;
mod legendre;

pub use coeff::{PadicCoeff, EXACT};
pub use context::PrecisionContext;
pub use contraction::{
    contraction_bound, contraction_sequence, keyc_divisibility, pd_term_valuation, PdTermValuation,
    SequenceKind,
};
pub use error::PrecisionError;
pub use legendre::{digit_sum, legendre_valuation, valuation_of};
