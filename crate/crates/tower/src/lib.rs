//! Arithmetic in the tower `𝔖_n ⊂ S_n`, `n = 0..depth`.
//!
//! Elements are truncated series in `u_n` (with `u_n = u_{n+1}^p`) over
//! capped-relative p-adic coefficients. Divided-power questions (membership
//! in `S_n`, filtration degree, divisibility by powers of `E`) all go through
//! the `E`-adic expansion in [`pd`].

mod decompose;
mod element;
mod error;
pub mod matrix;
pub mod pd;
pub mod special;
mod weierstrass;
mod window;

pub use decompose::{decompose_frak_s_fil, decompose_key_a, KeyASplit};
pub use element::{Tag, TowerElement, UPrec};
pub use error::TowerError;
pub use matrix::Matrix;
pub use pd::{fil_at_least, fil_degree, from_pd_form, pd_canonical_form, FilCheck, FilDegree, PDForm};
pub use weierstrass::{divide_by_monic, inverse_unit, weierstrass_divide, Division};
pub use window::{Agreement, Window};

pub use bkpd_precision::{PadicCoeff, PrecisionContext};
