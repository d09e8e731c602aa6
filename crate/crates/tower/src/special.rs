//! Distinguished elements: `E`, `φ(E)`, `v`, `z_n`, `c_0` and `λ`.

use std::sync::Arc;

use bkpd_precision::{PadicCoeff, PrecisionContext};

use crate::element::{Tag, TowerElement, UPrec};
use crate::error::TowerError;

/// `E(u_n^{p^{n+s}})`, i.e. `φ^s(E)` written at level `n`.
fn eisenstein_twisted(ctx: &Arc<PrecisionContext>, level: usize, twist: u32) -> TowerElement {
    let step = (ctx.p() as usize).pow(level as u32 + twist);
    let terms = ctx
        .eisenstein()
        .iter()
        .enumerate()
        .map(|(k, &c)| (k * step, PadicCoeff::from_int(c, ctx)))
        .collect();
    TowerElement::from_terms(ctx, level, Tag::FrakS, terms, UPrec::Poly)
}

/// `E` at level `n`.
pub fn eisenstein(ctx: &Arc<PrecisionContext>, level: usize) -> TowerElement {
    eisenstein_twisted(ctx, level, 0)
}

/// `φ(E) = E(u_0^p)` at level `n`.
pub fn phi_eisenstein(ctx: &Arc<PrecisionContext>, level: usize) -> TowerElement {
    eisenstein_twisted(ctx, level, 1)
}

/// `v = (φ(E) - E^p)/p`, an element of `𝔖` with unit constant term.
pub fn v_element(ctx: &Arc<PrecisionContext>, level: usize) -> Result<TowerElement, TowerError> {
    let e = eisenstein(ctx, level);
    let diff = phi_eisenstein(ctx, level).sub(&e.pow(ctx.p() as usize)?)?;
    diff.shift_p(-1)?.into_frak_s()
}

/// `z_n = E(u_0) E(u_1) ⋯ E(u_{n-1})` at level `n`; `z_0 = 1`.
pub fn z_element(ctx: &Arc<PrecisionContext>, n: usize) -> Result<TowerElement, TowerError> {
    if n > ctx.depth() {
        return Err(TowerError::DepthExceeded { level: n, depth: ctx.depth() });
    }
    let mut z = TowerElement::one(ctx, n);
    for k in 0..n {
        // E(u_k) = E(u_n^{p^{n-k}})
        let step = (ctx.p() as usize).pow((n - k) as u32);
        let terms = ctx
            .eisenstein()
            .iter()
            .enumerate()
            .map(|(i, &c)| (i * step, PadicCoeff::from_int(c, ctx)))
            .collect();
        let ek = TowerElement::from_terms(ctx, n, Tag::FrakS, terms, UPrec::Poly);
        z = z.mul(&ek)?;
    }
    Ok(z)
}

/// `c_0 = φ(E)/p`, a unit of `S`.
pub fn c0(ctx: &Arc<PrecisionContext>, level: usize) -> Result<TowerElement, TowerError> {
    Ok(phi_eisenstein(ctx, level).shift_p(-1)?.with_tag_unchecked(Tag::S))
}

/// `∏_{k < count} φ^k(c_0)` at level 0.
pub fn lambda_truncated(ctx: &Arc<PrecisionContext>, count: usize) -> Result<TowerElement, TowerError> {
    let mut acc = TowerElement::one(ctx, 0);
    for k in 0..count {
        let f = eisenstein_twisted(ctx, 0, k as u32 + 1).shift_p(-1)?;
        acc = acc.mul(&f)?;
    }
    Ok(acc.with_tag_unchecked(Tag::S))
}

/// `λ = ∏_{k ≥ 0} φ^k(c_0)` at level 0. Factors with `p^{k+1} >= M` are
/// `1` below the cutoff, so the product is complete there.
pub fn lambda_unit(ctx: &Arc<PrecisionContext>) -> Result<TowerElement, TowerError> {
    let m = ctx.base_cutoff();
    let p = ctx.p() as usize;
    let mut count = 0;
    let mut pk = p;
    while pk < m {
        count += 1;
        pk *= p;
    }
    Ok(lambda_truncated(ctx, count)?.to_series())
}

impl TowerElement {
    /// Marks a polynomial as a truncation of a genuine power series.
    pub(crate) fn to_series(&self) -> TowerElement {
        match self.uprec() {
            UPrec::Poly => TowerElement::from_terms(
                self.ctx(),
                self.level(),
                self.tag(),
                self.terms().to_vec(),
                UPrec::Upto(self.cutoff()),
            ),
            UPrec::Upto(_) => self.clone(),
        }
    }
}
