//! Divided-power canonical forms `x = Σ a_j γ_j(E)` with `deg a_j < e p^n`.

use std::sync::Arc;

use bkpd_precision::{PadicCoeff, PrecisionContext, EXACT};
use serde::{Deserialize, Serialize};

use crate::element::{Tag, TowerElement, UPrec};
use crate::error::TowerError;
use crate::weierstrass::{dense, dense_len, MonicDivisor};
use crate::window::Window;

/// `Σ_j a_j γ_j(E)` at a fixed level.
#[derive(Debug, Clone, PartialEq)]
pub struct PDForm {
    pub level: usize,
    /// `a_0, a_1, ...`, each a polynomial of degree `< e p^n`.
    pub coeffs: Vec<TowerElement>,
    /// `Poly`: every `a_j` past the list is zero. `Upto(g)`: the form was
    /// read off a series known below `u^g`, and later `a_j` are bounded by
    /// [`PDForm::tail_abs`].
    pub uprec: UPrec,
    /// Valuation floor of the unknown tail of the source series.
    pub tail_scale: i32,
}

impl PDForm {
    /// A form with exactly the given coefficients.
    pub fn exact(level: usize, coeffs: Vec<TowerElement>) -> Self {
        PDForm { level, coeffs, uprec: UPrec::Poly, tail_scale: 0 }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Absolute precision to which `a_j` is known past the listed ones.
    pub fn tail_abs(&self, ctx: &PrecisionContext, j: usize) -> i32 {
        match self.uprec {
            UPrec::Poly => EXACT,
            UPrec::Upto(g) => {
                let q = (g / ctx.pd_degree(self.level)) as i32;
                self.tail_scale + (q - j as i32).max(0) + ctx.legendre(j as u64) as i32
            }
        }
    }

    pub fn coeff(&self, ctx: &Arc<PrecisionContext>, j: usize) -> TowerElement {
        match self.coeffs.get(j) {
            Some(a) => a.clone(),
            None => {
                let abs = self.tail_abs(ctx, j);
                let c = if abs == EXACT { PadicCoeff::ZERO } else { PadicCoeff::zero_to(abs) };
                TowerElement::constant(ctx, self.level, c)
            }
        }
    }
}

/// The unique divided-power expansion of `x`, by repeated division by the
/// distinguished polynomial `E(u_n^{p^n})`.
pub fn pd_canonical_form(x: &TowerElement) -> Result<PDForm, TowerError> {
    let ctx = x.ctx();
    let level = x.level();
    let div = MonicDivisor::eisenstein(ctx, level);
    let d = div.deg;
    let tail_scale = if x.tag() == Tag::FrakS { 0 } else { x.lattice_scale() };
    let q = match x.uprec() {
        UPrec::Poly => None,
        UPrec::Upto(g) => Some((g / d) as i32),
    };
    let mut vals = dense(x, dense_len(x));
    let mut coeffs = Vec::new();
    while !vals.is_empty() {
        let quot = if vals.len() > d { div.divide(&mut vals, ctx) } else { Vec::new() };
        let digit = std::mem::replace(&mut vals, quot);
        let j = coeffs.len();
        let fact = ctx.factorial(j);
        let mut terms = Vec::new();
        for (b, c) in digit.into_iter().enumerate() {
            let c = match q {
                Some(q) => c.cap_abs(tail_scale + (q - j as i32).max(0), ctx),
                None => c,
            };
            let a = c.mul(fact, ctx);
            if a.is_exact_zero() {
                continue;
            }
            if x.tag() == Tag::S && !a.is_zero() && a.valuation() < 0 {
                return Err(TowerError::NotInS { digit: j, degree: b, valuation: a.valuation() });
            }
            terms.push((b, a));
        }
        let integral = terms.iter().all(|t: &(usize, PadicCoeff)| t.1.is_zero() || t.1.valuation() >= 0);
        let tag = if integral { Tag::FrakS } else { Tag::FractionS };
        coeffs.push(TowerElement::from_terms(ctx, level, tag, terms, UPrec::Poly));
    }
    if x.uprec() == UPrec::Poly {
        while coeffs.last().is_some_and(|a| a.is_exact_zero()) {
            coeffs.pop();
        }
    }
    Ok(PDForm { level, coeffs, uprec: x.uprec(), tail_scale })
}

/// Rebuilds the series `Σ (a_j / j!) E^j`.
pub fn from_pd_form(ctx: &Arc<PrecisionContext>, form: &PDForm) -> Result<TowerElement, TowerError> {
    let level = form.level;
    let e_elt = crate::special::eisenstein(ctx, level);
    let mut acc = TowerElement::zero(ctx, level);
    let mut tag = Tag::FrakS;
    for (j, a) in form.coeffs.iter().enumerate().rev() {
        if a.tag() == Tag::FractionS {
            tag = Tag::FractionS;
        }
        let inv = ctx.factorial(j).inv(ctx).expect("factorial is nonzero");
        let d = a.scale(inv)?;
        if tag == Tag::FrakS && d.min_valuation().is_some_and(|v| v < 0) {
            tag = Tag::S;
        }
        acc = acc.mul(&e_elt)?.add(&d)?;
    }
    let acc = acc.with_tag_unchecked(tag);
    match form.uprec {
        UPrec::Poly => Ok(acc),
        UPrec::Upto(g) => {
            let dd = ctx.pd_degree(level);
            let listed = form.coeffs.len() as i32;
            let floor = form.tail_scale;
            let acc = acc.truncate_u(g).cap_precision(|b| floor + listed - (b / dd) as i32);
            Ok(acc)
        }
    }
}

/// Position of an element in the divided-power filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilDegree {
    /// `a_j` is certainly nonzero, all earlier coefficients vanish in the window.
    Exactly(usize),
    /// Every known coefficient vanishes; later ones are out of reach.
    AtLeast(usize),
    /// The element is zero in the window.
    Infinite,
}

impl FilDegree {
    /// Lower bound on the filtration degree.
    pub fn lower_bound(&self) -> usize {
        match *self {
            FilDegree::Exactly(j) | FilDegree::AtLeast(j) => j,
            FilDegree::Infinite => usize::MAX,
        }
    }
}

/// A filtration degree with the window in which the vanishing of the lower
/// coefficients is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilCheck {
    pub degree: FilDegree,
    pub window: Window,
}

pub fn fil_degree(x: &TowerElement) -> Result<FilCheck, TowerError> {
    let ctx = x.ctx();
    let form = pd_canonical_form(x)?;
    let scale = x.lattice_scale();
    let mut digits = EXACT;
    let window = |digits| Window { digits, udeg: x.known_to() };
    for (j, a) in form.coeffs.iter().enumerate() {
        if a.terms().iter().any(|t| !t.1.is_zero()) {
            return Ok(FilCheck { degree: FilDegree::Exactly(j), window: window(digits) });
        }
        let fact = ctx.legendre(j as u64) as i32;
        for t in a.terms() {
            digits = digits.min(t.1.abs_prec().saturating_sub(fact).saturating_sub(scale));
        }
    }
    let degree = match form.uprec {
        UPrec::Poly => FilDegree::Infinite,
        UPrec::Upto(_) => FilDegree::AtLeast(form.coeffs.len()),
    };
    Ok(FilCheck { degree, window: window(digits) })
}

/// Whether `x ∈ Fil^m`; `None` when the window does not decide it.
pub fn fil_at_least(x: &TowerElement, m: usize) -> Result<Option<bool>, TowerError> {
    Ok(match fil_degree(x)?.degree {
        FilDegree::Exactly(j) => Some(j >= m),
        FilDegree::AtLeast(j) => (j >= m).then_some(true),
        FilDegree::Infinite => Some(true),
    })
}
