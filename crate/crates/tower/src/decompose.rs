use std::sync::Arc;

use bkpd_precision::PrecisionContext;

use crate::element::{Tag, TowerElement, UPrec};
use crate::error::TowerError;
use crate::pd::{fil_degree, from_pd_form, pd_canonical_form, PDForm};
use crate::special::{eisenstein, v_element};
use crate::weierstrass::{weierstrass_divide, Division};

/// `x = w + y` with `w ∈ 𝔖_n` and `y ∈ Fil^p S_n`: `w` is the part
/// `Σ_{j<p} a_j γ_j(E)` of the divided-power expansion.
pub fn decompose_frak_s_fil(x: &TowerElement) -> Result<(TowerElement, TowerElement), TowerError> {
    if x.tag() == Tag::FractionS {
        return Err(TowerError::TagMismatch { expected: Tag::S, found: x.tag() });
    }
    let ctx = x.ctx();
    let form = pd_canonical_form(x)?;
    let p = ctx.p() as usize;
    let low = PDForm::exact(x.level(), form.coeffs.iter().take(p).cloned().collect());
    let w = from_pd_form(ctx, &low)?.into_frak_s()?;
    let y = x.sub(&w)?.with_tag_unchecked(Tag::S);
    Ok((w, y))
}

/// The two halves of `φ(x)` for `x ∈ Fil^i S_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyASplit {
    /// In `𝔖_{n-1}`.
    pub w: TowerElement,
    /// In `Fil^{p b(i)} S_{n-1}`.
    pub y: TowerElement,
}

/// `Σ_{k(p-1) >= j} p^k / ((j-k)! k!) E^{p(j-k)} v^k` at level 0: the
/// integral part of `φ(γ_j(E)) = (E^p + p v)^j / j!`.
struct GammaSplit {
    e_p_pows: Vec<TowerElement>,
    v_pows: Vec<TowerElement>,
}

impl GammaSplit {
    fn new(ctx: &Arc<PrecisionContext>, jmax: usize) -> Result<Self, TowerError> {
        let e_p = eisenstein(ctx, 0).pow(ctx.p() as usize)?;
        let v = v_element(ctx, 0)?;
        let mut e_p_pows = vec![TowerElement::one(ctx, 0)];
        let mut v_pows = vec![TowerElement::one(ctx, 0)];
        for _ in 0..jmax {
            e_p_pows.push(e_p_pows.last().unwrap().mul(&e_p)?);
            v_pows.push(v_pows.last().unwrap().mul(&v)?);
        }
        Ok(GammaSplit { e_p_pows, v_pows })
    }

    fn integral_part(&self, ctx: &Arc<PrecisionContext>, j: usize) -> Result<TowerElement, TowerError> {
        let p = ctx.p() as usize;
        let mut acc = TowerElement::zero(ctx, 0);
        for k in j.div_ceil(p - 1)..=j {
            let inv = ctx
                .factorial(j - k)
                .mul(ctx.factorial(k), ctx)
                .inv(ctx)
                .expect("factorial is nonzero")
                .shift(k as i32);
            let term = self.e_p_pows[j - k].mul(&self.v_pows[k])?.scale(inv)?;
            acc = acc.add(&term)?;
        }
        acc.into_frak_s()
    }
}

/// Splits `φ(x)` for `x ∈ Fil^i S_n` as `w + y` with `w ∈ 𝔖_{n-1}` and
/// `y ∈ Fil^{p b(i)} S_{n-1}`.
///
/// An integral `x` is taken as the single term `(i! x/E^i) γ_i(E)`, so that
/// `x ∈ 𝔖_n` with `i = 0` goes entirely to `w`. Otherwise the coefficients
/// `a_j` with `i <= j < p` are folded into the slot `i` (`i!/j!` is a unit
/// there). Every remaining `a_j γ_j(E)` contributes
/// `φ(a_j) p^k/((j-k)! k!) E^{p(j-k)} v^k` to `w` when `k(p-1) >= j`.
pub fn decompose_key_a(x: &TowerElement, i: usize) -> Result<KeyASplit, TowerError> {
    if x.level() == 0 {
        return Err(TowerError::BottomLevel);
    }
    if x.tag() == Tag::FractionS {
        return Err(TowerError::TagMismatch { expected: Tag::S, found: x.tag() });
    }
    let ctx = x.ctx();
    let level = x.level();
    let p = ctx.p() as usize;
    let form = pd_canonical_form(x)?;
    let lowest_nonzero = form
        .coeffs
        .iter()
        .position(|a| a.terms().iter().any(|t| !t.1.is_zero()));
    if lowest_nonzero.is_some_and(|j| j < i) {
        return Err(TowerError::NotInFil { required: i, found: fil_degree(x)?.degree });
    }

    let integral = x.check_integral().is_ok();
    let mut slots: Vec<(usize, TowerElement)> = Vec::new();
    if integral {
        // x ∈ Fil^i ∩ 𝔖_n = E^i 𝔖_n is the single term (i! x / E^i) γ_i(E).
        let frak = x.clone().into_frak_s()?;
        let q = match weierstrass_divide(&frak, i)? {
            Division::Quotient { q, .. } => q,
            Division::Reject { .. } => {
                return Err(TowerError::NotInFil { required: i, found: fil_degree(x)?.degree })
            }
        };
        slots.push((i, q.scale(ctx.factorial(i))?));
    } else if i < p {
        let e = eisenstein(ctx, level);
        let fi = ctx.factorial(i);
        let mut merged = TowerElement::zero(ctx, level);
        let mut e_pow = TowerElement::one(ctx, level);
        for j in i..p.min(form.len()) {
            let unit = fi.mul(ctx.factorial(j).inv(ctx).expect("factorial is nonzero"), ctx);
            merged = merged.add(&form.coeffs[j].mul(&e_pow)?.scale(unit)?)?;
            e_pow = e_pow.mul(&e)?;
        }
        slots.push((i, merged));
    }
    if !integral {
        for j in i.max(p)..form.len() {
            slots.push((j, form.coeffs[j].clone()));
        }
    }

    let jtop = slots.last().map_or(0, |s| s.0);
    let split = GammaSplit::new(ctx, jtop)?;
    let mut w = TowerElement::zero(ctx, level - 1);
    for (j, a) in &slots {
        if a.is_exact_zero() {
            continue;
        }
        let fa = a.frobenius()?;
        let gamma = split.integral_part(ctx, *j)?.include_to(level - 1)?;
        w = w.add(&fa.mul(&gamma)?)?;
    }
    if let UPrec::Upto(_) = form.uprec {
        // Unlisted coefficients a_j, j >= len, only reach w through terms
        // with k >= j/(p-1).
        let floor = form.tail_scale + (form.len() / (p - 1)) as i32;
        w = w.cap_precision(|_| floor);
    }
    let w = w.into_frak_s()?;
    let y = x.frobenius()?.sub(&w)?.with_tag_unchecked(Tag::S);
    Ok(KeyASplit { w, y })
}
