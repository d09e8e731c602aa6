use bkpd_breuil::{into_s, BreuilModule, SVector};
use bkpd_precision::{contraction_sequence, keyc_divisibility, SequenceKind};
use bkpd_tower::special::z_element;
use bkpd_tower::{
    decompose_frak_s_fil, decompose_key_a, fil_at_least, fil_degree, from_pd_form, pd_canonical_form,
    weierstrass_divide, Agreement, Division, FilDegree, PDForm, Tag, TowerElement, TowerError, UPrec,
    Window,
};
use serde::{Deserialize, Serialize};

use crate::chain::{check_compat, Chain};
use crate::LimitError;

/// One contraction step: the `Fil`-part at `level` was required to lie in
/// `Fil^required` and was found in `Fil^realized`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentStep {
    pub level: usize,
    pub required: usize,
    pub realized: FilDegree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    /// In `𝔖_1^d`, with `ξ_0 = (e) φ(w)`.
    pub w: SVector,
    /// `φ(w)` at level 0.
    pub g: SVector,
    /// Filtration degree of the part of `s_1` not yet shown to be in `𝔖_1`.
    pub residual: FilDegree,
    /// `j_depth`.
    pub bound: usize,
    pub steps: Vec<DescentStep>,
    /// `s_1 ≡ 0 mod p` is certified on u_1-degrees below this.
    pub keyc_degree: usize,
    pub window: Window,
}

fn contradiction(level: usize, detail: impl Into<String>) -> LimitError {
    LimitError::DescentContradiction { level, detail: detail.into() }
}

fn min_fil(xs: &[TowerElement]) -> Result<FilDegree, TowerError> {
    let mut best = FilDegree::Infinite;
    for x in xs {
        let f = fil_degree(x)?.degree;
        if f.lower_bound() < best.lower_bound() {
            best = f;
        }
    }
    Ok(best)
}

/// `x / E^r` read off the divided-power form of `x ∈ Fil^r S_n`.
fn pd_divide(x: &TowerElement, r: usize, level: usize) -> Result<TowerElement, LimitError> {
    let ctx = x.ctx();
    let form = pd_canonical_form(x)?;
    for (j, a) in form.coeffs.iter().enumerate().take(r) {
        if a.terms().iter().any(|t| !t.1.is_zero()) {
            return Err(contradiction(level, format!("B w has a nonzero divided-power digit {j} < r")));
        }
    }
    let mut coeffs = Vec::new();
    let mut loss = 0;
    for (j, a) in form.coeffs.iter().enumerate().skip(r) {
        let k = j - r;
        let unit = ctx.factorial(k).mul(ctx.factorial(j).inv(ctx).expect("factorial is nonzero"), ctx);
        loss = loss.max(-unit.valuation());
        coeffs.push(a.scale(unit)?);
    }
    let shifted = PDForm {
        level: form.level,
        coeffs,
        uprec: form.uprec,
        tail_scale: form.tail_scale - if form.uprec == UPrec::Poly { 0 } else { loss + r as i32 },
    };
    Ok(from_pd_form(ctx, &shifted)?)
}

/// `s_n = p B w_n / E^r`, the `α`-coordinates scaled by `p`.
fn scaled_alpha_coords(module: &BreuilModule, w: &SVector) -> Result<SVector, LimitError> {
    let level = w.level;
    let r = module.r();
    let bw = module.b_at(level)?.mul_vec(&w.coords)?;
    let mut out = Vec::with_capacity(bw.len());
    for x in &bw {
        let q = if x.tag() == Tag::FrakS {
            match weierstrass_divide(x, r)? {
                Division::Quotient { q, .. } => q,
                Division::Reject { digit, .. } => {
                    return Err(contradiction(level, format!("B w is not divisible by E^{r} (digit {digit})")))
                }
            }
        } else {
            pd_divide(x, r, level)?
        };
        let s = into_s(q.shift_p(1)?)
            .map_err(|e| contradiction(level, format!("p B w / E^{r} is not in S: {e}")))?;
        out.push(s);
    }
    Ok(SVector { level, coords: out })
}

/// [`descend_with`] without a required residual.
pub fn descend(chain: &Chain) -> Result<Descent, LimitError> {
    descend_with(chain, None)
}

/// Runs the contraction from the top of the chain down to level 1, then
/// the divisibility by `p`. With `required = Some(j)` the descent is
/// inconclusive unless the residual reaches `Fil^j`.
pub fn descend_with(chain: &Chain, required: Option<usize>) -> Result<Descent, LimitError> {
    let compat = check_compat(chain)?;
    let module = chain.module();
    let ctx = module.ctx();
    let (p, r) = (ctx.p(), module.r());
    let depth = chain.depth();
    if depth == 0 {
        return Err(LimitError::DescentInconclusive("a chain of depth 0 has no level 1".into()));
    }
    let seq: Vec<usize> = contraction_sequence(p, SequenceKind::KeyB, r as u64, depth)
        .map_err(TowerError::from)?
        .into_iter()
        .map(|j| j as usize)
        .collect();
    let bound = seq[depth - 1];
    if let Some(req) = required {
        if req > bound {
            return Err(LimitError::DescentInconclusive(format!(
                "depth {depth} certifies Fil^{bound}, below the requested Fil^{req}"
            )));
        }
    }

    let s: Vec<SVector> = (0..=depth)
        .map(|n| if n == 0 { Ok(chain.w(0).clone()) } else { scaled_alpha_coords(module, chain.w(n)) })
        .collect::<Result<_, _>>()?;

    let mut y = Vec::new();
    let mut y_fil = Vec::new();
    for c in &s[depth].coords {
        let (lo, hi) = decompose_frak_s_fil(c)?;
        y.push(lo);
        y_fil.push(hi);
    }
    let mut steps = vec![DescentStep { level: depth, required: seq[0], realized: min_fil(&y_fil)? }];

    for n in (2..=depth).rev() {
        let j = seq[depth - n];
        let b = module.b_at(n - 1)?;
        let mut z = Vec::with_capacity(y.len());
        for (lo, hi) in y.iter().zip(&y_fil) {
            let split = decompose_key_a(hi, j).map_err(|e| contradiction(n, e.to_string()))?;
            z.push(lo.frobenius()?.add(&split.w)?);
        }
        let bz = b.mul_vec(&z)?;
        let next = seq[depth - n + 1];
        let mut new_y = Vec::with_capacity(bz.len());
        let mut new_fil = Vec::with_capacity(bz.len());
        for (k, t) in bz.iter().enumerate() {
            let q = match weierstrass_divide(t, r)? {
                Division::Quotient { q, .. } => q,
                Division::Reject { digit, .. } => {
                    return Err(contradiction(n - 1, format!("B z is not divisible by E^{r} (digit {digit})")))
                }
            };
            let rest = s[n - 1].coords[k].sub(&q)?.with_tag_unchecked(Tag::S);
            if fil_at_least(&rest, next)? == Some(false) {
                return Err(contradiction(
                    n - 1,
                    format!("residual {:?} below Fil^{next}", fil_degree(&rest)?.degree),
                ));
            }
            new_y.push(q);
            new_fil.push(rest);
        }
        steps.push(DescentStep { level: n - 1, required: next, realized: min_fil(&new_fil)? });
        y = new_y;
        y_fil = new_fil;
    }
    let residual = steps.last().expect("at least one step").realized;
    if let Some(req) = required {
        if residual.lower_bound() < req {
            return Err(LimitError::DescentInconclusive(format!(
                "residual {residual:?} does not reach Fil^{req}"
            )));
        }
    }

    // s_1 ∈ 𝔖_1 and z_D^r φ^{1-D}(s_1) ≡ 0 mod p below u_D^{e p^{D+1}}.
    let mut s1 = Vec::with_capacity(s[1].len());
    for c in &s[1].coords {
        match c.clone().into_frak_s() {
            Ok(x) => s1.push(x),
            Err(_) => {
                return Err(LimitError::DescentInconclusive(format!(
                    "s_1 is integral only modulo Fil^{}",
                    residual.lower_bound()
                )))
            }
        }
    }
    let e = ctx.e();
    let zr = z_element(ctx, depth)?.pow(r)?;
    let limit = (e * (p as usize).pow(depth as u32 + 1)).min(ctx.cutoff(depth));
    let mut certified = limit;
    for c in &s1 {
        let mut up = c.clone();
        for _ in 1..depth {
            up = up.frobenius_inverse_frak_s()?;
        }
        let t = zr.mul(&up)?;
        let known = limit.min(t.known_to());
        certified = certified.min(known);
        for &(deg, coeff) in t.terms() {
            if deg >= known {
                break;
            }
            match coeff.residue_mod_p(ctx) {
                Some(0) => {}
                Some(_) => {
                    return Err(contradiction(depth, format!("z^r φ^(1-n)(s_1) is nonzero mod p at u^{deg}")))
                }
                None => certified = certified.min(deg),
            }
        }
    }
    let i_d = keyc_divisibility(p, r as u64, depth as u32).max(0) as usize;
    let lost = limit - certified;
    let keyc_degree = (e * i_d).saturating_sub(lost);

    let mut w = Vec::with_capacity(s1.len());
    for c in &s1 {
        let q = c.shift_p(-1)?;
        match q.check_integral() {
            Ok(()) => w.push(q.with_tag_unchecked(Tag::FrakS)),
            Err(TowerError::NotIntegral { degree, .. }) if degree < keyc_degree => {
                return Err(contradiction(1, format!("s_1 is not divisible by p at u^{degree}")))
            }
            Err(e) => return Err(LimitError::DescentInconclusive(format!("s_1 / p: {e}"))),
        }
    }
    let w = SVector { level: 1, coords: w };
    let g = w.map(|x| x.frobenius())?;
    let window = match g.compare(chain.w(0)) {
        Agreement::Agree(win) => win.meet(compat.window()),
        residual => return Err(contradiction(0, format!("φ(w) differs from w_0: {residual:?}"))),
    };
    Ok(Descent { w, g, residual, bound, steps, keyc_degree, window })
}
