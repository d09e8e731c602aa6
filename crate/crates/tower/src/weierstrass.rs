use bkpd_precision::{PadicCoeff, PrecisionContext};

use crate::element::{Tag, TowerElement, UPrec};
use crate::error::TowerError;
use crate::window::Window;

/// A monic polynomial `u^deg + Σ low`, used as a divisor.
#[derive(Debug, Clone)]
pub(crate) struct MonicDivisor {
    pub deg: usize,
    pub low: Vec<(usize, PadicCoeff)>,
    /// All lower coefficients are divisible by `p`.
    pub distinguished: bool,
}

impl MonicDivisor {
    pub fn from_element(f: &TowerElement) -> Result<Self, TowerError> {
        if f.uprec() != UPrec::Poly {
            return Err(TowerError::NotMonic);
        }
        let Some((deg, lead)) = f.terms().last().copied() else {
            return Err(TowerError::NotMonic);
        };
        if lead.parts().map(|(v, u, _)| (v, u)) != Some((0, 1)) {
            return Err(TowerError::NotMonic);
        }
        let low: Vec<_> = f.terms()[..f.terms().len() - 1].to_vec();
        let distinguished = low.iter().all(|t| t.1.valuation() >= 1);
        Ok(MonicDivisor { deg, low, distinguished })
    }

    /// `E` written in `u_n`.
    pub fn eisenstein(ctx: &PrecisionContext, level: usize) -> Self {
        let step = (ctx.p() as usize).pow(level as u32);
        let e = ctx.e();
        let low = ctx.eisenstein()[..e]
            .iter()
            .enumerate()
            .filter(|t| *t.1 != 0)
            .map(|(k, &c)| (k * step, PadicCoeff::from_int(c, ctx)))
            .collect();
        MonicDivisor { deg: e * step, low, distinguished: true }
    }

    /// Divides the dense polynomial `vals` in place. Returns the quotient and
    /// leaves the remainder in `vals`, truncated to length `deg`.
    pub fn divide(&self, vals: &mut Vec<PadicCoeff>, ctx: &PrecisionContext) -> Vec<PadicCoeff> {
        let len = vals.len();
        if len <= self.deg {
            return Vec::new();
        }
        let mut quot = vec![PadicCoeff::ZERO; len - self.deg];
        for t in (self.deg..len).rev() {
            let c = vals[t];
            if c.is_exact_zero() {
                continue;
            }
            let base = t - self.deg;
            quot[base] = c;
            for &(k, ek) in &self.low {
                let i = base + k;
                vals[i] = vals[i].sub(c.mul(ek, ctx), ctx);
            }
        }
        vals.truncate(self.deg);
        quot
    }
}

pub(crate) fn dense(x: &TowerElement, len: usize) -> Vec<PadicCoeff> {
    let mut vals = vec![PadicCoeff::ZERO; len];
    for &(d, c) in x.terms() {
        if d < len {
            vals[d] = c;
        }
    }
    vals
}

pub(crate) fn dense_len(x: &TowerElement) -> usize {
    match x.uprec() {
        UPrec::Poly => x.max_degree().map_or(0, |d| d + 1),
        UPrec::Upto(g) => g,
    }
}

fn sparse(vals: Vec<PadicCoeff>) -> Vec<(usize, PadicCoeff)> {
    vals.into_iter().enumerate().filter(|t| !t.1.is_exact_zero()).collect()
}

/// Outcome of testing divisibility by `E^m`.
#[derive(Debug, Clone, PartialEq)]
pub enum Division {
    /// `x = E^m q` inside `window`.
    Quotient { q: TowerElement, window: Window },
    /// The remainder after dividing `digit` times by `E` is certainly nonzero.
    Reject { digit: usize, remainder: TowerElement },
}

impl Division {
    pub fn quotient(self) -> Option<TowerElement> {
        match self {
            Division::Quotient { q, .. } => Some(q),
            Division::Reject { .. } => None,
        }
    }
}

/// Decides whether `E^m` divides `x` in `𝔖_n` and returns the quotient.
pub fn weierstrass_divide(x: &TowerElement, m: usize) -> Result<Division, TowerError> {
    if x.tag() != Tag::FrakS {
        return Err(TowerError::TagMismatch { expected: Tag::FrakS, found: x.tag() });
    }
    let ctx = x.ctx();
    let level = x.level();
    let div = MonicDivisor::eisenstein(ctx, level);
    let d = div.deg;
    // `x` is known modulo `u^g`, and `u^{qd} ≡ 0` modulo `(E, p)^q`.
    let qg = match x.uprec() {
        UPrec::Poly => None,
        UPrec::Upto(g) => Some((g / d) as i32),
    };
    let mut vals = dense(x, dense_len(x));
    let mut digits = bkpd_precision::EXACT;
    for k in 0..m {
        let quot = div.divide(&mut vals, ctx);
        let mut rem = std::mem::replace(&mut vals, quot);
        if let Some(q) = qg {
            let cap = q - k as i32;
            if cap <= 0 {
                return Err(TowerError::PrecisionExhausted(format!(
                    "E-adic digit {k} unknown from degree {}",
                    x.known_to()
                )));
            }
            for c in rem.iter_mut() {
                *c = c.cap_abs(cap, ctx);
            }
        }
        if rem.iter().any(|c| !c.is_zero()) {
            let remainder = TowerElement::from_terms(ctx, level, Tag::FrakS, sparse(rem), UPrec::Poly);
            return Ok(Division::Reject { digit: k, remainder });
        }
        digits = digits.min(rem.iter().map(|c| c.abs_prec()).min().unwrap_or(bkpd_precision::EXACT));
    }
    let q = match qg {
        None => TowerElement::from_terms(ctx, level, Tag::FrakS, sparse(vals), UPrec::Poly),
        Some(q) => {
            let left = q - m as i32;
            if left <= 0 {
                return Err(TowerError::PrecisionExhausted(format!(
                    "quotient by E^{m} has no known coefficients"
                )));
            }
            let capped = vals
                .into_iter()
                .enumerate()
                .map(|(b, c)| (b, c.cap_abs(left - (b / d) as i32, ctx)))
                .collect();
            TowerElement::from_terms(ctx, level, Tag::FrakS, capped, UPrec::Upto(left as usize * d))
        }
    };
    let window = Window { digits, udeg: q.known_to() };
    Ok(Division::Quotient { q, window })
}

/// Division with remainder by a monic polynomial `f`: `x = q f + r` with
/// `deg r < deg f`. Truncated inputs require `f` to be distinguished.
pub fn divide_by_monic(
    x: &TowerElement,
    f: &TowerElement,
) -> Result<(TowerElement, TowerElement), TowerError> {
    if x.level() != f.level() {
        return Err(TowerError::LevelMismatch(x.level(), f.level()));
    }
    let ctx = x.ctx();
    let div = MonicDivisor::from_element(f)?;
    let mut vals = dense(x, dense_len(x));
    let quot = div.divide(&mut vals, ctx);
    let tag = x.tag().max(f.tag());
    match x.uprec() {
        UPrec::Poly => Ok((
            TowerElement::from_terms(ctx, x.level(), tag, sparse(quot), UPrec::Poly),
            TowerElement::from_terms(ctx, x.level(), tag, sparse(vals), UPrec::Poly),
        )),
        UPrec::Upto(g) => {
            let q = (g / div.deg) as i32;
            if !div.distinguished || q < 2 {
                return Err(TowerError::PrecisionExhausted(
                    "division of a truncated series by a non-distinguished divisor".into(),
                ));
            }
            let vtail = x.lattice_scale();
            let rem = vals.into_iter().map(|c| c.cap_abs(vtail + q, ctx)).enumerate().collect();
            let quot = quot
                .into_iter()
                .enumerate()
                .map(|(b, c)| (b, c.cap_abs(vtail + q - 1 - (b / div.deg) as i32, ctx)))
                .collect();
            Ok((
                TowerElement::from_terms(ctx, x.level(), tag, quot, UPrec::Upto((q as usize - 1) * div.deg)),
                TowerElement::from_terms(ctx, x.level(), tag, rem, UPrec::Poly),
            ))
        }
    }
}

/// Inverse of a series with unit constant term.
pub fn inverse_unit(x: &TowerElement) -> Result<TowerElement, TowerError> {
    let ctx = x.ctx();
    let c0 = x.coeff(0);
    if c0.is_zero() || c0.valuation() != 0 {
        return Err(TowerError::NotUnit);
    }
    let inv0 = c0.inv(ctx).ok_or(TowerError::NotUnit)?;
    if x.terms().len() == 1 && x.uprec() == UPrec::Poly {
        return Ok(TowerElement::from_terms(ctx, x.level(), x.tag(), vec![(0, inv0)], UPrec::Poly));
    }
    let len = x.known_to();
    let rest: Vec<_> = x.terms().iter().filter(|t| t.0 > 0).copied().collect();
    let mut y = vec![PadicCoeff::ZERO; len];
    y[0] = inv0;
    for k in 1..len {
        let mut s = PadicCoeff::ZERO;
        for &(i, xi) in &rest {
            if i > k {
                break;
            }
            let yk = y[k - i];
            if !yk.is_exact_zero() {
                s = s.add(xi.mul(yk, ctx), ctx);
            }
        }
        y[k] = s.mul(inv0, ctx).neg(ctx);
    }
    let out = TowerElement::from_terms(ctx, x.level(), x.tag(), sparse(y), UPrec::Upto(len));
    out.check_budget()?;
    Ok(out)
}
