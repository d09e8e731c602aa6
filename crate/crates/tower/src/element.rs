use std::sync::Arc;

use bkpd_precision::{PadicCoeff, PrecisionContext, EXACT};
use serde::{Deserialize, Serialize};

use crate::error::TowerError;
use crate::window::{Agreement, Window};

/// Claimed membership: `𝔖_n`, `S_n` or `S_n[1/p]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "frakS")]
    FrakS,
    #[serde(rename = "S")]
    S,
    #[serde(rename = "fractionS")]
    FractionS,
}

/// u-adic knowledge of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UPrec {
    /// A polynomial: every term is stored, the level cutoff is never hit.
    Poly,
    /// Coefficients of degree `>= g` are unknown.
    Upto(usize),
}

/// An element of the level-`n` ring, stored as a sparse truncated series in
/// `u_n` with capped-relative p-adic coefficients.
///
/// Terms are sorted by degree and never hold an exact zero; a stored zero
/// records a coefficient known only to some absolute precision.
#[derive(Clone, Debug)]
pub struct TowerElement {
    ctx: Arc<PrecisionContext>,
    level: usize,
    tag: Tag,
    terms: Vec<(usize, PadicCoeff)>,
    uprec: UPrec,
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx)
            && self.level == other.level
            && self.tag == other.tag
            && self.uprec == other.uprec
            && self.terms == other.terms
    }
}

impl TowerElement {
    /// Normalises `terms` (sort, merge, drop exact zeros, truncate).
    pub fn from_terms(
        ctx: &Arc<PrecisionContext>,
        level: usize,
        tag: Tag,
        mut terms: Vec<(usize, PadicCoeff)>,
        uprec: UPrec,
    ) -> Self {
        terms.sort_by_key(|t| t.0);
        let cut = ctx.cutoff(level);
        let mut uprec = match uprec {
            UPrec::Upto(g) => UPrec::Upto(g.min(cut)),
            UPrec::Poly => UPrec::Poly,
        };
        let bound = match uprec {
            UPrec::Upto(g) => g,
            UPrec::Poly => cut,
        };
        let mut out: Vec<(usize, PadicCoeff)> = Vec::with_capacity(terms.len());
        for (d, c) in terms {
            if d >= bound {
                if !c.is_exact_zero() && uprec == UPrec::Poly {
                    uprec = UPrec::Upto(cut);
                }
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == d => last.1 = last.1.add(c, ctx),
                _ => out.push((d, c)),
            }
        }
        out.retain(|t| !t.1.is_exact_zero());
        TowerElement { ctx: ctx.clone(), level, tag, terms: out, uprec }
    }

    pub fn zero(ctx: &Arc<PrecisionContext>, level: usize) -> Self {
        TowerElement { ctx: ctx.clone(), level, tag: Tag::FrakS, terms: Vec::new(), uprec: UPrec::Poly }
    }

    pub fn one(ctx: &Arc<PrecisionContext>, level: usize) -> Self {
        Self::constant(ctx, level, PadicCoeff::one(ctx))
    }

    /// A constant; tagged `frakS` when integral.
    pub fn constant(ctx: &Arc<PrecisionContext>, level: usize, c: PadicCoeff) -> Self {
        Self::monomial(ctx, level, 0, c)
    }

    pub fn monomial(ctx: &Arc<PrecisionContext>, level: usize, degree: usize, c: PadicCoeff) -> Self {
        let tag = if c.valuation() >= 0 { Tag::FrakS } else { Tag::FractionS };
        Self::from_terms(ctx, level, tag, vec![(degree, c)], UPrec::Poly)
    }

    /// Integer polynomial with the given coefficients, lowest degree first.
    pub fn from_ints(ctx: &Arc<PrecisionContext>, level: usize, coeffs: &[i64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(d, &c)| (d, PadicCoeff::from_int(c, ctx)))
            .collect();
        Self::from_terms(ctx, level, Tag::FrakS, terms, UPrec::Poly)
    }

    pub fn ctx(&self) -> &Arc<PrecisionContext> {
        &self.ctx
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn terms(&self) -> &[(usize, PadicCoeff)] {
        &self.terms
    }

    pub fn uprec(&self) -> UPrec {
        self.uprec
    }

    /// Level cutoff `M p^n`.
    pub fn cutoff(&self) -> usize {
        self.ctx.cutoff(self.level)
    }

    /// Every coefficient of degree below this is known.
    pub fn known_to(&self) -> usize {
        match self.uprec {
            UPrec::Poly => self.cutoff(),
            UPrec::Upto(g) => g,
        }
    }

    /// First degree at which the true series may differ from the stored one.
    pub(crate) fn unknown_from(&self) -> usize {
        match self.uprec {
            UPrec::Poly => usize::MAX,
            UPrec::Upto(g) => g,
        }
    }

    /// Lowest degree that may carry a nonzero coefficient.
    fn effective_min_degree(&self) -> usize {
        self.min_degree().unwrap_or(usize::MAX).min(self.unknown_from())
    }

    pub fn coeff(&self, degree: usize) -> PadicCoeff {
        match self.terms.binary_search_by_key(&degree, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => PadicCoeff::ZERO,
        }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.last().map(|t| t.0)
    }

    /// The true element is zero: no terms and no unknown tail.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.uprec == UPrec::Poly
    }

    /// Smallest valuation among certainly-nonzero coefficients.
    pub fn min_valuation(&self) -> Option<i32> {
        self.terms.iter().filter(|t| !t.1.is_zero()).map(|t| t.1.valuation()).min()
    }

    /// `min(0, v)` over nonzero coefficients: the lattice scale of the element.
    pub fn lattice_scale(&self) -> i32 {
        self.min_valuation().unwrap_or(0).min(0)
    }

    pub fn with_tag_unchecked(mut self, tag: Tag) -> Self {
        self.tag = tag;
        self
    }

    pub fn check_integral(&self) -> Result<(), TowerError> {
        match self.terms.iter().find(|t| !t.1.is_zero() && t.1.valuation() < 0) {
            Some(&(degree, c)) => Err(TowerError::NotIntegral { degree, valuation: c.valuation() }),
            None => Ok(()),
        }
    }

    /// Retags as `𝔖_n` after checking integrality of every coefficient.
    pub fn into_frak_s(self) -> Result<Self, TowerError> {
        self.check_integral()?;
        Ok(self.with_tag_unchecked(Tag::FrakS))
    }

    /// Forgets coefficients of degree `>= g`.
    pub fn truncate_u(&self, g: usize) -> Self {
        if g >= self.known_to() {
            return self.clone();
        }
        Self::from_terms(&self.ctx, self.level, self.tag, self.terms.clone(), UPrec::Upto(g))
    }

    fn check_level(&self, other: &Self) -> Result<(), TowerError> {
        if self.level != other.level {
            return Err(TowerError::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    pub(crate) fn check_budget(&self) -> Result<(), TowerError> {
        let budget = self.ctx.denominator_budget();
        for &(degree, c) in &self.terms {
            if !c.is_zero() && c.valuation() < -budget {
                return Err(TowerError::DenominatorOverflow { degree, valuation: c.valuation(), budget });
            }
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let ctx = &self.ctx;
        TowerElement {
            ctx: ctx.clone(),
            level: self.level,
            tag: self.tag,
            terms: self.terms.iter().map(|&(d, c)| (d, c.neg(ctx))).collect(),
            uprec: self.uprec,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TowerError> {
        self.check_level(other)?;
        let uprec = match (self.uprec, other.uprec) {
            (UPrec::Poly, UPrec::Poly) => UPrec::Poly,
            _ => UPrec::Upto(self.known_to().min(other.known_to())),
        };
        let ctx = &self.ctx;
        let (a, b) = (&self.terms, &other.terms);
        let mut terms = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                terms.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                terms.push(b[j]);
                j += 1;
            } else {
                terms.push((a[i].0, a[i].1.add(b[j].1, ctx)));
                i += 1;
                j += 1;
            }
        }
        let out = Self::from_terms(ctx, self.level, self.tag.max(other.tag), terms, uprec);
        if out.tag != Tag::FrakS {
            out.check_budget()?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TowerError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TowerError> {
        self.check_level(other)?;
        let ctx = &self.ctx;
        let tag = self.tag.max(other.tag);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(ctx, self.level).with_tag_unchecked(tag));
        }
        let cut = self.cutoff();
        let (ga, gb) = (self.unknown_from(), other.unknown_from());
        let mut g = cut;
        if ga != usize::MAX {
            g = g.min(ga.saturating_add(other.effective_min_degree()));
        }
        if gb != usize::MAX {
            g = g.min(gb.saturating_add(self.effective_min_degree()));
        }
        let (Some(ma), Some(mb)) = (self.max_degree(), other.max_degree()) else {
            let uprec = if ga == usize::MAX && gb == usize::MAX { UPrec::Poly } else { UPrec::Upto(g) };
            return Ok(Self::from_terms(ctx, self.level, tag, Vec::new(), uprec));
        };
        let overflow = ma + mb >= cut;
        let uprec = if ga == usize::MAX && gb == usize::MAX && !overflow {
            UPrec::Poly
        } else {
            UPrec::Upto(g)
        };
        let len = g.min(ma + mb + 1);
        let terms = if self.terms.len().min(other.terms.len()) <= 4 {
            let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
            for &(da, ca) in &self.terms {
                for &(db, cb) in &other.terms {
                    if da + db < len {
                        terms.push((da + db, ca.mul(cb, ctx)));
                    }
                }
            }
            terms
        } else {
            let mut acc = vec![PadicCoeff::ZERO; len];
            for &(da, ca) in &self.terms {
                if da >= len {
                    break;
                }
                for &(db, cb) in &other.terms {
                    let d = da + db;
                    if d >= len {
                        break;
                    }
                    acc[d] = acc[d].add(ca.mul(cb, ctx), ctx);
                }
            }
            acc.into_iter().enumerate().filter(|t| !t.1.is_exact_zero()).collect()
        };
        let out = Self::from_terms(ctx, self.level, tag, terms, uprec);
        if out.tag != Tag::FrakS {
            out.check_budget()?;
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Result<Self, TowerError> {
        let mut acc = Self::one(&self.ctx, self.level);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: PadicCoeff) -> Result<Self, TowerError> {
        let c_elt = Self::constant(&self.ctx, self.level, c);
        self.mul(&c_elt)
    }

    /// Multiplies by `p^k`; a negative `k` leaves the subring and the result
    /// is tagged `fractionS`.
    pub fn shift_p(&self, k: i32) -> Result<Self, TowerError> {
        let tag = if k < 0 { Tag::FractionS } else { self.tag };
        let terms = self.terms.iter().map(|&(d, c)| (d, c.shift(k))).collect();
        let out = Self::from_terms(&self.ctx, self.level, tag, terms, self.uprec);
        out.check_budget()?;
        Ok(out)
    }

    /// Reduces the absolute precision of each coefficient to at most
    /// `cap(degree)`.
    pub fn cap_precision(&self, cap: impl Fn(usize) -> i32) -> Self {
        let ctx = &self.ctx;
        let terms = self.terms.iter().map(|&(d, c)| (d, c.cap_abs(cap(d), ctx))).collect();
        Self::from_terms(ctx, self.level, self.tag, terms, self.uprec)
    }

    fn relabel(&self, level: usize, factor_up: usize, factor_down: usize) -> Self {
        let ctx = &self.ctx;
        let cut = ctx.cutoff(level);
        let terms: Vec<_> = self.terms.iter().map(|&(d, c)| (d * factor_up / factor_down, c)).collect();
        let uprec = match self.uprec {
            UPrec::Poly => UPrec::Poly,
            UPrec::Upto(g) => UPrec::Upto((g * factor_up / factor_down).min(cut)),
        };
        Self::from_terms(ctx, level, self.tag, terms, uprec)
    }

    /// `S_n → S_{n+1}` via `u_n = u_{n+1}^p`.
    pub fn include_up(&self) -> Result<Self, TowerError> {
        if self.level + 1 > self.ctx.depth() {
            return Err(TowerError::DepthExceeded { level: self.level + 1, depth: self.ctx.depth() });
        }
        Ok(self.relabel(self.level + 1, self.ctx.p() as usize, 1))
    }

    pub fn include_to(&self, level: usize) -> Result<Self, TowerError> {
        if level < self.level {
            return Err(TowerError::LevelMismatch(self.level, level));
        }
        let mut x = self.clone();
        while x.level < level {
            x = x.include_up()?;
        }
        Ok(x)
    }

    /// Frobenius at level `n >= 1`: `f(u_n) ↦ f(u_{n-1})`, landing at level
    /// `n-1`. Elements claimed in `S` are re-certified there.
    pub fn frobenius(&self) -> Result<Self, TowerError> {
        if self.level == 0 {
            return Err(TowerError::BottomLevel);
        }
        let out = self.relabel(self.level - 1, 1, 1);
        if out.tag == Tag::S {
            crate::pd::pd_canonical_form(&out)?;
        }
        Ok(out)
    }

    /// Frobenius as an endomorphism of the level-`n` ring, `u_n ↦ u_n^p`.
    pub fn phi(&self) -> Self {
        self.relabel(self.level, self.ctx.p() as usize, 1)
    }

    /// The unique `h ∈ 𝔖_{n+1}` with `φ(h) = g`.
    pub fn frobenius_inverse_frak_s(&self) -> Result<Self, TowerError> {
        if self.tag != Tag::FrakS {
            return Err(TowerError::TagMismatch { expected: Tag::FrakS, found: self.tag });
        }
        self.frobenius_preimage().map(|x| x.with_tag_unchecked(Tag::FrakS))
    }

    /// The unique series preimage under Frobenius; membership in `S_{n+1}`
    /// is not claimed.
    pub fn frobenius_preimage(&self) -> Result<Self, TowerError> {
        if self.level + 1 > self.ctx.depth() {
            return Err(TowerError::DepthExceeded { level: self.level + 1, depth: self.ctx.depth() });
        }
        let tag = if self.tag == Tag::FrakS { Tag::FrakS } else { Tag::FractionS };
        Ok(self.relabel(self.level + 1, 1, 1).with_tag_unchecked(tag))
    }

    /// Compares inside the joint window. The p-adic digit count is measured
    /// relative to the common scale `min(0, v(x), v(y))`.
    pub fn compare(&self, other: &Self) -> Agreement {
        assert_eq!(self.level, other.level, "comparison across levels");
        let udeg = self.known_to().min(other.known_to());
        let scale = self.lattice_scale().min(other.lattice_scale());
        let ctx = &self.ctx;
        let mut digits = EXACT;
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        loop {
            let (degree, diff) = match (a.get(i), b.get(j)) {
                (None, None) => break,
                (Some(&(da, ca)), Some(&(db, cb))) if da == db => {
                    i += 1;
                    j += 1;
                    (da, ca.sub(cb, ctx))
                }
                (Some(&(da, ca)), Some(&(db, _))) if da < db => {
                    i += 1;
                    (da, ca)
                }
                (Some(&(da, ca)), None) => {
                    i += 1;
                    (da, ca)
                }
                (_, Some(&(db, cb))) => {
                    j += 1;
                    (db, cb.neg(ctx))
                }
            };
            if degree >= udeg {
                continue;
            }
            match diff {
                PadicCoeff::Unit { val, .. } => {
                    return Agreement::Differ {
                        degree,
                        valuation: val,
                        window: Window { digits: digits.min(val - scale), udeg },
                    }
                }
                PadicCoeff::Zero { abs } => digits = digits.min(abs.saturating_sub(scale)),
            }
        }
        Agreement::Agree(Window { digits, udeg })
    }

    /// Comparison with zero.
    pub fn is_zero_within(&self) -> Agreement {
        self.compare(&Self::zero(&self.ctx, self.level))
    }
}
