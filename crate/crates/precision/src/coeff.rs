use num_integer::Integer;

use crate::context::PrecisionContext;

/// Absolute precision of an exact value.
pub const EXACT: i32 = i32::MAX;

/// A p-adic number in capped-relative form.
///
/// A nonzero value is `p^val * unit` with `unit` a p-adic unit known modulo
/// `p^prec`, where `1 <= prec <= N`. A zero carries the absolute precision
/// `abs` it is known to (`O(p^abs)`), with [`EXACT`] for a true zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PadicCoeff {
    Zero { abs: i32 },
    Unit { val: i32, unit: u64, prec: u32 },
}

fn sat_add(a: i32, b: i32) -> i32 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.saturating_add(b)
    }
}

impl Default for PadicCoeff {
    fn default() -> Self {
        PadicCoeff::ZERO
    }
}

impl PadicCoeff {
    pub const ZERO: PadicCoeff = PadicCoeff::Zero { abs: EXACT };

    pub fn one(ctx: &PrecisionContext) -> Self {
        PadicCoeff::Unit { val: 0, unit: 1, prec: ctx.digits() }
    }

    /// `O(p^abs)`.
    pub fn zero_to(abs: i32) -> Self {
        PadicCoeff::Zero { abs }
    }

    pub fn from_int(x: i64, ctx: &PrecisionContext) -> Self {
        Self::from_i128(x as i128, ctx)
    }

    pub fn from_i128(x: i128, ctx: &PrecisionContext) -> Self {
        if x == 0 {
            return PadicCoeff::ZERO;
        }
        let p = ctx.p() as i128;
        let mut x = x;
        let mut val = 0;
        while x % p == 0 {
            x /= p;
            val += 1;
        }
        let m = ctx.pow(ctx.digits()) as i128;
        PadicCoeff::Unit { val, unit: x.rem_euclid(m) as u64, prec: ctx.digits() }
    }

    /// `p^val * residue`, reading `residue` modulo `p^prec` and normalising.
    pub fn from_parts(val: i32, residue: u64, prec: u32, ctx: &PrecisionContext) -> Self {
        let prec = prec.min(ctx.digits());
        if prec == 0 {
            return PadicCoeff::Zero { abs: val };
        }
        let mut r = residue % ctx.pow(prec);
        if r == 0 {
            return PadicCoeff::Zero { abs: sat_add(val, prec as i32) };
        }
        let p = ctx.p();
        let mut shift = 0;
        while r % p == 0 {
            r /= p;
            shift += 1;
        }
        PadicCoeff::Unit { val: val + shift as i32, unit: r, prec: prec - shift }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PadicCoeff::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, PadicCoeff::Zero { abs: EXACT })
    }

    /// Exact valuation of a nonzero value; for a zero, the absolute
    /// precision (a lower bound).
    pub fn valuation(&self) -> i32 {
        match *self {
            PadicCoeff::Zero { abs } => abs,
            PadicCoeff::Unit { val, .. } => val,
        }
    }

    /// The value is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i32 {
        match *self {
            PadicCoeff::Zero { abs } => abs,
            PadicCoeff::Unit { val, prec, .. } => val + prec as i32,
        }
    }

    pub fn neg(self, ctx: &PrecisionContext) -> Self {
        match self {
            PadicCoeff::Unit { val, unit, prec } => {
                let m = ctx.pow(prec);
                PadicCoeff::Unit { val, unit: (m - unit % m) % m, prec }
            }
            z => z,
        }
    }

    pub fn add(self, other: Self, ctx: &PrecisionContext) -> Self {
        use PadicCoeff::*;
        match (self, other) {
            (Zero { abs: a }, Zero { abs: b }) => Zero { abs: a.min(b) },
            (Zero { abs }, u @ Unit { .. }) | (u @ Unit { .. }, Zero { abs }) => u.cap_abs(abs, ctx),
            (Unit { val: va, unit: ua, prec: pa }, Unit { val: vb, unit: ub, prec: pb }) => {
                let (va, ua, pa, vb, ub, pb) =
                    if va <= vb { (va, ua, pa, vb, ub, pb) } else { (vb, ub, pb, va, ua, pa) };
                let abs = (va + pa as i32).min(vb + pb as i32);
                let rel = (abs - va) as u32;
                let m = ctx.pow(rel);
                let shift = (vb - va) as u32;
                let s = if shift >= rel {
                    ua % m
                } else {
                    (ua % m + (ctx.pow(shift) * (ub % m)) % m) % m
                };
                Self::from_parts(va, s, rel, ctx)
            }
        }
    }

    pub fn sub(self, other: Self, ctx: &PrecisionContext) -> Self {
        self.add(other.neg(ctx), ctx)
    }

    pub fn mul(self, other: Self, ctx: &PrecisionContext) -> Self {
        use PadicCoeff::*;
        match (self, other) {
            (Zero { abs: a }, Zero { abs: b }) => Zero { abs: sat_add(a, b) },
            (Zero { abs }, Unit { val, .. }) | (Unit { val, .. }, Zero { abs }) => {
                Zero { abs: sat_add(abs, val) }
            }
            (Unit { val: va, unit: ua, prec: pa }, Unit { val: vb, unit: ub, prec: pb }) => {
                let prec = pa.min(pb);
                let m = ctx.pow(prec);
                Unit { val: va + vb, unit: (ua % m) * (ub % m) % m, prec }
            }
        }
    }

    /// Multiplies by `p^k` (k may be negative).
    pub fn shift(self, k: i32) -> Self {
        match self {
            PadicCoeff::Zero { abs } => PadicCoeff::Zero { abs: sat_add(abs, k) },
            PadicCoeff::Unit { val, unit, prec } => PadicCoeff::Unit { val: val + k, unit, prec },
        }
    }

    /// Forgets everything below absolute precision `abs`.
    pub fn cap_abs(self, abs: i32, ctx: &PrecisionContext) -> Self {
        match self {
            PadicCoeff::Zero { abs: a } => PadicCoeff::Zero { abs: a.min(abs) },
            PadicCoeff::Unit { val, unit, prec } => {
                if abs <= val {
                    PadicCoeff::Zero { abs }
                } else if (abs as i64 - val as i64) < prec as i64 {
                    let prec = (abs - val) as u32;
                    PadicCoeff::Unit { val, unit: unit % ctx.pow(prec), prec }
                } else {
                    self
                }
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, ctx: &PrecisionContext) -> Option<Self> {
        match self {
            PadicCoeff::Zero { .. } => None,
            PadicCoeff::Unit { val, unit, prec } => {
                let m = ctx.pow(prec) as i64;
                let g = (unit as i64).extended_gcd(&m);
                debug_assert_eq!(g.gcd, 1);
                Some(PadicCoeff::Unit { val: -val, unit: g.x.rem_euclid(m) as u64, prec })
            }
        }
    }

    /// Reduction of an integral value modulo `p`; `None` when not integral
    /// or not known modulo `p`.
    pub fn residue_mod_p(&self, ctx: &PrecisionContext) -> Option<u64> {
        match *self {
            PadicCoeff::Zero { abs } => (abs >= 1).then_some(0),
            PadicCoeff::Unit { val, unit, .. } => match val {
                v if v > 0 => Some(0),
                0 => Some(unit % ctx.p()),
                _ => None,
            },
        }
    }

    /// `(val, unit, prec)` for a nonzero value.
    pub fn parts(&self) -> Option<(i32, u64, u32)> {
        match *self {
            PadicCoeff::Zero { .. } => None,
            PadicCoeff::Unit { val, unit, prec } => Some((val, unit, prec)),
        }
    }
}
