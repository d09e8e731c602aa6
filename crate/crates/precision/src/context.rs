use crate::coeff::PadicCoeff;
use crate::error::PrecisionError;
use crate::legendre::legendre_valuation;

/// Global parameters: the prime, the Eisenstein polynomial `E`, the number
/// of p-adic digits `N`, the base u-adic cutoff `M` and the tower depth.
///
/// Level `n` series are truncated at degree `M p^n` in `u_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionContext {
    p: u64,
    eisenstein: Vec<i64>,
    digits: u32,
    base_cutoff: usize,
    depth: usize,
    pow: Vec<u64>,
    factorials: Vec<PadicCoeff>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl PrecisionContext {
    /// `eisenstein` lists the coefficients of `E` from the constant term up.
    pub fn new(
        p: u64,
        eisenstein: Vec<i64>,
        digits: u32,
        base_cutoff: usize,
        depth: usize,
    ) -> Result<Self, PrecisionError> {
        if p < 3 || !is_prime(p) {
            return Err(PrecisionError::BadPrime(p));
        }
        let e = eisenstein.len().saturating_sub(1);
        let pi = p as i64;
        let shape_ok = e >= 1
            && eisenstein[e] == 1
            && eisenstein[0] == pi
            && eisenstein[1..e].iter().all(|c| c % pi == 0);
        if !shape_ok {
            return Err(PrecisionError::NotEisenstein(format!("{eisenstein:?}")));
        }
        if digits < 2 {
            return Err(PrecisionError::DigitsTooSmall(digits));
        }
        let mut pow = vec![1u64];
        for _ in 0..digits {
            let next = pow.last().unwrap().checked_mul(p).filter(|x| *x < 1 << 32);
            match next {
                Some(x) => pow.push(x),
                None => return Err(PrecisionError::DigitsTooLarge { p, n: digits }),
            }
        }
        if base_cutoff < e * p as usize {
            return Err(PrecisionError::CutoffTooSmall { m: base_cutoff, need: e * p as usize });
        }
        let mut ctx = PrecisionContext {
            p,
            eisenstein,
            digits,
            base_cutoff,
            depth,
            pow,
            factorials: Vec::new(),
        };
        let cap = ctx.p as usize * (ctx.jmax() + 1) + 1;
        let mut facts = Vec::with_capacity(cap + 1);
        let mut acc = PadicCoeff::one(&ctx);
        facts.push(acc);
        for i in 1..=cap {
            acc = acc.mul(PadicCoeff::from_int(i as i64, &ctx), &ctx);
            facts.push(acc);
        }
        ctx.factorials = facts;
        Ok(ctx)
    }

    /// The standard choice `E = u^e + p`.
    pub fn with_simple_eisenstein(
        p: u64,
        e: usize,
        digits: u32,
        base_cutoff: usize,
        depth: usize,
    ) -> Result<Self, PrecisionError> {
        let mut coeffs = vec![0i64; e + 1];
        coeffs[0] = p as i64;
        coeffs[e] = 1;
        Self::new(p, coeffs, digits, base_cutoff, depth)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.eisenstein.len() - 1
    }

    pub fn eisenstein(&self) -> &[i64] {
        &self.eisenstein
    }

    /// `N`.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `M`.
    pub fn base_cutoff(&self) -> usize {
        self.base_cutoff
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `p^k` for `0 <= k <= N`.
    pub fn pow(&self, k: u32) -> u64 {
        self.pow[k as usize]
    }

    /// Degree cutoff `M p^n` at level `n`.
    pub fn cutoff(&self, level: usize) -> usize {
        self.base_cutoff * (self.p as usize).pow(level as u32)
    }

    /// Degree `e p^n` of `E` written in `u_n`.
    pub fn pd_degree(&self, level: usize) -> usize {
        self.e() * (self.p as usize).pow(level as u32)
    }

    /// Bound past which every divided power `E^j/j!` vanishes in the
    /// `(p^N, u^{M p^n})` window.
    pub fn jmax(&self) -> usize {
        let (p, e) = (self.p as usize, self.e());
        ((self.base_cutoff + self.digits as usize * e) * (p - 1)).div_ceil(e * (p - 2).max(1))
    }

    /// Lowest coefficient valuation tolerated before reporting overflow.
    pub fn denominator_budget(&self) -> i32 {
        let j = (self.p as usize * self.jmax()) as u64;
        legendre_valuation(j, self.p) as i32 + self.digits as i32
    }

    /// `j!` as a p-adic number.
    pub fn factorial(&self, j: usize) -> PadicCoeff {
        if let Some(f) = self.factorials.get(j) {
            return *f;
        }
        let mut acc = *self.factorials.last().unwrap();
        for i in self.factorials.len()..=j {
            acc = acc.mul(PadicCoeff::from_int(i as i64, self), self);
        }
        acc
    }

    /// Checks `M >= e (r+1) p` and `r < p - 1` for a module of height `r`.
    pub fn check_height(&self, r: usize) -> Result<(), PrecisionError> {
        if r as u64 + 1 >= self.p {
            return Err(PrecisionError::HeightTooLarge { r: r as u64, bound: self.p - 1 });
        }
        let need = self.e() * (r + 1) * self.p as usize;
        if self.base_cutoff < need {
            return Err(PrecisionError::CutoffTooSmall { m: self.base_cutoff, need });
        }
        Ok(())
    }

    pub fn legendre(&self, n: u64) -> u64 {
        legendre_valuation(n, self.p)
    }
}
