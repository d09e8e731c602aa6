//! Reference arithmetic: dense polynomials in one variable over `ℚ`.
//!
//! Nothing here truncates p-adically, so results are exact and can be
//! compared against the capped-precision kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `Σ c_i u^i`, lowest degree first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn factorial(j: u64) -> BigInt {
    (1..=j).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `p`-adic valuation of a nonzero integer.
pub fn vp_int(x: &BigInt, p: u64) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `p`-adic valuation; `None` for zero.
pub fn vp(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(vp_int(x.numer(), p) - vp_int(x.denom(), p))
}

/// `v_p(a - b) >= abs`.
pub fn agree_to(a: &BigRational, b: &BigRational, p: u64, abs: i64) -> bool {
    vp(&(a - b), p).map_or(true, |v| v >= abs)
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::new(vec![BigRational::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn monomial(degree: usize, c: BigRational) -> Self {
        let mut v = vec![BigRational::zero(); degree + 1];
        v[degree] = c;
        QPoly::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// Drops every term of degree `>= n`.
    pub fn truncate(&self, n: usize) -> QPoly {
        QPoly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn mul_trunc(&self, other: &QPoly, n: usize) -> QPoly {
        self.truncate(n).mul(&other.truncate(n)).truncate(n)
    }

    pub fn pow(&self, k: u32) -> QPoly {
        (0..k).fold(QPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn pow_trunc(&self, k: u32, n: usize) -> QPoly {
        (0..k).fold(QPoly::one().truncate(n), |acc, _| acc.mul_trunc(self, n))
    }

    /// `f(u^k)`.
    pub fn substitute_power(&self, k: usize) -> QPoly {
        let mut out = vec![BigRational::zero(); self.coeffs.len().saturating_sub(1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        QPoly::new(out)
    }

    /// Long division by a monic `f`: `(q, r)` with `self = q f + r`.
    pub fn div_rem_monic(&self, f: &QPoly) -> (QPoly, QPoly) {
        let d = f.degree().expect("division by zero");
        assert!(f.coeffs[d].is_one(), "divisor must be monic");
        let mut r = self.coeffs.clone();
        if r.len() <= d {
            return (QPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - d];
        for t in (d..r.len()).rev() {
            let c = r[t].clone();
            if c.is_zero() {
                continue;
            }
            q[t - d] = c.clone();
            for (k, fk) in f.coeffs.iter().enumerate() {
                r[t - d + k] -= &c * fk;
            }
        }
        r.truncate(d);
        (QPoly::new(q), QPoly::new(r))
    }

    /// Digits `d_j` with `self = Σ d_j f^j`, `deg d_j < deg f`.
    pub fn adic_digits(&self, f: &QPoly) -> Vec<QPoly> {
        let mut digits = Vec::new();
        let mut x = self.clone();
        while !x.is_zero() {
            let (q, r) = x.div_rem_monic(f);
            digits.push(r);
            x = q;
        }
        digits
    }

    /// Smallest p-adic valuation of a coefficient.
    pub fn min_valuation(&self, p: u64) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| vp(c, p)).min()
    }

    /// Coefficientwise `v_p(self - other) >= abs` below degree `n`.
    pub fn agrees_below(&self, other: &QPoly, n: usize, p: u64, abs: i64) -> bool {
        (0..n).all(|i| agree_to(&self.coeff(i), &other.coeff(i), p, abs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_rebuild() {
        let e = QPoly::from_ints(&[3, 1]);
        let x = QPoly::from_ints(&[1, 2, 3, 4, 5, 6, 7]);
        let digits = x.adic_digits(&e);
        let back = digits.iter().rev().fold(QPoly::zero(), |acc, d| acc.mul(&e).add(d));
        assert_eq!(back, x);
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&BigRational::new(BigInt::from(18), BigInt::from(5)), 3), Some(2));
        assert_eq!(vp(&BigRational::new(BigInt::from(2), BigInt::from(45)), 3), Some(-2));
        assert_eq!(vp_int(&factorial(25), 5), 6);
    }
}
