#![allow(dead_code)]

use std::sync::Arc;

use bkpd_oracle::{agree_to, QPoly};
use bkpd_tower::{PadicCoeff, PrecisionContext, Tag, TowerElement, UPrec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn ctx(p: u64, e: usize, digits: u32, m: usize, depth: usize) -> Arc<PrecisionContext> {
    Arc::new(PrecisionContext::with_simple_eisenstein(p, e, digits, m, depth).unwrap())
}

/// p = 3, E = u + 3.
pub fn ctx3() -> Arc<PrecisionContext> {
    ctx(3, 1, 8, 27, 3)
}

/// p = 5, E = u + 5.
pub fn ctx5() -> Arc<PrecisionContext> {
    ctx(5, 1, 8, 75, 2)
}

pub fn coeff_to_rat(c: PadicCoeff, p: u64) -> BigRational {
    match c.parts() {
        None => BigRational::zero(),
        Some((val, unit, _)) => {
            let pv = BigRational::from_integer(BigInt::from(p)).pow(val);
            pv * BigRational::from_integer(BigInt::from(unit))
        }
    }
}

pub fn to_qpoly(x: &TowerElement) -> QPoly {
    let p = x.ctx().p();
    let len = x.max_degree().map_or(0, |d| d + 1);
    let mut v = vec![BigRational::zero(); len];
    for &(d, c) in x.terms() {
        v[d] = coeff_to_rat(c, p);
    }
    QPoly::new(v)
}

/// Checks every stored coefficient of `x` below `below` against `q` at the
/// coefficient's own absolute precision, and returns the least absolute
/// precision seen (so callers can insist the check is not vacuous).
pub fn check_against(x: &TowerElement, q: &QPoly, below: usize) -> i32 {
    let p = x.ctx().p();
    let below = below.min(x.known_to());
    let mut least = i32::MAX;
    for d in 0..below {
        let c = x.coeff(d);
        let abs = c.abs_prec();
        let mine = coeff_to_rat(c, p);
        let theirs = q.coeff(d);
        if abs == i32::MAX {
            assert!(c.is_exact_zero() && theirs.is_zero(), "degree {d}: exact zero vs {theirs}");
            continue;
        }
        assert!(
            agree_to(&mine, &theirs, p, abs as i64),
            "degree {d}: {mine} vs oracle {theirs} (abs {abs})"
        );
        least = least.min(abs);
    }
    least
}

/// Oracle `E` in `u_n`.
pub fn e_poly(ctx: &PrecisionContext, level: usize) -> QPoly {
    QPoly::from_ints(ctx.eisenstein()).substitute_power((ctx.p() as usize).pow(level as u32))
}

pub fn rat(n: i64) -> BigRational {
    bkpd_oracle::rat(n)
}

pub fn inv_factorial(j: u64) -> BigRational {
    BigRational::new(BigInt::one(), bkpd_oracle::factorial(j))
}

/// Random integer polynomial with `terms` monomials below `deg_bound`.
pub fn random_frak_s(
    ctx: &Arc<PrecisionContext>,
    level: usize,
    deg_bound: usize,
    terms: usize,
    rng: &mut impl Rng,
) -> TowerElement {
    let bound = ctx.pow(ctx.digits()) as i64;
    let t = (0..terms)
        .map(|_| (rng.gen_range(0..deg_bound), PadicCoeff::from_int(rng.gen_range(-bound..bound), ctx)))
        .collect();
    TowerElement::from_terms(ctx, level, Tag::FrakS, t, UPrec::Poly)
}

/// Random element of `S_n` given by a random divided-power form with
/// integral coefficients `a_j`, `j < jlen`.
pub fn random_s(
    ctx: &Arc<PrecisionContext>,
    level: usize,
    jlen: usize,
    rng: &mut impl Rng,
) -> TowerElement {
    let d = ctx.pd_degree(level);
    let coeffs = (0..jlen).map(|_| random_frak_s(ctx, level, d, 3, rng)).collect();
    bkpd_tower::from_pd_form(ctx, &bkpd_tower::PDForm::exact(level, coeffs)).unwrap()
}
