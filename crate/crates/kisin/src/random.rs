use std::sync::Arc;

use bkpd_precision::{PadicCoeff, PrecisionContext};
use bkpd_tower::special::eisenstein;
use bkpd_tower::{Matrix, Tag, TowerElement, UPrec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::FilteredBK;

fn random_entry<R: Rng>(ctx: &Arc<PrecisionContext>, rng: &mut R) -> TowerElement {
    let modulus = ctx.pow(ctx.digits()) as i64;
    let mut terms = Vec::new();
    for k in 0..=ctx.e() {
        if rng.gen_bool(0.6) {
            terms.push((k, PadicCoeff::from_int(rng.gen_range(0..modulus), ctx)));
        }
    }
    TowerElement::from_terms(ctx, 0, Tag::FrakS, terms, UPrec::Poly)
}

/// A unitriangular matrix and its inverse `Σ_k (-N)^k`.
fn unitriangular<R: Rng>(
    ctx: &Arc<PrecisionContext>,
    d: usize,
    lower: bool,
    rng: &mut R,
) -> (Matrix, Matrix) {
    let id = Matrix::identity(ctx, 0, d);
    let nil = Matrix::from_fn(d, d, |i, j| {
        if (lower && i > j) || (!lower && i < j) {
            random_entry(ctx, rng)
        } else {
            TowerElement::zero(ctx, 0)
        }
    });
    let m = id.add(&nil).expect("same level");
    let neg = nil.map(|x| Ok(x.neg())).expect("negation");
    let mut inv = id.clone();
    let mut pow = id;
    for _ in 1..d {
        pow = pow.mul(&neg).expect("same level");
        inv = inv.add(&pow).expect("same level");
    }
    (m, inv)
}

fn permutation<R: Rng>(ctx: &Arc<PrecisionContext>, d: usize, rng: &mut R) -> (Matrix, Matrix) {
    let mut sigma: Vec<usize> = (0..d).collect();
    sigma.shuffle(rng);
    let p = Matrix::from_fn(d, d, |i, j| {
        if sigma[i] == j {
            TowerElement::one(ctx, 0)
        } else {
            TowerElement::zero(ctx, 0)
        }
    });
    let pt = p.transpose();
    (p, pt)
}

/// `P L U` and its inverse.
fn random_invertible<R: Rng>(ctx: &Arc<PrecisionContext>, d: usize, rng: &mut R) -> (Matrix, Matrix) {
    let (p, p_inv) = permutation(ctx, d, rng);
    let (l, l_inv) = unitriangular(ctx, d, true, rng);
    let (u, u_inv) = unitriangular(ctx, d, false, rng);
    let m = p.mul(&l).and_then(|x| x.mul(&u)).expect("same level");
    let inv = u_inv.mul(&l_inv).and_then(|x| x.mul(&p_inv)).expect("same level");
    (m, inv)
}

/// `A = U diag(E^{a_i}) V`, `B = V^{-1} diag(E^{r-a_i}) U^{-1}` for the given
/// exponents `0 <= a_i <= r`.
pub fn random_filtered_with_exponents<R: Rng>(
    ctx: &Arc<PrecisionContext>,
    r: usize,
    exponents: &[usize],
    rng: &mut R,
) -> FilteredBK {
    assert!(exponents.iter().all(|&a| a <= r), "exponent above the height");
    let d = exponents.len();
    let e = eisenstein(ctx, 0);
    let diag = |f: &dyn Fn(usize) -> usize| {
        Matrix::diagonal(exponents.iter().map(|&a| e.pow(f(a)).expect("E^k fits")).collect())
    };
    let (u, u_inv) = random_invertible(ctx, d, rng);
    let (v, v_inv) = random_invertible(ctx, d, rng);
    let a = u.mul(&diag(&|a| a)).and_then(|x| x.mul(&v)).expect("same level");
    let b = v_inv.mul(&diag(&|a| r - a)).and_then(|x| x.mul(&u_inv)).expect("same level");
    FilteredBK::new(ctx, r, a, b)
}

/// Random exponents in `0..=r`.
pub fn random_filtered_with<R: Rng>(
    ctx: &Arc<PrecisionContext>,
    d: usize,
    r: usize,
    rng: &mut R,
) -> FilteredBK {
    let exponents: Vec<usize> = (0..d).map(|_| rng.gen_range(0..=r)).collect();
    random_filtered_with_exponents(ctx, r, &exponents, rng)
}

/// Deterministic in `seed`.
pub fn random_filtered(ctx: &Arc<PrecisionContext>, seed: u64, d: usize, r: usize) -> FilteredBK {
    random_filtered_with(ctx, d, r, &mut ChaCha8Rng::seed_from_u64(seed))
}
