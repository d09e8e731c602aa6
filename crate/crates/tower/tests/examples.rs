mod common;

use bkpd_oracle::{factorial, QPoly};
use bkpd_tower::special::{c0, eisenstein, phi_eisenstein, v_element, z_element};
use bkpd_tower::{
    decompose_frak_s_fil, decompose_key_a, fil_degree, from_pd_form, pd_canonical_form,
    weierstrass_divide, Division, FilDegree, PDForm, PadicCoeff, Tag, TowerElement,
};
use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gamma(ctx: &std::sync::Arc<bkpd_tower::PrecisionContext>, level: usize, j: usize) -> TowerElement {
    let mut coeffs = vec![TowerElement::zero(ctx, level); j];
    coeffs.push(TowerElement::one(ctx, level));
    from_pd_form(ctx, &PDForm::exact(level, coeffs)).unwrap()
}

#[test]
fn e_squared_has_fil_degree_two() {
    let ctx = ctx3();
    let e = eisenstein(&ctx, 0);
    let e2 = e.mul(&e).unwrap();
    assert_eq!(fil_degree(&e2).unwrap().degree, FilDegree::Exactly(2));
}

#[test]
fn gamma_one_squared() {
    let ctx = ctx5();
    let g1 = gamma(&ctx, 1, 1);
    let lhs = g1.mul(&g1).unwrap();
    let two_g2 = gamma(&ctx, 1, 2).scale(PadicCoeff::from_int(2, &ctx)).unwrap();
    assert!(lhs.compare(&two_g2).is_agree());
    let form = pd_canonical_form(&lhs).unwrap();
    assert_eq!(form.len(), 3);
    assert!(form.coeffs[2].compare(&TowerElement::from_ints(&ctx, 1, &[2])).is_agree());
}

#[test]
fn product_rewritten_against_oracle() {
    let ctx = ctx3();
    let x = TowerElement::from_ints(&ctx, 0, &[3, 1]).mul(&TowerElement::from_ints(&ctx, 0, &[-3, 1])).unwrap();
    assert!(x.compare(&TowerElement::from_ints(&ctx, 0, &[-9, 0, 1])).is_agree());
    let form = pd_canonical_form(&x).unwrap();
    let digits = QPoly::from_ints(&[-9, 0, 1]).adic_digits(&e_poly(&ctx, 0));
    assert_eq!(form.len(), digits.len());
    for (j, d) in digits.iter().enumerate() {
        let a = d.scale(&BigRational::from_integer(factorial(j as u64)));
        assert!(check_against(&form.coeffs[j], &a, usize::MAX) >= 6);
    }
    // a_0 = u^2 - 9 reduced modulo E is 0, since E divides it.
    assert_eq!(fil_degree(&x).unwrap().degree, FilDegree::Exactly(1));
}

#[test]
fn include_up_substitutes_u_power() {
    let ctx = ctx3();
    let u0 = TowerElement::from_ints(&ctx, 0, &[0, 1]);
    let up = u0.include_up().unwrap();
    assert_eq!(up.terms().len(), 1);
    assert_eq!(up.terms()[0].0, 3);
    let c = TowerElement::from_ints(&ctx, 0, &[7]);
    assert!(c.include_up().unwrap().compare(&TowerElement::from_ints(&ctx, 1, &[7])).is_agree());
    let e_up = eisenstein(&ctx, 0).include_up().unwrap();
    assert!(e_up.compare(&z_element(&ctx, 1).unwrap()).is_agree());
    assert!(e_up.compare(&TowerElement::from_ints(&ctx, 1, &[3, 0, 0, 1])).is_agree());
}

#[test]
fn include_up_past_depth_fails() {
    let ctx = ctx3();
    let x = TowerElement::one(&ctx, ctx.depth());
    assert!(matches!(x.include_up(), Err(bkpd_tower::TowerError::DepthExceeded { .. })));
}

#[test]
fn frobenius_examples() {
    let ctx = ctx3();
    let u1 = TowerElement::from_ints(&ctx, 1, &[0, 1]);
    assert!(u1.frobenius().unwrap().compare(&TowerElement::from_ints(&ctx, 0, &[0, 1])).is_agree());
    let z1 = z_element(&ctx, 1).unwrap();
    let lhs = z1.frobenius().unwrap();
    let rhs = phi_eisenstein(&ctx, 0).mul(&z_element(&ctx, 0).unwrap()).unwrap();
    assert!(lhs.compare(&rhs).is_agree());
    assert!(matches!(TowerElement::one(&ctx, 0).frobenius(), Err(bkpd_tower::TowerError::BottomLevel)));
}

#[test]
fn frobenius_of_gamma_three_against_binomial_oracle() {
    let ctx = ctx3();
    let g3 = gamma(&ctx, 1, 3);
    assert_eq!(g3.tag(), Tag::S);
    let image = g3.frobenius().unwrap();
    assert_eq!(image.level(), 0);
    let form = pd_canonical_form(&image).unwrap();
    // φ(E)^3 / 3! with φ(E) = u^3 + 3
    let phi_e = QPoly::from_ints(&[3, 0, 0, 1]);
    let oracle = phi_e.pow(3).scale(&inv_factorial(3));
    let digits = oracle.adic_digits(&e_poly(&ctx, 0));
    assert_eq!(form.len(), digits.len());
    for (j, d) in digits.iter().enumerate() {
        let a = d.scale(&BigRational::from_integer(factorial(j as u64)));
        assert!(a.min_valuation(3).map_or(true, |v| v >= 0), "a_{j} not integral");
        assert!(check_against(&form.coeffs[j], &a, usize::MAX) >= 5);
    }
}

#[test]
fn frobenius_inverse_examples() {
    let ctx = ctx3();
    let u0 = TowerElement::from_ints(&ctx, 0, &[0, 1]);
    let inv = u0.frobenius_inverse_frak_s().unwrap();
    assert!(inv.compare(&TowerElement::from_ints(&ctx, 1, &[0, 1])).is_agree());
    let e_inv = eisenstein(&ctx, 0).frobenius_inverse_frak_s().unwrap();
    // E(u_1) as a polynomial in u_1
    assert!(e_inv.compare(&TowerElement::from_ints(&ctx, 1, &[3, 1])).is_agree());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = random_frak_s(&ctx, 1, ctx.cutoff(1), 6, &mut rng);
        let back = g.frobenius_inverse_frak_s().unwrap().frobenius().unwrap();
        assert_eq!(back, g);
    }
}

#[test]
fn z_c0_examples() {
    let ctx = ctx3();
    assert!(z_element(&ctx, 0).unwrap().compare(&TowerElement::one(&ctx, 0)).is_agree());
    let z2 = z_element(&ctx, 2).unwrap();
    for &(d, c) in z2.terms() {
        let r = c.residue_mod_p(&ctx).unwrap();
        if d == 12 {
            assert_eq!(r, 1);
        } else {
            assert_eq!(r, 0, "degree {d}");
        }
    }
    let c = c0(&ctx, 0).unwrap();
    assert_eq!(c.tag(), Tag::S);
    assert_eq!(c.coeff(0).residue_mod_p(&ctx), Some(1));
    let expect = to_qpoly(&c);
    let oracle = QPoly::from_ints(&[1]).add(&QPoly::monomial(3, BigRational::new(1.into(), 3.into())));
    assert!(check_against(&c, &oracle, usize::MAX) >= 6);
    assert_eq!(expect.degree(), Some(3));
}

#[test]
fn pd_form_examples() {
    let ctx = ctx3();
    let g2 = gamma(&ctx, 0, 2);
    let form = pd_canonical_form(&g2).unwrap();
    assert_eq!(form.len(), 3);
    assert!(form.coeffs[0].is_zero_within().is_agree() && form.coeffs[1].is_zero_within().is_agree());
    assert!(form.coeffs[2].compare(&TowerElement::one(&ctx, 0)).is_agree());

    let ep = eisenstein(&ctx, 0).pow(3).unwrap();
    let form = pd_canonical_form(&ep).unwrap();
    assert!(form.coeffs[3].compare(&TowerElement::from_ints(&ctx, 0, &[6])).is_agree());

    let u6 = TowerElement::from_ints(&ctx, 0, &[0, 0, 0, 0, 0, 0, 1]);
    let form = pd_canonical_form(&u6).unwrap();
    let back = from_pd_form(&ctx, &form).unwrap();
    assert!(back.compare(&u6).is_agree());
    let digits = QPoly::monomial(6, bkpd_oracle::rat(1)).adic_digits(&e_poly(&ctx, 0));
    for (j, d) in digits.iter().enumerate() {
        let a = d.scale(&BigRational::from_integer(factorial(j as u64)));
        check_against(&form.coeffs[j], &a, usize::MAX);
    }
}

#[test]
fn fraction_claimed_in_s_is_rejected() {
    let ctx = ctx3();
    // u/3 = E/3 - 1, so a_1 = 1/3
    let x = TowerElement::monomial(&ctx, 0, 1, PadicCoeff::from_int(1, &ctx).shift(-1)).with_tag_unchecked(Tag::S);
    assert!(matches!(pd_canonical_form(&x), Err(bkpd_tower::TowerError::NotInS { digit: 1, .. })));
}

#[test]
fn fil_degree_examples() {
    let ctx = ctx3();
    let e = eisenstein(&ctx, 0);
    for m in 0..=6 {
        assert_eq!(fil_degree(&e.pow(m).unwrap()).unwrap().degree, FilDegree::Exactly(m));
    }
    let p = TowerElement::from_ints(&ctx, 0, &[3]);
    assert_eq!(fil_degree(&p).unwrap().degree, FilDegree::Exactly(0));
    let z1 = z_element(&ctx, 1).unwrap();
    assert_eq!(fil_degree(&z1).unwrap().degree, FilDegree::Exactly(1));
    assert_eq!(fil_degree(&TowerElement::zero(&ctx, 0)).unwrap().degree, FilDegree::Infinite);
}

#[test]
fn weierstrass_examples() {
    let ctx = ctx3();
    let e = eisenstein(&ctx, 0);
    let q = weierstrass_divide(&e.pow(3).unwrap(), 2).unwrap().quotient().unwrap();
    assert!(q.compare(&e).is_agree());
    let u = TowerElement::from_ints(&ctx, 0, &[0, 1]);
    assert!(matches!(weierstrass_divide(&u, 1).unwrap(), Division::Reject { digit: 0, .. }));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let level = case % 3;
        let m = case % 3 + 1;
        let q = random_frak_s(&ctx, level, ctx.pd_degree(level) * 4, 5, &mut rng);
        let x = eisenstein(&ctx, level).pow(m).unwrap().mul(&q).unwrap();
        let got = weierstrass_divide(&x, m).unwrap().quotient().expect("divisible");
        assert!(got.compare(&q).is_agree(), "case {case}");
    }
}

#[test]
fn key_a_gamma_p() {
    let ctx = ctx3();
    let x = gamma(&ctx, 1, 3);
    let split = decompose_key_a(&x, 3).unwrap();
    assert_eq!(split.w.tag(), Tag::FrakS);
    assert_eq!(split.w.level(), 0);
    let fil = fil_degree(&split.y).unwrap().degree.lower_bound();
    assert!(fil >= 6, "fil(y) = {fil}");
    let sum = split.w.add(&split.y).unwrap();
    assert!(sum.compare(&x.frobenius().unwrap()).is_agree());
}

#[test]
fn key_a_on_frak_s_is_all_w() {
    let ctx = ctx3();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = random_frak_s(&ctx, 2, ctx.cutoff(2), 8, &mut rng);
        let split = decompose_key_a(&x, 0).unwrap();
        assert!(split.w.compare(&x.frobenius().unwrap()).is_agree());
        assert!(split.y.is_zero_within().is_agree());
    }
}

#[test]
fn key_a_gamma_five_against_binomial_oracle() {
    let ctx = ctx5();
    let x = gamma(&ctx, 1, 5);
    let split = decompose_key_a(&x, 5).unwrap();
    // φ(γ_5(E)) = Σ_k 5^k / ((5-k)! k!) E^{5(5-k)} v^k at level 0
    let e = e_poly(&ctx, 0);
    let phi_e = e.substitute_power(5);
    let v = phi_e.sub(&e.pow(5)).scale(&BigRational::new(1.into(), 5.into()));
    let cut = ctx.cutoff(0);
    let mut w = QPoly::zero();
    let mut y = QPoly::zero();
    for k in 0..=5u64 {
        let c = BigRational::new(
            num_bigint::BigInt::from(5).pow(k as u32),
            factorial(5 - k) * factorial(k),
        );
        let term = e.pow(5 * (5 - k as u32)).mul(&v.pow(k as u32)).scale(&c).truncate(cut);
        if k * 4 >= 5 {
            w = w.add(&term);
        } else {
            y = y.add(&term);
        }
    }
    assert!(check_against(&split.w, &w, cut) >= 6);
    assert!(check_against(&split.y, &y, cut) >= 5);
    assert!(w.min_valuation(5).unwrap() >= 0);
    assert!(y.coeffs().iter().any(|c| !c.is_zero()));
}

#[test]
fn frak_s_fil_examples() {
    let ctx = ctx3();
    let x = TowerElement::from_ints(&ctx, 1, &[1, 2, 3, 4, 5]);
    let (w, y) = decompose_frak_s_fil(&x).unwrap();
    assert!(w.compare(&x).is_agree());
    assert!(y.is_zero_within().is_agree());
    let g = gamma(&ctx, 1, 3);
    let (w, y) = decompose_frak_s_fil(&g).unwrap();
    assert!(w.is_zero_within().is_agree());
    assert!(y.compare(&g).is_agree());

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let x = random_s(&ctx, 1, 8, &mut rng);
        let (w, y) = decompose_frak_s_fil(&x).unwrap();
        assert_eq!(w.tag(), Tag::FrakS);
        assert!(fil_degree(&y).unwrap().degree.lower_bound() >= 3);
        assert!(w.add(&y).unwrap().compare(&x).is_agree());
    }
}

#[test]
fn v_is_a_unit_of_frak_s() {
    let ctx = ctx5();
    let v = v_element(&ctx, 0).unwrap();
    assert_eq!(v.tag(), Tag::FrakS);
    assert_eq!(v.coeff(0).valuation(), 0);
}
