use std::sync::Arc;

use bkpd_breuil::{base_change, BreuilModule, SVector};
use bkpd_kisin::{random_filtered_with, FilteredBK};
use bkpd_precision::{contraction_sequence, PadicCoeff, PrecisionContext, SequenceKind};
use bkpd_tower::special::{eisenstein, z_element};
use bkpd_tower::{Agreement, FilDegree, Matrix, Tag, TowerElement, UPrec};
use bkpd_limit::{
    chain_from_vector, check_compat, descend, descend_with, filr_generator_chain, frobenius_down,
    generator_chain, lift, recover_filtered, Chain, LimitError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(p: u64, e: usize, m: usize, depth: usize) -> Arc<PrecisionContext> {
    Arc::new(PrecisionContext::with_simple_eisenstein(p, e, 8, m, depth).unwrap())
}

fn frak(ctx: &Arc<PrecisionContext>, level: usize, deg: usize, rng: &mut ChaCha8Rng) -> TowerElement {
    let terms = (0..deg).map(|k| (k, PadicCoeff::from_int(rng.gen_range(-200..200), ctx))).collect();
    TowerElement::from_terms(ctx, level, Tag::FrakS, terms, UPrec::Poly)
}

fn frak_vec(ctx: &Arc<PrecisionContext>, level: usize, d: usize, rng: &mut ChaCha8Rng) -> SVector {
    SVector::new((0..d).map(|_| frak(ctx, level, 4, rng)).collect())
}

fn random_module(ctx: &Arc<PrecisionContext>, rng: &mut ChaCha8Rng, dmax: usize, rmax: usize) -> BreuilModule {
    let d = rng.gen_range(1..=dmax);
    let r = rng.gen_range(0..=rmax);
    base_change(&random_filtered_with(ctx, d, r, rng)).unwrap()
}

fn one_vec(ctx: &Arc<PrecisionContext>, level: usize) -> SVector {
    SVector::new(vec![TowerElement::one(ctx, level)])
}

#[test]
fn mu_p_infinity_chain_is_constant() {
    for p in [3, 5] {
        let c = ctx(p, 1, 3 * p as usize * p as usize, 4);
        let m = base_change(&FilteredBK::mu_p_infinity(&c)).unwrap();
        let chain = generator_chain(&m, 0, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(chain.w(n), &one_vec(&c, n));
        }
        let cert = check_compat(&chain).unwrap();
        assert_eq!(cert.windows.len(), 4);
        assert!(cert.window().digits >= 6);
    }
}

#[test]
fn trivial_module_chains_are_basis_vectors() {
    let c = ctx(5, 1, 75, 3);
    let m = base_change(&FilteredBK::trivial(&c, 2)).unwrap();
    for i in 0..2 {
        let chain = generator_chain(&m, i, 3).unwrap();
        for n in 0..=3 {
            for k in 0..2 {
                let want = if k == i { TowerElement::one(&c, n) } else { TowerElement::zero(&c, n) };
                assert_eq!(chain.w(n).coords[k], want);
            }
        }
    }
}

/// `w_n = A φ^{-1}(A) ⋯ φ^{1-n}(A) δ_i`, built without `lift`.
#[test]
fn generator_chains_match_the_product_formula() {
    let c = ctx(5, 1, 75, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let m = random_module(&c, &mut rng, 2, 3);
        let d = m.d();
        for i in 0..d {
            let chain = generator_chain(&m, i, 3).unwrap();
            check_compat(&chain).unwrap();
            let mut pn = Matrix::identity(&c, 0, d);
            for n in 1..=3 {
                pn = m.a_at(n).unwrap().mul(&pn.frobenius_preimage().unwrap()).unwrap();
                let col = SVector::new(pn.col(i));
                assert!(col.compare(chain.w(n)).is_agree(), "level {n}");
            }
        }
    }
}

#[test]
fn filr_generator_chains() {
    let c = ctx(3, 1, 27, 3);
    let q = base_change(&FilteredBK::qp_zp(&c)).unwrap();
    let chain = filr_generator_chain(&q, &one_vec(&c, 0), 3).unwrap();
    assert_eq!(chain.w(0), &SVector::new(vec![eisenstein(&c, 0)]));
    check_compat(&chain).unwrap();
    assert!(q.fil_r_membership(chain.w(0)).unwrap().is_accept());

    let zero = filr_generator_chain(&q, &SVector::zero(&c, 0, 1), 3).unwrap();
    assert_eq!(zero, Chain::zero(&q, 3).unwrap());

    let c5 = ctx(5, 1, 75, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let m = random_module(&c5, &mut rng, 3, 3);
        let x = frak_vec(&c5, 0, m.d(), &mut rng);
        let chain = filr_generator_chain(&m, &x, 3).unwrap();
        check_compat(&chain).unwrap();
        assert!(m.fil_r_membership(chain.w(0)).unwrap().is_accept());
    }
}

#[test]
fn lift_examples_and_round_trip() {
    let c = ctx(5, 1, 75, 3);
    let mu = base_change(&FilteredBK::mu_p_infinity(&c)).unwrap();
    for n in 0..3 {
        assert_eq!(lift(&mu, &one_vec(&c, n)).unwrap(), one_vec(&c, n + 1));
    }
    assert!(matches!(lift(&mu, &one_vec(&c, 3)), Err(LimitError::DepthExceeded { .. })));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let m = random_module(&c, &mut rng, 3, 3);
        let n = case % 3;
        let w = frak_vec(&c, n, m.d(), &mut rng);
        let up = lift(&m, &w).unwrap();
        assert_eq!(up, lift(&m, &w).unwrap());
        let down = frobenius_down(&m, &up).unwrap();
        assert!(down.compare(&w).is_agree(), "case {case}");
    }
}

#[test]
fn perturbed_chain_is_incompatible() {
    let c = ctx(5, 1, 75, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p7 = PadicCoeff::from_int(5i64.pow(7), &c);
    for level in 0..=3 {
        let m = random_module(&c, &mut rng, 2, 3);
        let chain = generator_chain(&m, 0, 3).unwrap();
        let bump = TowerElement::monomial(&c, level, 1, p7);
        let mut w = chain.w(level).clone();
        w.coords[0] = w.coords[0].add(&bump).unwrap();
        let bad = chain.with_element(level, w).unwrap();
        match check_compat(&bad) {
            Err(LimitError::Incompatible { level: l, residual: Agreement::Differ { valuation, .. } }) => {
                assert_eq!(l, level.max(1));
                assert!(valuation >= 7);
            }
            other => panic!("level {level}: {other:?}"),
        }
    }
}

#[test]
fn descend_recovers_combinations() {
    let c = ctx(5, 1, 75, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let j3 = contraction_sequence(5, SequenceKind::KeyB, 0, 3).unwrap();
    assert_eq!(j3, vec![5, 20, 75]);
    for case in 0..10 {
        let m = random_module(&c, &mut rng, 3, 3);
        let d = m.d();
        let g: Vec<TowerElement> = (0..d).map(|_| frak(&c, 0, 3, &mut rng)).collect();
        let mut chain = Chain::zero(&m, 3).unwrap();
        for (i, gi) in g.iter().enumerate() {
            chain = chain.add(&generator_chain(&m, i, 3).unwrap().act(gi).unwrap()).unwrap();
        }
        let desc = descend_with(&chain, Some(0)).unwrap();
        assert!(desc.g.compare(&SVector::new(g.clone())).is_agree(), "case {case}");
        assert_eq!(desc.w.level, 1);
        assert!(desc.residual.lower_bound() >= desc.bound, "case {case}: {:?}", desc.steps);
        for step in &desc.steps {
            assert!(step.realized.lower_bound() >= step.required);
        }
        let seq = contraction_sequence(5, SequenceKind::KeyB, m.r() as u64, 3).unwrap();
        assert_eq!(desc.bound as u64, seq[2]);
        assert!(desc.keyc_degree > 0);
    }
}

#[test]
fn descend_examples() {
    let c = ctx(3, 1, 27, 4);
    let mu = base_change(&FilteredBK::mu_p_infinity(&c)).unwrap();
    let desc = descend(&generator_chain(&mu, 0, 4).unwrap()).unwrap();
    assert_eq!(desc.w, one_vec(&c, 1));
    assert_eq!(desc.g, one_vec(&c, 0));

    let zero = Chain::zero(&mu, 3).unwrap();
    let desc = descend(&zero).unwrap();
    assert_eq!(desc.residual, FilDegree::Infinite);
    assert!(desc.w.coords[0].is_exact_zero());

    let shallow = generator_chain(&mu, 0, 1).unwrap();
    assert!(matches!(descend_with(&shallow, Some(100)), Err(LimitError::DescentInconclusive(_))));
}

#[test]
fn descend_of_fil_r_chain_lands_in_fil_r() {
    let c = ctx(5, 1, 75, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let m = random_module(&c, &mut rng, 3, 3);
        let x = frak_vec(&c, 0, m.d(), &mut rng);
        let desc = descend(&filr_generator_chain(&m, &x, 3).unwrap()).unwrap();
        assert!(m.lattice().fil_membership(&desc.g.coords, m.r()).unwrap().is_member());
    }
}

/// For `0 <= i <= r`, `ξ_0 ∈ Fil^i 𝓜` matches `Fil^i M` on chains through
/// lattice vectors, and `z_n^{r-i}` carries `Fil^i` into `Fil^r`.
#[test]
fn intermediate_filtrations() {
    let c = ctx(5, 1, 75, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let m = random_module(&c, &mut rng, 2, 3);
        let d = m.d();
        let x = frak_vec(&c, 0, d, &mut rng);
        let g = if rng.gen_bool(0.5) { SVector::new(m.a().mul_vec(&x.coords).unwrap()) } else { x };
        let chain = chain_from_vector(&m, &g, 2).unwrap();
        for i in 0..=m.r() {
            let s_side = m.fil_i_membership(chain.w(0), i).unwrap().is_accept();
            let k_side = m.lattice().fil_membership(&g.coords, i).unwrap().is_member();
            assert_eq!(s_side, k_side, "i = {i}");
            for n in 1..=2 {
                let wn = chain.w(n);
                if m.fil_i_membership(wn, i).unwrap().is_accept() {
                    let z = z_element(&c, n).unwrap().pow(m.r() - i).unwrap();
                    assert!(m.fil_r_membership(&wn.scale(&z).unwrap()).unwrap().is_accept());
                }
            }
        }
    }
}

#[test]
fn recover_worked_examples() {
    for p in [3u64, 5] {
        let c = ctx(p, 1, 3 * (p * p) as usize, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in [FilteredBK::mu_p_infinity(&c), FilteredBK::qp_zp(&c), FilteredBK::trivial(&c, 2)] {
            let rec = recover_filtered(&base_change(&m).unwrap(), 3, 3, &mut rng).unwrap();
            assert!(rec.window().is_some(), "{:?}", rec.checks);
            assert!(rec.module.a().compare(m.a()).is_agree());
            assert!(rec.module.b().compare(m.b()).is_agree());
        }
    }
}

#[test]
fn recover_random_modules() {
    let c = ctx(5, 1, 75, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..5 {
        let m = random_module(&c, &mut rng, 3, 3);
        let rec = recover_filtered(&m, 3, 2, &mut rng).unwrap();
        let w = rec.window().unwrap_or_else(|| panic!("case {case}: {:?}", rec.checks));
        assert!(w.digits >= 6, "case {case}: {w:?}");
        assert!(rec.min_residual().lower_bound() >= rec.bound);
    }
}

#[test]
fn non_frak_s_bottom_has_no_extension() {
    let c = ctx(5, 1, 75, 3);
    let m = base_change(&FilteredBK::trivial(&c, 1)).unwrap();
    let e = eisenstein(&c, 0);
    let inv = c.factorial(5).inv(&c).unwrap();
    let gamma5 = e.pow(5).unwrap().scale(inv).unwrap().with_tag_unchecked(Tag::S);
    let s0 = SVector::new(vec![gamma5]);
    match chain_from_vector(&m, &s0, 3) {
        Err(LimitError::NoExtension { level, .. }) => assert_eq!(level, 1),
        other => panic!("{other:?}"),
    }
}
