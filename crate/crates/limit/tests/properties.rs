use std::sync::Arc;

use bkpd_breuil::{base_change, BreuilModule, SVector};
use bkpd_kisin::random_filtered_with;
use bkpd_limit::{chain_from_vector, check_compat, descend_with, frobenius_down, lift};
use bkpd_precision::{PadicCoeff, PrecisionContext};
use bkpd_tower::{Tag, TowerElement, UPrec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx() -> Arc<PrecisionContext> {
    Arc::new(PrecisionContext::with_simple_eisenstein(5, 1, 8, 75, 3).unwrap())
}

fn module(c: &Arc<PrecisionContext>, rng: &mut ChaCha8Rng) -> BreuilModule {
    let d = rng.gen_range(1..=2);
    let r = rng.gen_range(0..=3);
    base_change(&random_filtered_with(c, d, r, rng)).unwrap()
}

fn vector(c: &Arc<PrecisionContext>, level: usize, d: usize, rng: &mut ChaCha8Rng) -> SVector {
    let coords = (0..d)
        .map(|_| {
            let terms = (0..3).map(|k| (k, PadicCoeff::from_int(rng.gen_range(-50..50), c))).collect();
            TowerElement::from_terms(c, level, Tag::FrakS, terms, UPrec::Poly)
        })
        .collect();
    SVector::new(coords)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lift_then_frobenius_down(seed in any::<u64>(), level in 0usize..3) {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = module(&c, &mut rng);
        let w = vector(&c, level, m.d(), &mut rng);
        let down = frobenius_down(&m, &lift(&m, &w).unwrap()).unwrap();
        prop_assert!(down.compare(&w).is_agree());
    }

    #[test]
    fn lifted_chains_are_compatible_and_descend(seed in any::<u64>()) {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = module(&c, &mut rng);
        let g = vector(&c, 0, m.d(), &mut rng);
        let chain = chain_from_vector(&m, &g, 3).unwrap();
        prop_assert!(check_compat(&chain).is_ok());
        let desc = descend_with(&chain, Some(0)).unwrap();
        prop_assert!(desc.g.compare(&g).is_agree());
        prop_assert!(desc.residual.lower_bound() >= desc.bound);
    }

    #[test]
    fn descent_is_additive(seed in any::<u64>()) {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = module(&c, &mut rng);
        let a = chain_from_vector(&m, &vector(&c, 0, m.d(), &mut rng), 3).unwrap();
        let b = chain_from_vector(&m, &vector(&c, 0, m.d(), &mut rng), 3).unwrap();
        let ga = descend_with(&a, None).unwrap().g;
        let gb = descend_with(&b, None).unwrap().g;
        let sum = descend_with(&a.add(&b).unwrap(), None).unwrap().g;
        let expected = SVector::new(ga.coords.iter().zip(&gb.coords).map(|(x, y)| x.add(y).unwrap()).collect());
        prop_assert!(sum.compare(&expected).is_agree());
    }
}
