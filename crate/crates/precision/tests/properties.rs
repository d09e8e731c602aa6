use bkpd_precision::{
    contraction_bound, contraction_sequence, digit_sum, legendre_valuation, valuation_of, PadicCoeff, PrecisionContext,
    SequenceKind, EXACT,
};
use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use proptest::prelude::*;

fn ctx(p: u64) -> PrecisionContext {
    PrecisionContext::with_simple_eisenstein(p, 1, 8, 3 * (p * p) as usize, 2).unwrap()
}

/// Whether `c` is a valid approximation of the integer `x`.
fn approximates(c: PadicCoeff, x: &BigInt, p: u64) -> bool {
    let pb = BigInt::from(p);
    match c {
        PadicCoeff::Zero { abs } if abs == EXACT => x.is_zero(),
        PadicCoeff::Zero { abs } => (x % pb.pow(abs as u32)).is_zero(),
        PadicCoeff::Unit { val, unit, prec } => {
            let m = pb.clone().pow((val as u32) + prec);
            let y = pb.pow(val as u32) * BigInt::from(unit);
            ((x - y) % m).is_zero()
        }
    }
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

proptest! {
    #[test]
    fn ring_operations_approximate_integers(p in prime(), a in any::<i64>(), b in any::<i64>()) {
        let c = ctx(p);
        let (x, y) = (PadicCoeff::from_int(a, &c), PadicCoeff::from_int(b, &c));
        let (ba, bb) = (BigInt::from(a), BigInt::from(b));
        prop_assert!(approximates(x.add(y, &c), &(&ba + &bb), p));
        prop_assert!(approximates(x.sub(y, &c), &(&ba - &bb), p));
        prop_assert!(approximates(x.mul(y, &c), &(&ba * &bb), p));
        prop_assert!(approximates(x.neg(&c), &(-&ba), p));
    }

    #[test]
    fn precision_never_grows_under_addition(p in prime(), a in any::<i32>(), b in any::<i32>(), cap in 0i32..12) {
        let c = ctx(p);
        let x = PadicCoeff::from_int(a as i64, &c).cap_abs(cap, &c);
        let y = PadicCoeff::from_int(b as i64, &c);
        prop_assert!(x.add(y, &c).abs_prec() <= x.abs_prec().min(y.abs_prec()));
    }

    #[test]
    fn inverse_of_unit(p in prime(), a in 1i64..1_000_000, k in 0i32..4) {
        let c = ctx(p);
        let x = PadicCoeff::from_int(a, &c).shift(k);
        let y = x.inv(&c).unwrap();
        prop_assert_eq!(y.valuation(), -x.valuation());
        let one = x.mul(y, &c);
        prop_assert_eq!(one.valuation(), 0);
        prop_assert!(one.sub(PadicCoeff::one(&c), &c).is_zero());
    }

    #[test]
    fn legendre_matches_digit_sum(p in prime(), n in 0u64..1_000_000) {
        prop_assert_eq!(legendre_valuation(n, p), (n - digit_sum(n, p)) / (p - 1));
    }

    #[test]
    fn legendre_is_additive(p in prime(), n in 1u64..100_000) {
        let step = valuation_of(n as i128, p).unwrap() as u64;
        prop_assert_eq!(legendre_valuation(n, p), legendre_valuation(n - 1, p) + step);
    }

    #[test]
    fn bound_is_monotone_and_contracting(p in prime(), i in 0u64..1_000_000) {
        let b = contraction_bound(p, i);
        prop_assert!(b <= i);
        prop_assert!(contraction_bound(p, i + 1) >= b);
        prop_assert!(b * (p - 1) >= i * (p - 2));
    }

    #[test]
    fn sequences_increase(p in prime(), r in 0u64..2, n in 1usize..12) {
        let i = contraction_sequence(p, SequenceKind::FrobComp, 0, n).unwrap();
        prop_assert!(i.windows(2).all(|w| w[1] > w[0]));
        let j = contraction_sequence(p, SequenceKind::KeyB, r, n).unwrap();
        prop_assert!(j.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(j.iter().zip(&i).all(|(a, b)| a <= b));
    }
}
