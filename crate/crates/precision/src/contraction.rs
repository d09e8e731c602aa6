use crate::error::PrecisionError;
use crate::legendre::legendre_valuation;

/// `b(i) = ceil(i (p-2) / (p-1))`.
pub fn contraction_bound(p: u64, i: u64) -> u64 {
    (i * (p - 2)).div_ceil(p - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    /// `i_0 = p`, `i_n = p b(i_{n-1})`: the filtration reached after n Frobenius steps.
    FrobComp,
    /// `j_1 = p`, `j_n = p b(j_{n-1}) - r`: the same, paying `E^r` at each step.
    KeyB,
}

/// Returns `i_0..=i_{n_max}` for [`SequenceKind::FrobComp`] and
/// `j_1..=j_{n_max}` for [`SequenceKind::KeyB`].
pub fn contraction_sequence(
    p: u64,
    kind: SequenceKind,
    r: u64,
    n_max: usize,
) -> Result<Vec<u64>, PrecisionError> {
    let mut out = Vec::with_capacity(n_max + 1);
    match kind {
        SequenceKind::FrobComp => {
            let mut i = p;
            out.push(i);
            for step in 1..=n_max {
                i = p
                    .checked_mul(contraction_bound_checked(p, i).ok_or(PrecisionError::Overflow(step))?)
                    .ok_or(PrecisionError::Overflow(step))?;
                out.push(i);
            }
        }
        SequenceKind::KeyB => {
            if r + 1 >= p {
                return Err(PrecisionError::HeightTooLarge { r, bound: p - 1 });
            }
            if n_max == 0 {
                return Ok(out);
            }
            let mut j = p;
            out.push(j);
            for step in 2..=n_max {
                let b = contraction_bound_checked(p, j).ok_or(PrecisionError::Overflow(step))?;
                j = p.checked_mul(b).ok_or(PrecisionError::Overflow(step))? - r;
                out.push(j);
            }
        }
    }
    Ok(out)
}

fn contraction_bound_checked(p: u64, i: u64) -> Option<u64> {
    Some(i.checked_mul(p - 2)?.div_ceil(p - 1))
}

/// The mod-p divisibility exponent `p (p^n - r (p^n - 1)/(p - 1))` used to
/// certify that a level-one vector is divisible by p.
pub fn keyc_divisibility(p: u64, r: u64, n: u32) -> i64 {
    let pn = p.pow(n) as i64;
    let p = p as i64;
    p * (pn - r as i64 * (pn - 1) / (p - 1))
}

/// Valuation of the binomial-expansion coefficient `p^k / ((j-k)! k!)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PdTermValuation {
    pub valuation: i64,
    /// `k >= j/(p-1)`: the term is sent to the integral part of the split.
    pub w_side: bool,
}

pub fn pd_term_valuation(p: u64, j: u64, k: u64) -> PdTermValuation {
    assert!(k <= j, "k = {k} exceeds j = {j}");
    let valuation =
        k as i64 - legendre_valuation(j - k, p) as i64 - legendre_valuation(k, p) as i64;
    PdTermValuation { valuation, w_side: k * (p - 1) >= j }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(contraction_bound(5, 5), 4);
        assert_eq!(contraction_bound(5, 0), 0);
        assert_eq!(contraction_bound(3, 4), 2);
    }

    #[test]
    fn sequence_examples() {
        let i = contraction_sequence(5, SequenceKind::FrobComp, 0, 2).unwrap();
        assert_eq!(i, vec![5, 20, 75]);
        let j = contraction_sequence(5, SequenceKind::KeyB, 3, 3).unwrap();
        assert_eq!(j, vec![5, 17, 62]);
        let j = contraction_sequence(3, SequenceKind::KeyB, 1, 3).unwrap();
        assert_eq!(j, vec![3, 5, 8]);
        assert!(matches!(
            contraction_sequence(5, SequenceKind::KeyB, 4, 3),
            Err(PrecisionError::HeightTooLarge { .. })
        ));
    }

    #[test]
    fn term_valuations() {
        assert_eq!(pd_term_valuation(3, 3, 3), PdTermValuation { valuation: 2, w_side: true });
        assert_eq!(pd_term_valuation(3, 0, 0), PdTermValuation { valuation: 0, w_side: true });
        assert_eq!(pd_term_valuation(5, 5, 0), PdTermValuation { valuation: -1, w_side: false });
    }

    #[test]
    fn keyc_exponent() {
        assert_eq!(keyc_divisibility(5, 3, 3), 160);
        assert_eq!(keyc_divisibility(3, 0, 1), 9);
    }
}
