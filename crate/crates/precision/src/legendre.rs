/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `v_p(n!)`, via `(n - s_p(n)) / (p - 1)`.
pub fn legendre_valuation(n: u64, p: u64) -> u64 {
    (n - digit_sum(n, p)) / (p - 1)
}

/// `v_p(n)` for a nonzero integer; `None` for zero.
pub fn valuation_of(n: i128, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(legendre_valuation(25, 5), 6);
        assert_eq!(legendre_valuation(0, 3), 0);
        assert_eq!(legendre_valuation(12, 3) - 4, legendre_valuation(4, 3));
        assert_eq!(digit_sum(25, 5), 1);
        assert_eq!(valuation_of(-18, 3), Some(2));
        assert_eq!(valuation_of(0, 3), None);
    }
}
