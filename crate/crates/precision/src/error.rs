use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrecisionError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("polynomial is not monic Eisenstein with constant term p: {0}")]
    NotEisenstein(String),
    #[error("precision N = {0} must be at least 2")]
    DigitsTooSmall(u32),
    #[error("p^N = {p}^{n} does not fit the 32-bit residue window")]
    DigitsTooLarge { p: u64, n: u32 },
    #[error("base u-adic cutoff M = {m} is below e*(r+1)*p = {need}")]
    CutoffTooSmall { m: usize, need: usize },
    #[error("height r = {r} must satisfy r < p - 1 = {bound}")]
    HeightTooLarge { r: u64, bound: u64 },
    #[error("contraction sequence overflowed u64 at step {0}")]
    Overflow(usize),
}
