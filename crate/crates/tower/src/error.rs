use bkpd_precision::PrecisionError;
use thiserror::Error;

use crate::element::Tag;
use crate::pd::FilDegree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("coefficient of degree {degree} has valuation {valuation}, below the budget -{budget}")]
    DenominatorOverflow { degree: usize, valuation: i32, budget: i32 },
    #[error("not in S: divided-power coefficient a_{digit} has valuation {valuation} at degree {degree}")]
    NotInS { digit: usize, degree: usize, valuation: i32 },
    #[error("not integral: coefficient of degree {degree} has valuation {valuation}")]
    NotIntegral { degree: usize, valuation: i32 },
    #[error("filtration degree {found:?} is below the required {required}")]
    NotInFil { required: usize, found: FilDegree },
    #[error("level {level} exceeds the tower depth {depth}")]
    DepthExceeded { level: usize, depth: usize },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("Frobenius is not defined downward from level 0")]
    BottomLevel,
    #[error("element is not a unit")]
    NotUnit,
    #[error("expected a {expected:?} element, found {found:?}")]
    TagMismatch { expected: Tag, found: Tag },
    #[error("divisor is not monic")]
    NotMonic,
    #[error(transparent)]
    Precision(#[from] PrecisionError),
}
