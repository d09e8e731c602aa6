use bkpd_precision::EXACT;
use serde::{Deserialize, Serialize};

/// Joint precision window on which an identity has been certified:
/// `digits` p-adic digits (relative to the common scale of the operands)
/// on all u-degrees below `udeg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub digits: i32,
    pub udeg: usize,
}

impl Window {
    pub const FULL: Window = Window { digits: EXACT, udeg: usize::MAX };

    pub fn meet(self, other: Window) -> Window {
        Window { digits: self.digits.min(other.digits), udeg: self.udeg.min(other.udeg) }
    }

    pub fn covers(&self, digits: i32, udeg: usize) -> bool {
        self.digits >= digits && self.udeg >= udeg
    }
}

/// Outcome of comparing two elements inside their joint window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Agreement {
    Agree(Window),
    /// A coefficient of the difference is certainly nonzero.
    Differ { degree: usize, valuation: i32, window: Window },
}

impl Agreement {
    pub fn is_agree(&self) -> bool {
        matches!(self, Agreement::Agree(_))
    }

    pub fn window(&self) -> Window {
        match *self {
            Agreement::Agree(w) => w,
            Agreement::Differ { window, .. } => window,
        }
    }

    /// Combines two outcomes; the first disagreement wins.
    pub fn meet(self, other: Agreement) -> Agreement {
        match (self, other) {
            (Agreement::Agree(a), Agreement::Agree(b)) => Agreement::Agree(a.meet(b)),
            (d @ Agreement::Differ { .. }, _) => d,
            (_, d) => d,
        }
    }
}

impl Default for Agreement {
    fn default() -> Self {
        Agreement::Agree(Window::FULL)
    }
}
