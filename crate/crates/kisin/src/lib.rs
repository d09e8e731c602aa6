//! Filtered Breuil-Kisin modules of height `r` over `𝔖`, presented by a pair
//! of matrices `(A, B)` with `AB = BA = E^r`: `M = ⊕ 𝔖 e_i`,
//! `Fil^r M = ⊕ 𝔖 α_i` with `(α) = (e) A`, and `φ_{M,r}(α_i) = e_i`.

mod random;

use std::sync::Arc;

use bkpd_precision::PrecisionContext;
use bkpd_tower::special::eisenstein;
use bkpd_tower::{
    inverse_unit, weierstrass_divide, Agreement, Division, Matrix, Tag, TowerElement, TowerError,
    Window,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use random::{random_filtered, random_filtered_with, random_filtered_with_exponents};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KisinError {
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("height exceeded: {0}")]
    HeightExceeded(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredBK {
    ctx: Arc<PrecisionContext>,
    r: usize,
    a: Matrix,
    b: Matrix,
}

/// `𝔐` with the matrix `C` of `φ_𝔐` on a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBK {
    ctx: Arc<PrecisionContext>,
    r: usize,
    c: Matrix,
}

/// Windows on which `AB = E^r` and `BA = E^r` were certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationCertificate {
    pub ab: Window,
    pub ba: Window,
}

impl ValidationCertificate {
    pub fn window(&self) -> Window {
        self.ab.meet(self.ba)
    }
}

/// Witness for `(e) v ∈ Fil^i M`: `B v = E^i x`, so that `E^{r-i} v = A x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Member { x: Vec<TowerElement>, window: Window },
    /// Coordinate `coord` of `B v` is not divisible by `E^{digit+1}`.
    NotMember { coord: usize, digit: usize },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

fn e_power(ctx: &Arc<PrecisionContext>, k: usize) -> Result<TowerElement, TowerError> {
    eisenstein(ctx, 0).pow(k)
}

impl FilteredBK {
    /// Builds the module without checking it; see [`FilteredBK::validate`].
    pub fn new(ctx: &Arc<PrecisionContext>, r: usize, a: Matrix, b: Matrix) -> Self {
        FilteredBK { ctx: ctx.clone(), r, a, b }
    }

    /// `A = (1)`, `B = (E)`, `r = 1`.
    pub fn mu_p_infinity(ctx: &Arc<PrecisionContext>) -> Self {
        let one = Matrix::identity(ctx, 0, 1);
        let e = Matrix::scalar(&eisenstein(ctx, 0), 1);
        Self::new(ctx, 1, one, e)
    }

    /// `A = (E)`, `B = (1)`, `r = 1`.
    pub fn qp_zp(ctx: &Arc<PrecisionContext>) -> Self {
        let one = Matrix::identity(ctx, 0, 1);
        let e = Matrix::scalar(&eisenstein(ctx, 0), 1);
        Self::new(ctx, 1, e, one)
    }

    /// The height-0 module with `A = B = I`.
    pub fn trivial(ctx: &Arc<PrecisionContext>, d: usize) -> Self {
        let id = Matrix::identity(ctx, 0, d);
        Self::new(ctx, 0, id.clone(), id)
    }

    pub fn ctx(&self) -> &Arc<PrecisionContext> {
        &self.ctx
    }

    pub fn d(&self) -> usize {
        self.a.rows()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn validate(&self) -> Result<ValidationCertificate, KisinError> {
        let invalid = |s: String| Err(KisinError::InvalidModule(s));
        let d = self.a.rows();
        if d == 0 {
            return invalid("rank 0".into());
        }
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            if m.rows() != d || m.cols() != d {
                return invalid(format!("{name} is {}x{}, expected {d}x{d}", m.rows(), m.cols()));
            }
            if m.level() != 0 {
                return invalid(format!("{name} lives at level {}", m.level()));
            }
            for (k, x) in m.entries().iter().enumerate() {
                if x.tag() != Tag::FrakS || x.check_integral().is_err() {
                    return invalid(format!("{name}[{},{}] is not in 𝔖", k / d, k % d));
                }
            }
        }
        if let Err(e) = self.ctx.check_height(self.r) {
            return invalid(e.to_string());
        }
        let er = Matrix::scalar(&e_power(&self.ctx, self.r)?, d);
        let mut windows = Vec::new();
        for (name, prod) in [("AB", self.a.mul(&self.b)?), ("BA", self.b.mul(&self.a)?)] {
            match prod.compare(&er) {
                Agreement::Agree(w) => windows.push(w),
                Agreement::Differ { degree, valuation, .. } => {
                    return invalid(format!(
                        "{name} != E^{}: differs at u^{degree} with valuation {valuation}",
                        self.r
                    ))
                }
            }
        }
        Ok(ValidationCertificate { ab: windows[0], ba: windows[1] })
    }

    /// `(Fil^r M, E^r φ_{M,r})`: the classical matrix is `B`.
    pub fn filtered_to_classical(&self) -> ClassicalBK {
        ClassicalBK { ctx: self.ctx.clone(), r: self.r, c: self.b.clone() }
    }

    /// Decides `(e) v ∈ Fil^i M` by dividing `B v` by `E^i`.
    pub fn fil_membership(&self, v: &[TowerElement], i: usize) -> Result<Membership, KisinError> {
        if i > self.r {
            return Err(KisinError::InvalidModule(format!("Fil^{i} queried above the height {}", self.r)));
        }
        let bv = self.b.mul_vec(v)?;
        let mut x = Vec::with_capacity(bv.len());
        let mut window = Window::FULL;
        for (coord, y) in bv.iter().enumerate() {
            match weierstrass_divide(y, i)? {
                Division::Quotient { q, window: w } => {
                    window = window.meet(w);
                    x.push(q);
                }
                Division::Reject { digit, .. } => return Ok(Membership::NotMember { coord, digit }),
            }
        }
        Ok(Membership::Member { x, window })
    }

    /// Coordinates of `φ_M((e) v)`, namely `φ(B) φ(v)`.
    pub fn apply_phi_m(&self, v: &[TowerElement]) -> Result<Vec<TowerElement>, KisinError> {
        let pv: Vec<_> = v.iter().map(|x| x.phi()).collect();
        Ok(self.b.phi().mul_vec(&pv)?)
    }
}

impl ClassicalBK {
    pub fn new(ctx: &Arc<PrecisionContext>, r: usize, c: Matrix) -> Self {
        ClassicalBK { ctx: ctx.clone(), r, c }
    }

    pub fn ctx(&self) -> &Arc<PrecisionContext> {
        &self.ctx
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// `(A, B) = (E^r C^{-1}, C)`, with `C^{-1} = adj(C)/det(C)` and
    /// `det(C) = E^s δ` for a unit `δ`.
    pub fn to_filtered(&self) -> Result<FilteredBK, KisinError> {
        let ctx = &self.ctx;
        let r = self.r;
        let det = self.c.det()?.into_frak_s()?;
        let (mut s, mut delta) = (0, det);
        loop {
            if delta.is_exact_zero() {
                return Err(KisinError::HeightExceeded("C is singular".into()));
            }
            match weierstrass_divide(&delta, 1)? {
                Division::Quotient { q, .. } => {
                    delta = q;
                    s += 1;
                }
                Division::Reject { .. } => break,
            }
        }
        let delta_inv = inverse_unit(&delta)
            .map_err(|_| KisinError::HeightExceeded(format!("det C / E^{s} is not a unit")))?;
        let adj = self.c.adjugate()?;
        let adj = if s <= r {
            adj.scale(&e_power(ctx, r - s)?)?
        } else {
            adj.map(|x| match weierstrass_divide(x, s - r)? {
                Division::Quotient { q, .. } => Ok(q),
                Division::Reject { .. } => Err(TowerError::NotInFil {
                    required: s - r,
                    found: bkpd_tower::fil_degree(x)?.degree,
                }),
            })
            .map_err(|e| match e {
                TowerError::NotInFil { .. } => {
                    KisinError::HeightExceeded(format!("E^{r} C^-1 is not integral (det has E^{s})"))
                }
                e => KisinError::Tower(e),
            })?
        };
        let a = adj.scale(&delta_inv)?;
        Ok(FilteredBK::new(ctx, r, a, self.c.clone()))
    }
}

/// Free-function form of [`ClassicalBK::to_filtered`].
pub fn classical_to_filtered(x: &ClassicalBK) -> Result<FilteredBK, KisinError> {
    x.to_filtered()
}

/// Free-function form of [`FilteredBK::filtered_to_classical`].
pub fn filtered_to_classical(m: &FilteredBK) -> ClassicalBK {
    m.filtered_to_classical()
}
