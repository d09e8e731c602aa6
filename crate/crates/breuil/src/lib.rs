//! Quasi-Breuil modules `𝓜 = ⊕ S e_i` with `Fil^r 𝓜 = ⊕ S α_i + Fil^p 𝓜`,
//! obtained from a filtered Breuil-Kisin module by base change to `S`.

use std::sync::Arc;

use bkpd_kisin::{FilteredBK, KisinError, ValidationCertificate};
use bkpd_tower::special::{c0, eisenstein};
use bkpd_tower::{
    decompose_frak_s_fil, pd_canonical_form, weierstrass_divide, Division, Matrix, PrecisionContext,
    Tag, TowerElement, TowerError, Window,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BreuilError {
    #[error("vector is not in Fil^{required}: coordinate {coord} fails at E-adic digit {digit}")]
    NotInFil { required: usize, coord: usize, digit: usize },
    #[error("vector has {found} coordinates, the module has rank {rank}")]
    Rank { rank: usize, found: usize },
    #[error(transparent)]
    Kisin(#[from] KisinError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Coordinates of `m = (e) v` in `𝓜 ⊗_S S_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SVector {
    pub level: usize,
    pub coords: Vec<TowerElement>,
}

impl SVector {
    pub fn new(coords: Vec<TowerElement>) -> Self {
        let level = coords.first().map_or(0, |x| x.level());
        assert!(coords.iter().all(|x| x.level() == level), "coordinates at different levels");
        SVector { level, coords }
    }

    pub fn zero(ctx: &Arc<PrecisionContext>, level: usize, d: usize) -> Self {
        SVector { level, coords: vec![TowerElement::zero(ctx, level); d] }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &SVector) -> Result<SVector, TowerError> {
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect::<Result<_, _>>()?;
        Ok(SVector { level: self.level, coords })
    }

    pub fn sub(&self, other: &SVector) -> Result<SVector, TowerError> {
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.sub(b)).collect::<Result<_, _>>()?;
        Ok(SVector { level: self.level, coords })
    }

    pub fn scale(&self, s: &TowerElement) -> Result<SVector, TowerError> {
        let coords = self.coords.iter().map(|a| s.mul(a)).collect::<Result<_, _>>()?;
        Ok(SVector { level: self.level, coords })
    }

    pub fn map(&self, f: impl Fn(&TowerElement) -> Result<TowerElement, TowerError>) -> Result<SVector, TowerError> {
        let coords = self.coords.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        let level = coords.first().map_or(self.level, |x| x.level());
        Ok(SVector { level, coords })
    }

    /// Coordinatewise comparison; the first disagreement wins.
    pub fn compare(&self, other: &SVector) -> bkpd_tower::Agreement {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(Default::default(), |acc: bkpd_tower::Agreement, (a, b)| acc.meet(a.compare(b)))
    }
}

/// Retags a computed element as lying in `S_n`, checking its divided-power
/// coefficients.
pub fn into_s(x: TowerElement) -> Result<TowerElement, TowerError> {
    match x.tag() {
        Tag::FrakS | Tag::S => Ok(x),
        Tag::FractionS => {
            if x.check_integral().is_ok() {
                return Ok(x.with_tag_unchecked(Tag::FrakS));
            }
            let x = x.with_tag_unchecked(Tag::S);
            pd_canonical_form(&x)?;
            Ok(x)
        }
    }
}

/// `v = A x + y` with `x ∈ 𝔖_n^d` and `y ∈ (Fil^p S_n)^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum FilR {
    Accept { x: SVector, y: SVector, window: Window },
    /// Coordinate `coord` of `B w` is not divisible by `E^{digit+1}`, where
    /// `w` is the `𝔖`-part of `v`.
    Reject { coord: usize, digit: usize },
}

impl FilR {
    pub fn is_accept(&self) -> bool {
        matches!(self, FilR::Accept { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMode {
    /// `φ_𝓜`.
    Phi,
    /// `φ_{𝓜,r} = p^{-r} φ_𝓜` on `Fil^r 𝓜`.
    PhiR,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreuilModule {
    inner: FilteredBK,
    certificate: ValidationCertificate,
}

/// `S ⊗_𝔖 M` with the same `(A, B)`.
pub fn base_change(m: &FilteredBK) -> Result<BreuilModule, BreuilError> {
    let certificate = m.validate()?;
    Ok(BreuilModule { inner: m.clone(), certificate })
}

impl BreuilModule {
    pub fn ctx(&self) -> &Arc<PrecisionContext> {
        self.inner.ctx()
    }

    pub fn d(&self) -> usize {
        self.inner.d()
    }

    pub fn r(&self) -> usize {
        self.inner.r()
    }

    pub fn a(&self) -> &Matrix {
        self.inner.a()
    }

    pub fn b(&self) -> &Matrix {
        self.inner.b()
    }

    /// The `𝔖`-module this was base-changed from.
    pub fn lattice(&self) -> &FilteredBK {
        &self.inner
    }

    pub fn certificate(&self) -> ValidationCertificate {
        self.certificate
    }

    pub fn a_at(&self, level: usize) -> Result<Matrix, TowerError> {
        self.a().include_to(level)
    }

    pub fn b_at(&self, level: usize) -> Result<Matrix, TowerError> {
        self.b().include_to(level)
    }

    /// `φ(B)` written at `level`.
    pub fn phi_b_at(&self, level: usize) -> Result<Matrix, TowerError> {
        self.b().phi().include_to(level)
    }

    fn check_rank(&self, v: &SVector) -> Result<(), BreuilError> {
        if v.len() != self.d() {
            return Err(BreuilError::Rank { rank: self.d(), found: v.len() });
        }
        Ok(())
    }

    /// Decides `(e) v ∈ Fil^r 𝓜`. Writing `v = w + y` with `w` the part of
    /// divided-power degree `< p`, `v ∈ Fil^r` exactly when `E^r | B w` in
    /// `𝔖_n`, and then `x = B w / E^r`.
    pub fn fil_r_membership(&self, v: &SVector) -> Result<FilR, BreuilError> {
        self.check_rank(v)?;
        let level = v.level;
        let mut w = Vec::with_capacity(v.len());
        let mut y = Vec::with_capacity(v.len());
        for c in &v.coords {
            let (lo, hi) = decompose_frak_s_fil(c)?;
            w.push(lo);
            y.push(hi);
        }
        let bw = self.b_at(level)?.mul_vec(&w)?;
        let mut x = Vec::with_capacity(bw.len());
        let mut window = Window::FULL;
        for (coord, t) in bw.iter().enumerate() {
            match weierstrass_divide(t, self.r())? {
                Division::Quotient { q, window: wq } => {
                    window = window.meet(wq);
                    x.push(q);
                }
                Division::Reject { digit, .. } => return Ok(FilR::Reject { coord, digit }),
            }
        }
        Ok(FilR::Accept { x: SVector { level, coords: x }, y: SVector { level, coords: y }, window })
    }

    /// `(e) v ∈ Fil^i 𝓜` iff `E^{r-i} v ∈ Fil^r 𝓜`.
    pub fn fil_i_membership(&self, v: &SVector, i: usize) -> Result<FilR, BreuilError> {
        if i > self.r() {
            return Err(BreuilError::Kisin(KisinError::InvalidModule(format!(
                "Fil^{i} queried above the height {}",
                self.r()
            ))));
        }
        let e = eisenstein(self.ctx(), v.level).pow(self.r() - i)?;
        self.fil_r_membership(&v.scale(&e)?)
    }

    pub fn apply_phi(&self, v: &SVector, mode: PhiMode) -> Result<SVector, BreuilError> {
        self.check_rank(v)?;
        let level = v.level;
        let phi_b = self.phi_b_at(level)?;
        match mode {
            PhiMode::Phi => {
                let pv: Vec<_> = v.coords.iter().map(|c| c.phi()).collect();
                Ok(SVector { level, coords: phi_b.mul_vec(&pv)? })
            }
            PhiMode::PhiR => {
                let (x, y) = match self.fil_r_membership(v)? {
                    FilR::Accept { x, y, .. } => (x, y),
                    FilR::Reject { coord, digit } => {
                        return Err(BreuilError::NotInFil { required: self.r(), coord, digit })
                    }
                };
                let r = self.r();
                let c0r = c0(self.ctx(), level)?.pow(r)?;
                let py: Vec<_> = y.coords.iter().map(|c| c.phi()).collect();
                let tail = phi_b.mul_vec(&py)?;
                let mut out = Vec::with_capacity(x.len());
                for (xi, ti) in x.coords.iter().zip(&tail) {
                    let s = c0r.mul(&xi.phi())?.add(&ti.shift_p(-(r as i32))?)?;
                    out.push(into_s(s)?);
                }
                Ok(SVector { level, coords: out })
            }
        }
    }
}
