use bkpd_breuil::{into_s, BreuilModule, SVector};
use bkpd_tower::special::phi_eisenstein;
use bkpd_tower::{divide_by_monic, Agreement, Tag, TowerElement, TowerError, Window};
use serde::{Deserialize, Serialize};

use crate::LimitError;

/// `ξ_n = z_n^{-r} (e) w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainElement {
    pub n: usize,
    pub w: SVector,
}

/// `ξ_0, …, ξ_depth` over a fixed module.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    module: BreuilModule,
    elems: Vec<ChainElement>,
}

impl Chain {
    /// `elems[n]` must sit at level `n`.
    pub fn new(module: &BreuilModule, elems: Vec<SVector>) -> Result<Self, LimitError> {
        let depth = module.ctx().depth();
        if elems.is_empty() {
            return Err(LimitError::DescentInconclusive("empty chain".into()));
        }
        if elems.len() > depth + 1 {
            return Err(LimitError::DepthExceeded { level: elems.len() - 1, depth });
        }
        let mut out = Vec::with_capacity(elems.len());
        for (n, w) in elems.into_iter().enumerate() {
            if w.level != n {
                return Err(TowerError::LevelMismatch(w.level, n).into());
            }
            if w.len() != module.d() {
                return Err(LimitError::Breuil(bkpd_breuil::BreuilError::Rank { rank: module.d(), found: w.len() }));
            }
            out.push(ChainElement { n, w });
        }
        Ok(Chain { module: module.clone(), elems: out })
    }

    pub fn zero(module: &BreuilModule, depth: usize) -> Result<Self, LimitError> {
        let elems = (0..=depth).map(|n| SVector::zero(module.ctx(), n, module.d())).collect();
        Self::new(module, elems)
    }

    pub fn module(&self) -> &BreuilModule {
        &self.module
    }

    pub fn depth(&self) -> usize {
        self.elems.len() - 1
    }

    pub fn elems(&self) -> &[ChainElement] {
        &self.elems
    }

    pub fn w(&self, n: usize) -> &SVector {
        &self.elems[n].w
    }

    /// `g · {ξ_n} = {g^{σ^{-n}}(u_n) ξ_n}` for `g ∈ 𝔖`.
    pub fn act(&self, g: &TowerElement) -> Result<Chain, LimitError> {
        let mut gn = g.clone();
        let mut elems = Vec::with_capacity(self.elems.len());
        for el in &self.elems {
            if el.n > 0 {
                gn = gn.frobenius_inverse_frak_s()?;
            }
            elems.push(el.w.scale(&gn)?);
        }
        Chain::new(&self.module, elems)
    }

    pub fn add(&self, other: &Chain) -> Result<Chain, LimitError> {
        let elems = self
            .elems
            .iter()
            .zip(&other.elems)
            .map(|(a, b)| a.w.add(&b.w))
            .collect::<Result<Vec<_>, _>>()?;
        Chain::new(&self.module, elems)
    }

    /// Replaces the element at level `n`.
    pub fn with_element(&self, n: usize, w: SVector) -> Result<Chain, LimitError> {
        let mut elems: Vec<_> = self.elems.iter().map(|e| e.w.clone()).collect();
        elems[n] = w;
        Chain::new(&self.module, elems)
    }
}

fn preimage(x: &TowerElement, level: usize) -> Result<TowerElement, LimitError> {
    let no_ext = |source| LimitError::NoExtension { level, source };
    match x.tag() {
        Tag::FrakS => Ok(x.frobenius_inverse_frak_s()?),
        _ => {
            let y = x.frobenius_preimage().map_err(|e| match e {
                TowerError::DepthExceeded { level, depth } => LimitError::DepthExceeded { level, depth },
                e => no_ext(e),
            })?;
            into_s(y).map_err(no_ext)
        }
    }
}

/// The unique `ξ'` at level `n+1` with `(φ_𝓜 ⊗ φ)(ξ') = ξ`: in
/// `e`-coordinates `w' = A φ^{-1}(w)`.
pub fn lift(module: &BreuilModule, w: &SVector) -> Result<SVector, LimitError> {
    let level = w.level + 1;
    let depth = module.ctx().depth();
    if level > depth {
        return Err(LimitError::DepthExceeded { level, depth });
    }
    let t = w.coords.iter().map(|c| preimage(c, level)).collect::<Result<Vec<_>, _>>()?;
    Ok(SVector { level, coords: module.a_at(level)?.mul_vec(&t)? })
}

/// `(φ_𝓜 ⊗ φ)` from level `n+1` to level `n`: `w ↦ φ(B) φ(w) / φ(E)^r`.
pub fn frobenius_down(module: &BreuilModule, w: &SVector) -> Result<SVector, LimitError> {
    if w.level == 0 {
        return Err(TowerError::BottomLevel.into());
    }
    let level = w.level - 1;
    let ctx = module.ctx();
    let fw = w.coords.iter().map(|c| c.frobenius()).collect::<Result<Vec<_>, _>>()?;
    let num = module.phi_b_at(level)?.mul_vec(&fw)?;
    let den = phi_eisenstein(ctx, level).pow(module.r())?;
    let mut out = Vec::with_capacity(num.len());
    for x in &num {
        let (q, rem) = divide_by_monic(x, &den)?;
        let residual = rem.is_zero_within();
        if !residual.is_agree() {
            return Err(LimitError::Incompatible { level: w.level, residual });
        }
        out.push(q);
    }
    Ok(SVector { level, coords: out })
}

/// The chain through `(e) g` for `g` over `𝔖`, obtained by lifting.
pub fn chain_from_vector(module: &BreuilModule, g: &SVector, depth: usize) -> Result<Chain, LimitError> {
    let ctx_depth = module.ctx().depth();
    if depth > ctx_depth {
        return Err(LimitError::DepthExceeded { level: depth, depth: ctx_depth });
    }
    let mut elems = vec![g.clone()];
    for _ in 0..depth {
        let next = lift(module, elems.last().unwrap())?;
        elems.push(next);
    }
    Chain::new(module, elems)
}

/// The chain `ξ_{i,n} = z_n^{-r} (e) A φ^{-1}(A) ⋯ φ^{1-n}(A) δ_i` through
/// `e_i` (zero-based `i`).
pub fn generator_chain(module: &BreuilModule, i: usize, depth: usize) -> Result<Chain, LimitError> {
    let ctx = module.ctx();
    let coords = (0..module.d())
        .map(|k| if k == i { TowerElement::one(ctx, 0) } else { TowerElement::zero(ctx, 0) })
        .collect();
    chain_from_vector(module, &SVector { level: 0, coords }, depth)
}

/// The chain through `(α) x = (e) A x`, an element of `Fil^r`.
pub fn filr_generator_chain(module: &BreuilModule, x: &SVector, depth: usize) -> Result<Chain, LimitError> {
    let ax = SVector { level: 0, coords: module.a().mul_vec(&x.coords)? };
    chain_from_vector(module, &ax, depth)
}

/// Windows on which `φ(E)^r w_n = φ(B) φ(w_{n+1})` holds, indexed by `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatCertificate {
    pub windows: Vec<Window>,
}

impl CompatCertificate {
    pub fn window(&self) -> Window {
        self.windows.iter().fold(Window::FULL, |acc, w| acc.meet(*w))
    }
}

pub fn check_compat(chain: &Chain) -> Result<CompatCertificate, LimitError> {
    let module = chain.module();
    let ctx = module.ctx();
    let mut windows = Vec::with_capacity(chain.depth());
    for n in 0..chain.depth() {
        let per = phi_eisenstein(ctx, n).pow(module.r())?;
        let upper = chain.w(n + 1);
        let fw = upper.coords.iter().map(|c| c.frobenius()).collect::<Result<Vec<_>, _>>()?;
        let rhs = module.phi_b_at(n)?.mul_vec(&fw)?;
        let mut agreement = Agreement::default();
        for (x, y) in chain.w(n).coords.iter().zip(&rhs) {
            agreement = agreement.meet(per.mul(x)?.compare(y));
        }
        match agreement {
            Agreement::Agree(w) => windows.push(w),
            residual => return Err(LimitError::Incompatible { level: n + 1, residual }),
        }
    }
    Ok(CompatCertificate { windows })
}
