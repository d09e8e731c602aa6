use bkpd_breuil::{BreuilModule, SVector};
use bkpd_kisin::{FilteredBK, Membership};
use bkpd_tower::special::eisenstein;
use bkpd_tower::{Agreement, FilDegree, Matrix, PadicCoeff, Tag, TowerElement, UPrec, Window};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{filr_generator_chain, generator_chain, Chain};
use crate::descent::{descend, descend_with, Descent};
use crate::LimitError;

/// One identity verified while recovering the module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryCheck {
    pub name: String,
    pub agreement: Agreement,
    /// Residual filtration of the descent behind this check, if any.
    pub residual: Option<FilDegree>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub module: FilteredBK,
    pub checks: Vec<RecoveryCheck>,
    /// `j_depth`.
    pub bound: usize,
}

impl Recovery {
    /// All checks agree; the meet of their windows.
    pub fn window(&self) -> Option<Window> {
        self.checks.iter().try_fold(Window::FULL, |acc, c| match c.agreement {
            Agreement::Agree(w) => Some(acc.meet(w)),
            Agreement::Differ { .. } => None,
        })
    }

    /// Smallest residual filtration over the descents.
    pub fn min_residual(&self) -> FilDegree {
        self.checks
            .iter()
            .filter_map(|c| c.residual)
            .min_by_key(|f| f.lower_bound())
            .unwrap_or(FilDegree::Infinite)
    }
}

fn agree_vec(a: &SVector, b: &SVector) -> Agreement {
    a.compare(b)
}

fn delta(module: &BreuilModule, i: usize) -> SVector {
    let ctx = module.ctx();
    let coords = (0..module.d())
        .map(|k| if k == i { TowerElement::one(ctx, 0) } else { TowerElement::zero(ctx, 0) })
        .collect();
    SVector { level: 0, coords }
}

fn random_frak_s<R: Rng>(module: &BreuilModule, rng: &mut R) -> TowerElement {
    let ctx = module.ctx();
    let bound = ctx.pow(ctx.digits().min(4)) as i64;
    let degree = rng.gen_range(0..=2 * ctx.e() + 1);
    let terms = (0..=degree).map(|k| (k, PadicCoeff::from_int(rng.gen_range(-bound..=bound), ctx))).collect();
    TowerElement::from_terms(ctx, 0, Tag::FrakS, terms, UPrec::Poly)
}

/// Rebuilds the filtered Breuil-Kisin module from chains over `𝓜`:
/// generator chains recover the basis `e_i`, chains through `α_i` recover
/// the columns of `A`, and `E^r e_j ∈ Fil^r` recovers the columns of `B`.
/// `combinations` random `𝔖`-combinations of generator chains are descended
/// and must return their coefficients.
pub fn recover_filtered<R: Rng>(
    module: &BreuilModule,
    depth: usize,
    combinations: usize,
    rng: &mut R,
) -> Result<Recovery, LimitError> {
    if depth < 2 {
        return Err(LimitError::DescentInconclusive(format!("depth {depth} is below 2")));
    }
    let ctx = module.ctx();
    let d = module.d();
    let r = module.r();
    let mut checks = Vec::new();
    let mut bound = 0;
    let mut record = |name: String, agreement: Agreement, desc: Option<&Descent>| {
        checks.push(RecoveryCheck { name, agreement, residual: desc.map(|x| x.residual) });
    };

    let mut generators = Vec::with_capacity(d);
    for i in 0..d {
        let chain = generator_chain(module, i, depth)?;
        let desc = descend(&chain)?;
        bound = desc.bound;
        record(format!("e_{i}"), agree_vec(&desc.g, &delta(module, i)), Some(&desc));
        generators.push(chain);
    }

    let mut a_cols = Vec::with_capacity(d);
    for i in 0..d {
        let chain = filr_generator_chain(module, &delta(module, i), depth)?;
        let accepted = module.fil_r_membership(chain.w(0))?.is_accept();
        let desc = descend(&chain)?;
        let target = SVector { level: 0, coords: module.a().col(i) };
        let mut agreement = agree_vec(&desc.g, &target);
        if !accepted {
            agreement = Agreement::Differ { degree: 0, valuation: 0, window: Window::FULL };
        }
        record(format!("alpha_{i}"), agreement, Some(&desc));
        a_cols.push(desc.g.coords);
    }

    let lattice = module.lattice();
    let er = eisenstein(ctx, 0).pow(r)?;
    let mut b_cols = Vec::with_capacity(d);
    for (j, gen) in generators.iter().enumerate() {
        let chain = gen.act(&er)?;
        let desc = descend(&chain)?;
        match lattice.fil_membership(&desc.g.coords, r).map_err(bkpd_breuil::BreuilError::from)? {
            Membership::Member { x, window } => {
                record(format!("E^r e_{j} in Fil^r"), Agreement::Agree(window), Some(&desc));
                b_cols.push(x);
            }
            Membership::NotMember { .. } => {
                return Err(LimitError::DescentContradiction {
                    level: 0,
                    detail: format!("E^{r} e_{j} is not in Fil^{r}"),
                })
            }
        }
    }

    for c in 0..combinations {
        let coeffs: Vec<TowerElement> = (0..d).map(|_| random_frak_s(module, rng)).collect();
        let mut chain = Chain::zero(module, depth)?;
        for (g, gen) in coeffs.iter().zip(&generators) {
            chain = chain.add(&gen.act(g)?)?;
        }
        let desc = descend_with(&chain, Some(bound))?;
        let target = SVector { level: 0, coords: coeffs };
        record(format!("combination {c}"), agree_vec(&desc.g, &target), Some(&desc));
    }

    let a = Matrix::from_fn(d, d, |i, j| a_cols[j][i].clone());
    let b = Matrix::from_fn(d, d, |i, j| b_cols[j][i].clone());
    let recovered = FilteredBK::new(ctx, r, a, b);
    let valid = match recovered.validate() {
        Ok(cert) => Agreement::Agree(cert.window()),
        Err(_) => Agreement::Differ { degree: 0, valuation: 0, window: Window::FULL },
    };
    record("AB = BA = E^r".into(), valid, None);
    record("A recovered".into(), recovered.a().compare(module.a()), None);
    record("B recovered".into(), recovered.b().compare(module.b()), None);
    Ok(Recovery { module: recovered, checks, bound })
}
