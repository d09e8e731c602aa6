//! JSON forms of contexts, elements, modules and chains.
//!
//! A coefficient is the 4-tuple `[degree, valuation, unit, precision]`; a
//! zero known to `O(p^a)` is `[degree, a, 0, 0]`. Output goes through
//! `serde_json::Value`, whose maps keep keys sorted, so equal objects give
//! identical bytes.

use std::sync::Arc;

use bkpd_breuil::{base_change, BreuilModule, SVector};
use bkpd_kisin::FilteredBK;
use bkpd_limit::Chain;
use bkpd_precision::{PadicCoeff, PrecisionContext};
use bkpd_tower::{pd_canonical_form, Matrix, Tag, TowerElement, UPrec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    pub p: u64,
    #[serde(rename = "E")]
    pub eisenstein: Vec<i64>,
    #[serde(rename = "N")]
    pub digits: u32,
    #[serde(rename = "M")]
    pub cutoff: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub level: usize,
    pub tag: Tag,
    /// Known below this u-degree; `None` for an exact polynomial.
    pub uprec: Option<usize>,
    pub terms: Vec<(usize, i32, u64, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub schema: u32,
    pub context: ContextJson,
    pub r: usize,
    /// Rows of `A`.
    pub a: Vec<Vec<ElementJson>>,
    pub b: Vec<Vec<ElementJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainElementJson {
    pub n: usize,
    pub w: Vec<ElementJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub schema: u32,
    pub module: ModuleJson,
    pub depth: usize,
    pub elems: Vec<ChainElementJson>,
}

pub fn context_to_json(ctx: &PrecisionContext) -> ContextJson {
    ContextJson {
        p: ctx.p(),
        eisenstein: ctx.eisenstein().to_vec(),
        digits: ctx.digits(),
        cutoff: ctx.base_cutoff(),
        depth: ctx.depth(),
    }
}

pub fn context_from_json(c: &ContextJson) -> Result<Arc<PrecisionContext>, HarnessError> {
    PrecisionContext::new(c.p, c.eisenstein.clone(), c.digits, c.cutoff, c.depth)
        .map(Arc::new)
        .map_err(|e| HarnessError::ConfigInvalid(e.to_string()))
}

pub fn element_to_json(x: &TowerElement) -> ElementJson {
    let terms = x
        .terms()
        .iter()
        .map(|&(d, c)| match c {
            PadicCoeff::Zero { abs } => (d, abs, 0, 0),
            PadicCoeff::Unit { val, unit, prec } => (d, val, unit, prec),
        })
        .collect();
    let uprec = match x.uprec() {
        UPrec::Poly => None,
        UPrec::Upto(g) => Some(g),
    };
    ElementJson { level: x.level(), tag: x.tag(), uprec, terms }
}

pub fn element_from_json(ctx: &Arc<PrecisionContext>, j: &ElementJson) -> Result<TowerElement, HarnessError> {
    if j.level > ctx.depth() {
        return Err(HarnessError::Parse(format!("level {} exceeds depth {}", j.level, ctx.depth())));
    }
    let terms = j
        .terms
        .iter()
        .map(|&(d, val, unit, prec)| (d, PadicCoeff::from_parts(val, unit, prec, ctx)))
        .collect();
    let uprec = j.uprec.map_or(UPrec::Poly, UPrec::Upto);
    let x = TowerElement::from_terms(ctx, j.level, j.tag, terms, uprec);
    let ok = match j.tag {
        Tag::FrakS => x.check_integral().is_ok(),
        Tag::S => pd_canonical_form(&x).is_ok(),
        Tag::FractionS => true,
    };
    if !ok {
        return Err(HarnessError::Parse(format!("element at level {} is not in {:?}", j.level, j.tag)));
    }
    Ok(x)
}

fn matrix_to_json(m: &Matrix) -> Vec<Vec<ElementJson>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(element_to_json).collect()).collect()
}

fn matrix_from_json(ctx: &Arc<PrecisionContext>, rows: &[Vec<ElementJson>]) -> Result<Matrix, HarnessError> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(HarnessError::Parse("matrix must be square and nonempty".into()));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| element_from_json(ctx, x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows))
}

pub fn module_to_json(m: &FilteredBK) -> ModuleJson {
    ModuleJson {
        schema: SCHEMA,
        context: context_to_json(m.ctx()),
        r: m.r(),
        a: matrix_to_json(m.a()),
        b: matrix_to_json(m.b()),
    }
}

fn check_schema(found: u32) -> Result<(), HarnessError> {
    if found != SCHEMA {
        return Err(HarnessError::SchemaMismatch { expected: SCHEMA, found });
    }
    Ok(())
}

/// The module is rebuilt as given; call `validate` to check it.
pub fn module_from_json(j: &ModuleJson) -> Result<FilteredBK, HarnessError> {
    check_schema(j.schema)?;
    let ctx = context_from_json(&j.context)?;
    let a = matrix_from_json(&ctx, &j.a)?;
    let b = matrix_from_json(&ctx, &j.b)?;
    if a.rows() != b.rows() {
        return Err(HarnessError::Parse("A and B have different sizes".into()));
    }
    Ok(FilteredBK::new(&ctx, j.r, a, b))
}

pub fn chain_to_json(c: &Chain) -> ChainJson {
    ChainJson {
        schema: SCHEMA,
        module: module_to_json(c.module().lattice()),
        depth: c.depth(),
        elems: c
            .elems()
            .iter()
            .map(|e| ChainElementJson { n: e.n, w: e.w.coords.iter().map(element_to_json).collect() })
            .collect(),
    }
}

pub fn chain_from_json(j: &ChainJson) -> Result<Chain, HarnessError> {
    check_schema(j.schema)?;
    let lattice = module_from_json(&j.module)?;
    let module: BreuilModule = base_change(&lattice).map_err(|e| HarnessError::Parse(e.to_string()))?;
    if j.elems.len() != j.depth + 1 {
        return Err(HarnessError::Parse(format!("depth {} needs {} elements", j.depth, j.depth + 1)));
    }
    let ctx = module.ctx().clone();
    let mut elems = Vec::with_capacity(j.elems.len());
    for (n, e) in j.elems.iter().enumerate() {
        if e.n != n {
            return Err(HarnessError::Parse(format!("element {n} is labelled {}", e.n)));
        }
        let coords = e.w.iter().map(|x| element_from_json(&ctx, x)).collect::<Result<Vec<_>, _>>()?;
        if coords.iter().any(|x| x.level() != n) {
            return Err(HarnessError::Parse(format!("element {n} has coordinates at another level")));
        }
        elems.push(SVector::new(coords));
    }
    Chain::new(&module, elems).map_err(|e| HarnessError::Parse(e.to_string()))
}

/// Sorted-key, pretty-printed JSON.
pub fn to_canonical_string<T: Serialize>(x: &T) -> String {
    let v = serde_json::to_value(x).expect("plain data serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("a value serializes");
    s.push('\n');
    s
}

pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T, HarnessError> {
    serde_json::from_str(s).map_err(|e| HarnessError::Parse(e.to_string()))
}
