use std::sync::Arc;
use std::time::Instant;

use bkpd_breuil::{base_change, BreuilModule, SVector};
use bkpd_kisin::{random_filtered_with, FilteredBK};
use bkpd_limit::{
    check_compat, descend, filr_generator_chain, generator_chain, recover_filtered, Chain, LimitError,
};
use bkpd_precision::{
    contraction_bound, contraction_sequence, digit_sum, legendre_valuation, PadicCoeff, PrecisionContext,
    SequenceKind,
};
use bkpd_tower::special::{c0, eisenstein, lambda_truncated, lambda_unit};
use bkpd_tower::{
    decompose_key_a, fil_at_least, fil_degree, from_pd_form, pd_canonical_form, weierstrass_divide,
    Division, FilDegree, PDForm, Tag, TowerElement, TowerError, UPrec, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cert::{Case, Certificate, Tolerance, Verdict};
use crate::config::SuiteConfig;
use crate::json::{chain_to_json, element_to_json};
use crate::HarnessError;

/// Independent stream per `(family, index)`: dropping an instance leaves the
/// others unchanged.
pub fn instance_rng(seed: u64, family: u32, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((family as u64) << 32) | index as u64);
    rng
}

fn timed(cfg: &SuiteConfig, f: impl FnOnce() -> Case) -> Case {
    if !cfg.timing {
        return f();
    }
    let start = Instant::now();
    let mut case = f();
    case.millis = Some(start.elapsed().as_millis() as u64);
    case
}

fn worst(cases: &[Case]) -> Verdict {
    cases.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Pass)
}

fn meet_windows(cases: &[Case]) -> Option<Window> {
    cases.iter().filter_map(|c| c.window).reduce(Window::meet)
}

/// Precision ran out rather than an identity failing.
fn is_precision_closure(e: &TowerError) -> bool {
    matches!(e, TowerError::PrecisionExhausted(_) | TowerError::DenominatorOverflow { .. })
}

fn limit_error_case(name: &str, e: &LimitError) -> Case {
    let verdict = match e {
        LimitError::DescentInconclusive(_) => Verdict::Inconclusive,
        LimitError::Tower(t) if is_precision_closure(t) => Verdict::Inconclusive,
        _ => Verdict::Fail,
    };
    Case::new(name, verdict).with_detail(e.to_string())
}

pub fn random_frak_s<R: Rng>(
    ctx: &Arc<PrecisionContext>,
    level: usize,
    deg_bound: usize,
    terms: usize,
    rng: &mut R,
) -> TowerElement {
    let bound = ctx.pow(ctx.digits()) as i64;
    let t = (0..terms)
        .map(|_| (rng.gen_range(0..deg_bound), PadicCoeff::from_int(rng.gen_range(-bound..bound), ctx)))
        .collect();
    TowerElement::from_terms(ctx, level, Tag::FrakS, t, UPrec::Poly)
}

/// `Σ_{lo <= j < hi} a_j γ_j(E)` with random integral `a_j` of degree below `E`.
pub fn random_s<R: Rng>(ctx: &Arc<PrecisionContext>, level: usize, lo: usize, hi: usize, rng: &mut R) -> TowerElement {
    let d = ctx.pd_degree(level);
    let coeffs = (0..hi)
        .map(|j| if j < lo { TowerElement::zero(ctx, level) } else { random_frak_s(ctx, level, d, 2, rng) })
        .collect();
    from_pd_form(ctx, &PDForm::exact(level, coeffs)).expect("integral PD digits give an element of S")
}

fn intersection_case(ctx: &Arc<PrecisionContext>, tol: &Tolerance, rng: &mut ChaCha8Rng) -> Result<Case, TowerError> {
    let level = rng.gen_range(0..=ctx.depth());
    let m = rng.gen_range(0..=3usize);
    let dn = ctx.pd_degree(level);
    let name = format!("Fil^{m} S ∩ 𝔖 = E^{m} 𝔖 at level {level}");
    let y = random_frak_s(ctx, level, dn, 4, rng);
    let x = eisenstein(ctx, level).pow(m)?.mul(&y)?;
    let mut cases = Vec::new();
    cases.push(Case::exact("E^m y in Fil^m", fil_at_least(&x, m)? == Some(true)));
    match weierstrass_divide(&x, m)? {
        Division::Quotient { q, .. } => cases.push(Case::from_agreement("quotient", &q.compare(&y), tol, ctx.cutoff(level))),
        Division::Reject { digit, .. } => cases.push(Case::exact(format!("E^m y rejected at digit {digit}"), false)),
    }
    if m > 0 {
        let t = rng.gen_range(0..dn);
        let c = PadicCoeff::from_int(rng.gen_range(1..ctx.p() as i64), ctx);
        let bumped = x.add(&TowerElement::monomial(ctx, level, t, c))?;
        let in_fil = fil_at_least(&bumped, m)?;
        let divides = matches!(weierstrass_divide(&bumped, m)?, Division::Quotient { .. });
        cases.push(Case::exact("E^m y + c u^t not in Fil^m", in_fil == Some(false) && !divides));
    }
    let mut case = Case::new(name, worst(&cases));
    case.window = meet_windows(&cases);
    if case.verdict != Verdict::Pass {
        let bad: Vec<_> = cases.iter().filter(|c| c.verdict != Verdict::Pass).map(|c| c.name.clone()).collect();
        case = case.with_detail(bad.join("; "));
    }
    Ok(case)
}

fn frobenius_split_case(
    ctx: &Arc<PrecisionContext>,
    tol: &Tolerance,
    level: usize,
    i: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Case, TowerError> {
    let p = ctx.p() as usize;
    let x = random_s(ctx, level, i, i + 3, rng);
    let split = decompose_key_a(&x, i)?;
    let need = p * contraction_bound(p as u64, i as u64) as usize;
    let name = format!("φ(Fil^{i} S_{level}) ⊆ 𝔖 + Fil^{need}");
    if split.w.clone().into_frak_s().is_err() {
        return Ok(Case::exact(name, false).with_detail("w is not integral"));
    }
    let fil = fil_degree(&split.y)?.degree;
    let sum = split.w.add(&split.y)?.compare(&x.frobenius()?);
    let mut case = Case::from_agreement(name, &sum, tol, ctx.cutoff(level - 1)).with_residual(fil);
    if fil.lower_bound() < need {
        case.verdict = match fil {
            FilDegree::Exactly(_) => Verdict::Fail,
            _ => case.verdict.max(Verdict::Inconclusive),
        };
        case = case.with_detail(format!("y has filtration {fil:?}"));
    }
    Ok(case)
}

fn frobenius_hom_case(ctx: &Arc<PrecisionContext>, tol: &Tolerance, rng: &mut ChaCha8Rng) -> Result<Case, TowerError> {
    let level = rng.gen_range(1..=ctx.depth());
    let x = random_s(ctx, level, 0, 4, rng);
    let y = random_s(ctx, level, 0, 4, rng);
    let name = format!("φ(xy) = φ(x)φ(y), φ(S_{level}) ⊆ S_{}", level - 1);
    let lhs = x.mul(&y)?.frobenius()?;
    let rhs = x.frobenius()?.mul(&y.frobenius()?)?;
    let mut case = Case::from_agreement(name, &lhs.compare(&rhs), tol, ctx.cutoff(level - 1));
    if pd_canonical_form(&lhs).is_err() {
        case.verdict = Verdict::Fail;
        case = case.with_detail("φ(xy) is not in S");
    }
    Ok(case)
}

/// `v_p((pn)!/p^n) = v_p(n!)` for `n <= n_max`, with `v_p(k!)` summed
/// directly and compared with Legendre's formula.
pub fn legendre_case(p: u64, n_max: u64) -> Case {
    let top = (p * n_max) as usize;
    let mut fact_val = vec![0u64; top + 1];
    for k in 1..=top {
        let mut m = k as u64;
        let mut v = 0;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
        fact_val[k] = fact_val[k - 1] + v;
    }
    let bad = (1..=n_max).find(|&n| {
        let (n_u, pn) = (n as usize, (p * n) as usize);
        fact_val[pn] - n != fact_val[n_u]
            || fact_val[n_u] != legendre_valuation(n, p)
            || fact_val[n_u] != (n - digit_sum(n, p)) / (p - 1)
    });
    let case = Case::exact(format!("v_p((pn)!/p^n) = v_p(n!) for n <= {n_max}, p = {p}"), bad.is_none());
    match bad {
        Some(n) => case.with_detail(format!("fails at n = {n}")),
        None => case,
    }
}

/// Both contraction sequences strictly increase for every `r < p - 1`.
pub fn contraction_cases(p: u64, n_max: usize) -> Vec<Case> {
    let increasing = |s: &[u64]| s.windows(2).all(|w| w[0] < w[1]);
    let mut cases = Vec::new();
    let frob = contraction_sequence(p, SequenceKind::FrobComp, 0, n_max);
    cases.push(match frob {
        Ok(s) => Case::exact(format!("i_n increasing, p = {p}"), increasing(&s)),
        Err(e) => Case::exact(format!("i_n increasing, p = {p}"), false).with_detail(e.to_string()),
    });
    for r in 0..p - 1 {
        let name = format!("j_n increasing, p = {p}, r = {r}");
        cases.push(match contraction_sequence(p, SequenceKind::KeyB, r, n_max) {
            Ok(s) => Case::exact(name, increasing(&s) && s.len() == n_max),
            Err(e) => Case::exact(name, false).with_detail(e.to_string()),
        });
    }
    cases
}

fn tower_case(name: String, r: Result<Case, TowerError>) -> Case {
    r.unwrap_or_else(|e| {
        let v = if is_precision_closure(&e) { Verdict::Inconclusive } else { Verdict::Fail };
        Case::new(name, v).with_detail(e.to_string())
    })
}

/// Ring identities: `Fil^m S ∩ 𝔖 = E^m 𝔖` on `count` seeded cases, the
/// Frobenius split for every `i <= 2p`, Frobenius as a ring map, the
/// factorial identity and monotone contraction sequences.
pub fn ring_suite(cfg: &SuiteConfig) -> Result<Certificate, HarnessError> {
    let ctx = cfg.context()?;
    let tol = Tolerance::standard(cfg.digits);
    let p = ctx.p() as usize;
    let mut cases: Vec<Case> = (0..cfg.count)
        .into_par_iter()
        .map(|k| {
            timed(cfg, || {
                let mut rng = instance_rng(cfg.seed, 0, k);
                tower_case(format!("intersection {k}"), intersection_case(&ctx, &tol, &mut rng))
            })
        })
        .collect();
    let split_levels = 1..=ctx.depth().min(2);
    let jobs: Vec<(usize, usize)> = split_levels.flat_map(|n| (0..=2 * p).map(move |i| (n, i))).collect();
    cases.par_extend(jobs.par_iter().map(|&(n, i)| {
        timed(cfg, || {
            let mut rng = instance_rng(cfg.seed, 1, n * 1000 + i);
            tower_case(format!("split i = {i} at level {n}"), frobenius_split_case(&ctx, &tol, n, i, &mut rng))
        })
    }));
    if ctx.depth() >= 1 {
        cases.par_extend((0..cfg.count.min(50)).into_par_iter().map(|k| {
            timed(cfg, || {
                let mut rng = instance_rng(cfg.seed, 2, k);
                tower_case(format!("frobenius {k}"), frobenius_hom_case(&ctx, &tol, &mut rng))
            })
        }));
    }
    cases.push(legendre_case(ctx.p(), 10_000));
    cases.extend(contraction_cases(ctx.p(), 20));
    Ok(Certificate::new("ring-suite", cfg, tol, cases))
}

fn draw_height<R: Rng>(cfg: &SuiteConfig, rng: &mut R) -> usize {
    cfg.r.unwrap_or_else(|| rng.gen_range(0..=(cfg.p as usize - 2).min(3)))
}

/// One seeded instance of `recover_filtered ∘ base_change`.
pub fn roundtrip_case(cfg: &SuiteConfig, ctx: &Arc<PrecisionContext>, tol: &Tolerance, index: usize) -> Case {
    let mut rng = instance_rng(cfg.seed, 3, index);
    let d = rng.gen_range(1..=cfg.d.max(1));
    let r = draw_height(cfg, &mut rng);
    let name = format!("instance {index}: d = {d}, r = {r}");
    let m = random_filtered_with(ctx, d, r, &mut rng);
    let module = match base_change(&m) {
        Ok(x) => x,
        Err(e) => return Case::exact(name, false).with_detail(e.to_string()),
    };
    let rec = match recover_filtered(&module, cfg.depth, 2, &mut rng) {
        Ok(x) => x,
        Err(e) => return limit_error_case(&name, &e),
    };
    let checks: Vec<Case> = rec
        .checks
        .iter()
        .map(|c| Case::from_agreement(c.name.clone(), &c.agreement, tol, ctx.base_cutoff()))
        .collect();
    let residual = rec.min_residual();
    let mut case = Case::new(name, worst(&checks)).with_residual(residual);
    case.window = meet_windows(&checks);
    let mut notes: Vec<String> = checks
        .iter()
        .filter(|c| c.verdict != Verdict::Pass)
        .map(|c| format!("{}: {:?}", c.name, c.verdict))
        .collect();
    if residual.lower_bound() < rec.bound {
        case.verdict = Verdict::Fail;
        notes.push(format!("residual {residual:?} below Fil^{}", rec.bound));
    }
    if !notes.is_empty() {
        case = case.with_detail(notes.join("; "));
    }
    case
}

pub fn roundtrip(cfg: &SuiteConfig) -> Result<Certificate, HarnessError> {
    let ctx = cfg.context()?;
    if let Some(r) = cfg.r {
        if r + 1 >= cfg.p as usize {
            return Err(HarnessError::ConfigInvalid(format!("r = {r} must be below p - 1")));
        }
    }
    let tol = Tolerance::standard(cfg.digits);
    let cases: Vec<Case> = (0..cfg.count)
        .into_par_iter()
        .map(|k| timed(cfg, || roundtrip_case(cfg, &ctx, &tol, k)))
        .collect();
    Ok(Certificate::new("roundtrip", cfg, tol, cases))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    MuPInfinity,
    QpZp,
}

impl std::str::FromStr for Example {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mu-p-infinity" => Ok(Example::MuPInfinity),
            "qp-zp" => Ok(Example::QpZp),
            other => Err(HarnessError::ConfigInvalid(format!("unknown example {other:?}"))),
        }
    }
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Example::MuPInfinity => "mu-p-infinity",
            Example::QpZp => "qp-zp",
        }
    }
}

fn compat_cases(chain: &Chain, label: &str, tol: &Tolerance) -> Vec<Case> {
    let ctx = chain.module().ctx();
    match check_compat(chain) {
        Ok(cert) => cert
            .windows
            .iter()
            .enumerate()
            .map(|(n, w)| {
                let name = format!("{label}: φ(ξ_{}) = ξ_{n}", n + 1);
                Case::new(name, tol.judge_window(*w, ctx.cutoff(n))).with_window(*w)
            })
            .collect(),
        Err(e) => vec![limit_error_case(&format!("{label}: compatibility"), &e)],
    }
}

fn descent_case(chain: &Chain, label: &str, expected: &SVector, tol: &Tolerance) -> Case {
    let ctx = chain.module().ctx();
    match descend(chain) {
        Ok(desc) => {
            let mut case = Case::from_agreement(format!("{label}: descent"), &desc.g.compare(expected), tol, ctx.base_cutoff())
                .with_residual(desc.residual);
            if desc.residual.lower_bound() < desc.bound {
                case.verdict = Verdict::Fail;
                case = case.with_detail(format!("residual below Fil^{}", desc.bound));
            }
            case
        }
        Err(e) => limit_error_case(&format!("{label}: descent"), &e),
    }
}

/// `λ = c_0 φ(λ)`. A product of `k` factors is known below `e p^{k+1}`.
fn lambda_case(ctx: &Arc<PrecisionContext>, terms: Option<usize>, tol: &Tolerance) -> Result<Case, TowerError> {
    let lam = match terms {
        None => lambda_unit(ctx)?,
        Some(k) => {
            let raw = lambda_truncated(ctx, k)?;
            let known = ctx.e() * (ctx.p() as usize).pow(k as u32 + 1);
            TowerElement::from_terms(ctx, 0, Tag::S, raw.terms().to_vec(), UPrec::Upto(known))
        }
    };
    let rhs = c0(ctx, 0)?.mul(&lam.phi())?;
    let name = match terms {
        None => "λ = c_0 φ(λ)".to_string(),
        Some(k) => format!("λ = c_0 φ(λ), {k} factors"),
    };
    Ok(Case::from_agreement(name, &lam.compare(&rhs), tol, ctx.base_cutoff()))
}

/// The named rank-one module: validity, its chains to the configured depth,
/// their compatibility and descent, the `Fil^r` generator, the `λ` identity
/// and the recovery of `(A, B)`.
pub fn example(cfg: &SuiteConfig, which: Example) -> Result<Certificate, HarnessError> {
    let ctx = cfg.context()?;
    let tol = Tolerance::standard(cfg.digits);
    let lattice = match which {
        Example::MuPInfinity => FilteredBK::mu_p_infinity(&ctx),
        Example::QpZp => FilteredBK::qp_zp(&ctx),
    };
    let mut cases = Vec::new();
    let module: BreuilModule = match base_change(&lattice) {
        Ok(m) => {
            let w = m.certificate().window();
            cases.push(Case::new("AB = BA = E^r", tol.judge_window(w, ctx.base_cutoff())).with_window(w));
            m
        }
        Err(e) => {
            cases.push(Case::exact("AB = BA = E^r", false).with_detail(e.to_string()));
            return Ok(Certificate::new(which.name(), cfg, tol, cases));
        }
    };
    let depth = cfg.depth;
    let one = SVector::new(vec![TowerElement::one(&ctx, 0)]);
    match generator_chain(&module, 0, depth) {
        Ok(chain) => {
            if which == Example::MuPInfinity {
                let constant = (0..=depth).all(|n| chain.w(n).coords[0] == TowerElement::one(&ctx, n));
                cases.push(Case::exact("generator chain is e ⊗ z_n^{-1}", constant));
            }
            cases.extend(compat_cases(&chain, "generator chain", &tol));
            cases.push(descent_case(&chain, "generator chain", &one, &tol));
        }
        Err(e) => cases.push(limit_error_case("generator chain", &e)),
    }
    match filr_generator_chain(&module, &one, depth) {
        Ok(chain) => {
            let accepted = module.fil_r_membership(chain.w(0)).map(|f| f.is_accept()).unwrap_or(false);
            cases.push(Case::exact("ξ_0 of the Fil^r chain lies in Fil^r", accepted));
            cases.extend(compat_cases(&chain, "Fil^r chain", &tol));
            let target = SVector::new(module.a().col(0));
            cases.push(descent_case(&chain, "Fil^r chain", &target, &tol));
        }
        Err(e) => cases.push(limit_error_case("Fil^r chain", &e)),
    }
    if which == Example::MuPInfinity {
        cases.push(tower_case("λ".into(), lambda_case(&ctx, cfg.lambda_terms, &tol)));
    }
    if depth >= 2 {
        let mut rng = instance_rng(cfg.seed, 4, 0);
        match recover_filtered(&module, depth, 2, &mut rng) {
            Ok(rec) => {
                for c in &rec.checks {
                    cases.push(Case::from_agreement(format!("recover: {}", c.name), &c.agreement, &tol, ctx.base_cutoff()));
                }
            }
            Err(e) => cases.push(limit_error_case("recover", &e)),
        }
    }
    Ok(Certificate::new(which.name(), cfg, tol, cases))
}

/// Compatibility and descent of a chain read from JSON. The recovered
/// vector is attached to the certificate.
pub fn descend_chain(cfg: &SuiteConfig, chain: &Chain) -> Certificate {
    let tol = Tolerance::standard(chain.module().ctx().digits());
    let mut cases = compat_cases(chain, "chain", &tol);
    let mut data = None;
    match descend(chain) {
        Ok(desc) => {
            let w = desc.window;
            let mut case = Case::new("descent", tol.judge_window(w, chain.module().ctx().base_cutoff()))
                .with_window(w)
                .with_residual(desc.residual);
            if desc.residual.lower_bound() < desc.bound {
                case.verdict = Verdict::Fail;
            }
            case = case.with_detail(format!("certified Fil^{}, p-divisibility below u^{}", desc.bound, desc.keyc_degree));
            cases.push(case);
            let g: Vec<_> = desc.g.coords.iter().map(element_to_json).collect();
            data = Some(serde_json::json!({ "g": g, "chain": chain_to_json(chain) }));
        }
        Err(e) => cases.push(limit_error_case("descent", &e)),
    }
    let mut cert = Certificate::new("descend", cfg, tol, cases);
    cert.data = data;
    cert
}

pub fn validate_module(cfg: &SuiteConfig, m: &FilteredBK) -> Certificate {
    let tol = Tolerance::standard(m.ctx().digits());
    let case = match m.validate() {
        Ok(cert) => {
            let w = cert.window();
            Case::new("AB = BA = E^r", tol.judge_window(w, m.ctx().base_cutoff())).with_window(w)
        }
        Err(e) => Case::exact("AB = BA = E^r", false).with_detail(e.to_string()),
    };
    Certificate::new("validate", cfg, tol, vec![case])
}
