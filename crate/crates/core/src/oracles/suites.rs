//! Randomized desk-scale runs of the cone and sum theorems. Both sides of
//! each predicted equality are estimated by the distance engine; when the
//! left side comes out larger, the witness of the right side is lifted to an
//! explicit chain for the left side, which separates non-convergence from a
//! genuine violation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::random_symmetric_polygon;
use crate::bmd::{estimate_distance, verify_chain, DistanceConfig, DistanceEstimate};
use crate::constructions::equilateral::{d_n, equilateral_family};
use crate::constructions::{cone, cross_polytope, double_cone, simplex_regular_centered};
use crate::error::{Error, Result};
use crate::geometry::{BodyExpr, LinearMap, Matrix, Vector};

pub const SUITES: [&str; 7] = [
    "thm-l1-sum",
    "thm-simplex",
    "thm-3d-cones",
    "thm-sym-cones",
    "cor-embedding",
    "cor-equilateral",
    "question-l1-search",
];

/// Slack added to the right side when replaying a lifted witness chain.
const CHAIN_SLACK: f64 = 1e-6;
const CHAIN_TOL: f64 = 1e-9;
/// Resampling budget for instances violating a theorem's hypothesis.
const HYPOTHESIS_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub cases: usize,
    pub seed: u64,
    pub tol: f64,
    pub restarts: usize,
    /// Number of apexes / `ℓ₁` summands added to the planar bases.
    pub m: usize,
    /// `N` of the equilateral family.
    pub equilateral_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { cases: 10, seed: 0, tol: 0.03, restarts: 200, m: 1, equilateral_n: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
    /// Whether the theorem's hypothesis held for the instance.
    pub hypothesis: bool,
    /// Outcome of the lifted witness chain, when it was checked.
    pub chain: Option<bool>,
}

impl CaseResult {
    fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "pass": self.pass,
            "hypothesis": self.hypothesis,
            "chain": self.chain,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    pub summary: Value,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "cases": self.cases.iter().map(CaseResult::to_json).collect::<Vec<_>>(),
            "summary": self.summary,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.residual.abs()).fold(0.0, f64::max)
    }
}

fn unit(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

/// Random convex polygon (not necessarily symmetric) with 3 to 6 vertices.
fn random_polygon<R: Rng>(rng: &mut R) -> BodyExpr {
    loop {
        let k = rng.random_range(3..=6);
        let pts: Vec<Vector> = (0..k)
            .map(|_| {
                let a = rng.random_range(0.0..2.0 * PI);
                let r = rng.random_range(0.5..=1.0);
                Vector::from_vec(vec![r * a.cos(), r * a.sin()])
            })
            .collect();
        if let Ok(b) = BodyExpr::polytope(&pts) {
            if b.as_polytope().is_some_and(|p| p.is_full_dimensional()) {
                return b;
            }
        }
    }
}

/// Apexes `(a_j, e_j)` over the plane, with `a_j` uniform in `[-r, r]²`.
fn random_apexes<R: Rng>(rng: &mut R, m: usize, r: f64) -> Vec<Vector> {
    (0..m)
        .map(|j| {
            let mut a = unit(2 + m, 2 + j);
            if r > 0.0 {
                a[0] = rng.random_range(-r..=r);
                a[1] = rng.random_range(-r..=r);
            }
            a
        })
        .collect()
}

fn standard_apexes(m: usize) -> Vec<Vector> {
    (0..m).map(|j| unit(2 + m, 2 + j)).collect()
}

/// `x ↦ diag(M, I)(x + pre) + post` for a planar symmetric witness.
fn lift_block(w: &LinearMap, m: usize) -> Result<LinearMap> {
    let n = 2 + m;
    let mut mat = Matrix::identity(n, n);
    mat.view_mut((0, 0), (2, 2)).copy_from(w.matrix());
    let pad = |v: &Vector| Vector::from_fn(n, |i, _| if i < 2 { v[i] } else { 0.0 });
    LinearMap::with_translations(mat, pad(&w.pre), pad(&w.post))
}

/// Matrix sending `e_{2+j}` to the apex `a_j` and fixing the plane.
fn apex_frame(apexes: &[Vector]) -> Matrix {
    let n = 2 + apexes.len();
    let mut a = Matrix::identity(n, n);
    for (j, ap) in apexes.iter().enumerate() {
        a.set_column(2 + j, ap);
    }
    a
}

/// Lifts a planar witness `B₁ ⊆ W(B₂) ⊆ c + ρ(B₁ − c)` to the cones
/// `conv(B₁ ∪ {aₖ})` and `conv(B₂ ∪ {bₖ})` by sending each `bₖ` to `aₖ`.
fn lift_cone(w: &LinearMap, k_apexes: &[Vector], l_apexes: &[Vector]) -> Result<LinearMap> {
    let m = k_apexes.len();
    let n = 2 + m;
    let c = &w.post;
    // the apex column cancels both translations of W
    let shift = -(w.matrix() * &w.pre) - c;
    let mut m3 = Matrix::identity(n, n);
    m3.view_mut((0, 0), (2, 2)).copy_from(w.matrix());
    for j in 0..m {
        m3[(0, 2 + j)] = shift[0];
        m3[(1, 2 + j)] = shift[1];
    }
    let al_inv = apex_frame(l_apexes).try_inverse().ok_or(Error::SingularMap)?;
    let mat = apex_frame(k_apexes) * m3 * al_inv;
    let pad = |v: &Vector| Vector::from_fn(n, |i, _| if i < 2 { v[i] } else { 0.0 });
    LinearMap::with_translations(mat, pad(&w.pre), pad(c))
}

fn estimate(k: &BodyExpr, l: &BodyExpr, cfg: &SuiteConfig, seed: u64) -> Result<DistanceEstimate> {
    let dc = DistanceConfig {
        restarts: cfg.restarts,
        seed,
        symmetric: k.is_symmetric() && l.is_symmetric(),
        ..DistanceConfig::default()
    };
    estimate_distance(k, l, &dc)
}

/// Equality case: both sides estimated and the lifted chain of the right
/// side replayed; the chain decides when `lhs > rhs + tol`.
fn equality_case(
    seed: u64,
    lhs: f64,
    rhs: f64,
    tol: f64,
    hypothesis: bool,
    chain: impl FnOnce() -> Result<bool>,
) -> Result<CaseResult> {
    let residual = lhs - rhs;
    if !hypothesis {
        return Ok(CaseResult { seed, lhs, rhs, residual, pass: true, hypothesis, chain: None });
    }
    let ok = chain()?;
    let pass = residual.abs() <= tol || (residual > tol && ok);
    Ok(CaseResult { seed, lhs, rhs, residual, pass, hypothesis, chain: Some(ok) })
}

fn case_l1_sum(cfg: &SuiteConfig, seed: u64) -> Result<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_symmetric_polygon(&mut rng);
    let m = cfg.m;
    let sum = double_cone(&x, &standard_apexes(m))?;
    let target = cross_polytope(2 + m)?;
    let rhs_est = estimate(&x, &cross_polytope(2)?, cfg, seed)?;
    let lhs_est = estimate(&sum, &target, cfg, seed)?;
    let hypothesis = rhs_est.upper <= 3.0;
    equality_case(seed, lhs_est.upper, rhs_est.upper, cfg.tol, hypothesis, || {
        let w = lift_block(&rhs_est.witness, m)?;
        verify_chain(&sum, &target, &w, rhs_est.upper + CHAIN_SLACK, CHAIN_TOL)
    })
}

fn case_simplex(cfg: &SuiteConfig, seed: u64) -> Result<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cfg.m;
    let tri = simplex_regular_centered(2)?;
    let mut b = random_polygon(&mut rng);
    let mut rhs_est = estimate(&b, &tri, cfg, seed)?;
    let mut attempts = 1;
    while rhs_est.upper > 2.0 + 1e-6 && attempts < HYPOTHESIS_ATTEMPTS {
        b = random_polygon(&mut rng);
        rhs_est = estimate(&b, &tri, cfg, seed)?;
        attempts += 1;
    }
    let hypothesis = rhs_est.upper <= 2.0 + 1e-6;
    let apexes = random_apexes(&mut rng, m, 0.5);
    let c = cone(&b, &apexes)?;
    let lhs_est = estimate(&c, &simplex_regular_centered(2 + m)?, cfg, seed)?;
    equality_case(seed, lhs_est.upper, rhs_est.upper, cfg.tol, hypothesis, || {
        let lifted_simplex = cone(&tri, &standard_apexes(m))?;
        let w = lift_cone(&rhs_est.witness, &apexes, &standard_apexes(m))?;
        verify_chain(&c, &lifted_simplex, &w, rhs_est.upper + CHAIN_SLACK, CHAIN_TOL)
    })
}

fn case_cones(cfg: &SuiteConfig, seed: u64, random_apex: bool) -> Result<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b1 = random_symmetric_polygon(&mut rng);
    let b2 = random_symmetric_polygon(&mut rng);
    let r = if random_apex { 0.5 } else { 0.0 };
    let (a1, a2) = (random_apexes(&mut rng, 1, r), random_apexes(&mut rng, 1, r));
    let (c1, c2) = (cone(&b1, &a1)?, cone(&b2, &a2)?);
    let rhs_est = estimate(&b1, &b2, cfg, seed)?;
    let lhs_est = estimate(&c1, &c2, cfg, seed)?;
    equality_case(seed, lhs_est.upper, rhs_est.upper, cfg.tol, true, || {
        let w = lift_cone(&rhs_est.witness, &a1, &a2)?;
        verify_chain(&c1, &c2, &w, rhs_est.upper + CHAIN_SLACK, CHAIN_TOL)
    })
}

fn sym_cones_pair(x1: &BodyExpr, x2: &BodyExpr, cfg: &SuiteConfig, seed: u64, hypothesis: bool) -> Result<CaseResult> {
    let m = cfg.m;
    let (s1, s2) = (double_cone(x1, &standard_apexes(m))?, double_cone(x2, &standard_apexes(m))?);
    let rhs_est = estimate(x1, x2, cfg, seed)?;
    let lhs_est = estimate(&s1, &s2, cfg, seed)?;
    equality_case(seed, lhs_est.upper, rhs_est.upper, cfg.tol, hypothesis, || {
        let w = lift_block(&rhs_est.witness, m)?;
        verify_chain(&s1, &s2, &w, rhs_est.upper + CHAIN_SLACK, CHAIN_TOL)
    })
}

fn case_sym_cones(cfg: &SuiteConfig, seed: u64) -> Result<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l1 = cross_polytope(2)?;
    let mut hypothesis = false;
    let (mut x1, mut x2) = (random_symmetric_polygon(&mut rng), random_symmetric_polygon(&mut rng));
    for attempt in 0..HYPOTHESIS_ATTEMPTS {
        if attempt > 0 {
            x1 = random_symmetric_polygon(&mut rng);
            x2 = random_symmetric_polygon(&mut rng);
        }
        let d12 = estimate(&x1, &x2, cfg, seed)?.upper;
        let d1 = estimate(&x1, &l1, cfg, seed)?.upper;
        let d2 = estimate(&x2, &l1, cfg, seed)?.upper;
        if d1.max(d2) >= d12 - 1e-6 {
            hypothesis = true;
            break;
        }
    }
    sym_cones_pair(&x1, &x2, cfg, seed, hypothesis)
}

fn case_question(cfg: &SuiteConfig, seed: u64) -> Result<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x1, x2) = (random_symmetric_polygon(&mut rng), random_symmetric_polygon(&mut rng));
    let l1 = cross_polytope(2)?;
    let d12 = estimate(&x1, &x2, cfg, seed)?.upper;
    let d1 = estimate(&x1, &l1, cfg, seed)?.upper;
    let d2 = estimate(&x2, &l1, cfg, seed)?.upper;
    let bound = d1.max(d2);
    let margin = d12 - bound;
    Ok(CaseResult { seed, lhs: d12, rhs: bound, residual: margin, pass: margin <= cfg.tol, hypothesis: true, chain: None })
}

fn summarize(cases: &[CaseResult], extra: Value) -> Value {
    let passed = cases.iter().filter(|c| c.pass).count();
    let mut s = json!({
        "cases": cases.len(),
        "passed": passed,
        "failed": cases.len() - passed,
        "hypothesis_failures": cases.iter().filter(|c| !c.hypothesis).count(),
        "max_abs_residual": cases.iter().map(|c| c.residual.abs()).fold(0.0, f64::max),
    });
    if let (Value::Object(a), Value::Object(b)) = (&mut s, extra) {
        a.extend(b);
    }
    s
}

fn run_seeded(cfg: &SuiteConfig, f: impl Fn(&SuiteConfig, u64) -> Result<CaseResult> + Sync) -> Result<Vec<CaseResult>> {
    let mut cases: Vec<CaseResult> = (0..cfg.cases as u64)
        .into_par_iter()
        .map(|i| f(cfg, cfg.seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    cases.sort_by_key(|c| c.seed);
    Ok(cases)
}

/// Runs one of the named suites.
pub fn theorem_suite(name: &str, cfg: &SuiteConfig) -> Result<Report> {
    if !SUITES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    if cfg.restarts == 0 || cfg.m == 0 {
        return Err(Error::InvalidInput("restarts and m must be positive".into()));
    }
    if cfg.m > 1 && matches!(name, "thm-3d-cones" | "cor-embedding") {
        return Err(Error::InvalidInput(format!("suite {name} is three-dimensional; m must be 1")));
    }
    let (cases, extra) = match name {
        "thm-l1-sum" => (run_seeded(cfg, case_l1_sum)?, json!({})),
        "thm-simplex" => (run_seeded(cfg, case_simplex)?, json!({})),
        "thm-3d-cones" => (run_seeded(cfg, |c, s| case_cones(c, s, true))?, json!({})),
        "cor-embedding" => (run_seeded(cfg, |c, s| case_cones(c, s, false))?, json!({})),
        "thm-sym-cones" => (run_seeded(cfg, case_sym_cones)?, json!({})),
        "cor-equilateral" => equilateral_cases(cfg)?,
        _ => {
            let cases = run_seeded(cfg, case_question)?;
            let best = cases.iter().map(|c| c.residual).fold(f64::NEG_INFINITY, f64::max);
            let violations = cases.iter().filter(|c| c.residual > cfg.tol).count();
            (cases, json!({ "best_margin": best, "violations": violations }))
        }
    };
    Ok(Report { suite: name.to_string(), summary: summarize(&cases, extra), cases })
}

/// All pairs of the equilateral family, planar and lifted by `⊕₁ ℓ₁^m`.
/// `cfg.cases` is the family size.
fn equilateral_cases(cfg: &SuiteConfig) -> Result<(Vec<CaseResult>, Value)> {
    let family = equilateral_family(cfg.equilateral_n, cfg.cases)?;
    let pairs: Vec<(usize, usize)> = (0..family.len()).flat_map(|i| (i + 1..family.len()).map(move |j| (i, j))).collect();
    let mut cases: Vec<CaseResult> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j))| sym_cones_pair(&family[i], &family[j], cfg, cfg.seed.wrapping_add(k as u64), true))
        .collect::<Result<_>>()?;
    cases.sort_by_key(|c| c.seed);
    let planar: Vec<f64> = cases.iter().map(|c| c.rhs).collect();
    let lo = planar.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = planar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let target = d_n(cfg.equilateral_n).powi(2);
    Ok((cases, json!({ "planar_spread": hi - lo, "planar_min": lo, "planar_max": hi, "target": target })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmd::position_ratio;
    use crate::constructions::regular_polygon;

    #[test]
    fn unknown_suite() {
        assert_eq!(theorem_suite("nope", &SuiteConfig::default()).unwrap_err(), Error::UnknownSuite("nope".into()));
    }

    #[test]
    fn lifted_cone_chain_matches_planar_ratio() {
        let b1 = regular_polygon(6).unwrap();
        let b2 = cross_polytope(2).unwrap();
        let est = estimate_distance(&b1, &b2, &DistanceConfig::symmetric(16, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a1, a2) = (random_apexes(&mut rng, 1, 0.5), random_apexes(&mut rng, 1, 0.5));
        let (c1, c2) = (cone(&b1, &a1).unwrap(), cone(&b2, &a2).unwrap());
        let w = lift_cone(&est.witness, &a1, &a2).unwrap();
        let ratio = position_ratio(&c1, &c2, &w).unwrap();
        assert!(ratio <= est.upper + 1e-9, "{ratio} vs {}", est.upper);
        assert!(verify_chain(&c1, &c2, &w, est.upper + CHAIN_SLACK, CHAIN_TOL).unwrap());
    }
}
