//! Banach–Mazur distance estimation.
//!
//! For an affine witness `W(x) = M(x + v) + c` the ratio of a position is
//! `s·t`, where `s` is the smallest scale with `K − c ⊆ s·M(L + v)` and `t` the
//! smallest with `M(L + v) ⊆ t·(K − c)`. The engine minimizes this ratio over
//! `M` by multi-start Nelder–Mead, each start finished by sequential linear
//! programming. For non-symmetric pairs the translations are not searched:
//! for each `M` the best ones come from a small linear program.

pub mod nelder_mead;
mod polish;
mod translations;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::hull::centroid;
use crate::geometry::sampling::fibonacci_sphere;
use crate::geometry::{apply_map, inclusion_scale, BodyExpr, LinearMap, Matrix, Polytope, Vector};
use nelder_mead::NmOptions;

/// Directions used to approximate bodies without a vertex list by a polytope.
const PROXY_2D: usize = 256;
const PROXY_3D: usize = 600;
/// Nelder–Mead budget before the polish when translations are free; the
/// polish does most of the work there.
const FREE_NM_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    /// Fix translations at zero; both bodies must be 0-symmetric.
    pub symmetric: bool,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self { restarts: 200, seed: 0, max_iters: 2000, tol: 1e-9, symmetric: false }
    }
}

impl DistanceConfig {
    pub fn symmetric(restarts: usize, seed: u64) -> Self {
        Self { restarts, seed, symmetric: true, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    pub upper: f64,
    pub certified: Option<f64>,
    /// Maps `L` into position: `K ⊆ W(L) ⊆ c + upper·(K − c)` with
    /// `c = witness.post`.
    pub witness: LinearMap,
    pub restarts_used: usize,
    pub best_restart_seed: u64,
    /// Inclusion violation of the witness chain, re-measured on the input
    /// bodies.
    pub residual: f64,
}

pub fn map_to_json(t: &LinearMap) -> Value {
    let m = t.matrix();
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    json!({
        "matrix": rows,
        "pre": t.pre.iter().copied().collect::<Vec<f64>>(),
        "post": t.post.iter().copied().collect::<Vec<f64>>(),
    })
}

/// Inverse of [`map_to_json`]; `pre` and `post` default to zero.
pub fn map_from_json(v: &Value) -> Result<LinearMap> {
    let bad = |m: &str| Error::InvalidInput(format!("witness: {m}"));
    let rows = v.get("matrix").and_then(Value::as_array).ok_or_else(|| bad("missing `matrix`"))?;
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        let row = row.as_array().filter(|r| r.len() == n).ok_or_else(|| bad("`matrix` must be square"))?;
        for x in row {
            data.push(x.as_f64().ok_or_else(|| bad("matrix entries must be numbers"))?);
        }
    }
    let vector = |key: &str| -> Result<Vector> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(Vector::zeros(n)),
            Some(x) => {
                let xs = x.as_array().filter(|a| a.len() == n).ok_or_else(|| bad(&format!("`{key}` must have length {n}")))?;
                xs.iter()
                    .map(|x| x.as_f64().ok_or_else(|| bad(&format!("`{key}` entries must be numbers"))))
                    .collect::<Result<Vec<f64>>>()
                    .map(Vector::from_vec)
            }
        }
    };
    LinearMap::with_translations(Matrix::from_row_slice(n, n, &data), vector("pre")?, vector("post")?)
}

impl DistanceEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "upper": self.upper,
            "certified": self.certified,
            "witness": map_to_json(&self.witness),
            "restarts_used": self.restarts_used,
            "best_restart_seed": self.best_restart_seed,
            "residual": self.residual,
        })
    }
}

/// Vertex/facet matrices of a full-dimensional polytope.
#[derive(Debug, Clone)]
struct Shape {
    /// n × k, one vertex per column.
    verts: Matrix,
    /// f × n, one unit facet normal per row.
    normals: Matrix,
    offsets: Vector,
    centroid: Vector,
    radius: f64,
}

impl Shape {
    fn new(p: &Polytope) -> Result<Self> {
        if !p.is_full_dimensional() {
            return Err(Error::InvalidBody("body is not full-dimensional".into()));
        }
        let n = p.ambient_dim();
        let vs = p.vertices();
        let fs = p.facets();
        let c = centroid(vs);
        let radius = vs.iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
        Ok(Self {
            verts: Matrix::from_fn(n, vs.len(), |i, j| vs[j][i]),
            normals: Matrix::from_fn(fs.len(), n, |i, j| fs[i].normal[j]),
            offsets: Vector::from_iterator(fs.len(), fs.iter().map(|h| h.offset)),
            centroid: c,
            radius,
        })
    }
}

/// Polytope form of a body; bodies without a vertex list are replaced by the
/// hull of boundary samples.
fn polytope_or_proxy(b: &BodyExpr) -> Result<Polytope> {
    if let Some(p) = b.to_polytope() {
        return p;
    }
    if !b.origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    let n = b.dim();
    let dirs: Vec<Vector> = match n {
        2 => (0..PROXY_2D)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / PROXY_2D as f64;
                Vector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(PROXY_3D),
        _ => crate::geometry::sampling::direction_grid(n),
    };
    let pts: Vec<Vector> = dirs
        .iter()
        .map(|u| Ok(u / b.gauge_fast(u)?))
        .collect::<Result<_>>()?;
    Polytope::new(&pts)
}

/// Ratio evaluator for a fixed pair of polytopes.
#[derive(Debug, Clone)]
pub struct PreparedPair {
    n: usize,
    k: Shape,
    l: Shape,
}

impl PreparedPair {
    pub fn new(k: &BodyExpr, l: &BodyExpr) -> Result<Self> {
        if k.dim() != l.dim() {
            return Err(Error::DimensionMismatch { expected: k.dim(), found: l.dim() });
        }
        Ok(Self {
            n: k.dim(),
            k: Shape::new(&polytope_or_proxy(k)?)?,
            l: Shape::new(&polytope_or_proxy(l)?)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(s, t)` for the witness `x ↦ M(x + v) + c`; infinite when a center
    /// leaves the interior of its body.
    pub fn scales(&self, m: &Matrix, c: &Vector, v: &Vector) -> (f64, f64) {
        let Some(minv) = m.clone().try_inverse() else {
            return (f64::INFINITY, f64::INFINITY);
        };
        if !minv.iter().all(|x| x.is_finite()) {
            return (f64::INFINITY, f64::INFINITY);
        }
        let dl = &self.l.offsets + &self.l.normals * v;
        let dk = &self.k.offsets - &self.k.normals * c;
        let eps = 1e-12;
        if dl.iter().any(|d| *d <= eps * self.l.radius) || dk.iter().any(|d| *d <= eps * self.k.radius) {
            return (f64::INFINITY, f64::INFINITY);
        }
        let mut vk = self.k.verts.clone();
        for mut col in vk.column_iter_mut() {
            col -= c;
        }
        let mut vl = self.l.verts.clone();
        for mut col in vl.column_iter_mut() {
            col += v;
        }
        let s_mat = (&self.l.normals * &minv) * vk;
        let t_mat = (&self.k.normals * m) * vl;
        let row_max = |mat: &Matrix, d: &Vector| {
            let mut best = 0.0f64;
            for (i, row) in mat.row_iter().enumerate() {
                let r = row.max() / d[i];
                best = best.max(r);
            }
            best
        };
        (row_max(&s_mat, &dl), row_max(&t_mat, &dk))
    }

    pub fn ratio(&self, m: &Matrix, c: &Vector, v: &Vector) -> f64 {
        let (s, t) = self.scales(m, c, v);
        let r = s * t;
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }
}

/// `s·t` for the witness `t` on arbitrary bodies (grid-based for composites).
pub fn position_ratio(k: &BodyExpr, l: &BodyExpr, t: &LinearMap) -> Result<f64> {
    let (s, tt) = chain_scales(k, l, t)?;
    Ok(s * tt)
}

fn chain_scales(k: &BodyExpr, l: &BodyExpr, t: &LinearMap) -> Result<(f64, f64)> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: l.dim() });
    }
    let centered_k = BodyExpr::translate(k.clone(), -&t.post)?;
    let mut no_post = t.clone();
    no_post.post = Vector::zeros(t.dim());
    let image = apply_map(&no_post, l)?;
    let s = inclusion_scale(&centered_k, &image)?;
    let tt = inclusion_scale(&image, &centered_k)?;
    Ok((s, tt))
}

/// Checks `K ⊆ (1+tol)·W(L)` and `W(L) ⊆ ρ(1+tol)·K` about the center
/// `W.post`.
/// Polytope pairs are checked facet by facet, with an extra rounding
/// allowance proportional to the size of the bodies so that a center close
/// to the boundary stays well conditioned.
pub fn verify_chain(k: &BodyExpr, l: &BodyExpr, t: &LinearMap, rho: f64, tol: f64) -> Result<bool> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: l.dim() });
    }
    if let (Some(pk), Some(image)) = (k.to_polytope(), apply_map(t, l)?.to_polytope()) {
        let (pk, image) = (pk?, image?);
        if pk.is_full_dimensional() && image.is_full_dimensional() {
            return Ok(polytope_chain(&pk, &image, &t.post, rho, tol));
        }
    }
    let (s, tt) = chain_scales(k, l, t)?;
    Ok(s <= 1.0 + tol && tt <= rho * (1.0 + tol))
}

const ROUNDING: f64 = 1e-12;

/// `K ⊆ (1+tol)·W(L)` and `W(L) ⊆ ρ(1+tol)·K`, both about `c`.
fn polytope_chain(k: &Polytope, image: &Polytope, c: &Vector, rho: f64, tol: f64) -> bool {
    let slack = ROUNDING * k.scale().max(image.scale()).max(c.amax());
    let nested = |inner: &Polytope, outer: &Polytope, factor: f64| {
        outer.facets().iter().all(|h| {
            let beta = h.offset - h.normal.dot(c);
            inner.vertices().iter().all(|x| h.normal.dot(&(x - c)) <= factor * beta + slack)
        })
    };
    nested(k, image, 1.0 + tol) && nested(image, k, rho * (1.0 + tol))
}

/// Signed permutation matrices of size `n` in a fixed order (identity first).
fn signed_permutations(n: usize) -> Vec<Matrix> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut ps = perms(n);
    ps.sort();
    let mut out = Vec::new();
    for signs in 0..(1usize << n) {
        for p in &ps {
            out.push(Matrix::from_fn(n, n, |i, j| {
                if p[i] == j {
                    if signs >> i & 1 == 1 { -1.0 } else { 1.0 }
                } else {
                    0.0
                }
            }));
        }
    }
    out
}

/// Random matrix `Q·D` with `Q` orthogonal and `D` a diagonal log-normal
/// scaling.
fn random_start(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let d = Matrix::from_diagonal(&Vector::from_fn(n, |_, _| (0.35 * rng.sample::<f64, _>(StandardNormal)).exp()));
    q * d
}

/// Linear parts are searched up to scale, as row-major entries.
struct Layout {
    n: usize,
}

impl Layout {
    fn unpack(&self, x: &[f64]) -> Matrix {
        let m = Matrix::from_row_slice(self.n, self.n, x);
        let norm = m.norm();
        if norm > 0.0 {
            m / norm
        } else {
            m
        }
    }

    fn pack(&self, m: &Matrix) -> Vec<f64> {
        (m / m.norm()).transpose().iter().copied().collect()
    }
}

struct RestartOutcome {
    ratio: f64,
    m: Matrix,
}

fn run_restart(pair: &PreparedPair, cfg: &DistanceConfig, index: usize, starts: &[Matrix]) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
    let m0 = if index < starts.len() { starts[index].clone() } else { random_start(pair.n, &mut rng) };
    descend(pair, cfg, &m0)
}

/// Objective of the search over linear parts: the exact ratio about the
/// origin for symmetric pairs, the translation LP otherwise.
fn objective(pair: &PreparedPair, cfg: &DistanceConfig, m: &Matrix) -> f64 {
    if cfg.symmetric {
        let z = Vector::zeros(pair.n);
        pair.ratio(m, &z, &z)
    } else {
        translations::place(pair, m).map_or(f64::INFINITY, |p| p.ratio)
    }
}

/// Nelder–Mead over the linear part from `m0`, finished by the
/// linear-programming polish.
fn descend(pair: &PreparedPair, cfg: &DistanceConfig, m0: &Matrix) -> RestartOutcome {
    let n = pair.n;
    let layout = Layout { n };
    let opts = NmOptions {
        max_iters: if cfg.symmetric { cfg.max_iters } else { cfg.max_iters.min(FREE_NM_ITERS) },
        ftol: cfg.tol,
        initial_step: 0.1 / n as f64,
        reinits: 6,
    };
    let res = nelder_mead::minimize(|x| objective(pair, cfg, &layout.unpack(x)), &layout.pack(m0), &opts);
    let m = layout.unpack(&res.x);
    if !res.fx.is_finite() {
        return RestartOutcome { ratio: res.fx, m };
    }
    if cfg.symmetric {
        let (ratio, m) = polish::polish(pair, &m);
        return RestartOutcome { ratio, m };
    }
    match polish::polish_free(pair, &m) {
        Some((ratio, m)) => RestartOutcome { ratio, m },
        None => RestartOutcome { ratio: f64::INFINITY, m },
    }
}

/// Multi-start estimate of `d_BM(K, L)`; an upper bound with an explicit
/// witness.
pub fn estimate_distance(k: &BodyExpr, l: &BodyExpr, cfg: &DistanceConfig) -> Result<DistanceEstimate> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: l.dim() });
    }
    if cfg.symmetric && !(k.is_symmetric() && l.is_symmetric()) {
        return Err(Error::SymmetryFlagViolated);
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let pair = PreparedPair::new(k, l)?;
    estimate_prepared(&pair, k, l, cfg)
}

/// Same as [`estimate_distance`] with a reusable prepared pair.
pub fn estimate_prepared(
    pair: &PreparedPair,
    k: &BodyExpr,
    l: &BodyExpr,
    cfg: &DistanceConfig,
) -> Result<DistanceEstimate> {
    let n = pair.n;
    let starts = signed_permutations(n);
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(pair, cfg, i, &starts))
        .collect();
    let (best_idx, best) = outcomes
        .iter()
        .enumerate()
        .fold((0, &outcomes[0]), |acc, (i, o)| if o.ratio < acc.1.ratio { (i, o) } else { acc });
    if !best.ratio.is_finite() {
        return Err(Error::InvalidInput("no restart reached a finite ratio".into()));
    }
    let (upper, witness) = if cfg.symmetric {
        let z = Vector::zeros(n);
        let (s, t) = pair.scales(&best.m, &z, &z);
        ((s * t).max(1.0), LinearMap::new(&best.m * s)?)
    } else {
        let p = translations::place(pair, &best.m).ok_or(Error::SingularMap)?;
        let (m, c, v) = p.witness(pair, &best.m).ok_or(Error::SingularMap)?;
        (p.ratio.max(1.0), LinearMap::with_translations(m, v, c)?)
    };
    let residual = chain_residual(k, l, &witness, upper)?;
    Ok(DistanceEstimate {
        upper,
        certified: None,
        witness,
        restarts_used: cfg.restarts,
        best_restart_seed: cfg.seed.wrapping_add(best_idx as u64),
        residual,
    })
}

/// `max(0, s − 1) + max(0, t − ρ)/ρ` measured on the given bodies.
fn chain_residual(k: &BodyExpr, l: &BodyExpr, w: &LinearMap, rho: f64) -> Result<f64> {
    let (s, t) = chain_scales(k, l, w)?;
    Ok((s - 1.0).max(0.0) + (t - rho).max(0.0) / rho)
}
