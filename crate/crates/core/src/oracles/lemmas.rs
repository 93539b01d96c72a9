//! Executable versions of the projection lemmas behind the cone theorems.
//! Each checker validates its hypotheses by membership LPs first and then
//! evaluates the construction.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::hull::{in_hull, prune, scale_of};
use crate::geometry::{BodyExpr, Matrix, Vector};

const MEMBER_TOL: f64 = 1e-9;

fn verts(b: &BodyExpr) -> Result<Vec<Vector>> {
    b.vertices().ok_or(Error::NotVertexEnumerable)
}

fn hyp(msg: &str) -> Error {
    Error::HypothesisViolated(msg.to_string())
}

fn member(x: &Vector, pts: &[Vector]) -> bool {
    let scale = scale_of(pts).max(x.amax()).max(1.0);
    in_hull(x, pts, MEMBER_TOL * scale)
}

fn same_point_set(a: &[Vector], b: &[Vector], tol: f64) -> bool {
    let covered = |xs: &[Vector], ys: &[Vector]| xs.iter().all(|x| ys.iter().any(|y| (x - y).amax() <= tol));
    covered(a, b) && covered(b, a)
}

/// Checks `T(conv(B₂ ∪ {v})) = T(B₂)` (with `±v` when `symmetric`) after
/// validating `B₁ ⊆ conv(B₂ ∪ {v})`, `v ∉ B₁` and `T(v) ∈ T(B₁)`.
pub fn lemma_vertex_absorbing_check(
    b1: &BodyExpr,
    b2: &BodyExpr,
    v: &Vector,
    t: &Matrix,
    symmetric: bool,
) -> Result<bool> {
    let n = b2.dim();
    for (name, d) in [("B1", b1.dim()), ("v", v.len()), ("T", t.ncols())] {
        if d != n {
            return Err(Error::HypothesisViolated(format!("{name} has dimension {d}, expected {n}")));
        }
    }
    if t.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: t.nrows() });
    }
    if symmetric && !(b1.is_symmetric() && b2.is_symmetric()) {
        return Err(hyp("symmetric variant needs 0-symmetric B1 and B2"));
    }
    let (v1, v2) = (verts(b1)?, verts(b2)?);
    let mut extended = v2.clone();
    extended.push(v.clone());
    if symmetric {
        extended.push(-v);
    }
    if !v1.iter().all(|x| member(x, &extended)) {
        return Err(hyp(if symmetric { "B1 is not contained in conv(B2 ∪ {±v})" } else { "B1 is not contained in conv(B2 ∪ {v})" }));
    }
    if member(v, &v1) {
        return Err(hyp("v lies in B1"));
    }
    let image = |pts: &[Vector]| pts.iter().map(|x| t * x).collect::<Vec<_>>();
    let tv1 = image(&v1);
    if !member(&(t * v), &tv1) {
        return Err(hyp("T(v) is not in T(B1)"));
    }
    let lhs = prune(&image(&extended));
    let rhs = prune(&image(&v2));
    let tol = 1e-8 * scale_of(&lhs).max(scale_of(&rhs)).max(1.0);
    Ok(same_point_set(&lhs, &rhs, tol))
}

/// Projection `P(x) = x − x_n·w` onto `{x_n = 0}` with `P(eⁿ) ∈ B` and
/// `P(v − u) ∈ B`, for `B` in that hyperplane and `v` in `d·C`, where
/// `C = conv((B + u) ∪ {eⁿ + u})`.
pub fn lemma_proj_construct(b: &BodyExpr, d: f64, u: &Vector, v: &Vector) -> Result<Matrix> {
    let n = b.dim();
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if u.len() != n { u.len() } else { v.len() } });
    }
    if n < 2 {
        return Err(hyp("ambient dimension must be at least 2"));
    }
    if !(1.0..=2.0).contains(&d) {
        return Err(Error::HypothesisViolated(format!("d = {d} is outside [1, 2]")));
    }
    let bv = verts(b)?;
    let scale = scale_of(&bv).max(1.0);
    if bv.iter().any(|x| x[n - 1].abs() > MEMBER_TOL * scale) {
        return Err(hyp("B is not contained in the hyperplane x_n = 0"));
    }
    if !member(&Vector::zeros(n), &bv) {
        return Err(hyp("0 is not in B"));
    }
    let mut en = Vector::zeros(n);
    en[n - 1] = 1.0;
    let mut cone: Vec<Vector> = bv.iter().map(|x| x + u).collect();
    cone.push(&en + u);
    if !member(&Vector::zeros(n), &cone) {
        return Err(hyp("0 is not in the cone C"));
    }
    let scaled: Vec<Vector> = cone.iter().map(|x| x * d).collect();
    if !member(v, &scaled) {
        return Err(hyp("v is not in dC"));
    }
    if v[n - 1] < u[n - 1] + 1.0 - MEMBER_TOL {
        return Err(hyp("v_n < u_n + 1"));
    }
    let mut w = en.clone();
    let height = v[n - 1] - u[n - 1];
    for i in 0..n - 1 {
        w[i] = u[i] / height;
    }
    let mut p = Matrix::identity(n, n);
    for i in 0..n {
        p[(i, n - 1)] -= w[i];
    }
    if (&p * &p - &p).amax() > 1e-12 || p.row(n - 1).amax() > 1e-12 {
        return Err(Error::PostconditionFailed("P is not a projection onto x_n = 0".into()));
    }
    if !member(&(&p * &en), &bv) {
        return Err(Error::PostconditionFailed("P(e^n) is not in B".into()));
    }
    if !member(&(&p * (v - u)), &bv) {
        return Err(Error::PostconditionFailed("P(v - u) is not in B".into()));
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleCondition {
    /// `v′₂ + μ(v″₂ − v′₂) = v₂` with `μ ∈ [1, 4/3)`.
    First,
    /// The parallel to `v′v″` through `y + e²` meets the line `x₂ = y₂` at
    /// `z₁ = y₁ + 2μ − 1` with `μ ∈ [1/2, 4/3)`.
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleOutcome {
    pub condition: TriangleCondition,
    pub mu: f64,
}

fn e(i: usize) -> Vector {
    let mut x = Vector::zeros(2);
    x[i] = 1.0;
    x
}

/// Triangle `T` with vertices `y − e¹`, `y + e¹`, `y + e²`.
fn base_triangle(y: &Vector) -> [Vector; 3] {
    [y - e(0), y + e(0), y + e(1)]
}

/// Finds which of the two conditions holds for `T ⊆ S ⊆ dT`, where `S` has
/// vertices `(v, v′, v″)` with `v ∈ [d(y − e¹), dy]` and `v′₂ ≥ v″₂`.
pub fn lemma_triangles_check(y: &Vector, d: f64, s: &[Vector; 3]) -> Result<TriangleOutcome> {
    if y.len() != 2 || s.iter().any(|x| x.len() != 2) {
        return Err(hyp("all points must be planar"));
    }
    if !(1.0..=1.5).contains(&d) {
        return Err(Error::HypothesisViolated(format!("d = {d} is outside [1, 3/2]")));
    }
    let t = base_triangle(y);
    if !member(&Vector::zeros(2), &t) {
        return Err(hyp("0 is not in T"));
    }
    let sv = s.to_vec();
    if !t.iter().all(|x| member(x, &sv)) {
        return Err(hyp("T is not contained in S"));
    }
    let dt: Vec<Vector> = t.iter().map(|x| x * d).collect();
    if !sv.iter().all(|x| member(x, &dt)) {
        return Err(hyp("S is not contained in dT"));
    }
    let [v, v1, v2] = s;
    let tol = MEMBER_TOL * (1.0 + y.amax());
    let on_segment = (v[1] - d * y[1]).abs() <= tol && v[0] >= d * (y[0] - 1.0) - tol && v[0] <= d * y[0] + tol;
    if !on_segment {
        return Err(hyp("v is not on the segment [d(y - e1), dy]"));
    }
    if v1[1] < v2[1] {
        return Err(hyp("v'_2 < v''_2"));
    }
    let slack = 1e-12;
    let dv = v2[1] - v1[1];
    if dv != 0.0 {
        let mu = (v[1] - v1[1]) / dv;
        if mu >= 1.0 - slack && mu < 4.0 / 3.0 {
            return Ok(TriangleOutcome { condition: TriangleCondition::First, mu: mu.max(1.0) });
        }
        // line through y + e² with direction v″ − v′, at height y₂
        let step = -1.0 / dv;
        let z1 = y[0] + step * (v2[0] - v1[0]);
        let mu = (z1 - y[0] + 1.0) / 2.0;
        if mu >= 0.5 - slack && mu < 4.0 / 3.0 {
            return Ok(TriangleOutcome { condition: TriangleCondition::Second, mu: mu.max(0.5) });
        }
    } else if (v[1] - v1[1]).abs() <= tol {
        return Ok(TriangleOutcome { condition: TriangleCondition::First, mu: 1.0 });
    }
    Err(Error::NoConditionHolds)
}

fn gaussian<R: Rng>(n: usize, rng: &mut R) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

fn unit<R: Rng>(n: usize, rng: &mut R) -> Vector {
    loop {
        let g = gaussian(n, rng);
        let norm = g.norm();
        if norm > 1e-3 {
            return g / norm;
        }
    }
}

/// Random convex combination of the given points.
fn convex_combination<R: Rng>(pts: &[Vector], rng: &mut R) -> Vector {
    let w: Vec<f64> = pts.iter().map(|_| -rng.random_range(1e-12f64..1.0).ln()).collect();
    let total: f64 = w.iter().sum();
    pts.iter().zip(&w).fold(Vector::zeros(pts[0].len()), |acc, (p, wi)| acc + p * (wi / total))
}

#[derive(Debug, Clone)]
pub struct VertexAbsorbingInstance {
    pub b1: BodyExpr,
    pub b2: BodyExpr,
    pub v: Vector,
    pub t: Matrix,
    pub symmetric: bool,
}

/// Random instance satisfying the hypotheses of the vertex-absorbing check
/// in dimension 2 or 3.
pub fn random_vertex_absorbing_instance<R: Rng>(rng: &mut R, symmetric: bool) -> VertexAbsorbingInstance {
    loop {
        let n = rng.random_range(2..=3);
        let mut b2: Vec<Vector> = (0..rng.random_range(n + 1..=7)).map(|_| unit(n, rng) * rng.random_range(0.3..1.0)).collect();
        if symmetric {
            let neg: Vec<Vector> = b2.iter().map(|x| -x).collect();
            b2.extend(neg);
        }
        let v = unit(n, rng) * rng.random_range(1.5..2.5);
        let mut b1 = Vec::new();
        for k in 0..rng.random_range(n + 1..=6) {
            let w = convex_combination(&b2, rng);
            let lam = rng.random_range(0.0..0.9);
            let side = if symmetric && k % 2 == 1 { -1.0 } else { 1.0 };
            b1.push(w * (1.0 - lam) + &v * (side * lam));
        }
        if symmetric {
            let neg: Vec<Vector> = b1.iter().map(|x| -x).collect();
            b1.extend(neg);
        }
        // project along v − u for a point u of B1, so that T(v) = T(u)
        let dir = &v - &b1[0];
        let a = unit(n, rng);
        let denom = a.dot(&dir);
        if denom.abs() < 0.2 * dir.norm() {
            continue;
        }
        let t = Matrix::identity(n, n) - &dir * a.transpose() / denom;
        let (Ok(b1), Ok(b2)) = (BodyExpr::polytope(&b1), BodyExpr::polytope(&b2)) else {
            continue;
        };
        if b1.dim() != n || b2.dim() != n {
            continue;
        }
        return VertexAbsorbingInstance { b1, b2, v, t, symmetric };
    }
}

#[derive(Debug, Clone)]
pub struct ProjInstance {
    pub b: BodyExpr,
    pub d: f64,
    pub u: Vector,
    pub v: Vector,
}

/// Random valid input for [`lemma_proj_construct`] in dimension 2 or 3.
pub fn random_proj_instance<R: Rng>(rng: &mut R) -> ProjInstance {
    let n = rng.random_range(2..=3);
    // B: hull of points around the origin inside x_n = 0
    let k = if n == 2 { 2 } else { rng.random_range(3..=6) };
    let mut pts: Vec<Vector> = Vec::new();
    for i in 0..k {
        let mut x = Vector::zeros(n);
        if n == 2 {
            x[0] = if i == 0 { 1.0 } else { -1.0 } * rng.random_range(0.2..1.0);
        } else {
            let a = std::f64::consts::TAU * (i as f64 + rng.random_range(0.0..0.4)) / k as f64;
            let r = rng.random_range(0.3..1.0);
            x[0] = r * a.cos();
            x[1] = r * a.sin();
        }
        pts.push(x);
    }
    let b = BodyExpr::polytope(&pts).expect("base polytope");
    let d = rng.random_range(1.0..=2.0);
    let un = -rng.random_range(0.0..=1.0);
    // 0 ∈ C exactly when −π(u) ∈ (1 + u_n)·B
    let inner = convex_combination(&pts, rng);
    let mut u = -inner * (1.0 + un);
    u[n - 1] = un;
    let mut en = Vector::zeros(n);
    en[n - 1] = 1.0;
    let lam_min = ((un + 1.0) / d - un).clamp(0.0, 1.0);
    let lam = rng.random_range(lam_min..=1.0);
    let base_pt = convex_combination(&pts, rng);
    let c = (&base_pt + &u) * (1.0 - lam) + (&en + &u) * lam;
    ProjInstance { b, d, u, v: c * d }
}

#[derive(Debug, Clone)]
pub struct TriangleInstance {
    pub y: Vector,
    pub d: f64,
    pub s: [Vector; 3],
}

fn in_triangle(p: &Vector, tri: &[Vector; 3]) -> bool {
    let cross = |a: &Vector, b: &Vector, c: &Vector| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let d1 = cross(&tri[0], &tri[1], p);
    let d2 = cross(&tri[1], &tri[2], p);
    let d3 = cross(&tri[2], &tri[0], p);
    let eps = -1e-12;
    (d1 >= eps && d2 >= eps && d3 >= eps) || (d1 <= -eps && d2 <= -eps && d3 <= -eps)
}

/// Random valid input for [`lemma_triangles_check`].
pub fn random_triangle_instance<R: Rng>(rng: &mut R) -> TriangleInstance {
    loop {
        let y2 = -rng.random_range(0.0..=1.0);
        let y1 = rng.random_range(-(1.0 + y2)..=(1.0 + y2));
        let y = Vector::from_vec(vec![y1, y2]);
        let d = rng.random_range(1.0..=1.5);
        let t = base_triangle(&y);
        let dt = [&t[0] * d, &t[1] * d, &t[2] * d];
        let v = &dt[0] + (d * &y - &dt[0]) * rng.random_range(0.0..=1.0);
        for _ in 0..200 {
            let a = convex_combination(&dt, rng);
            let b = convex_combination(&dt, rng);
            let (v1, v2) = if a[1] >= b[1] { (a, b) } else { (b, a) };
            let s = [v.clone(), v1, v2];
            if t.iter().all(|p| in_triangle(p, &s)) {
                return TriangleInstance { y, d, s };
            }
        }
    }
}
