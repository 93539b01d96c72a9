//! Convex bodies as small expression trees.
//!
//! A [`BodyExpr`] is either a leaf (a polytope given by vertices, or the
//! Euclidean unit ball) or a node combining children: ℓp-sums, invertible
//! linear images and translates. Every node answers gauge and support queries;
//! polytope leaves additionally carry their facets.

pub mod hull;
pub mod json;
mod ops;
pub mod sampling;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::StandardLp;
pub use hull::{AffineFrame, Halfspace};
pub use ops::{
    apply_map, inclusion_scale, inclusion_scale_with, polar, project, radial_extremes,
    RadialExtremes, Sampling,
};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Tolerance for `‖M·M⁻¹ − I‖_max` when accepting a linear map.
pub const INVERSE_TOL: f64 = 1e-10;

/// Relative tolerance of the vertex-set symmetry test.
const SYMMETRY_TOL: f64 = 1e-9;

/// Invertible affine map `x ↦ M(x + pre) + post`.
///
/// For a Banach–Mazur witness between `K` and `L`, `pre` shifts `L` and
/// `post` is the homothety center in `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: Matrix,
    inverse: Matrix,
    pub pre: Vector,
    pub post: Vector,
}

impl LinearMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::with_translations(matrix, Vector::zeros(n), Vector::zeros(n))
    }

    pub fn with_translations(matrix: Matrix, pre: Vector, post: Vector) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
        }
        for t in [&pre, &post] {
            if t.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.len() });
            }
        }
        if matrix.iter().chain(pre.iter()).chain(post.iter()).any(|v| !v.is_finite()) {
            return Err(Error::SingularMap);
        }
        let inverse = matrix.clone().try_inverse().ok_or(Error::SingularMap)?;
        let err = (&matrix * &inverse - Matrix::identity(n, n)).amax();
        if !err.is_finite() || err > INVERSE_TOL {
            return Err(Error::SingularMap);
        }
        Ok(Self { matrix, inverse, pre, post })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n, n),
            inverse: Matrix::identity(n, n),
            pre: Vector::zeros(n),
            post: Vector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn is_linear(&self) -> bool {
        self.pre.iter().chain(self.post.iter()).all(|v| *v == 0.0)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * (x + &self.pre) + &self.post
    }

    pub fn apply_inverse(&self, y: &Vector) -> Vector {
        &self.inverse * (y - &self.post) - &self.pre
    }

    /// Same map with the matrix multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * s,
            inverse: &self.inverse / s,
            pre: self.pre.clone(),
            post: self.post.clone(),
        }
    }

    /// The linear part alone.
    pub fn linear_part(&self) -> Self {
        let n = self.dim();
        Self { pre: Vector::zeros(n), post: Vector::zeros(n), ..self.clone() }
    }
}

/// Vertex-represented polytope, possibly lower-dimensional in its ambient
/// space. Vertices are irredundant; facets are cached when full-dimensional.
#[derive(Debug, Clone)]
pub struct Polytope {
    vertices: Vec<Vector>,
    frame: AffineFrame,
    facets: Vec<Halfspace>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Polytope {
    /// Prunes the input to its extreme points (order preserved) and caches
    /// the affine frame and facets.
    pub fn new(points: &[Vector]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidBody("empty vertex list".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidBody("zero-dimensional vertices".into()));
        }
        for p in points {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidBody("non-finite coordinate".into()));
            }
        }
        let vertices = hull::prune(points);
        Ok(Self::from_pruned(vertices))
    }

    fn from_pruned(vertices: Vec<Vector>) -> Self {
        let frame = hull::affine_frame(&vertices);
        let facets = if frame.dim() == vertices[0].len() {
            hull::facets(&vertices)
        } else {
            Vec::new()
        };
        Self { vertices, frame, facets }
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn frame(&self) -> &AffineFrame {
        &self.frame
    }

    /// Facets `a·x <= β` with unit `a`; empty when not full-dimensional.
    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.intrinsic_dim() == self.ambient_dim()
    }

    pub fn scale(&self) -> f64 {
        hull::scale_of(&self.vertices)
    }

    pub fn origin_interior(&self) -> bool {
        let tol = 1e-12 * self.scale();
        self.is_full_dimensional() && self.facets.iter().all(|h| h.offset > tol)
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = SYMMETRY_TOL * self.scale();
        self.vertices
            .iter()
            .all(|v| self.vertices.iter().any(|w| (v + w).amax() <= tol))
    }

    /// Image under `x ↦ M(x + pre) + post`; facets are transformed instead of
    /// being recomputed.
    pub fn transformed(&self, t: &LinearMap) -> Self {
        let vertices: Vec<Vector> = self.vertices.iter().map(|v| t.apply(v)).collect();
        let frame = hull::affine_frame(&vertices);
        let inv_t = t.inverse().transpose();
        let facets = self
            .facets
            .iter()
            .map(|h| {
                let a = &inv_t * &h.normal;
                let beta = h.offset + h.normal.dot(&t.pre) + a.dot(&t.post);
                let na = a.norm();
                Halfspace { normal: a / na, offset: beta / na }
            })
            .collect();
        Self { vertices, frame, facets }
    }

    /// Gauge from the facet description. Requires the origin to be interior.
    pub fn gauge_facets(&self, x: &Vector) -> f64 {
        self.facets
            .iter()
            .map(|h| h.normal.dot(x) / h.offset)
            .fold(0.0, f64::max)
    }

    /// Gauge as the linear program `min Σcᵢ` subject to `Σcᵢvᵢ = x`, `c >= 0`.
    /// Returns infinity when `x` is outside the cone over the vertices.
    pub fn gauge_lp(&self, x: &Vector) -> f64 {
        let n = self.ambient_dim();
        let k = self.vertices.len();
        let mut lp = StandardLp::new(k);
        let mut row = vec![0.0; k];
        for r in 0..n {
            for (j, v) in self.vertices.iter().enumerate() {
                row[j] = v[r];
            }
            lp.push_eq(&row, x[r]);
        }
        lp.set_objective(&vec![1.0; k]);
        lp.minimize().map(|s| s.objective).unwrap_or(f64::INFINITY)
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership with absolute ℓ1 slack `tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        hull::in_hull(x, &self.vertices, tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Polytope(Arc<Polytope>),
    UnitBall,
    /// `p = f64::INFINITY` encodes the ℓ∞-sum.
    LpSum { p: f64, children: Vec<BodyExpr> },
    LinearImage { map: Arc<LinearMap>, child: Box<BodyExpr> },
    Translate { offset: Vector, child: Box<BodyExpr> },
}

/// Immutable convex body expression.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyExpr {
    kind: BodyKind,
    symmetric: bool,
    dim: usize,
    origin_interior: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LeafGauge {
    Lp,
    Facets,
}

impl BodyExpr {
    pub fn polytope(vertices: &[Vector]) -> Result<Self> {
        Ok(Self::from_polytope(Polytope::new(vertices)?))
    }

    /// Polytope whose symmetry claim is validated against the vertex set.
    pub fn polytope_claimed(vertices: &[Vector], symmetric: bool) -> Result<Self> {
        let body = Self::polytope(vertices)?;
        if symmetric && !body.symmetric {
            return Err(Error::InvalidBody("vertex set is not closed under negation".into()));
        }
        Ok(body)
    }

    pub fn from_polytope(p: Polytope) -> Self {
        Self {
            symmetric: p.is_symmetric(),
            dim: p.ambient_dim(),
            origin_interior: p.origin_interior(),
            kind: BodyKind::Polytope(Arc::new(p)),
        }
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("zero-dimensional ball".into()));
        }
        Ok(Self { kind: BodyKind::UnitBall, symmetric: true, dim, origin_interior: true })
    }

    /// Raw ℓp-sum node; see `constructions::lp_sum` for the folding builder.
    pub fn lp_sum_node(children: Vec<BodyExpr>, p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidP(p));
        }
        if children.is_empty() {
            return Err(Error::InvalidBody("ℓp-sum without children".into()));
        }
        if children.iter().any(|c| matches!(c.kind, BodyKind::Translate { .. })) {
            return Err(Error::InvalidBody("ℓp-sum children must not be translates".into()));
        }
        if children.iter().any(|c| !c.origin_interior) {
            return Err(Error::OriginNotInterior);
        }
        Ok(Self {
            symmetric: children.iter().all(|c| c.symmetric),
            dim: children.iter().map(|c| c.dim).sum(),
            origin_interior: true,
            kind: BodyKind::LpSum { p, children },
        })
    }

    /// `M(child)` for an invertible linear `M`. Polytopes are mapped in place.
    pub fn linear_image(map: &LinearMap, child: BodyExpr) -> Result<Self> {
        if map.dim() != child.dim {
            return Err(Error::DimensionMismatch { expected: child.dim, found: map.dim() });
        }
        let lin = map.linear_part();
        match &child.kind {
            BodyKind::Polytope(p) => Ok(Self::from_polytope(p.transformed(&lin))),
            BodyKind::LinearImage { map: inner, child: grand } => {
                let composed = LinearMap::new(lin.matrix() * inner.matrix())?;
                Self::linear_image(&composed, (**grand).clone())
            }
            _ => Ok(Self {
                symmetric: child.symmetric,
                dim: child.dim,
                origin_interior: child.origin_interior,
                kind: BodyKind::LinearImage { map: Arc::new(lin), child: Box::new(child) },
            }),
        }
    }

    /// `child + offset`. Polytopes are shifted in place.
    pub fn translate(child: BodyExpr, offset: Vector) -> Result<Self> {
        if offset.len() != child.dim {
            return Err(Error::DimensionMismatch { expected: child.dim, found: offset.len() });
        }
        if offset.iter().all(|v| *v == 0.0) {
            return Ok(child);
        }
        if let BodyKind::Polytope(p) = &child.kind {
            let shift = LinearMap::with_translations(
                Matrix::identity(child.dim, child.dim),
                Vector::zeros(child.dim),
                offset,
            )?;
            return Ok(Self::from_polytope(p.transformed(&shift)));
        }
        let origin_interior =
            child.origin_interior && child.gauge_inner(&(-&offset), LeafGauge::Facets) < 1.0 - 1e-12;
        Ok(Self {
            symmetric: false,
            dim: child.dim,
            origin_interior,
            kind: BodyKind::Translate { offset, child: Box::new(child) },
        })
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match &self.kind {
            BodyKind::Polytope(p) => Some(p),
            _ => None,
        }
    }

    /// Vertex list when the body is a polytope (possibly after expanding
    /// ℓ1/ℓ∞ nodes and affine images); not pruned for composite nodes.
    pub fn vertices(&self) -> Option<Vec<Vector>> {
        match &self.kind {
            BodyKind::Polytope(p) => Some(p.vertices.clone()),
            BodyKind::UnitBall => None,
            BodyKind::LinearImage { map, child } => {
                Some(child.vertices()?.iter().map(|v| map.matrix() * v).collect())
            }
            BodyKind::Translate { offset, child } => {
                Some(child.vertices()?.into_iter().map(|v| v + offset).collect())
            }
            BodyKind::LpSum { p, children } => {
                let lists: Vec<Vec<Vector>> =
                    children.iter().map(|c| c.vertices()).collect::<Option<_>>()?;
                if *p == 1.0 {
                    let mut out = Vec::new();
                    let mut at = 0;
                    for (c, list) in children.iter().zip(&lists) {
                        for v in list {
                            let mut e = Vector::zeros(self.dim);
                            e.rows_mut(at, c.dim).copy_from(v);
                            out.push(e);
                        }
                        at += c.dim;
                    }
                    Some(out)
                } else if p.is_infinite() {
                    let mut out = vec![Vector::zeros(0)];
                    for list in &lists {
                        let mut next = Vec::with_capacity(out.len() * list.len());
                        for head in &out {
                            for v in list {
                                let mut e = Vector::zeros(head.len() + v.len());
                                e.rows_mut(0, head.len()).copy_from(head);
                                e.rows_mut(head.len(), v.len()).copy_from(v);
                                next.push(e);
                            }
                        }
                        out = next;
                    }
                    Some(out)
                } else {
                    None
                }
            }
        }
    }

    /// Polytope form of the body when it has one.
    pub fn to_polytope(&self) -> Option<Result<Polytope>> {
        match &self.kind {
            BodyKind::Polytope(p) => Some(Ok((**p).clone())),
            _ => self.vertices().map(|v| Polytope::new(&v)),
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    /// Minkowski functional `min{t >= 0 : x ∈ tK}`; polytope leaves are solved
    /// by linear programming.
    pub fn gauge(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        if !self.origin_interior {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.gauge_inner(x, LeafGauge::Lp))
    }

    /// Same value as [`gauge`](Self::gauge), evaluating polytope leaves from
    /// their cached facets.
    pub fn gauge_fast(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        if !self.origin_interior {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.gauge_inner(x, LeafGauge::Facets))
    }

    fn gauge_inner(&self, x: &Vector, mode: LeafGauge) -> f64 {
        match &self.kind {
            BodyKind::Polytope(p) => match mode {
                LeafGauge::Facets if !p.facets.is_empty() => p.gauge_facets(x),
                _ => p.gauge_lp(x),
            },
            BodyKind::UnitBall => x.norm(),
            BodyKind::LpSum { p, children } => {
                let mut at = 0;
                let parts: Vec<f64> = children
                    .iter()
                    .map(|c| {
                        let g = c.gauge_inner(&x.rows(at, c.dim).into_owned(), mode);
                        at += c.dim;
                        g
                    })
                    .collect();
                lp_combine(&parts, *p)
            }
            BodyKind::LinearImage { map, child } => {
                child.gauge_inner(&(map.inverse() * x), mode)
            }
            BodyKind::Translate { offset, child } => translate_gauge(child, offset, x, mode),
        }
    }

    /// Support function `max_{y ∈ K} ⟨y, u⟩`.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        self.check_dim(u)?;
        Ok(self.support_inner(u))
    }

    fn support_inner(&self, u: &Vector) -> f64 {
        match &self.kind {
            BodyKind::Polytope(p) => p.support(u),
            BodyKind::UnitBall => u.norm(),
            BodyKind::LpSum { p, children } => {
                let mut at = 0;
                let parts: Vec<f64> = children
                    .iter()
                    .map(|c| {
                        let h = c.support_inner(&u.rows(at, c.dim).into_owned());
                        at += c.dim;
                        h.max(0.0)
                    })
                    .collect();
                lp_combine(&parts, conjugate_exponent(*p))
            }
            BodyKind::LinearImage { map, child } => {
                child.support_inner(&(map.matrix().transpose() * u))
            }
            BodyKind::Translate { offset, child } => child.support_inner(u) + offset.dot(u),
        }
    }

    /// Membership test `gauge(x) <= 1 + tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.gauge_fast(x)? <= 1.0 + tol)
    }

    pub fn circumradius(&self) -> f64 {
        match self.vertices() {
            Some(v) => v.iter().map(|x| x.norm()).fold(0.0, f64::max),
            None => {
                let grid = sampling::direction_grid(self.dim);
                grid.iter()
                    .map(|u| self.support_inner(u))
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// `(Σ aᵢ^p)^{1/p}` with the ∞ case as max.
pub fn lp_combine(parts: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        parts.iter().copied().fold(0.0, f64::max)
    } else if p == 1.0 {
        parts.iter().sum()
    } else {
        let m = parts.iter().copied().fold(0.0, f64::max);
        if m == 0.0 || m.is_infinite() {
            return m;
        }
        m * parts.iter().map(|a| (a / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `p* = p/(p−1)` with `1* = ∞` and `∞* = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `r = 2p/|p−2|`, the exponent governing the distance of an `ℓp`-sum to
/// the ball; `r = ∞` at `p = 2` and `r = 2` at `p ∈ {1, ∞}`.
pub fn euclidean_sum_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        2.0
    } else if p == 2.0 {
        f64::INFINITY
    } else {
        2.0 * p / (p - 2.0).abs()
    }
}

/// Gauge of `child + o` at `x`: the root of `t ↦ g(x − t·o) − t`, which is
/// convex and decreasing when the origin is interior.
fn translate_gauge(child: &BodyExpr, o: &Vector, x: &Vector, mode: LeafGauge) -> f64 {
    let f = |t: f64| child.gauge_inner(&(x - o * t), mode) - t;
    if x.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, child.gauge_inner(x, mode).max(1e-300));
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    fn cross(n: usize) -> BodyExpr {
        let mut pts = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut e = Vector::zeros(n);
                e[i] = s;
                pts.push(e);
            }
        }
        BodyExpr::polytope(&pts).unwrap()
    }

    fn cube(n: usize) -> BodyExpr {
        let pts: Vec<Vector> = (0..1usize << n)
            .map(|m| Vector::from_fn(n, |i, _| if m >> i & 1 == 1 { 1.0 } else { -1.0 }))
            .collect();
        BodyExpr::polytope(&pts).unwrap()
    }

    fn seg() -> BodyExpr {
        BodyExpr::polytope(&[v(&[1.0]), v(&[-1.0])]).unwrap()
    }

    #[test]
    fn gauge_examples() {
        assert!((cross(2).gauge(&v(&[1.0, 1.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!((cube(3).gauge(&v(&[0.5, -0.2, 0.1])).unwrap() - 0.5).abs() < 1e-12);
        let s = BodyExpr::lp_sum_node(vec![seg(), seg()], 2.0).unwrap();
        assert!((s.gauge(&v(&[0.6, 0.8])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cross(2).gauge(&v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn support_examples() {
        assert!((cross(2).support(&v(&[1.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
        assert!((cube(3).support(&v(&[1.0, 2.0, 3.0])).unwrap() - 6.0).abs() < 1e-15);
        assert_eq!(cross(2).support(&v(&[0.0, 0.0])).unwrap(), 0.0);
        let s = BodyExpr::lp_sum_node(vec![cross(2), seg()], 1.0).unwrap();
        assert!((s.support(&v(&[0.3, -0.2, 0.5])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn errors_are_reported() {
        assert_eq!(
            cube(2).gauge(&v(&[1.0])).unwrap_err(),
            Error::DimensionMismatch { expected: 2, found: 1 }
        );
        let off = BodyExpr::polytope(&[v(&[1.0, 1.0]), v(&[2.0, 1.0]), v(&[1.0, 2.0])]).unwrap();
        assert_eq!(off.gauge(&v(&[1.0, 0.0])).unwrap_err(), Error::OriginNotInterior);
        assert!(matches!(LinearMap::new(Matrix::zeros(2, 2)), Err(Error::SingularMap)));
        assert!(BodyExpr::lp_sum_node(vec![seg()], 0.5).is_err());
    }

    #[test]
    fn lp_and_facet_gauges_agree() {
        let hexagon: Vec<Vector> = (0..6)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 3.0;
                v(&[a.cos(), a.sin()])
            })
            .collect();
        let h = BodyExpr::polytope(&hexagon).unwrap();
        let p = h.as_polytope().unwrap();
        for k in 0..50 {
            let a = 0.37 * k as f64;
            let x = v(&[a.cos() * (1.0 + 0.1 * k as f64), a.sin()]);
            assert!((p.gauge_lp(&x) - p.gauge_facets(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn translate_of_composite_gauge() {
        let ball = BodyExpr::unit_ball(2).unwrap();
        let t = BodyExpr::translate(ball, v(&[0.5, 0.0])).unwrap();
        assert!(t.origin_interior());
        // boundary point (1.5, 0) has gauge 1; (-0.5, 0) too
        assert!((t.gauge(&v(&[1.5, 0.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((t.gauge(&v(&[-0.5, 0.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((t.support(&v(&[1.0, 0.0])).unwrap() - 1.5).abs() < 1e-15);
        assert!(!t.is_symmetric());
    }

    #[test]
    fn maps_fold_into_polytopes() {
        let m = LinearMap::new(Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let b = BodyExpr::linear_image(&m, cross(2)).unwrap();
        assert!(b.as_polytope().is_some());
        assert!((b.gauge(&v(&[2.0, 0.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((b.gauge_fast(&v(&[1.0, 0.5])).unwrap() - 1.0).abs() < 1e-12);
        let ball = BodyExpr::linear_image(&m, BodyExpr::unit_ball(2).unwrap()).unwrap();
        assert!((ball.gauge(&v(&[2.0, 0.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((ball.support(&v(&[1.0, 0.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lower_dimensional_polytope() {
        let sq = BodyExpr::polytope(&[
            v(&[1.0, 1.0, 0.0]),
            v(&[-1.0, 1.0, 0.0]),
            v(&[1.0, -1.0, 0.0]),
            v(&[-1.0, -1.0, 0.0]),
        ])
        .unwrap();
        let p = sq.as_polytope().unwrap();
        assert_eq!(p.intrinsic_dim(), 2);
        assert!(!sq.origin_interior());
        assert!(sq.is_symmetric());
    }
}
