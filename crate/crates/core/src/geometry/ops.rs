use super::sampling::{direction_grid, grid_spacing, maximize_on_sphere, refine_on_sphere};
use super::{BodyExpr, LinearMap, Matrix, Polytope, Vector};
use crate::error::{Error, Result};

/// Whether composite bodies without a vertex list may be handled through the
/// direction grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Enabled,
    Disabled,
}

/// Grid directions refined after the coarse pass.
const REFINE_TOP: usize = 8;
const REFINE_CANDIDATES: usize = 64;

fn same_dim(k: &BodyExpr, l: &BodyExpr) -> Result<()> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: l.dim() });
    }
    Ok(())
}

/// Smallest `ρ` with `K ⊆ ρL`.
pub fn inclusion_scale(k: &BodyExpr, l: &BodyExpr) -> Result<f64> {
    inclusion_scale_with(k, l, Sampling::Enabled)
}

pub fn inclusion_scale_with(k: &BodyExpr, l: &BodyExpr, sampling: Sampling) -> Result<f64> {
    same_dim(k, l)?;
    if !l.origin_interior() {
        // a polytope with the origin on its boundary still nests its dilates
        if let (Some(p), Some(vs)) = (l.as_polytope(), k.vertices()) {
            return boundary_origin_scale(p, &vs);
        }
        return Err(Error::OriginNotInterior);
    }
    if let Some(vs) = k.vertices() {
        let mut best = 0.0f64;
        for v in &vs {
            best = best.max(l.gauge_fast(v)?);
        }
        return Ok(best);
    }
    if sampling == Sampling::Disabled {
        return Err(Error::NotVertexEnumerable);
    }
    if !k.origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    let ratio = |u: &Vector| {
        let gl = l.gauge_fast(u).unwrap_or(f64::INFINITY);
        let gk = k.gauge_fast(u).unwrap_or(f64::INFINITY);
        gl / gk
    };
    Ok(maximize_on_sphere(k.dim(), &ratio, REFINE_TOP)[0].1)
}

/// `min{s : vs ⊆ s·P}` for a full-dimensional `P` containing the origin,
/// possibly on its boundary; infinite when a point leaves the tangent cone.
fn boundary_origin_scale(p: &Polytope, vs: &[Vector]) -> Result<f64> {
    if !p.is_full_dimensional() {
        return Err(Error::OriginNotInterior);
    }
    let eps = 1e-12 * p.scale();
    if p.facets().iter().any(|h| h.offset < -eps) {
        return Err(Error::OriginNotInterior);
    }
    let scale = vs.iter().map(|v| v.amax()).fold(p.scale(), f64::max);
    let mut best = 0.0f64;
    for h in p.facets() {
        for v in vs {
            let a = h.normal.dot(v);
            if h.offset > eps {
                best = best.max(a / h.offset);
            } else if a > 1e-12 * scale {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(best)
}

/// Image `M(K + pre) + post`.
pub fn apply_map(t: &LinearMap, k: &BodyExpr) -> Result<BodyExpr> {
    if t.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: t.dim() });
    }
    if let Some(p) = k.as_polytope() {
        return Ok(BodyExpr::from_polytope(p.transformed(t)));
    }
    let shifted = BodyExpr::translate(k.clone(), t.pre.clone())?;
    let mapped = BodyExpr::linear_image(t, shifted)?;
    BodyExpr::translate(mapped, t.post.clone())
}

/// Image of `K` under an idempotent matrix, pruned to its extreme points.
pub fn project(p: &Matrix, k: &BodyExpr) -> Result<BodyExpr> {
    let n = k.dim();
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    if (p * p - p).amax() > 1e-10 {
        return Err(Error::NotIdempotent);
    }
    let vs = k.vertices().ok_or(Error::NotVertexEnumerable)?;
    let image: Vec<Vector> = vs.iter().map(|v| p * v).collect();
    BodyExpr::polytope(&image)
}

/// Polar polytope `{y : ⟨x, y⟩ <= 1 for all x ∈ K}` (dimension at most 3).
pub fn polar(k: &BodyExpr) -> Result<BodyExpr> {
    if k.dim() > 3 {
        return Err(Error::DimensionTooHigh { dim: k.dim(), max: 3 });
    }
    let poly = match k.to_polytope() {
        Some(p) => p?,
        None => return Err(Error::NotVertexEnumerable),
    };
    if !poly.origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    let verts: Vec<Vector> = poly.facets().iter().map(|h| &h.normal / h.offset).collect();
    BodyExpr::polytope(&verts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialExtremes {
    pub r: f64,
    pub big_r: f64,
    /// Boundary points at distance `r` from the origin.
    pub inner: Vec<Vector>,
    /// Boundary points at distance `R` from the origin.
    pub outer: Vec<Vector>,
}

/// Inradius and circumradius about the origin together with the boundary
/// points attaining them (relative tolerance `tol`).
pub fn radial_extremes(k: &BodyExpr, tol: f64) -> Result<RadialExtremes> {
    if !k.origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    match k.to_polytope() {
        Some(p) => Ok(polytope_extremes(&p?, tol)),
        None => Ok(sampled_extremes(k, tol)),
    }
}

fn polytope_extremes(p: &Polytope, tol: f64) -> RadialExtremes {
    let big_r = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let outer = p
        .vertices()
        .iter()
        .filter(|v| v.norm() >= big_r * (1.0 - tol))
        .cloned()
        .collect();
    let r = p.facets().iter().map(|h| h.offset).fold(f64::INFINITY, f64::min);
    let inner = p
        .facets()
        .iter()
        .filter(|h| h.offset <= r * (1.0 + tol))
        .map(|h| &h.normal * h.offset)
        .collect();
    RadialExtremes { r, big_r, inner, outer }
}

fn sampled_extremes(k: &BodyExpr, tol: f64) -> RadialExtremes {
    let n = k.dim();
    let radial = |u: &Vector| 1.0 / k.gauge_fast(u).unwrap_or(f64::INFINITY);
    let grid = direction_grid(n);
    let vals: Vec<f64> = grid.iter().map(radial).collect();
    let h = 1.5 * grid_spacing(n);

    let side = |sign: f64| -> (f64, Vec<Vector>) {
        let f = |u: &Vector| sign * radial(u);
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by(|&a, &b| (sign * vals[b]).total_cmp(&(sign * vals[a])).then(a.cmp(&b)));
        let mut cands: Vec<(Vector, f64)> = order
            .iter()
            .take(REFINE_CANDIDATES)
            .map(|&i| refine_on_sphere(&f, &grid[i], h))
            .collect();
        let best = cands
            .iter()
            .map(|c| c.1)
            .chain(vals.iter().map(|v| sign * v))
            .fold(f64::NEG_INFINITY, f64::max);
        let extreme = sign * best;
        let within = |v: f64| (v - extreme).abs() <= tol * extreme;
        cands.extend(grid.iter().zip(&vals).map(|(u, v)| (u.clone(), sign * v)));
        cands.retain(|(_, v)| within(sign * v));
        cands.sort_by(|a, b| b.1.total_cmp(&a.1));
        // near a smooth extremum the value tolerance admits an angular spread
        // of order sqrt(tol), so representatives are kept per grid cell
        let mut reps: Vec<Vector> = Vec::new();
        for (u, _) in cands {
            if !reps.iter().any(|r| (r - &u).norm() <= 0.4 * h / 1.5) {
                reps.push(u);
            }
        }
        let pts = reps.into_iter().map(|u| &u * (1.0 / k.gauge_fast(&u).unwrap_or(f64::INFINITY))).collect();
        (extreme, pts)
    };
    let (big_r, outer) = side(1.0);
    let (r, inner) = side(-1.0);
    RadialExtremes { r, big_r, inner, outer }
}
