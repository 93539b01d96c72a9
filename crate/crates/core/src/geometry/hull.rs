//! Facet enumeration, affine spans and vertex pruning for point sets.
//!
//! Three facet routes are kept: an angular sweep in the plane, an
//! incremental hull in space, and a double-description pass that works in any
//! dimension. They are cross-checked against each other in the tests.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::Vector;
use crate::lp::StandardLp;

/// Relative tolerance used for orientation and coplanarity predicates.
const GEOM_EPS: f64 = 1e-10;

/// A vertex is redundant when its ℓ1 distance to the hull of the remaining
/// vertices is below this value (relative to the point-set scale).
pub const PRUNE_TOL: f64 = 1e-9;

/// Closed half-space `normal · x <= offset` with a unit `normal`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn eval(&self, x: &Vector) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// Orthonormal frame of an affine subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFrame {
    pub origin: Vector,
    pub basis: Vec<Vector>,
}

impl AffineFrame {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` (assumed to lie in the subspace) in the frame.
    pub fn coords(&self, x: &Vector) -> Vector {
        let d = x - &self.origin;
        Vector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.dot(&d)))
    }

    pub fn lift(&self, c: &Vector) -> Vector {
        let mut x = self.origin.clone();
        for (b, ci) in self.basis.iter().zip(c.iter()) {
            x.axpy(*ci, b, 1.0);
        }
        x
    }

    /// Euclidean distance from `x` to the affine subspace.
    pub fn distance(&self, x: &Vector) -> f64 {
        (x - self.lift(&self.coords(x))).norm()
    }
}

pub fn scale_of(points: &[Vector]) -> f64 {
    points.iter().map(|p| p.amax()).fold(1e-300, f64::max)
}

pub fn centroid(points: &[Vector]) -> Vector {
    let mut c = Vector::zeros(points[0].len());
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Affine span of a nonempty point set, built by greedy Gram–Schmidt on the
/// largest residuals.
pub fn affine_frame(points: &[Vector]) -> AffineFrame {
    let origin = points[0].clone();
    let tol = 1e-9 * scale_of(points);
    let mut residuals: Vec<Vector> = points.iter().map(|p| p - &origin).collect();
    let mut basis: Vec<Vector> = Vec::new();
    loop {
        let (idx, norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= tol || basis.len() == origin.len() {
            break;
        }
        let b = &residuals[idx] / norm;
        for r in residuals.iter_mut() {
            let c = r.dot(&b);
            r.axpy(-c, &b, 1.0);
        }
        basis.push(b);
    }
    AffineFrame { origin, basis }
}

/// Indices of the planar hull vertices in counter-clockwise order (monotone
/// chain). Collinear boundary points are dropped.
pub fn hull_2d(points: &[Vector]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .partial_cmp(&points[b][0])
            .unwrap()
            .then(points[a][1].partial_cmp(&points[b][1]).unwrap())
    });
    let eps = GEOM_EPS * scale_of(points).powi(2);
    let cross = |o: usize, a: usize, b: usize| {
        (points[a][0] - points[o][0]) * (points[b][1] - points[o][1])
            - (points[a][1] - points[o][1]) * (points[b][0] - points[o][0])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * points.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    // drop near-duplicate points that survive the sweep
    let tol = 1e-12 * scale_of(points);
    let mut out: Vec<usize> = Vec::with_capacity(hull.len());
    for i in hull {
        if out.last().is_none_or(|&j| (&points[i] - &points[j]).amax() > tol) {
            out.push(i);
        }
    }
    if out.len() > 1 && (&points[out[0]] - &points[*out.last().unwrap()]).amax() <= tol {
        out.pop();
    }
    out
}

fn facets_2d(points: &[Vector]) -> Vec<Halfspace> {
    let h = hull_2d(points);
    let k = h.len();
    (0..k)
        .map(|i| {
            let a = &points[h[i]];
            let b = &points[h[(i + 1) % k]];
            let e = b - a;
            let normal = Vector::from_vec(vec![e[1], -e[0]]).normalize();
            let offset = normal.dot(a);
            Halfspace { normal, offset }
        })
        .collect()
}

/// Outward-oriented triangles of the spatial hull (incremental insertion).
/// Returns `None` when the points are coplanar.
pub fn hull_3d(points: &[Vector]) -> Option<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let scale = scale_of(points);
    let eps = GEOM_EPS * scale;
    let p = |i: usize| nalgebra::Vector3::new(points[i][0], points[i][1], points[i][2]);

    // initial tetrahedron from extreme points
    let i0 = 0;
    let i1 = (0..n).max_by(|&a, &b| (p(a) - p(i0)).norm().total_cmp(&(p(b) - p(i0)).norm()))?;
    if (p(i1) - p(i0)).norm() <= eps {
        return None;
    }
    let dir = (p(i1) - p(i0)).normalize();
    let line_dist = |i: usize| {
        let d = p(i) - p(i0);
        (d - dir * d.dot(&dir)).norm()
    };
    let i2 = (0..n).max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b)))?;
    if line_dist(i2) <= eps {
        return None;
    }
    let nrm = (p(i1) - p(i0)).cross(&(p(i2) - p(i0))).normalize();
    let plane_dist = |i: usize| (p(i) - p(i0)).dot(&nrm);
    let i3 = (0..n).max_by(|&a, &b| plane_dist(a).abs().total_cmp(&plane_dist(b).abs()))?;
    if plane_dist(i3).abs() <= eps {
        return None;
    }

    struct Face {
        v: [usize; 3],
        normal: nalgebra::Vector3<f64>,
        offset: f64,
        alive: bool,
    }
    let make = |v: [usize; 3]| {
        let normal = (p(v[1]) - p(v[0])).cross(&(p(v[2]) - p(v[0]))).normalize();
        Face { v, normal, offset: normal.dot(&p(v[0])), alive: true }
    };
    let inner = (p(i0) + p(i1) + p(i2) + p(i3)) / 4.0;
    let mut faces: Vec<Face> = Vec::new();
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = make(tri);
        if f.normal.dot(&inner) > f.offset {
            f = make([tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }

    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge_owner.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }

    for q in 0..n {
        if q == i0 || q == i1 || q == i2 || q == i3 {
            continue;
        }
        let pq = p(q);
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.normal.dot(&pq) - f.offset > eps)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let other = edge_owner[&(b, a)];
                if !visible.contains(&other) {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            faces[fi].alive = false;
            let v = faces[fi].v;
            for k in 0..3 {
                edge_owner.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            let f = make([a, b, q]);
            let fi = faces.len();
            for k in 0..3 {
                edge_owner.insert((f.v[k], f.v[(k + 1) % 3]), fi);
            }
            faces.push(f);
        }
    }
    Some(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn facets_3d(points: &[Vector]) -> Vec<Halfspace> {
    let Some(tris) = hull_3d(points) else {
        return Vec::new();
    };
    let mut out: Vec<Halfspace> = Vec::new();
    for t in tris {
        let a = &points[t[0]];
        let e1 = &points[t[1]] - a;
        let e2 = &points[t[2]] - a;
        let n = Vector::from_vec(vec![
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ])
        .normalize();
        let h = Halfspace { offset: n.dot(a), normal: n };
        push_unique(&mut out, h, scale_of(points));
    }
    out
}

fn push_unique(out: &mut Vec<Halfspace>, h: Halfspace, scale: f64) {
    let dup = out
        .iter()
        .any(|g| (&g.normal - &h.normal).amax() < 1e-7 && (g.offset - h.offset).abs() < 1e-7 * scale);
    if !dup {
        out.push(h);
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

/// Facets of a full-dimensional point set via the double description method
/// applied to the polar cone `{(y, s) : s >= (pᵢ - c)·y}`.
pub fn facets_dd(points: &[Vector]) -> Vec<Halfspace> {
    let n = points[0].len();
    let d = n + 1;
    let c = centroid(points);
    let scale = points.iter().map(|p| (p - &c).norm()).fold(1e-300, f64::max);
    // constraint rows: row · (y, s) >= 0, with row = (-(p - c)/scale, 1)
    let rows: Vec<Vector> = points
        .iter()
        .map(|p| {
            let q = (p - &c) / scale;
            let mut r = Vector::zeros(d);
            for k in 0..n {
                r[k] = -q[k];
            }
            r[n] = 1.0;
            r.normalize()
        })
        .collect();
    let m = rows.len();

    // greedy choice of d linearly independent rows
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<Vector> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut res = r.clone();
        for b in &ortho {
            let k = res.dot(b);
            res.axpy(-k, b, 1.0);
        }
        if res.norm() > 1e-8 {
            ortho.push(res.normalize());
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    if chosen.len() < d {
        return Vec::new();
    }
    let r0 = DMatrix::from_fn(d, d, |i, j| rows[chosen[i]][j]);
    let Some(inv) = r0.try_inverse() else {
        return Vec::new();
    };

    const ZERO: f64 = 1e-9;
    let mut rays: Vec<(Vector, Bits)> = (0..d)
        .map(|j| {
            let v = inv.column(j).into_owned().normalize();
            let mut z = Bits::new(m);
            for (k, &ci) in chosen.iter().enumerate() {
                if k != j {
                    z.set(ci);
                }
            }
            (v, z)
        })
        .collect();

    for (i, row) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|(r, _)| row.dot(r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > ZERO).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -ZERO).collect();
        if neg.is_empty() {
            for k in 0..rays.len() {
                if vals[k].abs() <= ZERO {
                    rays[k].1.set(i);
                }
            }
            continue;
        }
        let mut fresh: Vec<(Vector, Bits)> = Vec::new();
        for &a in &pos {
            for &b in &neg {
                let common = rays[a].1.and(&rays[b].1);
                if common.count() < d - 2 {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != a && k != b)
                    .all(|k| !common.subset_of(&rays[k].1));
                if !adjacent {
                    continue;
                }
                let v = (&rays[b].0 * vals[a] - &rays[a].0 * vals[b]).normalize();
                let mut z = common;
                z.set(i);
                fresh.push((v, z));
            }
        }
        let mut next: Vec<(Vector, Bits)> = Vec::new();
        for (k, ray) in rays.into_iter().enumerate() {
            if vals[k] > ZERO {
                next.push(ray);
            } else if vals[k] >= -ZERO {
                let (v, mut z) = ray;
                z.set(i);
                next.push((v, z));
            }
        }
        next.extend(fresh);
        rays = next;
    }

    let mut out: Vec<Halfspace> = Vec::new();
    for (r, _) in rays {
        let s = r[n];
        if s <= 1e-12 {
            continue;
        }
        // y·(x - c)/scale <= s  <=>  (y/|y|)·x <= (s·scale + y·c)/|y|
        let y = Vector::from_iterator(n, r.iter().take(n).copied());
        let ny = y.norm();
        if ny <= 1e-15 {
            continue;
        }
        let normal = &y / ny;
        let offset = (s * scale + y.dot(&c)) / ny;
        push_unique(&mut out, Halfspace { normal, offset }, scale_of(points));
    }
    out
}

/// Facets of a full-dimensional point set. Empty when the points do not span
/// their ambient space.
pub fn facets(points: &[Vector]) -> Vec<Halfspace> {
    let n = points[0].len();
    if affine_frame(points).dim() < n {
        return Vec::new();
    }
    match n {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            vec![
                Halfspace { normal: Vector::from_element(1, 1.0), offset: hi },
                Halfspace { normal: Vector::from_element(1, -1.0), offset: -lo },
            ]
        }
        2 => facets_2d(points),
        3 => facets_3d(points),
        _ => facets_dd(points),
    }
}

/// ℓ1 distance from `x` to the convex hull of `points`, by linear programming.
pub fn hull_distance_l1(x: &Vector, points: &[Vector]) -> f64 {
    let n = x.len();
    let k = points.len();
    let cols = k + 2 * n;
    let mut lp = StandardLp::new(cols);
    for r in 0..n {
        let mut row = vec![0.0; cols];
        for (j, p) in points.iter().enumerate() {
            row[j] = p[r];
        }
        row[k + r] = 1.0;
        row[k + n + r] = -1.0;
        lp.push_eq(&row, x[r]);
    }
    let mut row = vec![0.0; cols];
    row[..k].iter_mut().for_each(|v| *v = 1.0);
    lp.push_eq(&row, 1.0);
    let mut c = vec![0.0; cols];
    c[k..].iter_mut().for_each(|v| *v = 1.0);
    lp.set_objective(&c);
    lp.minimize().map(|s| s.objective).unwrap_or(f64::INFINITY)
}

/// Membership of `x` in the convex hull of `points` with absolute ℓ1 slack `tol`.
pub fn in_hull(x: &Vector, points: &[Vector], tol: f64) -> bool {
    hull_distance_l1(x, points) <= tol
}

/// Removes duplicates and every point lying (within `PRUNE_TOL`) in the hull of
/// the others. Survivors keep their input order.
pub fn prune(points: &[Vector]) -> Vec<Vector> {
    if points.is_empty() {
        return Vec::new();
    }
    let scale = scale_of(points);
    let mut uniq: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !uniq.iter().any(|q| (q - p).amax() <= 1e-12 * scale) {
            uniq.push(p.clone());
        }
    }
    if uniq.len() <= 1 {
        return uniq;
    }
    let n = uniq[0].len();
    if n == 2 && affine_frame(&uniq).dim() == 2 {
        let mut keep = vec![false; uniq.len()];
        for i in hull_2d(&uniq) {
            keep[i] = true;
        }
        return uniq.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
    }
    let mut alive = vec![true; uniq.len()];
    for i in 0..uniq.len() {
        let others: Vec<Vector> = (0..uniq.len())
            .filter(|&j| j != i && alive[j])
            .map(|j| uniq[j].clone())
            .collect();
        if others.is_empty() {
            continue;
        }
        if hull_distance_l1(&uniq[i], &others) <= PRUNE_TOL * scale {
            alive[i] = false;
        }
    }
    uniq.into_iter().zip(alive).filter(|(_, a)| *a).map(|(p, _)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    fn cube(n: usize) -> Vec<Vector> {
        (0..1usize << n)
            .map(|m| Vector::from_fn(n, |i, _| if m >> i & 1 == 1 { 1.0 } else { -1.0 }))
            .collect()
    }

    fn sorted_offsets(f: &[Halfspace]) -> Vec<f64> {
        let mut o: Vec<f64> = f.iter().map(|h| h.offset).collect();
        o.sort_by(f64::total_cmp);
        o
    }

    #[test]
    fn square_facets_all_routes() {
        let sq = cube(2);
        let a = facets_2d(&sq);
        let b = facets_dd(&sq);
        assert_eq!(a.len(), 4);
        assert_eq!(b.len(), 4);
        for h in a.iter().chain(&b) {
            assert!((h.offset - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_and_cross_polytope_3d() {
        let c = cube(3);
        assert_eq!(facets_3d(&c).len(), 6);
        assert_eq!(facets_dd(&c).len(), 6);
        let mut cross = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut e = Vector::zeros(3);
                e[i] = s;
                cross.push(e);
            }
        }
        let f3 = facets_3d(&cross);
        let fd = facets_dd(&cross);
        assert_eq!(f3.len(), 8);
        assert_eq!(fd.len(), 8);
        let expect = 1.0 / 3f64.sqrt();
        for (x, y) in sorted_offsets(&f3).iter().zip(sorted_offsets(&fd)) {
            assert!((x - expect).abs() < 1e-12 && (y - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn dd_in_four_dimensions() {
        assert_eq!(facets_dd(&cube(4)).len(), 8);
        let mut cross = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut e = Vector::zeros(4);
                e[i] = s;
                cross.push(e);
            }
        }
        assert_eq!(facets_dd(&cross).len(), 16);
    }

    #[test]
    fn degenerate_input_has_no_facets() {
        let flat = vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[1.0, 1.0, 0.0])];
        assert!(facets(&flat).is_empty());
        assert_eq!(affine_frame(&flat).dim(), 2);
    }

    #[test]
    fn prune_removes_interior_and_edge_points() {
        let mut pts = cube(3);
        pts.push(v(&[0.0, 0.0, 0.0]));
        pts.push(v(&[1.0, 0.0, 1.0]));
        pts.push(v(&[1.0, 1.0, 1.0]));
        let pruned = prune(&pts);
        assert_eq!(pruned.len(), 8);
        assert_eq!(prune(&pruned), pruned);

        let mut sq = cube(2);
        sq.insert(1, v(&[0.0, 1.0]));
        sq.push(v(&[0.2, 0.3]));
        assert_eq!(prune(&sq), cube(2));
    }

    #[test]
    fn lower_dimensional_prune_uses_lp() {
        let pts = vec![
            v(&[1.0, 0.0, 0.0]),
            v(&[-1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, -1.0, 0.0]),
            v(&[0.0, 0.0, 0.0]),
            v(&[0.5, 0.5, 0.0]),
        ];
        assert_eq!(prune(&pts).len(), 4);
    }
}
