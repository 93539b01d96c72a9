//! Best translations for a fixed linear part.
//!
//! For fixed `M` the smallest `ρ` with `K ⊆ λ·M(L) + u ⊆ ρK + b` is a linear
//! program in `(λ, u, ρ, b)`. Each facet of `M(L)` contributes one row against
//! the extreme vertex of `K`, and each facet of `K` one row against the
//! support of `M(L)`.

use super::PreparedPair;
use crate::geometry::{Matrix, Vector};
use crate::lp::StandardLp;

/// Linear parts with a larger condition number are rejected.
const MAX_CONDITION: f64 = 1e6;
const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Placement {
    pub ratio: f64,
    pub lambda: f64,
    pub u: Vector,
    pub b: Vector,
}

impl Placement {
    /// Witness `x ↦ M′(x + v) + c` with `M′ = λM` and `c` the homothety
    /// center of `ρK + b` over `K`, or the centroid of `K` when `ρ = 1`.
    pub fn witness(&self, pair: &PreparedPair, m: &Matrix) -> Option<(Matrix, Vector, Vector)> {
        let k = &pair.k;
        let mut c = if self.ratio > 1.0 + 1e-12 { &self.b / (1.0 - self.ratio) } else { k.centroid.clone() };
        // the exact center lies in K; undo rounding by moving toward the centroid
        let mut t = 0.0f64;
        for i in 0..k.normals.nrows() {
            let a = k.normals.row(i);
            let (over, depth) = (a.dot(&c.transpose()) - k.offsets[i], k.offsets[i] - a.dot(&k.centroid.transpose()));
            if over > 0.0 && depth > 0.0 {
                t = t.max(over / (over + depth));
            }
        }
        if t > 0.0 {
            c = &c + (&k.centroid - &c) * t;
        }
        let mm = m * self.lambda;
        let v = mm.clone().try_inverse()? * (&self.u - &c);
        Some((mm, c, v))
    }
}

pub fn place(pair: &PreparedPair, m: &Matrix) -> Option<Placement> {
    let n = pair.n;
    let minv = m.clone().try_inverse()?;
    if !minv.iter().all(|x| x.is_finite()) {
        return None;
    }
    let svd = m.clone().svd(false, false);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if !(smin > MAX_CONDITION.recip() * smax) {
        return None;
    }
    // facets of M(L) with unit normals
    let mut p = &pair.l.normals * &minv;
    let mut hl = pair.l.offsets.clone();
    for j in 0..p.nrows() {
        let norm = p.row(j).norm();
        p.row_mut(j).unscale_mut(norm);
        hl[j] /= norm;
    }
    let k_ext = &p * &pair.k.verts;
    let ml = m * &pair.l.verts;
    let l_ext = &pair.k.normals * &ml;
    let (fl, fk) = (p.nrows(), pair.k.normals.nrows());
    let rows = fl + fk;
    // columns: λ, ρ, u⁺, u⁻, b⁺, b⁻, slacks
    let cols = 2 + 4 * n + rows;
    let (iu, ib, is) = (2, 2 + 2 * n, 2 + 4 * n);
    let mut lp = StandardLp::new(cols);
    let mut row = vec![0.0; cols];
    for j in 0..fl {
        row.fill(0.0);
        row[0] = -hl[j];
        for q in 0..n {
            row[iu + q] = -p[(j, q)];
            row[iu + n + q] = p[(j, q)];
        }
        row[is + j] = 1.0;
        lp.push_eq(&row, -k_ext.row(j).max());
    }
    for i in 0..fk {
        row.fill(0.0);
        row[0] = l_ext.row(i).max();
        row[1] = -pair.k.offsets[i];
        for q in 0..n {
            let a = pair.k.normals[(i, q)];
            row[iu + q] = a;
            row[iu + n + q] = -a;
            row[ib + q] = -a;
            row[ib + n + q] = a;
        }
        row[is + fl + i] = 1.0;
        lp.push_eq(&row, 0.0);
    }
    let mut cost = vec![0.0; cols];
    cost[1] = 1.0;
    lp.set_objective(&cost);
    let x = lp.minimize().ok()?.x;
    let split = |at: usize| Vector::from_fn(n, |q, _| x[at + q] - x[at + n + q]);
    let (lambda, ratio, u, b) = (x[0], x[1], split(iu), split(ib));
    // the simplex tolerances are absolute; re-check the chain in relative terms
    let scale = pair.k.radius.max(lambda * smax * pair.l.radius);
    let inner = (0..fl).all(|j| k_ext.row(j).max() - p.row(j).dot(&u.transpose()) <= lambda * hl[j] + CHECK_TOL * scale);
    let outer = (0..fk).all(|i| {
        let a = pair.k.normals.row(i);
        lambda * l_ext.row(i).max() + a.dot(&(&u - &b).transpose()) <= ratio * pair.k.offsets[i] + CHECK_TOL * scale
    });
    (lambda > 0.0 && ratio >= 1.0 - CHECK_TOL && inner && outer).then_some(Placement { ratio, lambda, u, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmd::verify_chain;
    use crate::constructions::{cube, regular_polygon, simplex_regular_centered};
    use crate::geometry::LinearMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_bodies_place_exactly() {
        let sq = cube(2).unwrap();
        let pair = PreparedPair::new(&sq, &sq).unwrap();
        let p = place(&pair, &Matrix::identity(2, 2)).unwrap();
        assert!((p.ratio - 1.0).abs() < 1e-12 && (p.lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_choice_of_centers_beats_the_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (k, l) = (regular_polygon(5).unwrap(), simplex_regular_centered(2).unwrap());
        let pair = PreparedPair::new(&k, &l).unwrap();
        for _ in 0..20 {
            let m = Matrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 0.0 } + rng.random_range(-0.3..0.3));
            let p = place(&pair, &m).unwrap();
            for _ in 0..20 {
                let c = Vector::from_fn(2, |_, _| rng.random_range(-0.2..0.2));
                let v = Vector::from_fn(2, |_, _| rng.random_range(-0.2..0.2));
                assert!(p.ratio <= pair.ratio(&m, &c, &v) + 1e-9);
            }
            let (mm, c, v) = p.witness(&pair, &m).unwrap();
            let w = LinearMap::with_translations(mm, v, c).unwrap();
            assert!(verify_chain(&k, &l, &w, p.ratio, 1e-9).unwrap());
        }
    }
}
