//! Trust-region sequential linear programming on the position ratio.
//!
//! For symmetric pairs, with the position normalized so that `K ⊆ M(L)` is
//! tight, the ratio is the largest value of `a·My/β` over facets `(a, β)` of
//! `K` and vertices `y` of `L`. Both families of constraints are linearized
//! around the current point and the step minimizing the linearized ratio
//! inside a box is taken when it improves the exact ratio.

use super::translations::place;
use super::PreparedPair;
use crate::geometry::{Matrix, Vector};
use crate::lp::StandardLp;

/// Constraint rows within this relative margin of being active enter the LP.
const ACTIVE_MARGIN: f64 = 0.15;
/// At most this many of the most active rows per constraint family.
const MAX_ROWS: usize = 64;
const MAX_ROUNDS: usize = 80;

/// Linear constraint `value + grad·d <= 0` in the step `d`.
struct Row {
    grad: Vec<f64>,
    value: f64,
}

/// Polish for 0-symmetric pairs, centers fixed at the origin. Returns the
/// improved ratio and linear part.
pub fn polish(pair: &PreparedPair, m: &Matrix) -> (f64, Matrix) {
    let n = pair.n;
    let z = Vector::zeros(n);
    let (mut best, mut ratio) = (m.clone(), pair.ratio(m, &z, &z));
    if !ratio.is_finite() {
        return (ratio, best);
    }
    let mut radius = 0.05;
    for _ in 0..MAX_ROUNDS {
        if radius < 1e-11 {
            break;
        }
        let (s, _) = pair.scales(&best, &z, &z);
        let m = &best * s;
        let Some(step) = lp_step(pair, &m, ratio, radius) else {
            radius *= 0.3;
            continue;
        };
        let m_new = &m + Matrix::from_row_slice(n, n, &step);
        let r = pair.ratio(&m_new, &z, &z);
        if r < ratio * (1.0 - 1e-14) {
            (best, ratio) = (m_new, r);
            radius = (radius * 1.5).min(0.2);
        } else {
            radius *= 0.3;
        }
    }
    (ratio, best)
}

fn most_active(mut rows: Vec<(f64, usize, usize)>) -> Vec<(f64, usize, usize)> {
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    rows.truncate(MAX_ROWS);
    rows
}

fn lp_step(pair: &PreparedPair, m: &Matrix, t: f64, radius: f64) -> Option<Vec<f64>> {
    let n = pair.n;
    let nvar = n * n;
    let minv = m.clone().try_inverse()?;
    let mut rows: Vec<Row> = Vec::new();
    // matrix entries move relative to the matrix size
    let mscale = m.amax().max(1e-12);

    // ratio side: a·My <= τβ, with τ = t + Δτ as last variable
    let (ak, bk, vl) = (&pair.k.normals, &pair.k.offsets, &pair.l.verts);
    let mut active = Vec::new();
    for j in 0..ak.nrows() {
        let ma = m.transpose() * ak.row(j).transpose();
        for i in 0..vl.ncols() {
            let val = ma.dot(&vl.column(i)) / bk[j];
            if val >= t * (1.0 - ACTIVE_MARGIN) {
                active.push((val, j, i));
            }
        }
    }
    for (val, j, i) in most_active(active) {
        let y = vl.column(i);
        let mut grad = vec![0.0; nvar + 1];
        for p in 0..n {
            for q in 0..n {
                grad[p * n + q] = ak[(j, p)] * y[q] / bk[j];
            }
        }
        grad[nvar] = -1.0;
        rows.push(Row { grad, value: val - t });
    }
    // inclusion side: b·M⁻¹x <= γ
    let (al, bl, vk) = (&pair.l.normals, &pair.l.offsets, &pair.k.verts);
    let ws: Vec<Vector> = (0..vk.ncols()).map(|i| &minv * vk.column(i)).collect();
    let mut active = Vec::new();
    for j in 0..al.nrows() {
        let b: Vector = al.row(j).transpose();
        for (i, w) in ws.iter().enumerate() {
            let val = b.dot(w) / bl[j];
            if val >= 1.0 - ACTIVE_MARGIN {
                active.push((val, j, i));
            }
        }
    }
    for (val, j, i) in most_active(active) {
        let mb = minv.transpose() * al.row(j).transpose();
        let w = &ws[i];
        let mut grad = vec![0.0; nvar + 1];
        for p in 0..n {
            for q in 0..n {
                grad[p * n + q] = -mb[p] * w[q] / bl[j];
            }
        }
        rows.push(Row { grad, value: val - 1.0 });
    }

    // standard form: d_j = σ(e_j − r), 0 <= e_j <= 2r; Δτ = τ⁺ − τ⁻;
    // one slack per inequality and per box row
    let r = radius;
    let nrows = rows.len();
    let cols = nvar + 2 + nrows + nvar;
    let mut lp = StandardLp::new(cols);
    for (ri, row) in rows.iter().enumerate() {
        let mut a = vec![0.0; cols];
        let mut rhs = -row.value;
        for j in 0..nvar {
            let g = row.grad[j] * mscale;
            a[j] = g;
            rhs += g * r;
        }
        a[nvar] = row.grad[nvar];
        a[nvar + 1] = -row.grad[nvar];
        a[nvar + 2 + ri] = 1.0;
        lp.push_eq(&a, rhs);
    }
    for j in 0..nvar {
        let mut a = vec![0.0; cols];
        a[j] = 1.0;
        a[nvar + 2 + nrows + j] = 1.0;
        lp.push_eq(&a, 2.0 * r);
    }
    let mut obj = vec![0.0; cols];
    obj[nvar] = 1.0;
    obj[nvar + 1] = -1.0;
    lp.set_objective(&obj);
    let sol = lp.minimize().ok()?;
    if sol.objective > -1e-15 * t {
        return None;
    }
    Some((0..nvar).map(|j| mscale * (sol.x[j] - r)).collect())
}

/// Polish for pairs with free translations, in the center-free form
/// `K ⊆ A(L) + u ⊆ ρK + b`. The outer inclusion is linear in `(A, u, ρ, b)`;
/// the inner one is linearized in `A`. Steps are accepted on the exact
/// translation LP of the new linear part, so centers on the boundary are
/// handled. Returns the improved ratio and linear part.
pub fn polish_free(pair: &PreparedPair, m: &Matrix) -> Option<(f64, Matrix)> {
    let mut p = place(pair, m)?;
    let mut a = m * p.lambda;
    let mut radius = 0.05;
    for _ in 0..MAX_ROUNDS {
        if radius < 1e-11 {
            break;
        }
        let Some(step) = free_step(pair, &a, &p.u, &p.b, p.ratio, radius) else {
            radius *= 0.3;
            continue;
        };
        let trial = &a + step;
        match place(pair, &trial) {
            Some(q) if q.ratio < p.ratio * (1.0 - 1e-14) => {
                a = &trial * q.lambda;
                p = q;
                radius = (radius * 1.5).min(0.2);
            }
            _ => radius *= 0.3,
        }
    }
    Some((p.ratio, a))
}

fn free_step(pair: &PreparedPair, a: &Matrix, u: &Vector, b: &Vector, rho: f64, radius: f64) -> Option<Matrix> {
    let n = pair.n;
    let ainv = a.clone().try_inverse()?;
    let size = pair.k.radius;
    // variables: δA (n², boxed), u⁺, u⁻, b⁺, b⁻, ρ
    let na = n * n;
    let (iu, ib, ir) = (na, na + 2 * n, na + 4 * n);
    let nvar = ir + 1;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();

    // inner: g·A⁻¹(x − u) ≤ e, linearized in A
    let (gl, el, vk) = (&pair.l.normals, &pair.l.offsets, &pair.k.verts);
    let ws: Vec<Vector> = (0..vk.ncols()).map(|i| &ainv * (vk.column(i) - u)).collect();
    let mut active = Vec::new();
    for j in 0..gl.nrows() {
        let g: Vector = gl.row(j).transpose();
        for (i, w) in ws.iter().enumerate() {
            let gap = (g.dot(w) - el[j]) / pair.l.radius;
            if gap >= -ACTIVE_MARGIN {
                active.push((gap, j, i));
            }
        }
    }
    for (_, j, i) in most_active(active) {
        let gb = ainv.transpose() * gl.row(j).transpose();
        let w = &ws[i];
        let x = vk.column(i);
        let mut row = vec![0.0; nvar];
        for p in 0..n {
            for q in 0..n {
                row[p * n + q] = -gb[p] * w[q];
            }
            row[iu + p] = -gb[p];
            row[iu + n + p] = gb[p];
        }
        rows.push((row, el[j] - gb.dot(&x)));
    }
    // outer: a·(Ay + u) − ρh − a·b ≤ 0, exact
    let (ak, hk, vl) = (&pair.k.normals, &pair.k.offsets, &pair.l.verts);
    let ay = a * vl;
    let mut active = Vec::new();
    for i in 0..ak.nrows() {
        let nk: Vector = ak.row(i).transpose();
        for j in 0..vl.ncols() {
            let gap = (nk.dot(&(ay.column(j) + u)) - rho * hk[i] - nk.dot(b)) / size;
            if gap >= -ACTIVE_MARGIN * rho {
                active.push((gap, i, j));
            }
        }
    }
    for (_, i, j) in most_active(active) {
        let nk: Vector = ak.row(i).transpose();
        let y = vl.column(j);
        let mut row = vec![0.0; nvar];
        for p in 0..n {
            for q in 0..n {
                row[p * n + q] = nk[p] * y[q];
            }
            row[iu + p] = nk[p];
            row[iu + n + p] = -nk[p];
            row[ib + p] = -nk[p];
            row[ib + n + p] = nk[p];
        }
        row[ir] = -hk[i];
        rows.push((row, -nk.dot(&(a * y))));
    }

    // standard form: δA_k = σ(e_k − r) with 0 ≤ e_k ≤ 2r, one slack per row
    let sigma = a.amax().max(1e-12);
    let r = radius;
    let nrows = rows.len();
    let cols = nvar + nrows + na;
    let mut lp = StandardLp::new(cols);
    for (k, (row, rhs)) in rows.iter().enumerate() {
        let mut coeffs = vec![0.0; cols];
        let mut rhs = *rhs;
        for j in 0..na {
            coeffs[j] = row[j] * sigma;
            rhs += row[j] * sigma * r;
        }
        coeffs[na..nvar].copy_from_slice(&row[na..nvar]);
        coeffs[nvar + k] = 1.0;
        lp.push_eq(&coeffs, rhs);
    }
    for j in 0..na {
        let mut coeffs = vec![0.0; cols];
        coeffs[j] = 1.0;
        coeffs[nvar + nrows + j] = 1.0;
        lp.push_eq(&coeffs, 2.0 * r);
    }
    let mut obj = vec![0.0; cols];
    obj[ir] = 1.0;
    lp.set_objective(&obj);
    let sol = lp.minimize().ok()?;
    if sol.objective >= rho * (1.0 - 1e-14) {
        return None;
    }
    Some(Matrix::from_fn(n, n, |p, q| sigma * (sol.x[p * n + q] - r)))
}
