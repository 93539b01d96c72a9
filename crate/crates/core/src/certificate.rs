//! Optimality certificates for positions relative to the Euclidean ball.
//!
//! A body `K` with `rB ⊆ K ⊆ RB` is at distance exactly `R/r` from the ball
//! when the contact points `yᵢ ∈ bd K ∩ bd rB` and `zⱼ ∈ bd K ∩ bd RB` carry
//! positive weights with `Σ λᵢ yᵢyᵢᵀ = Σ μⱼ zⱼzⱼᵀ`. Non-symmetric bodies also
//! need `Σ λᵢ yᵢ = Σ μⱼ zⱼ = 0`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{radial_extremes, BodyExpr, Matrix, Vector};
use crate::lp::StandardLp;

/// Relative tolerance for a boundary point to count as a contact point.
pub const CONTACT_TOL: f64 = 1e-7;
/// Contacts closer than this (relative to `R`) are merged.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Minimal weight for the decomposition to count as strictly positive.
pub const WEIGHT_THRESHOLD: f64 = 1e-10;
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Contacts {
    pub r: f64,
    pub big_r: f64,
    pub inner: Vec<Vector>,
    pub outer: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactCertificate {
    pub inner: Vec<Vector>,
    pub outer: Vec<Vector>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub balanced: bool,
    /// Largest entry of `Σλyyᵀ − Σμzzᵀ` in absolute value, plus the
    /// balancing sums when `balanced`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    /// `R/r`, equal to the distance to the ball when the certificate holds.
    pub value: f64,
    pub r: f64,
    pub big_r: f64,
    pub certificate: ContactCertificate,
    /// Set when contacts were located by sampling rather than enumerated.
    pub heuristic: bool,
}

fn merge_close(points: Vec<Vector>, radius: f64) -> Vec<Vector> {
    let mut groups: Vec<(Vector, usize)> = Vec::new();
    for p in points {
        match groups.iter_mut().find(|(c, k)| (c.clone() / *k as f64 - &p).norm() <= radius) {
            Some((sum, k)) => {
                *sum += &p;
                *k += 1;
            }
            None => groups.push((p, 1)),
        }
    }
    groups.into_iter().map(|(s, k)| s / k as f64).collect()
}

/// Inradius, circumradius and the contact points attaining them.
pub fn find_contacts(k: &BodyExpr, tol: f64) -> Result<Contacts> {
    let ext = radial_extremes(k, tol)?;
    let radius = CLUSTER_RADIUS * ext.big_r;
    Ok(Contacts {
        r: ext.r,
        big_r: ext.big_r,
        inner: merge_close(ext.inner, radius),
        outer: merge_close(ext.outer, radius),
    })
}

/// Equality rows of the decomposition in the unknowns `(λ, μ)`.
fn decomposition_rows(inner: &[Vector], outer: &[Vector], balanced: bool) -> Vec<(Vec<f64>, f64)> {
    let n = inner[0].len();
    let cols = inner.len() + outer.len();
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut row = vec![0.0; cols];
            for (i, y) in inner.iter().enumerate() {
                row[i] = y[a] * y[b];
            }
            for (j, z) in outer.iter().enumerate() {
                row[inner.len() + j] = -z[a] * z[b];
            }
            rows.push((row, 0.0));
        }
    }
    let mut total = vec![0.0; cols];
    total[..inner.len()].fill(1.0);
    rows.push((total, 1.0));
    if balanced {
        for a in 0..n {
            let mut row = vec![0.0; cols];
            for (i, y) in inner.iter().enumerate() {
                row[i] = y[a];
            }
            rows.push((row, 0.0));
            let mut row = vec![0.0; cols];
            for (j, z) in outer.iter().enumerate() {
                row[inner.len() + j] = z[a];
            }
            rows.push((row, 0.0));
        }
    }
    rows
}

/// Indices that can carry positive weight in some solution.
fn usable_points(rows: &[(Vec<f64>, f64)], cols: usize) -> Result<Option<Vec<bool>>> {
    let mut usable = vec![false; cols];
    loop {
        let mut lp = StandardLp::new(cols);
        for (a, b) in rows {
            lp.push_eq(a, *b);
        }
        let obj: Vec<f64> = usable.iter().map(|u| if *u { 0.0 } else { -1.0 }).collect();
        if obj.iter().all(|c| *c == 0.0) {
            return Ok(Some(usable));
        }
        lp.set_objective(&obj);
        let sol = match lp.minimize() {
            Ok(s) => s,
            Err(crate::lp::LpError::Infeasible) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut found = false;
        for (j, x) in sol.x.iter().enumerate() {
            if !usable[j] && *x > WEIGHT_THRESHOLD {
                usable[j] = true;
                found = true;
            }
        }
        if !found {
            return Ok(Some(usable));
        }
    }
}

/// Largest `ε` with all usable weights `≥ ε`; weights of the optimum.
fn max_min_weight(rows: &[(Vec<f64>, f64)], keep: &[usize]) -> Result<Option<(f64, Vec<f64>)>> {
    // w_j = ε + a_j with ε, a_j ≥ 0
    let cols = keep.len() + 1;
    let mut lp = StandardLp::new(cols);
    for (a, b) in rows {
        let mut row = vec![0.0; cols];
        for (k, &j) in keep.iter().enumerate() {
            row[k] = a[j];
            row[cols - 1] += a[j];
        }
        lp.push_eq(&row, *b);
    }
    let mut obj = vec![0.0; cols];
    obj[cols - 1] = -1.0;
    lp.set_objective(&obj);
    match lp.minimize() {
        Ok(sol) => {
            let eps = sol.x[cols - 1];
            Ok(Some((eps, sol.x[..keep.len()].iter().map(|a| a + eps).collect())))
        }
        Err(crate::lp::LpError::Infeasible) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Replaces each weight by the mean over the point and its negative when
/// both are present.
fn average_antipodes(points: &[Vector], weights: &mut [f64]) {
    let orig = weights.to_vec();
    for (i, p) in points.iter().enumerate() {
        let tol = 1e-9 * p.norm().max(1e-300);
        if let Some(j) = points.iter().position(|q| (q + p).norm() <= tol) {
            weights[i] = 0.5 * (orig[i] + orig[j]);
        }
    }
}

fn residual_of(inner: &[Vector], outer: &[Vector], lambda: &[f64], mu: &[f64], balanced: bool) -> f64 {
    let n = inner.first().or(outer.first()).map_or(0, |v| v.len());
    let mut m = Matrix::zeros(n, n);
    for (y, l) in inner.iter().zip(lambda) {
        m += y * y.transpose() * *l;
    }
    for (z, w) in outer.iter().zip(mu) {
        m -= z * z.transpose() * *w;
    }
    let mut res = m.amax();
    if balanced {
        let sy = inner.iter().zip(lambda).fold(Vector::zeros(n), |acc, (y, l)| acc + y * *l);
        let sz = outer.iter().zip(mu).fold(Vector::zeros(n), |acc, (z, w)| acc + z * *w);
        res += sy.amax() + sz.amax();
    }
    res
}

/// Positive weights realizing the decomposition, or `None` when no subset of
/// the contacts admits one.
pub fn check_decomposition(inner: &[Vector], outer: &[Vector], balanced: bool) -> Result<Option<ContactCertificate>> {
    if inner.is_empty() || outer.is_empty() {
        return Err(Error::EmptyContactSet);
    }
    let n = inner[0].len();
    if inner.iter().chain(outer).any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: inner.iter().chain(outer).find(|p| p.len() != n).unwrap().len() });
    }
    // solve on unit vectors so that both weight families sum to one
    let r = inner.iter().map(|y| y.norm()).sum::<f64>() / inner.len() as f64;
    let big_r = outer.iter().map(|z| z.norm()).sum::<f64>() / outer.len() as f64;
    if !(r > 0.0 && big_r > 0.0) {
        return Err(Error::InvalidInput("contact points must be nonzero".into()));
    }
    let ys: Vec<Vector> = inner.iter().map(|y| y / r).collect();
    let zs: Vec<Vector> = outer.iter().map(|z| z / big_r).collect();
    let rows = decomposition_rows(&ys, &zs, balanced);
    let cols = ys.len() + zs.len();
    let Some(usable) = usable_points(&rows, cols)? else {
        return Ok(None);
    };
    let keep_in: Vec<usize> = (0..ys.len()).filter(|&i| usable[i]).collect();
    let keep_out: Vec<usize> = (ys.len()..cols).filter(|&j| usable[j]).collect();
    if keep_in.is_empty() || keep_out.is_empty() {
        return Ok(None);
    }
    let keep: Vec<usize> = keep_in.iter().chain(&keep_out).copied().collect();
    let Some((eps, w)) = max_min_weight(&rows, &keep)? else {
        return Ok(None);
    };
    if eps <= WEIGHT_THRESHOLD {
        return Ok(None);
    }
    let inner_kept: Vec<Vector> = keep_in.iter().map(|&i| inner[i].clone()).collect();
    let outer_kept: Vec<Vector> = keep_out.iter().map(|&j| outer[j - ys.len()].clone()).collect();
    let mut lambda = w[..keep_in.len()].to_vec();
    let mut mu = w[keep_in.len()..].to_vec();
    if !balanced {
        average_antipodes(&inner_kept, &mut lambda);
        average_antipodes(&outer_kept, &mut mu);
    }
    // back to the original scale: λ y yᵀ stays, μ picks up (r/R)²
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);
    let ratio2 = (r / big_r).powi(2);
    mu.iter_mut().for_each(|m| *m *= ratio2 / total);
    let residual = residual_of(&inner_kept, &outer_kept, &lambda, &mu, balanced);
    Ok(Some(ContactCertificate { inner: inner_kept, outer: outer_kept, lambda, mu, balanced, residual }))
}

/// Certifies `d_BM(K, B) = R/r` for `K` in its current position.
pub fn certify_euclidean_distance(k: &BodyExpr) -> Result<Certification> {
    let contacts = find_contacts(k, CONTACT_TOL)?;
    let balanced = !k.is_symmetric();
    let cert = check_decomposition(&contacts.inner, &contacts.outer, balanced)?;
    match cert {
        Some(c) if c.residual <= RESIDUAL_TOL => Ok(Certification {
            value: contacts.big_r / contacts.r,
            r: contacts.r,
            big_r: contacts.big_r,
            certificate: c,
            heuristic: k.as_polytope().is_none() && k.vertices().is_none(),
        }),
        _ => Err(Error::NotOptimalPosition),
    }
}

/// Adds the negative of every point, halving weights, and merges repeats.
fn pair_with_negatives(points: &[Vector], weights: &[f64]) -> (Vec<Vector>, Vec<f64>) {
    let mut pts: Vec<Vector> = Vec::new();
    let mut ws: Vec<f64> = Vec::new();
    for (p, w) in points.iter().zip(weights) {
        for q in [p.clone(), -p] {
            let tol = 1e-12 * q.norm().max(1.0);
            match pts.iter().position(|x| (x - &q).norm() <= tol) {
                Some(i) => ws[i] += 0.5 * w,
                None => {
                    pts.push(q);
                    ws.push(0.5 * w);
                }
            }
        }
    }
    (pts, ws)
}

/// Certificate for `C₁ ⊕_p C₂ ⊕_p …` built from certificates of the
/// summands, each in position `B ⊆ Cᵢ ⊆ dᵢB`. Requires `p ∈ (2, ∞]`.
pub fn lp_sum_certificate(children: &[Certification], p: f64) -> Result<Certification> {
    if !(p > 2.0) {
        return Err(Error::InvalidP(p));
    }
    let Some((first, rest)) = children.split_first() else {
        return Err(Error::InvalidInput("no summands".into()));
    };
    for c in children {
        if (c.r - 1.0).abs() > 1e-9 {
            return Err(Error::HypothesisViolated(format!("summand inradius {} is not 1", c.r)));
        }
    }
    rest.iter().try_fold(first.clone(), |acc, c| Ok(lp_sum_pair(&acc, c, p)))
}

fn lp_sum_pair(c1: &Certification, c2: &Certification, p: f64) -> Certification {
    let (d1, d2) = (c1.big_r, c2.big_r);
    let prep = |c: &ContactCertificate| {
        if c.balanced {
            (c.inner.clone(), c.lambda.clone(), c.outer.clone(), c.mu.clone())
        } else {
            let (y, a) = pair_with_negatives(&c.inner, &c.lambda);
            let (z, b) = pair_with_negatives(&c.outer, &c.mu);
            (y, a, z, b)
        }
    };
    let (ys, mut alpha, zs, mut beta) = prep(&c1.certificate);
    let (us, mut gamma, vs, mut delta) = prep(&c2.certificate);
    // exponents 4/(p−2), 2/(p−2) and 2p/(p−2); p = ∞ is the limit
    let (e4, e2, e2p) = if p.is_infinite() { (0.0, 0.0, 2.0) } else { (4.0 / (p - 2.0), 2.0 / (p - 2.0), 2.0 * p / (p - 2.0)) };
    let rescale = |w: &mut Vec<f64>, f: f64| w.iter_mut().for_each(|x| *x *= f);
    let f1 = 1.0 / (d2.powf(e4) * beta.iter().sum::<f64>());
    rescale(&mut alpha, f1);
    rescale(&mut beta, f1);
    let f2 = 1.0 / (d1.powf(e4) * delta.iter().sum::<f64>());
    rescale(&mut gamma, f2);
    rescale(&mut delta, f2);

    let r_exp = crate::geometry::euclidean_sum_exponent(p);
    let norm_d = crate::geometry::lp_combine(&[d1, d2], r_exp);
    let s = d1.powf(e2p) + d2.powf(e2p);
    let factor = norm_d / s.sqrt();
    let omega_scale = s / (norm_d * norm_d);
    let (n1, n2) = (ys[0].len(), us[0].len());
    let concat = |a: &Vector, b: &Vector| Vector::from_iterator(n1 + n2, a.iter().chain(b.iter()).copied());

    let mut inner = Vec::new();
    let mut lambda = Vec::new();
    for (y, a) in ys.iter().zip(&alpha) {
        inner.push(concat(y, &Vector::zeros(n2)));
        lambda.push(*a);
    }
    for (u, g) in us.iter().zip(&gamma) {
        inner.push(concat(&Vector::zeros(n1), u));
        lambda.push(*g);
    }
    let mut outer = Vec::new();
    let mut mu = Vec::new();
    for (z, b) in zs.iter().zip(&beta) {
        for (v, d) in vs.iter().zip(&delta) {
            outer.push(concat(&(z * (factor * d1.powf(e2))), &(v * (factor * d2.powf(e2)))));
            mu.push(omega_scale * b * d);
        }
    }
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|x| *x /= total);
    mu.iter_mut().for_each(|x| *x /= total);
    let balanced = c1.certificate.balanced || c2.certificate.balanced;
    let residual = residual_of(&inner, &outer, &lambda, &mu, balanced);
    Certification {
        value: norm_d,
        r: 1.0,
        big_r: norm_d,
        certificate: ContactCertificate { inner, outer, lambda, mu, balanced, residual },
        heuristic: false,
    }
}

fn vecs_to_json(v: &[Vector]) -> Value {
    Value::Array(v.iter().map(|x| json!(x.iter().copied().collect::<Vec<f64>>())).collect())
}

fn vecs_from_json(v: &Value) -> Result<Vec<Vector>> {
    let arr = v.as_array().ok_or_else(|| Error::InvalidInput("expected a list of points".into()))?;
    arr.iter()
        .map(|p| {
            let xs = p.as_array().ok_or_else(|| Error::InvalidInput("expected a point".into()))?;
            xs.iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::InvalidInput("expected a number".into())))
                .collect::<Result<Vec<f64>>>()
                .map(Vector::from_vec)
        })
        .collect()
}

fn floats_from_json(v: &Value) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| Error::InvalidInput("expected a list of weights".into()))?;
    arr.iter().map(|x| x.as_f64().ok_or_else(|| Error::InvalidInput("expected a number".into()))).collect()
}

impl ContactCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "inner": vecs_to_json(&self.inner),
            "outer": vecs_to_json(&self.outer),
            "lambda": self.lambda,
            "mu": self.mu,
            "balanced": self.balanced,
            "residual": self.residual,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::InvalidInput(format!("missing field `{k}`")));
        Ok(Self {
            inner: vecs_from_json(field("inner")?)?,
            outer: vecs_from_json(field("outer")?)?,
            lambda: floats_from_json(field("lambda")?)?,
            mu: floats_from_json(field("mu")?)?,
            balanced: field("balanced")?.as_bool().ok_or_else(|| Error::InvalidInput("`balanced` must be a boolean".into()))?,
            residual: field("residual")?.as_f64().ok_or_else(|| Error::InvalidInput("`residual` must be a number".into()))?,
        })
    }
}

impl Certification {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "r": self.r,
            "R": self.big_r,
            "heuristic": self.heuristic,
            "certificate": self.certificate.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let num = |k: &str| {
            v.get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::InvalidInput(format!("missing numeric field `{k}`")))
        };
        Ok(Self {
            value: num("value")?,
            r: num("r")?,
            big_r: num("R")?,
            heuristic: v.get("heuristic").and_then(Value::as_bool).unwrap_or(false),
            certificate: ContactCertificate::from_json(
                v.get("certificate").ok_or_else(|| Error::InvalidInput("missing field `certificate`".into()))?,
            )?,
        })
    }
}

/// Outcome of re-checking a certificate's arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub valid: bool,
    pub residual: f64,
    pub min_weight: f64,
    pub weight_sum: f64,
    /// Largest relative deviation of contact norms from `r` and `R`.
    pub radius_spread: f64,
}

/// Recomputes residual, positivity and normalization without any LP.
pub fn verify_certificate(c: &Certification) -> Replay {
    let cert = &c.certificate;
    let shapes_ok = cert.inner.len() == cert.lambda.len()
        && cert.outer.len() == cert.mu.len()
        && !cert.inner.is_empty()
        && !cert.outer.is_empty();
    if !shapes_ok {
        return Replay { valid: false, residual: f64::INFINITY, min_weight: 0.0, weight_sum: 0.0, radius_spread: f64::INFINITY };
    }
    let residual = residual_of(&cert.inner, &cert.outer, &cert.lambda, &cert.mu, cert.balanced);
    let min_weight = cert.lambda.iter().chain(&cert.mu).copied().fold(f64::INFINITY, f64::min);
    let weight_sum: f64 = cert.lambda.iter().sum();
    let spread = |pts: &[Vector], rad: f64| pts.iter().map(|p| (p.norm() - rad).abs() / rad).fold(0.0, f64::max);
    let radius_spread = spread(&cert.inner, c.r).max(spread(&cert.outer, c.big_r));
    let valid = residual <= RESIDUAL_TOL
        && min_weight > 0.0
        && (weight_sum - 1.0).abs() <= 1e-9
        && radius_spread <= 1e-6
        && (c.value - c.big_r / c.r).abs() <= 1e-12 * c.value.max(1.0);
    Replay { valid, residual, min_weight, weight_sum, radius_spread }
}
