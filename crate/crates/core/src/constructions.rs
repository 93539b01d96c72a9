//! Builders for ℓp-sums, cones, double cones, Hanner polytopes and standard
//! bodies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{BodyExpr, LinearMap, Matrix, Vector};

pub mod equilateral;

pub const POLYGON_DISC_DEFAULT: usize = 512;

/// ℓp-sum of bodies. For `p ∈ {1, ∞}` and polytope children the result is a
/// polytope (hull of the embedded children, resp. product of the vertex
/// sets); otherwise an ℓp-sum node.
pub fn lp_sum(bodies: &[BodyExpr], p: f64) -> Result<BodyExpr> {
    let node = BodyExpr::lp_sum_node(bodies.to_vec(), p)?;
    if p == 1.0 || p.is_infinite() {
        if let Some(vs) = node.vertices() {
            return BodyExpr::polytope(&vs);
        }
    }
    Ok(node)
}

fn pad(v: &Vector, n: usize) -> Vector {
    let mut out = Vector::zeros(n);
    out.rows_mut(0, v.len()).copy_from(v);
    out
}

/// Vertices of `base` and the apexes, with the base zero-padded to the apex
/// dimension when it lives in a lower-dimensional space.
fn base_and_apexes(base: &BodyExpr, apexes: &[Vector]) -> Result<(Vec<Vector>, usize)> {
    let bv = base.vertices().ok_or(Error::NotVertexEnumerable)?;
    let n = apexes.first().map_or(base.dim(), |a| a.len());
    if n < base.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), found: n });
    }
    if let Some(a) = apexes.iter().find(|a| a.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: a.len() });
    }
    Ok((bv.iter().map(|v| pad(v, n)).collect(), n))
}

fn full_dimensional(points: &[Vector]) -> Result<BodyExpr> {
    let body = BodyExpr::polytope(points)?;
    match body.as_polytope() {
        Some(p) if p.is_full_dimensional() => Ok(body),
        _ => Err(Error::DegenerateCone),
    }
}

/// `conv(B ∪ {apexes})`.
pub fn cone(base: &BodyExpr, apexes: &[Vector]) -> Result<BodyExpr> {
    let (mut pts, _) = base_and_apexes(base, apexes)?;
    pts.extend(apexes.iter().cloned());
    full_dimensional(&pts)
}

/// `conv(B ∪ {±apexes})` over a 0-symmetric base.
pub fn double_cone(base: &BodyExpr, apexes: &[Vector]) -> Result<BodyExpr> {
    if !base.is_symmetric() {
        return Err(Error::NotSymmetricBase);
    }
    let (mut pts, _) = base_and_apexes(base, apexes)?;
    for a in apexes {
        pts.push(a.clone());
        pts.push(-a);
    }
    full_dimensional(&pts)
}

pub fn segment() -> BodyExpr {
    BodyExpr::polytope(&[Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)])
        .expect("segment")
}

pub fn cross_polytope(n: usize) -> Result<BodyExpr> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = Vector::zeros(n);
            e[i] = s;
            pts.push(e);
        }
    }
    BodyExpr::polytope(&pts)
}

pub fn cube(n: usize) -> Result<BodyExpr> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidInput(format!("cube dimension {n} out of range")));
    }
    let pts: Vec<Vector> = (0..1usize << n)
        .map(|m| Vector::from_fn(n, |i, _| if m >> i & 1 == 1 { 1.0 } else { -1.0 }))
        .collect();
    BodyExpr::polytope(&pts)
}

/// Regular simplex with centroid 0, circumradius `n` and inradius 1.
pub fn simplex_regular_centered(n: usize) -> Result<BodyExpr> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    // orthonormal basis of {x ∈ R^{n+1} : Σx = 0}, via Helmert's construction
    let basis: Vec<Vector> = (1..=n)
        .map(|k| {
            let mut b = Vector::zeros(n + 1);
            for i in 0..k {
                b[i] = 1.0;
            }
            b[k] = -(k as f64);
            b.normalize()
        })
        .collect();
    let c = 1.0 / (n + 1) as f64;
    let circ = (n as f64 / (n + 1) as f64).sqrt();
    let pts: Vec<Vector> = (0..=n)
        .map(|i| {
            let mut e = Vector::from_element(n + 1, -c);
            e[i] += 1.0;
            Vector::from_iterator(n, basis.iter().map(|b| b.dot(&e) * n as f64 / circ))
        })
        .collect();
    BodyExpr::polytope(&pts)
}

/// Regular `m`-gon with circumradius 1 and a vertex at `(1, 0)`.
pub fn regular_polygon(m: usize) -> Result<BodyExpr> {
    rotated_polygon(m, 0.0)
}

pub fn rotated_polygon(m: usize, angle: f64) -> Result<BodyExpr> {
    if m < 3 {
        return Err(Error::InvalidInput(format!("polygon needs at least 3 vertices, got {m}")));
    }
    let pts: Vec<Vector> = (0..m)
        .map(|k| {
            let a = angle + 2.0 * PI * k as f64 / m as f64;
            Vector::from_vec(vec![a.cos(), a.sin()])
        })
        .collect();
    BodyExpr::polytope(&pts)
}

/// Regular `m`-gon standing in for the Euclidean disc; its radial function is
/// within `1 − cos(π/m)` of 1.
pub fn polygon_disc(m: usize) -> Result<BodyExpr> {
    regular_polygon(m)
}

/// Named standard bodies. `param` is the vertex count for the polygon
/// families.
pub fn standard_body(name: &str, n: usize, param: Option<usize>) -> Result<BodyExpr> {
    match name {
        "cross_polytope" => cross_polytope(n),
        "cube" => cube(n),
        "simplex_regular_centered" => simplex_regular_centered(n),
        "regular_polygon" => regular_polygon(param.unwrap_or(n)),
        "polygon_disc" => polygon_disc(param.unwrap_or(POLYGON_DISC_DEFAULT)),
        "segment" => Ok(segment()),
        "ball" => BodyExpr::unit_ball(n),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// Hanner tree: segments combined by ℓ1- and ℓ∞-sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HannerSpec {
    Seg,
    L1(Vec<HannerSpec>),
    Linf(Vec<HannerSpec>),
}

impl HannerSpec {
    pub fn dim(&self) -> usize {
        match self {
            HannerSpec::Seg => 1,
            HannerSpec::L1(c) | HannerSpec::Linf(c) => c.iter().map(HannerSpec::dim).sum(),
        }
    }

    /// Every binary Hanner tree with `n` leaves (both node kinds at each
    /// split). Different trees may describe the same polytope.
    pub fn all_binary(n: usize) -> Vec<HannerSpec> {
        if n == 1 {
            return vec![HannerSpec::Seg];
        }
        let mut out = Vec::new();
        for left in 1..n {
            for a in Self::all_binary(left) {
                for b in Self::all_binary(n - left) {
                    out.push(HannerSpec::L1(vec![a.clone(), b.clone()]));
                    out.push(HannerSpec::Linf(vec![a.clone(), b]));
                }
            }
        }
        out
    }
}

impl fmt::Display for HannerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, kids) = match self {
            HannerSpec::Seg => return write!(f, "seg"),
            HannerSpec::L1(c) => ("l1", c),
            HannerSpec::Linf(c) => ("linf", c),
        };
        write!(f, "{name}(")?;
        for (i, k) in kids.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

struct Parser<'a> {
    s: &'a [u8],
    at: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.at < self.s.len() && self.s[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::MalformedSpec(format!("{what} at offset {}", self.at))
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.at;
        while self.at < self.s.len() && self.s[self.at].is_ascii_alphanumeric() {
            self.at += 1;
        }
        std::str::from_utf8(&self.s[start..self.at]).unwrap_or("")
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.at) == Some(&c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn node(&mut self) -> Result<HannerSpec> {
        let id = self.ident().to_string();
        match id.as_str() {
            "seg" => Ok(HannerSpec::Seg),
            "l1" | "linf" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected `(`"));
                }
                let mut kids = vec![self.node()?];
                while self.eat(b',') {
                    kids.push(self.node()?);
                }
                if !self.eat(b')') {
                    return Err(self.err("expected `,` or `)`"));
                }
                Ok(if id == "l1" { HannerSpec::L1(kids) } else { HannerSpec::Linf(kids) })
            }
            "" => Err(self.err("expected `seg`, `l1(` or `linf(`")),
            other => Err(Error::MalformedSpec(format!("unknown node `{other}`"))),
        }
    }
}

impl FromStr for HannerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { s: s.as_bytes(), at: 0 };
        let spec = p.node()?;
        p.skip_ws();
        if p.at != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(spec)
    }
}

/// Hanner polytope built from `[-1, 1]` segments by plain ℓ1/ℓ∞-sums.
pub fn hanner(spec: &HannerSpec) -> Result<BodyExpr> {
    match spec {
        HannerSpec::Seg => Ok(segment()),
        HannerSpec::L1(kids) | HannerSpec::Linf(kids) => {
            let bodies: Vec<BodyExpr> = kids.iter().map(hanner).collect::<Result<_>>()?;
            let p = if matches!(spec, HannerSpec::L1(_)) { 1.0 } else { f64::INFINITY };
            lp_sum(&bodies, p)
        }
    }
}

/// Hanner polytope in the position `B ⊆ C ⊆ √n·B`. ℓ∞-sums keep children
/// as they are; ℓ1-sums shrink each child by `1/√nᵢ` and rescale the sum by
/// `√n`.
pub fn hanner_positioned(spec: &HannerSpec) -> Result<BodyExpr> {
    match spec {
        HannerSpec::Seg => Ok(segment()),
        HannerSpec::Linf(kids) => {
            let bodies: Vec<BodyExpr> = kids.iter().map(hanner_positioned).collect::<Result<_>>()?;
            lp_sum(&bodies, f64::INFINITY)
        }
        HannerSpec::L1(kids) => {
            let bodies: Vec<BodyExpr> = kids
                .iter()
                .map(|k| {
                    let c = hanner_positioned(k)?;
                    scale(&c, 1.0 / (k.dim() as f64).sqrt())
                })
                .collect::<Result<_>>()?;
            scale(&lp_sum(&bodies, 1.0)?, (spec.dim() as f64).sqrt())
        }
    }
}

/// `s·K` for `s > 0`.
pub fn scale(body: &BodyExpr, s: f64) -> Result<BodyExpr> {
    let n = body.dim();
    BodyExpr::linear_image(&LinearMap::new(Matrix::identity(n, n) * s)?, body.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::radial_extremes;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    fn nverts(b: &BodyExpr) -> usize {
        b.vertices().unwrap().len()
    }

    #[test]
    fn lp_sum_examples() {
        let s = segment();
        let l1 = lp_sum(&[s.clone(), s.clone()], 1.0).unwrap();
        assert_eq!(l1, cross_polytope(2).unwrap());
        let linf = lp_sum(&[s.clone(), s.clone()], f64::INFINITY).unwrap();
        assert_eq!(nverts(&linf), 4);
        assert!((linf.gauge(&v(&[0.3, -0.9])).unwrap() - 0.9).abs() < 1e-12);
        let two = lp_sum(&[cross_polytope(2).unwrap(), s], 2.0).unwrap();
        assert!((two.gauge(&v(&[1.0, 0.0, 1.0])).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(lp_sum(&[segment()], 0.5).unwrap_err(), Error::InvalidP(0.5));
    }

    #[test]
    fn cone_examples() {
        let sq: Vec<Vector> = cube(2).unwrap().vertices().unwrap().iter().map(|x| pad(x, 3)).collect();
        let sq = BodyExpr::polytope(&sq).unwrap();
        let e3 = v(&[0.0, 0.0, 1.0]);
        assert_eq!(nverts(&cone(&sq, std::slice::from_ref(&e3)).unwrap()), 5);
        assert_eq!(cone(&sq, &[v(&[0.2, 0.1, 0.0])]).unwrap_err(), Error::DegenerateCone);
        let hex = regular_polygon(6).unwrap();
        assert_eq!(nverts(&cone(&hex, std::slice::from_ref(&e3)).unwrap()), 7);
    }

    #[test]
    fn double_cone_examples() {
        let e3 = v(&[0.0, 0.0, 1.0]);
        let b = double_cone(&cross_polytope(2).unwrap(), std::slice::from_ref(&e3)).unwrap();
        assert_eq!(b.vertices().unwrap().len(), 6);
        assert!((b.gauge(&v(&[0.2, -0.3, 0.4])).unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(nverts(&double_cone(&cube(2).unwrap(), &[e3]).unwrap()), 6);
        let d = double_cone(&segment(), &[v(&[0.0, 1.0])]).unwrap();
        assert_eq!(nverts(&d), 4);
        let tri = simplex_regular_centered(2).unwrap();
        assert_eq!(double_cone(&tri, &[v(&[0.0, 0.0, 1.0])]).unwrap_err(), Error::NotSymmetricBase);
    }

    #[test]
    fn hanner_examples() {
        let cube3 = hanner(&"linf(seg,seg,seg)".parse().unwrap()).unwrap();
        assert_eq!(nverts(&cube3), 8);
        let dc = hanner(&"l1(seg, linf(seg, seg))".parse().unwrap()).unwrap();
        assert_eq!(nverts(&dc), 6);
        let h4 = hanner(&"l1(linf(seg,seg),linf(seg,seg))".parse().unwrap()).unwrap();
        assert_eq!(nverts(&h4), 8);
        assert_eq!(h4.dim(), 4);
        for bad in ["", "l1(seg", "lp(seg)", "seg seg", "l1()"] {
            assert!(matches!(bad.parse::<HannerSpec>(), Err(Error::MalformedSpec(_))), "{bad}");
        }
        let spec: HannerSpec = "l1(seg,linf(seg,l1(seg,seg)))".parse().unwrap();
        assert_eq!(spec.to_string().parse::<HannerSpec>().unwrap(), spec);
        assert_eq!(HannerSpec::all_binary(3).len(), 8);
    }

    #[test]
    fn hanner_positions() {
        for n in 1..=4 {
            for spec in HannerSpec::all_binary(n) {
                let c = hanner_positioned(&spec).unwrap();
                let e = radial_extremes(&c, 1e-9).unwrap();
                assert!((e.r - 1.0).abs() < 1e-12, "{spec}");
                assert!((e.big_r - (n as f64).sqrt()).abs() < 1e-12, "{spec}");
            }
        }
    }

    #[test]
    fn standard_bodies() {
        assert_eq!(nverts(&standard_body("cross_polytope", 3, None).unwrap()), 6);
        let tri = standard_body("simplex_regular_centered", 2, None).unwrap();
        let e = radial_extremes(&tri, 1e-9).unwrap();
        assert!((e.r - 1.0).abs() < 1e-12 && (e.big_r - 2.0).abs() < 1e-12);
        let s3 = simplex_regular_centered(3).unwrap();
        let e = radial_extremes(&s3, 1e-9).unwrap();
        assert!((e.r - 1.0).abs() < 1e-12 && (e.big_r - 3.0).abs() < 1e-12);
        let hex = standard_body("regular_polygon", 2, Some(6)).unwrap();
        let e = radial_extremes(&hex, 1e-9).unwrap();
        assert!((e.r - 3f64.sqrt() / 2.0).abs() < 1e-12 && (e.big_r - 1.0).abs() < 1e-12);
        assert_eq!(nverts(&standard_body("polygon_disc", 2, None).unwrap()), 512);
        assert_eq!(standard_body("blob", 2, None).unwrap_err(), Error::UnknownName("blob".into()));
    }
}
