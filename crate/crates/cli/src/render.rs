//! Deterministic SVG overlays of planar bodies.

use std::fmt::Write;

use bmdist::geometry::hull::hull_2d;
use bmdist::{BodyExpr, Vector};

use crate::CliError;

/// Boundary samples for bodies without a vertex list.
const BOUNDARY_SAMPLES: usize = 256;
const MARGIN: f64 = 0.05;
/// Dash patterns as multiples of the drawing span: dashed, solid, dotted.
const DASHES: [Option<(f64, f64)>; 3] = [Some((0.03, 0.015)), None, Some((0.004, 0.01))];

/// Rounds to 9 significant digits and prints the shortest form of the result.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{r}")
}

/// Closed boundary polygon in counter-clockwise order, and whether its points
/// are true vertices.
fn outline(body: &BodyExpr) -> Result<(Vec<Vector>, bool), CliError> {
    if let Some(vs) = body.vertices() {
        let order = hull_2d(&vs);
        return Ok((order.into_iter().map(|i| vs[i].clone()).collect(), true));
    }
    let mut pts = Vec::with_capacity(BOUNDARY_SAMPLES);
    for k in 0..BOUNDARY_SAMPLES {
        let a = std::f64::consts::TAU * k as f64 / BOUNDARY_SAMPLES as f64;
        let u = Vector::from_vec(vec![a.cos(), a.sin()]);
        let g = body.gauge(&u)?;
        pts.push(u / g);
    }
    Ok((pts, false))
}

/// SVG with one closed path per body, line styles cycling dashed, solid,
/// dotted, and a dot on every vertex.
pub fn render_svg(bodies: &[BodyExpr]) -> Result<String, CliError> {
    if bodies.is_empty() {
        return Err(CliError::Usage("render needs at least one body".into()));
    }
    if let Some((i, b)) = bodies.iter().enumerate().find(|(_, b)| b.dim() != 2) {
        return Err(CliError::NotPlanar { index: i, dim: b.dim() });
    }
    let outlines = bodies.iter().map(outline).collect::<Result<Vec<_>, _>>()?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in outlines.iter().flat_map(|(pts, _)| pts) {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let pad = MARGIN * span;
    let (x0, y0) = (lo[0] - pad, -hi[1] - pad);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    // coordinates below this are rounding noise of the drawing
    let noise = 1e-12 * span;
    let xy = |p: &Vector| {
        let snap = |x: f64| if x.abs() <= noise { 0.0 } else { x };
        (sig9(snap(p[0])), sig9(snap(-p[1])))
    };
    let stroke = sig9(0.004 * span);
    let dot = sig9(0.008 * span);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        sig9(x0),
        sig9(y0),
        sig9(w),
        sig9(h)
    )
    .unwrap();
    for (i, (pts, vertices)) in outlines.iter().enumerate() {
        let mut d = String::new();
        for (j, p) in pts.iter().enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            let (x, y) = xy(p);
            write!(d, "{cmd}{x} {y} ").unwrap();
        }
        d.push('Z');
        let dash = match DASHES[i % DASHES.len()] {
            Some((on, off)) => format!(r#" stroke-dasharray="{} {}""#, sig9(on * span), sig9(off * span)),
            None => String::new(),
        };
        writeln!(s, r#"<path d="{d}" fill="none" stroke="black" stroke-width="{stroke}"{dash}/>"#).unwrap();
        if *vertices {
            for p in pts {
                let (x, y) = xy(p);
                writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{dot}"/>"#).unwrap();
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
