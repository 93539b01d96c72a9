//! Nelder–Mead simplex descent with dimension-adaptive coefficients and
//! restarts from the best vertex.

#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    /// Cap on simplex iterations, summed over inner restarts.
    pub max_iters: usize,
    /// Relative spread of function values at which a run is considered
    /// converged.
    pub ftol: f64,
    pub initial_step: f64,
    /// Fresh simplices built around the incumbent after convergence.
    pub reinits: usize,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { max_iters: 2000, ftol: 1e-9, initial_step: 0.1, reinits: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iters: usize,
}

struct Coeffs {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coeffs {
    fn adaptive(n: usize) -> Self {
        let n = n.max(2) as f64;
        Self {
            reflect: 1.0,
            expand: 1.0 + 2.0 / n,
            contract: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// One descent from an axis-aligned simplex of size `step` around `x0`.
fn descend<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    budget: usize,
    ftol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let c = Coeffs::adaptive(n);
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i].abs() > 1e-3 { step * p[i].abs().max(0.25) } else { step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut iters = 0;
    while iters < budget {
        iters += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let best = vals[0];
        let worst = vals[n];
        if worst.is_finite() && (worst - best).abs() <= ftol * (best.abs() + 1e-12) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let xr = lerp(&centroid, &pts[n], -c.reflect);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = lerp(&centroid, &pts[n], -c.reflect * c.expand);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = lerp(&centroid, &xr, c.contract);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &pts[n], c.contract);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            pts[i] = lerp(&pts[0], &pts[i], c.shrink);
            vals[i] = f(&pts[i]);
        }
    }
    let (bi, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    (pts[bi].clone(), vals[bi], iters)
}

/// Minimizes `f` starting at `x0`; after each converged descent a new simplex
/// of half the previous size is built around the incumbent.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NmOptions) -> NmResult {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut used = 0;
    let mut step = opts.initial_step;
    for round in 0..=opts.reinits {
        if used >= opts.max_iters {
            break;
        }
        let (xn, fxn, it) = descend(&mut f, &x, step, opts.max_iters - used, opts.ftol);
        used += it;
        let improved = fxn < fx - opts.ftol * fx.abs().max(1e-12);
        if fxn <= fx {
            x = xn;
            fx = fxn;
        }
        if !improved && round > 0 {
            break;
        }
        step *= 0.5;
    }
    NmResult { x, fx, iters: used }
}
