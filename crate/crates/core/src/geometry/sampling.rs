//! Deterministic direction grids on the unit sphere and local refinement of
//! sphere maxima.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Vector;

pub const GRID_2D: usize = 2048;
pub const GRID_3D: usize = 4096;
pub const GRID_HIGH: usize = 8192;
const GRID_SEED: u64 = 0x5eed_0b0d;

/// Unit directions: uniform angles in the plane, a Fibonacci lattice in
/// space, fixed-seed Gaussian directions above.
pub fn direction_grid(n: usize) -> Vec<Vector> {
    match n {
        1 => vec![Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)],
        2 => (0..GRID_2D)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / GRID_2D as f64;
                Vector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(GRID_3D),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED ^ n as u64);
            (0..GRID_HIGH)
                .map(|_| {
                    let g = Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                    g.normalize()
                })
                .collect()
        }
    }
}

pub fn fibonacci_sphere(count: usize) -> Vec<Vector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * k as f64;
            Vector::from_vec(vec![r * a.cos(), r * a.sin(), z])
        })
        .collect()
}

/// Typical angular spacing of [`direction_grid`].
pub fn grid_spacing(n: usize) -> f64 {
    match n {
        1 => 0.0,
        2 => 2.0 * PI / GRID_2D as f64,
        3 => (4.0 * PI / GRID_3D as f64).sqrt(),
        _ => 0.35,
    }
}

fn tangent_basis(theta: &Vector) -> Vec<Vector> {
    let n = theta.len();
    let mut basis: Vec<Vector> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        e.axpy(-theta[i], theta, 1.0);
        for b in &basis {
            let c = e.dot(b);
            e.axpy(-c, b, 1.0);
        }
        let norm = e.norm();
        if norm > 1e-6 {
            basis.push(e / norm);
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coordinate-wise golden-section ascent along great circles through `theta`.
pub fn refine_on_sphere(f: &impl Fn(&Vector) -> f64, theta: &Vector, h0: f64) -> (Vector, f64) {
    let mut best = theta.clone();
    let mut val = f(&best);
    if theta.len() < 2 {
        return (best, val);
    }
    let mut h = h0;
    for _ in 0..6 {
        for e in tangent_basis(&best) {
            let base = best.clone();
            let along = |phi: f64| f(&(&base * phi.cos() + &e * phi.sin()));
            let (phi, v) = golden_max(along, -h, h, 40);
            if v > val {
                val = v;
                best = (&base * phi.cos() + &e * phi.sin()).normalize();
            }
        }
        h *= 0.5;
    }
    (best, val)
}

/// Grid search followed by refinement of the `top` best grid directions.
/// Returns `(direction, value)` pairs sorted by decreasing value.
pub fn maximize_on_sphere(n: usize, f: &(impl Fn(&Vector) -> f64 + Sync), top: usize) -> Vec<(Vector, f64)> {
    let grid = direction_grid(n);
    let mut scored: Vec<(usize, f64)> = grid.iter().enumerate().map(|(i, u)| (i, f(u))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let h = 1.5 * grid_spacing(n);
    let mut out: Vec<(Vector, f64)> = scored
        .iter()
        .take(top.max(1))
        .map(|&(i, _)| refine_on_sphere(f, &grid[i], h))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_unit_and_sized() {
        for n in 1..=5 {
            let g = direction_grid(n);
            assert!(g.iter().all(|u| (u.norm() - 1.0).abs() < 1e-12));
            assert_eq!(g, direction_grid(n));
        }
        assert_eq!(direction_grid(2).len(), 2048);
        assert_eq!(direction_grid(3).len(), 4096);
    }

    #[test]
    fn refinement_finds_smooth_maximum() {
        let target = Vector::from_vec(vec![0.3, -0.5, 0.81]).normalize();
        let f = |u: &Vector| u.dot(&target);
        let best = maximize_on_sphere(3, &f, 4);
        assert!((best[0].1 - 1.0).abs() < 1e-9);
        let t2 = Vector::from_vec(vec![0.123f64.cos(), 0.123f64.sin()]);
        let f2 = |u: &Vector| u.dot(&t2);
        assert!((maximize_on_sphere(2, &f2, 2)[0].1 - 1.0).abs() < 1e-12);
    }
}
