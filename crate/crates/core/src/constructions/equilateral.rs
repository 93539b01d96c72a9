//! Experimental planar families meant to be pairwise equidistant in the
//! Banach–Mazur sense, built from the regular 4N-gon and the disc.
//!
//! A body of the family is `conv(c·D ∪ {±u(θ) : θ ∈ S})`, where `c·D` is a
//! polygonal proxy of the disc of radius `c = cos(π/4N)` and `u(θ)` are unit
//! "spikes". Every such body sits between `c·D` and `D`, so any two of them
//! are at distance at most `1/c²`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{BodyExpr, Vector};

/// Pluggable family generator.
pub trait EquilateralGenerator {
    fn name(&self) -> &str;
    /// Largest family size the generator can produce for the given `N`.
    fn capacity(&self, n: usize) -> usize;
    fn generate(&self, n: usize, count: usize) -> Result<Vec<BodyExpr>>;
}

/// Vertex count of the inner disc proxy.
pub const DISC_VERTICES: usize = 96;

/// `1/cos(π/4N)`.
pub fn d_n(n: usize) -> f64 {
    1.0 / (PI / (4.0 * n as f64)).cos()
}

/// `conv(c·D ∪ {±u(θ) : θ ∈ spikes})`.
pub fn spike_body(n: usize, spikes: &[f64]) -> Result<BodyExpr> {
    let c = (PI / (4.0 * n as f64)).cos();
    let mut pts: Vec<Vector> = (0..DISC_VERTICES)
        .map(|k| {
            let a = 2.0 * PI * (k as f64 + 0.5) / DISC_VERTICES as f64;
            // circumscribed proxy so that c·D is contained in the body
            let r = c / (PI / DISC_VERTICES as f64).cos();
            Vector::from_vec(vec![r * a.cos(), r * a.sin()])
        })
        .collect();
    for &t in spikes {
        pts.push(Vector::from_vec(vec![t.cos(), t.sin()]));
        pts.push(Vector::from_vec(vec![-t.cos(), -t.sin()]));
    }
    BodyExpr::polytope(&pts)
}

/// Spike patterns given as multiples of `π/4N` (the vertex angles of the
/// regular 4N-gon are the even multiples).
#[derive(Debug, Clone)]
pub struct SpikePatterns {
    pub patterns: Vec<Vec<f64>>,
}

impl EquilateralGenerator for SpikePatterns {
    fn name(&self) -> &str {
        "spike-patterns (experimental)"
    }

    fn capacity(&self, _n: usize) -> usize {
        self.patterns.len()
    }

    fn generate(&self, n: usize, count: usize) -> Result<Vec<BodyExpr>> {
        if n < 2 {
            return Err(Error::InvalidInput("N must be at least 2".into()));
        }
        let cap = self.capacity(n);
        if count > cap {
            return Err(Error::GeneratorCapacityExceeded { requested: count, capacity: cap });
        }
        let unit = PI / (4.0 * n as f64);
        self.patterns
            .iter()
            .take(count)
            .map(|p| spike_body(n, &p.iter().map(|m| m * unit).collect::<Vec<_>>()))
            .collect()
    }
}

/// Four patterns found by screening the spike subsets of the regular octagon
/// at `N = 2`; the engine puts all six pairs at `1/cos(π/8)`, short of the
/// expected `1/cos²(π/8)`.
pub fn default_generator() -> SpikePatterns {
    SpikePatterns {
        patterns: vec![
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![0.0, 1.0, 3.0, 4.0, 6.0],
            vec![0.0, 1.0, 4.0],
            vec![0.0, 2.0, 4.0],
        ],
    }
}

/// Family of `count` bodies from the default generator.
pub fn equilateral_family(n: usize, count: usize) -> Result<Vec<BodyExpr>> {
    default_generator().generate(n, count)
}
