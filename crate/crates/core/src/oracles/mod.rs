//! Closed-form distance values, executable lemma checkers and randomized
//! theorem suites.

mod lemmas;
mod suites;

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{euclidean_sum_exponent, lp_combine, BodyExpr, Vector};

pub use lemmas::{
    lemma_proj_construct, lemma_triangles_check, lemma_vertex_absorbing_check, random_proj_instance,
    random_triangle_instance, random_vertex_absorbing_instance, ProjInstance, TriangleCondition,
    TriangleInstance, TriangleOutcome, VertexAbsorbingInstance,
};
pub use suites::{theorem_suite, CaseResult, Report, SuiteConfig, SUITES};

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    Ok(())
}

/// `‖d‖_r` with `r = 2p/|p−2|`: the distance of an ℓp-sum to the Euclidean
/// space of the same dimension when the summands are at distances `dᵢ`.
pub fn thm_lp_sum_to_euclidean(d: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if d.is_empty() {
        return Err(Error::InvalidInput("empty list of distances".into()));
    }
    if let Some(x) = d.iter().find(|x| !(**x >= 1.0) || x.is_infinite()) {
        return Err(Error::InvalidInput(format!("distance {x} is not a finite value >= 1")));
    }
    Ok(lp_combine(d, euclidean_sum_exponent(p)))
}

/// `n^{(2−p)/p}`: distance of the `p*`-sum of `n` copies of `ℓpⁿ` to `ℓ₂^{n²}`.
pub fn ntj_value(n: usize, p: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidP(p));
    }
    if n < 1 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    Ok((n as f64).powf(2.0 / p - 1.0))
}

/// `√n`, the distance of every n-dimensional Hanner polytope to the ball.
pub fn hanner_distance(n: usize) -> f64 {
    (n as f64).sqrt()
}

/// Random 0-symmetric polygon: `k ∈ {3, 4, 5}` random directions with their
/// negatives, radii uniform in `[0.5, 1]`.
pub fn random_symmetric_polygon<R: Rng>(rng: &mut R) -> BodyExpr {
    loop {
        let k = rng.random_range(3..=5);
        let mut pts = Vec::with_capacity(2 * k);
        for _ in 0..k {
            let a = rng.random_range(0.0..PI);
            let r = rng.random_range(0.5..=1.0);
            let u = Vector::from_vec(vec![r * a.cos(), r * a.sin()]);
            pts.push(-&u);
            pts.push(u);
        }
        if let Ok(b) = BodyExpr::polytope_claimed(&pts, true) {
            if b.as_polytope().is_some_and(|p| p.is_full_dimensional()) {
                return b;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        let d = [2f64.sqrt(), 3f64.sqrt()];
        assert!((thm_lp_sum_to_euclidean(&d, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((thm_lp_sum_to_euclidean(&d, 1.0).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!((thm_lp_sum_to_euclidean(&d, f64::INFINITY).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!((thm_lp_sum_to_euclidean(&d, 4.0).unwrap() - 13f64.powf(0.25)).abs() < 1e-14);
        assert!(matches!(thm_lp_sum_to_euclidean(&d, 0.5), Err(Error::InvalidP(_))));
    }

    #[test]
    fn ntj_examples() {
        assert_eq!(ntj_value(4, 4.0 / 3.0).unwrap(), 2.0);
        assert_eq!(ntj_value(1, 1.5).unwrap(), 1.0);
        assert_eq!(ntj_value(7, 2.0).unwrap(), 1.0);
        assert!(ntj_value(3, 1.0).is_err());
        assert!(ntj_value(0, 1.5).is_err());
    }

    #[test]
    fn hanner_examples() {
        assert_eq!(hanner_distance(1), 1.0);
        assert_eq!(hanner_distance(4), 2.0);
    }
}
