use bmdist::bmd::{estimate_distance, DistanceConfig};
use bmdist::certificate::{certify_euclidean_distance, verify_certificate, Certification};
use bmdist::constructions::{cross_polytope, cube, hanner_positioned, polygon_disc, regular_polygon};
use bmdist::geometry::apply_map;
use bmdist::{BodyExpr, LinearMap, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal)).qr().q()
}

#[test]
fn certificates_are_invariant_under_orthogonal_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bodies = [
        cube(3).unwrap(),
        cross_polytope(3).unwrap(),
        hanner_positioned(&"l1(seg,linf(seg,seg))".parse().unwrap()).unwrap(),
    ];
    for body in &bodies {
        let base = certify_euclidean_distance(body).unwrap();
        for _ in 0..10 {
            let q = random_orthogonal(body.dim(), &mut rng);
            let rotated = apply_map(&LinearMap::new(q).unwrap(), body).unwrap();
            let c = certify_euclidean_distance(&rotated).unwrap();
            assert!((c.r - base.r).abs() <= 1e-12 && (c.big_r - base.big_r).abs() <= 1e-12);
            assert!((c.value - base.value).abs() <= 1e-12);
            assert!(c.certificate.residual <= 1e-8, "residual {}", c.certificate.residual);
            assert!(verify_certificate(&c).valid);
        }
    }
}

#[test]
fn engine_does_not_beat_certified_values() {
    let cases: Vec<(BodyExpr, BodyExpr)> = vec![
        (cube(2).unwrap(), polygon_disc(512).unwrap()),
        (regular_polygon(6).unwrap(), polygon_disc(512).unwrap()),
        (cross_polytope(3).unwrap(), BodyExpr::unit_ball(3).unwrap()),
    ];
    for (k, ball) in &cases {
        let cert = certify_euclidean_distance(k).unwrap();
        let est = estimate_distance(k, ball, &DistanceConfig::symmetric(12, 3)).unwrap();
        assert!(est.upper >= cert.value - 0.02, "engine {} below certified {}", est.upper, cert.value);
        assert!(est.upper <= cert.value + 0.02, "engine {} far above certified {}", est.upper, cert.value);
    }
}

#[test]
fn tampered_certificates_fail_replay() {
    let cert = certify_euclidean_distance(&cube(2).unwrap()).unwrap();
    let mut json = cert.to_json();
    json["certificate"]["lambda"][0] = serde_json::json!(0.9);
    let tampered = Certification::from_json(&json).unwrap();
    assert!(!verify_certificate(&tampered).valid);

    let mut json = cert.to_json();
    json["value"] = serde_json::json!(1.3);
    assert!(!verify_certificate(&Certification::from_json(&json).unwrap()).valid);
}
