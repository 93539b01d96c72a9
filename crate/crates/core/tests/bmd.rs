use bmdist::bmd::{estimate_distance, map_from_json, map_to_json, position_ratio, verify_chain, DistanceConfig};
use bmdist::constructions::{cross_polytope, cube, regular_polygon, simplex_regular_centered};
use bmdist::geometry::apply_map;
use bmdist::oracles::random_symmetric_polygon;
use bmdist::{BodyExpr, LinearMap, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RESTARTS: usize = 24;

fn est(k: &BodyExpr, l: &BodyExpr, seed: u64) -> f64 {
    let cfg = DistanceConfig {
        restarts: RESTARTS,
        seed,
        symmetric: k.is_symmetric() && l.is_symmetric(),
        ..DistanceConfig::default()
    };
    estimate_distance(k, l, &cfg).unwrap().upper
}

/// Random matrix with condition number at most 10.
fn conditioned_map(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let q1 = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).qr().q();
    let q2 = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).qr().q();
    let d = Matrix::from_diagonal(&bmdist::Vector::from_fn(n, |i, _| if i == 0 { 1.0 } else { rng.random_range(0.1..=1.0) }));
    q1 * d * q2
}

#[test]
fn estimates_are_symmetric() {
    let pairs = [
        (cross_polytope(3).unwrap(), cube(3).unwrap()),
        (regular_polygon(6).unwrap(), cross_polytope(2).unwrap()),
        (simplex_regular_centered(2).unwrap(), cube(2).unwrap()),
    ];
    for (k, l) in &pairs {
        let (a, b) = (est(k, l, 1), est(l, k, 1));
        assert!((a - b).abs() <= 0.02, "{a} vs {b}");
    }
}

#[test]
fn estimates_are_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let k = random_symmetric_polygon(&mut rng);
        let l = random_symmetric_polygon(&mut rng);
        let a = LinearMap::new(conditioned_map(&mut rng, 2)).unwrap();
        let moved = apply_map(&a, &k).unwrap();
        let (d0, d1) = (est(&k, &l, 2), est(&moved, &l, 2));
        assert!((d0 - d1).abs() <= 0.02, "{d0} vs {d1}");
    }
}

#[test]
fn estimates_obey_the_multiplicative_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let (a, b, c) = (
            random_symmetric_polygon(&mut rng),
            random_symmetric_polygon(&mut rng),
            random_symmetric_polygon(&mut rng),
        );
        let (ab, bc, ac) = (est(&a, &b, 3), est(&b, &c, 3), est(&a, &c, 3));
        assert!(ac <= ab * bc + 0.03, "{ac} > {ab} * {bc}");
    }
}

#[test]
fn more_restarts_never_hurt() {
    let (k, l) = (simplex_regular_centered(2).unwrap(), cube(2).unwrap());
    let mut last = f64::INFINITY;
    for restarts in [1, 4, 16] {
        let cfg = DistanceConfig { restarts, seed: 4, ..DistanceConfig::default() };
        let upper = estimate_distance(&k, &l, &cfg).unwrap().upper;
        assert!(upper <= last, "{upper} after {last}");
        last = upper;
    }
}

#[test]
fn witness_replays_and_round_trips() {
    let (k, l) = (cross_polytope(3).unwrap(), cube(3).unwrap());
    let e = estimate_distance(&k, &l, &DistanceConfig::symmetric(RESTARTS, 0)).unwrap();
    assert!((e.upper - 1.8).abs() <= 0.02);
    assert!(verify_chain(&k, &l, &e.witness, e.upper + 1e-9, 1e-9).unwrap());
    assert!((position_ratio(&k, &l, &e.witness).unwrap() - e.upper).abs() <= 1e-9);
    let back = map_from_json(&map_to_json(&e.witness)).unwrap();
    assert_eq!(back.matrix(), e.witness.matrix());
    assert!(e.residual <= 1e-9);
}

#[test]
fn symmetric_search_rejects_asymmetric_bodies() {
    let cfg = DistanceConfig::symmetric(2, 0);
    let err = estimate_distance(&simplex_regular_centered(2).unwrap(), &cube(2).unwrap(), &cfg).unwrap_err();
    assert_eq!(err, bmdist::Error::SymmetryFlagViolated);
}
