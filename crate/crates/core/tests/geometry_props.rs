use bmdist::geometry::hull::prune;
use bmdist::geometry::json;
use bmdist::geometry::{inclusion_scale, polar};
use bmdist::{BodyExpr, Vector};
use proptest::prelude::*;

fn same_vertices(a: &[Vector], b: &[Vector], tol: f64) -> bool {
    let covered = |xs: &[Vector], ys: &[Vector]| xs.iter().all(|x| ys.iter().any(|y| (x - y).amax() <= tol));
    a.len() == b.len() && covered(a, b) && covered(b, a)
}

/// Points in `[-1, 1]^n`, optionally closed under negation.
fn points(n: usize, symmetric: bool) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), n + 1..12).prop_map(move |raw| {
        let mut pts: Vec<Vector> = raw.into_iter().map(Vector::from_vec).collect();
        if symmetric {
            let neg: Vec<Vector> = pts.iter().map(|p| -p).collect();
            pts.extend(neg);
        }
        pts
    })
}

/// Full-dimensional polytope with the origin well inside.
fn body(n: usize, symmetric: bool) -> impl Strategy<Value = BodyExpr> {
    points(n, symmetric).prop_filter_map("degenerate or origin near boundary", |pts| {
        let b = BodyExpr::polytope(&pts).ok()?;
        let p = b.as_polytope()?;
        let depth = p.facets().iter().map(|h| h.offset).fold(f64::INFINITY, f64::min);
        (p.is_full_dimensional() && depth > 0.05).then_some(b)
    })
}

fn any_body() -> impl Strategy<Value = BodyExpr> {
    prop_oneof![body(2, true), body(3, true), body(2, false), body(3, false)]
}

fn direction(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-2.0..2.0f64, n).prop_map(Vector::from_vec)
}

fn body_and_points(k: usize) -> impl Strategy<Value = (BodyExpr, Vec<Vector>)> {
    any_body().prop_flat_map(move |b| {
        let n = b.dim();
        (Just(b), prop::collection::vec(direction(n), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gauge_of_polar_is_support(
        (b, xs) in prop_oneof![body(2, true), body(3, true)]
            .prop_flat_map(|b| { let n = b.dim(); (Just(b), prop::collection::vec(direction(n), 5)) })
    ) {
        let pb = polar(&b).unwrap();
        for x in &xs {
            let g = pb.gauge(x).unwrap();
            let h = b.support(x).unwrap();
            prop_assert!((g - h).abs() <= 1e-9 * (1.0 + h.abs()), "gauge {g} support {h}");
        }
    }

    #[test]
    fn gauge_is_homogeneous((b, xs) in body_and_points(3), lambda in 0.0..10.0f64) {
        for x in &xs {
            let g = b.gauge(x).unwrap();
            let gl = b.gauge(&(x * lambda)).unwrap();
            prop_assert!((gl - lambda * g).abs() <= 1e-12 * (lambda * g).max(1.0));
        }
    }

    #[test]
    fn gauge_triangle_inequality(
        (b, xs) in prop_oneof![body(2, true), body(3, true)]
            .prop_flat_map(|b| { let n = b.dim(); (Just(b), prop::collection::vec(direction(n), 2)) })
    ) {
        let (x, y) = (&xs[0], &xs[1]);
        let lhs = b.gauge(&(x + y)).unwrap();
        prop_assert!(lhs <= b.gauge(x).unwrap() + b.gauge(y).unwrap() + 1e-12);
    }

    #[test]
    fn inclusion_scales_multiply_to_at_least_one(
        (k, l) in (2usize..=3).prop_flat_map(|n| (body(n, false), body(n, true)))
    ) {
        let a = inclusion_scale(&k, &l).unwrap();
        let b = inclusion_scale(&l, &k).unwrap();
        prop_assert!(a * b >= 1.0 - 1e-12, "{a} * {b}");
    }

    #[test]
    fn prune_is_idempotent(pts in (2usize..=3).prop_flat_map(|n| points(n, false))) {
        let once = prune(&pts);
        let twice = prune(&once);
        prop_assert!(same_vertices(&once, &twice, 0.0));
    }

    #[test]
    fn polar_is_an_involution(b in any_body()) {
        let pp = polar(&polar(&b).unwrap()).unwrap();
        let (v, w) = (b.vertices().unwrap(), pp.vertices().unwrap());
        prop_assert!(same_vertices(&v, &w, 1e-9), "{} vs {} vertices", v.len(), w.len());
    }

    #[test]
    fn json_round_trips(b in any_body(), p in prop_oneof![Just(1.0), Just(f64::INFINITY), 1.0..5.0f64]) {
        let back = json::from_str(&json::to_string(&b)).unwrap();
        prop_assert_eq!(&back, &b);
        let sum = BodyExpr::lp_sum_node(vec![b.clone(), b], p).unwrap();
        prop_assert_eq!(json::from_str(&json::to_string(&sum)).unwrap(), sum);
    }
}
