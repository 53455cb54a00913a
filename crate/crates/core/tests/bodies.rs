use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use willslab::{ConvexBody, FaceDim};

fn norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn triangle() -> ConvexBody {
    ConvexBody::new_hpolytope(
        vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
        vec![0.25, 0.25],
    )
    .unwrap()
}

fn pentagon3() -> ConvexBody {
    // a cube corner cut by two oblique planes
    ConvexBody::new_hpolytope(
        vec![
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, -2.0, 0.5],
        ],
        vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0],
        vec![0.0, 0.0, 0.0],
    )
    .unwrap()
}

fn bodies() -> Vec<(ConvexBody, f64)> {
    vec![
        (ConvexBody::new_box(vec![0.3, -0.2, 1.0], vec![1.0, 0.5, 2.0]).unwrap(), 1e-12),
        (ConvexBody::new_ball(vec![0.5, 0.0, -1.0], 1.5).unwrap(), 1e-12),
        (pentagon3(), 1e-7),
    ]
}

proptest! {
    #[test]
    fn projection_is_nonexpansive(x in prop::collection::vec(-5.0f64..5.0, 3), y in prop::collection::vec(-5.0f64..5.0, 3)) {
        for (body, tol) in bodies() {
            let px = body.project_point(&x).unwrap();
            let py = body.project_point(&y).unwrap();
            prop_assert!(norm(&px, &py) <= norm(&x, &y) + tol);
        }
    }

    #[test]
    fn projection_satisfies_variational_inequality(x in prop::collection::vec(-5.0f64..5.0, 3), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (body, tol) in bodies() {
            let p = body.project_point(&x).unwrap();
            let r = body.enclosing_radius();
            let c = body.center().to_vec();
            let mut checked = 0;
            while checked < 20 {
                let y: Vec<f64> = c.iter().map(|ci| ci + r * (2.0 * rng.random::<f64>() - 1.0)).collect();
                if !body.contains(&y) {
                    continue;
                }
                checked += 1;
                let ip: f64 = x.iter().zip(&p).zip(&y).map(|((xi, pi), yi)| (xi - pi) * (yi - pi)).sum();
                prop_assert!(ip <= tol * 10.0 * (1.0 + r * r), "inner product {ip}");
            }
        }
    }

    #[test]
    fn projection_is_idempotent(x in prop::collection::vec(-5.0f64..5.0, 2)) {
        let t = triangle();
        let p = t.project_point(&x).unwrap();
        let pp = t.project_point(&p).unwrap();
        prop_assert!(norm(&p, &pp) <= 1e-8);
    }
}

/// Directional derivative of `Π` along the normal `x − Πx`, by central differences.
fn normal_derivative(body: &ConvexBody, x: &[f64], h: f64) -> f64 {
    let p = body.project_point(x).unwrap();
    let n: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
    let shifted = |s: f64| -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&n).map(|(a, b)| a + s * b).collect();
        body.project_point(&y).unwrap()
    };
    let plus = shifted(h);
    let minus = shifted(-h);
    norm(&plus, &minus) / (2.0 * h)
}

#[test]
fn projection_is_flat_along_the_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (body, _) in bodies() {
        let mut checked = 0;
        while checked < 200 {
            let x: Vec<f64> = (0..3).map(|_| 6.0 * rng.random::<f64>() - 3.0).collect();
            if body.distance(&x).unwrap() < 0.05 || body.trace_projection_jacobian(&x, 1e-3).is_err() {
                continue;
            }
            checked += 1;
            let g = normal_derivative(&body, &x, 1e-4);
            assert!(g <= 1e-5, "{} at {x:?}: {g}", body.kind());
        }
    }
}

#[test]
fn box_face_dim_matches_its_halfspace_form() {
    let b = ConvexBody::new_box(vec![0.5, -1.0, 0.0, 2.0], vec![1.0, 0.3, 0.7, 1.5]).unwrap();
    let hp = b.box_as_hpolytope().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut agreed = 0;
    for _ in 0..10_000 {
        let x: Vec<f64> = b.center().iter().map(|c| c + 6.0 * rng.random::<f64>() - 3.0).collect();
        let fb = b.project(&x).unwrap();
        let fp = hp.project(&x).unwrap();
        let clamped = x
            .iter()
            .zip(b.center())
            .zip([1.0, 0.3, 0.7, 1.5])
            .filter(|((xi, ci), h)| (*xi - *ci).abs() >= *h)
            .count();
        assert_eq!(fb.face_dim, FaceDim::Face(4 - clamped));
        assert_eq!(fb.face_dim, fp.face_dim, "at {x:?}");
        assert!(norm(&fb.point, &fp.point) < 1e-8);
        assert_eq!(b.trace_projection_jacobian(&x, 1e-9).unwrap(), hp.trace_projection_jacobian(&x, 1e-9).unwrap());
        agreed += 1;
    }
    assert_eq!(agreed, 10_000);
}

#[test]
fn interior_points_have_full_trace() {
    for (body, _) in bodies() {
        let c = body.center().to_vec();
        assert_eq!(body.trace_projection_jacobian(&c, 1e-9).unwrap(), 3.0);
    }
    assert_eq!(triangle().trace_projection_jacobian(&[0.2, 0.2], 1e-9).unwrap(), 2.0);
}

#[test]
fn polytope_trace_matches_finite_difference_jacobian() {
    let body = pentagon3();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 100 {
        let x: Vec<f64> = (0..3).map(|_| 6.0 * rng.random::<f64>() - 3.0).collect();
        let Ok(tr) = body.trace_projection_jacobian(&x, 1e-3) else { continue };
        let h = 1e-5;
        let mut fd = 0.0;
        for i in 0..3 {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            fd += (body.project_point(&a).unwrap()[i] - body.project_point(&b).unwrap()[i]) / (2.0 * h);
        }
        assert!((fd - tr).abs() < 1e-4, "trace {tr} vs {fd} at {x:?}");
        checked += 1;
    }
}
