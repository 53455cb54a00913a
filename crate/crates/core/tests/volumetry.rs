use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use willslab::intrinsic::{profile_ball, profile_box};
use willslab::volumetry::*;
use willslab::{ConvexBody, Error, SeedSpec};

const PI: f64 = std::f64::consts::PI;

fn near(value: f64, stderr: f64, target: f64, k: f64) -> bool {
    (value - target).abs() <= k * stderr
}

#[test]
fn parallel_volume_examples() {
    let sq = ConvexBody::new_box(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
    let e = estimate_parallel_volume(&sq, 1.0, 1_000_000, SeedSpec::new(1, 0)).unwrap();
    assert!(near(e.value, e.stderr, 5.0 + PI, 3.0), "{e:?}");
    let disk = ConvexBody::new_ball(vec![0.0, 0.0], 1.0).unwrap();
    let e = estimate_parallel_volume(&disk, 1.0, 1_000_000, SeedSpec::new(1, 1)).unwrap();
    assert!(near(e.value, e.stderr, 4.0 * PI, 3.0), "{e:?}");
    assert!(estimate_parallel_volume(&disk, 1.0, 0, SeedSpec::new(1, 2)).is_err());
    assert!(estimate_parallel_volume(&ConvexBody::unit_cube(9).unwrap(), 1.0, 10, SeedSpec::new(1, 2)).is_err());
}

#[test]
fn parallel_volume_is_unbiased_across_seeds() {
    let cases = [
        (ConvexBody::new_box(vec![0.0; 3], vec![0.5, 1.0, 0.25]).unwrap(), profile_box(&[1.0, 2.0, 0.5]).unwrap()),
        (ConvexBody::new_ball(vec![0.0; 4], 0.6).unwrap(), profile_ball(4, 0.6).unwrap()),
    ];
    for (body, profile) in &cases {
        let runs: Vec<VolumeEstimate> = (0..30)
            .map(|s| estimate_parallel_volume(body, 0.7, 50_000, SeedSpec::new(100 + s, 0)).unwrap())
            .collect();
        let mean = runs.iter().map(|e| e.value).sum::<f64>() / runs.len() as f64;
        let pooled = runs.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / runs.len() as f64;
        assert!(near(mean, pooled, profile.parallel_volume(0.7), 3.0));
    }
}

fn assert_fit(fit: &ProfileFit, expect: &[f64]) {
    for (k, e) in expect.iter().enumerate() {
        assert!(
            (fit.v[k] - e).abs() <= 3.0 * fit.stderr[k] + 1e-12,
            "v_{k}: {} ± {} vs {e}",
            fit.v[k],
            fit.stderr[k]
        );
    }
}

#[test]
fn steiner_fits_recover_closed_forms() {
    let rect = ConvexBody::new_box(vec![0.0, 0.0], vec![1.0, 1.5]).unwrap();
    let fit = fit_steiner(&rect, &default_radii(&rect), 200_000, SeedSpec::new(2, 0), SteinerOptions::default()).unwrap();
    assert_fit(&fit, &[1.0, 5.0, 6.0]);
    let cube = ConvexBody::unit_cube(3).unwrap();
    let fit = fit_steiner(&cube, &default_radii(&cube), 200_000, SeedSpec::new(2, 1), SteinerOptions::default()).unwrap();
    assert_fit(&fit, &[1.0, 3.0, 3.0, 1.0]);
    let disk = ConvexBody::new_ball(vec![0.0, 0.0], 1.0).unwrap();
    let fit = fit_steiner(&disk, &default_radii(&disk), 200_000, SeedSpec::new(2, 2), SteinerOptions::default()).unwrap();
    assert_fit(&fit, &[1.0, PI, PI]);
    let free = fit_steiner(&disk, &default_radii(&disk), 200_000, SeedSpec::new(2, 3), SteinerOptions { fix_v0: false }).unwrap();
    assert_fit(&free, &[1.0, PI, PI]);
}

#[test]
fn clustered_radii_are_ill_conditioned() {
    let cube = ConvexBody::unit_cube(4).unwrap();
    let radii = [1.0, 1.0 + 1e-7, 1.0 + 2e-7, 1.0 + 3e-7, 1.0 + 4e-7];
    let err = fit_steiner(&cube, &radii, 1000, SeedSpec::new(3, 0), SteinerOptions { fix_v0: false }).unwrap_err();
    assert!(matches!(err, Error::Conditioning { .. }), "{err}");
}

#[test]
fn wills_scaled_examples() {
    let cube = ConvexBody::unit_cube(3).unwrap();
    for (l, e) in estimate_wills_scaled(&cube, &[0.5, 1.0, 2.0], 200_000, SeedSpec::new(4, 0)).unwrap() {
        assert!(near(e.value, e.stderr, (1.0 + l).powi(3), 3.0), "λ={l}: {e:?}");
    }
    let point = ConvexBody::point(vec![0.0; 5]).unwrap();
    for (_, e) in estimate_wills_scaled(&point, &[0.3, 3.0], 100_000, SeedSpec::new(4, 1)).unwrap() {
        assert!(near(e.value, e.stderr, 1.0, 3.0), "{e:?}");
    }
    let disk = ConvexBody::new_ball(vec![0.0, 0.0], 1.0).unwrap();
    let (_, e) = &estimate_wills_scaled(&disk, &[1.0], 200_000, SeedSpec::new(4, 2)).unwrap()[0];
    assert!(near(e.value, e.stderr, 1.0 + 2.0 * PI, 3.0), "{e:?}");
}

fn random_triangle(seed: u64) -> (ConvexBody, [f64; 3]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<[f64; 2]> = (0..3).map(|_| [rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0]).collect();
    let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let (v, area) = if area2 > 0.0 { (v, area2 / 2.0) } else { (vec![v[0], v[2], v[1]], -area2 / 2.0) };
    let centroid = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    let mut perimeter = 0.0;
    for i in 0..3 {
        let (a, b) = (v[i], v[(i + 1) % 3]);
        let n = [b[1] - a[1], a[0] - b[0]];
        perimeter += n[0].hypot(n[1]);
        offsets.push(n[0] * a[0] + n[1] * a[1]);
        normals.push(n.to_vec());
    }
    let body = ConvexBody::new_hpolytope(normals, offsets, centroid.to_vec()).unwrap();
    (body, [1.0, perimeter / 2.0, area])
}

#[test]
fn steiner_and_wills_routes_agree_on_a_triangle() {
    let (tri, exact) = random_triangle(2024);
    let a = fit_steiner(&tri, &default_radii(&tri), 100_000, SeedSpec::new(5, 0), SteinerOptions::default()).unwrap();
    let lambdas: Vec<f64> = (0..8).map(|i| 0.5 * 1.4f64.powi(i)).collect();
    let est = estimate_wills_scaled(&tri, &lambdas, 100_000, SeedSpec::new(5, 1)).unwrap();
    let b = fit_wills_polynomial(2, est, SteinerOptions::default()).unwrap();
    for k in 1..=2 {
        let joint = a.stderr[k].hypot(b.stderr[k]);
        assert!((a.v[k] - b.v[k]).abs() <= 4.0 * joint, "v_{k}: {} vs {}", a.v[k], b.v[k]);
        assert!((a.v[k] - exact[k]).abs() <= 4.0 * a.stderr[k]);
        assert!((b.v[k] - exact[k]).abs() <= 4.0 * b.stderr[k]);
    }
}

#[test]
fn unit_square_corner_fraction_at_distance_one() {
    let sq = ConvexBody::unit_cube(2).unwrap();
    let p = profile_box(&[1.0, 1.0]).unwrap();
    let opts = SliceOptions { min_hits: 10_000, ..SliceOptions::default() };
    let s = estimate_surface_slice(&sq, Some(&p), 1.0, 1_000_000, SeedSpec::new(6, 0), &opts).unwrap();
    let target = 2.0 * PI / (2.0 * PI + 4.0);
    assert!(near(s.empirical[0], s.stderr[0], target, 4.0), "{s:?}");
    assert!(s.tv.unwrap() < 0.02);
}

#[test]
fn unit_square_slice_law_at_three_distances() {
    let sq = ConvexBody::unit_cube(2).unwrap();
    let p = profile_box(&[1.0, 1.0]).unwrap();
    // at r = 2 the band carries ~3e-6 of the mass, so far more draws are needed
    for (r, n) in [(0.5, 1_000_000), (1.0, 1_000_000), (2.0, 400_000_000)] {
        let s = estimate_surface_slice(&sq, Some(&p), r, n, SeedSpec::new(7, 0), &SliceOptions::default()).unwrap();
        assert!(s.tv.unwrap() < 0.02, "r={r}: {s:?}");
    }
}

#[test]
fn slice_limits() {
    let cube = ConvexBody::unit_cube(3).unwrap();
    let p = profile_box(&[1.0; 3]).unwrap();
    let mut last = 0.0;
    for (i, r) in [0.25, 0.5, 1.0, 1.5].into_iter().enumerate() {
        let s = estimate_surface_slice(&cube, Some(&p), r, 2_000_000, SeedSpec::new(8, i as u64), &SliceOptions::default()).unwrap();
        assert!(s.tv.unwrap() < 0.03, "{s:?}");
        assert!(s.empirical[0] > last);
        last = s.empirical[0];
    }
    let far = willslab::intrinsic::surface_law(&p, 1e-4).unwrap();
    assert!(far.probs[0] > 0.999);
    let seg = ConvexBody::new_box(vec![0.0], vec![1.0]).unwrap();
    let s = estimate_surface_slice(&seg, None, 0.3, 100_000, SeedSpec::new(8, 1), &SliceOptions::default()).unwrap();
    assert_eq!(s.empirical, vec![1.0]);
    let err = estimate_surface_slice(&seg, None, 5.0, 1_000, SeedSpec::new(8, 2), &SliceOptions::default()).unwrap_err();
    assert!(matches!(err, Error::BandWidth { .. }));
}

#[test]
fn polytope_slice_via_mala() {
    let (tri, exact) = random_triangle(7);
    let profile = willslab::IntrinsicProfile::from_values(&exact).unwrap();
    let opts = SliceOptions {
        min_hits: 500,
        max_width_fraction: 0.25,
        mala: willslab::sampling::MalaOptions { chains: 4, ..Default::default() },
        ..SliceOptions::default()
    };
    let s = estimate_surface_slice(&tri, Some(&profile), 0.3, 200_000, SeedSpec::new(9, 0), &opts).unwrap();
    let th = s.theory.clone().unwrap();
    assert!((s.empirical[0] - th[0]).abs() < 0.06, "{s:?}");
}
