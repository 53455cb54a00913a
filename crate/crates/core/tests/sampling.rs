use willslab::intrinsic::{moments, profile_ball, profile_box, profile_point, vk_law};
use willslab::sampling::*;
use willslab::stats::{effective_sample_size, two_sample_ks, two_sample_ks_critical, Summary};
use willslab::stein::{count_tail_hits, grad_phi};
use willslab::{ConvexBody, SeedSpec};

const PI: f64 = std::f64::consts::PI;

fn within(s: &Summary, target: f64, k: f64) -> bool {
    (s.mean - target).abs() <= k * s.stderr
}

#[test]
fn box_marginal_interior_mass_and_center() {
    let body = ConvexBody::new_box(vec![0.7], vec![1.0]).unwrap();
    let batch = sample_box_exact(&body, 100_000, SeedSpec::new(1, 0)).unwrap();
    let inside: Vec<f64> = batch.values.iter().map(|x| f64::from(u8::from((x - 0.7).abs() <= 1.0))).collect();
    assert!(within(&Summary::of(&inside), 2.0 / 3.0, 4.0));
    assert!(within(&Summary::of(&batch.values), 0.7, 4.0));
}

#[test]
fn point_body_marginal_is_gaussian() {
    let body = ConvexBody::point(vec![0.0; 3]).unwrap();
    let batch = sample_box_exact(&body, 100_000, SeedSpec::new(2, 0)).unwrap();
    let sq: Vec<f64> = batch.values.iter().map(|x| x * x).collect();
    assert!(within(&Summary::of(&sq), 1.0 / (2.0 * PI), 4.0));
}

#[test]
fn cube_mixture_mean_is_a_quarter_of_d() {
    let law = vk_law(&profile_box(&[1.0; 64]).unwrap());
    let h = sample_hk_mixture(&law, 64, 1_000_000, SeedSpec::new(3, 0)).unwrap();
    assert!(within(&Summary::of(&h.values), 16.0, 4.0));
    let geo = h_from_points(
        &ConvexBody::unit_cube(64).unwrap(),
        &sample_box_exact(&ConvexBody::unit_cube(64).unwrap(), 20_000, SeedSpec::new(3, 1)).unwrap(),
    )
    .unwrap();
    assert!(within(&Summary::of(&geo.values), 16.0, 4.0));
}

#[test]
fn exact_and_mixture_routes_agree() {
    for (i, d) in [4usize, 16, 64].into_iter().enumerate() {
        let body = ConvexBody::unit_cube(d).unwrap();
        let geo = h_from_points(&body, &sample_box_exact(&body, 100_000, SeedSpec::new(4, i as u64)).unwrap()).unwrap();
        let mix = sample_hk_mixture(&vk_law(&profile_box(&vec![1.0; d]).unwrap()), d, 100_000, SeedSpec::new(5, i as u64)).unwrap();
        let ks = two_sample_ks(&geo.values, &mix.values);
        assert!(ks < two_sample_ks_critical(0.01, 100_000, 100_000), "d={d}: {ks}");
    }
    for (i, d) in [2usize, 5, 30].into_iter().enumerate() {
        let body = ConvexBody::new_ball(vec![1.0; d], 1.5).unwrap();
        let geo = h_from_points(&body, &sample_ball_exact(&body, 100_000, SeedSpec::new(6, i as u64)).unwrap()).unwrap();
        let mix = sample_hk_mixture(&vk_law(&profile_ball(d, 1.5).unwrap()), d, 100_000, SeedSpec::new(7, i as u64)).unwrap();
        let ks = two_sample_ks(&geo.values, &mix.values);
        assert!(ks < two_sample_ks_critical(0.01, 100_000, 100_000), "ball d={d}: {ks}");
    }
}

#[test]
fn gradient_has_zero_mean() {
    let bodies = [
        ConvexBody::new_box(vec![0.5, -1.0, 2.0, 0.0, 0.0], vec![0.2, 1.0, 0.5, 3.0, 0.05]).unwrap(),
        ConvexBody::new_ball(vec![1.0, 2.0, 3.0], 0.7).unwrap(),
    ];
    for (i, body) in bodies.iter().enumerate() {
        let batch = match body.kind() {
            "box" => sample_box_exact(body, 100_000, SeedSpec::new(8, i as u64)).unwrap(),
            _ => sample_ball_exact(body, 100_000, SeedSpec::new(8, i as u64)).unwrap(),
        };
        let ys: Vec<Vec<f64>> = batch.points().map(|x| grad_phi(body, x).unwrap()).collect();
        for k in 0..body.dim() {
            let col: Vec<f64> = ys.iter().map(|y| y[k]).collect();
            assert!(within(&Summary::of(&col), 0.0, 4.0), "{} coordinate {k}", body.kind());
        }
    }
}

#[test]
fn tail_event_is_never_hit_for_the_point_body() {
    let body = ConvexBody::point(vec![0.0; 40]).unwrap();
    assert_eq!(count_tail_hits(&body, 7.0, 1_000_000, SeedSpec::new(9, 0)).unwrap(), 0);
}

fn mala(body: &ConvexBody, n: usize, thin: usize, seed: SeedSpec) -> SampleBatch {
    sample_mala(
        body,
        &MalaOptions {
            n,
            thin,
            chains: 4,
            ..MalaOptions::default()
        },
        seed,
    )
    .unwrap()
}

fn mcmc_mean_ok(values: &[f64], target: f64) -> bool {
    let s = Summary::of(values);
    let ess = effective_sample_size(values).max(1.0);
    (s.mean - target).abs() <= 4.0 * (s.variance / ess).sqrt()
}

#[test]
fn mala_matches_box_volume_fraction_and_mean_h() {
    let cube = ConvexBody::unit_cube(3).unwrap();
    let batch = mala(&cube, 40_000, 5, SeedSpec::new(10, 0));
    let inside: Vec<f64> = batch.points().map(|x| f64::from(u8::from(cube.contains(x)))).collect();
    assert!(mcmc_mean_ok(&inside, 1.0 / 8.0));

    let square = ConvexBody::unit_cube(2).unwrap();
    let batch = mala(&square, 40_000, 5, SeedSpec::new(10, 1));
    let h = h_from_points(&square, &batch).unwrap();
    let target = moments(&profile_box(&[1.0, 1.0]).unwrap()).delta;
    assert!((target - 0.5).abs() < 1e-12);
    assert!(mcmc_mean_ok(&h.values, target));
}

#[test]
fn mala_and_exact_agree_on_a_box() {
    let body = ConvexBody::unit_cube(4).unwrap();
    let chain = h_from_points(&body, &mala(&body, 10_000, 25, SeedSpec::new(11, 0))).unwrap();
    let exact = h_from_points(&body, &sample_box_exact(&body, 10_000, SeedSpec::new(11, 1)).unwrap()).unwrap();
    let ks = two_sample_ks(&chain.values, &exact.values);
    assert!(ks < two_sample_ks_critical(0.01, 10_000, 10_000), "{ks}");
}

#[test]
fn mala_on_a_triangle_matches_mixture_mean() {
    // right triangle with legs 1: area 1/2, half-perimeter (2 + √2)/2
    let tri = ConvexBody::new_hpolytope(
        vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
        vec![0.25, 0.25],
    )
    .unwrap();
    let profile = willslab::IntrinsicProfile::from_values(&[1.0, (2.0 + 2f64.sqrt()) / 2.0, 0.5]).unwrap();
    let batch = mala(&tri, 40_000, 5, SeedSpec::new(12, 0));
    let diag = batch.diagnostics.unwrap();
    assert!((0.3..0.8).contains(&diag.acceptance));
    let h = h_from_points(&tri, &batch).unwrap();
    assert!(mcmc_mean_ok(&h.values, moments(&profile).delta));
}

#[test]
fn point_profile_mixture_is_gamma() {
    let h = sample_hk_mixture(&vk_law(&profile_point(6).unwrap()), 6, 200_000, SeedSpec::new(13, 0)).unwrap();
    let s = Summary::of(&h.values);
    assert!(within(&s, 3.0, 4.0));
    assert!((s.variance - 3.0).abs() <= 4.0 * s.variance_stderr);
}
