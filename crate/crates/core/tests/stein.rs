use willslab::intrinsic::{kappa, moments, profile_ball, profile_box, profile_point, surface_law, vk_law};
use willslab::sampling::{sample_box_exact, sample_mala, ExactSampler, MalaOptions, PointSource};
use willslab::special::gamma_cdf;
use willslab::stats::Summary;
use willslab::stein::*;
use willslab::{ConvexBody, Error, IntrinsicProfile, SeedSpec};

const PI: f64 = std::f64::consts::PI;

fn exact_source(sampler: &ExactSampler, n: usize, seed: SeedSpec) -> PointSource<'_> {
    PointSource::Exact { sampler, n, seed }
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
fn gauss_legendre(m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w)
        })
        .collect()
}

/// `A` from its defining double expectation on a box: outer draws `X`, inner
/// fresh draws `X_∞`, and the time integral by quadrature after `u = e^{-t} = sin θ`.
fn nested_a(half: &[f64], outer: usize, inner: usize, sigma2: f64, seed: SeedSpec) -> Estimate {
    let d = half.len();
    let body = ConvexBody::new_box(vec![0.0; d], half.to_vec()).unwrap();
    let grad = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(half)
            .map(|(xi, t)| 2.0 * PI * (xi - xi.clamp(-t, *t)))
            .collect()
    };
    let xs = sample_box_exact(&body, outer, seed.child(0)).unwrap();
    let nodes = gauss_legendre(24, 0.0, PI / 2.0);
    let s: Vec<f64> = (0..outer)
        .map(|i| {
            let x = xs.point(i);
            let y0 = grad(x);
            // Hess φ(x) = 2π diag(clamped), ∇H(y) = y/(2π)
            let v: Vec<f64> = x
                .iter()
                .zip(half)
                .zip(&y0)
                .map(|((xi, t), yi)| if xi.abs() > *t { 2.0 * PI * yi / (2.0 * PI) } else { 0.0 })
                .collect();
            let fresh = sample_box_exact(&body, inner, seed.child(1 + i as u64)).unwrap();
            let ys: Vec<Vec<f64>> = fresh.points().map(grad).collect();
            nodes
                .iter()
                .map(|&(theta, w)| {
                    let (u, c) = (theta.sin(), theta.cos());
                    let r = (1.0 - u * u).sqrt();
                    let mut inner_mean = vec![0.0; d];
                    for y in &ys {
                        for k in 0..d {
                            inner_mean[k] += (u * y0[k] + r * y[k]) / (2.0 * PI) / inner as f64;
                        }
                    }
                    w * c * v.iter().zip(&inner_mean).map(|(a, b)| a * b).sum::<f64>()
                })
                .sum()
        })
        .collect();
    let sum = Summary::of(&s);
    let root = sum.variance.sqrt();
    Estimate {
        value: 2.0 / sigma2 * root,
        stderr: 2.0 / sigma2 * sum.variance_stderr / (2.0 * root),
    }
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let nodes = gauss_legendre(10, 0.0, 2.0);
    let integral: f64 = nodes.iter().map(|(x, w)| w * x.powi(7)).sum();
    assert!((integral - 32.0).abs() < 1e-12);
}

#[test]
fn collapsed_a_matches_nested_monte_carlo() {
    let half = [0.5, 0.5, 0.5, 0.5];
    let sigma2 = moments(&profile_box(&[1.0; 4]).unwrap()).sigma2;
    let nested = nested_a(&half, 1_000, 1_000, sigma2, SeedSpec::new(1, 0));
    let body = ConvexBody::new_box(vec![0.0; 4], half.to_vec()).unwrap();
    let sampler = ExactSampler::new(&body).unwrap();
    let collapsed = estimate_a(&body, exact_source(&sampler, 100_000, SeedSpec::new(1, 1)), Some(sigma2)).unwrap();
    let joint = nested.stderr.hypot(collapsed.a.stderr);
    assert!((nested.value - collapsed.a.value).abs() <= 4.0 * joint, "{nested:?} vs {:?}", collapsed.a);
}

#[test]
fn a_times_sigma_is_two() {
    let bodies = vec![
        ConvexBody::unit_cube(16).unwrap(),
        ConvexBody::new_box(vec![1.0, -2.0, 0.0, 0.5, 3.0], vec![0.1, 2.0, 0.7, 0.3, 1.2]).unwrap(),
        ConvexBody::new_ball(vec![0.5, 0.5, 0.0, -1.0], 0.8).unwrap(),
    ];
    for (i, body) in bodies.iter().enumerate() {
        let profile = willslab::intrinsic::profile_of(body).unwrap();
        let sampler = ExactSampler::new(body).unwrap();
        let r = estimate_a(body, exact_source(&sampler, 100_000, SeedSpec::new(2, i as u64)), Some(moments(&profile).sigma2)).unwrap();
        assert!(r.a_sigma.within(2.0, 4.0), "{}: {:?}", body.kind(), r.a_sigma);
        assert!(r.a.value >= 0.0);
        assert!((r.a_four.value - 2.0 * r.a.value).abs() < 1e-12);
    }
}

#[test]
fn a_times_sigma_is_two_on_a_triangle() {
    let tri = ConvexBody::new_hpolytope(
        vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
        vec![0.25, 0.25],
    )
    .unwrap();
    let profile = IntrinsicProfile::from_values(&[1.0, (2.0 + 2f64.sqrt()) / 2.0, 0.5]).unwrap();
    let batch = sample_mala(&tri, &MalaOptions { n: 100_000, chains: 4, ..MalaOptions::default() }, SeedSpec::new(3, 0)).unwrap();
    let r = estimate_a(&tri, PointSource::from_batch(&batch), Some(moments(&profile).sigma2)).unwrap();
    assert!(r.a_sigma.within(2.0, 4.0), "{:?}", r.a_sigma);
}

#[test]
fn point_body_a_is_two_over_sigma() {
    let body = ConvexBody::point(vec![0.0; 10]).unwrap();
    let sampler = ExactSampler::new(&body).unwrap();
    let r = estimate_a(&body, exact_source(&sampler, 100_000, SeedSpec::new(4, 0)), Some(5.0)).unwrap();
    assert!(r.a.within(2.0 / 5f64.sqrt(), 4.0), "{:?}", r.a);
}

#[test]
fn b_agrees_across_routes() {
    let cases = vec![
        (ConvexBody::new_box(vec![0.0; 6], vec![0.1, 0.5, 1.0, 0.2, 0.05, 0.8]).unwrap(), profile_box(&[0.2, 1.0, 2.0, 0.4, 0.1, 1.6]).unwrap()),
        (ConvexBody::new_ball(vec![0.0; 5], 0.8).unwrap(), profile_ball(5, 0.8).unwrap()),
        (ConvexBody::unit_cube(16).unwrap(), profile_box(&[1.0; 16]).unwrap()),
    ];
    for (i, (body, profile)) in cases.iter().enumerate() {
        let sigma2 = moments(profile).sigma2;
        let sampler = ExactSampler::new(body).unwrap();
        let geo = estimate_b(body, profile, exact_source(&sampler, 100_000, SeedSpec::new(5, i as u64)), sigma2, SeedSpec::new(6, i as u64)).unwrap();
        let mix = estimate_b_mixture(profile, 100_000, sigma2, SeedSpec::new(7, i as u64)).unwrap();
        let joint = geo.sd_ep.stderr.hypot(mix.sd_ep.stderr);
        assert!((geo.sd_ep.value - mix.sd_ep.value).abs() <= 4.0 * joint, "{}: {:?} vs {:?}", body.kind(), geo.sd_ep, mix.sd_ep);
        assert!((geo.b.value * geo.sigma / 1.14 - geo.sd_ep.value).abs() < 1e-12);
    }
}

#[test]
fn ball_b_uses_the_closed_form_surface_mean() {
    let d = 7;
    let body = ConvexBody::new_ball(vec![0.0; d], 1.0).unwrap();
    let profile = profile_ball(d, 1.0).unwrap();
    let sigma2 = moments(&profile).sigma2;
    let sampler = ExactSampler::new(&body).unwrap();
    let source = exact_source(&sampler, 20_000, SeedSpec::new(8, 0));
    let r = estimate_b(&body, &profile, source, sigma2, SeedSpec::new(8, 1)).unwrap();
    let ep: Vec<f64> = source.map(|x| (d as f64 - 1.0) / (1.0 + body.distance(x).unwrap()));
    let direct = 1.14 / sigma2.sqrt() * Summary::of(&ep).variance.sqrt();
    assert!((r.b.value - direct).abs() < 1e-10 * direct);
}

#[test]
fn integration_by_parts_residuals_vanish() {
    let body = ConvexBody::unit_cube(16).unwrap();
    let sampler = ExactSampler::new(&body).unwrap();
    for (i, f) in [TestFn::Identity, TestFn::Constant, TestFn::Cubic].into_iter().enumerate() {
        let r = check_ibp(&body, exact_source(&sampler, 100_000, SeedSpec::new(9, i as u64)), f).unwrap();
        assert!(r.residual.within(0.0, 4.0), "{f:?}: {r:?}");
    }
    let point = ConvexBody::point(vec![0.0; 8]).unwrap();
    let sampler = ExactSampler::new(&point).unwrap();
    let r = check_ibp(&point, exact_source(&sampler, 100_000, SeedSpec::new(9, 9)), TestFn::Identity).unwrap();
    assert_eq!(r.rhs.value, 8.0);
    assert!(r.lhs.within(8.0, 4.0));
}

#[test]
fn brascamp_lieb_cases() {
    let point = ConvexBody::point(vec![0.0; 4]).unwrap();
    let r = brascamp_lieb_check(&point, 0.0, BlFunction::Sum, 100_000, SeedSpec::new(10, 0)).unwrap();
    assert!((r.bound.value - 4.0 / (2.0 * PI)).abs() < 1e-12);
    assert!(r.variance.within(4.0 / (2.0 * PI), 4.0), "{r:?}");
    let b = ConvexBody::cube(4, 1.0).unwrap();
    let r = brascamp_lieb_check(&b, 0.5, BlFunction::Sum, 100_000, SeedSpec::new(10, 1)).unwrap();
    assert!(r.holds, "{r:?}");
    let r = brascamp_lieb_check(&b, 0.1, BlFunction::SqNorm, 100_000, SeedSpec::new(10, 2)).unwrap();
    assert!(r.holds && r.gap > 4.0 * r.variance.stderr.hypot(r.bound.stderr), "{r:?}");
}

/// `var_p(s) ≤ p_1/p_0 = s (d−1) v_1 κ_{d−1} / (d κ_d)`.
#[test]
fn surface_variance_is_bounded_by_the_first_ratio() {
    let d = 12;
    let radius: f64 = 1.5;
    let sides: Vec<f64> = (0..d).map(|i| 2.0 * radius / (d as f64).sqrt() * (0.3 + 0.7 * i as f64 / d as f64)).collect();
    let ball_v1 = profile_ball(d, radius).unwrap().v()[1];
    for profile in [profile_box(&sides).unwrap(), profile_ball(d, radius).unwrap()] {
        let v1 = profile.v()[1];
        assert!(v1 <= ball_v1 * (1.0 + 1e-12));
        for s in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let law = surface_law(&profile, s).unwrap();
            let ratio = kappa(d - 1) / kappa(d) * (d as f64 - 1.0) / d as f64 * s;
            assert!((law.probs[1] / law.probs[0] - ratio * v1).abs() < 1e-10 * ratio * v1);
            assert!(law.var_p <= ratio * v1 * (1.0 + 1e-12), "s={s}");
            assert!(law.var_p <= ratio * ball_v1 * (1.0 + 1e-12));
        }
    }
}

/// `P(dist² ≤ t) = Σ_k P(V = k) P(Γ((d−k)/2) ≤ π t)`.
fn tail_by_mixture(profile: &IntrinsicProfile, t: f64) -> f64 {
    let d = profile.d;
    vk_law(profile)
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| p * if k == d { 1.0 } else { gamma_cdf((d - k) as f64 / 2.0, PI * t) })
        .sum()
}

#[test]
fn tilted_tail_matches_the_mixture_formula() {
    let cases = vec![
        (ConvexBody::unit_cube(10).unwrap(), profile_box(&[1.0; 10]).unwrap()),
        (ConvexBody::cube(20, 1.0 / 20f64.sqrt()).unwrap(), profile_box(&[2.0 / 20f64.sqrt(); 20]).unwrap()),
        (ConvexBody::point(vec![0.0; 20]).unwrap(), profile_point(20).unwrap()),
    ];
    for (i, (body, profile)) in cases.iter().enumerate() {
        let d = body.dim();
        let est = tail_probability(body, 7.0, 200_000, SeedSpec::new(11, i as u64)).unwrap();
        let exact = tail_by_mixture(profile, d as f64 / 49.0);
        assert!(est.probability.within(exact, 4.0), "d={d}: {:?} vs {exact}", est.probability);
    }
}

#[test]
fn tail_ratio_decreases_for_the_point_body() {
    let mut last = f64::INFINITY;
    for d in [10usize, 20, 40] {
        let est = tail_probability(&ConvexBody::point(vec![0.0; d]).unwrap(), 7.0, 100_000, SeedSpec::new(12, d as u64)).unwrap();
        assert!(est.ratio_to_exp < last);
        last = est.ratio_to_exp;
    }
}

#[test]
fn stein_bound_dominates_the_empirical_distance() {
    let body = ConvexBody::unit_cube(64).unwrap();
    let r = stein_bound(&body, None, 100_000, SeedSpec::new(13, 0)).unwrap();
    assert!(r.bound.value >= r.empirical_tv - 4.0 * r.bound.stderr, "{r:?}");
    assert!(r.a.value >= 0.0 && r.b.value >= 0.0);
    assert!(r.a_sigma.within(2.0, 4.0));
}

#[test]
fn stein_bound_needs_a_profile_for_polytopes() {
    let tri = ConvexBody::new_hpolytope(
        vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
        vec![0.25, 0.25],
    )
    .unwrap();
    assert!(matches!(stein_bound(&tri, None, 1_000, SeedSpec::new(14, 0)), Err(Error::Input(_))));
}

#[test]
fn ball_family_bound_scales_like_d_to_the_minus_quarter() {
    let mut scaled = Vec::new();
    for d in [16usize, 64, 256] {
        let r = (d as f64).powf(0.25);
        let body = ConvexBody::new_ball(vec![0.0; d], r).unwrap();
        let rep = stein_bound(&body, None, 100_000, SeedSpec::new(15, d as u64)).unwrap();
        assert!(rep.bound.value >= rep.empirical_tv - 4.0 * rep.bound.stderr);
        scaled.push(rep.bound.value * (d as f64).powf(0.25));
    }
    println!("bound·d^(1/4) = {scaled:?}");
    assert!(scaled.iter().all(|s| *s <= 2.0 * scaled[0]), "{scaled:?}");
}
