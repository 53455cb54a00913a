//! Estimators for the Stein bound `d_TV(F, N) ≤ A + B` and checks of its ingredients.
//!
//! Convention: `φ(x) = π dist²(x, K) + ln W(K)`, `∇φ(x) = 2π(x − Π_K x)`,
//! `H(y) = ‖y‖²/(4π)`, so `H(∇φ(x)) = π dist²(x, K)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, Shape};
use crate::cltlab::{default_bins, ks_distance_to_gaussian, standardize, tv_distance_histogram};
use crate::error::{Error, Result};
use crate::intrinsic::{moments, profile_of, vk_law, IntrinsicProfile, SurfaceCoefficients};
use crate::par;
use crate::rng::{self, SeedSpec};
use crate::sampling::{box_coordinate, sample_hk_mixture, sample_mala, ExactSampler, MalaOptions, PointSource};
use crate::stats::{pairwise_sum, Summary};

const PI: f64 = std::f64::consts::PI;

/// Constant in front of the `B` term.
pub const B_CONSTANT: f64 = 1.14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn scaled(self, c: f64) -> Estimate {
        Estimate {
            value: c * self.value,
            stderr: c.abs() * self.stderr,
        }
    }

    /// `|value − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// `∇φ(x) = 2π(x − Π_K x)`.
pub fn grad_phi(body: &ConvexBody, x: &[f64]) -> Result<Vec<f64>> {
    let p = body.project_point(x)?;
    Ok(x.iter().zip(&p).map(|(a, b)| 2.0 * PI * (a - b)).collect())
}

/// `H(y) = ‖y‖²/(4π)`.
pub fn h_map(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>() / (4.0 * PI)
}

/// Variance of `xs` with a batch-means standard error.
fn variance_batch_means(xs: &[f64]) -> Estimate {
    let n = xs.len();
    let batches = (n / 10).clamp(1, 50);
    let size = n / batches;
    let vars: Vec<f64> = (0..batches)
        .map(|b| Summary::of(&xs[b * size..(b + 1) * size]).variance)
        .collect();
    let spread = Summary::of(&vars);
    Estimate {
        value: Summary::of(xs).variance,
        stderr: if batches > 1 { spread.stderr } else { f64::INFINITY },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AReport {
    /// `(2/σ²)·√Var(S)`.
    pub a: Estimate,
    /// The same with the `4/σ²` prefactor.
    pub a_four: Estimate,
    /// `A·σ`, which equals 2 for every body.
    pub a_sigma: Estimate,
    pub var_s: Estimate,
    pub sigma: f64,
    /// `‖m‖` for `m = E[∇φ(X)]` estimated on the first half.
    pub m_norm: f64,
    pub n: usize,
}

/// `A` through the collapsed integrand
/// `S(X) = (1/(2π))(‖Y‖²/2 + (π/4)⟨Y, m⟩)`, `Y = ∇φ(X)`, with `m` estimated
/// from the first half of the points and `S` evaluated on the second half.
/// `sigma2 = None` uses the sample variance of `H` on the second half.
pub fn estimate_a(body: &ConvexBody, source: PointSource<'_>, sigma2: Option<f64>) -> Result<AReport> {
    if source.len() < 40 {
        return Err(Error::input("estimate_a needs at least 40 points"));
    }
    let d = body.dim();
    let (first, second) = source.halves();
    let sum = first.sum_vectors(d, |x, out| {
        out.copy_from_slice(&grad_phi(body, x)?);
        Ok(())
    })?;
    let m: Vec<f64> = sum.iter().map(|s| s / first.len() as f64).collect();
    let pairs = second.map(|x| -> Result<(f64, f64)> {
        let y = grad_phi(body, x)?;
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let ym: f64 = y.iter().zip(&m).map(|(a, b)| a * b).sum();
        Ok(((yy / 2.0 + PI / 4.0 * ym) / (2.0 * PI), yy / (4.0 * PI)))
    });
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    let s: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let sigma2 = match sigma2 {
        Some(v) => v,
        None => Summary::of(&pairs.iter().map(|p| p.1).collect::<Vec<_>>()).variance,
    };
    if !(sigma2 > 0.0) {
        return Err(Error::Degenerate("σ² must be positive".into()));
    }
    let var_s = variance_batch_means(&s);
    let root = var_s.value.max(0.0).sqrt();
    let a = Estimate {
        value: 2.0 / sigma2 * root,
        stderr: 2.0 / sigma2 * var_s.stderr / (2.0 * root.max(f64::MIN_POSITIVE)),
    };
    let sigma = sigma2.sqrt();
    Ok(AReport {
        a,
        a_four: a.scaled(2.0),
        a_sigma: a.scaled(sigma),
        var_s,
        sigma,
        m_norm: m.iter().map(|v| v * v).sum::<f64>().sqrt(),
        n: source.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BReport {
    pub b: Estimate,
    /// `sd(e_p(1/dist))`.
    pub sd_ep: Estimate,
    pub sigma: f64,
    /// Fraction of draws inside `K`, mapped to `e_p(∞) = d − 1`.
    pub inside_fraction: f64,
    pub n: usize,
}

const BOOTSTRAP_RESAMPLES: usize = 200;

/// `B = (1.14/σ)·sd(e_p(1/dist))` from distance draws, with a bootstrap stderr.
pub fn estimate_b_from_distances(dists: &[f64], profile: &IntrinsicProfile, sigma2: f64, seed: SeedSpec) -> Result<BReport> {
    if dists.len() < 10 {
        return Err(Error::input("estimate_b needs at least 10 distances"));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::Degenerate("σ² must be positive".into()));
    }
    let coef = SurfaceCoefficients::new(profile);
    let ep: Vec<f64> = dists
        .iter()
        .map(|&r| coef.mean(if r > 0.0 { 1.0 / r } else { f64::INFINITY }))
        .collect();
    let sd = Summary::of(&ep).variance.sqrt();
    let boot = par::map_indexed(BOOTSTRAP_RESAMPLES, |b| {
        let mut r = seed.child(b as u64).rng(0);
        let resample: Vec<f64> = (0..ep.len()).map(|_| ep[r.random_range(0..ep.len())]).collect();
        Summary::of(&resample).variance.sqrt()
    });
    let sd_ep = Estimate {
        value: sd,
        stderr: Summary::of(&boot).variance.sqrt(),
    };
    let sigma = sigma2.sqrt();
    Ok(BReport {
        b: sd_ep.scaled(B_CONSTANT / sigma),
        sd_ep,
        sigma,
        inside_fraction: dists.iter().filter(|&&r| r == 0.0).count() as f64 / dists.len() as f64,
        n: dists.len(),
    })
}

/// `B` with distances of the given points.
pub fn estimate_b(
    body: &ConvexBody,
    profile: &IntrinsicProfile,
    source: PointSource<'_>,
    sigma2: f64,
    seed: SeedSpec,
) -> Result<BReport> {
    if profile.d != body.dim() {
        return Err(Error::input("profile and body dimensions differ"));
    }
    let dists = source.map(|x| body.distance(x)).into_iter().collect::<Result<Vec<_>>>()?;
    estimate_b_from_distances(&dists, profile, sigma2, seed)
}

/// `B` with `dist = √(H/π)` for mixture draws of `H`.
pub fn estimate_b_mixture(profile: &IntrinsicProfile, n: usize, sigma2: f64, seed: SeedSpec) -> Result<BReport> {
    let h = sample_hk_mixture(&vk_law(profile), profile.d, n, seed.child(0))?;
    let dists: Vec<f64> = h.values.iter().map(|v| (v / PI).sqrt()).collect();
    estimate_b_from_distances(&dists, profile, sigma2, seed.child(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFn {
    /// `f(x) = x`, `Tr ∇f = d`.
    Identity,
    /// `f(x) = (1, …, 1)`, `Tr ∇f = 0`.
    Constant,
    /// `f(x) = x‖x‖²`, `Tr ∇f = (d + 2)‖x‖²`.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbpResidual {
    /// `E⟨f(X), ∇φ(X)⟩`.
    pub lhs: Estimate,
    /// `E[Tr ∇f(X)]`.
    pub rhs: Estimate,
    pub residual: Estimate,
    pub n: usize,
}

/// Monte Carlo residual of `E⟨f(X), ∇φ(X)⟩ = E[Tr ∇f(X)]`.
pub fn check_ibp(body: &ConvexBody, source: PointSource<'_>, f: TestFn) -> Result<IbpResidual> {
    if source.len() < 2 {
        return Err(Error::input("check_ibp needs at least 2 points"));
    }
    let d = body.dim() as f64;
    let terms = source.map(|x| -> Result<(f64, f64)> {
        let y = grad_phi(body, x)?;
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        Ok(match f {
            TestFn::Identity => (xy, d),
            TestFn::Constant => (y.iter().sum(), 0.0),
            TestFn::Cubic => {
                let xx: f64 = x.iter().map(|v| v * v).sum();
                (xx * xy, (d + 2.0) * xx)
            }
        })
    });
    let terms = terms.into_iter().collect::<Result<Vec<_>>>()?;
    let est = |v: Vec<f64>| {
        let s = Summary::of(&v);
        Estimate {
            value: s.mean,
            stderr: s.stderr,
        }
    };
    Ok(IbpResidual {
        lhs: est(terms.iter().map(|t| t.0).collect()),
        rhs: est(terms.iter().map(|t| t.1).collect()),
        residual: est(terms.iter().map(|t| t.0 - t.1).collect()),
        n: terms.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlFunction {
    /// `f(x) = Σ x_i`.
    Sum,
    /// `f(x) = ‖x‖²`.
    SqNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlReport {
    pub epsilon: f64,
    /// `Var f(X_ε)`.
    pub variance: Estimate,
    /// `E[∇fᵀ (Hess φ_ε)^{-1} ∇f]`.
    pub bound: Estimate,
    /// `Var ≤ bound + 4·(combined stderr)`.
    pub holds: bool,
    pub gap: f64,
    pub n: usize,
}

/// Brascamp–Lieb for `φ_ε = π dist² + επ‖x − c‖²` on a box (or the point body).
///
/// Coordinates are independent: each is drawn from the box marginal and kept
/// with probability `e^{-επu²}`. The Hessian is diagonal with `2π(1+ε)` on
/// clamped coordinates and `2πε` inside.
pub fn brascamp_lieb_check(body: &ConvexBody, epsilon: f64, f: BlFunction, n: usize, seed: SeedSpec) -> Result<BlReport> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::input("epsilon must be nonnegative"));
    }
    if n < 10 {
        return Err(Error::input("brascamp_lieb_check needs at least 10 draws"));
    }
    let (center, half): (Vec<f64>, Vec<f64>) = match body.shape() {
        Shape::Box { center, half_widths } => (center.clone(), half_widths.clone()),
        Shape::Ball { degenerate: true, center, .. } => (center.clone(), vec![0.0; body.dim()]),
        _ => return Err(Error::input("brascamp_lieb_check needs a box or the point body")),
    };
    if epsilon == 0.0 && !body.is_degenerate() {
        return Err(Error::SingularHessian(
            "with ε = 0 the Hessian vanishes on interior coordinates".into(),
        ));
    }
    let pairs = rng::generate(n, seed, |r| {
        let mut fx = 0.0;
        let mut q = 0.0;
        for (c, t) in center.iter().zip(&half) {
            let u = loop {
                let u = box_coordinate(r, *t);
                if epsilon == 0.0 || r.random::<f64>() < (-epsilon * PI * u * u).exp() {
                    break u;
                }
            };
            let x = c + u;
            let h = if u.abs() > *t { 2.0 * PI * (1.0 + epsilon) } else { 2.0 * PI * epsilon };
            let (val, grad) = match f {
                BlFunction::Sum => (x, 1.0),
                BlFunction::SqNorm => (x * x, 2.0 * x),
            };
            fx += val;
            q += grad * grad / h;
        }
        (fx, q)
    });
    let fs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let qs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let sf = Summary::of(&fs);
    let sq = Summary::of(&qs);
    let variance = Estimate {
        value: sf.variance,
        stderr: sf.variance_stderr,
    };
    let bound = Estimate {
        value: sq.mean,
        stderr: sq.stderr,
    };
    let slack = 4.0 * variance.stderr.hypot(bound.stderr);
    Ok(BlReport {
        epsilon,
        variance,
        bound,
        holds: variance.value <= bound.value + slack,
        gap: bound.value - variance.value,
        n,
    })
}

fn box_geometry(body: &ConvexBody) -> Result<Vec<f64>> {
    match body.shape() {
        Shape::Box { half_widths, .. } => Ok(half_widths.clone()),
        Shape::Ball { degenerate: true, .. } => Ok(vec![0.0; body.dim()]),
        _ => Err(Error::input("tail estimates need a box or the point body")),
    }
}

/// Number of exact draws with `dist(X, K) ≤ √d/θ`.
pub fn count_tail_hits(body: &ConvexBody, theta: f64, n: usize, seed: SeedSpec) -> Result<usize> {
    let half = box_geometry(body)?;
    let t2 = body.dim() as f64 / (theta * theta);
    let hits = rng::map_chunks(n, seed, |r, count| {
        (0..count)
            .filter(|_| {
                let d2: f64 = half
                    .iter()
                    .map(|t| {
                        let e = (box_coordinate(r, *t).abs() - t).max(0.0);
                        e * e
                    })
                    .sum();
                d2 <= t2
            })
            .count()
    });
    Ok(hits.into_iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub d: usize,
    pub theta: f64,
    pub probability: Estimate,
    /// `P / e^{-d/2}`.
    pub ratio_to_exp: f64,
    /// Tilt `λ`: coordinates outside are drawn with density `∝ e^{-(π+λ)e²}`.
    pub lambda: f64,
    pub n: usize,
}

/// `P(dist(X, K) ≤ √d/θ)` for a box by exponential tilting of `dist²`.
pub fn tail_probability(body: &ConvexBody, theta: f64, n: usize, seed: SeedSpec) -> Result<TailEstimate> {
    if !(theta > 0.0) || n < 2 {
        return Err(Error::input("theta must be positive and n ≥ 2"));
    }
    let half = box_geometry(body)?;
    let d = body.dim();
    let t2 = d as f64 / (theta * theta);
    let outside = |lambda: f64| (PI / (PI + lambda)).sqrt();
    let expected_d2 = |lambda: f64| -> f64 {
        half.iter()
            .map(|t| outside(lambda) / (2.0 * t + outside(lambda)) / (2.0 * (PI + lambda)))
            .sum()
    };
    let lambda = if expected_d2(0.0) <= t2 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while expected_d2(hi) > t2 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if expected_d2(mid) > t2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let log_ratio: f64 = half
        .iter()
        .map(|t| ((2.0 * t + outside(lambda)) / (2.0 * t + 1.0)).ln())
        .sum();
    let sd_out = (1.0 / (2.0 * (PI + lambda))).sqrt();
    let weights = rng::generate(n, seed, |r| {
        let mut d2 = 0.0;
        for t in &half {
            let inside = 2.0 * t / (2.0 * t + outside(lambda));
            if r.random::<f64>() >= inside {
                let z: f64 = r.sample(rand_distr::StandardNormal);
                let e = z.abs() * sd_out;
                d2 += e * e;
            }
        }
        if d2 <= t2 {
            (log_ratio + lambda * d2).exp()
        } else {
            0.0
        }
    });
    let s = Summary::of(&weights);
    let probability = Estimate {
        value: pairwise_sum(&weights) / n as f64,
        stderr: s.stderr,
    };
    Ok(TailEstimate {
        d,
        theta,
        ratio_to_exp: probability.value / (-(d as f64) / 2.0).exp(),
        probability,
        lambda,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinReport {
    pub d: usize,
    pub body: String,
    pub sigma: f64,
    pub a: Estimate,
    pub b: Estimate,
    /// `A + B` with the `2/σ²` prefactor in `A`.
    pub bound: Estimate,
    /// `A + B` with the `4/σ²` prefactor in `A`.
    pub bound_four: Estimate,
    pub a_sigma: Estimate,
    /// Histogram TV proxy of `F` on the same draws.
    pub empirical_tv: f64,
    pub empirical_ks: f64,
    pub tv_bins: usize,
    pub n: usize,
}

/// Assembles `A`, `B` and the empirical TV proxy from one set of draws.
///
/// Boxes, balls and the point body are sampled exactly (streamed); H-polytopes
/// by MALA with default settings. A profile is required for H-polytopes.
pub fn stein_bound(body: &ConvexBody, profile: Option<&IntrinsicProfile>, n: usize, seed: SeedSpec) -> Result<SteinReport> {
    let owned;
    let profile = match profile {
        Some(p) => p,
        None => {
            owned = profile_of(body).map_err(|_| Error::input("stein_bound needs an intrinsic profile for this body"))?;
            &owned
        }
    };
    if profile.d != body.dim() {
        return Err(Error::input("profile and body dimensions differ"));
    }
    let mom = moments(profile);
    let sampler;
    let batch;
    let source = match body.shape() {
        Shape::HPolytope { .. } => {
            batch = sample_mala(body, &MalaOptions { n, ..MalaOptions::default() }, seed.child(0))?;
            PointSource::from_batch(&batch)
        }
        _ => {
            sampler = ExactSampler::new(body)?;
            PointSource::Exact {
                sampler: &sampler,
                n,
                seed: seed.child(0),
            }
        }
    };
    let a = estimate_a(body, source, Some(mom.sigma2))?;
    let dists = source.map(|x| body.distance(x)).into_iter().collect::<Result<Vec<_>>>()?;
    let b = estimate_b_from_distances(&dists, profile, mom.sigma2, seed.child(1))?;
    let h: Vec<f64> = dists.iter().map(|r| PI * r * r).collect();
    let f = standardize(&h, mom.into())?;
    let bins = default_bins(f.len());
    let combine = |a: Estimate, b: Estimate| Estimate {
        value: a.value + b.value,
        stderr: a.stderr.hypot(b.stderr),
    };
    Ok(SteinReport {
        d: body.dim(),
        body: body.kind().into(),
        sigma: mom.sigma2.sqrt(),
        bound: combine(a.a, b.b),
        bound_four: combine(a.a_four, b.b),
        a: a.a,
        a_sigma: a.a_sigma,
        b: b.b,
        empirical_tv: tv_distance_histogram(&f, Some(bins))?,
        empirical_ks: ks_distance_to_gaussian(&f)?.statistic,
        tv_bins: bins,
        n,
    })
}
