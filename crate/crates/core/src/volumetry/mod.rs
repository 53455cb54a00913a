//! Monte Carlo parallel volumes, Steiner fits and the surface-slice law.

mod wls;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::intrinsic::{kappa, surface_law, IntrinsicProfile};
use crate::rng::{self, SeedSpec};
use crate::sampling::{sample_mala, ExactSampler, MalaOptions};
use crate::stats::pairwise_sum;
use wls::weighted_least_squares;

/// Hit-or-miss is refused above this dimension.
pub const MAX_HIT_OR_MISS_DIM: usize = 8;

const MAX_CONDITION: f64 = 1e12;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub method: String,
}

/// Hit-or-miss estimate of `Vol(K + rB)` inside the cube of half-side `R + r`.
pub fn estimate_parallel_volume(body: &ConvexBody, r: f64, n: usize, seed: SeedSpec) -> Result<VolumeEstimate> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::input("r must be nonnegative"));
    }
    let d = body.dim();
    if d > MAX_HIT_OR_MISS_DIM {
        return Err(Error::input(format!(
            "hit-or-miss is limited to d ≤ {MAX_HIT_OR_MISS_DIM}; use estimate_wills_scaled"
        )));
    }
    let half = body.enclosing_radius() + r;
    let center = body.center();
    let hits = rng::map_chunks(n, seed, |g, count| -> Result<u64> {
        let mut x = vec![0.0; d];
        let mut hits = 0;
        for _ in 0..count {
            for (xi, ci) in x.iter_mut().zip(center) {
                *xi = ci + half * (2.0 * g.random::<f64>() - 1.0);
            }
            if body.distance(&x)? <= r {
                hits += 1;
            }
        }
        Ok(hits)
    });
    let hits: u64 = hits.into_iter().sum::<Result<u64>>()?;
    let p = hits as f64 / n as f64;
    let box_volume = (2.0 * half).powi(d as i32);
    Ok(VolumeEstimate {
        value: box_volume * p,
        stderr: box_volume * (p * (1.0 - p) / n as f64).sqrt(),
        n,
        method: "hit_or_miss".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinerOptions {
    /// Fix `v_0 = 1` instead of fitting it.
    pub fix_v0: bool,
}

impl Default for SteinerOptions {
    fn default() -> Self {
        SteinerOptions { fix_v0: true }
    }
}

/// Fitted `(v_0, …, v_d)` with parameter covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFit {
    pub v: Vec<f64>,
    pub stderr: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub condition: f64,
    /// `(abscissa, estimate)` pairs that entered the fit.
    pub points: Vec<(f64, VolumeEstimate)>,
}

impl ProfileFit {
    /// The fit as a profile, with negative estimates clipped to zero.
    pub fn profile(&self) -> Result<IntrinsicProfile> {
        IntrinsicProfile::from_values(&self.v.iter().map(|v| v.max(0.0)).collect::<Vec<_>>())
    }
}

/// Geometric spacing over `[0.25, 4]·R`, at least `d + 2` radii.
pub fn default_radii(body: &ConvexBody) -> Vec<f64> {
    let m = (body.dim() + 2).max(8);
    let r = body.enclosing_radius().max(1e-3);
    (0..m)
        .map(|i| r * 0.25 * 16f64.powf(i as f64 / (m - 1) as f64))
        .collect()
}

fn distinct(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Least-squares `v` from `Vol(K + rB) = Σ κ_{d−k} v_k r^{d−k}` at each radius.
pub fn fit_steiner(
    body: &ConvexBody,
    radii: &[f64],
    n_per_radius: usize,
    seed: SeedSpec,
    opts: SteinerOptions,
) -> Result<ProfileFit> {
    let d = body.dim();
    let first = usize::from(opts.fix_v0);
    if distinct(radii) < d + 1 - first {
        return Err(Error::input(format!("need at least {} distinct radii", d + 1 - first)));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::input("radii must be positive"));
    }
    let points: Vec<(f64, VolumeEstimate)> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| Ok((r, estimate_parallel_volume(body, r, n_per_radius, seed.child(i as u64))?)))
        .collect::<Result<_>>()?;
    let kappas: Vec<f64> = (0..=d).map(kappa).collect();
    let design: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| (first..=d).map(|k| kappas[d - k] * r.powi((d - k) as i32)).collect())
        .collect();
    let y: Vec<f64> = points
        .iter()
        .map(|(r, e)| if opts.fix_v0 { e.value - kappas[d] * r.powi(d as i32) } else { e.value })
        .collect();
    let sigma: Vec<f64> = points.iter().map(|(_, e)| floor_stderr(e)).collect();
    let fit = weighted_least_squares(&design, &y, &sigma, MAX_CONDITION)?;
    Ok(assemble(fit, opts.fix_v0, points))
}

fn floor_stderr(e: &VolumeEstimate) -> f64 {
    e.stderr.max(1e-9 * e.value.abs()).max(f64::MIN_POSITIVE)
}

fn assemble(fit: wls::WlsFit, fix_v0: bool, points: Vec<(f64, VolumeEstimate)>) -> ProfileFit {
    let mut v = fit.beta;
    let mut cov = fit.covariance;
    if fix_v0 {
        v.insert(0, 1.0);
        for row in cov.iter_mut() {
            row.insert(0, 0.0);
        }
        cov.insert(0, vec![0.0; v.len()]);
    }
    ProfileFit {
        stderr: (0..v.len()).map(|k| cov[k][k].max(0.0).sqrt()).collect(),
        v,
        covariance: cov,
        condition: fit.condition,
        points,
    }
}

/// Importance-sampling estimates of `W(λK) = ∫ e^{-π dist²(x, λK)} dx`.
///
/// The proposal is `N(λc, s² I)` with `s² = 1/π + (λR)²/d`, which covers the
/// flat part and the Gaussian shoulders of the integrand.
pub fn estimate_wills_scaled(body: &ConvexBody, lambdas: &[f64], n: usize, seed: SeedSpec) -> Result<Vec<(f64, VolumeEstimate)>> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::input("scales must be positive"));
    }
    let d = body.dim();
    lambdas
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let r = lambda * body.enclosing_radius();
            let s2 = 1.0 / PI + r * r / d as f64;
            let s = s2.sqrt();
            let center: Vec<f64> = body.center().iter().map(|c| lambda * c).collect();
            let log_norm = 0.5 * d as f64 * (2.0 * PI * s2).ln();
            let parts = rng::map_chunks(n, seed.child(i as u64), |g, count| -> Result<(f64, f64, f64)> {
                let mut x = vec![0.0; d];
                let mut u = vec![0.0; d];
                let mut w = Vec::with_capacity(count);
                for _ in 0..count {
                    let mut z2 = 0.0;
                    for ((xi, ui), ci) in x.iter_mut().zip(u.iter_mut()).zip(&center) {
                        let z: f64 = g.sample(StandardNormal);
                        z2 += z * z;
                        *xi = ci + s * z;
                        *ui = *xi / lambda;
                    }
                    let dist = lambda * body.distance(&u)?;
                    w.push((-PI * dist * dist + 0.5 * z2 + log_norm).exp());
                }
                let w2: Vec<f64> = w.iter().map(|v| v * v).collect();
                Ok((pairwise_sum(&w), pairwise_sum(&w2), count as f64))
            });
            let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
            let sum = pairwise_sum(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
            let sum2 = pairwise_sum(&parts.iter().map(|p| p.1).collect::<Vec<_>>());
            let nf = n as f64;
            let ess_fraction = sum * sum / sum2 / nf;
            if !(ess_fraction >= 0.01) {
                return Err(Error::ProposalQuality { fraction: ess_fraction });
            }
            let mean = sum / nf;
            let var = (sum2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
            Ok((
                lambda,
                VolumeEstimate {
                    value: mean,
                    stderr: (var / nf).sqrt(),
                    n,
                    method: "importance_sampling".into(),
                },
            ))
        })
        .collect()
}

/// Recovers `v` from `W(λK) = Σ λ^k v_k` at the given scales (a Vandermonde fit).
pub fn fit_wills_polynomial(d: usize, estimates: Vec<(f64, VolumeEstimate)>, opts: SteinerOptions) -> Result<ProfileFit> {
    let first = usize::from(opts.fix_v0);
    let lambdas: Vec<f64> = estimates.iter().map(|e| e.0).collect();
    if distinct(&lambdas) < d + 1 - first {
        return Err(Error::input(format!("need at least {} distinct scales", d + 1 - first)));
    }
    let design: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|&l| (first..=d).map(|k| l.powi(k as i32)).collect())
        .collect();
    let y: Vec<f64> = estimates
        .iter()
        .map(|(_, e)| if opts.fix_v0 { e.value - 1.0 } else { e.value })
        .collect();
    let sigma: Vec<f64> = estimates.iter().map(|(_, e)| floor_stderr(e)).collect();
    let fit = weighted_least_squares(&design, &y, &sigma, MAX_CONDITION)?;
    Ok(assemble(fit, opts.fix_v0, estimates))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceOptions {
    /// Smallest number of in-band draws accepted.
    pub min_hits: usize,
    /// Band half-width cap as a fraction of `r`.
    pub max_width_fraction: f64,
    /// Activity tolerance passed to the face classifier.
    pub tol: f64,
    /// Sampler settings for H-polytopes.
    pub mala: MalaOptions,
}

impl Default for SliceOptions {
    fn default() -> Self {
        SliceOptions {
            min_hits: 1_000,
            max_width_fraction: 0.05,
            tol: 1e-9,
            mala: MalaOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSlice {
    pub r: f64,
    /// Band half-width `w`: draws with `|dist − r| ≤ w` were classified.
    pub width: f64,
    pub hits: usize,
    /// Draws skipped because they sat on a face-region boundary.
    pub boundary_skips: usize,
    pub counts: Vec<usize>,
    pub empirical: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `p(1/r)` when a profile was supplied.
    pub theory: Option<Vec<f64>>,
    pub tv: Option<f64>,
    pub n: usize,
}

/// Empirical face-dimension law of `Π_K(X_K)` given `dist(X_K, K) ≈ r`.
///
/// Boxes use exact draws (streamed, only in-band draws are kept); H-polytopes
/// use a MALA batch of `n` draws.
pub fn estimate_surface_slice(
    body: &ConvexBody,
    profile: Option<&IntrinsicProfile>,
    r: f64,
    n: usize,
    seed: SeedSpec,
    opts: &SliceOptions,
) -> Result<SurfaceSlice> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::input("slice distance must be positive"));
    }
    if n == 0 || opts.min_hits == 0 {
        return Err(Error::input("n and min_hits must be positive"));
    }
    let d = body.dim();
    let cap = opts.max_width_fraction * r;
    let classify = |x: &[f64]| -> Result<Option<(f64, Option<usize>)>> {
        let dist = body.distance(x)?;
        if (dist - r).abs() > cap {
            return Ok(None);
        }
        match body.trace_projection_jacobian(x, opts.tol) {
            Ok(t) => Ok(Some((dist, Some(t.round() as usize)))),
            Err(Error::BoundaryCase) => Ok(Some((dist, None))),
            Err(e) => Err(e),
        }
    };
    let found: Vec<(f64, Option<usize>)> = match body.shape() {
        Shape::Box { .. } => {
            let sampler = ExactSampler::new(body)?;
            let parts = rng::map_chunks(n, seed, |g, count| -> Result<Vec<(f64, Option<usize>)>> {
                let mut x = vec![0.0; d];
                let mut keep = Vec::new();
                for _ in 0..count {
                    sampler.draw(g, &mut x);
                    if let Some(hit) = classify(&x)? {
                        keep.push(hit);
                    }
                }
                Ok(keep)
            });
            parts.into_iter().collect::<Result<Vec<_>>>()?.concat()
        }
        Shape::HPolytope { .. } => {
            let batch = sample_mala(body, &MalaOptions { n, ..opts.mala }, seed)?;
            let mut keep = Vec::new();
            for x in batch.points() {
                if let Some(hit) = classify(x)? {
                    keep.push(hit);
                }
            }
            keep
        }
        Shape::Ball { .. } => return Err(Error::input("the surface slice needs a box or polytope")),
    };
    if found.len() < opts.min_hits {
        return Err(Error::BandWidth { hits: found.len() });
    }
    let mut gaps: Vec<f64> = found.iter().map(|(dist, _)| (dist - r).abs()).collect();
    gaps.sort_by(f64::total_cmp);
    let width = gaps[opts.min_hits - 1];
    let mut counts = vec![0usize; d];
    let mut boundary_skips = 0;
    for (dist, face) in &found {
        if (dist - r).abs() > width {
            continue;
        }
        match face {
            Some(i) if *i < d => counts[*i] += 1,
            Some(_) => {}
            None => boundary_skips += 1,
        }
    }
    let hits: usize = counts.iter().sum();
    if hits == 0 {
        return Err(Error::BandWidth { hits });
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / hits as f64).collect();
    let stderr = empirical
        .iter()
        .map(|p| (p * (1.0 - p) / hits as f64).sqrt())
        .collect();
    let theory = profile.map(|p| surface_law(p, 1.0 / r)).transpose()?.map(|law| law.probs);
    let tv = theory
        .as_ref()
        .map(|t| 0.5 * t.iter().zip(&empirical).map(|(a, b)| (a - b).abs()).sum::<f64>());
    Ok(SurfaceSlice {
        r,
        width,
        hits,
        boundary_skips,
        counts,
        empirical,
        stderr,
        theory,
        tv,
        n,
    })
}
