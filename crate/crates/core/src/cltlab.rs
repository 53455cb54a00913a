//! Distances from standardized `H_K` to the standard Gaussian, and rate fits
//! over dimension grids.

use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::intrinsic::{moments, profile_ball, profile_box, vk_law, IntrinsicProfile, MomentSummary};
use crate::par;
use crate::rng::SeedSpec;
use crate::sampling::{h_from_points, sample_hk_mixture, sample_mala, MalaOptions};
use crate::special::{norm_cdf, norm_pdf, norm_quantile};
use crate::stats::Summary;

/// Moments used to standardize `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Standardization {
    /// `F = (H − δ)/σ` with `δ`, `σ²` from a profile.
    Population { delta: f64, sigma2: f64 },
    /// Sample mean and variance (needs at least 100 values).
    Sample,
}

impl From<MomentSummary> for Standardization {
    fn from(m: MomentSummary) -> Self {
        Standardization::Population {
            delta: m.delta,
            sigma2: m.sigma2,
        }
    }
}

pub fn standardize(h: &[f64], how: Standardization) -> Result<Vec<f64>> {
    let (mean, var) = match how {
        Standardization::Population { delta, sigma2 } => (delta, sigma2),
        Standardization::Sample => {
            if h.len() < 100 {
                return Err(Error::input("sample standardization needs at least 100 values"));
            }
            let s = Summary::of(h);
            (s.mean, s.variance)
        }
    };
    if !(var > 0.0 && var.is_finite()) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let sd = var.sqrt();
    Ok(h.iter().map(|x| (x - mean) / sd).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    /// DKW half-width at 99%: `√(ln(2/0.01) / (2n))`.
    pub band: f64,
}

pub fn dkw_band(n: usize) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt()
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_x |F_n(x) − Φ(x)|`.
pub fn ks_distance_to_gaussian(f: &[f64]) -> Result<KsResult> {
    if f.len() < 10 {
        return Err(Error::input("KS distance needs at least 10 values"));
    }
    let xs = sorted(f);
    let n = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = norm_cdf(x);
            ((i + 1) as f64 / n - p).max(p - i as f64 / n)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        band: dkw_band(xs.len()),
    })
}

pub fn default_bins(n: usize) -> usize {
    (n as f64).cbrt().ceil().max(1.0) as usize
}

/// `½ Σ_b |empirical mass − 1/bins|` over bins of equal Gaussian probability.
///
/// Binning can only merge mass, so this underestimates the TV distance of the
/// underlying law.
pub fn tv_distance_histogram(f: &[f64], bins: Option<usize>) -> Result<f64> {
    if f.len() < 1000 {
        return Err(Error::input("histogram TV proxy needs at least 1000 values"));
    }
    let bins = bins.unwrap_or_else(|| default_bins(f.len()));
    if bins == 0 {
        return Err(Error::input("bins must be positive"));
    }
    let mut counts = vec![0usize; bins];
    for &x in f {
        let b = (norm_cdf(x) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let n = f.len() as f64;
    let q = 1.0 / bins as f64;
    Ok(0.5 * counts.iter().map(|&c| (c as f64 / n - q).abs()).sum::<f64>())
}

/// `∫_{-∞}^z Φ = zΦ(z) + φ(z)`.
fn phi_integral(z: f64) -> f64 {
    z * norm_cdf(z) + norm_pdf(z)
}

/// `∫_a^b |c − Φ(z)| dz`.
fn abs_gap_integral(a: f64, b: f64, c: f64) -> f64 {
    let signed = |lo: f64, hi: f64| c * (hi - lo) - (phi_integral(hi) - phi_integral(lo));
    let z = norm_quantile(c);
    if z <= a || z >= b {
        signed(a, b).abs()
    } else {
        signed(a, z).abs() + signed(z, b).abs()
    }
}

/// Exact `W_1(F_n, N(0,1)) = ∫ |F_n − Φ|`.
pub fn wasserstein1_to_gaussian(f: &[f64]) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::input("W1 needs at least one value"));
    }
    let xs = sorted(f);
    let n = xs.len();
    let mut total = phi_integral(xs[0]) + phi_integral(-xs[n - 1]);
    for i in 1..n {
        if xs[i] > xs[i - 1] {
            total += abs_gap_integral(xs[i - 1], xs[i], i as f64 / n as f64);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// OLS of `ln distance` on `ln d`.
pub fn rate_fit(ds: &[f64], distances: &[f64]) -> Result<RateFit> {
    if ds.len() != distances.len() || ds.len() < 3 {
        return Err(Error::input("rate fit needs at least 3 (d, distance) pairs"));
    }
    if distances.iter().chain(ds).any(|v| !(*v > 0.0)) {
        return Err(Error::input("dimensions and distances must be positive"));
    }
    let x: Vec<f64> = ds.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = distances.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::input("dimensions must not all be equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(RateFit {
        slope,
        stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        intercept,
    })
}

/// `τ²/(τ² + 4δ)` and `E[V]/(2δ)`, the two remainders of the direct argument.
pub fn direct_remainders(profile: &IntrinsicProfile) -> (f64, f64) {
    let m = moments(profile);
    (m.tau2 / (m.tau2 + 4.0 * m.delta), m.mean_v / (2.0 * m.delta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// Cube of half-width `T_d = c·d^α` (`c = 0.5, α = 0` is `[0,1]^d` up to translation).
    Cube { c: f64, alpha: f64 },
    /// Ball of radius `c·d^α`.
    Ball { c: f64, alpha: f64 },
    /// Explicit bodies, sampled with MALA and standardized with sample moments.
    Polytopes {
        #[serde(skip)]
        bodies: Vec<ConvexBody>,
    },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Cube { .. } => "cube",
            Family::Ball { .. } => "ball",
            Family::Polytopes { .. } => "polytopes",
        }
    }

    pub fn profile(&self, d: usize) -> Result<Option<IntrinsicProfile>> {
        match *self {
            Family::Cube { c, alpha } => profile_box(&vec![2.0 * c * (d as f64).powf(alpha); d]),
            Family::Ball { c, alpha } => profile_ball(d, c * (d as f64).powf(alpha)),
            Family::Polytopes { .. } => return Ok(None),
        }
        .map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltRow {
    pub d: usize,
    pub n: usize,
    pub ks: f64,
    pub ks_band: f64,
    pub tv_proxy: f64,
    pub bins: usize,
    pub w1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub family: String,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub rows: Vec<CltRow>,
    /// Log-log slope of KS against `d`.
    pub ks_fit: Option<RateFit>,
    pub tv_fit: Option<RateFit>,
    pub w1_fit: Option<RateFit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub bins: Option<usize>,
    pub mala: MalaOptions,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            bins: None,
            mala: MalaOptions::default(),
        }
    }
}

/// All three distances for standardized values.
pub fn distances(f: &[f64], d: usize, bins: Option<usize>) -> Result<CltRow> {
    let ks = ks_distance_to_gaussian(f)?;
    let bins = bins.unwrap_or_else(|| default_bins(f.len()));
    Ok(CltRow {
        d,
        n: f.len(),
        ks: ks.statistic,
        ks_band: ks.band,
        tv_proxy: tv_distance_histogram(f, Some(bins))?,
        bins,
        w1: wasserstein1_to_gaussian(f)?,
    })
}

/// For each `d`: build the profile, draw `H` by the mixture route (MALA for
/// explicit polytopes), standardize, measure, then fit rates over the grid.
pub fn run_family_experiment(family: &Family, grid: &[usize], n: usize, seed: SeedSpec, opts: &ExperimentOptions) -> Result<CltReport> {
    let jobs: Vec<usize> = match family {
        Family::Polytopes { bodies } => bodies.iter().map(|b| b.dim()).collect(),
        _ => grid.to_vec(),
    };
    if jobs.is_empty() || jobs.contains(&0) {
        return Err(Error::input("the dimension grid must be nonempty and positive"));
    }
    let rows = par::map_indexed(jobs.len(), |j| -> Result<CltRow> {
        let d = jobs[j];
        let job_seed = seed.child(j as u64);
        let (h, how) = match family {
            Family::Polytopes { bodies } => {
                let body = &bodies[j];
                let batch = sample_mala(body, &MalaOptions { n, ..opts.mala }, job_seed)?;
                (h_from_points(body, &batch)?.values, Standardization::Sample)
            }
            _ => {
                let profile = family.profile(d)?.expect("closed-form family");
                let h = sample_hk_mixture(&vk_law(&profile), d, n, job_seed)?.values;
                (h, moments(&profile).into())
            }
        };
        distances(&standardize(&h, how)?, d, opts.bins)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ds: Vec<f64> = rows.iter().map(|r| r.d as f64).collect();
    let fit = |pick: fn(&CltRow) -> f64| rate_fit(&ds, &rows.iter().map(pick).collect::<Vec<_>>()).ok();
    let (alpha, c) = match family {
        Family::Cube { c, alpha } | Family::Ball { c, alpha } => (Some(*alpha), Some(*c)),
        Family::Polytopes { .. } => (None, None),
    };
    Ok(CltReport {
        family: family.tag().into(),
        alpha,
        c,
        ks_fit: fit(|r| r.ks),
        tv_fit: fit(|r| r.tv_proxy),
        w1_fit: fit(|r| r.w1),
        rows,
    })
}
