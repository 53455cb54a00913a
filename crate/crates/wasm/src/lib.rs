//! Browser bindings: intrinsic-volume laws, surface laws and CLT histograms.
//!
//! Every export takes a body as JSON and returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use willslab::cltlab::{ks_distance_to_gaussian, standardize};
use willslab::intrinsic::{moments, profile_of, surface_law as law_at, vk_law as law_of};
use willslab::sampling::sample_hk_mixture;
use willslab::special::{norm_cdf, norm_pdf};
use willslab::{ConvexBody, IntrinsicProfile, SeedSpec};

fn fail(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn profile_from(body_json: &str) -> Result<IntrinsicProfile, JsError> {
    let body = ConvexBody::from_json(body_json).map_err(fail)?;
    profile_of(&body).map_err(fail)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(fail)
}

#[derive(Serialize)]
struct VkLaw {
    d: usize,
    v: Vec<f64>,
    wills: f64,
    probs: Vec<f64>,
    mean_v: f64,
    var_v: f64,
    delta: f64,
    sigma2: f64,
}

/// Intrinsic volumes and the law of `V_K`.
#[wasm_bindgen]
pub fn vk_law(body_json: &str) -> Result<String, JsError> {
    let p = profile_from(body_json)?;
    let law = law_of(&p);
    let m = moments(&p);
    to_json(&VkLaw {
        d: p.d,
        v: p.v(),
        wills: p.wills(),
        mean_v: m.mean_v,
        var_v: m.tau2,
        delta: m.delta,
        sigma2: m.sigma2,
        probs: law.probs,
    })
}

/// Face-dimension law on the parallel surface at distance `r`.
#[wasm_bindgen]
pub fn surface_law(body_json: &str, r: f64) -> Result<String, JsError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(JsError::new("distance must be positive"));
    }
    let p = profile_from(body_json)?;
    to_json(&law_at(&p, 1.0 / r).map_err(fail)?)
}

#[derive(Serialize)]
struct Histogram {
    edges: Vec<f64>,
    density: Vec<f64>,
    gaussian: Vec<f64>,
    ks: f64,
    ks_band: f64,
    n: usize,
}

/// Histogram of `(H − δ)/σ` from `n` mixture draws on `[−4, 4]`, with the
/// standard normal density at the bin midpoints.
#[wasm_bindgen]
pub fn clt_histogram(body_json: &str, n: usize, bins: usize, seed: u32) -> Result<String, JsError> {
    if n < 100 || bins == 0 {
        return Err(JsError::new("need n ≥ 100 and at least one bin"));
    }
    let p = profile_from(body_json)?;
    let batch = sample_hk_mixture(&law_of(&p), p.d, n, SeedSpec::new(seed as u64, 0)).map_err(fail)?;
    let f = standardize(&batch.values, moments(&p).into()).map_err(fail)?;
    let ks = ks_distance_to_gaussian(&f).map_err(fail)?;
    let (lo, hi) = (-4.0, 4.0);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for x in &f {
        let i = ((x - lo) / width).floor();
        if (0.0..bins as f64).contains(&i) {
            counts[i as usize] += 1;
        }
    }
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let gaussian = edges
        .windows(2)
        .map(|e| (norm_cdf(e[1]) - norm_cdf(e[0])) / width)
        .collect();
    to_json(&Histogram {
        density: counts.iter().map(|&c| c as f64 / (n as f64 * width)).collect(),
        gaussian,
        edges,
        ks: ks.statistic,
        ks_band: ks.band,
        n,
    })
}

/// Standard normal density, exported for plotting smooth overlays.
#[wasm_bindgen]
pub fn gaussian_density(x: f64) -> f64 {
    norm_pdf(x)
}
