//! Exact draws of `X_K` for boxes, balls and the point body.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::bodies::{ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::intrinsic::{profile_of, vk_law};
use crate::rng::StreamRng;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// One coordinate of the box law with density `e^{-π(|u| − T)₊²} / (1 + 2T)`.
pub fn box_coordinate(rng: &mut StreamRng, half_width: f64) -> f64 {
    let t = half_width;
    let u: f64 = rng.random();
    if u * (1.0 + 2.0 * t) < 2.0 * t {
        t * (2.0 * rng.random::<f64>() - 1.0)
    } else {
        let z: f64 = rng.sample(StandardNormal);
        let r = t + z.abs() * INV_SQRT_2PI;
        if rng.random::<bool>() {
            r
        } else {
            -r
        }
    }
}

/// Draws `V` from a law given by its cumulative sums.
pub(crate) fn draw_index(rng: &mut StreamRng, cdf: &[f64]) -> usize {
    let u: f64 = rng.random();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// `Gamma(k/2, 1)` for every `k` in `0..=d`; index 0 is the point mass at 0.
pub(crate) fn half_integer_gammas(d: usize) -> Vec<Option<Gamma<f64>>> {
    (0..=d)
        .map(|k| (k > 0).then(|| Gamma::new(0.5 * k as f64, 1.0).expect("positive shape")))
        .collect()
}

fn uniform_direction(rng: &mut StreamRng, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for o in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *o = z;
            norm2 += z * z;
        }
        if norm2 > 0.0 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|o| *o *= inv);
            return;
        }
    }
}

/// Per-body state for exact sampling.
#[derive(Debug, Clone)]
pub enum ExactSampler {
    Box {
        center: Vec<f64>,
        half_widths: Vec<f64>,
    },
    /// Ball of radius `R ≥ 0` (`R = 0` is the point body): `V` from the
    /// profile law, `dist = √(H/π)` with `H ~ Gamma((d−V)/2, 1)`, uniform direction.
    Ball {
        center: Vec<f64>,
        radius: f64,
        cdf: Vec<f64>,
        gammas: Vec<Option<Gamma<f64>>>,
    },
}

impl ExactSampler {
    pub fn new(body: &ConvexBody) -> Result<Self> {
        match body.shape() {
            Shape::Box { center, half_widths } => Ok(ExactSampler::Box {
                center: center.clone(),
                half_widths: half_widths.clone(),
            }),
            Shape::Ball { center, radius, .. } => {
                let d = body.dim();
                Ok(ExactSampler::Ball {
                    center: center.clone(),
                    radius: *radius,
                    cdf: vk_law(&profile_of(body)?).cdf(),
                    gammas: half_integer_gammas(d),
                })
            }
            Shape::HPolytope { .. } => Err(Error::input("exact sampling needs a box or ball; use MALA for polytopes")),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ExactSampler::Box { center, .. } | ExactSampler::Ball { center, .. } => center.len(),
        }
    }

    pub fn draw(&self, rng: &mut StreamRng, out: &mut [f64]) {
        match self {
            ExactSampler::Box { center, half_widths } => {
                for ((o, c), h) in out.iter_mut().zip(center).zip(half_widths) {
                    *o = c + box_coordinate(rng, *h);
                }
            }
            ExactSampler::Ball {
                center,
                radius,
                cdf,
                gammas,
            } => {
                let d = center.len();
                let v = draw_index(rng, cdf);
                uniform_direction(rng, out);
                let scale = match &gammas[d - v] {
                    Some(g) => radius + (g.sample(rng) / std::f64::consts::PI).sqrt(),
                    None => radius * rng.random::<f64>().powf(1.0 / d as f64),
                };
                for (o, c) in out.iter_mut().zip(center) {
                    *o = c + scale * *o;
                }
            }
        }
    }
}
