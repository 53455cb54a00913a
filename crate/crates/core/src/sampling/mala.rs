//! Metropolis-adjusted Langevin chains for `e^{-π dist²(x, K)}`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BatchKind, MalaDiagnostics, SampleBatch, SamplerTag};
use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::par;
use crate::rng::SeedSpec;
use crate::stats::effective_sample_size;

const TARGET_ACCEPTANCE: f64 = 0.55;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MalaOptions {
    /// Total draws returned, split evenly over the chains.
    pub n: usize,
    /// Iterations discarded per chain; the step is tuned during this phase.
    pub burn_in: usize,
    /// Initial (or, without tuning, fixed) step `h`; defaults to `1/(2π d^{1/3})`.
    pub step: Option<f64>,
    /// Keep every `thin`-th state.
    pub thin: usize,
    pub auto_tune: bool,
    pub chains: usize,
}

impl Default for MalaOptions {
    fn default() -> Self {
        MalaOptions {
            n: 10_000,
            burn_in: 2_000,
            step: None,
            thin: 5,
            auto_tune: true,
            chains: 1,
        }
    }
}

struct State {
    x: Vec<f64>,
    phi: f64,
    grad: Vec<f64>,
}

fn evaluate(body: &ConvexBody, x: Vec<f64>) -> Result<State> {
    let p = body.project_point(&x)?;
    let grad: Vec<f64> = x.iter().zip(&p).map(|(a, b)| 2.0 * PI * (a - b)).collect();
    let phi = grad.iter().map(|g| g * g).sum::<f64>() / (4.0 * PI);
    Ok(State { x, phi, grad })
}

/// `‖to − from + h ∇φ(from)‖²`.
fn transition_sq(to: &[f64], from: &State, h: f64) -> f64 {
    to.iter()
        .zip(&from.x)
        .zip(&from.grad)
        .map(|((t, f), g)| {
            let e = t - f + h * g;
            e * e
        })
        .sum()
}

struct Chain {
    points: Vec<f64>,
    h_trace: Vec<f64>,
    accepted: usize,
    proposed: usize,
    step: f64,
}

fn run_chain(body: &ConvexBody, opts: &MalaOptions, n: usize, seed: SeedSpec) -> Result<Chain> {
    let d = body.dim();
    let mut rng = seed.rng(0);
    let mut log_h = opts
        .step
        .unwrap_or_else(|| 1.0 / (2.0 * PI * (d as f64).cbrt()))
        .ln();
    let mut cur = evaluate(body, body.center().to_vec())?;
    let mut points = Vec::with_capacity(n * d);
    let mut h_trace = Vec::with_capacity(n);
    let (mut accepted, mut proposed) = (0usize, 0usize);
    let total = opts.burn_in + n * opts.thin;
    for t in 0..total {
        let h = log_h.exp();
        let noise = (2.0 * h).sqrt();
        let y: Vec<f64> = cur
            .x
            .iter()
            .zip(&cur.grad)
            .map(|(x, g)| x - h * g + noise * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let prop = evaluate(body, y)?;
        let log_alpha = cur.phi - prop.phi + (transition_sq(&prop.x, &cur, h) - transition_sq(&cur.x, &prop, h)) / (4.0 * h);
        let alpha = log_alpha.min(0.0).exp();
        let accept = rng.random::<f64>() < alpha;
        if accept {
            cur = prop;
        }
        if t < opts.burn_in {
            if opts.auto_tune {
                log_h += (t as f64 + 1.0).powf(-0.6) * (alpha - TARGET_ACCEPTANCE);
            }
        } else {
            proposed += 1;
            accepted += accept as usize;
            if (t - opts.burn_in + 1) % opts.thin == 0 {
                points.extend_from_slice(&cur.x);
                h_trace.push(cur.phi);
            }
        }
    }
    Ok(Chain {
        points,
        h_trace,
        accepted,
        proposed,
        step: log_h.exp(),
    })
}

/// Runs `opts.chains` independent chains started at the body's center.
pub fn sample_mala(body: &ConvexBody, opts: &MalaOptions, seed: SeedSpec) -> Result<SampleBatch> {
    if opts.n == 0 || opts.chains == 0 || opts.thin == 0 {
        return Err(Error::input("n, chains and thin must be positive"));
    }
    if let Some(h) = opts.step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::input("MALA step must be positive"));
        }
    }
    let per_chain: Vec<usize> = (0..opts.chains)
        .map(|c| opts.n / opts.chains + usize::from(c < opts.n % opts.chains))
        .collect();
    let chains = par::map_indexed(opts.chains, |c| run_chain(body, opts, per_chain[c], seed.child(c as u64)));
    let chains = chains.into_iter().collect::<Result<Vec<_>>>()?;
    let accepted: usize = chains.iter().map(|c| c.accepted).sum();
    let proposed: usize = chains.iter().map(|c| c.proposed).sum();
    let acceptance = accepted as f64 / proposed as f64;
    if !(0.1..=0.9).contains(&acceptance) {
        let guidance = if opts.auto_tune {
            "increase burn_in so the step can adapt"
        } else if acceptance < 0.1 {
            "decrease the step or enable auto-tuning"
        } else {
            "increase the step or enable auto-tuning"
        };
        return Err(Error::Tuning {
            acceptance,
            guidance: guidance.into(),
        });
    }
    let ess = chains
        .iter()
        .map(|c| effective_sample_size(&c.h_trace))
        .sum();
    let step = chains.iter().map(|c| c.step).sum::<f64>() / chains.len() as f64;
    let values = chains.into_iter().flat_map(|c| c.points).collect();
    Ok(SampleBatch {
        kind: BatchKind::Points,
        dim: body.dim(),
        values,
        sampler: SamplerTag::Mala,
        seed,
        body: Some(body.to_spec()),
        diagnostics: Some(MalaDiagnostics {
            acceptance,
            step,
            ess,
            thin: opts.thin,
            burn_in: opts.burn_in,
        }),
    })
}
