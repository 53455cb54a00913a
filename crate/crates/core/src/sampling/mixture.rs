//! `H_K = Σ_{j ≤ d − V_K} γ_j` with `γ_j ~ Γ(1/2, 1)` i.i.d., collapsed to one
//! `Gamma((d − V)/2, 1)` draw.

use rand_distr::Distribution;

use super::exact::{draw_index, half_integer_gammas};
use super::{BatchKind, SampleBatch, SamplerTag};
use crate::error::{Error, Result};
use crate::intrinsic::DiscreteLaw;
use crate::rng::{self, SeedSpec};

pub fn sample_hk_mixture(law: &DiscreteLaw, d: usize, n: usize, seed: SeedSpec) -> Result<SampleBatch> {
    if law.probs.len() > d + 1 {
        return Err(Error::input(format!(
            "law has support up to {}, beyond d = {d}",
            law.probs.len() - 1
        )));
    }
    let cdf = law.cdf();
    let gammas = half_integer_gammas(d);
    let values = rng::generate(n, seed, |r| {
        let v = draw_index(r, &cdf);
        gammas[d - v].as_ref().map_or(0.0, |g| g.sample(r))
    });
    Ok(SampleBatch {
        kind: BatchKind::HValues,
        dim: d,
        values,
        sampler: SamplerTag::Mixture,
        seed,
        body: None,
        diagnostics: None,
    })
}
