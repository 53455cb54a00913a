//! Intrinsic-volume profiles and the laws built from them.
//!
//! Profiles are stored as `ln v_k` so that cubes with `d` in the millions and
//! large boxes never overflow; all laws are normalized by max-shifting.

use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::special::{ln_binomial, ln_gamma, log_sum_exp, LN_PI};

/// `ln κ_j`, the log volume of the unit ball in `R^j`.
pub fn ln_kappa(j: usize) -> f64 {
    0.5 * j as f64 * LN_PI - ln_gamma(1.0 + 0.5 * j as f64)
}

/// `κ_j = π^{j/2} / Γ(1 + j/2)`.
pub fn kappa(j: usize) -> f64 {
    ln_kappa(j).exp()
}

/// The intrinsic volumes `(v_0, …, v_d)` of a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicProfile {
    pub d: usize,
    /// `ln v_k`; `-∞` marks `v_k = 0` and is written as `null` in JSON.
    #[serde(with = "log_values")]
    pub log_v: Vec<f64>,
}

impl IntrinsicProfile {
    pub fn from_log(log_v: Vec<f64>) -> Result<Self> {
        if log_v.len() < 2 {
            return Err(Error::input("a profile needs at least v_0 and v_1"));
        }
        if log_v.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(Error::input("profile entries must be finite or -inf"));
        }
        Ok(IntrinsicProfile {
            d: log_v.len() - 1,
            log_v,
        })
    }

    /// Profile from raw values; negative entries (e.g. from a noisy fit) are rejected.
    pub fn from_values(v: &[f64]) -> Result<Self> {
        if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::input("intrinsic volumes must be finite and nonnegative"));
        }
        Self::from_log(v.iter().map(|x| x.ln()).collect())
    }

    /// Raw values; entries overflow to `+∞` for very large bodies.
    pub fn v(&self) -> Vec<f64> {
        self.log_v.iter().map(|x| x.exp()).collect()
    }

    pub fn log_wills(&self) -> f64 {
        log_sum_exp(&self.log_v)
    }

    /// `W(K) = Σ v_k`.
    pub fn wills(&self) -> f64 {
        self.log_wills().exp()
    }

    /// `W(λK) = Σ λ^k v_k`.
    pub fn wills_scaled(&self, lambda: f64) -> f64 {
        let ln_l = lambda.ln();
        let terms: Vec<f64> = self
            .log_v
            .iter()
            .enumerate()
            .map(|(k, lv)| lv + k as f64 * ln_l)
            .collect();
        log_sum_exp(&terms).exp()
    }

    /// Steiner polynomial `Vol(K + rB) = Σ κ_{d−k} v_k r^{d−k}`.
    pub fn parallel_volume(&self, r: f64) -> f64 {
        let d = self.d;
        self.log_v
            .iter()
            .enumerate()
            .map(|(k, lv)| {
                let p = d - k;
                if p == 0 {
                    lv.exp()
                } else if r == 0.0 {
                    0.0
                } else {
                    (lv + ln_kappa(p) + p as f64 * r.ln()).exp()
                }
            })
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: IntrinsicProfile = serde_json::from_str(text).map_err(|e| Error::input(format!("profile JSON: {e}")))?;
        if p.log_v.len() != p.d + 1 {
            return Err(Error::input("log_v must have d + 1 entries"));
        }
        Self::from_log(p.log_v)
    }
}

mod log_values {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(opt.into_iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)).collect())
    }
}

/// `v_k = e_k(sides)`, the elementary symmetric polynomials of the side lengths.
pub fn profile_box(sides: &[f64]) -> Result<IntrinsicProfile> {
    if sides.is_empty() || sides.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::input("box sides must be positive and finite"));
    }
    let d = sides.len();
    if sides.iter().all(|s| *s == sides[0]) {
        let ln_s = sides[0].ln();
        let log_v = (0..=d).map(|k| ln_binomial(d, k) + k as f64 * ln_s).collect();
        return IntrinsicProfile::from_log(log_v);
    }
    // e_k ← e_k + s_i e_{k−1}, carried in log space
    let mut log_e = vec![f64::NEG_INFINITY; d + 1];
    log_e[0] = 0.0;
    for (i, s) in sides.iter().enumerate() {
        let ln_s = s.ln();
        for k in (1..=i + 1).rev() {
            log_e[k] = log_add(log_e[k], log_e[k - 1] + ln_s);
        }
    }
    IntrinsicProfile::from_log(log_e)
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `v_k = C(d,k) κ_d / κ_{d−k} R^k`.
pub fn profile_ball(d: usize, radius: f64) -> Result<IntrinsicProfile> {
    if d == 0 {
        return Err(Error::input("dimension must be positive"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::input("ball radius must be positive"));
    }
    let ln_r = radius.ln();
    let lk_d = ln_kappa(d);
    let log_v = (0..=d)
        .map(|k| ln_binomial(d, k) + lk_d - ln_kappa(d - k) + k as f64 * ln_r)
        .collect();
    IntrinsicProfile::from_log(log_v)
}

/// `K = {c}`: `v_0 = 1`, all others zero.
pub fn profile_point(d: usize) -> Result<IntrinsicProfile> {
    if d == 0 {
        return Err(Error::input("dimension must be positive"));
    }
    let mut log_v = vec![f64::NEG_INFINITY; d + 1];
    log_v[0] = 0.0;
    IntrinsicProfile::from_log(log_v)
}

/// Closed-form profile for boxes, balls and the point body.
pub fn profile_of(body: &ConvexBody) -> Result<IntrinsicProfile> {
    match body.shape() {
        Shape::Box { half_widths, .. } => profile_box(&half_widths.iter().map(|h| 2.0 * h).collect::<Vec<_>>()),
        Shape::Ball { degenerate: true, .. } => profile_point(body.dim()),
        Shape::Ball { radius, .. } => profile_ball(body.dim(), *radius),
        Shape::HPolytope { .. } => Err(Error::input(
            "no closed-form intrinsic volumes for H-polytopes; estimate them with volumetry",
        )),
    }
}

/// A probability vector on `{0, …, m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    pub probs: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::input("probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteLaw { probs })
    }

    /// Normalizes `ln w_k` by max-shifting.
    pub fn from_log_weights(log_w: &[f64]) -> Result<Self> {
        let lz = log_sum_exp(log_w);
        if !lz.is_finite() {
            return Err(Error::DegenerateLaw("all weights vanish".into()));
        }
        let mut probs: Vec<f64> = log_w.iter().map(|w| (w - lz).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(DiscreteLaw { probs })
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - m).powi(2) * p)
            .sum()
    }

    /// Cumulative sums, last entry forced to 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut c: Vec<f64> = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = c.last_mut() {
            *last = 1.0;
        }
        c
    }
}

/// `P(V_K = k) = v_k / W(K)`.
pub fn vk_law(profile: &IntrinsicProfile) -> DiscreteLaw {
    DiscreteLaw::from_log_weights(&profile.log_v).expect("profiles have v_0 > 0 or some positive entry")
}

/// `k x_k² ≥ (k+1) x_{k−1} x_{k+1} − tol·scale` for every interior `k`.
pub fn is_ultra_log_concave(x: &[f64], tol: f64) -> bool {
    (1..x.len().saturating_sub(1)).all(|k| {
        let lhs = k as f64 * x[k] * x[k];
        let rhs = (k + 1) as f64 * x[k - 1] * x[k + 1];
        lhs >= rhs - tol * lhs.abs().max(rhs.abs())
    })
}

/// The same test on `ln x_k`, usable when the raw values overflow.
pub fn is_ultra_log_concave_log(log_x: &[f64], tol: f64) -> bool {
    (1..log_x.len().saturating_sub(1)).all(|k| {
        let rhs = ((k + 1) as f64).ln() + log_x[k - 1] + log_x[k + 1];
        if rhs == f64::NEG_INFINITY {
            return true;
        }
        let lhs = (k as f64).ln() + 2.0 * log_x[k];
        lhs >= rhs + (-tol).ln_1p()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlcBounds {
    /// `x_1 / x_0`, which bounds both mean and variance.
    pub mean_bound: f64,
    pub var_bound: f64,
    pub mean: f64,
    pub variance: f64,
    pub mean_ok: bool,
    pub var_ok: bool,
    /// `Var ≤ 2 (m − E)/(m + E) · E` on support `{0, …, m}`.
    pub lotz_tropp_ok: bool,
}

pub fn ulc_moment_bounds(law: &DiscreteLaw) -> Result<UlcBounds> {
    let x = &law.probs;
    if x[0] <= 0.0 {
        return Err(Error::DegenerateLaw("x_0 = 0".into()));
    }
    if !is_ultra_log_concave(x, 1e-12) {
        return Err(Error::Precondition("law is not ultra log-concave".into()));
    }
    let bound = x.get(1).copied().unwrap_or(0.0) / x[0];
    let mean = law.mean();
    let variance = law.variance();
    let m = (x.len() - 1) as f64;
    let slack = 1e-12 * (1.0 + bound);
    let lotz_tropp = if mean == 0.0 {
        variance <= slack
    } else {
        variance <= 2.0 * (m - mean) / (m + mean) * mean + slack
    };
    Ok(UlcBounds {
        mean_bound: bound,
        var_bound: bound,
        mean,
        variance,
        mean_ok: mean <= bound + slack,
        var_ok: variance <= bound + slack,
        lotz_tropp_ok: lotz_tropp,
    })
}

/// The face-dimension law `p(s)` on `{0, …, d−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLaw {
    pub d: usize,
    /// `+∞` encodes the convention `p(∞) = (0, …, 0, 1)`.
    pub s: f64,
    pub probs: Vec<f64>,
    pub e_p: f64,
    pub var_p: f64,
}

/// `ln[(d−i) v_i κ_{d−i}]`, the `s`-free part of the surface weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCoefficients {
    d: usize,
    log_c: Vec<f64>,
}

impl SurfaceCoefficients {
    pub fn new(profile: &IntrinsicProfile) -> Self {
        let d = profile.d;
        let log_c = (0..d)
            .map(|i| ((d - i) as f64).ln() + profile.log_v[i] + ln_kappa(d - i))
            .collect();
        SurfaceCoefficients { d, log_c }
    }

    fn log_weights(&self, s: f64) -> Vec<f64> {
        let ln_s = s.ln();
        self.log_c
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { *c } else { c + i as f64 * ln_s })
            .collect()
    }

    pub fn law(&self, s: f64) -> Result<SurfaceLaw> {
        if s.is_nan() || s <= 0.0 {
            return Err(Error::input("surface law argument must be positive"));
        }
        let probs = if s == f64::INFINITY {
            let mut p = vec![0.0; self.d];
            p[self.d - 1] = 1.0;
            p
        } else {
            DiscreteLaw::from_log_weights(&self.log_weights(s))?.probs
        };
        let law = DiscreteLaw { probs };
        Ok(SurfaceLaw {
            d: self.d,
            s,
            e_p: law.mean(),
            var_p: law.variance(),
            probs: law.probs,
        })
    }

    /// `e_p(s)` without allocating the law; `s = ∞` gives `d − 1`.
    pub fn mean(&self, s: f64) -> f64 {
        if s == f64::INFINITY {
            return (self.d - 1) as f64;
        }
        let ln_s = s.ln();
        let mut max = f64::NEG_INFINITY;
        for (i, c) in self.log_c.iter().enumerate() {
            max = max.max(if i == 0 { *c } else { c + i as f64 * ln_s });
        }
        let (mut z, mut m) = (0.0, 0.0);
        for (i, c) in self.log_c.iter().enumerate() {
            let w = if i == 0 { *c } else { c + i as f64 * ln_s };
            let e = (w - max).exp();
            z += e;
            m += i as f64 * e;
        }
        m / z
    }
}

/// `p_i(s) ∝ (d−i) v_i κ_{d−i} s^i`.
pub fn surface_law(profile: &IntrinsicProfile, s: f64) -> Result<SurfaceLaw> {
    SurfaceCoefficients::new(profile).law(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    /// `E[π dist²(X_K, K)]`.
    pub delta: f64,
    /// `Var(π dist²(X_K, K))`.
    pub sigma2: f64,
    /// `Var(V_K)`.
    pub tau2: f64,
    /// `E[V_K]`.
    pub mean_v: f64,
}

pub fn moments(profile: &IntrinsicProfile) -> MomentSummary {
    let law = vk_law(profile);
    let mean_v = law.mean();
    let tau2 = law.variance();
    let delta = (profile.d as f64 - mean_v) / 2.0;
    MomentSummary {
        delta,
        sigma2: tau2 / 4.0 + delta,
        tau2,
        mean_v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn kappa_values() {
        assert_relative_eq!(kappa(0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(kappa(1), 2.0, epsilon = 1e-14);
        assert_relative_eq!(kappa(2), PI, epsilon = 1e-14);
        assert_relative_eq!(kappa(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert!(ln_kappa(1_000_000).is_finite());
    }

    #[test]
    fn box_examples() {
        let v = profile_box(&[1.0, 1.0, 1.0]).unwrap().v();
        for (a, b) in v.iter().zip([1.0, 3.0, 3.0, 1.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        let v = profile_box(&[2.0, 3.0]).unwrap().v();
        for (a, b) in v.iter().zip([1.0, 5.0, 6.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        let v = profile_box(&[1.0, 2.0, 3.0, 4.0]).unwrap().v();
        for (a, b) in v.iter().zip([1.0, 10.0, 35.0, 50.0, 24.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn ball_examples() {
        let v = profile_ball(2, 1.0).unwrap().v();
        for (a, b) in v.iter().zip([1.0, PI, PI]) {
            assert_relative_eq!(*a, b, max_relative = 1e-13);
        }
        let v = profile_ball(3, 1.0).unwrap().v();
        for (a, b) in v.iter().zip([1.0, 4.0, 2.0 * PI, 4.0 * PI / 3.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-13);
        }
        let v = profile_ball(1, 1.0).unwrap().v();
        assert_relative_eq!(v[1], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn v1_of_large_ball() {
        let d = 10_000;
        let v1 = profile_ball(d, 1.0).unwrap().log_v[1].exp();
        assert!((v1 / (2.0 * PI * d as f64).sqrt() - 1.0).abs() < 0.01);
    }

    #[test]
    fn vk_law_examples() {
        let law = vk_law(&profile_box(&[1.0, 1.0]).unwrap());
        for (a, b) in law.probs.iter().zip([0.25, 0.5, 0.25]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let law = vk_law(&profile_ball(2, 1.0).unwrap());
        let z = 1.0 + 2.0 * PI;
        for (a, b) in law.probs.iter().zip([1.0 / z, PI / z, PI / z]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn ulc_examples() {
        assert!(is_ultra_log_concave(&[1.0, 3.0, 3.0, 1.0], 1e-12));
        assert!(!is_ultra_log_concave(&[1.0, 1.0, 1.0], 1e-12));
        assert!(is_ultra_log_concave(&[1.0, 0.5, 0.125], 1e-12));
        assert!(is_ultra_log_concave_log(&[0.0, 3f64.ln(), 3f64.ln(), 0.0], 1e-12));
        assert!(!is_ultra_log_concave_log(&[0.0, 0.0, 0.0], 1e-12));
    }

    #[test]
    fn ulc_bound_examples() {
        let b = ulc_moment_bounds(&vk_law(&profile_box(&[1.0; 10]).unwrap())).unwrap();
        assert_relative_eq!(b.mean_bound, 10.0, max_relative = 1e-13);
        assert_relative_eq!(b.mean, 5.0, max_relative = 1e-13);
        assert_relative_eq!(b.variance, 2.5, max_relative = 1e-12);
        assert!(b.mean_ok && b.var_ok && b.lotz_tropp_ok);

        let b = ulc_moment_bounds(&vk_law(&profile_ball(2, 1.0).unwrap())).unwrap();
        assert_relative_eq!(b.mean_bound, PI, max_relative = 1e-13);
        // direct finite sum: (0·1 + 1·π + 2·π)/(1 + 2π)
        assert_relative_eq!(b.mean, 3.0 * PI / (1.0 + 2.0 * PI), max_relative = 1e-13);
        assert!((b.mean - 1.294_046).abs() < 1e-6);

        let b = ulc_moment_bounds(&DiscreteLaw::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!((b.mean_bound, b.mean, b.variance), (0.0, 0.0, 0.0));

        assert!(matches!(
            ulc_moment_bounds(&DiscreteLaw::new(vec![0.0, 1.0]).unwrap()),
            Err(Error::DegenerateLaw(_))
        ));
        assert!(matches!(
            ulc_moment_bounds(&DiscreteLaw::new(vec![0.5, 0.0, 0.5]).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn surface_law_examples() {
        let square = profile_box(&[1.0, 1.0]).unwrap();
        let p = surface_law(&square, 1.0).unwrap();
        assert_relative_eq!(p.probs[0], 2.0 * PI / (2.0 * PI + 4.0), epsilon = 1e-14);
        assert_relative_eq!(p.probs[1], 4.0 / (2.0 * PI + 4.0), epsilon = 1e-14);

        let p = surface_law(&profile_box(&[1.0, 2.0, 3.0]).unwrap(), 1e-9).unwrap();
        assert!(p.probs[0] > 1.0 - 1e-7);

        for s in [0.1, 1.0, 10.0] {
            let p = surface_law(&profile_ball(2, 1.0).unwrap(), s).unwrap();
            assert_relative_eq!(p.probs[1], s / (1.0 + s), epsilon = 1e-14);
            assert_relative_eq!(p.e_p, s / (1.0 + s), epsilon = 1e-14);
        }

        let p = surface_law(&square, f64::INFINITY).unwrap();
        assert_eq!(p.probs, vec![0.0, 1.0]);
        assert!(surface_law(&square, 0.0).is_err());
        assert!(surface_law(&square, -1.0).is_err());
    }

    #[test]
    fn surface_mean_matches_law() {
        let prof = profile_box(&[0.5, 1.0, 2.0, 0.7]).unwrap();
        let coef = SurfaceCoefficients::new(&prof);
        for s in [0.01, 0.3, 1.0, 7.0, 1e4, f64::INFINITY] {
            assert_relative_eq!(coef.mean(s), coef.law(s).unwrap().e_p, epsilon = 1e-12);
        }
    }

    #[test]
    fn moment_examples() {
        let m = moments(&profile_box(&[1.0; 64]).unwrap());
        assert_relative_eq!(m.delta, 16.0, epsilon = 1e-10);
        assert_relative_eq!(m.tau2, 16.0, epsilon = 1e-10);
        assert_relative_eq!(m.sigma2, 20.0, epsilon = 1e-10);

        let m = moments(&profile_point(10).unwrap());
        assert_eq!((m.mean_v, m.tau2), (0.0, 0.0));
        assert_relative_eq!(m.delta, 5.0);
        assert_relative_eq!(m.sigma2, 5.0);

        let m = moments(&profile_ball(1, 1.0).unwrap());
        assert_relative_eq!(m.delta, 1.0 / 6.0, epsilon = 1e-14);
        assert_relative_eq!(m.tau2, 2.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(m.sigma2, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn cube_wills_scaling_is_binomial() {
        let p = profile_box(&[1.0; 12]).unwrap();
        for l in [0.5, 1.0, 2.0] {
            assert_relative_eq!(p.wills_scaled(l), (1.0 + l).powi(12), max_relative = 1e-12);
        }
    }

    #[test]
    fn steiner_polynomial_by_hand() {
        let p = profile_box(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(p.parallel_volume(1.0), 5.0 + PI, max_relative = 1e-14);
        assert_relative_eq!(p.parallel_volume(0.0), 1.0);
        let b = profile_ball(2, 1.0).unwrap();
        assert_relative_eq!(b.parallel_volume(1.0), 4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn profile_json_round_trip() {
        let p = profile_ball(5, 2.0).unwrap();
        assert_eq!(IntrinsicProfile::from_json(&p.to_json()).unwrap(), p);
        let pt = profile_point(3).unwrap();
        assert!(pt.to_json().contains("null"));
        assert_eq!(IntrinsicProfile::from_json(&pt.to_json()).unwrap(), pt);
    }

    proptest! {
        #[test]
        fn box_profiles_are_ulc(sides in prop::collection::vec(0.01f64..10.0, 1..200)) {
            let p = profile_box(&sides).unwrap();
            prop_assert!(is_ultra_log_concave_log(&p.log_v, 1e-10));
            prop_assert!((p.log_v[0]).abs() < 1e-15);
        }

        #[test]
        fn ball_profiles_are_ulc(d in 1usize..200, r in 0.01f64..10.0) {
            let p = profile_ball(d, r).unwrap();
            prop_assert!(is_ultra_log_concave_log(&p.log_v, 1e-10));
        }

        #[test]
        fn surface_laws_are_ulc(d in 2usize..100, r in 0.1f64..5.0, si in 0usize..3, ball in any::<bool>()) {
            let s = [0.1, 1.0, 10.0][si];
            let p = if ball { profile_ball(d, r).unwrap() } else { profile_box(&vec![r; d]).unwrap() };
            let law = surface_law(&p, s).unwrap();
            prop_assert!(is_ultra_log_concave(&law.probs, 1e-9));
            prop_assert!((law.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn moment_identities_close(sides in prop::collection::vec(0.05f64..5.0, 1..40)) {
            let p = profile_box(&sides).unwrap();
            let m = moments(&p);
            prop_assert!((m.delta - (sides.len() as f64 - m.mean_v) / 2.0).abs() < 1e-10);
            prop_assert!((m.sigma2 - (m.tau2 / 4.0 + m.delta)).abs() < 1e-10);
        }
    }
}
