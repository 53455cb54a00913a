//! One function per subcommand.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use willslab::bodies::BodySpec;
use willslab::cltlab::{run_family_experiment, CltReport, ExperimentOptions, Family};
use willslab::intrinsic::{moments, profile_of, surface_law as law_at, SurfaceLaw};
use willslab::sampling::{
    h_from_points, sample_ball_exact, sample_box_exact, sample_hk_mixture, sample_mala, BatchMeta, ExactSampler,
    MalaDiagnostics, MalaOptions, PointSource, SampleBatch,
};
use willslab::stats::{effective_sample_size, Summary};
use willslab::stein::{brascamp_lieb_check, check_ibp, stein_bound, BlFunction, BlReport, IbpResidual, TestFn};
use willslab::volumetry::{
    default_radii, estimate_surface_slice, estimate_wills_scaled, fit_steiner, fit_wills_polynomial, SliceOptions,
    SteinerOptions, SurfaceSlice, VolumeEstimate,
};
use willslab::{IntrinsicProfile, SeedSpec, Shape};

use crate::artifact::{echo, ensure, num, Format, Run, Table};
use crate::input::{load_bodies, load_body, load_profile, parse_count, parse_floats, parse_grid, parse_range};

pub struct Context {
    pub seed: SeedSpec,
    pub out: PathBuf,
    pub format: Format,
}

impl Context {
    fn run(&self, command: &'static str, config: Value) -> Run {
        Run {
            command,
            config: json!({ "args": config, "format": self.format }),
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

fn spec_value(spec: &BodySpec) -> Value {
    serde_json::to_value(spec).expect("body spec serializes")
}

fn profile_value(p: &IntrinsicProfile) -> Value {
    serde_json::to_value(p).expect("profile serializes")
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MalaArgs {
    /// Fixed (or initial) MALA step; defaults to 1/(2π d^(1/3)).
    #[arg(long)]
    pub step: Option<f64>,
    /// Keep the step fixed instead of tuning it during burn-in.
    #[arg(long)]
    pub no_auto_tune: bool,
    #[arg(long, value_parser = parse_count, default_value = "2000")]
    pub burn_in: usize,
    #[arg(long, value_parser = parse_count, default_value = "5")]
    pub thin: usize,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub chains: usize,
}

impl MalaArgs {
    fn options(&self, n: usize) -> MalaOptions {
        MalaOptions {
            n,
            burn_in: self.burn_in,
            step: self.step,
            thin: self.thin,
            auto_tune: !self.no_auto_tune,
            chains: self.chains,
        }
    }
}

// ---------------------------------------------------------------- volumes

#[derive(Debug, Args, Serialize)]
pub struct VolumesArgs {
    /// Body description: inline JSON or a file path.
    #[arg(long)]
    pub body: String,
    /// Fit the Steiner polynomial to hit-or-miss volumes of parallel bodies.
    #[arg(long, conflicts_with = "wills_is")]
    pub fit_steiner: bool,
    /// Fit Σ λ^k v_k to importance-sampling estimates of W(λK).
    #[arg(long)]
    pub wills_is: bool,
    /// Draws per radius (or per scale).
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub n: usize,
    /// Comma-separated radii for the Steiner fit.
    #[arg(long)]
    pub radii: Option<String>,
    /// Comma-separated scales λ for the Wills fit.
    #[arg(long)]
    pub scales: Option<String>,
    /// Fit v_0 instead of fixing it to 1.
    #[arg(long)]
    pub free_v0: bool,
    /// Exit with code 4 unless the fit matches the closed form within 3 stderr.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Serialize)]
struct VolumesResult {
    method: &'static str,
    v: Vec<f64>,
    stderr: Option<Vec<f64>>,
    condition: Option<f64>,
    closed_form: Option<Vec<f64>>,
    points: Vec<(f64, VolumeEstimate)>,
}

pub fn volumes(ctx: &Context, a: &VolumesArgs) -> Result<()> {
    let (spec, body) = load_body(&a.body)?;
    let run = ctx.run("volumes", echo(a, vec![("body", spec_value(&spec))]));
    let closed = profile_of(&body).ok();
    let opts = SteinerOptions { fix_v0: !a.free_v0 };
    let list = |s: &Option<String>| -> Result<Option<Vec<f64>>> {
        s.as_deref()
            .map(|t| parse_floats(t).map_err(|e| willslab::Error::Input(e).into()))
            .transpose()
    };
    let (result, table) = if a.fit_steiner || a.wills_is {
        let fit = if a.fit_steiner {
            let radii = list(&a.radii)?.unwrap_or_else(|| default_radii(&body));
            fit_steiner(&body, &radii, a.n, ctx.seed, opts)?
        } else {
            let m = (body.dim() + 2).max(8);
            let scales = list(&a.scales)?
                .unwrap_or_else(|| (0..m).map(|i| 0.25 * 16f64.powf(i as f64 / (m - 1) as f64)).collect());
            fit_wills_polynomial(body.dim(), estimate_wills_scaled(&body, &scales, a.n, ctx.seed)?, opts)?
        };
        let mut t = Table::new(vec![if a.fit_steiner { "r" } else { "lambda" }, "estimate", "stderr", "n"]);
        for (x, e) in &fit.points {
            t.push(vec![num(*x), num(e.value), num(e.stderr), e.n.to_string()]);
        }
        if a.check {
            let Some(exact) = &closed else {
                bail!(crate::artifact::CheckFailed("no closed form to compare against".into()));
            };
            for (k, (v, e)) in fit.v.iter().zip(exact.v()).enumerate() {
                ensure((v - e).abs() <= 3.0 * fit.stderr[k] + 1e-12 * e.abs(), format!("v_{k} = {v} ± {} vs {e}", fit.stderr[k]))?;
            }
        }
        run.write_json("profile.json", &fit.profile()?)?;
        (
            VolumesResult {
                method: if a.fit_steiner { "steiner_fit" } else { "wills_importance_sampling" },
                v: fit.v.clone(),
                stderr: Some(fit.stderr.clone()),
                condition: Some(fit.condition),
                closed_form: closed.as_ref().map(|p| p.v()),
                points: fit.points,
            },
            t,
        )
    } else {
        let Some(profile) = closed else {
            bail!(willslab::Error::Input("no closed form for this body; use --fit-steiner or --wills-is".into()));
        };
        let mut t = Table::new(vec!["k", "v_k"]);
        for (k, v) in profile.v().iter().enumerate() {
            t.push(vec![k.to_string(), num(*v)]);
        }
        run.write_json("profile.json", &profile)?;
        (
            VolumesResult {
                method: "closed_form",
                v: profile.v(),
                stderr: None,
                condition: None,
                closed_form: Some(profile.v()),
                points: Vec::new(),
            },
            t,
        )
    };
    let shown: Vec<String> = result.v.iter().map(|v| format!("{v:.6}")).collect();
    println!("v = ({})", shown.join(", "));
    run.write_main("volumes", &result, &table)?;
    Ok(())
}

// ---------------------------------------------------------------- sample

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerChoice {
    Exact,
    Mixture,
    Mala,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Body description: inline JSON or a file path.
    #[arg(long, required_unless_present = "profile")]
    pub body: Option<String>,
    /// Intrinsic-volume profile (JSON), used by the mixture route.
    #[arg(long)]
    pub profile: Option<String>,
    /// Defaults to exact for boxes and balls, MALA for polytopes, mixture for a bare profile.
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerChoice>,
    #[arg(long, value_parser = parse_count, default_value = "1e4")]
    pub n: usize,
    /// Write H = π dist² instead of points.
    #[arg(long)]
    pub h: bool,
    /// Also write the batch in the binary format.
    #[arg(long)]
    pub binary: bool,
    #[command(flatten)]
    pub mala: MalaArgs,
    /// Exit with code 4 unless mean H is within 4 stderr of (d − E[V])/2.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Serialize)]
struct HSummary {
    n: usize,
    mean: f64,
    stderr: f64,
    variance: f64,
    expected_mean: Option<f64>,
    expected_variance: Option<f64>,
}

#[derive(Serialize)]
struct SampleResult<'a> {
    meta: BatchMeta,
    h: HSummary,
    values: &'a [f64],
}

pub fn sample(ctx: &Context, a: &SampleArgs) -> Result<()> {
    let body = a.body.as_deref().map(load_body).transpose()?;
    let profile = match (&a.profile, &body) {
        (Some(p), _) => Some(load_profile(p)?),
        (None, Some((_, b))) => profile_of(b).ok(),
        (None, None) => None,
    };
    let mut resolved = Vec::new();
    if let Some((spec, _)) = &body {
        resolved.push(("body", spec_value(spec)));
    }
    if let (Some(p), Some(_)) = (&profile, &a.profile) {
        resolved.push(("profile", profile_value(p)));
    }
    let run = ctx.run("sample", echo(a, resolved));
    let choice = a.sampler.unwrap_or(match &body {
        None => SamplerChoice::Mixture,
        Some((_, b)) if b.kind() == "hpolytope" => SamplerChoice::Mala,
        Some(_) => SamplerChoice::Exact,
    });
    let batch: SampleBatch = match choice {
        SamplerChoice::Mixture => {
            let Some(p) = &profile else {
                bail!(willslab::Error::Input("the mixture route needs a profile".into()));
            };
            sample_hk_mixture(&willslab::intrinsic::vk_law(p), p.d, a.n, ctx.seed)?
        }
        SamplerChoice::Exact | SamplerChoice::Mala => {
            let Some((_, b)) = &body else {
                bail!(willslab::Error::Input("this sampler needs --body".into()));
            };
            let points = match (choice, b.shape()) {
                (SamplerChoice::Mala, _) => sample_mala(b, &a.mala.options(a.n), ctx.seed)?,
                (_, Shape::Ball { degenerate: false, .. }) => sample_ball_exact(b, a.n, ctx.seed)?,
                (_, Shape::HPolytope { .. }) => {
                    bail!(willslab::Error::Input("no exact sampler for polytopes; use --sampler mala".into()))
                }
                _ => sample_box_exact(b, a.n, ctx.seed)?,
            };
            if a.h {
                let mut h = h_from_points(b, &points)?;
                h.diagnostics = points.diagnostics;
                h
            } else {
                points
            }
        }
    };
    let h_values: Vec<f64> = match &body {
        Some((_, b)) if batch.columns() > 1 || batch.kind == willslab::sampling::BatchKind::Points => {
            h_from_points(b, &batch)?.values
        }
        _ => batch.values.clone(),
    };
    let s = Summary::of(&h_values);
    let stderr = match batch.diagnostics {
        Some(MalaDiagnostics { .. }) => (s.variance / effective_sample_size(&h_values).max(1.0)).sqrt(),
        None => s.stderr,
    };
    let mom = profile.as_ref().map(moments);
    let summary = HSummary {
        n: h_values.len(),
        mean: s.mean,
        stderr,
        variance: s.variance,
        expected_mean: mom.map(|m| m.delta),
        expected_variance: mom.map(|m| m.sigma2),
    };
    println!("mean H = {:.6} ± {:.6} over {} draws", summary.mean, summary.stderr, summary.n);
    if let Some(d) = &batch.diagnostics {
        println!("MALA acceptance {:.3}, step {:.4e}, ESS {:.0}", d.acceptance, d.step, d.ess);
    }
    if a.check {
        let Some(m) = summary.expected_mean else {
            bail!(crate::artifact::CheckFailed("no profile to compare the mean against".into()));
        };
        ensure((summary.mean - m).abs() <= 4.0 * summary.stderr, format!("mean H {} vs {m}", summary.mean))?;
    }
    match ctx.format {
        Format::Json => {
            run.write_json(
                "sample.json",
                &SampleResult {
                    meta: batch.meta(),
                    h: summary,
                    values: &batch.values,
                },
            )?;
        }
        Format::Csv => {
            let mut bytes = Vec::new();
            batch.write_csv(&mut bytes)?;
            let text = run.header_lines() + &String::from_utf8(bytes)?;
            run.write_text("sample.csv", &text)?;
        }
    }
    if a.binary {
        let mut bytes = Vec::new();
        batch.write_binary(&mut bytes)?;
        run.write_bytes("sample.bin", &bytes)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- stein

#[derive(Debug, Args, Serialize)]
pub struct SteinArgs {
    /// Body description: inline JSON or a file path.
    #[arg(long)]
    pub body: String,
    /// Profile (JSON); required for polytopes.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    pub n: usize,
    /// Exit with code 4 unless bound ≥ empirical − 4 stderr and A·σ = 2 within 4 stderr.
    #[arg(long)]
    pub check: bool,
}

pub fn stein(ctx: &Context, a: &SteinArgs) -> Result<()> {
    let (spec, body) = load_body(&a.body)?;
    let profile = a.profile.as_deref().map(load_profile).transpose()?;
    let mut resolved = vec![("body", spec_value(&spec))];
    if let Some(p) = &profile {
        resolved.push(("profile", profile_value(p)));
    }
    let run = ctx.run("stein", echo(a, resolved));
    let r = stein_bound(&body, profile.as_ref(), a.n, ctx.seed)?;
    println!(
        "A = {:.5} ± {:.5}, B = {:.5} ± {:.5}, A + B = {:.5}; empirical TV proxy {:.5}, KS {:.5}",
        r.a.value, r.a.stderr, r.b.value, r.b.stderr, r.bound.value, r.empirical_tv, r.empirical_ks
    );
    let mut t = Table::new(vec![
        "d", "body", "sigma", "a", "a_stderr", "b", "b_stderr", "bound", "bound_stderr", "bound_four", "a_sigma",
        "a_sigma_stderr", "empirical_tv", "empirical_ks", "tv_bins", "n",
    ]);
    t.push(vec![
        r.d.to_string(),
        r.body.clone(),
        num(r.sigma),
        num(r.a.value),
        num(r.a.stderr),
        num(r.b.value),
        num(r.b.stderr),
        num(r.bound.value),
        num(r.bound.stderr),
        num(r.bound_four.value),
        num(r.a_sigma.value),
        num(r.a_sigma.stderr),
        num(r.empirical_tv),
        num(r.empirical_ks),
        r.tv_bins.to_string(),
        r.n.to_string(),
    ]);
    run.write_main("stein", &r, &t)?;
    if a.check {
        ensure(
            r.bound.value >= r.empirical_tv - 4.0 * r.bound.stderr,
            format!("bound {} below empirical {}", r.bound.value, r.empirical_tv),
        )?;
        ensure(r.a_sigma.within(2.0, 4.0), format!("A·σ = {} ± {}", r.a_sigma.value, r.a_sigma.stderr))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- clt

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Cube,
    Ball,
    Polytopes,
}

#[derive(Debug, Args, Serialize)]
pub struct CltArgs {
    #[arg(long, value_enum)]
    pub family: FamilyChoice,
    /// Exponent α in the size rule c·d^α (cube half-width, ball radius).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Constant c; defaults to 0.5 for cubes (the unit cube) and 1 for balls.
    #[arg(long)]
    pub c: Option<f64>,
    /// Dimension grid: `lo:hi:xF`, `lo:hi:+S` or a comma list.
    #[arg(long, default_value = "16:16384:x4")]
    pub dgrid: String,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub n: usize,
    /// Histogram bins for the TV proxy; defaults to ⌈n^(1/3)⌉.
    #[arg(long, value_parser = parse_count)]
    pub bins: Option<usize>,
    /// JSON array of bodies for the polytopes family.
    #[arg(long)]
    pub bodies: Option<String>,
    #[command(flatten)]
    pub mala: MalaArgs,
    /// Exit with code 4 unless the KS log-log slope lies in LO:HI.
    #[arg(long, value_parser = parse_range)]
    pub check_slope: Option<(f64, f64)>,
    /// Exit with code 4 unless d^(1/2−α)·KS peaks in the first third of the
    /// grid and is non-increasing over the last three points.
    #[arg(long)]
    pub check_bounded: bool,
    /// Exit with code 4 unless KS strictly decreases along the grid.
    #[arg(long)]
    pub check_decreasing: bool,
}

#[derive(Debug, Serialize)]
struct CltOutput {
    report: CltReport,
    /// `d^(1/2 − α)·KS` per grid point.
    scaled_ks: Vec<f64>,
    max_scaled_ks: f64,
    argmax_d: usize,
}

pub fn clt(ctx: &Context, a: &CltArgs) -> Result<()> {
    let grid = parse_grid(&a.dgrid).map_err(willslab::Error::Input)?;
    let (family, resolved) = match a.family {
        FamilyChoice::Cube => (Family::Cube { c: a.c.unwrap_or(0.5), alpha: a.alpha }, vec![("c", json!(a.c.unwrap_or(0.5)))]),
        FamilyChoice::Ball => (Family::Ball { c: a.c.unwrap_or(1.0), alpha: a.alpha }, vec![("c", json!(a.c.unwrap_or(1.0)))]),
        FamilyChoice::Polytopes => {
            let Some(list) = &a.bodies else {
                bail!(willslab::Error::Input("the polytopes family needs --bodies".into()));
            };
            let loaded = load_bodies(list)?;
            let specs: Vec<Value> = loaded.iter().map(|(s, _)| spec_value(s)).collect();
            (
                Family::Polytopes { bodies: loaded.into_iter().map(|(_, b)| b).collect() },
                vec![("bodies", Value::Array(specs))],
            )
        }
    };
    let mut config = echo(a, resolved);
    if a.family == FamilyChoice::Polytopes {
        config["dgrid"] = Value::Null;
    }
    let run = ctx.run("clt", config);
    let opts = ExperimentOptions {
        bins: a.bins,
        mala: a.mala.options(a.n),
    };
    let report = run_family_experiment(&family, &grid, a.n, ctx.seed, &opts)?;
    let exponent = 0.5 - report.alpha.unwrap_or(0.0);
    let scaled: Vec<f64> = report.rows.iter().map(|r| r.ks * (r.d as f64).powf(exponent)).collect();
    let (imax, max) = scaled
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let mut t = Table::new(vec!["d", "ks", "ks_band", "tv_proxy", "bins", "w1", "n", "scaled_ks"]);
    for (r, s) in report.rows.iter().zip(&scaled) {
        println!("d = {:>6}: KS {:.5} (band {:.5}), TV proxy {:.5}, W1 {:.5}", r.d, r.ks, r.ks_band, r.tv_proxy, r.w1);
        t.push(vec![
            r.d.to_string(),
            num(r.ks),
            num(r.ks_band),
            num(r.tv_proxy),
            r.bins.to_string(),
            num(r.w1),
            r.n.to_string(),
            num(*s),
        ]);
    }
    if let Some(f) = &report.ks_fit {
        println!("KS slope {:.4} ± {:.4}", f.slope, f.stderr);
    }
    println!("max d^{exponent}·KS = {max:.5} at d = {}", report.rows[imax].d);
    let svg = crate::plot::clt_svg(&report);
    let out = CltOutput {
        argmax_d: report.rows[imax].d,
        report,
        scaled_ks: scaled.clone(),
        max_scaled_ks: max,
    };
    run.write_main("clt", &out, &t)?;
    run.write_svg("clt.svg", &svg)?;
    if let Some((lo, hi)) = a.check_slope {
        let Some(f) = &out.report.ks_fit else {
            bail!(crate::artifact::CheckFailed("no rate fit (fewer than 3 grid points)".into()));
        };
        ensure((lo..=hi).contains(&f.slope), format!("KS slope {} outside [{lo}, {hi}]", f.slope))?;
    }
    if a.check_bounded {
        ensure(bounded_shape(&scaled), format!("d^{exponent}·KS = {scaled:?}"))?;
    }
    if a.check_decreasing {
        let ks: Vec<f64> = out.report.rows.iter().map(|r| r.ks).collect();
        ensure(ks.windows(2).all(|w| w[1] < w[0]), format!("KS not strictly decreasing: {ks:?}"))?;
    }
    Ok(())
}

/// Maximum within the first third and non-increasing over the last three points.
pub fn bounded_shape(scaled: &[f64]) -> bool {
    let n = scaled.len();
    let imax = (0..n).fold(0, |b, i| if scaled[i] > scaled[b] { i } else { b });
    let early = imax < n.div_ceil(3);
    let tail = scaled[n.saturating_sub(3)..].windows(2).all(|w| w[1] <= w[0]);
    early && tail
}

// ---------------------------------------------------------------- surface-law

#[derive(Debug, Args, Serialize)]
pub struct SurfaceArgs {
    /// Profile (JSON); defaults to the body's closed form.
    #[arg(long, required_unless_present = "body")]
    pub profile: Option<String>,
    /// Body description: inline JSON or a file path.
    #[arg(long)]
    pub body: Option<String>,
    /// Comma-separated values of s (s = 1/r).
    #[arg(long)]
    pub s: Option<String>,
    /// Comma-separated distances r; adds s = 1/r.
    #[arg(long)]
    pub r: Option<String>,
    /// Also estimate the law at each r from draws binned by distance.
    #[arg(long, requires_all = ["body", "r"])]
    pub empirical: bool,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub n: usize,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub min_hits: usize,
    /// Band half-width cap as a fraction of r.
    #[arg(long, default_value_t = 0.05)]
    pub max_width: f64,
    /// Exit with code 4 unless every empirical law is within TV 0.02 of p(1/r).
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Serialize)]
struct SurfaceResult {
    laws: Vec<SurfaceLaw>,
    slices: Vec<SurfaceSlice>,
}

pub fn surface_law(ctx: &Context, a: &SurfaceArgs) -> Result<()> {
    let body = a.body.as_deref().map(load_body).transpose()?;
    let profile = match (&a.profile, &body) {
        (Some(p), _) => Some(load_profile(p)?),
        (None, Some((_, b))) => profile_of(b).ok(),
        (None, None) => None,
    };
    let mut resolved = Vec::new();
    if let Some((spec, _)) = &body {
        resolved.push(("body", spec_value(spec)));
    }
    if let Some(p) = &profile {
        resolved.push(("profile", profile_value(p)));
    }
    let run = ctx.run("surface-law", echo(a, resolved));
    let floats = |s: &Option<String>| -> Result<Vec<f64>> {
        Ok(s.as_deref().map(parse_floats).transpose().map_err(willslab::Error::Input)?.unwrap_or_default())
    };
    let rs = floats(&a.r)?;
    let mut ss = floats(&a.s)?;
    ss.extend(rs.iter().map(|r| 1.0 / r));
    if ss.is_empty() && !a.empirical {
        ss = vec![0.1, 1.0, 10.0];
    }
    let laws = match &profile {
        Some(p) => ss.iter().map(|&s| law_at(p, s)).collect::<willslab::Result<Vec<_>>>()?,
        None if ss.is_empty() || a.empirical => Vec::new(),
        None => bail!(willslab::Error::Input("no profile for this body; pass --profile".into())),
    };
    let mut slices = Vec::new();
    if a.empirical {
        let (_, b) = body.as_ref().expect("clap enforces --body");
        let opts = SliceOptions {
            min_hits: a.min_hits,
            max_width_fraction: a.max_width,
            ..SliceOptions::default()
        };
        for (i, &r) in rs.iter().enumerate() {
            slices.push(estimate_surface_slice(b, profile.as_ref(), r, a.n, ctx.seed.child(i as u64), &opts)?);
        }
    }
    let mut t = Table::new(vec!["s", "i", "p"]);
    for l in &laws {
        println!("s = {}: e_p = {:.6}, var_p = {:.6}", l.s, l.e_p, l.var_p);
        for (i, p) in l.probs.iter().enumerate() {
            t.push(vec![num(l.s), i.to_string(), num(*p)]);
        }
    }
    for sl in &slices {
        let tv = sl.tv.map_or("n/a".into(), |v| format!("{v:.5}"));
        println!("r = {}: {} hits, width {:.3e}, empirical {:?}, TV {tv}", sl.r, sl.hits, sl.width, sl.empirical);
    }
    match ctx.format {
        Format::Json => {
            run.write_json("surface_law.json", &SurfaceResult { laws, slices: slices.clone() })?;
        }
        Format::Csv => {
            run.write_csv("surface_law.csv", &t)?;
            if !slices.is_empty() {
                let mut st = Table::new(vec!["r", "i", "empirical", "stderr", "theory", "hits", "width"]);
                for sl in &slices {
                    for i in 0..sl.empirical.len() {
                        let th = sl.theory.as_ref().map_or(String::new(), |t| num(t[i]));
                        st.push(vec![num(sl.r), i.to_string(), num(sl.empirical[i]), num(sl.stderr[i]), th, sl.hits.to_string(), num(sl.width)]);
                    }
                }
                run.write_csv("surface_slice.csv", &st)?;
            }
        }
    }
    if a.check {
        ensure(!slices.is_empty(), "nothing to check; use --empirical")?;
        for sl in &slices {
            let tv = sl.tv.ok_or_else(|| crate::artifact::CheckFailed("no theoretical law to compare".into()))?;
            ensure(tv < 0.02, format!("TV {tv} at r = {}", sl.r))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- checks

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IbpFn {
    Identity,
    Constant,
    Cubic,
}

impl From<IbpFn> for TestFn {
    fn from(f: IbpFn) -> Self {
        match f {
            IbpFn::Identity => TestFn::Identity,
            IbpFn::Constant => TestFn::Constant,
            IbpFn::Cubic => TestFn::Cubic,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct IbpArgs {
    /// Body description: inline JSON or a file path.
    #[arg(long)]
    pub body: String,
    /// Test functions (default: all three).
    #[arg(long = "fn", value_enum, value_delimiter = ',')]
    pub fns: Vec<IbpFn>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    pub n: usize,
    #[command(flatten)]
    pub mala: MalaArgs,
    /// Exit with code 4 unless every residual is within 4 stderr of 0.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Serialize)]
struct IbpRow {
    test_fn: IbpFn,
    #[serde(flatten)]
    residual: IbpResidual,
}

pub fn ibp_check(ctx: &Context, a: &IbpArgs) -> Result<()> {
    let (spec, body) = load_body(&a.body)?;
    let run = ctx.run("ibp-check", echo(a, vec![("body", spec_value(&spec))]));
    let fns = if a.fns.is_empty() { vec![IbpFn::Identity, IbpFn::Constant, IbpFn::Cubic] } else { a.fns.clone() };
    let mut rows = Vec::new();
    for (i, f) in fns.iter().enumerate() {
        let seed = ctx.seed.child(i as u64);
        let residual = if body.kind() == "hpolytope" {
            let batch = sample_mala(&body, &a.mala.options(a.n), seed)?;
            check_ibp(&body, PointSource::from_batch(&batch), (*f).into())?
        } else {
            let sampler = ExactSampler::new(&body)?;
            check_ibp(&body, PointSource::Exact { sampler: &sampler, n: a.n, seed }, (*f).into())?
        };
        println!(
            "{f:?}: E<f, grad phi> = {:.6}, E[Tr grad f] = {:.6}, residual {:.3e} ± {:.3e}",
            residual.lhs.value, residual.rhs.value, residual.residual.value, residual.residual.stderr
        );
        rows.push(IbpRow { test_fn: *f, residual });
    }
    let mut t = Table::new(vec!["fn", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "residual", "residual_stderr", "n"]);
    for r in &rows {
        let x = &r.residual;
        t.push(vec![
            format!("{:?}", r.test_fn).to_lowercase(),
            num(x.lhs.value),
            num(x.lhs.stderr),
            num(x.rhs.value),
            num(x.rhs.stderr),
            num(x.residual.value),
            num(x.residual.stderr),
            x.n.to_string(),
        ]);
    }
    run.write_main("ibp_check", &rows, &t)?;
    if a.check {
        for r in &rows {
            ensure(r.residual.residual.within(0.0, 4.0), format!("{:?} residual {:?}", r.test_fn, r.residual.residual))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlFn {
    Sum,
    Sqnorm,
}

#[derive(Debug, Args, Serialize)]
pub struct BlArgs {
    /// A box or the point body: inline JSON or a file path.
    #[arg(long)]
    pub body: String,
    /// Comma-separated ε values.
    #[arg(long, default_value = "0.1,0.5,1.0")]
    pub epsilon: String,
    /// Test functions (default: both).
    #[arg(long = "fn", value_enum, value_delimiter = ',')]
    pub fns: Vec<BlFn>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    pub n: usize,
    /// Exit with code 4 unless every case satisfies Var ≤ bound + 4 stderr.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Serialize)]
struct BlRow {
    test_fn: BlFn,
    #[serde(flatten)]
    report: BlReport,
}

pub fn bl_check(ctx: &Context, a: &BlArgs) -> Result<()> {
    let (spec, body) = load_body(&a.body)?;
    let run = ctx.run("bl-check", echo(a, vec![("body", spec_value(&spec))]));
    let eps = parse_floats(&a.epsilon).map_err(willslab::Error::Input)?;
    let fns = if a.fns.is_empty() { vec![BlFn::Sum, BlFn::Sqnorm] } else { a.fns.clone() };
    let mut rows = Vec::new();
    let mut job = 0u64;
    for f in &fns {
        for &e in &eps {
            let func = match f {
                BlFn::Sum => BlFunction::Sum,
                BlFn::Sqnorm => BlFunction::SqNorm,
            };
            let report = brascamp_lieb_check(&body, e, func, a.n, ctx.seed.child(job))?;
            job += 1;
            println!(
                "{f:?}, eps = {e}: Var = {:.6} ± {:.6}, bound = {:.6} ± {:.6}, {}",
                report.variance.value,
                report.variance.stderr,
                report.bound.value,
                report.bound.stderr,
                if report.holds { "holds" } else { "VIOLATED" }
            );
            rows.push(BlRow { test_fn: *f, report });
        }
    }
    let mut t = Table::new(vec!["fn", "epsilon", "variance", "variance_stderr", "bound", "bound_stderr", "gap", "holds", "n"]);
    for r in &rows {
        let x = &r.report;
        t.push(vec![
            format!("{:?}", r.test_fn).to_lowercase(),
            num(x.epsilon),
            num(x.variance.value),
            num(x.variance.stderr),
            num(x.bound.value),
            num(x.bound.stderr),
            num(x.gap),
            x.holds.to_string(),
            x.n.to_string(),
        ]);
    }
    run.write_main("bl_check", &rows, &t)?;
    if a.check {
        for r in &rows {
            ensure(r.report.holds, format!("{:?} at ε = {}", r.test_fn, r.report.epsilon))?;
        }
    }
    Ok(())
}
