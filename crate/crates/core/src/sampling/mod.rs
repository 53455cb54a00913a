//! Reproducible draws of `X_K` and `H_K = π dist²(X_K, K)`.
//!
//! Three routes: exact per-coordinate draws for boxes (and the radial
//! analogue for balls), the Gamma mixture over `V_K` for any body with a
//! known profile, and MALA for everything else.

mod exact;
mod mala;
mod mixture;

pub use exact::{box_coordinate, ExactSampler};
pub use mala::{sample_mala, MalaOptions};
pub use mixture::sample_hk_mixture;

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::bodies::{BodySpec, ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{self, SeedSpec, CHUNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchKind {
    Points,
    HValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerTag {
    BoxExact,
    BallExact,
    Mixture,
    Mala,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MalaDiagnostics {
    /// Acceptance rate after burn-in.
    pub acceptance: f64,
    /// Frozen step (mean over chains).
    pub step: f64,
    /// Effective sample size of the `H` trace, summed over chains.
    pub ess: f64,
    pub thin: usize,
    pub burn_in: usize,
}

/// A batch of draws; points are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub kind: BatchKind,
    /// Ambient dimension `d` (also for `HValues`).
    pub dim: usize,
    pub values: Vec<f64>,
    pub sampler: SamplerTag,
    pub seed: SeedSpec,
    pub body: Option<BodySpec>,
    pub diagnostics: Option<MalaDiagnostics>,
}

/// Everything about a batch except its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMeta {
    pub kind: BatchKind,
    pub dim: usize,
    pub count: usize,
    pub sampler: SamplerTag,
    pub seed: SeedSpec,
    pub body: Option<BodySpec>,
    pub diagnostics: Option<MalaDiagnostics>,
}

impl SampleBatch {
    /// Values per draw: `dim` for points, 1 for `H` values.
    pub fn columns(&self) -> usize {
        match self.kind {
            BatchKind::Points => self.dim,
            BatchKind::HValues => 1,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.columns()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let c = self.columns();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.columns())
    }

    pub fn meta(&self) -> BatchMeta {
        BatchMeta {
            kind: self.kind,
            dim: self.dim,
            count: self.len(),
            sampler: self.sampler,
            seed: self.seed,
            body: self.body.clone(),
            diagnostics: self.diagnostics,
        }
    }

    /// Header row then one row per draw.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        match self.kind {
            BatchKind::HValues => writeln!(w, "h")?,
            BatchKind::Points => {
                let names: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
                writeln!(w, "{}", names.join(","))?;
            }
        }
        for row in self.points() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// 16-byte header (`b"WLSB"`, version `u32`, count `u32`, columns `u32`,
    /// little-endian) followed by the values as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        let count = u32::try_from(self.len()).map_err(|_| io::Error::other("batch too large for binary format"))?;
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&BINARY_VERSION.to_le_bytes())?;
        w.write_all(&count.to_le_bytes())?;
        w.write_all(&(self.columns() as u32).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

pub const BINARY_MAGIC: &[u8; 4] = b"WLSB";
pub const BINARY_VERSION: u32 = 1;

/// Reads the binary format back as `(count, columns, values)`.
pub fn read_binary<R: Read>(mut r: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|e| Error::input(format!("binary header: {e}")))?;
    if &header[..4] != BINARY_MAGIC {
        return Err(Error::input("not a sample batch file"));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap()) as usize;
    if word(4) != BINARY_VERSION as usize {
        return Err(Error::input(format!("unsupported version {}", word(4))));
    }
    let (count, columns) = (word(8), word(12));
    let mut values = Vec::with_capacity(count * columns);
    let mut buf = [0u8; 8];
    for _ in 0..count * columns {
        r.read_exact(&mut buf)
            .map_err(|e| Error::input(format!("binary body: {e}")))?;
        values.push(f64::from_le_bytes(buf));
    }
    Ok((count, columns, values))
}

fn exact_batch(body: &ConvexBody, sampler: &ExactSampler, n: usize, seed: SeedSpec, tag: SamplerTag) -> SampleBatch {
    let d = body.dim();
    let chunks = rng::map_chunks(n, seed, |r, count| {
        let mut out = vec![0.0; count * d];
        for row in out.chunks_exact_mut(d) {
            sampler.draw(r, row);
        }
        out
    });
    SampleBatch {
        kind: BatchKind::Points,
        dim: d,
        values: chunks.concat(),
        sampler: tag,
        seed,
        body: Some(body.to_spec()),
        diagnostics: None,
    }
}

/// I.i.d. draws of `X_K` for a box; the point body is accepted as the `T = 0` case.
pub fn sample_box_exact(body: &ConvexBody, n: usize, seed: SeedSpec) -> Result<SampleBatch> {
    let sampler = match body.shape() {
        Shape::Box { .. } => ExactSampler::new(body)?,
        Shape::Ball { degenerate: true, center, .. } => ExactSampler::Box {
            center: center.clone(),
            half_widths: vec![0.0; body.dim()],
        },
        _ => return Err(Error::input("sample_box_exact needs a box")),
    };
    Ok(exact_batch(body, &sampler, n, seed, SamplerTag::BoxExact))
}

/// I.i.d. draws of `X_K` for a ball or the point body.
pub fn sample_ball_exact(body: &ConvexBody, n: usize, seed: SeedSpec) -> Result<SampleBatch> {
    if !matches!(body.shape(), Shape::Ball { .. }) {
        return Err(Error::input("sample_ball_exact needs a ball"));
    }
    let sampler = ExactSampler::new(body)?;
    Ok(exact_batch(body, &sampler, n, seed, SamplerTag::BallExact))
}

/// Elementwise `π dist²(x, K)`.
pub fn h_from_points(body: &ConvexBody, batch: &SampleBatch) -> Result<SampleBatch> {
    if batch.kind != BatchKind::Points {
        return Err(Error::input("h_from_points needs a batch of points"));
    }
    if batch.dim != body.dim() {
        return Err(Error::input(format!(
            "batch dimension {} differs from body dimension {}",
            batch.dim,
            body.dim()
        )));
    }
    let values = PointSource::from_batch(batch).map(|x| body.distance(x).map(|r| std::f64::consts::PI * r * r));
    Ok(SampleBatch {
        kind: BatchKind::HValues,
        dim: batch.dim,
        values: values.into_iter().collect::<Result<Vec<_>>>()?,
        sampler: batch.sampler,
        seed: batch.seed,
        body: Some(body.to_spec()),
        diagnostics: batch.diagnostics,
    })
}

/// Points to be consumed one at a time, either stored or generated on the fly
/// (so large `n·d` never has to sit in memory).
#[derive(Clone, Copy)]
pub enum PointSource<'a> {
    Exact {
        sampler: &'a ExactSampler,
        n: usize,
        seed: SeedSpec,
    },
    /// Row-major stored points.
    Rows { values: &'a [f64], dim: usize },
}

impl<'a> PointSource<'a> {
    pub fn from_batch(batch: &'a SampleBatch) -> Self {
        PointSource::Rows {
            values: &batch.values,
            dim: batch.columns(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PointSource::Exact { n, .. } => *n,
            PointSource::Rows { values, dim } => values.len() / dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            PointSource::Exact { sampler, .. } => sampler.dim(),
            PointSource::Rows { dim, .. } => *dim,
        }
    }

    /// Two disjoint, independent parts of sizes `⌊n/2⌋` and `⌈n/2⌉`.
    pub fn halves(&self) -> (PointSource<'a>, PointSource<'a>) {
        let first = self.len() / 2;
        match *self {
            PointSource::Exact { sampler, n, seed } => (
                PointSource::Exact {
                    sampler,
                    n: first,
                    seed: seed.child(0),
                },
                PointSource::Exact {
                    sampler,
                    n: n - first,
                    seed: seed.child(1),
                },
            ),
            PointSource::Rows { values, dim } => (
                PointSource::Rows {
                    values: &values[..first * dim],
                    dim,
                },
                PointSource::Rows {
                    values: &values[first * dim..],
                    dim,
                },
            ),
        }
    }

    /// Runs `job` over consecutive blocks of at most [`CHUNK`] points, in order.
    fn blocks<T, F>(&self, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut dyn FnMut(&mut dyn FnMut(&[f64]))) -> T + Sync + Send,
    {
        match *self {
            PointSource::Exact { sampler, n, seed } => {
                let d = sampler.dim();
                rng::map_chunks(n, seed, |r, count| {
                    let mut x = vec![0.0; d];
                    job(&mut |visit: &mut dyn FnMut(&[f64])| {
                        for _ in 0..count {
                            sampler.draw(r, &mut x);
                            visit(&x);
                        }
                    })
                })
            }
            PointSource::Rows { values, dim } => {
                let len = values.len() / dim;
                par::map_indexed(len.div_ceil(CHUNK), |i| {
                    let end = ((i + 1) * CHUNK).min(len);
                    let rows = &values[i * CHUNK * dim..end * dim];
                    job(&mut |visit: &mut dyn FnMut(&[f64])| rows.chunks_exact(dim).for_each(&mut *visit))
                })
            }
        }
    }

    /// `f` applied to every point, in draw order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync + Send,
    {
        self.blocks(|each| {
            let mut out = Vec::new();
            each(&mut |x| out.push(f(x)));
            out
        })
        .into_iter()
        .flatten()
        .collect()
    }

    /// `Σ_x g(x)` for vector-valued `g` writing into a buffer of length `width`;
    /// block sums are combined in block order.
    pub fn sum_vectors<F>(&self, width: usize, g: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync + Send,
    {
        let parts = self.blocks(|each| -> Result<Vec<f64>> {
            let mut acc = vec![0.0; width];
            let mut buf = vec![0.0; width];
            let mut err = None;
            each(&mut |x| {
                if err.is_none() {
                    match g(x, &mut buf) {
                        Ok(()) => acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += b),
                        Err(e) => err = Some(e),
                    }
                }
            });
            err.map_or(Ok(acc), Err)
        });
        let mut total = vec![0.0; width];
        for part in parts {
            total.iter_mut().zip(part?).for_each(|(t, p)| *t += p);
        }
        Ok(total)
    }
}
