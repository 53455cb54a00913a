//! Convex bodies with metric projection.
//!
//! Boxes and balls project in closed form; H-polytopes use Dykstra's
//! alternating projection. Every body is full-dimensional except the point
//! body, a radius-0 ball built only through [`ConvexBody::point`].

mod dykstra;
mod lp;
mod spec;

pub use dykstra::{dykstra_project, dykstra_solve, DykstraOptions, DykstraSolution, Halfspace};
pub use spec::BodySpec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use dykstra::dot;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Box {
        center: Vec<f64>,
        half_widths: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        degenerate: bool,
    },
    HPolytope {
        halfspaces: Vec<Halfspace>,
        interior_point: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    enclosing_radius: f64,
}

/// Dimension of the face whose relative interior contains `Π_K(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceDim {
    Face(usize),
    /// Boundary point of a smooth body.
    Smooth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub point: Vec<f64>,
    pub distance: f64,
    pub face_dim: FaceDim,
    pub iterations: usize,
}

/// Activity threshold used for the `face_dim` reported by [`ConvexBody::project`].
const FACE_TOL: f64 = 1e-9;

impl ConvexBody {
    pub fn new_box(center: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        let dim = center.len();
        if dim == 0 || half_widths.len() != dim {
            return Err(Error::input("box center and half_widths must have equal positive length"));
        }
        if half_widths.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::input("box half_widths must be positive and finite"));
        }
        let r = half_widths.iter().map(|h| h * h).sum::<f64>().sqrt();
        Ok(ConvexBody {
            dim,
            shape: Shape::Box { center, half_widths },
            enclosing_radius: r,
        })
    }

    /// `[-half, half]^d`.
    pub fn cube(dim: usize, half: f64) -> Result<Self> {
        Self::new_box(vec![0.0; dim], vec![half; dim])
    }

    /// `[0, 1]^d`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::new_box(vec![0.5; dim], vec![0.5; dim])
    }

    pub fn new_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::input("ball dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::input("ball radius must be positive; use ConvexBody::point for K = {c}"));
        }
        Ok(ConvexBody {
            dim: center.len(),
            shape: Shape::Ball {
                center,
                radius,
                degenerate: false,
            },
            enclosing_radius: radius,
        })
    }

    /// The degenerate body `K = {center}`; `X_K` is then Gaussian.
    pub fn point(center: Vec<f64>) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::input("point dimension must be positive"));
        }
        Ok(ConvexBody {
            dim: center.len(),
            shape: Shape::Ball {
                center,
                radius: 0.0,
                degenerate: true,
            },
            enclosing_radius: 0.0,
        })
    }

    /// `{x : ⟨a_j, x⟩ ≤ b_j}`; normals are rescaled to unit length.
    pub fn new_hpolytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>, interior_point: Vec<f64>) -> Result<Self> {
        let dim = interior_point.len();
        if dim == 0 {
            return Err(Error::input("polytope dimension must be positive"));
        }
        if normals.len() != offsets.len() || normals.is_empty() {
            return Err(Error::input("need one offset per normal and at least one normal"));
        }
        let mut halfspaces = Vec::with_capacity(normals.len());
        for (a, b) in normals.into_iter().zip(offsets) {
            if a.len() != dim {
                return Err(Error::input(format!("normal has length {}, expected {dim}", a.len())));
            }
            let norm = dot(&a, &a).sqrt();
            if !(norm > 0.0 && norm.is_finite() && b.is_finite()) {
                return Err(Error::input("normals must be nonzero and finite"));
            }
            halfspaces.push(Halfspace::new(a.iter().map(|v| v / norm).collect(), b / norm));
        }
        if let Some(j) = halfspaces.iter().position(|h| !(h.slack(&interior_point) > 0.0)) {
            return Err(Error::input(format!("interior point violates constraint {j} (must be strict)")));
        }
        let enclosing_radius = polytope_enclosing_radius(&halfspaces, &interior_point)?;
        Ok(ConvexBody {
            dim,
            shape: Shape::HPolytope {
                halfspaces,
                interior_point,
            },
            enclosing_radius,
        })
    }

    /// The same box written as `2d` halfspaces.
    pub fn box_as_hpolytope(&self) -> Result<Self> {
        let Shape::Box { center, half_widths } = &self.shape else {
            return Err(Error::input("not a box"));
        };
        let d = self.dim;
        let mut normals = Vec::with_capacity(2 * d);
        let mut offsets = Vec::with_capacity(2 * d);
        for i in 0..d {
            for sign in [1.0, -1.0] {
                let mut a = vec![0.0; d];
                a[i] = sign;
                normals.push(a);
                offsets.push(sign * center[i] + half_widths[i]);
            }
        }
        Self::new_hpolytope(normals, offsets, center.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.shape, Shape::Ball { degenerate: true, .. })
    }

    /// Box or ball center, or the polytope's interior point.
    pub fn center(&self) -> &[f64] {
        match &self.shape {
            Shape::Box { center, .. } | Shape::Ball { center, .. } => center,
            Shape::HPolytope { interior_point, .. } => interior_point,
        }
    }

    /// `R` with `K ⊆ center + R·B^d`: exact for boxes and balls, a certified
    /// upper bound for polytopes.
    pub fn enclosing_radius(&self) -> f64 {
        self.enclosing_radius
    }

    pub fn kind(&self) -> &'static str {
        match &self.shape {
            Shape::Box { .. } => "box",
            Shape::Ball { degenerate: true, .. } => "point",
            Shape::Ball { .. } => "ball",
            Shape::HPolytope { .. } => "hpolytope",
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::input(format!("point has length {}, body has dimension {}", x.len(), self.dim)));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { center, half_widths } => x
                .iter()
                .zip(center)
                .zip(half_widths)
                .all(|((xi, ci), hi)| (xi - ci).abs() <= *hi),
            Shape::Ball { center, radius, .. } => dist2(x, center) <= radius * radius,
            Shape::HPolytope { halfspaces, .. } => halfspaces.iter().all(|h| h.slack(x) >= 0.0),
        }
    }

    /// `Π_K(x)` only.
    pub fn project_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match &self.shape {
            Shape::Box { center, half_widths } => x
                .iter()
                .zip(center)
                .zip(half_widths)
                .map(|((xi, ci), hi)| xi.clamp(ci - hi, ci + hi))
                .collect(),
            Shape::Ball { center, radius, .. } => project_ball(x, center, *radius),
            Shape::HPolytope { halfspaces, .. } => dykstra_solve(halfspaces, x, DykstraOptions::default())?.point,
        })
    }

    /// `dist(x, K)`.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.shape {
            Shape::Box { center, half_widths } => x
                .iter()
                .zip(center)
                .zip(half_widths)
                .map(|((xi, ci), hi)| {
                    let e = ((xi - ci).abs() - hi).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            Shape::Ball { center, radius, .. } => (dist2(x, center).sqrt() - radius).max(0.0),
            Shape::HPolytope { halfspaces, .. } => {
                if halfspaces.iter().all(|h| h.slack(x) >= 0.0) {
                    0.0
                } else {
                    let p = dykstra_solve(halfspaces, x, DykstraOptions::default())?.point;
                    dist2(x, &p).sqrt()
                }
            }
        })
    }

    pub fn project(&self, x: &[f64]) -> Result<ProjectionResult> {
        self.project_with(x, DykstraOptions::default())
    }

    pub fn project_with(&self, x: &[f64], opts: DykstraOptions) -> Result<ProjectionResult> {
        self.check_dim(x)?;
        let d = self.dim;
        match &self.shape {
            Shape::Box { center, half_widths } => {
                let point = self.project_point(x)?;
                let clamped = x
                    .iter()
                    .zip(center)
                    .zip(half_widths)
                    .filter(|((xi, ci), hi)| (*xi - *ci).abs() >= **hi)
                    .count();
                Ok(ProjectionResult {
                    distance: dist2(x, &point).sqrt(),
                    point,
                    face_dim: FaceDim::Face(d - clamped),
                    iterations: 0,
                })
            }
            Shape::Ball { center, radius, degenerate } => {
                let point = project_ball(x, center, *radius);
                let distance = dist2(x, &point).sqrt();
                let face_dim = if *degenerate {
                    FaceDim::Face(0)
                } else if distance == 0.0 {
                    FaceDim::Face(d)
                } else {
                    FaceDim::Smooth
                };
                Ok(ProjectionResult {
                    point,
                    distance,
                    face_dim,
                    iterations: 0,
                })
            }
            Shape::HPolytope { halfspaces, .. } => {
                let sol = dykstra_solve(halfspaces, x, opts)?;
                let active: Vec<&Halfspace> = halfspaces
                    .iter()
                    .filter(|h| h.slack(&sol.point) <= FACE_TOL * (1.0 + h.offset.abs()))
                    .collect();
                Ok(ProjectionResult {
                    distance: dist2(x, &sol.point).sqrt(),
                    face_dim: FaceDim::Face(d - normal_rank(&active, FACE_TOL)),
                    point: sol.point,
                    iterations: sol.cycles,
                })
            }
        }
    }

    /// `Tr(∇Π_K(x))`.
    ///
    /// Boxes and polytopes give the dimension of the face whose relative
    /// interior contains `Π_K(x)`; a point within `tol` of a face-region
    /// boundary yields [`Error::BoundaryCase`]. For a ball of radius `R`,
    /// `R(d−1)/‖x − c‖` outside and `d` inside.
    pub fn trace_projection_jacobian(&self, x: &[f64], tol: f64) -> Result<f64> {
        self.check_dim(x)?;
        let d = self.dim;
        match &self.shape {
            Shape::Box { center, half_widths } => {
                let mut inside = 0;
                for ((xi, ci), hi) in x.iter().zip(center).zip(half_widths) {
                    let gap = (xi - ci).abs() - hi;
                    if gap.abs() <= tol {
                        return Err(Error::BoundaryCase);
                    }
                    if gap < 0.0 {
                        inside += 1;
                    }
                }
                Ok(inside as f64)
            }
            Shape::Ball { degenerate: true, .. } => Ok(0.0),
            Shape::Ball { center, radius, .. } => {
                let r = dist2(x, center).sqrt();
                Ok(if r <= *radius {
                    d as f64
                } else {
                    radius * (d as f64 - 1.0) / r
                })
            }
            Shape::HPolytope { halfspaces, .. } => {
                let sol = dykstra_solve(halfspaces, x, DykstraOptions::default())?;
                let mut active = Vec::new();
                let mut strong = Vec::new();
                for (h, mu) in halfspaces.iter().zip(&sol.multipliers) {
                    if h.slack(&sol.point) <= tol * (1.0 + h.offset.abs()) {
                        active.push(h);
                        if *mu > tol {
                            strong.push(h);
                        }
                    }
                }
                let rank = normal_rank(&active, tol);
                // a weakly active constraint that changes the rank means x
                // sits on the boundary between two face regions
                if rank != normal_rank(&strong, tol) {
                    return Err(Error::BoundaryCase);
                }
                Ok((d - rank) as f64)
            }
        }
    }

    /// Serializable description.
    pub fn to_spec(&self) -> BodySpec {
        BodySpec::from_body(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: BodySpec = serde_json::from_str(text).map_err(|e| Error::input(format!("body JSON: {e}")))?;
        spec.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("body spec serializes")
    }
}

fn project_ball(x: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let r = dist2(x, center).sqrt();
    if r <= radius {
        return x.to_vec();
    }
    let s = radius / r;
    x.iter().zip(center).map(|(xi, ci)| ci + s * (xi - ci)).collect()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Numerical rank of the normals by column-pivoted QR.
fn normal_rank(active: &[&Halfspace], tol: f64) -> usize {
    if active.is_empty() {
        return 0;
    }
    let d = active[0].normal.len();
    let m = DMatrix::from_fn(d, active.len(), |i, j| active[j].normal[i]);
    let r = m.col_piv_qr().r();
    let scale = r[(0, 0)].abs().max(1.0);
    let threshold = tol.max(1e-12) * scale;
    (0..r.nrows().min(r.ncols()))
        .filter(|&i| r[(i, i)].abs() > threshold)
        .count()
}

/// Upper bound on `max ‖x − c‖` over the polytope from its bounding box.
fn polytope_enclosing_radius(halfspaces: &[Halfspace], center: &[f64]) -> Result<f64> {
    let d = center.len();
    let rows: Vec<&[f64]> = halfspaces.iter().map(|h| h.normal.as_slice()).collect();
    let slacks: Vec<f64> = halfspaces.iter().map(|h| h.slack(center)).collect();
    let mut sum = 0.0;
    for i in 0..d {
        let mut extent: f64 = 0.0;
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; d];
            c[i] = sign;
            let v = lp::maximize(&rows, &slacks, &c)
                .ok_or_else(|| Error::Infeasible(format!("polytope is unbounded along coordinate {i}")))?;
            extent = extent.max(v.abs());
        }
        sum += extent * extent;
    }
    Ok(sum.sqrt() * (1.0 + 1e-9) + 1e-12)
}
