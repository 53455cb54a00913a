//! JSON body descriptions.
//!
//! ```json
//! {"kind": "box", "dim": 2, "center": [0, 0], "half_widths": [1, 1]}
//! {"kind": "ball", "dim": 3, "center": [0, 0, 0], "radius": 1.5}
//! {"kind": "point", "dim": 4}
//! {"kind": "hpolytope", "dim": 2, "normals": [[-1, 0], [0, -1], [1, 1]],
//!  "offsets": [0, 0, 1], "interior_point": [0.25, 0.25]}
//! ```
//!
//! `center` defaults to the origin. A box may give `sides`, or a scalar `side`
//! for a cube, instead of `half_widths`; without a `center` these build
//! `[0, s_1] × … × [0, s_d]`.

use serde::{Deserialize, Serialize};

use super::{ConvexBody, Shape};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Box {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_widths: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sides: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        side: Option<f64>,
    },
    Ball {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
    },
    Point {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    HPolytope {
        dim: usize,
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        interior_point: Vec<f64>,
    },
}

fn center_or_origin(dim: usize, center: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    match center {
        Some(c) if c.len() != dim => Err(Error::input(format!("center has length {}, dim is {dim}", c.len()))),
        Some(c) => Ok(c.clone()),
        None => Ok(vec![0.0; dim]),
    }
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Box {
                dim,
                center,
                half_widths,
                sides,
                side,
            } => {
                let half = match (half_widths, sides, side) {
                    (Some(h), None, None) => h.clone(),
                    (None, Some(s), None) => s.iter().map(|v| v / 2.0).collect(),
                    (None, None, Some(s)) => vec![s / 2.0; *dim],
                    _ => return Err(Error::input("box needs exactly one of half_widths, sides or side")),
                };
                if half.len() != *dim {
                    return Err(Error::input(format!("box widths have length {}, dim is {dim}", half.len())));
                }
                let center = match center {
                    Some(_) => center_or_origin(*dim, center)?,
                    // with `sides` or `side`, the box is [0, s_1] × … × [0, s_d]
                    None if half_widths.is_none() => half.clone(),
                    None => vec![0.0; *dim],
                };
                ConvexBody::new_box(center, half)
            }
            BodySpec::Ball { dim, center, radius } => ConvexBody::new_ball(center_or_origin(*dim, center)?, *radius),
            BodySpec::Point { dim, center } => ConvexBody::point(center_or_origin(*dim, center)?),
            BodySpec::HPolytope {
                dim,
                normals,
                offsets,
                interior_point,
            } => {
                if interior_point.len() != *dim {
                    return Err(Error::input("interior_point length differs from dim"));
                }
                ConvexBody::new_hpolytope(normals.clone(), offsets.clone(), interior_point.clone())
            }
        }
    }

    pub(super) fn from_body(body: &ConvexBody) -> BodySpec {
        let dim = body.dim();
        match body.shape() {
            Shape::Box { center, half_widths } => BodySpec::Box {
                dim,
                center: Some(center.clone()),
                half_widths: Some(half_widths.clone()),
                sides: None,
                side: None,
            },
            Shape::Ball {
                center,
                degenerate: true,
                ..
            } => BodySpec::Point {
                dim,
                center: Some(center.clone()),
            },
            Shape::Ball { center, radius, .. } => BodySpec::Ball {
                dim,
                center: Some(center.clone()),
                radius: *radius,
            },
            Shape::HPolytope {
                halfspaces,
                interior_point,
            } => BodySpec::HPolytope {
                dim,
                normals: halfspaces.iter().map(|h| h.normal.clone()).collect(),
                offsets: halfspaces.iter().map(|h| h.offset).collect(),
                interior_point: interior_point.clone(),
            },
        }
    }
}
