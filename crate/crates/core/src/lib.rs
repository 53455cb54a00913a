//! Numerical laboratory for intrinsic volumes and the Hadwiger–Wills density.
//!
//! A convex body `K ⊂ R^d` induces the density `x ↦ e^{-π dist²(x, K)} / W(K)`
//! where `W(K) = Σ_k v_k(K)` is the Wills functional. The crate computes exact
//! intrinsic-volume profiles, samples the density and its information content
//! `H_K = π dist²(X_K, K)`, and measures how close the standardized `H_K` is to
//! a standard Gaussian, together with the Stein-type bound `A_K + B_K`.
//!
//! Modules:
//! - [`bodies`]: boxes, balls and H-polytopes with metric projection.
//! - [`intrinsic`]: intrinsic-volume profiles, the `V_K` law, ultra
//!   log-concavity and the surface law `p(s)`.
//! - [`sampling`]: reproducible draws of `X_K` and `H_K`.
//! - [`volumetry`]: Monte Carlo parallel volumes and Steiner fits.
//! - [`stein`]: estimators for the bound components and its ingredients.
//! - [`cltlab`]: distances to the Gaussian and rate fits over dimension grids.

pub mod bodies;
pub mod cltlab;
mod error;
pub mod intrinsic;
pub mod par;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod stats;
pub mod stein;
pub mod volumetry;

pub use bodies::{ConvexBody, FaceDim, Halfspace, ProjectionResult, Shape};
pub use error::{Error, Result};
pub use intrinsic::{DiscreteLaw, IntrinsicProfile, MomentSummary, SurfaceLaw};
pub use rng::SeedSpec;
pub use sampling::SampleBatch;
