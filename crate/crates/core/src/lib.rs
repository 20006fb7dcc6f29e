//! Integrals of additive rectangle functions over Jordan regions.
//!
//! A function of axis-parallel rectangles that is finitely additive on
//! non-overlapping rectangles has an unambiguous value on every figure (a
//! finite union of such rectangles). Its integral over a Jordan measurable
//! region is the common limit of its values on figures inside the region and
//! figures covering it as the partition is refined.
//!
//! Taking the rectangle function to be the circulation `∮ P dx + Q dy` around
//! the rectangle turns Green's theorem into an equality between that integral
//! and the line integral along the region's boundary, with no derivative of
//! `(P, Q)` involved. The [`verify`] module checks the equality numerically,
//! including for Weierstrass-type fields that are nowhere differentiable; the
//! [`gauss3d`] module does the same for flux through closed surfaces.

pub mod cli;
pub mod error;
pub mod fields;
pub mod gauss3d;
pub mod geom2d;
pub mod integral;
pub mod quadrature;
pub mod rectfn;
pub mod region2d;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
