//! C¹ spline quasi-interpolation on analysis-suitable G¹ (AS-G¹) planar
//! multi-patch domains.
//!
//! The crate is layered bottom-up:
//!
//! - [`splines`]: univariate B-spline spaces and exact spline algebra
//! - [`fields`]: target functions with mixed partial derivatives
//! - [`ritz1d`]: Ritz projectors, boundary bubbles and the endpoint projector
//! - [`geometry`]: multi-patch maps, topology and the JSON format
//! - [`gluing`]: gluing data recovery and AS-G¹ certification
//! - [`tensor`]: tensor-product splines and the projector `Q`
//! - [`asg1`]: the patch-local and global C¹ projectors
//! - [`norms`]: physical Sobolev error norms
//! - [`harness`]: convergence studies and the command line front end

pub mod asg1;
pub mod fields;
pub mod geometry;
pub mod gluing;
pub mod harness;
pub mod linalg;
pub mod norms;
pub mod quadrature;
pub mod ritz1d;
pub mod splines;
pub mod tensor;
