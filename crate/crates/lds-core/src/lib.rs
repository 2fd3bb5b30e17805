//! Construction and exact analysis of overloaded low-density spreading
//! matrices derived from finite projective planes.
//!
//! The pipeline: [`galois`] provides GF(q³) arithmetic and the trace map,
//! [`projective`] turns a field into a circulant point-line incidence matrix
//! and a quadric indicator vector, [`lds`] signs and assembles them into an
//! L x (L+2) spreading matrix with cross-correlations bounded by 1/(q+1),
//! and [`metrics`] computes the exact correlation and distance figures.
//! [`fixtures`] freezes golden data for orders 2 and 3 and the regression
//! checks over it.

pub mod fixtures;
pub mod galois;
pub mod lds;
pub mod metrics;
pub mod projective;
