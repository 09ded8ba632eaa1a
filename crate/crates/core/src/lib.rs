//! Exact-arithmetic engine for intersection numbers, slopes, cohomology and
//! Ext dimensions, stability verdicts and deformation bookkeeping of
//! tautological sheaves on Hilbert schemes of points on a surface, and of
//! their restrictions to Kummer surfaces and four-dimensional generalised
//! Kummer varieties.
//!
//! Every scalar is an exact rational ([`rat::Rat`]); asymptotic slope
//! expansions in the polarisation parameter N are polynomials with an
//! explicit validity floor ([`npoly::NPoly`]). Formula-engine results
//! (`lattice`, `taut`, `stability`, `deform`) are cross-checked against
//! independent brute-force cohomology models (`torus`, `even`) by the
//! [`verify`] suite.

pub mod even;
pub mod expr;
pub mod graded;
pub mod lattice;
pub mod npoly;
pub mod rat;
pub mod stability;
pub mod taut;
pub mod torus;
pub mod verify;
pub mod workers;

pub mod deform;

pub use graded::GradedDims;
pub use npoly::{LeadingOrder, NPoly};
pub use rat::Rat;
