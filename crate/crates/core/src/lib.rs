//! Pricing and calibration for recovery swaps, digital default swaps (DDS)
//! and conventional CDS, priced consistently under the static replication
//! that ties the three together.

// Validation is written as `!(x < bound)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod convexity;
pub mod curves;
pub mod error;
pub mod market;
pub mod pricing;
pub mod quadrature;
pub mod replication;
pub mod solver;

pub use calibration::{bootstrap_hazard, par_cds_spread, CalibrationReport, CdsQuote};
pub use curves::{
    protection_integral, risky_annuity, DiscountCurve, HazardCurve, LegIntegrals, TimeGrid,
};
pub use error::{Error, Result};
