// SPDX-License-Identifier: Apache-2.0

//! Intrinsic geometry of the unit sphere of a smooth normed plane.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod estimator;
pub mod interp;
pub mod intrinsic;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod norm;
pub mod quadrature;
pub mod reconstruct;
pub mod richardson;
pub mod sphere_param;

pub use curvature::{CurvatureProfile, SuperCurvature};
pub use error::{Error, Result};
pub use estimator::{
    CurveOracle, DistanceOracle, EstimateProfile, EstimatorOptions, SampledOracle,
};
pub use intrinsic::{IntrinsicResult, SampledArc};
pub use io::NormSpec;
pub use linalg::{Covec2, Mat2, Vec2};
pub use norm::{make_lp_norm, make_radial_norm, Basis2D, Norm2D, NormConstants, Smoothness};
pub use reconstruct::{IsometryReport, ReconstructedCurve};
pub use sphere_param::{ArcLengthTable, NaturalCurve, PhaseShift, PolarCurve};
