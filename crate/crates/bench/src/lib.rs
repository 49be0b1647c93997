// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the pipeline benchmarks.

use spherekit::curvature::build_profile;
use spherekit::{make_lp_norm, CurvatureProfile, NaturalCurve, Norm2D};

pub fn l4() -> Norm2D {
    make_lp_norm(4.0).expect("l4 is a valid norm")
}

pub fn l4_curve() -> NaturalCurve {
    NaturalCurve::build(&l4()).expect("l4 curve")
}

pub fn l4_profile(grid: usize) -> CurvatureProfile {
    build_profile(&l4(), grid).expect("l4 profile").0
}
