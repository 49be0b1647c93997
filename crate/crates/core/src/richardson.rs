// SPDX-License-Identifier: Apache-2.0

//! Richardson extrapolation of step-size dependent estimates.

/// One Richardson step for estimates `f1 = f(h1)`, `f2 = f(h2)` whose error
/// behaves like `K h^order`. Works for any ratio `h1 / h2`.
pub fn extrapolate_pair(h1: f64, f1: f64, h2: f64, f2: f64, order: u32) -> f64 {
    let w1 = h1.abs().powi(order as i32);
    let w2 = h2.abs().powi(order as i32);
    if w1 == w2 {
        return f2;
    }
    (w1 * f2 - w2 * f1) / (w1 - w2)
}

/// Extrapolates each consecutive pair of a schedule. Returns one value fewer
/// than the input; the last entry uses the two finest steps.
pub fn extrapolate_schedule(steps: &[f64], values: &[f64], order: u32) -> Vec<f64> {
    steps
        .windows(2)
        .zip(values.windows(2))
        .map(|(h, f)| extrapolate_pair(h[0], f[0], h[1], f[1], order))
        .collect()
}
