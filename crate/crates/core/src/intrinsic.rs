// SPDX-License-Identifier: Apache-2.0

//! Intrinsic (chain) distance along sampled arcs of a sphere.
//!
//! On an arc the cheapest eps-chain between two samples walks through the
//! consecutive samples in order, so its length is the sum of consecutive
//! chords. A shortest-path search over the eps-graph is kept as an
//! independent check on small arcs.

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::norm::Norm2D;
use crate::sphere_param::NaturalCurve;

/// Samples of the coarsest refinement level.
pub const BASE_SEGMENTS: usize = 32;
/// Largest refinement level accepted by [`verify_natural_isometry`].
pub const MAX_LEVELS: u32 = 6;
/// Largest arc handed to the shortest-path cross-check.
pub const MAX_DIJKSTRA_SAMPLES: usize = 2000;
/// The eps used by [`verify_natural_isometry`], as a multiple of the
/// longest consecutive chord.
pub const EPS_FACTOR: f64 = 1.5;

/// Ordered samples of `r` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct SampledArc {
    pub points: Vec<Vec2>,
    pub params: Vec<f64>,
    pub norm: Norm2D,
}

impl SampledArc {
    pub fn new(points: Vec<Vec2>, params: Vec<f64>, norm: Norm2D) -> Result<Self> {
        if points.len() != params.len() || points.len() < 2 {
            return Err(Error::InvalidParameter(
                "an arc needs at least two samples with matching parameters".into(),
            ));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "arc parameters must be strictly increasing".into(),
            ));
        }
        let arc = Self {
            points,
            params,
            norm,
        };
        for k in 0..arc.len() - 1 {
            let gap = arc.params[k + 1] - arc.params[k];
            if arc.chord(k, k + 1) > gap + 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "chord {} exceeds parameter gap {gap} at sample {k}",
                    arc.chord(k, k + 1)
                )));
            }
        }
        Ok(arc)
    }

    /// `segments + 1` samples of the natural parameterization, uniform in `s`.
    pub fn from_curve(curve: &NaturalCurve, a: f64, b: f64, segments: usize) -> Result<Self> {
        if !(b > a) || segments == 0 {
            return Err(Error::InvalidParameter(
                "arc needs b > a and at least one segment".into(),
            ));
        }
        let params: Vec<f64> = (0..=segments)
            .map(|k| a + (b - a) * k as f64 / segments as f64)
            .collect();
        let points = params.iter().map(|&s| curve.point(s)).collect();
        Self::new(points, params, curve.norm().clone())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn chord(&self, i: usize, j: usize) -> f64 {
        self.norm.eval(self.points[i] - self.points[j])
    }

    pub fn max_step_chord(&self) -> f64 {
        (0..self.len() - 1)
            .map(|k| self.chord(k, k + 1))
            .fold(0.0, f64::max)
    }

    fn chain(&self, lo: usize, hi: usize, stride: usize) -> f64 {
        let mut acc = 0.0;
        let mut k = lo;
        while k < hi {
            let next = (k + stride).min(hi);
            acc += self.chord(k, next);
            k = next;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicResult {
    pub d_eps: f64,
    pub eps: f64,
    /// The chain through every other sample differs by less than `1e-8`.
    pub converged: bool,
}

/// Length of the monotone eps-chain from sample `i` to sample `j`.
pub fn intrinsic_distance(
    arc: &SampledArc,
    i: usize,
    j: usize,
    eps: f64,
) -> Result<IntrinsicResult> {
    if i >= arc.len() || j >= arc.len() {
        return Err(Error::InvalidParameter(format!(
            "sample index out of range for an arc of {} samples",
            arc.len()
        )));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    for k in lo..hi {
        let c = arc.chord(k, k + 1);
        if !(c < eps) {
            return Err(Error::ResolutionError { eps, chord: c });
        }
    }
    let d = arc.chain(lo, hi, 1);
    let coarse = arc.chain(lo, hi, 2);
    Ok(IntrinsicResult {
        d_eps: d,
        eps,
        converged: (d - coarse).abs() < 1e-8,
    })
}

/// Shortest path from `i` to `j` in the graph joining samples whose chord
/// is below `eps`.
pub fn dijkstra_distance(arc: &SampledArc, i: usize, j: usize, eps: f64) -> Result<f64> {
    let n = arc.len();
    if n > MAX_DIJKSTRA_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "shortest-path check limited to {MAX_DIJKSTRA_SAMPLES} samples, got {n}"
        )));
    }
    if i >= n || j >= n {
        return Err(Error::InvalidParameter("sample index out of range".into()));
    }
    let mut graph: UnGraph<(), f64> = UnGraph::with_capacity(n, 4 * n);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
    for a in 0..n {
        for b in a + 1..n {
            let c = arc.chord(a, b);
            if c < eps {
                graph.add_edge(nodes[a], nodes[b], c);
            }
        }
    }
    let dist = dijkstra(&graph, nodes[i], Some(nodes[j]), |e| *e.weight());
    dist.get(&nodes[j]).copied().ok_or(Error::ResolutionError {
        eps,
        chord: arc.chord(i, j),
    })
}

/// Result of [`verify_natural_isometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalIsometryCheck {
    /// `| d(r(a), r(b)) - |a - b| |` at the finest level.
    pub residual: f64,
    /// Chain length at each level, coarsest first.
    pub distances: Vec<f64>,
    pub converged: bool,
}

/// Compares the chain distance between `r(a)` and `r(b)` with `|a - b|`
/// over dyadic refinements `32, 64, ..., 32 * 2^levels` segments.
pub fn verify_natural_isometry(
    curve: &NaturalCurve,
    a: f64,
    b: f64,
    levels: u32,
) -> Result<NaturalIsometryCheck> {
    if levels > MAX_LEVELS {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_LEVELS} refinement levels, got {levels}"
        )));
    }
    let (lo, hi) = (a.min(b), a.max(b));
    if hi - lo > 2.0 * curve.half_length() - 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "arc length {} must stay below 2L - 1e-6 = {}",
            hi - lo,
            2.0 * curve.half_length() - 1e-6
        )));
    }
    if hi == lo {
        return Ok(NaturalIsometryCheck {
            residual: 0.0,
            distances: vec![0.0],
            converged: true,
        });
    }
    let mut distances = Vec::with_capacity(levels as usize + 1);
    let mut converged = false;
    for level in 0..=levels {
        let arc = SampledArc::from_curve(curve, lo, hi, BASE_SEGMENTS << level)?;
        let eps = EPS_FACTOR * arc.max_step_chord();
        let res = intrinsic_distance(&arc, 0, arc.len() - 1, eps)?;
        distances.push(res.d_eps);
        converged = res.converged;
    }
    let finest = distances[distances.len() - 1];
    Ok(NaturalIsometryCheck {
        residual: (finest - (hi - lo)).abs(),
        distances,
        converged,
    })
}

/// Seeded pairs `(a, b)` with `a` uniform in `[0, 2L)` and `|a - b| <= L`.
pub fn random_pairs(seed: u64, count: usize, half_length: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.gen_range(0.0..2.0 * half_length);
            let d = rng.gen_range(-half_length..=half_length);
            (a, a + d)
        })
        .collect()
}
