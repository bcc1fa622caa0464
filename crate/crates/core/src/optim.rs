//! Grid search for grip parameters over a measured stiffness map.
//!
//! A candidate grip is a (pressure, offset) point of the map plus the object
//! radius and the rotation axis under study. Rotation about x pairs
//! `k_n = k_y` with `k_t = k_z`; rotation about z pairs `k_n = k_y` with
//! `k_t = k_x`.
//!
//! The map's `f_y` is the normal force of a single finger. With both fingers
//! loading the object, the model preload is `finger_count_share * f_y`, so a
//! grip stays stable while `f_y < k_t r / finger_count_share`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::grasp::GraspConfig;
use crate::stability::{analyze, StabilityReport};
use crate::stiffness::{StiffnessMap, StiffnessSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Axis {
    #[cfg_attr(feature = "serde", serde(rename = "x-instability", alias = "x"))]
    X,
    #[cfg_attr(feature = "serde", serde(rename = "z-instability", alias = "z"))]
    Z,
}

impl Axis {
    /// `(k_n, k_t)` for rotation about this axis.
    pub fn stiffness_pair(self, s: &StiffnessSample) -> (f64, f64) {
        match self {
            Axis::X => (s.k_y, s.k_z),
            Axis::Z => (s.k_y, s.k_x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GripCandidate {
    /// Pa
    pub pressure: f64,
    /// m
    pub offset: f64,
    /// m
    pub object_radius: f64,
    pub axis: Axis,
}

/// Object and grip properties that are not part of the finger map.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GripContext {
    pub mu: f64,
    /// kg·m²
    pub inertia: f64,
    /// Number of fingers sharing the measured per-finger preload.
    pub finger_count_share: f64,
}

impl GripContext {
    pub fn new(mu: f64, inertia: f64) -> Self {
        GripContext {
            mu,
            inertia,
            finger_count_share: 2.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.finger_count_share.is_finite() && self.finger_count_share > 0.0) {
            return Err(Error::InvalidParameter {
                name: "finger_count_share",
                reason: "must be finite and > 0",
            });
        }
        Ok(())
    }
}

/// Largest per-finger preload that keeps the grip stable: `k_t r / share`.
pub fn grip_force_bound(k_t: f64, r: f64, finger_count_share: f64) -> f64 {
    k_t * r / finger_count_share
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CandidateVerdict {
    pub candidate: GripCandidate,
    /// Per-finger preload from the map (N).
    pub f_y: f64,
    /// Model preload `finger_count_share * f_y` (N).
    pub f_p: f64,
    /// N
    pub f_p_i: f64,
    /// Per-finger preload at the stability limit (N).
    pub f_y_limit: f64,
    /// `f_p_i − f_p` (N); positive exactly when stable.
    pub margin: f64,
    pub stable: bool,
    pub slip_preload: Option<f64>,
    pub report: StabilityReport,
}

/// Builds the grasp model for a candidate from interpolated map values.
pub fn candidate_config(
    map: &StiffnessMap,
    candidate: &GripCandidate,
    ctx: &GripContext,
) -> Result<(StiffnessSample, GraspConfig)> {
    ctx.validate()?;
    let sample = map.query(candidate.pressure, candidate.offset)?;
    let (k_n, k_t) = candidate.axis.stiffness_pair(&sample);
    if !(k_n > 0.0) {
        return Err(Error::InvalidParameter {
            name: "k_n",
            reason: "map stiffness along the grasp normal must be > 0",
        });
    }
    let f_p = ctx.finger_count_share * sample.f_y;
    let config = GraspConfig::new(k_n, k_t, f_p / k_n, candidate.object_radius, ctx.inertia, ctx.mu)?;
    Ok((sample, config))
}

pub fn evaluate_candidate(
    map: &StiffnessMap,
    candidate: &GripCandidate,
    ctx: &GripContext,
) -> Result<CandidateVerdict> {
    let (sample, config) = candidate_config(map, candidate, ctx)?;
    let report = analyze(&config);
    Ok(CandidateVerdict {
        candidate: *candidate,
        f_y: sample.f_y,
        f_p: report.f_p,
        f_p_i: report.f_p_i,
        f_y_limit: grip_force_bound(config.k_t, config.r, ctx.finger_count_share),
        margin: report.f_p_i - report.f_p,
        stable: report.stable,
        slip_preload: report.slip_preload,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum Objective {
    /// Stable grips, largest stability margin first.
    MaxMargin,
    /// Stable grips, largest per-finger preload first.
    MaxPreloadStable,
    /// Grips that either stay stable or come to rest without slipping,
    /// largest per-finger preload first.
    MaxPreloadNoSlip,
}

impl Objective {
    pub fn is_feasible(self, v: &CandidateVerdict) -> bool {
        match self {
            Objective::MaxMargin | Objective::MaxPreloadStable => v.stable,
            Objective::MaxPreloadNoSlip => {
                v.stable || (v.report.rest_angle.is_some() && v.report.slips_at_rest == Some(false))
            }
        }
    }

    pub fn score(self, v: &CandidateVerdict) -> f64 {
        match self {
            Objective::MaxMargin => v.margin,
            Objective::MaxPreloadStable | Objective::MaxPreloadNoSlip => v.f_y,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizationResult {
    pub objective: Objective,
    /// False when no candidate satisfies the objective's constraint; `best`
    /// is then the least-violating candidate.
    pub feasible: bool,
    pub best: CandidateVerdict,
    /// Feasible candidates by descending score, then infeasible ones by
    /// descending margin. Ties go to the smaller pressure, then offset.
    pub ranked: Vec<CandidateVerdict>,
}

/// Axis values with `refine − 1` extra points inserted in every cell.
fn refined_axis(knots: &[f64], refine: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity((knots.len().saturating_sub(1)) * refine + 1);
    for w in knots.windows(2) {
        for k in 0..refine {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / refine as f64);
        }
    }
    if let Some(&last) = knots.last() {
        out.push(last);
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || lo == hi {
        return alloc::vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn evaluate_grid(
    map: &StiffnessMap,
    pressures: &[f64],
    offsets: &[f64],
    radius: f64,
    axis: Axis,
    ctx: &GripContext,
) -> Result<Vec<CandidateVerdict>> {
    let mut out = Vec::with_capacity(pressures.len() * offsets.len());
    for &pressure in pressures {
        for &offset in offsets {
            let candidate = GripCandidate {
                pressure,
                offset,
                object_radius: radius,
                axis,
            };
            out.push(evaluate_candidate(map, &candidate, ctx)?);
        }
    }
    Ok(out)
}

/// Evaluates an evenly spaced `n_pressure × n_offset` grid spanning the map,
/// pressure-major. An axis with a single map value yields a single point.
pub fn feasible_region(
    map: &StiffnessMap,
    radius: f64,
    axis: Axis,
    ctx: &GripContext,
    n_pressure: usize,
    n_offset: usize,
) -> Result<Vec<CandidateVerdict>> {
    if n_pressure == 0 || n_offset == 0 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "resolution must be >= 1",
        });
    }
    let span = |axis: &[f64], n| linspace(axis[0], axis[axis.len() - 1], n);
    evaluate_grid(
        map,
        &span(map.pressures(), n_pressure),
        &span(map.offsets(), n_offset),
        radius,
        axis,
        ctx,
    )
}

fn key_order(a: &CandidateVerdict, b: &CandidateVerdict) -> Ordering {
    a.candidate
        .pressure
        .total_cmp(&b.candidate.pressure)
        .then(a.candidate.offset.total_cmp(&b.candidate.offset))
}

/// Exhaustive search over the map grid, each cell subdivided `refine` times
/// by interpolation (`refine = 1` visits the grid points only).
pub fn max_stable_preload(
    map: &StiffnessMap,
    radius: f64,
    axis: Axis,
    ctx: &GripContext,
    objective: Objective,
    refine: usize,
) -> Result<OptimizationResult> {
    if refine == 0 {
        return Err(Error::InvalidParameter {
            name: "refine",
            reason: "must be >= 1",
        });
    }
    let mut ranked = evaluate_grid(
        map,
        &refined_axis(map.pressures(), refine),
        &refined_axis(map.offsets(), refine),
        radius,
        axis,
        ctx,
    )?;
    ranked.sort_by(|a, b| {
        let (fa, fb) = (objective.is_feasible(a), objective.is_feasible(b));
        let by_value = match (fa, fb) {
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (true, true) => objective.score(b).total_cmp(&objective.score(a)),
            (false, false) => b.margin.total_cmp(&a.margin),
        };
        by_value.then_with(|| key_order(a, b))
    });
    let best = ranked[0];
    Ok(OptimizationResult {
        objective,
        feasible: objective.is_feasible(&best),
        best,
        ranked,
    })
}
