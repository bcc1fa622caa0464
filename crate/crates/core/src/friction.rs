//! Friction identification from constant-velocity sliding traces.
//!
//! A fingertip dragged across a surface shows three phases in the transverse
//! force: an elastic stick ramp whose slope is the bulk stiffness `k_y`, a
//! transition, and steady sliding where `f_t/f_n` settles at `μ`. The normal
//! force is `√(f_x² + f_z²)` and the transverse force is `f_y`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result, SegmentationFailure};
use crate::grasp::ContactForces;
use crate::math::{linear_fit, log, sqrt};

/// Band of friction coefficients observed across grasp conditions.
pub const MU_ENVELOPE: (f64, f64) = (0.49, 0.77);
/// Nominal friction coefficient of the reference surface.
pub const MU_REFERENCE: f64 = 0.6;

/// One force/torque sensor reading.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceSample {
    /// s
    pub t: f64,
    /// Commanded robot travel (m).
    pub displacement: f64,
    /// N
    pub f_x: f64,
    /// N
    pub f_y: f64,
    /// N
    pub f_z: f64,
}

/// Experiment conditions attached to a trace, in SI units.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceMetadata {
    /// Pa
    pub pressure: Option<f64>,
    /// m²
    pub contact_area: Option<f64>,
    /// m
    pub h_offset: Option<f64>,
    /// m
    pub v_offset: Option<f64>,
    pub material: Option<String>,
}

/// A validated force trace: strictly increasing time, non-decreasing
/// displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceTrace {
    samples: Vec<TraceSample>,
    pub metadata: TraceMetadata,
}

impl ForceTrace {
    pub fn new(samples: Vec<TraceSample>, metadata: TraceMetadata) -> Result<Self> {
        for (index, s) in samples.iter().enumerate() {
            let finite = [s.t, s.displacement, s.f_x, s.f_y, s.f_z]
                .iter()
                .all(|v| v.is_finite());
            if !finite {
                return Err(Error::InvalidParameter {
                    name: "trace sample",
                    reason: "must be finite",
                });
            }
            if index > 0 {
                let prev = &samples[index - 1];
                if s.t <= prev.t {
                    return Err(Error::NonMonotoneTime { index });
                }
                if s.displacement < prev.displacement {
                    return Err(Error::DecreasingDisplacement { index });
                }
            }
        }
        Ok(ForceTrace { samples, metadata })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Copy with every force channel multiplied by `factor`.
    pub fn scaled_forces(&self, factor: f64) -> ForceTrace {
        ForceTrace {
            samples: self
                .samples
                .iter()
                .map(|s| TraceSample {
                    f_x: s.f_x * factor,
                    f_y: s.f_y * factor,
                    f_z: s.f_z * factor,
                    ..*s
                })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }
}

/// Splits a sensor reading into normal and transverse load.
///
/// `f_z` comes from asymmetric contact pressure, so it counts toward the
/// normal force and never toward friction.
pub fn resolve_forces(sample: &TraceSample) -> ContactForces {
    ContactForces {
        f_n: sqrt(sample.f_x * sample.f_x + sample.f_z * sample.f_z),
        f_t: sample.f_y,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum Phase {
    Stick,
    Transition,
    Slide,
}

/// Tuning knobs of [`segment_phases_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationOptions {
    /// Centered moving-average width applied to `f_t` before fitting.
    pub smoothing_window: usize,
    /// A transition whose slope keeps this share of the early stick slope is
    /// merged into the stick phase.
    pub stick_ratio: f64,
    /// Slopes at or below this share of the early stick slope count as
    /// sliding.
    pub slide_ratio: f64,
    /// Leading share of the stick samples used for the early-window slope.
    pub early_fraction: f64,
    /// Minimum samples in the stick and slide phases.
    pub min_segment: usize,
    /// The stick rise must exceed this many residual RMS values.
    pub min_rise_sigmas: f64,
}

impl Default for SegmentationOptions {
    fn default() -> Self {
        SegmentationOptions {
            smoothing_window: 5,
            stick_ratio: 0.8,
            slide_ratio: 0.1,
            early_fraction: 0.25,
            min_segment: 3,
            min_rise_sigmas: 5.0,
        }
    }
}

/// Stick/transition/slide split of a trace.
///
/// Samples `motion_start..=stick_end` are stick, samples from `slide_start`
/// on are slide (when `slide_start == stick_end` the shared knot belongs to
/// the stick phase), the rest is transition. Samples before `motion_start`
/// were recorded before the robot moved and are counted as stick.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseSegmentation {
    /// End of the stick phase, `T_m` (s).
    pub t_stick_end: f64,
    /// Start of steady sliding, `T_s` (s).
    pub t_slide_start: f64,
    pub motion_start: usize,
    pub stick_end: usize,
    pub slide_start: usize,
    pub len: usize,
    /// `+1` or `−1`, orienting `f_y` so that loading is positive.
    pub force_sign: f64,
    /// Early-window stick slope of the oriented, smoothed `f_t` (N/m).
    pub reference_slope: f64,
    /// RMS residual of the piecewise-linear fit (N).
    pub fit_rms: f64,
}

impl PhaseSegmentation {
    pub fn phase(&self, index: usize) -> Phase {
        if index <= self.stick_end {
            Phase::Stick
        } else if index < self.slide_start {
            Phase::Transition
        } else {
            Phase::Slide
        }
    }

    pub fn phases(&self) -> Vec<Phase> {
        (0..self.len).map(|i| self.phase(i)).collect()
    }

    /// First sample of the slide window.
    pub fn slide_first(&self) -> usize {
        if self.slide_start > self.stick_end {
            self.slide_start
        } else {
            self.stick_end + 1
        }
    }
}

/// Identified friction and stiffness parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrictionFit {
    /// Mean of pointwise `f_t/f_n` over the slide window.
    pub mu: f64,
    /// `mean(f_t)/mean(f_n)` over the slide window.
    pub mu_ratio_of_means: f64,
    /// Least-squares stick slope of `f_t` against displacement (N/m).
    pub k_y: f64,
    /// N
    pub stick_residual_rms: f64,
    pub slide_ratio_std: f64,
    /// N
    pub mean_normal_force: f64,
    pub mu_reference: f64,
    pub mu_in_envelope: bool,
    pub segmentation: PhaseSegmentation,
}

fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    if half == 0 {
        return values.to_vec();
    }
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Continuous piecewise-linear least-squares fit with knots at the given
/// sample indices.
struct PiecewiseFit {
    knots: [usize; 2],
    /// Coefficients of `1, u, (u − u_k)₊` for each knot `k`.
    coef: [f64; 4],
    sse: f64,
}

impl PiecewiseFit {
    /// Slope of each piece, in units of force per unit `u`.
    fn slopes(&self, pieces: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut acc = 0.0;
        for (p, slot) in out.iter_mut().enumerate().take(pieces) {
            acc += self.coef[p + 1];
            *slot = acc;
        }
        out
    }
}

struct SuffixSums {
    count: Vec<f64>,
    u: Vec<f64>,
    uu: Vec<f64>,
    y: Vec<f64>,
    uy: Vec<f64>,
    yy: f64,
}

impl SuffixSums {
    fn new(u: &[f64], y: &[f64]) -> Self {
        let n = u.len();
        let mut s = SuffixSums {
            count: alloc::vec![0.0; n + 1],
            u: alloc::vec![0.0; n + 1],
            uu: alloc::vec![0.0; n + 1],
            y: alloc::vec![0.0; n + 1],
            uy: alloc::vec![0.0; n + 1],
            yy: y.iter().map(|v| v * v).sum(),
        };
        for k in (0..n).rev() {
            s.count[k] = s.count[k + 1] + 1.0;
            s.u[k] = s.u[k + 1] + u[k];
            s.uu[k] = s.uu[k + 1] + u[k] * u[k];
            s.y[k] = s.y[k + 1] + y[k];
            s.uy[k] = s.uy[k + 1] + u[k] * y[k];
        }
        s
    }

    /// Solves the normal equations for one or two knots in O(1).
    fn fit(&self, u: &[f64], knots: &[usize]) -> Option<([f64; 4], f64)> {
        let size = knots.len() + 2;
        let mut m = [[0.0; 4]; 4];
        let mut rhs = [0.0; 4];
        m[0][0] = self.count[0];
        m[0][1] = self.u[0];
        m[1][1] = self.uu[0];
        rhs[0] = self.y[0];
        rhs[1] = self.uy[0];
        for (p, &kp) in knots.iter().enumerate() {
            let a = u[kp];
            m[0][p + 2] = self.u[kp] - a * self.count[kp];
            m[1][p + 2] = self.uu[kp] - a * self.u[kp];
            rhs[p + 2] = self.uy[kp] - a * self.y[kp];
            for (q, &kq) in knots.iter().enumerate().skip(p) {
                let b = u[kq];
                let s = kp.max(kq);
                m[p + 2][q + 2] = self.uu[s] - (a + b) * self.u[s] + a * b * self.count[s];
            }
        }
        for r in 0..size {
            for c in 0..r {
                m[r][c] = m[c][r];
            }
        }
        let coef = solve(&mut m, rhs, size)?;
        let explained: f64 = coef.iter().zip(&rhs).map(|(c, r)| c * r).sum();
        Some((coef, (self.yy - explained).max(0.0)))
    }
}

/// Gaussian elimination with partial pivoting on the leading `size × size`
/// block.
fn solve(m: &mut [[f64; 4]; 4], mut rhs: [f64; 4], size: usize) -> Option<[f64; 4]> {
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..size {
        let pivot = (col..size).max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))?;
        if m[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..size {
            let factor = m[row][col] / m[col][col];
            for k in col..size {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..size).rev() {
        let tail: f64 = (row + 1..size).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}

/// Knot positions are restricted so that the first and last pieces span at
/// least `min_segment` samples.
struct KnotSearch<'a> {
    u: &'a [f64],
    sums: SuffixSums,
    first: usize,
    last: usize,
}

impl<'a> KnotSearch<'a> {
    fn new(u: &'a [f64], y: &[f64], min_segment: usize) -> Option<Self> {
        let first = min_segment.saturating_sub(1);
        let last = u.len().checked_sub(min_segment)?;
        (last > first).then(|| KnotSearch {
            u,
            sums: SuffixSums::new(u, y),
            first,
            last,
        })
    }

    fn try_knots(&self, knots: &[usize], best: &mut Option<PiecewiseFit>) {
        let inside = knots.iter().all(|&k| (self.first..=self.last).contains(&k));
        if !inside || knots.windows(2).any(|w| self.u[w[1]] - self.u[w[0]] <= 1e-12) {
            return;
        }
        if let Some((coef, sse)) = self.sums.fit(self.u, knots) {
            if best.as_ref().is_none_or(|b| sse < b.sse) {
                let mut stored = [0; 2];
                stored[..knots.len()].copy_from_slice(knots);
                *best = Some(PiecewiseFit {
                    knots: stored,
                    coef,
                    sse,
                });
            }
        }
    }

    /// Ramp plus plateau: every knot position is tried.
    fn two_pieces(&self) -> Option<PiecewiseFit> {
        let mut best = None;
        for k in self.first..=self.last {
            self.try_knots(&[k], &mut best);
        }
        best
    }

    /// Ramp, transition, plateau: a coarse grid over knot pairs, then full
    /// resolution around the coarse optimum.
    fn three_pieces(&self) -> Option<PiecewiseFit> {
        let stride = (self.u.len() / 300).max(1);
        let mut best = None;
        let mut i = self.first;
        while i < self.last {
            let mut j = i + stride;
            while j <= self.last {
                self.try_knots(&[i, j], &mut best);
                j += stride;
            }
            self.try_knots(&[i, self.last], &mut best);
            i += stride;
        }
        let radius = stride.max(2);
        for _ in 0..8 {
            let [ci, cj] = best.as_ref()?.knots;
            for i in ci.saturating_sub(radius)..=ci + radius {
                for j in cj.saturating_sub(radius)..=cj + radius {
                    self.try_knots(&[i, j], &mut best);
                }
            }
            if best.as_ref()?.knots == [ci, cj] {
                break;
            }
        }
        best
    }
}

/// [`segment_phases_with`] using the default options.
pub fn segment_phases(trace: &ForceTrace) -> Result<PhaseSegmentation> {
    segment_phases_with(trace, &SegmentationOptions::default())
}

/// Splits a trace into stick, transition and slide phases.
///
/// The transverse force is fitted against displacement with continuous
/// piecewise-linear models: a ramp-plus-plateau fit, and a three-piece fit
/// that is kept only when the extra piece pays for itself in residual
/// (`n ln(SSE₂/SSE₃) > 3 ln n`). The reference slope is read from the
/// smoothed force over the leading `early_fraction` of the ramp. Against it,
/// a middle piece keeping at least `stick_ratio` joins the stick phase, one
/// at or below `slide_ratio` joins the slide phase, and the final piece must
/// be flat to within `slide_ratio`.
pub fn segment_phases_with(trace: &ForceTrace, opts: &SegmentationOptions) -> Result<PhaseSegmentation> {
    let samples = trace.samples();
    let fail = |why| Err(Error::Segmentation(why));
    if samples.is_empty() {
        return fail(SegmentationFailure::TooShort);
    }
    let x0 = samples[0].displacement;
    let motion_start = samples
        .iter()
        .position(|s| s.displacement > x0)
        .map_or(samples.len(), |p| p - 1);
    let region = &samples[motion_start..];
    let min_segment = opts.min_segment.max(2);
    if region.len() < 2 * min_segment + 2 {
        return fail(SegmentationFailure::TooShort);
    }

    let x: Vec<f64> = region.iter().map(|s| s.displacement).collect();
    let span = x[x.len() - 1] - x[0];
    let u: Vec<f64> = x.iter().map(|v| (v - x[0]) / span).collect();
    let raw: Vec<f64> = region.iter().map(|s| s.f_y).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let smooth = moving_average(&raw, opts.smoothing_window);

    let search = match KnotSearch::new(&u, &centered, min_segment) {
        Some(search) => search,
        None => return fail(SegmentationFailure::TooShort),
    };
    let (Some(two), Some(three)) = (search.two_pieces(), search.three_pieces()) else {
        return fail(SegmentationFailure::TooShort);
    };
    let n = u.len() as f64;
    let negligible = 1e-20 * search.sums.yy;
    let gain = if two.sse <= negligible {
        0.0
    } else if three.sse <= negligible {
        f64::INFINITY
    } else {
        n * log(two.sse / three.sse)
    };
    let use_three = gain > 3.0 * log(n);
    let (fit, pieces) = if use_three { (&three, 3) } else { (&two, 2) };
    let rms = sqrt(fit.sse / n);

    let ramp_end = two.knots[0];
    let early = ((opts.early_fraction * (ramp_end + 1) as f64) as usize)
        .max(5)
        .min(ramp_end + 1);
    let reference = linear_fit(&x[..early], &smooth[..early]).map_or(0.0, |(slope, _)| slope);
    let sign = if reference < 0.0 { -1.0 } else { 1.0 };
    let reference = reference * sign;

    let slopes = fit.slopes(pieces).map(|s| sign * s / span);
    let stick_slope = slopes[0];
    let slide_slope = slopes[pieces - 1];

    let rise = stick_slope * (x[fit.knots[0]] - x[0]);
    let magnitude = raw.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let rise_floor = (opts.min_rise_sigmas * rms).max(1e-6 * magnitude);
    if !(reference > 0.0 && stick_slope > 0.0 && rise > rise_floor) {
        return fail(SegmentationFailure::NoStickPhase);
    }
    if slide_slope.abs() > opts.slide_ratio * reference {
        return fail(SegmentationFailure::NoSlidePhase);
    }

    let (mut i, mut j) = (fit.knots[0], fit.knots[0]);
    if use_three {
        j = fit.knots[1];
        let transition_slope = slopes[1];
        if transition_slope >= opts.stick_ratio * reference {
            i = j;
        } else if transition_slope.abs() <= opts.slide_ratio * reference {
            j = i;
        }
    }
    let stick_end = motion_start + i;
    let slide_start = motion_start + j;
    Ok(PhaseSegmentation {
        t_stick_end: samples[stick_end].t,
        t_slide_start: samples[slide_start].t,
        motion_start,
        stick_end,
        slide_start,
        len: samples.len(),
        force_sign: sign,
        reference_slope: reference,
        fit_rms: rms,
    })
}

/// Extracts `k_y` from the stick ramp and `μ` from the slide window.
pub fn fit_friction(trace: &ForceTrace, seg: &PhaseSegmentation) -> Result<FrictionFit> {
    let samples = trace.samples();
    if seg.len != samples.len() || seg.stick_end >= samples.len() {
        return Err(Error::Precondition("segmentation does not belong to this trace"));
    }
    let stick = &samples[seg.motion_start..=seg.stick_end];
    let x: Vec<f64> = stick.iter().map(|s| s.displacement).collect();
    let f: Vec<f64> = stick.iter().map(|s| seg.force_sign * s.f_y).collect();
    let (k_y, intercept) = match linear_fit(&x, &f) {
        Some(fit) if fit.0 > 0.0 => fit,
        _ => return Err(Error::Segmentation(SegmentationFailure::NoStickPhase)),
    };
    let stick_residual_rms = sqrt(
        x.iter()
            .zip(&f)
            .map(|(xi, fi)| {
                let r = fi - (k_y * xi + intercept);
                r * r
            })
            .sum::<f64>()
            / x.len() as f64,
    );

    let first = seg.slide_first();
    if first >= samples.len() {
        return Err(Error::Segmentation(SegmentationFailure::NoSlidePhase));
    }
    let mut ratios = Vec::with_capacity(samples.len() - first);
    let (mut sum_t, mut sum_n) = (0.0, 0.0);
    for (index, s) in samples.iter().enumerate().skip(first) {
        let forces = resolve_forces(s);
        if !forces.in_contact() {
            return Err(Error::InvalidNormalForce { index });
        }
        let f_t = seg.force_sign * forces.f_t;
        ratios.push(f_t / forces.f_n);
        sum_t += f_t;
        sum_n += forces.f_n;
    }
    let count = ratios.len() as f64;
    let mu = ratios.iter().sum::<f64>() / count;
    let slide_ratio_std = sqrt(ratios.iter().map(|r| (r - mu) * (r - mu)).sum::<f64>() / count);
    Ok(FrictionFit {
        mu,
        mu_ratio_of_means: sum_t / sum_n,
        k_y,
        stick_residual_rms,
        slide_ratio_std,
        mean_normal_force: sum_n / count,
        mu_reference: MU_REFERENCE,
        mu_in_envelope: (MU_ENVELOPE.0..=MU_ENVELOPE.1).contains(&mu),
        segmentation: *seg,
    })
}

/// Averages repeated runs on a common displacement grid of `points` samples
/// spanning the displacement range all traces share.
///
/// Each trace is linearly interpolated against displacement, so displacement
/// must be strictly increasing once the robot starts moving.
pub fn average_traces(traces: &[ForceTrace], points: usize) -> Result<ForceTrace> {
    if traces.is_empty() {
        return Err(Error::InvalidParameter {
            name: "traces",
            reason: "need at least one trace",
        });
    }
    if points < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "must be >= 2",
        });
    }
    let mut moving = Vec::with_capacity(traces.len());
    for trace in traces {
        let s = trace.samples();
        if s.len() < 2 {
            return Err(Error::Segmentation(SegmentationFailure::TooShort));
        }
        let start = s
            .iter()
            .position(|v| v.displacement > s[0].displacement)
            .map_or(s.len() - 1, |p| p - 1);
        let region = &s[start..];
        if let Some(k) = region.windows(2).position(|w| w[1].displacement <= w[0].displacement) {
            return Err(Error::DecreasingDisplacement { index: start + k + 1 });
        }
        moving.push(region);
    }
    let lo = moving.iter().map(|r| r[0].displacement).fold(f64::MIN, f64::max);
    let hi = moving
        .iter()
        .map(|r| r[r.len() - 1].displacement)
        .fold(f64::MAX, f64::min);
    if !(hi > lo) {
        return Err(Error::Precondition("traces share no displacement range"));
    }
    let weight = 1.0 / traces.len() as f64;
    let mut cursors = alloc::vec![0usize; moving.len()];
    let mut out = Vec::with_capacity(points);
    for p in 0..points {
        let xq = lo + (hi - lo) * p as f64 / (points - 1) as f64;
        let mut acc = TraceSample {
            t: 0.0,
            displacement: xq,
            f_x: 0.0,
            f_y: 0.0,
            f_z: 0.0,
        };
        for (region, cursor) in moving.iter().zip(cursors.iter_mut()) {
            while *cursor + 2 < region.len() && region[*cursor + 1].displacement < xq {
                *cursor += 1;
            }
            let (a, b) = (&region[*cursor], &region[*cursor + 1]);
            let w = ((xq - a.displacement) / (b.displacement - a.displacement)).clamp(0.0, 1.0);
            let lerp = |p: f64, q: f64| (1.0 - w) * p + w * q;
            acc.t += weight * lerp(a.t, b.t);
            acc.f_x += weight * lerp(a.f_x, b.f_x);
            acc.f_y += weight * lerp(a.f_y, b.f_y);
            acc.f_z += weight * lerp(a.f_z, b.f_z);
        }
        out.push(acc);
    }
    ForceTrace::new(out, traces[0].metadata.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::SyntheticFriction;
    use approx::assert_relative_eq;

    fn sample(t: f64, displacement: f64, f_y: f64) -> TraceSample {
        TraceSample {
            t,
            displacement,
            f_x: 10.0,
            f_y,
            f_z: 0.0,
        }
    }

    #[test]
    fn trace_validation() {
        let ok = alloc::vec![sample(0.0, 0.0, 0.0), sample(0.1, 0.0, 0.0), sample(0.2, 1e-3, 0.1)];
        assert_eq!(ForceTrace::new(ok, TraceMetadata::default()).unwrap().len(), 3);
        let back_in_time = alloc::vec![sample(0.0, 0.0, 0.0), sample(0.2, 0.0, 0.0), sample(0.1, 0.0, 0.0)];
        assert_eq!(
            ForceTrace::new(back_in_time, TraceMetadata::default()),
            Err(Error::NonMonotoneTime { index: 2 })
        );
        let reversing = alloc::vec![sample(0.0, 1e-3, 0.0), sample(0.1, 0.0, 0.0)];
        assert_eq!(
            ForceTrace::new(reversing, TraceMetadata::default()),
            Err(Error::DecreasingDisplacement { index: 1 })
        );
    }

    #[test]
    fn resolve_force_examples() {
        let f = resolve_forces(&TraceSample { t: 0.0, displacement: 0.0, f_x: 3.0, f_y: 5.0, f_z: 4.0 });
        assert_eq!((f.f_n, f.f_t), (5.0, 5.0));
        let f = resolve_forces(&TraceSample { t: 0.0, displacement: 0.0, f_x: 0.0, f_y: 0.0, f_z: 0.0 });
        assert_eq!((f.f_n, f.f_t), (0.0, 0.0));
        let f = resolve_forces(&TraceSample { t: 0.0, displacement: 0.0, f_x: -3.0, f_y: 0.0, f_z: 4.0 });
        assert_eq!(f.f_n, 5.0);
    }

    fn reference_experiment() -> SyntheticFriction {
        SyntheticFriction {
            k_y: 800.0,
            mu: 0.6,
            f_n: 10.0,
            ..SyntheticFriction::default()
        }
    }

    fn index_of_displacement(trace: &ForceTrace, x: f64) -> usize {
        trace
            .samples()
            .iter()
            .position(|s| s.displacement >= x - 1e-12)
            .unwrap()
    }

    #[test]
    fn clean_kink_is_located() {
        let gen = reference_experiment();
        let trace = gen.trace(|| 0.0).unwrap();
        let seg = segment_phases(&trace).unwrap();
        let kink = index_of_displacement(&trace, gen.stick_end_displacement());
        assert!(seg.stick_end.abs_diff(kink) <= 2, "{} vs {kink}", seg.stick_end);
        assert!(seg.slide_start.abs_diff(kink) <= 2, "{} vs {kink}", seg.slide_start);
        assert!(seg.t_stick_end <= seg.t_slide_start);

        let fit = fit_friction(&trace, &seg).unwrap();
        assert_relative_eq!(fit.k_y, 800.0, max_relative = 0.02);
        assert_relative_eq!(fit.mu, 0.6, max_relative = 0.02);
        assert!(fit.mu_in_envelope);
    }

    #[test]
    fn flat_trace_cannot_be_segmented() {
        let samples = (0..500)
            .map(|i| sample(i as f64 * 0.008, i as f64 * 1.6e-5, 6.0))
            .collect();
        let trace = ForceTrace::new(samples, TraceMetadata::default()).unwrap();
        assert_eq!(
            segment_phases(&trace),
            Err(Error::Segmentation(SegmentationFailure::NoStickPhase))
        );
        let short = ForceTrace::new(alloc::vec![sample(0.0, 0.0, 0.0), sample(1.0, 1e-3, 1.0)], TraceMetadata::default()).unwrap();
        assert_eq!(
            segment_phases(&short),
            Err(Error::Segmentation(SegmentationFailure::TooShort))
        );
    }

    #[test]
    fn ramp_without_sliding_is_rejected() {
        let samples = (0..500)
            .map(|i| sample(i as f64 * 0.008, i as f64 * 1.6e-5, 800.0 * i as f64 * 1.6e-5))
            .collect();
        let trace = ForceTrace::new(samples, TraceMetadata::default()).unwrap();
        assert_eq!(
            segment_phases(&trace),
            Err(Error::Segmentation(SegmentationFailure::NoSlidePhase))
        );
    }

    #[test]
    fn transition_is_kept_between_phases() {
        let gen = SyntheticFriction {
            transition: 2e-3,
            ..reference_experiment()
        };
        let trace = gen.trace(|| 0.0).unwrap();
        let seg = segment_phases(&trace).unwrap();
        assert!(seg.slide_start > seg.stick_end + 10);
        let phases = seg.phases();
        assert_eq!(phases[0], Phase::Stick);
        assert_eq!(phases[seg.stick_end + 1], Phase::Transition);
        assert_eq!(*phases.last().unwrap(), Phase::Slide);
        let x_m = trace.samples()[seg.stick_end].displacement;
        let x_s = trace.samples()[seg.slide_start].displacement;
        assert!(x_m >= gen.stick_end_displacement() - 1e-3 && x_m < gen.slide_start_displacement());
        assert!(x_s > gen.stick_end_displacement() && x_s <= gen.slide_start_displacement() + 1e-3);
    }

    #[test]
    fn negative_sensor_frame_is_oriented() {
        let trace = reference_experiment().trace(|| 0.0).unwrap();
        let flipped = ForceTrace::new(
            trace
                .samples()
                .iter()
                .map(|s| TraceSample { f_y: -s.f_y, ..*s })
                .collect(),
            TraceMetadata::default(),
        )
        .unwrap();
        let seg = segment_phases(&flipped).unwrap();
        assert_eq!(seg.force_sign, -1.0);
        let fit = fit_friction(&flipped, &seg).unwrap();
        assert_relative_eq!(fit.mu, 0.6, max_relative = 0.02);
        assert!(fit.k_y > 0.0);
    }

    #[test]
    fn lost_contact_in_slide_window_is_an_error() {
        let trace = reference_experiment().trace(|| 0.0).unwrap();
        let seg = segment_phases(&trace).unwrap();
        let mut samples = trace.samples().to_vec();
        let last = samples.len() - 1;
        samples[last].f_x = 0.0;
        samples[last].f_z = 0.0;
        let broken = ForceTrace::new(samples, TraceMetadata::default()).unwrap();
        assert_eq!(
            fit_friction(&broken, &seg),
            Err(Error::InvalidNormalForce { index: last })
        );
    }

    #[test]
    fn averaging_identical_runs_reproduces_them() {
        let trace = reference_experiment().trace(|| 0.0).unwrap();
        let avg = average_traces(&[trace.clone(), trace.clone(), trace.clone()], trace.len()).unwrap();
        for (a, b) in avg.samples().iter().zip(trace.samples()) {
            assert!((a.f_y - b.f_y).abs() < 1e-9);
            assert!((a.displacement - b.displacement).abs() < 1e-12);
        }
        assert!(average_traces(&[], 10).is_err());
    }
}
