//! Linearized stability, rest angle, slip angle and critical preloads.
//!
//! About `θ = 0` the grasp behaves like `θ̈ = a21·θ` with
//! `a21 = 2r(k_n δ_n − k_t r)/I`, so it is stable exactly while the preload
//! stays below `f_p^i = k_t r`. Past that point the object turns to a rest
//! angle `θ_r`; it slips once `θ_r` reaches the Coulomb slip angle `θ_f`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grasp::{contact_forces, preload_force, GraspConfig};
use crate::math::{acos, atan, sqrt};
use core::f64::consts::PI;

/// Rest-condition ratios within this distance of ±1 count as out of range.
pub const REST_RATIO_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance of the slip-preload bisection (N).
pub const SLIP_PRELOAD_TOLERANCE: f64 = 1e-4;

const SLIP_PRELOAD_SCAN_STEPS: usize = 256;

/// State matrix `[[0, 1], [a21, 0]]` of the dynamics linearized about `θ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearizedSystem {
    /// 1/s²
    pub a21: f64,
}

impl LinearizedSystem {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[0.0, 1.0], [self.a21, 0.0]]
    }
}

/// Complex number `re + i·im` (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// The two eigenvalues of the linearized system; always `λ₂ = −λ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenPair(pub [Eigenvalue; 2]);

impl EigenPair {
    /// Oscillatory pair `±iω` (stable regime).
    pub fn is_purely_imaginary(&self) -> bool {
        self.0.iter().all(|l| l.re == 0.0 && l.im != 0.0)
    }

    /// Saddle pair `±λ` (one pole in the right half-plane).
    pub fn is_purely_real(&self) -> bool {
        self.0.iter().all(|l| l.im == 0.0 && l.re != 0.0)
    }
}

/// Where rotation away from zero first meets the Coulomb limit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", content = "angle", rename_all = "kebab-case")
)]
pub enum SlipBoundary {
    /// Slip starts at this angle while the contact still carries load.
    Slip(f64),
    /// The Coulomb limit is only met after the normal force has vanished.
    ContactLoss(f64),
    /// `|f_t| ≤ μ f_n` holds for every rotation in contact.
    Unreachable,
    /// `μ = 0`: any transverse load slips.
    Frictionless,
}

impl SlipBoundary {
    pub fn angle(&self) -> Option<f64> {
        match *self {
            SlipBoundary::Slip(theta) => Some(theta),
            _ => None,
        }
    }
}

/// Outcome of the slip-preload search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", content = "f_p", rename_all = "kebab-case")
)]
pub enum SlipPreload {
    /// Smallest preload whose rest angle reaches the slip angle (N).
    Found(f64),
    /// Rest angles exist in the range but never reach the slip angle.
    NoCrossing,
    /// The rest condition is never satisfied in the range.
    RestAngleUndefined,
}

impl SlipPreload {
    pub fn force(&self) -> Option<f64> {
        match *self {
            SlipPreload::Found(f) => Some(f),
            _ => None,
        }
    }
}

/// One point of a rest-angle progression curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RestCurvePoint {
    /// N
    pub f_p: f64,
    /// `Some(0)` below the instability preload, `None` where no rest angle
    /// exists (rad).
    pub theta_r: Option<f64>,
}

/// Every stability result for one grasp.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityReport {
    /// Applied preload (N).
    pub f_p: f64,
    /// Instability preload `k_t r` (N).
    pub f_p_i: f64,
    pub stable: bool,
    pub eigenvalues: EigenPair,
    /// rad
    pub rest_angle: Option<f64>,
    /// rad
    pub slip_angle: Option<f64>,
    /// N
    pub slip_preload: Option<f64>,
    pub slips_at_rest: Option<bool>,
}

pub fn linearize(config: &GraspConfig) -> LinearizedSystem {
    let GraspConfig { k_t, r, inertia, .. } = *config;
    LinearizedSystem {
        a21: 2.0 * r * (preload_force(config) - k_t * r) / inertia,
    }
}

pub fn eigenvalues(linsys: &LinearizedSystem) -> EigenPair {
    let a = linsys.a21;
    if a >= 0.0 {
        let l = sqrt(a);
        EigenPair([Eigenvalue { re: l, im: 0.0 }, Eigenvalue { re: -l, im: 0.0 }])
    } else {
        let w = sqrt(-a);
        EigenPair([Eigenvalue { re: 0.0, im: w }, Eigenvalue { re: 0.0, im: -w }])
    }
}

/// Preload `f_p^i = k_t r` at which `θ = 0` loses stability (N).
pub fn stability_threshold(config: &GraspConfig) -> f64 {
    config.k_t * config.r
}

/// Non-trivial equilibrium angle in `(0, π)`, if the rest condition holds.
pub fn rest_angle(config: &GraspConfig) -> Option<f64> {
    let GraspConfig { k_n, k_t, r, .. } = *config;
    let denominator = k_t * r - k_n * r;
    if denominator == 0.0 {
        return None;
    }
    let ratio = (preload_force(config) - k_n * r) / denominator;
    if ratio.abs() < 1.0 - REST_RATIO_TOLERANCE {
        Some(acos(ratio))
    } else {
        None
    }
}

/// Samples the rest angle over `steps + 1` evenly spaced preloads covering
/// `f_p_min..=f_p_max`.
pub fn rest_angle_curve(
    config: &GraspConfig,
    f_p_min: f64,
    f_p_max: f64,
    steps: usize,
) -> Result<Vec<RestCurvePoint>> {
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: "must be >= 1",
        });
    }
    if !(f_p_min >= 0.0 && f_p_max > f_p_min && f_p_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "preload_range",
            reason: "must be a non-empty increasing range of non-negative forces",
        });
    }
    let threshold = stability_threshold(config);
    Ok((0..=steps)
        .map(|i| {
            let f_p = f_p_min + (f_p_max - f_p_min) * i as f64 / steps as f64;
            let theta_r = if f_p <= threshold {
                Some(0.0)
            } else {
                rest_angle(&config.with_preload(f_p))
            };
            RestCurvePoint { f_p, theta_r }
        })
        .collect())
}

/// Solves `f_t(θ) = μ f_n(θ)` for the first Coulomb boundary crossing.
///
/// With `a = k_t r`, `b = −μ k_n r` and `c = μ(f_p − k_n r)` the boundary is
/// `a sinθ + b cosθ = c`; the tangent half-angle substitution turns it into
/// `(b + c)t² − 2at + (c − b) = 0`. Both branches are evaluated and the
/// smallest root in `(0, π]` is kept (rotation is symmetric, so a first
/// crossing of `|f_t|` always lies there). `θ = π` is checked separately
/// because the substitution loses it when `b + c = 0`.
pub fn slip_boundary(config: &GraspConfig) -> SlipBoundary {
    let GraspConfig { k_n, k_t, r, mu, .. } = *config;
    let f_p = preload_force(config);
    if f_p <= 0.0 {
        return SlipBoundary::ContactLoss(0.0);
    }
    if mu <= 0.0 {
        return if k_t > 0.0 {
            SlipBoundary::Frictionless
        } else {
            SlipBoundary::Unreachable
        };
    }
    if k_t == 0.0 {
        // f_t vanishes, so the limit coincides with f_n = 0.
        let cos_loss = 1.0 - f_p / (k_n * r);
        return if cos_loss > -1.0 {
            SlipBoundary::ContactLoss(acos(cos_loss))
        } else {
            SlipBoundary::Unreachable
        };
    }

    let a = k_t * r;
    let b = -mu * k_n * r;
    let c = mu * (f_p - k_n * r);
    let discriminant = a * a + b * b - c * c;
    if discriminant < 0.0 {
        return SlipBoundary::Unreachable;
    }
    let root = sqrt(discriminant);
    let quad_a = b + c;
    let quad_c = c - b;
    // a > 0 here, so q = a + √disc never cancels.
    let q = a + root;
    let mut candidates = [f64::NAN; 3];
    candidates[0] = 2.0 * atan(q / quad_a);
    candidates[1] = 2.0 * atan(quad_c / q);
    let pi_residual = -b - c;
    if pi_residual.abs() <= 1e-12 * (a + b.abs() + c.abs()) {
        candidates[2] = PI;
    }

    let first = candidates
        .iter()
        .map(|&t| if t <= 0.0 { t + 2.0 * PI } else { t })
        .filter(|t| *t > 0.0 && *t <= PI)
        .fold(None, |acc: Option<f64>, t| match acc {
            Some(best) if best <= t => Some(best),
            _ => Some(t),
        });
    match first {
        None => SlipBoundary::Unreachable,
        Some(theta) if contact_forces(config, theta).in_contact() => SlipBoundary::Slip(theta),
        Some(theta) => SlipBoundary::ContactLoss(theta),
    }
}

/// Rotation `θ_f` at which the contact starts to slip, if it can.
pub fn slip_angle(config: &GraspConfig) -> Option<f64> {
    slip_boundary(config).angle()
}

fn slips_at(config: &GraspConfig, f_p: f64) -> (bool, bool) {
    let c = config.with_preload(f_p);
    match rest_angle(&c) {
        None => (false, false),
        Some(rest) => (true, slip_angle(&c).is_some_and(|slip| rest >= slip)),
    }
}

/// Smallest preload in `(f_p^i, f_p_max]` whose rest angle reaches the slip
/// angle.
///
/// A coarse scan brackets the first crossing of `θ_r − θ_f`, then bisection
/// narrows it to [`SLIP_PRELOAD_TOLERANCE`]. Both angles vary continuously
/// with the preload wherever both exist.
pub fn slip_preload(config: &GraspConfig, f_p_max: f64) -> Result<SlipPreload> {
    let lower = stability_threshold(config);
    if !(f_p_max > lower) || !f_p_max.is_finite() {
        return Err(Error::Precondition(
            "f_p_max must exceed the instability preload k_t*r",
        ));
    }
    let mut any_rest = false;
    let mut prev = lower;
    for i in 1..=SLIP_PRELOAD_SCAN_STEPS {
        let f = lower + (f_p_max - lower) * i as f64 / SLIP_PRELOAD_SCAN_STEPS as f64;
        let (has_rest, slips) = slips_at(config, f);
        any_rest |= has_rest;
        if slips {
            let (mut lo, mut hi) = (prev, f);
            while hi - lo > SLIP_PRELOAD_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if slips_at(config, mid).1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(SlipPreload::Found(hi));
        }
        prev = f;
    }
    Ok(if any_rest {
        SlipPreload::NoCrossing
    } else {
        SlipPreload::RestAngleUndefined
    })
}

/// Upper end of the preload range in which a rest angle can exist when
/// `k_n > k_t`: `2 k_n r − k_t r`.
pub fn rest_angle_preload_limit(config: &GraspConfig) -> f64 {
    (2.0 * config.k_n - config.k_t) * config.r
}

/// Runs the whole analysis for one grasp.
///
/// The slip preload is searched up to [`rest_angle_preload_limit`], beyond
/// which no rest angle exists.
pub fn analyze(config: &GraspConfig) -> StabilityReport {
    let f_p = preload_force(config);
    let f_p_i = stability_threshold(config);
    let rest = rest_angle(config);
    let boundary = slip_boundary(config);
    let slip = boundary.angle();
    let search_max = rest_angle_preload_limit(config);
    let slip_preload = if config.mu > 0.0 && search_max > f_p_i {
        slip_preload(config, search_max).ok().and_then(|s| s.force())
    } else {
        None
    };
    let slips_at_rest = rest.and_then(|theta_r| match boundary {
        SlipBoundary::Slip(theta_f) => Some(theta_r >= theta_f),
        SlipBoundary::Unreachable => Some(false),
        SlipBoundary::Frictionless => Some(true),
        SlipBoundary::ContactLoss(_) => None,
    });
    StabilityReport {
        f_p,
        f_p_i,
        stable: f_p < f_p_i,
        eigenvalues: eigenvalues(&linearize(config)),
        rest_angle: rest,
        slip_angle: slip,
        slip_preload,
        slips_at_rest,
    }
}
