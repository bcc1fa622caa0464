//! Synthetic sliding traces with known ground truth.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::friction::{ForceTrace, TraceMetadata, TraceSample};
use crate::math::{cos, floor, sin};

/// Generator for constant-velocity sliding traces.
///
/// The transverse force rises with slope `k_y`, blends into the plateau
/// `μ f_n` over `transition` metres with a C¹ quadratic, then stays flat.
/// The normal force is split between the x and z channels by `normal_tilt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticFriction {
    /// N/m
    pub k_y: f64,
    pub mu: f64,
    /// N
    pub f_n: f64,
    /// m/s
    pub velocity: f64,
    /// m
    pub travel: f64,
    /// Hz
    pub sample_rate: f64,
    /// Width of the stick-to-slide blend (m).
    pub transition: f64,
    /// rad, angle of the normal force from the x axis toward z.
    pub normal_tilt: f64,
    /// Time the robot holds still before moving (s).
    pub dwell: f64,
    /// Standard deviation applied to every force channel (N).
    pub noise_sigma: f64,
}

impl Default for SyntheticFriction {
    fn default() -> Self {
        SyntheticFriction {
            k_y: 800.0,
            mu: 0.6,
            f_n: 10.0,
            velocity: 2e-3,
            travel: 30e-3,
            sample_rate: 125.0,
            transition: 0.0,
            normal_tilt: 0.0,
            dwell: 0.0,
            noise_sigma: 0.0,
        }
    }
}

impl SyntheticFriction {
    /// Displacement where the stick ramp ends.
    pub fn stick_end_displacement(&self) -> f64 {
        self.mu * self.f_n / self.k_y - self.transition / 2.0
    }

    /// Displacement where steady sliding begins.
    pub fn slide_start_displacement(&self) -> f64 {
        self.stick_end_displacement() + self.transition
    }

    /// Noise-free transverse force at displacement `x`.
    pub fn clean_f_t(&self, x: f64) -> f64 {
        let x_m = self.stick_end_displacement();
        if x <= x_m {
            self.k_y * x.max(0.0)
        } else if x >= x_m + self.transition {
            self.mu * self.f_n
        } else {
            let d = x - x_m;
            self.k_y * (x_m + d - d * d / (2.0 * self.transition))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k_y", self.k_y),
            ("mu", self.mu),
            ("f_n", self.f_n),
            ("velocity", self.velocity),
            ("travel", self.travel),
            ("sample_rate", self.sample_rate),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        for (name, v) in [
            ("transition", self.transition),
            ("dwell", self.dwell),
            ("noise_sigma", self.noise_sigma),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and >= 0",
                });
            }
        }
        if !self.normal_tilt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "normal_tilt",
                reason: "must be finite",
            });
        }
        if self.stick_end_displacement() <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "transition",
                reason: "blend is wider than the stick ramp",
            });
        }
        Ok(())
    }

    /// Samples the trace, drawing one standard-normal value from `noise` per
    /// force channel and sample.
    pub fn trace(&self, mut noise: impl FnMut() -> f64) -> Result<ForceTrace> {
        self.validate()?;
        let hold = floor(self.dwell * self.sample_rate) as usize;
        let moving = floor(self.travel / self.velocity * self.sample_rate * (1.0 + 1e-12)) as usize + 1;
        let (nx, nz) = (cos(self.normal_tilt), sin(self.normal_tilt));
        let samples: Vec<TraceSample> = (0..hold + moving)
            .map(|i| {
                let t = i as f64 / self.sample_rate;
                let x = if i < hold {
                    0.0
                } else {
                    self.velocity * (i - hold) as f64 / self.sample_rate
                };
                let sigma = self.noise_sigma;
                TraceSample {
                    t,
                    displacement: x,
                    f_x: self.f_n * nx + sigma * noise(),
                    f_y: self.clean_f_t(x) + sigma * noise(),
                    f_z: self.f_n * nz + sigma * noise(),
                }
            })
            .collect();
        ForceTrace::new(samples, TraceMetadata::default())
    }
}
