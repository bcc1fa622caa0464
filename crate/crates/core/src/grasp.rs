//! Physical model of an object rotating between two compliant fingertips.
//!
//! The fingers act as a linear spring with stiffness `k_n` along the grasp
//! normal and `k_t` transverse to it, attached at radius `r` from the
//! object's center of mass and compressed by `delta_n` at zero rotation.
//! Contact torsional stiffness is taken as zero and the force directions are
//! held fixed while the object rotates.

use crate::error::{Error, Result};
use crate::math::{cos, sin};

/// Parameters of one modeled grasp, in SI units.
///
/// The preload force is always derived as `k_n * delta_n`; it is never
/// stored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "GraspConfigFields")
)]
pub struct GraspConfig {
    /// Bulk finger stiffness along the grasp normal (N/m).
    pub k_n: f64,
    /// Bulk finger stiffness transverse to the grasp normal (N/m).
    pub k_t: f64,
    /// Preload spring displacement (m).
    pub delta_n: f64,
    /// Contact radius from the object's center of mass (m).
    pub r: f64,
    /// Rotational inertia about the rotation axis (kg·m²).
    pub inertia: f64,
    /// Coulomb friction coefficient.
    pub mu: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct GraspConfigFields {
    k_n: f64,
    k_t: f64,
    delta_n: f64,
    r: f64,
    inertia: f64,
    mu: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<GraspConfigFields> for GraspConfig {
    type Error = Error;

    fn try_from(f: GraspConfigFields) -> Result<Self> {
        GraspConfig::new(f.k_n, f.k_t, f.delta_n, f.r, f.inertia, f.mu)
    }
}

impl GraspConfig {
    /// Builds a validated configuration.
    pub fn new(k_n: f64, k_t: f64, delta_n: f64, r: f64, inertia: f64, mu: f64) -> Result<Self> {
        let config = GraspConfig {
            k_n,
            k_t,
            delta_n,
            r,
            inertia,
            mu,
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        fn check(name: &'static str, value: f64, strict: bool) -> Result<()> {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite",
                });
            }
            if strict && value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be > 0",
                });
            }
            if !strict && value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be >= 0",
                });
            }
            Ok(())
        }
        check("k_n", self.k_n, true)?;
        check("k_t", self.k_t, false)?;
        check("delta_n", self.delta_n, false)?;
        check("r", self.r, true)?;
        check("inertia", self.inertia, true)?;
        check("mu", self.mu, false)
    }

    /// Copy of this configuration with the preload displacement chosen so
    /// that the preload force equals `f_p`.
    pub fn with_preload(&self, f_p: f64) -> GraspConfig {
        GraspConfig {
            delta_n: f_p / self.k_n,
            ..*self
        }
    }
}

/// Rotation angle and angular velocity of the object.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemState {
    /// rad
    pub theta: f64,
    /// rad/s
    pub theta_dot: f64,
}

impl SystemState {
    pub fn new(theta: f64, theta_dot: f64) -> Self {
        SystemState { theta, theta_dot }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.theta_dot.is_finite()
    }
}

/// Normal and transverse contact force at a given rotation.
///
/// `f_n` is left negative when the model predicts loss of contact; see
/// [`ContactForces::in_contact`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContactForces {
    /// N
    pub f_n: f64,
    /// N
    pub f_t: f64,
}

impl ContactForces {
    pub fn in_contact(&self) -> bool {
        self.f_n > 0.0
    }
}

/// Preload force `k_n * delta_n` (N).
pub fn preload_force(config: &GraspConfig) -> f64 {
    config.k_n * config.delta_n
}

/// Potential energy stored in the finger springs at rotation `theta` (J).
pub fn potential_energy(config: &GraspConfig, theta: f64) -> f64 {
    let normal = config.delta_n - config.r * (1.0 - cos(theta));
    let transverse = config.r * sin(theta);
    config.k_n * normal * normal + config.k_t * transverse * transverse
}

/// Restoring torque `τ(θ)` with `I·θ̈ = τ(θ)` (N·m).
///
/// Equals `-dV/dθ` of [`potential_energy`].
pub fn torque(config: &GraspConfig, theta: f64) -> f64 {
    let GraspConfig {
        k_n, k_t, delta_n, r, ..
    } = *config;
    let (s, c) = (sin(theta), cos(theta));
    2.0 * k_n * r * s * delta_n - 2.0 * k_n * r * r * (1.0 - c) * s - 2.0 * k_t * r * r * s * c
}

/// Contact forces at rotation `theta`.
pub fn contact_forces(config: &GraspConfig, theta: f64) -> ContactForces {
    ContactForces {
        f_n: preload_force(config) - config.k_n * config.r * (1.0 - cos(theta)),
        f_t: config.k_t * config.r * sin(theta),
    }
}

/// Distance to the Coulomb limit, `μ·f_n − |f_t|`.
///
/// Negative means the contact slips.
pub fn coulomb_margin(forces: &ContactForces, mu: f64) -> f64 {
    mu * forces.f_n - forces.f_t.abs()
}

/// Rigid-body shapes with a textbook rotational inertia.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum InertiaShape {
    /// Solid cylinder rotating about its own axis.
    SolidCylinderAxial,
    /// Solid cylinder rotating about a diameter through its center.
    SolidCylinderTransverse,
    SolidSphere,
}

/// Rotational inertia of a uniform solid (kg·m²).
///
/// `height` is only used, and then required, for
/// [`InertiaShape::SolidCylinderTransverse`].
pub fn inertia_of(shape: InertiaShape, mass: f64, radius: f64, height: Option<f64>) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: "must be > 0",
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "radius",
            reason: "must be > 0",
        });
    }
    let r2 = radius * radius;
    match shape {
        InertiaShape::SolidCylinderAxial => Ok(0.5 * mass * r2),
        InertiaShape::SolidSphere => Ok(0.4 * mass * r2),
        InertiaShape::SolidCylinderTransverse => {
            let h = height.ok_or(Error::InvalidParameter {
                name: "height",
                reason: "required for a transverse cylinder",
            })?;
            if !(h >= 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "height",
                    reason: "must be >= 0",
                });
            }
            Ok(mass * (3.0 * r2 + h * h) / 12.0)
        }
    }
}
