//! Time-domain integration of `I·θ̈ = τ(θ) − c·θ̇`.
//!
//! The grasp model itself is undamped; the viscous term `c` exists so that
//! simulations can settle at an equilibrium. It defaults to zero.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grasp::{contact_forces, coulomb_margin, potential_energy, torque, ContactForces, GraspConfig, SystemState};
use crate::math::floor;
use crate::stability::rest_angle;

/// Angle tolerance of the convergence test (rad).
pub const CONVERGED_ANGLE_TOL: f64 = 1e-4;
/// Angular velocity tolerance of the convergence test (rad/s).
pub const CONVERGED_RATE_TOL: f64 = 1e-4;
/// How long both tolerances must hold before convergence is declared (s).
pub const CONVERGED_DWELL: f64 = 0.5;

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimParams {
    /// Fixed step (s).
    pub dt: f64,
    /// End time (s).
    pub t_max: f64,
    /// Artificial viscous damping (N·m·s/rad).
    pub damping: f64,
    /// Initial angle (rad).
    pub theta0: f64,
    /// Initial angular velocity (rad/s).
    pub theta_dot0: f64,
}

impl SimParams {
    pub fn new(dt: f64, t_max: f64, damping: f64, theta0: f64, theta_dot0: f64) -> Result<Self> {
        let params = SimParams {
            dt,
            t_max,
            damping,
            theta0,
            theta_dot0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be > 0",
            });
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                reason: "must be >= dt",
            });
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "damping",
                reason: "must be >= 0",
            });
        }
        if !self.theta0.is_finite() || !self.theta_dot0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "initial state",
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Number of samples a full run produces, `floor(t_max/dt) + 1`.
    pub fn sample_count(&self) -> usize {
        // Absorbs the rounding in e.g. 5.0 / 1e-4.
        floor(self.t_max / self.dt * (1.0 + 1e-12)) as usize + 1
    }
}

/// One integrator output sample.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectorySample {
    pub t: f64,
    pub state: SystemState,
    pub forces: ContactForces,
    /// Total mechanical energy (J).
    pub energy: f64,
}

/// Integrated motion, sampled every `dt`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Time of the step that produced a non-finite state, if any. The
    /// trajectory ends with the last finite sample.
    pub diverged_at: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum EventKind {
    SlipOnset,
    ContactLoss,
    Converged,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimEvent {
    pub kind: EventKind,
    pub t: f64,
    pub theta: f64,
    /// Equilibrium reached, for [`EventKind::Converged`].
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub reference: Option<f64>,
}

/// `½Iθ̇² + V(θ)` (J).
pub fn total_energy(config: &GraspConfig, state: &SystemState) -> f64 {
    0.5 * config.inertia * state.theta_dot * state.theta_dot + potential_energy(config, state.theta)
}

fn derivative(config: &GraspConfig, damping: f64, theta: f64, theta_dot: f64) -> (f64, f64) {
    (
        theta_dot,
        (torque(config, theta) - damping * theta_dot) / config.inertia,
    )
}

/// Advances the state by one classical Runge–Kutta step. `dt` may be
/// negative to step backwards in time.
pub fn rk4_step(config: &GraspConfig, damping: f64, state: SystemState, dt: f64) -> SystemState {
    let SystemState { theta, theta_dot } = state;
    let k1 = derivative(config, damping, theta, theta_dot);
    let k2 = derivative(config, damping, theta + 0.5 * dt * k1.0, theta_dot + 0.5 * dt * k1.1);
    let k3 = derivative(config, damping, theta + 0.5 * dt * k2.0, theta_dot + 0.5 * dt * k2.1);
    let k4 = derivative(config, damping, theta + dt * k3.0, theta_dot + dt * k3.1);
    SystemState {
        theta: theta + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        theta_dot: theta_dot + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}

fn sample(config: &GraspConfig, t: f64, state: SystemState) -> TrajectorySample {
    TrajectorySample {
        t,
        state,
        forces: contact_forces(config, state.theta),
        energy: total_energy(config, &state),
    }
}

/// Fixed-step RK4 solution from `(theta0, theta_dot0)` up to `t_max`.
///
/// Stops early, recording [`Trajectory::diverged_at`], if the state stops
/// being finite.
pub fn integrate(config: &GraspConfig, params: &SimParams) -> Result<Trajectory> {
    config.validate()?;
    params.validate()?;
    let n = params.sample_count();
    let mut samples = Vec::with_capacity(n);
    let mut state = SystemState::new(params.theta0, params.theta_dot0);
    samples.push(sample(config, 0.0, state));
    let mut diverged_at = None;
    for i in 1..n {
        let t = i as f64 * params.dt;
        state = rk4_step(config, params.damping, state, params.dt);
        if !state.is_finite() {
            diverged_at = Some(t);
            break;
        }
        samples.push(sample(config, t, state));
    }
    Ok(Trajectory {
        samples,
        diverged_at,
    })
}

/// Scans a trajectory for slip onset, contact loss and the terminal
/// converged/diverged event.
///
/// Slip onset is the first sample with a negative Coulomb margin while the
/// contact still carries load. Convergence requires the angle to stay within
/// [`CONVERGED_ANGLE_TOL`] of `0` or `±θ_r` and the rate within
/// [`CONVERGED_RATE_TOL`] for [`CONVERGED_DWELL`]; the event is stamped at
/// the start of that window.
pub fn detect_events(config: &GraspConfig, traj: &Trajectory) -> Vec<SimEvent> {
    let mut events = Vec::new();
    let mut references = Vec::with_capacity(3);
    references.push(0.0);
    if let Some(theta_r) = rest_angle(config) {
        references.push(theta_r);
        references.push(-theta_r);
    }

    let mut slip_seen = false;
    let mut loss_seen = false;
    let mut dwell: Option<(usize, f64)> = None;
    let mut converged = None;

    for (i, s) in traj.samples.iter().enumerate() {
        let theta = s.state.theta;
        if !loss_seen && s.forces.f_n <= 0.0 {
            loss_seen = true;
            events.push(SimEvent {
                kind: EventKind::ContactLoss,
                t: s.t,
                theta,
                reference: None,
            });
        }
        if !slip_seen && s.forces.f_n > 0.0 && coulomb_margin(&s.forces, config.mu) < 0.0 {
            slip_seen = true;
            events.push(SimEvent {
                kind: EventKind::SlipOnset,
                t: s.t,
                theta,
                reference: None,
            });
        }
        if converged.is_none() {
            let near = references.iter().copied().find(|r| {
                (theta - r).abs() < CONVERGED_ANGLE_TOL && s.state.theta_dot.abs() < CONVERGED_RATE_TOL
            });
            dwell = match (dwell, near) {
                (Some((start, r0)), Some(r)) if r0 == r => Some((start, r0)),
                (_, Some(r)) => Some((i, r)),
                (_, None) => None,
            };
            if let Some((start, r)) = dwell {
                let first = &traj.samples[start];
                if s.t - first.t >= CONVERGED_DWELL * (1.0 - 1e-12) {
                    converged = Some(SimEvent {
                        kind: EventKind::Converged,
                        t: first.t,
                        theta: first.state.theta,
                        reference: Some(r),
                    });
                }
            }
        }
    }
    if let Some(event) = converged {
        events.push(event);
    }
    if let Some(t) = traj.diverged_at {
        let theta = traj.samples.last().map_or(f64::NAN, |s| s.state.theta);
        events.push(SimEvent {
            kind: EventKind::Diverged,
            t,
            theta,
            reference: None,
        });
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{linearize, slip_angle};
    use core::f64::consts::PI;

    fn worked(delta_n: f64) -> GraspConfig {
        GraspConfig::new(1000.0, 500.0, delta_n, 0.03, 1e-4, 0.6).unwrap()
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let params = SimParams::new(1e-3, 1.0, 0.0, 0.0, 0.0).unwrap();
        let traj = integrate(&worked(0.02), &params).unwrap();
        assert_eq!(traj.samples.len(), 1001);
        assert!(traj.samples.iter().all(|s| s.state.theta == 0.0 && s.state.theta_dot == 0.0));
    }

    #[test]
    fn sample_count_and_times() {
        let params = SimParams::new(1e-4, 5.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(params.sample_count(), 50_001);
        let params = SimParams::new(0.3, 1.0, 0.0, 0.1, 0.0).unwrap();
        let traj = integrate(&worked(0.01), &params).unwrap();
        assert_eq!(traj.samples.len(), 4);
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn stable_oscillation_period_matches_linearization() {
        let c = worked(0.01);
        let params = SimParams::new(1e-5, 1.0, 0.0, 0.05, 0.0).unwrap();
        let traj = integrate(&c, &params).unwrap();
        let mut crossings = Vec::new();
        for w in traj.samples.windows(2) {
            let (a, b) = (w[0].state.theta, w[1].state.theta);
            if a > 0.0 && b <= 0.0 {
                crossings.push(w[0].t + (w[1].t - w[0].t) * a / (a - b));
            }
        }
        let period = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
        let expected = 2.0 * PI / (-linearize(&c).a21).sqrt();
        assert!((period - expected).abs() / expected < 0.01, "{period} vs {expected}");
        let bound = traj.samples.iter().map(|s| s.state.theta.abs()).fold(0.0, f64::max);
        assert!(bound <= 0.05 * (1.0 + 1e-6));
    }

    #[test]
    fn unstable_grasp_settles_at_rest_angle() {
        let c = worked(0.02);
        let params = SimParams::new(1e-4, 5.0, 0.001, 1e-3, 0.0).unwrap();
        let traj = integrate(&c, &params).unwrap();
        let last = traj.samples.last().unwrap().state.theta;
        assert!((last.abs() - 0.8411).abs() < 1e-3, "{last}");
        let events = detect_events(&c, &traj);
        let converged = events.iter().find(|e| e.kind == EventKind::Converged).unwrap();
        assert!((converged.reference.unwrap().abs() - rest_angle(&c).unwrap()).abs() < 1e-12);

        let slip = events.iter().find(|e| e.kind == EventKind::SlipOnset).unwrap();
        let theta_f = slip_angle(&c).unwrap();
        let i = traj.samples.iter().position(|s| s.t == slip.t).unwrap();
        let prev = traj.samples[i - 1].state.theta;
        assert!(prev.abs() <= theta_f && slip.theta.abs() > theta_f);
        let step = (slip.theta - prev).abs();
        assert!((slip.theta.abs() - theta_f).abs() <= step);
    }

    #[test]
    fn stable_damped_run_converges_to_zero() {
        let c = worked(0.01);
        let params = SimParams::new(1e-4, 3.0, 0.005, 0.01, 0.0).unwrap();
        let traj = integrate(&c, &params).unwrap();
        let events = detect_events(&c, &traj);
        assert_eq!(events.len(), 1, "{events:?}");
        assert_eq!(events[0].kind, EventKind::Converged);
        assert_eq!(events[0].reference, Some(0.0));
    }

    #[test]
    fn quiet_trajectory_has_only_terminal_event() {
        let c = worked(0.01);
        let params = SimParams::new(1e-3, 1.0, 0.0, 0.0, 0.0).unwrap();
        let events = detect_events(&c, &integrate(&c, &params).unwrap());
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, EventKind::Converged);
        assert_eq!(events[0].t, 0.0);
    }

    #[test]
    fn non_finite_state_stops_integration() {
        let c = worked(0.01);
        let params = SimParams::new(1.0, 10.0, 0.0, 0.0, 1e308).unwrap();
        let traj = integrate(&c, &params).unwrap();
        assert!(traj.diverged_at.is_some());
        assert!(traj.samples.len() < params.sample_count());
        let events = detect_events(&c, &traj);
        assert_eq!(events.last().unwrap().kind, EventKind::Diverged);
    }

    #[test]
    fn energy_examples() {
        let c = GraspConfig::new(1000.0, 500.0, 0.01, 0.03, 1e-4, 0.6).unwrap();
        let rest = total_energy(&c, &SystemState::new(0.0, 0.0));
        assert!((rest - 0.1).abs() < 1e-15);
        let moving = total_energy(&c, &SystemState::new(0.0, 1.0));
        assert!((moving - rest - 5e-5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SimParams::new(0.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(SimParams::new(-1e-3, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(SimParams::new(1e-3, 1e-4, 0.0, 0.0, 0.0).is_err());
        assert!(SimParams::new(1e-3, 1.0, -1.0, 0.0, 0.0).is_err());
        assert!(SimParams::new(1e-3, 1.0, 0.0, f64::NAN, 0.0).is_err());
    }
}
