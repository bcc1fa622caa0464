use std::f64::consts::PI;

use proptest::prelude::*;
use softgrasp_core::dynamics::{integrate, rk4_step, SimParams};
use softgrasp_core::grasp::{contact_forces, coulomb_margin, potential_energy, preload_force, torque};
use softgrasp_core::stability::{eigenvalues, linearize, rest_angle, slip_angle, stability_threshold};
use softgrasp_core::{ContactForces, GraspConfig, SystemState};

fn config() -> impl Strategy<Value = GraspConfig> {
    (
        200.0..5000.0f64,
        50.0..3000.0f64,
        0.0..0.05f64,
        0.005..0.05f64,
        1e-5..1e-3f64,
        0.1..1.5f64,
    )
        .prop_map(|(k_n, k_t, d, r, i, mu)| GraspConfig::new(k_n, k_t, d, r, i, mu).unwrap())
}

/// Configs with `k_n > k_t` whose rest-angle ratio is uniform in (−1, 1).
fn resting_config() -> impl Strategy<Value = GraspConfig> {
    (config(), -0.98..0.98f64).prop_filter_map("needs k_n > k_t", |(c, ratio)| {
        (c.k_n > c.k_t * 1.05).then(|| {
            // ratio = (f_p − k_n r)/(k_t r − k_n r)
            let f_p = c.k_n * c.r + ratio * (c.k_t - c.k_n) * c.r;
            c.with_preload(f_p)
        })
    })
}

proptest! {
    #[test]
    fn torque_is_minus_energy_gradient(c in config(), theta in -PI..PI) {
        let h = 1e-6;
        let fd = -(potential_energy(&c, theta + h) - potential_energy(&c, theta - h)) / (2.0 * h);
        let tau = torque(&c, theta);
        let scale = tau.abs().max(1e-3 * c.k_n * c.r * c.r);
        prop_assert!((fd - tau).abs() / scale < 1e-6, "fd {fd} vs {tau}");
    }

    #[test]
    fn energy_is_even(c in config(), theta in -10.0..10.0f64) {
        prop_assert_eq!(potential_energy(&c, theta), potential_energy(&c, -theta));
    }

    #[test]
    fn multiples_of_pi_are_equilibria(c in config(), n in -4i32..=4) {
        let tau = torque(&c, n as f64 * PI);
        prop_assert!(tau.abs() < 1e-12 * c.k_n * c.r.max(c.delta_n) * 10.0);
    }

    #[test]
    fn forces_at_zero(c in config()) {
        let f = contact_forces(&c, 0.0);
        prop_assert_eq!(f.f_n, preload_force(&c));
        prop_assert_eq!(f.f_t, 0.0);
    }

    #[test]
    fn margin_ignores_transverse_sign(f_n in -10.0..10.0f64, f_t in -10.0..10.0f64, mu in 0.0..2.0f64) {
        prop_assert_eq!(
            coulomb_margin(&ContactForces { f_n, f_t }, mu),
            coulomb_margin(&ContactForces { f_n, f_t: -f_t }, mu)
        );
    }

    #[test]
    fn eigen_character_follows_threshold(c in config()) {
        let pair = eigenvalues(&linearize(&c));
        let f_p = preload_force(&c);
        let f_p_i = stability_threshold(&c);
        prop_assert_eq!(pair.is_purely_imaginary(), f_p < f_p_i);
        prop_assert_eq!(pair.is_purely_real(), f_p > f_p_i);
    }

    #[test]
    fn threshold_is_linear(c in config(), alpha in 0.1..10.0f64) {
        let scaled_kt = GraspConfig { k_t: alpha * c.k_t, ..c };
        let scaled_r = GraspConfig { r: alpha * c.r, ..c };
        let base = stability_threshold(&c);
        let tol = 4.0 * f64::EPSILON * alpha * base;
        prop_assert!((stability_threshold(&scaled_kt) - alpha * base).abs() <= tol);
        prop_assert!((stability_threshold(&scaled_r) - alpha * base).abs() <= tol);
    }

    #[test]
    fn rest_angle_is_a_minimum_of_energy(c in resting_config()) {
        let theta_r = rest_angle(&c).expect("ratio inside (-1, 1)");
        prop_assert!(theta_r > 0.0 && theta_r < PI);
        prop_assert!(torque(&c, theta_r).abs() < 1e-9 * c.k_n * c.r * c.r);
        let h = 1e-4;
        let curvature = potential_energy(&c, theta_r + h) - 2.0 * potential_energy(&c, theta_r)
            + potential_energy(&c, theta_r - h);
        prop_assert!(curvature > 0.0);
    }

    #[test]
    fn slip_angle_sits_on_the_cone(c in config()) {
        if let Some(theta_f) = slip_angle(&c) {
            let f = contact_forces(&c, theta_f);
            prop_assert!(f.f_n > 0.0);
            prop_assert!((f.f_t.abs() - c.mu * f.f_n).abs() < 1e-9, "residual at {theta_f}");
        }
    }
}

/// Configs whose linear frequency stays below `max_omega` (rad/s), so that
/// RK4 at `dt = 1e-4` resolves the motion.
fn slow_config(max_omega: f64) -> impl Strategy<Value = GraspConfig> {
    config().prop_filter("too stiff for the time step", move |c| {
        let omega = (2.0 * c.r * (c.k_n * c.delta_n + c.k_t * c.r) / c.inertia).sqrt();
        omega < max_omega
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn undamped_integration_is_reversible(
        c in slow_config(30.0),
        share in 0.0..1.0f64,
        theta0 in -0.5..0.5f64,
        rate in -2.0..2.0f64,
    ) {
        let c = c.with_preload(share * stability_threshold(&c));
        let dt = 1e-4;
        let start = SystemState::new(theta0, rate);
        let mut s = start;
        for _ in 0..2000 {
            s = rk4_step(&c, 0.0, s, dt);
        }
        for _ in 0..2000 {
            s = rk4_step(&c, 0.0, s, -dt);
        }
        prop_assert!((s.theta - start.theta).abs() < 1e-8);
        prop_assert!((s.theta_dot - start.theta_dot).abs() < 1e-8);
    }

    #[test]
    fn stable_motion_stays_small(c in slow_config(300.0), theta0 in -0.01..0.01f64) {
        let c = c.with_preload(0.9 * stability_threshold(&c));
        let params = SimParams::new(1e-4, 1.0, 0.0, theta0, 0.0).unwrap();
        let traj = integrate(&c, &params).unwrap();
        let peak = traj.samples.iter().map(|s| s.state.theta.abs()).fold(0.0, f64::max);
        prop_assert!(peak <= 10.0 * theta0.abs());
    }
}
