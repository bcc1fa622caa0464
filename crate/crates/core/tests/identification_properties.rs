use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use softgrasp_core::friction::{fit_friction, resolve_forces, segment_phases, TraceSample};
use softgrasp_core::optim::{evaluate_candidate, max_stable_preload, Axis, GripCandidate, GripContext, Objective};
use softgrasp_core::stiffness::{estimate_stiffness, Direction, StiffnessMap, StiffnessProbe, StiffnessRow};
use softgrasp_core::synthetic::SyntheticFriction;

/// Random sliding experiment whose stick ramp ends 10 to 15 mm into a 30 mm
/// pull, leaving room for a clear slide window.
fn random_experiment(rng: &mut ChaCha8Rng, sigma: f64) -> SyntheticFriction {
    let k_y = rng.random_range(100.0..2000.0);
    let mu = rng.random_range(0.3..1.0);
    let stick = rng.random_range(10e-3..15e-3);
    SyntheticFriction {
        k_y,
        mu,
        f_n: k_y * stick / mu,
        noise_sigma: sigma,
        ..SyntheticFriction::default()
    }
}

#[test]
fn friction_round_trip_over_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let sigma = rng.random_range(0.0..=0.05);
        let gen = random_experiment(&mut rng, sigma);
        let mut noise = ChaCha8Rng::seed_from_u64(rng.random());
        let trace = gen.trace(|| noise.sample(StandardNormal)).unwrap();
        let seg = segment_phases(&trace).unwrap();
        let fit = fit_friction(&trace, &seg).unwrap();
        let e_k = (fit.k_y / gen.k_y - 1.0).abs();
        let e_mu = (fit.mu / gen.mu - 1.0).abs();
        worst = (worst.0.max(e_k), worst.1.max(e_mu));
        assert!(e_k < 0.02 && e_mu < 0.02, "{gen:?}: k_y {} mu {}", fit.k_y, fit.mu);
    }
    println!("worst relative error: k_y {:.4}, mu {:.4}", worst.0, worst.1);
}

#[test]
fn boundaries_ignore_force_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let gen = SyntheticFriction {
            transition: rng.random_range(0.0..3e-3),
            ..random_experiment(&mut rng, 0.03)
        };
        let trace = gen.trace(|| rng.sample(StandardNormal)).unwrap();
        let base = segment_phases(&trace).unwrap();
        for factor in [0.25, 3.7, 10.0] {
            let scaled = segment_phases(&trace.scaled_forces(factor)).unwrap();
            assert_eq!((scaled.stick_end, scaled.slide_start), (base.stick_end, base.slide_start));
        }
    }
}

fn probe() -> impl Strategy<Value = StiffnessProbe> {
    (-0.01..0.01f64, -0.01..0.01f64, -20.0..20.0f64, -20.0..20.0f64)
        .prop_filter("zero displacement", |(x0, x1, _, _)| x0 != x1)
        .prop_map(|(x0, x1, f0, f1)| StiffnessProbe {
            direction: Direction::Y,
            x0,
            x1,
            f0,
            f1,
            pressure: 0.0,
            offset: 0.0,
        })
}

fn bilinear(p: f64, o: f64) -> StiffnessRow {
    StiffnessRow {
        pressure: p,
        offset: o,
        k_x: 100.0 + 1e-3 * p + 2000.0 * o + 0.05 * p * o,
        k_y: 900.0 + 2e-3 * p - 1000.0 * o,
        k_z: 300.0 + 5000.0 * o + 0.01 * p * o,
        f_y: 1.0 + 2e-5 * p + 10.0 * o,
    }
}

fn bilinear_map() -> StiffnessMap {
    let mut rows = Vec::new();
    for p in [0.4e5, 0.8e5, 1.2e5, 2.0e5] {
        for o in [0.0, 0.01, 0.015, 0.03] {
            rows.push(bilinear(p, o));
        }
    }
    StiffnessMap::new(rows).unwrap()
}

proptest! {
    #[test]
    fn normal_force_is_a_norm(f_x in -1e3..1e3f64, f_y in -1e3..1e3f64, f_z in -1e3..1e3f64) {
        let f = resolve_forces(&TraceSample { t: 0.0, displacement: 0.0, f_x, f_y, f_z });
        prop_assert!(f.f_n >= 0.0);
        let sq = f_x * f_x + f_z * f_z;
        prop_assert!((f.f_n * f.f_n - sq).abs() <= 4.0 * f64::EPSILON * sq);
        prop_assert_eq!(f.f_t, f_y);
    }

    #[test]
    fn secant_stiffness_symmetries(p in probe()) {
        let k = estimate_stiffness(&p).unwrap();
        let swapped = StiffnessProbe { x0: p.x1, x1: p.x0, f0: p.f1, f1: p.f0, ..p };
        prop_assert_eq!(estimate_stiffness(&swapped).unwrap(), k);
        let forces_only = StiffnessProbe { f0: p.f1, f1: p.f0, ..p };
        prop_assert_eq!(estimate_stiffness(&forces_only).unwrap(), -k);
    }

    #[test]
    fn bilinear_map_is_recovered(p in 0.4e5..2.0e5f64, o in 0.0..0.03f64) {
        let got = bilinear_map().query(p, o).unwrap();
        let want = bilinear(p, o);
        prop_assert!((got.k_x - want.k_x).abs() < 1e-9);
        prop_assert!((got.k_y - want.k_y).abs() < 1e-9);
        prop_assert!((got.k_z - want.k_z).abs() < 1e-9);
        prop_assert!((got.f_y - want.f_y).abs() < 1e-9);
    }

    #[test]
    fn query_is_continuous_across_cells(o in 0.0..0.03f64, side in 0usize..2) {
        // Piecewise data, so continuity is not inherited from a global formula.
        let mut rows = Vec::new();
        for (i, p) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            for (j, off) in [0.0, 0.01, 0.03].into_iter().enumerate() {
                let k = ((i * 7 + j * 3) % 5) as f64 * 100.0;
                rows.push(StiffnessRow { pressure: p, offset: off, k_x: k, k_y: k, k_z: k, f_y: k });
            }
        }
        let map = StiffnessMap::new(rows).unwrap();
        let knot = 2.0;
        let eps = 1e-10;
        let at = map.query(knot, o).unwrap().k_x;
        let near = map.query(if side == 0 { knot - eps } else { knot + eps }, o).unwrap().k_x;
        prop_assert!((at - near).abs() < 1e-6);
    }

    #[test]
    fn knot_verdicts_match_raw_rows(mu in 0.2..1.2f64, share in 1.0..3.0f64) {
        let map = bilinear_map();
        let ctx = GripContext { mu, inertia: 1e-4, finger_count_share: share };
        for row in map.rows() {
            for axis in [Axis::X, Axis::Z] {
                let cand = GripCandidate { pressure: row.pressure, offset: row.offset, object_radius: 0.02, axis };
                let v = evaluate_candidate(&map, &cand, &ctx).unwrap();
                let k_t = if axis == Axis::X { row.k_z } else { row.k_x };
                prop_assert_eq!(v.stable, share * row.f_y < k_t * 0.02);
            }
        }
    }

    #[test]
    fn optimizer_ignores_row_order(seed in any::<u64>()) {
        let map = bilinear_map();
        let mut rows = map.rows().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..rows.len()).rev() {
            rows.swap(i, rng.random_range(0..=i));
        }
        let shuffled = StiffnessMap::new(rows).unwrap();
        let ctx = GripContext::new(0.6, 1e-4);
        for objective in [Objective::MaxMargin, Objective::MaxPreloadStable, Objective::MaxPreloadNoSlip] {
            let a = max_stable_preload(&map, 0.004, Axis::X, &ctx, objective, 2).unwrap();
            let b = max_stable_preload(&shuffled, 0.004, Axis::X, &ctx, objective, 2).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn allowing_rest_rotation_never_lowers_capacity(r in 0.002..0.02f64, mu in 0.2..1.5f64) {
        let map = bilinear_map();
        let ctx = GripContext::new(mu, 1e-4);
        let stable = max_stable_preload(&map, r, Axis::X, &ctx, Objective::MaxPreloadStable, 1).unwrap();
        let no_slip = max_stable_preload(&map, r, Axis::X, &ctx, Objective::MaxPreloadNoSlip, 1).unwrap();
        if stable.feasible {
            prop_assert!(no_slip.feasible);
            prop_assert!(no_slip.best.f_y >= stable.best.f_y);
        }
    }
}
