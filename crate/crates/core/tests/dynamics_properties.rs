mod common;

use common::{random_handle, random_point_on_level};
use hc_core::handle_dynamics::{
    enumerate_orbits, flow_closed_form, is_principal_tuned, orbit_block_path, orbit_index,
    orbit_nondegenerate, orbit_rs_index, segment_index_growth, tune_principal, ActionCutoff,
    HandlePoint, ModelHandle, DEFAULT_BELT_SIZE,
};
use hc_core::rational::{q_int, Q};
use hc_core::symplectic_index::{rs_index_blocks, IndexValue};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_flow_is_a_group(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_handle(&mut rng, 2..=4);
        let p = random_point_on_level(&mut rng, &h, 0.3);
        let two_step = flow_closed_form(&h, &flow_closed_form(&h, &p, s), t);
        let one_step = flow_closed_form(&h, &p, s + t);
        prop_assert!(one_step.max_scaled_difference(&two_step) < 1e-9);
    }

    #[test]
    fn orbit_index_closed_form_matches_assembled_path(seed in any::<u64>(), m in 1u64..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_handle(&mut rng, 2..=4);
        for l in h.planes() {
            let exact = orbit_rs_index(&h, l, m).unwrap();
            let path = orbit_block_path(&h, l, m).unwrap();
            // the floating-point closed form only agrees off the degenerate locus
            if orbit_nondegenerate(&h, l, m) {
                prop_assert_eq!(rs_index_blocks(&path), exact);
            }
        }
    }

    #[test]
    fn tuned_principal_orbits_have_the_principal_grading(seed in any::<u64>(), n_o in 1u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = tune_principal(&random_handle(&mut rng, 2..=5), n_o);
        prop_assert!(is_principal_tuned(&h, n_o));
        let (n, k) = (h.n() as i64, h.k() as i64);
        for m in 1..=n_o {
            let idx = orbit_index(&h, h.n(), m).unwrap();
            prop_assert_eq!(idx.reduced, IndexValue::from_int(2 * n - k - 4 + 2 * m as i64));
        }
    }

    #[test]
    fn enumeration_is_sorted_and_complete(seed in any::<u64>(), cap in 1i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_handle(&mut rng, 2..=4);
        let cutoff = q_int(cap);
        let orbits = enumerate_orbits(&h, &ActionCutoff::PiMultiple(cutoff.clone())).unwrap();
        prop_assert!(orbits.windows(2).all(|w| w[0].action_over_pi <= w[1].action_over_pi));
        // brute-force count of m·c_l²·level ≤ cap
        let mut expected = 0usize;
        for l in h.planes() {
            let unit: Q = h.c_sq_of(l).unwrap() * h.level();
            let mut m = 1i64;
            while &unit * q_int(m) <= cutoff {
                expected += 1;
                m += 1;
            }
        }
        prop_assert_eq!(orbits.len(), expected);
    }
}

#[test]
fn halving_plane_widths_doubles_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0101);
    let base = ModelHandle::new(3, 1, q_int(2), q_int(1), vec![common::q(1, 20), common::q(1, 30)], q_int(1)).unwrap();
    for _ in 0..10 {
        let p = random_point_on_level(&mut rng, &base, 0.02);
        let halved = base
            .with_c_sq(base.c_sq().iter().map(|c| c / q_int(2)).collect())
            .unwrap();
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let q = HandlePoint::new(p.x.clone(), p.y.clone(), p.z.iter().map(|z| z * scale).collect());
        let action = 2.0;
        let a = segment_index_growth(&base, &p, action, DEFAULT_BELT_SIZE).unwrap();
        let b = segment_index_growth(&halved, &q, action, DEFAULT_BELT_SIZE).unwrap();
        assert!((b.hamiltonian_time - a.hamiltonian_time).abs() < 1e-12 * a.hamiltonian_time);
        assert!((b.rotation_angle - 2.0 * a.rotation_angle).abs() < 1e-9 * b.rotation_angle);
        assert!(b.mu_segment >= a.mu_segment);
    }
}

#[test]
fn segment_index_tracks_rotation_count() {
    let h = ModelHandle::new(2, 0, q_int(2), q_int(1), vec![common::q(1, 3), common::q(1, 5)], q_int(1)).unwrap();
    let z = vec![
        Complex64::new((0.5f64 / 3.0).sqrt(), 0.0),
        Complex64::new(0.0, (0.5f64 / 5.0).sqrt()),
    ];
    let p = HandlePoint::new(vec![], vec![], z);
    for action in [0.5, 1.3, 4.0, 9.7] {
        let g = segment_index_growth(&h, &p, action, DEFAULT_BELT_SIZE).unwrap();
        // 0-handle: action = level·time
        assert!((g.hamiltonian_time - action).abs() < 1e-12);
        let expected: i64 = [3.0, 5.0]
            .iter()
            .map(|inv_c: &f64| {
                let turns = 2.0 * inv_c * action / (2.0 * std::f64::consts::PI);
                2 * turns.floor() as i64 + 1
            })
            .sum();
        assert_eq!(g.mu_segment, IndexValue::from_int(expected));
        assert!(g.exceeds_bound());
        assert!((g.rate - 16.0 / std::f64::consts::PI / 10.0).abs() < 1e-12);
    }
}
