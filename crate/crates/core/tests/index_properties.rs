use std::f64::consts::PI;

use hc_core::symplectic_index::{
    reduced_index, rotation_index, rs_index_blocks, rs_index_numeric, BlockGenerator, BlockPath,
    IndexValue, SampledPath, DEFAULT_KERNEL_TOL, DEFAULT_SYMPLECTIC_TOL,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn block() -> impl Strategy<Value = BlockGenerator> {
    prop_oneof![
        (0.1f64..6.0).prop_map(|w| BlockGenerator::rotation(w).unwrap()),
        (0.05f64..3.0, 0.05f64..3.0).prop_map(|(a, b)| BlockGenerator::hyperbolic(a, b).unwrap()),
        Just(BlockGenerator::ConstantIdentity),
    ]
}

/// Keeps rotation angles away from multiples of 2π so the closed form is
/// unambiguous.
fn generic(path: &BlockPath) -> bool {
    path.blocks().iter().all(|b| match *b {
        BlockGenerator::Rotation { omega } => {
            let turns = omega * path.duration() / (2.0 * PI);
            (turns - turns.round()).abs() > 1e-6
        }
        _ => true,
    })
}

fn index_of(path: &BlockPath) -> IndexValue {
    rs_index_numeric(&path.clone().into(), DEFAULT_KERNEL_TOL).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_sum_is_additive(
        left in prop::collection::vec(block(), 1..3),
        right in prop::collection::vec(block(), 1..3),
        t in 0.2f64..8.0,
    ) {
        let p = BlockPath::new(left, t).unwrap();
        let q = BlockPath::new(right, t).unwrap();
        prop_assume!(generic(&p) && generic(&q));
        let sum = p.direct_sum(&q).unwrap();
        prop_assert_eq!(index_of(&sum), index_of(&p) + index_of(&q));
    }

    #[test]
    fn rotation_index_is_monotone_in_time(omega in 0.3f64..5.0, t1 in 0.1f64..6.0, dt in 0.01f64..6.0) {
        prop_assert!(rotation_index(omega * t1) <= rotation_index(omega * (t1 + dt)));
    }

    #[test]
    fn reduced_shift(twice in -40i64..40, n in 2usize..9) {
        let mu = IndexValue::from_twice(twice);
        prop_assert_eq!(reduced_index(mu, n).twice_value(), twice + 2 * (n as i64 - 3));
    }

    #[test]
    fn hyperbolic_only_paths_vanish(a in 0.05f64..4.0, b in 0.05f64..4.0, t in 0.1f64..10.0, copies in 1usize..4) {
        let path = BlockPath::new(vec![BlockGenerator::hyperbolic(a, b).unwrap(); copies], t).unwrap();
        prop_assert_eq!(index_of(&path), IndexValue::ZERO);
    }
}

#[test]
fn numeric_matches_closed_form_on_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut checked = 0;
    while checked < 1000 {
        let blocks: Vec<BlockGenerator> = (0..rng.random_range(1..=4))
            .map(|_| match rng.random_range(0..3) {
                0 => BlockGenerator::rotation(rng.random_range(0.1..6.0)).unwrap(),
                1 => BlockGenerator::hyperbolic(rng.random_range(0.05..3.0), rng.random_range(0.05..3.0)).unwrap(),
                _ => BlockGenerator::ConstantIdentity,
            })
            .collect();
        let path = BlockPath::new(blocks, rng.random_range(0.1..10.0)).unwrap();
        if !generic(&path) {
            continue;
        }
        assert_eq!(index_of(&path), rs_index_blocks(&path), "{path:?}");
        checked += 1;
    }
}

#[test]
fn degenerate_endpoints_match_closed_form() {
    for n in 1..=6 {
        for omega in [1.0, 2.0, 3.5] {
            let t = 2.0 * PI * n as f64 / omega;
            let path = BlockPath::new(vec![BlockGenerator::rotation(omega).unwrap()], t).unwrap();
            assert_eq!(index_of(&path), IndexValue::from_int(2 * n), "n={n} omega={omega}");
        }
    }
}

/// A constant symplectic matrix mixing the first two planes.
fn plane_mixer(dim: usize, s: f64) -> DMatrix<f64> {
    // exp of a symmetric-coupled generator: the shear (x1, y1, x2, y2) ↦
    // (x1, y1 + s x2, x2 + s x1, y2) is symplectic for Ω = diag(J, J).
    let mut p = DMatrix::identity(dim, dim);
    p[(1, 2)] = s;
    p[(3, 0)] = s;
    p
}

#[test]
fn conjugated_coupled_path_keeps_its_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..12 {
        let w1 = rng.random_range(0.5..3.0);
        let w2 = rng.random_range(0.5..3.0);
        let t = rng.random_range(1.0..6.0);
        let path = BlockPath::new(
            vec![BlockGenerator::rotation(w1).unwrap(), BlockGenerator::rotation(w2).unwrap()],
            t,
        )
        .unwrap();
        if !generic(&path) {
            continue;
        }
        let s = rng.random_range(-0.8..0.8);
        let p = plane_mixer(4, s);
        let p_inv = p.clone().try_inverse().unwrap();
        let samples = 4000;
        let times: Vec<f64> = (0..=samples).map(|i| t * i as f64 / samples as f64).collect();
        let matrices: Vec<DMatrix<f64>> = times.iter().map(|&u| &p * path.at(u) * &p_inv).collect();
        let sampled = SampledPath::new(times, matrices, DEFAULT_SYMPLECTIC_TOL).unwrap();
        let coupled = rs_index_numeric(&sampled.into(), DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(coupled, rs_index_blocks(&path), "w1={w1} w2={w2} t={t} s={s}");
    }
}

#[test]
fn sampled_and_block_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..20 {
        let path = BlockPath::new(
            vec![
                BlockGenerator::rotation(rng.random_range(0.5..3.0)).unwrap(),
                BlockGenerator::hyperbolic(rng.random_range(0.1..1.0), rng.random_range(0.1..1.0)).unwrap(),
            ],
            rng.random_range(1.0..6.0),
        )
        .unwrap();
        if !generic(&path) {
            continue;
        }
        let sampled = rs_index_numeric(&path.to_sampled(3000).into(), DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(sampled, rs_index_blocks(&path));
    }
}
