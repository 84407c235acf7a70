use nalgebra::{DMatrix, DVector};
use normvar_core::var::Coefficients;
use normvar_core::{GroupGame, SteadyState};
use normvar_oracles::grid_argmax;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_game(rng: &mut ChaCha8Rng, r: usize, radius: f64) -> GroupGame {
    let b = DVector::from_fn(r, |_, _| rng.random_range(-2.0..2.0));
    let c = DVector::from_fn(r, |_, _| rng.random_range(0.5..3.0));
    let raw = DMatrix::from_fn(r, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let g = GroupGame::unnamed(b.clone(), c.clone(), raw.clone()).unwrap();
    let scale = radius / g.spectral_radius();
    GroupGame::unnamed(b, c, raw * scale).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, r: usize, half_width: f64) -> DVector<f64> {
    DVector::from_fn(r, |_, _| rng.random_range(-half_width..half_width))
}

#[test]
fn best_response_beats_random_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let r = rng.random_range(1..5);
        let radius = rng.random_range(0.1..1.5);
        let g = random_game(&mut rng, r, radius);
        let prev = random_vec(&mut rng, r, 5.0);
        let br = g.best_response(&prev);
        for i in 0..r {
            let best = g.utility(i, br[i], &prev);
            for _ in 0..1000 {
                let x: f64 = rng.random_range(-50.0..50.0);
                let u = g.utility(i, x, &prev);
                assert!(best >= u - 1e-9 * best.abs().max(1.0), "x = {x} beats best response {}", br[i]);
            }
        }
    }
}

#[test]
fn grid_search_agrees_with_best_response() {
    let g = GroupGame::unnamed(
        DVector::from_vec(vec![1.0, -0.4]),
        DVector::from_vec(vec![2.0, 1.3]),
        DMatrix::from_row_slice(2, 2, &[0.5, 0.2, -0.3, 0.1]),
    )
    .unwrap();
    let prev = DVector::from_vec(vec![2.0, -1.5]);
    let br = g.best_response(&prev);
    for i in 0..2 {
        let (x, _) = grid_argmax(|a| g.utility(i, a, &prev), -10.0, 10.0, 1e-4);
        assert!((x - br[i]).abs() <= 1e-4, "grid {x} vs best response {}", br[i]);
    }
}

#[test]
fn steady_state_is_a_fixed_point_and_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let r = rng.random_range(1..5);
        let radius = rng.random_range(0.05..0.95);
        let g = random_game(&mut rng, r, radius);
        let SteadyState::Stable { point, radius } = g.steady_state().unwrap() else {
            panic!("radius < 1 must be stable");
        };
        assert!(radius < 1.0);
        let br = g.best_response(&point);
        assert!((br - &point).amax() <= 1e-10);
        let traj = g.simulate(&random_vec(&mut rng, r, 10.0), 10_000);
        assert!(!traj.diverged);
        assert!((traj.last() - &point).amax() <= 1e-8);
    }
}

#[test]
fn explosive_games_do_not_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let r = rng.random_range(1..5);
        let radius = rng.random_range(1.05..2.0);
        let g = random_game(&mut rng, r, radius);
        assert!(matches!(g.steady_state(), Ok(SteadyState::Divergent { .. })));
        let (constants, m) = g.to_var_params();
        let fixed = (DMatrix::identity(r, r) - m).lu().solve(&constants).unwrap();
        let a0 = random_vec(&mut rng, r, 5.0);
        let traj = g.simulate(&a0, 400);
        assert!((traj.last() - &fixed).norm() >= (&a0 - &fixed).norm());
    }
}

#[test]
fn three_group_steady_state_matches_long_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_game(&mut rng, 3, 0.8);
    let ss = g.steady_state().unwrap();
    let traj = g.simulate(&DVector::zeros(3), 10_000);
    assert!((traj.last() - ss.point().unwrap()).amax() <= 1e-8);
}

#[test]
fn simulation_equals_var_iteration_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let r = rng.random_range(1..6);
        let radius = rng.random_range(0.2..1.2);
        let g = random_game(&mut rng, r, radius);
        let (constants, pi1) = g.to_var_params();
        let a0 = random_vec(&mut rng, r, 3.0);
        let sim = g.simulate(&a0, 60);
        let fc = Coefficients::new(constants, vec![pi1]).forecast(std::slice::from_ref(&a0), 60).unwrap();
        assert_eq!(&sim.actions[1..], &fc[..sim.actions.len() - 1]);
    }
}

#[test]
fn common_positive_scaling_leaves_best_response() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let r = rng.random_range(1..5);
        let g = random_game(&mut rng, r, 0.7);
        let factors = DVector::from_fn(r, |_, _| rng.random_range(0.01..100.0));
        let scaled = GroupGame::unnamed(
            g.b.component_mul(&factors),
            g.c.component_mul(&factors),
            DMatrix::from_fn(r, r, |i, j| g.lambda[(i, j)] * factors[i]),
        )
        .unwrap();
        let prev = random_vec(&mut rng, r, 4.0);
        let (x, y) = (g.best_response(&prev), scaled.best_response(&prev));
        assert!((x - y).amax() <= 1e-12 * 10.0);
    }
}

#[test]
fn round_trip_through_unit_cost_game() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let g = random_game(&mut rng, 3, 0.6);
    let (constants, pi1) = g.to_var_params();
    let back = GroupGame::from_var_params(&constants, &pi1).unwrap();
    assert_eq!(back.to_var_params(), (constants.clone(), pi1.clone()));
    assert_eq!(back.b, constants);
    assert_eq!(back.lambda, pi1);
}
