mod common;

use common::example;
use gerber_shiu::simulate::estimate;
use gerber_shiu::{solve, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(model: &gerber_shiu::RiskModel64, u: f64, paths: usize, seed: u64) -> SimConfig {
    SimConfig::new(paths, SimConfig::default_t_max(model, u).unwrap(), seed)
}

#[test]
fn discounted_penalty_matches_analytic() {
    let m = example(0.1);
    let sol = solve(&m).unwrap();
    let est = estimate(&m, 1.0, &config(&m, 1.0, 40_000, 11)).unwrap();
    let z = (est.penalty - sol.value(1.0)) / est.se_penalty;
    assert!(z.abs() < 3.0, "estimate {} analytic {} z {z}", est.penalty, sol.value(1.0));
}

#[test]
fn forced_start_phase_matches_phase_value() {
    let m = example(0.0);
    let sol = solve(&m).unwrap();
    for phase in 0..2 {
        let mut cfg = config(&m, 1.5, 30_000, 12 + phase as u64);
        cfg.initial_phase = Some(phase);
        let est = estimate(&m, 1.5, &cfg).unwrap();
        let want = sol.phase_value(phase, 1.5);
        let z = (est.penalty - want) / est.se_penalty;
        assert!(z.abs() < 3.0, "phase {phase}: estimate {} analytic {want}", est.penalty);
    }
}

#[test]
fn grid_refinement_does_not_move_estimates() {
    let m = example(0.0);
    let coarse = estimate(&m, 0.5, &config(&m, 0.5, 20_000, 13)).unwrap();
    let mut cfg = config(&m, 0.5, 20_000, 14);
    cfg.grid_step = 0.002;
    let fine = estimate(&m, 0.5, &cfg).unwrap();
    for (a, b, sa, sb) in [
        (coarse.psi_w, fine.psi_w, coarse.se_psi_w, fine.se_psi_w),
        (coarse.psi_d, fine.psi_d, coarse.se_psi_d, fine.se_psi_d),
    ] {
        let z = (a - b) / (sa * sa + sb * sb).sqrt();
        assert!(z.abs() < 3.0, "{a} vs {b}");
    }
}

#[test]
fn components_add_up_to_a_probability() {
    let m = example(0.0);
    let est = estimate(&m, 2.0, &config(&m, 2.0, 20_000, 15)).unwrap();
    let se = (est.se_psi_w.powi(2) + est.se_psi_d.powi(2)).sqrt();
    assert!(est.psi_w + est.psi_d <= 1.0 + 3.0 * se);
    assert!(est.n_ruin_claim + est.n_ruin_osc <= est.n_paths);
    assert!((est.psi_w - est.n_ruin_claim as f64 / est.n_paths as f64).abs() < 1e-12);
}

#[test]
fn random_models_match_analytic_penalty() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for k in 0..4 {
        let m = common::random_model(&mut rng, 0.05 + 0.1 * k as f64, false);
        let sol = solve(&m).unwrap();
        let u = 0.8;
        let est = estimate(&m, u, &config(&m, u, 20_000, 100 + k)).unwrap();
        let want = sol.value(u);
        let z = (est.penalty - want) / est.se_penalty.max(1e-12);
        assert!(z.abs() < 3.5, "model {k}: estimate {} ± {} analytic {want}", est.penalty, est.se_penalty);
    }
}

#[test]
fn seeds_give_distinct_streams() {
    let m = example(0.0);
    let a = estimate(&m, 1.0, &SimConfig::new(2_000, 300.0, 1)).unwrap();
    let b = estimate(&m, 1.0, &SimConfig::new(2_000, 300.0, 2)).unwrap();
    let a2 = estimate(&m, 1.0, &SimConfig::new(2_000, 300.0, 1)).unwrap();
    assert_eq!(a, a2);
    assert_ne!(a, b);
}
