#![allow(dead_code)]

use gerber_shiu::{Penalty, PenaltyKind, PhaseType, RationalClaim, RiskModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example(delta: f64) -> RiskModel<f64> {
    RiskModel::new(
        1.0,
        1.0,
        delta,
        PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0, 0.5], vec![0.0, -4.0]]).unwrap(),
        RationalClaim::exponential(1.0).unwrap(),
        Penalty::ruin_probability(),
    )
    .unwrap()
}

/// Rates spread far enough apart that no two coincide.
fn spread_rates<R: Rng>(rng: &mut R, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(k);
    while out.len() < k {
        let r = rng.random_range(lo..hi);
        if out.iter().all(|x| (x - r).abs() > 0.25) {
            out.push(r);
        }
    }
    out
}

pub fn random_interclaims<R: Rng>(rng: &mut R, n: usize) -> PhaseType<f64> {
    match rng.random_range(0..3) {
        0 => PhaseType::generalized_erlang(&spread_rates(rng, n, 0.5, 5.0)).unwrap(),
        1 => {
            let rates = spread_rates(rng, n, 0.5, 5.0);
            let probs: Vec<f64> = (1..n).map(|_| rng.random_range(0.2..1.0)).collect();
            PhaseType::coxian(&rates, &probs).unwrap()
        }
        _ => {
            let mut alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = alpha.iter().sum();
            alpha.iter_mut().for_each(|a| *a /= total);
            let rates = spread_rates(rng, n, 0.5, 5.0);
            let sub: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let leave = rng.random_range(0.0..0.8);
                    (0..n)
                        .map(|j| {
                            if i == j {
                                -rates[i]
                            } else if n > 1 {
                                rates[i] * leave / (n - 1) as f64
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            PhaseType::new(alpha, sub).unwrap()
        }
    }
}

pub fn random_claims<R: Rng>(rng: &mut R, m: usize) -> RationalClaim<f64> {
    match (m, rng.random_range(0..2)) {
        (1, _) => RationalClaim::exponential(rng.random_range(0.5..3.0)).unwrap(),
        (_, 0) => RationalClaim::erlang(m as u32, rng.random_range(0.5..3.0) * m as f64).unwrap(),
        _ => {
            let rates = spread_rates(rng, m, 0.5, 4.0);
            let mut w: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            RationalClaim::hyperexponential(&w, &rates).unwrap()
        }
    }
}

pub fn random_penalty<R: Rng>(rng: &mut R) -> Penalty<f64> {
    let w0 = rng.random_range(0.0..2.0);
    let kind = match rng.random_range(0..3) {
        0 => PenaltyKind::Unit,
        1 => PenaltyKind::BivariateExponential { s1: rng.random_range(0.0..1.0), s2: rng.random_range(0.0..1.0) },
        _ => PenaltyKind::DeficitPower { j: rng.random_range(1..3) },
    };
    Penalty::new(kind, w0).unwrap()
}

/// A valid model with `n <= 3` phases and claim order `m <= 3`. The premium
/// rate is set from a random loading in (0.05, 1).
pub fn random_model<R: Rng>(rng: &mut R, delta: f64, unit_penalty: bool) -> RiskModel<f64> {
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=3);
    let inter = random_interclaims(rng, n);
    let claims = random_claims(rng, m);
    let theta = rng.random_range(0.05..1.0);
    let c = (1.0 + theta) * claims.mean() / inter.mean();
    let sigma = rng.random_range(0.3..2.0);
    let penalty = if unit_penalty { Penalty::ruin_probability() } else { random_penalty(rng) };
    RiskModel::new(c, sigma, delta, inter, claims, penalty).unwrap()
}

/// `count` models from a fixed seed; `delta` is drawn per model when `None`.
pub fn model_batch(seed: u64, count: usize, delta: Option<f64>) -> Vec<RiskModel<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = delta.unwrap_or_else(|| rng.random_range(0.0..1.0));
            random_model(&mut rng, d, false)
        })
        .collect()
}
