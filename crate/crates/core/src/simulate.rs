//! Monte Carlo simulation of the perturbed risk process, used as an
//! independent check on the analytic solution.
//!
//! Between claims the surplus is a drifted Brownian motion. It is advanced
//! in sub-steps; after each sub-step the chance that the path dipped below
//! zero is the Brownian-bridge crossing probability
//! `exp(-2 x0 x1 / (sigma^2 h))`. Sub-steps are short near zero and grow
//! with the distance to zero, so the recorded ruin time is accurate to
//! about `grid_step` while far-from-ruin stretches cost little.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::claims::{ClaimSampler, Penalty};
use crate::error::{Error, Result};
use crate::lundberg::find_roots;
use crate::model::RiskModel;
use crate::phase_type::PhaseSampler;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_paths: usize,
    /// Horizon; paths still alive at `t_max` count as surviving.
    pub t_max: f64,
    /// Sub-step length used near zero.
    pub grid_step: f64,
    pub seed: u64,
    /// Start the first interclaim time in this phase instead of drawing it
    /// from `alpha`.
    pub initial_phase: Option<usize>,
}

impl SimConfig {
    pub fn new(n_paths: usize, t_max: f64, seed: u64) -> Self {
        SimConfig { n_paths, t_max, grid_step: 0.01, seed, initial_phase: None }
    }

    /// A horizon long enough for the model: the time the mean surplus needs
    /// to climb `levels / R_min` above `u`, where `R_min` is the smallest
    /// decay rate of the solution, with a floor of 100.
    pub fn default_t_max(model: &RiskModel<f64>, u: f64) -> Result<f64> {
        let roots = find_roots(model)?;
        let r_min = roots.rs.iter().map(|r| r.re).fold(f64::INFINITY, f64::min);
        let drift = model.c() - model.claims().mean() / model.interclaims().mean();
        let levels = 12.0;
        Ok(((u + levels / r_min) / drift).max(100.0))
    }

    fn validate(&self, phases: usize) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
        }
        if !(self.t_max > 0.0) || !(self.grid_step > 0.0) {
            return Err(Error::InvalidParameter("t_max and grid_step must be positive".into()));
        }
        if let Some(p) = self.initial_phase {
            if p >= phases {
                return Err(Error::Dimension(format!("initial phase {p} out of range for {phases} phases")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Survived,
    RuinClaim { time: f64, surplus_before: f64, deficit: f64 },
    RuinOscillation { time: f64 },
}

impl Outcome {
    /// `e^(-delta T) w(U(T-), |U(T)|)`, or `e^(-delta T) w0`, or 0.
    pub fn discounted_penalty(&self, delta: f64, penalty: &Penalty<f64>) -> f64 {
        match *self {
            Outcome::Survived => 0.0,
            Outcome::RuinClaim { time, surplus_before, deficit } => {
                (-delta * time).exp() * penalty.w(surplus_before, deficit)
            }
            Outcome::RuinOscillation { time } => (-delta * time).exp() * penalty.w0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub psi_w: f64,
    pub psi_d: f64,
    pub penalty: f64,
    pub se_psi_w: f64,
    pub se_psi_d: f64,
    pub se_penalty: f64,
    pub n_ruin_claim: usize,
    pub n_ruin_osc: usize,
    pub n_paths: usize,
}

/// Precomputed samplers for one model and configuration.
#[derive(Debug, Clone)]
pub struct PathSampler {
    c: f64,
    sigma: f64,
    phases: PhaseSampler,
    claims: ClaimSampler,
    t_max: f64,
    grid_step: f64,
    initial_phase: Option<usize>,
}

impl PathSampler {
    pub fn new(model: &RiskModel<f64>, config: &SimConfig) -> Result<Self> {
        config.validate(model.phases())?;
        Ok(PathSampler {
            c: model.c(),
            sigma: model.sigma(),
            phases: PhaseSampler::new(model.interclaims()),
            claims: ClaimSampler::new(model.claims()),
            t_max: config.t_max,
            grid_step: config.grid_step,
            initial_phase: config.initial_phase,
        })
    }

    /// Runs the diffusion from level `x` at time `t` for `span` time units.
    /// Returns the level at the end, or the ruin time.
    fn diffuse<R: Rng + ?Sized>(
        &self,
        mut x: f64,
        mut t: f64,
        span: f64,
        rng: &mut R,
    ) -> std::result::Result<f64, f64> {
        let end = t + span;
        let var = self.sigma * self.sigma;
        while t < end {
            let far = x / (8.0 * self.sigma);
            let h = self.grid_step.max(far * far).min(end - t);
            let z: f64 = StandardNormal.sample(rng);
            let next = x + self.c * h + self.sigma * h.sqrt() * z;
            t = if end - t <= h { end } else { t + h };
            if next <= 0.0 {
                return Err(t);
            }
            let exponent = 2.0 * x * next / (var * h);
            if exponent < 745.0 && rng.random::<f64>() < (-exponent).exp() {
                return Err(t);
            }
            x = next;
        }
        Ok(x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, u: f64, rng: &mut R) -> Outcome {
        if u <= 0.0 {
            return Outcome::RuinOscillation { time: 0.0 };
        }
        let mut x = u;
        let mut t = 0.0;
        let mut first = true;
        loop {
            let v = match (first, self.initial_phase) {
                (true, Some(p)) => self.phases.sample_from(p, rng),
                _ => self.phases.sample(rng),
            };
            first = false;
            let span = v.min(self.t_max - t);
            match self.diffuse(x, t, span, rng) {
                Err(time) => return Outcome::RuinOscillation { time },
                Ok(level) => x = level,
            }
            t += v;
            if t >= self.t_max {
                return Outcome::Survived;
            }
            let z = self.claims.sample(rng);
            if z > x {
                return Outcome::RuinClaim { time: t, surplus_before: x, deficit: z - x };
            }
            if z == x {
                return Outcome::RuinOscillation { time: t };
            }
            x -= z;
        }
    }
}

/// One path of the surplus process started at `u`.
pub fn sample_path<R: Rng + ?Sized>(
    model: &RiskModel<f64>,
    u: f64,
    config: &SimConfig,
    rng: &mut R,
) -> Result<Outcome> {
    Ok(PathSampler::new(model, config)?.sample(u, rng))
}

/// The random stream for path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn mean_and_se(values: impl Iterator<Item = f64>, n: usize) -> (f64, f64) {
    let (mut s, mut s2) = (Compensated::default(), Compensated::default());
    for v in values {
        s.add(v);
        s2.add(v * v);
    }
    let nf = n as f64;
    let mean = s.value() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((s2.value() - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Simulates `config.n_paths` independent paths from `u`. Path `k` uses its
/// own stream of the seeded generator, so results do not depend on the
/// thread count.
pub fn simulate_outcomes(model: &RiskModel<f64>, u: f64, config: &SimConfig) -> Result<Vec<Outcome>> {
    let sampler = PathSampler::new(model, config)?;
    Ok((0..config.n_paths as u64).into_par_iter().map(|k| sampler.sample(u, &mut path_rng(config.seed, k))).collect())
}

pub fn estimate(model: &RiskModel<f64>, u: f64, config: &SimConfig) -> Result<SimEstimate> {
    let outcomes = simulate_outcomes(model, u, config)?;
    Ok(summarize(&outcomes, model.delta(), model.penalty()))
}

pub fn summarize(outcomes: &[Outcome], delta: f64, penalty: &Penalty<f64>) -> SimEstimate {
    let n = outcomes.len();
    let claim = |o: &Outcome| matches!(o, Outcome::RuinClaim { .. });
    let osc = |o: &Outcome| matches!(o, Outcome::RuinOscillation { .. });
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let (psi_w, se_psi_w) = mean_and_se(outcomes.iter().map(|o| indicator(claim(o))), n);
    let (psi_d, se_psi_d) = mean_and_se(outcomes.iter().map(|o| indicator(osc(o))), n);
    let (pen, se_penalty) = mean_and_se(outcomes.iter().map(|o| o.discounted_penalty(delta, penalty)), n);
    SimEstimate {
        psi_w,
        psi_d,
        penalty: pen,
        se_psi_w,
        se_psi_d,
        se_penalty,
        n_ruin_claim: outcomes.iter().filter(|o| claim(o)).count(),
        n_ruin_osc: outcomes.iter().filter(|o| osc(o)).count(),
        n_paths: n,
    }
}
