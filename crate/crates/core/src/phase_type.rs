//! Phase-type interclaim distributions `(alpha, B, b)`.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{faddeev_leverrier, poly_roots, CMatrix, Poly};
use crate::scalar::{cone, cplx, czero, lit, to_f64, Real};

/// Time to absorption of a terminating Markov chain with initial law
/// `alpha`, sub-intensity matrix `B` and exit rates `b = -B e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct PhaseType<T> {
    alpha: Vec<T>,
    sub: Vec<Vec<T>>,
    exit: Vec<T>,
}

impl<T: Real> PhaseType<T> {
    /// Validates `(alpha, B)` and derives the exit vector.
    pub fn new(alpha: Vec<T>, sub: Vec<Vec<T>>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || sub.len() != n || sub.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "alpha has length {n} but B is {}x{}",
                sub.len(),
                sub.first().map_or(0, Vec::len)
            )));
        }
        let exit = sub.iter().map(|row| -row.iter().fold(T::zero(), |a, &x| a + x)).collect();
        let ph = PhaseType { alpha, sub, exit };
        ph.validate()?;
        Ok(ph)
    }

    /// Like [`PhaseType::new`] but also checks a user-supplied exit vector
    /// against `-B e`.
    pub fn with_exit(alpha: Vec<T>, sub: Vec<Vec<T>>, exit: &[T]) -> Result<Self> {
        let ph = Self::new(alpha, sub)?;
        if exit.len() != ph.dim() {
            return Err(Error::Dimension("exit vector length".into()));
        }
        for (i, (&given, &derived)) in exit.iter().zip(&ph.exit).enumerate() {
            if (given - derived).abs() > lit(1e-12) {
                return Err(Error::NotSubIntensity(format!("exit rate {i} is {given} but -B e gives {derived}")));
            }
        }
        Ok(ph)
    }

    pub fn exponential(rate: T) -> Result<Self> {
        Self::generalized_erlang(&[rate])
    }

    /// Bidiagonal representation started in phase 1, each phase passing to
    /// the next at its own rate.
    pub fn generalized_erlang(rates: &[T]) -> Result<Self> {
        let continue_probs = vec![T::one(); rates.len().saturating_sub(1)];
        Self::coxian(rates, &continue_probs)
    }

    /// Coxian: phase `i` is left at rate `rates[i]`, moving to phase `i+1`
    /// with probability `continue_probs[i]` and exiting otherwise.
    pub fn coxian(rates: &[T], continue_probs: &[T]) -> Result<Self> {
        let n = rates.len();
        if n == 0 {
            return Err(Error::InvalidParameter("at least one phase required".into()));
        }
        if continue_probs.len() != n - 1 {
            return Err(Error::InvalidParameter(format!("{n} phases need {} continuation probabilities", n - 1)));
        }
        if let Some(r) = rates.iter().find(|&&r| !(r > T::zero()) || !r.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate {r} must be positive")));
        }
        if continue_probs.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
            return Err(Error::InvalidParameter("continuation probabilities must lie in [0, 1]".into()));
        }
        let mut sub = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            sub[i][i] = -rates[i];
            if i + 1 < n {
                sub[i][i + 1] = rates[i] * continue_probs[i];
            }
        }
        let mut alpha = vec![T::zero(); n];
        alpha[0] = T::one();
        Self::new(alpha, sub)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let tol = lit::<T>(1e-12);
        if let Some(a) = self.alpha.iter().find(|&&a| !(a >= T::zero()) || !a.is_finite()) {
            return Err(Error::NonStochasticAlpha(format!("entry {a} is negative or not finite")));
        }
        let total = self.alpha.iter().fold(T::zero(), |s, &a| s + a);
        if (total - T::one()).abs() > tol {
            return Err(Error::NonStochasticAlpha(format!("entries sum to {total}, not 1")));
        }
        if self.sub.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NotSubIntensity("non-finite entry".into()));
        }
        if self.eigenvalues()?.iter().any(|z| !(z.re < T::zero())) {
            return Err(Error::SingularB);
        }
        let scale = self.sub.iter().flatten().fold(T::one(), |m, x| m.max(x.abs()));
        for i in 0..n {
            if !(self.sub[i][i] < T::zero()) {
                return Err(Error::NotSubIntensity(format!("diagonal entry {i} is not negative")));
            }
            if (0..n).any(|j| j != i && self.sub[i][j] < T::zero()) {
                return Err(Error::NotSubIntensity(format!("row {i} has a negative off-diagonal entry")));
            }
            if self.exit[i] < -tol * scale {
                return Err(Error::NotSubIntensity(format!("row {i} sums to a positive value")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn sub_intensity(&self) -> &[Vec<T>] {
        &self.sub
    }

    pub fn exit(&self) -> &[T] {
        &self.exit
    }

    pub fn alpha_c(&self) -> Vec<Complex<T>> {
        self.alpha.iter().map(|&a| cplx(a)).collect()
    }

    pub fn exit_c(&self) -> Vec<Complex<T>> {
        self.exit.iter().map(|&b| cplx(b)).collect()
    }

    pub fn b_matrix(&self) -> CMatrix<T> {
        CMatrix::from_real_rows(&self.sub).expect("validated square matrix")
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>> {
        let (p, _) = faddeev_leverrier(&self.b_matrix());
        poly_roots(&p)
    }

    /// `k^(s) = alpha (sI - B)^-1 b^T` by a linear solve.
    pub fn lt(&self, s: Complex<T>) -> Result<Complex<T>> {
        let m = self.b_matrix().scaled(-cone::<T>()).add_diagonal(s);
        let x = m.solve(&self.exit_c()).map_err(|_| Error::Pole("s is an eigenvalue of B".into()))?;
        Ok(self.alpha_c().iter().zip(&x).fold(czero(), |acc, (&a, &v)| acc + a * v))
    }

    /// `k^(s)` as `numerator(s) / det(sI - B)`, numerator `alpha adj(sI - B) b^T`.
    pub fn rational_lt(&self) -> (Poly<T>, Poly<T>) {
        let (den, adj) = faddeev_leverrier(&self.b_matrix());
        let alpha = self.alpha_c();
        let exit = self.exit_c();
        let num = adj
            .iter()
            .map(|c| {
                let cb = c.matvec(&exit);
                alpha.iter().zip(&cb).fold(czero(), |acc, (&a, &v)| acc + a * v)
            })
            .collect();
        (Poly::new(num), den)
    }

    /// `alpha (-B)^-1 e^T`.
    pub fn mean(&self) -> T {
        let m = self.b_matrix().scaled(-cone::<T>());
        let x = m.solve(&vec![cone(); self.dim()]).expect("validated B is nonsingular");
        self.alpha.iter().zip(&x).fold(T::zero(), |acc, (&a, v)| acc + a * v.re)
    }

    /// `E[V^2] = 2 alpha (-B)^-2 e^T`.
    pub fn second_moment(&self) -> T {
        let m = self.b_matrix().scaled(-cone::<T>());
        let x = m.solve(&vec![cone(); self.dim()]).expect("validated B is nonsingular");
        let y = m.solve(&x).expect("validated B is nonsingular");
        lit::<T>(2.0) * self.alpha.iter().zip(&y).fold(T::zero(), |acc, (&a, v)| acc + a * v.re)
    }

    /// `K(t) = 1 - alpha e^(tB) e^T`.
    pub fn cdf(&self, t: T) -> Result<T> {
        if t <= T::zero() {
            return Ok(T::zero());
        }
        let e = self.b_matrix().scaled(cplx(t)).expm()?;
        let tail = e.vecmat(&self.alpha_c()).iter().fold(T::zero(), |acc, v| acc + v.re);
        Ok(T::one() - tail)
    }
}

/// Precomputed jump tables for fast sampling of a [`PhaseType`].
#[derive(Debug, Clone)]
pub struct PhaseSampler {
    initial_cdf: Vec<f64>,
    rates: Vec<f64>,
    /// Cumulative jump probabilities per phase; index `n` is absorption.
    jump_cdf: Vec<Vec<f64>>,
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().unwrap_or(&1.0);
    let target = u * total;
    cdf.iter().position(|&c| target < c).unwrap_or(cdf.len() - 1)
}

impl PhaseSampler {
    pub fn new<T: Real>(ph: &PhaseType<T>) -> Self {
        let n = ph.dim();
        let sub: Vec<Vec<f64>> = ph.sub.iter().map(|r| r.iter().map(|&x| to_f64(x)).collect()).collect();
        let rates: Vec<f64> = (0..n).map(|i| -sub[i][i]).collect();
        let jump_cdf = (0..n)
            .map(|i| {
                let exit = to_f64(ph.exit[i]).max(0.0);
                cumulative(
                    (0..n)
                        .map(|j| if j == i { 0.0 } else { sub[i][j] / rates[i] })
                        .chain(std::iter::once(exit / rates[i])),
                )
            })
            .collect();
        PhaseSampler { initial_cdf: cumulative(ph.alpha.iter().map(|&a| to_f64(a))), rates, jump_cdf }
    }

    pub fn dim(&self) -> usize {
        self.rates.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let start = pick(&self.initial_cdf, rng.random::<f64>());
        self.sample_from(start, rng)
    }

    /// Absorption time with the chain forced to start in `phase`.
    pub fn sample_from<R: Rng + ?Sized>(&self, phase: usize, rng: &mut R) -> f64 {
        let n = self.dim();
        let mut state = phase;
        let mut t = 0.0;
        loop {
            let e: f64 = Exp1.sample(rng);
            t += e / self.rates[state];
            let next = pick(&self.jump_cdf[state], rng.random::<f64>());
            if next == n {
                return t;
            }
            state = next;
        }
    }
}

impl PhaseType<f64> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        PhaseSampler::new(self).sample(rng)
    }
}
