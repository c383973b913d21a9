//! The perturbed renewal risk model `U(t) = u + c t - sum Z_i + sigma B(t)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::claims::{Penalty, RationalClaim};
use crate::error::{Error, Result};
use crate::phase_type::PhaseType;
use crate::polyalg::Poly;
use crate::scalar::{cplx, lit, to_f64, Real};

/// Premium rate, volatility, discount force, interclaim and claim laws and
/// penalty. Validated on construction and immutable afterwards; the initial
/// capital `u` is an argument of the solution, not part of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct RiskModel<T> {
    c: T,
    sigma: T,
    delta: T,
    interclaims: PhaseType<T>,
    claims: RationalClaim<T>,
    penalty: Penalty<T>,
}

impl<T: Real> RiskModel<T> {
    pub fn new(
        c: T,
        sigma: T,
        delta: T,
        interclaims: PhaseType<T>,
        claims: RationalClaim<T>,
        penalty: Penalty<T>,
    ) -> Result<Self> {
        let model = RiskModel { c, sigma, delta, interclaims, claims, penalty };
        model.validate()?;
        Ok(model)
    }

    /// Checks every admissibility condition and returns the relative safety
    /// loading `c E[V] / E[Z] - 1`.
    pub fn validate(&self) -> Result<T> {
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!("premium rate c = {} must be positive", self.c)));
        }
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::ZeroVolatility);
        }
        if !(self.delta >= T::zero()) || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("discount force delta = {} must be nonnegative", self.delta)));
        }
        self.interclaims.validate()?;
        self.penalty.validate()?;
        let loading = self.loading();
        if !(loading > T::zero()) {
            return Err(Error::NonpositiveLoading { loading: to_f64(loading) });
        }
        Ok(loading)
    }

    pub fn loading(&self) -> T {
        self.c * self.interclaims.mean() / self.claims.mean() - T::one()
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// `sigma^2 / 2`.
    pub fn half_var(&self) -> T {
        self.sigma * self.sigma / lit(2.0)
    }

    pub fn interclaims(&self) -> &PhaseType<T> {
        &self.interclaims
    }

    pub fn claims(&self) -> &RationalClaim<T> {
        &self.claims
    }

    pub fn penalty(&self) -> &Penalty<T> {
        &self.penalty
    }

    /// Number of phases `n`.
    pub fn phases(&self) -> usize {
        self.interclaims.dim()
    }

    /// Claim order `m`.
    pub fn claim_order(&self) -> usize {
        self.claims.order()
    }

    /// `a(s) = sigma^2/2 s^2 + c s - delta`.
    pub fn a_of_s(&self, s: Complex<T>) -> Complex<T> {
        s * s * self.half_var() + s * self.c - cplx(self.delta)
    }

    pub fn a_poly(&self) -> Poly<T> {
        Poly::from_real(&[-self.delta, self.c, self.half_var()])
    }

    pub fn with_delta(&self, delta: T) -> Result<Self> {
        Self::new(self.c, self.sigma, delta, self.interclaims.clone(), self.claims.clone(), self.penalty)
    }

    pub fn with_penalty(&self, penalty: Penalty<T>) -> Result<Self> {
        Self::new(self.c, self.sigma, self.delta, self.interclaims.clone(), self.claims.clone(), penalty)
    }
}
