//! Claim amounts from the rational family and penalty schemes.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Term};
use crate::polyalg::{check_separation, poly_roots, Poly};
use crate::scalar::{binomial, cone, cplx, cpowi, factorial, lit, to_f64, Real};

/// Claim-size law whose density has Laplace transform `r_top(s) / r_bot(s)`
/// with `r_bot` monic of degree `m` and Hurwitz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct RationalClaim<T> {
    r_top: Poly<T>,
    r_bot: Poly<T>,
    density: ExpPoly<T>,
}

impl<T: Real> RationalClaim<T> {
    pub fn exponential(beta: T) -> Result<Self> {
        Self::erlang(1, beta)
    }

    pub fn erlang(shape: u32, beta: T) -> Result<Self> {
        if shape == 0 {
            return Err(Error::InvalidParameter("Erlang shape must be at least 1".into()));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("rate {beta} must be positive")));
        }
        let b = cplx(beta);
        let r_bot = (0..shape).fold(Poly::one(), |acc, _| &acc * &Poly::new(vec![b, cone()]));
        let top = beta.powi(shape as i32);
        let r_top = Poly::constant(cplx(top));
        let density = ExpPoly::term(cplx(top / factorial::<T>(shape - 1)), b, shape - 1);
        Self::checked(r_top, r_bot, density)
    }

    /// Mixture of exponentials with the given weights and distinct rates.
    pub fn hyperexponential(weights: &[T], rates: &[T]) -> Result<Self> {
        if weights.len() != rates.len() || weights.is_empty() {
            return Err(Error::InvalidParameter("weights and rates must have equal nonzero length".into()));
        }
        if weights.iter().any(|&w| !(w >= T::zero())) || rates.iter().any(|&r| !(r > T::zero()) || !r.is_finite()) {
            return Err(Error::InvalidParameter("weights must be nonnegative and rates positive".into()));
        }
        let total = weights.iter().fold(T::zero(), |a, &w| a + w);
        if (total - T::one()).abs() > lit(1e-12) {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        let roots: Vec<Complex<T>> = rates.iter().map(|&r| cplx(-r)).collect();
        check_separation(&roots, T::tolerances().root_separation)
            .map_err(|_| Error::InvalidClaim("hyperexponential rates must be distinct".into()))?;
        let r_bot = Poly::from_roots(&roots);
        let mut r_top = Poly::zero();
        for (i, (&w, &r)) in weights.iter().zip(rates).enumerate() {
            let others: Vec<Complex<T>> = roots.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &z)| z).collect();
            r_top = &r_top + &Poly::from_roots(&others).scaled(cplx(w * r));
        }
        let density =
            ExpPoly::new(weights.iter().zip(rates).map(|(&w, &r)| Term::new(cplx(w * r), cplx(r), 0)).collect());
        Self::checked(r_top, r_bot, density)
    }

    /// Any rational transform with distinct denominator roots; the density
    /// is recovered by partial fractions.
    pub fn from_polys(r_top: Poly<T>, r_bot: Poly<T>) -> Result<Self> {
        let m = match r_bot.degree() {
            Some(m) if m >= 1 => m,
            _ => return Err(Error::InvalidClaim("denominator must have degree at least 1".into())),
        };
        if r_top.degree().is_some_and(|d| d >= m) {
            return Err(Error::InvalidClaim("numerator degree must be below denominator degree".into()));
        }
        let lead = r_bot.leading();
        let (r_top, r_bot) = (r_top.scaled(cone::<T>() / lead), r_bot.monic());
        let roots = poly_roots(&r_bot)?;
        check_separation(&roots, T::tolerances().root_separation)
            .map_err(|_| Error::InvalidClaim("repeated denominator roots are not supported".into()))?;
        if let Some(z) = roots.iter().find(|z| !(z.re < T::zero())) {
            return Err(Error::InvalidClaim(format!("denominator root {z} is not in the left half-plane")));
        }
        let d_bot = r_bot.derivative();
        let density = ExpPoly::new(roots.iter().map(|&z| Term::new(r_top.eval(z) / d_bot.eval(z), -z, 0)).collect())
            .realified(T::tolerances().realness);
        Self::checked(r_top, r_bot, density)
    }

    fn checked(r_top: Poly<T>, r_bot: Poly<T>, density: ExpPoly<T>) -> Result<Self> {
        let tol = lit::<T>(1e-10);
        let (t0, b0) = (r_top.coeff(0), r_bot.coeff(0));
        if (t0 - b0).norm() > tol * b0.norm().max(T::one()) {
            return Err(Error::InvalidClaim(format!("r_top(0) = {t0} differs from r_bot(0) = {b0}")));
        }
        let mass = density.integral()?;
        if (mass - cone()).norm() > tol {
            return Err(Error::InvalidClaim(format!("density integrates to {mass}")));
        }
        for s in [cplx(lit::<T>(0.5)), Complex::new(lit(1.3), lit(2.1)), Complex::new(lit(4.0), lit(-0.7))] {
            let via_density = density.laplace(s)?;
            let rational = r_top.eval(s) / r_bot.eval(s);
            if (via_density - rational).norm() > tol * rational.norm().max(T::one()) {
                return Err(Error::InvalidClaim("density does not match the rational transform".into()));
            }
        }
        Ok(RationalClaim { r_top, r_bot, density })
    }

    pub fn r_top(&self) -> &Poly<T> {
        &self.r_top
    }

    pub fn r_bot(&self) -> &Poly<T> {
        &self.r_bot
    }

    pub fn density(&self) -> &ExpPoly<T> {
        &self.density
    }

    /// Degree `m` of the denominator.
    pub fn order(&self) -> usize {
        self.r_bot.degree().unwrap_or(0)
    }

    pub fn lt(&self, s: Complex<T>) -> Result<Complex<T>> {
        let den = self.r_bot.eval(s);
        if den.norm() == T::zero() {
            return Err(Error::Pole("claim transform".into()));
        }
        Ok(self.r_top.eval(s) / den)
    }

    pub fn mean(&self) -> T {
        self.density.first_moment().map(|z| z.re).unwrap_or_else(|_| T::nan())
    }

    /// `P(Z > x)`.
    pub fn survival(&self, x: T) -> T {
        self.density.tail().map(|t| t.evaluate(x).re).unwrap_or_else(|_| T::nan())
    }

    /// `omega(u) = int_u^inf w(u, x - u) p(x) dx` in closed form.
    pub fn omega(&self, penalty: &Penalty<T>) -> Result<ExpPoly<T>> {
        match penalty.kind {
            PenaltyKind::Unit => self.density.tail(),
            PenaltyKind::BivariateExponential { s1, s2 } => Ok(self.density.dickson_hipp(cplx(s2))?.shifted(cplx(s1))),
            PenaltyKind::DeficitPower { j } => {
                // int_0^inf y^j c (u + y)^k e^(-lambda (u + y)) dy
                let mut out = Vec::new();
                for t in self.density.terms() {
                    if !(t.rate.re > T::zero()) {
                        return Err(Error::DivergentTail(to_f64(t.rate.re)));
                    }
                    for i in 0..=t.power {
                        let c = t.coeff * cplx(binomial::<T>(t.power, i) * factorial::<T>(i + j))
                            / cpowi(t.rate, i + j + 1);
                        out.push(Term::new(c, t.rate, t.power - i));
                    }
                }
                Ok(ExpPoly::new(out))
            }
        }
    }

    pub fn omega_hat(&self, penalty: &Penalty<T>, s: Complex<T>) -> Result<Complex<T>> {
        self.omega(penalty)?.laplace(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub enum PenaltyKind<T> {
    /// `w(x, y) = 1`.
    Unit,
    /// `w(x, y) = e^(-s1 x - s2 y)`.
    BivariateExponential { s1: T, s2: T },
    /// `w(x, y) = y^j`, the deficit raised to a power.
    DeficitPower { j: u32 },
}

/// Penalty `w(U(T-), |U(T)|)` for ruin by a claim and the constant `w0` for
/// ruin by oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct Penalty<T> {
    pub kind: PenaltyKind<T>,
    pub w0: T,
}

impl<T: Real> Penalty<T> {
    pub fn new(kind: PenaltyKind<T>, w0: T) -> Result<Self> {
        let p = Penalty { kind, w0 };
        p.validate()?;
        Ok(p)
    }

    /// Unit penalty with `w0 = 1`: the penalty function is then the
    /// (discounted) ruin probability.
    pub fn ruin_probability() -> Self {
        Penalty { kind: PenaltyKind::Unit, w0: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0 >= T::zero()) || !self.w0.is_finite() {
            return Err(Error::InvalidParameter(format!("w0 = {} must be a nonnegative number", self.w0)));
        }
        if let PenaltyKind::BivariateExponential { s1, s2 } = self.kind {
            if !(s1 >= T::zero() && s2 >= T::zero()) || !s1.is_finite() || !s2.is_finite() {
                return Err(Error::InvalidParameter("s1 and s2 must be nonnegative".into()));
            }
        }
        Ok(())
    }

    /// `w(surplus_before, deficit)`.
    pub fn w(&self, surplus_before: T, deficit: T) -> T {
        match self.kind {
            PenaltyKind::Unit => T::one(),
            PenaltyKind::BivariateExponential { s1, s2 } => (-s1 * surplus_before - s2 * deficit).exp(),
            PenaltyKind::DeficitPower { j } => deficit.powi(j as i32),
        }
    }
}

/// Draws claim amounts from a [`RationalClaim`].
///
/// Densities that are nonnegative mixtures of gamma terms are sampled
/// exactly as mixtures; anything else falls back to numerical inversion of
/// the distribution function.
#[derive(Debug, Clone)]
pub enum ClaimSampler {
    Mixture { cdf: Vec<f64>, shapes: Vec<u32>, rates: Vec<f64> },
    Inversion { density: ExpPoly<f64>, tail: ExpPoly<f64>, mean: f64 },
}

impl ClaimSampler {
    pub fn new(claim: &RationalClaim<f64>) -> Self {
        let terms = claim.density.terms();
        let mixture =
            terms.iter().all(|t| t.coeff.im == 0.0 && t.rate.im == 0.0 && t.coeff.re >= 0.0 && t.rate.re > 0.0);
        if mixture {
            let mut acc = 0.0;
            let cdf = terms
                .iter()
                .map(|t| {
                    acc += t.coeff.re * factorial::<f64>(t.power) / t.rate.re.powi(t.power as i32 + 1);
                    acc
                })
                .collect();
            ClaimSampler::Mixture {
                cdf,
                shapes: terms.iter().map(|t| t.power + 1).collect(),
                rates: terms.iter().map(|t| t.rate.re).collect(),
            }
        } else {
            ClaimSampler::Inversion {
                density: claim.density.clone(),
                tail: claim.density.tail().expect("claim densities have integrable tails"),
                mean: claim.mean(),
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ClaimSampler::Mixture { cdf, shapes, rates } => {
                let target = rng.random::<f64>() * cdf[cdf.len() - 1];
                let k = cdf.iter().position(|&c| target < c).unwrap_or(cdf.len() - 1);
                let mut x = 0.0;
                for _ in 0..shapes[k] {
                    let e: f64 = Exp1.sample(rng);
                    x += e;
                }
                x / rates[k]
            }
            ClaimSampler::Inversion { density, tail, mean } => {
                // solve tail(x) = v for v uniform on (0, 1)
                let v: f64 = 1.0 - rng.random::<f64>();
                let mut hi = mean.max(1e-3);
                while tail.evaluate(hi).re > v {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                let mut x = 0.5 * hi;
                for _ in 0..100 {
                    let f = tail.evaluate(x).re - v;
                    if f > 0.0 {
                        lo = x;
                    } else {
                        hi = x;
                    }
                    let d = density.evaluate(x).re;
                    let newton = x + f / d;
                    x = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                    if hi - lo < 1e-13 * hi.max(1.0) || f.abs() < 1e-15 {
                        break;
                    }
                }
                x
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn exponential_claim() {
        let beta = 1.5;
        let cl = RationalClaim::exponential(beta).unwrap();
        let s = C::new(0.4, 0.2);
        assert!((cl.lt(s).unwrap() - beta / (s + beta)).norm() < 1e-15);
        assert!((cl.density().evaluate(0.3).re - beta * (-beta * 0.3f64).exp()).abs() < 1e-15);
        assert!((cl.lt(c(0.0)).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn hyperexponential_density_and_mean() {
        let cl = RationalClaim::hyperexponential(&[0.5, 0.5], &[1.0, 2.0]).unwrap();
        for x in [0.0f64, 0.7, 2.0] {
            let want = 0.5 * (-x).exp() + (-2.0 * x).exp();
            assert!((cl.density().evaluate(x).re - want).abs() < 1e-15);
        }
        assert!((cl.mean() - 0.75).abs() < 1e-15);
        assert!((cl.lt(c(0.0)).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn erlang_claim() {
        let cl = RationalClaim::erlang(3, 2.0f64).unwrap();
        assert_eq!(cl.order(), 3);
        assert!((cl.mean() - 1.5).abs() < 1e-14);
        let s = C::new(1.0, 1.0);
        assert!((cl.density().laplace(s).unwrap() - (2.0 / (s + 2.0)).powu(3)).norm() < 1e-14);
    }

    #[test]
    fn from_polys_partial_fractions() {
        // p^(s) = (s + 6) / ((s + 2)(s + 3))
        let top = Poly::from_real(&[6.0, 1.0]);
        let bot = Poly::from_real(&[6.0, 5.0, 1.0]);
        let cl = RationalClaim::from_polys(top, bot).unwrap();
        // residues: at -2: 4/1 = 4, at -3: 3/-1 = -3
        for x in [0.0f64, 0.4, 1.5] {
            let want = 4.0 * (-2.0 * x).exp() - 3.0 * (-3.0 * x).exp();
            assert!((cl.density().evaluate(x).re - want).abs() < 1e-13);
        }
        for k in 0..20 {
            let s = C::new(0.05 * k as f64, 0.5 * k as f64 - 3.0);
            let a = cl.density().laplace(s).unwrap();
            let b = cl.lt(s).unwrap();
            assert!((a - b).norm() <= 1e-10 * b.norm());
        }
    }

    #[test]
    fn from_polys_errors() {
        let unstable = RationalClaim::from_polys(Poly::from_real(&[-2.0]), Poly::from_real(&[-2.0, 1.0]));
        assert!(matches!(unstable, Err(Error::InvalidClaim(_))));
        let mismatch = RationalClaim::from_polys(Poly::from_real(&[1.0]), Poly::from_real(&[2.0, 1.0]));
        assert!(matches!(mismatch, Err(Error::InvalidClaim(_))));
        let repeated = RationalClaim::from_polys(Poly::from_real(&[1.0]), Poly::from_real(&[1.0, 2.0, 1.0]));
        assert!(matches!(repeated, Err(Error::InvalidClaim(_))));
    }

    #[test]
    fn omega_for_each_penalty() {
        let beta = 1.0;
        let cl = RationalClaim::exponential(beta).unwrap();
        let unit = cl.omega(&Penalty::ruin_probability()).unwrap();
        for u in [0.0f64, 0.5, 2.0] {
            assert!((unit.evaluate(u).re - (-u).exp()).abs() < 1e-15);
        }
        let b2 = 2.5f64;
        let cl2 = RationalClaim::exponential(b2).unwrap();
        let deficit = cl2.omega(&Penalty::new(PenaltyKind::DeficitPower { j: 1 }, 0.0).unwrap()).unwrap();
        for u in [0.0, 0.5, 2.0] {
            assert!((deficit.evaluate(u).re - (-b2 * u).exp() / b2).abs() < 1e-15);
        }
        let pen = Penalty::new(PenaltyKind::BivariateExponential { s1: 0.3, s2: 0.7 }, 1.0).unwrap();
        let hyper = RationalClaim::hyperexponential(&[0.3, 0.7], &[0.8, 2.0]).unwrap();
        let om = hyper.omega(&pen).unwrap();
        for u in [0.0, 1.0, 3.0] {
            let quad = simpson(|x| pen.w(u, x - u) * hyper.density().evaluate(x).re, u, u + 80.0, 40_000);
            assert!((om.evaluate(u).re - quad).abs() < 1e-10, "u = {u}");
        }
    }

    #[test]
    fn unit_omega_is_nonincreasing_and_starts_at_one() {
        let cl = RationalClaim::hyperexponential(&[0.2f64, 0.8], &[0.5, 3.0]).unwrap();
        let om = cl.omega(&Penalty::ruin_probability()).unwrap();
        assert!((om.evaluate(0.0).re - 1.0).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for k in 0..100 {
            let v = om.evaluate(k as f64 * 0.2).re;
            assert!(v <= prev && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn omega_hat_matches_quadrature() {
        let cl = RationalClaim::erlang(2, 1.5).unwrap();
        let pen = Penalty::new(PenaltyKind::DeficitPower { j: 2 }, 0.0).unwrap();
        let om = cl.omega(&pen).unwrap();
        let s = 0.8;
        let quad = simpson(|u| (-s * u).exp() * om.evaluate(u).re, 0.0, 60.0, 60_000);
        let got = cl.omega_hat(&pen, c(s)).unwrap().re;
        assert!((got - quad).abs() <= 1e-7 * quad.abs());
        let unit = RationalClaim::exponential(1.0).unwrap();
        let z = C::new(0.6, 0.4);
        assert!((unit.omega_hat(&Penalty::ruin_probability(), z).unwrap() - 1.0 / (z + 1.0)).norm() < 1e-15);
        assert!((unit.omega_hat(&Penalty::ruin_probability(), c(0.0)).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn samplers_reproduce_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50_000;
        let hyper = RationalClaim::hyperexponential(&[0.5, 0.5], &[1.0, 2.0]).unwrap();
        let s = ClaimSampler::new(&hyper);
        assert!(matches!(s, ClaimSampler::Mixture { .. }));
        let m = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((m - 0.75).abs() < 0.02);

        let cl = RationalClaim::from_polys(Poly::from_real(&[6.0, 1.0]), Poly::from_real(&[6.0, 5.0, 1.0])).unwrap();
        let s = ClaimSampler::new(&cl);
        assert!(matches!(s, ClaimSampler::Inversion { .. }));
        let m = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((m - cl.mean()).abs() < 0.02, "{m} vs {}", cl.mean());
    }
}
