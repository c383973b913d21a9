//! Exponential polynomials `sum c x^k e^(-rate x)` on `[0, inf)`.
//!
//! The class is closed under addition, products, convolution, the
//! Dickson-Hipp operator and differentiation, and its Laplace transform is
//! rational, so every function the solver manipulates stays in closed form.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial, cone, cplx, cpowi, czero, factorial, lit, to_f64, Real};

/// One term `coeff * x^power * e^(-rate x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct Term<T> {
    pub coeff: Complex<T>,
    pub rate: Complex<T>,
    pub power: u32,
}

impl<T: Real> Term<T> {
    pub fn new(coeff: Complex<T>, rate: Complex<T>, power: u32) -> Self {
        Term { coeff, rate, power }
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        let xc = cplx(x);
        self.coeff * cpowi(xc, self.power) * (-self.rate * xc).exp()
    }
}

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct ExpPoly<T> {
    terms: Vec<Term<T>>,
}

fn same_rate<T: Real>(a: Complex<T>, b: Complex<T>) -> bool {
    let scale = T::one().max(a.norm()).max(b.norm());
    (a - b).norm() <= T::tolerances().rate_merge * scale
}

impl<T: Real> ExpPoly<T> {
    /// Builds a normalized exponential polynomial: terms sharing a rate and
    /// power are merged and exact zeros dropped.
    pub fn new(terms: Vec<Term<T>>) -> Self {
        let mut merged: Vec<Term<T>> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.iter_mut().find(|m| m.power == t.power && same_rate(m.rate, t.rate)) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.re != T::zero() || t.coeff.im != T::zero());
        ExpPoly { terms: merged }
    }

    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    /// `coeff * e^(-rate x)`.
    pub fn exp(coeff: Complex<T>, rate: Complex<T>) -> Self {
        Self::new(vec![Term::new(coeff, rate, 0)])
    }

    pub fn term(coeff: Complex<T>, rate: Complex<T>, power: u32) -> Self {
        Self::new(vec![Term::new(coeff, rate, power)])
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: T) -> Complex<T> {
        self.terms.iter().fold(czero(), |acc, t| acc + t.eval(x))
    }

    /// Sum of the magnitudes of the individual terms at `x`; the natural
    /// scale against which cancellation in `evaluate` is judged.
    pub fn magnitude(&self, x: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.eval(x).norm())
    }

    pub fn max_coeff(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, t| m.max(t.coeff.norm()))
    }

    pub fn scaled(&self, k: Complex<T>) -> Self {
        Self::new(self.terms.iter().map(|t| Term { coeff: t.coeff * k, ..*t }).collect())
    }

    /// Multiplies by `e^(-r x)`.
    pub fn shifted(&self, r: Complex<T>) -> Self {
        Self::new(self.terms.iter().map(|t| Term { rate: t.rate + r, ..*t }).collect())
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term::new(a.coeff * b.coeff, a.rate + b.rate, a.power + b.power));
            }
        }
        Self::new(out)
    }

    /// Drops terms whose coefficient is below `rel_tol` times the largest one.
    pub fn pruned(&self, rel_tol: T) -> Self {
        let cut = rel_tol * self.max_coeff();
        Self::new(self.terms.iter().copied().filter(|t| t.coeff.norm() > cut).collect())
    }

    /// Replaces each coefficient and rate by its real part when the
    /// imaginary part is negligible.
    pub fn realified(&self, rel_tol: T) -> Self {
        let fix = |z: Complex<T>| {
            if z.im.abs() <= rel_tol * z.norm() {
                cplx(z.re)
            } else {
                z
            }
        };
        Self::new(self.terms.iter().map(|t| Term::new(fix(t.coeff), fix(t.rate), t.power)).collect())
    }

    /// Termwise derivative of the given order.
    pub fn derivative(&self, order: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..order {
            let mut out = Vec::with_capacity(2 * f.terms.len());
            for t in &f.terms {
                if t.power > 0 {
                    out.push(Term::new(t.coeff * lit::<T>(t.power as f64), t.rate, t.power - 1));
                }
                out.push(Term::new(-t.coeff * t.rate, t.rate, t.power));
            }
            f = Self::new(out);
        }
        f
    }

    /// `(f * g)(u) = int_0^u f(u - x) g(x) dx` in closed form.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                convolve_terms(a, b, &mut out);
            }
        }
        Self::new(out)
    }

    /// Dickson-Hipp operator `T_r f(x) = int_x^inf e^(-r (y - x)) f(y) dy`.
    pub fn dickson_hipp(&self, r: Complex<T>) -> Result<Self> {
        let mut out = Vec::new();
        for t in &self.terms {
            let z = r + t.rate;
            if z.re <= T::zero() {
                return Err(Error::DivergentTail(to_f64(z.re)));
            }
            // int_0^inf e^(-z y) (x + y)^k dy = sum_j C(k,j) x^(k-j) j! / z^(j+1)
            for j in 0..=t.power {
                let c = t.coeff * cplx(binomial::<T>(t.power, j) * factorial::<T>(j)) / cpowi(z, j + 1);
                out.push(Term::new(c, t.rate, t.power - j));
            }
        }
        Ok(Self::new(out))
    }

    /// Laplace transform `sum c k! / (s + rate)^(k+1)`, the analytic
    /// continuation of the integral beyond its abscissa of convergence.
    pub fn laplace(&self, s: Complex<T>) -> Result<Complex<T>> {
        let mut acc = czero();
        for t in &self.terms {
            let z = s + t.rate;
            let scale = T::one().max(s.norm()).max(t.rate.norm());
            if z.norm() <= T::epsilon() * scale {
                return Err(Error::Pole(format!("s = {}", s.re.to_f64().unwrap_or(f64::NAN))));
            }
            acc += t.coeff * cplx(factorial::<T>(t.power)) / cpowi(z, t.power + 1);
        }
        Ok(acc)
    }

    /// `int_0^inf f`.
    pub fn integral(&self) -> Result<Complex<T>> {
        self.laplace(czero())
    }

    /// `int_0^inf x f(x) dx`.
    pub fn first_moment(&self) -> Result<Complex<T>> {
        self.product(&Self::term(cone(), czero(), 1)).integral()
    }

    /// `int_x^inf f`.
    pub fn tail(&self) -> Result<Self> {
        self.dickson_hipp(czero())
    }
}

fn convolve_terms<T: Real>(a: &Term<T>, b: &Term<T>, out: &mut Vec<Term<T>>) {
    let (p, q) = (a.power, b.power);
    let ab = a.coeff * b.coeff;
    if same_rate(a.rate, b.rate) {
        let c = factorial::<T>(p) * factorial::<T>(q) / factorial::<T>(p + q + 1);
        out.push(Term::new(ab * cplx(c), a.rate, p + q + 1));
        return;
    }
    // e^(-a u) sum_i C(p,i) (-1)^i u^(p-i) int_0^u x^(q+i) e^(-d x) dx, d = rate_b - rate_a
    let d = b.rate - a.rate;
    for i in 0..=p {
        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
        let base = ab * cplx(binomial::<T>(p, i) * sign);
        let k = q + i;
        let kf = factorial::<T>(k);
        out.push(Term::new(base * cplx(kf) / cpowi(d, k + 1), a.rate, p - i));
        for j in 0..=k {
            let c = base * cplx(kf / factorial::<T>(j)) / cpowi(d, k + 1 - j);
            out.push(Term::new(-c, b.rate, p - i + j));
        }
    }
}

impl<T: Real> Add for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn add(self, rhs: &ExpPoly<T>) -> ExpPoly<T> {
        ExpPoly::new(self.terms.iter().chain(&rhs.terms).copied().collect())
    }
}

impl<T: Real> Sub for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn sub(self, rhs: &ExpPoly<T>) -> ExpPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn neg(self) -> ExpPoly<T> {
        self.scaled(-cone::<T>())
    }
}

impl<T: Real> Add for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn add(self, rhs: ExpPoly<T>) -> ExpPoly<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn sub(self, rhs: ExpPoly<T>) -> ExpPoly<T> {
        &self - &rhs
    }
}

impl<T: Real> std::iter::Sum for ExpPoly<T> {
    fn sum<I: Iterator<Item = ExpPoly<T>>>(iter: I) -> Self {
        ExpPoly::new(iter.flat_map(|f| f.terms).collect())
    }
}

impl<T: fmt::Debug> fmt::Debug for ExpPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ExpPoly").field(&self.terms).finish()
    }
}

impl<T: Real> fmt::Display for ExpPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| match t.power {
                0 => format!("({}) e^(-({})x)", t.coeff, t.rate),
                1 => format!("({}) x e^(-({})x)", t.coeff, t.rate),
                k => format!("({}) x^{k} e^(-({})x)", t.coeff, t.rate),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
