use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{cone, cplx, czero, lit, Real};

/// Polynomial with complex coefficients in ascending degree order.
///
/// Trailing zero coefficients are stripped on construction, so the zero
/// polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct Poly<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == T::zero() && c.im == T::zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| cplx(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(cone())
    }

    /// The polynomial `s`.
    pub fn identity() -> Self {
        Self::new(vec![czero(), cone()])
    }

    /// `s - root`.
    pub fn linear_factor(root: Complex<T>) -> Self {
        Self::new(vec![-root, cone()])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| &acc * &Self::linear_factor(r))
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().copied().unwrap_or_else(czero)
    }

    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(czero)
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(czero(), |acc, &c| acc * s + c)
    }

    /// Value and first derivative at `s` in one Horner pass.
    pub fn eval_with_derivative(&self, s: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut p = czero();
        let mut dp = czero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * lit::<T>(k as f64)).collect())
    }

    pub fn scaled(&self, k: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// `self(inner(s))`.
    pub fn compose(&self, inner: &Poly<T>) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, &c| &(&acc * inner) + &Self::constant(c))
    }

    /// Divides out the leading coefficient.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        if self.is_zero() {
            return self.clone();
        }
        self.scaled(cone::<T>() / lead)
    }

    /// True when every coefficient has an imaginary part below `tol` relative
    /// to the coefficient scale.
    pub fn is_real(&self, tol: T) -> bool {
        let scale = self.scale();
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![czero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl<T: Real> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Poly").field(&self.coeffs).finish()
    }
}

impl<T: Real> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > T::zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})s"),
                _ => format!("({c})s^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
