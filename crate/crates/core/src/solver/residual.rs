use num_complex::Complex;

use super::{weighted, GerberShiuSolution};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::model::RiskModel;
use crate::scalar::Real;

/// Scaled residuals of the integro-differential equations, one per phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals<T> {
    pub phi_w: Vec<T>,
    pub phi_d: Vec<T>,
}

impl<T: Real> Residuals<T> {
    pub fn max(&self) -> T {
        self.phi_w.iter().chain(&self.phi_d).fold(T::zero(), |m, &x| m.max(x))
    }
}

/// Sum of evaluated pieces divided by the sum of their term magnitudes.
struct Accum<T: Real> {
    value: Complex<T>,
    scale: T,
}

impl<T: Real> Accum<T> {
    fn new() -> Self {
        Accum { value: Complex::new(T::zero(), T::zero()), scale: T::zero() }
    }

    fn add(&mut self, k: T, f: &ExpPoly<T>, u: T) {
        self.value += f.evaluate(u) * k;
        self.scale += k.abs() * f.magnitude(u);
    }

    fn relative(&self) -> T {
        if self.scale > T::zero() {
            self.value.norm() / self.scale
        } else {
            self.value.norm()
        }
    }
}

fn system_residual<T: Real>(model: &RiskModel<T>, phi: &[ExpPoly<T>], forcing: Option<&ExpPoly<T>>, u: T) -> Vec<T> {
    let ph = model.interclaims();
    let n = ph.dim();
    let sub = ph.sub_intensity();
    let exit = ph.exit();
    let conv = weighted(ph.alpha(), phi).convolve(model.claims().density());
    (0..n)
        .map(|i| {
            let mut acc = Accum::new();
            acc.add(model.half_var(), &phi[i].derivative(2), u);
            acc.add(model.c(), &phi[i].derivative(1), u);
            for j in 0..n {
                let bij = if i == j { sub[i][j] - model.delta() } else { sub[i][j] };
                acc.add(bij, &phi[j], u);
            }
            acc.add(exit[i], &conv, u);
            if let Some(w) = forcing {
                acc.add(exit[i], w, u);
            }
            acc.relative()
        })
        .collect()
}

/// Substitutes the closed forms into the matrix integro-differential
/// equations for `phi_w` (forced by `omega`) and `phi_d` (homogeneous).
pub fn integro_differential_residuals<T: Real>(
    model: &RiskModel<T>,
    sol: &GerberShiuSolution<T>,
    u: T,
) -> Residuals<T> {
    Residuals {
        phi_w: system_residual(model, &sol.phi_w, Some(&sol.omega), u),
        phi_d: system_residual(model, &sol.phi_d, None, u),
    }
}

/// For generalized Erlang interclaims, the scalar equations
/// `lambda_i phi(u; i+1) = (lambda_i + delta) phi(u; i) - c phi'(u; i) - sigma^2/2 phi''(u; i)`
/// for `i < n`, and for the last phase
/// `(lambda_n + delta) phi(u; n) - c phi' - sigma^2/2 phi'' = lambda_n [phi(.; 1) * p + omega](u)`,
/// evaluated on `phi_w`.
pub fn erlang_scalar_residuals<T: Real>(model: &RiskModel<T>, sol: &GerberShiuSolution<T>, u: T) -> Result<Vec<T>> {
    let ph = model.interclaims();
    let n = ph.dim();
    let sub = ph.sub_intensity();
    let erlang = ph.alpha()[0] == T::one()
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let v = sub[i][j];
                if j == i + 1 {
                    v == -sub[i][i]
                } else if j == i {
                    v < T::zero()
                } else {
                    v == T::zero()
                }
            })
        });
    if !erlang {
        return Err(Error::ModelNotInSpecialForm("interclaims are not generalized Erlang".into()));
    }
    let phi = &sol.phi_w;
    let (c, half, delta) = (model.c(), model.half_var(), model.delta());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lam = -sub[i][i];
        let mut acc = Accum::new();
        acc.add(lam + delta, &phi[i], u);
        acc.add(-c, &phi[i].derivative(1), u);
        acc.add(-half, &phi[i].derivative(2), u);
        if i + 1 < n {
            acc.add(-lam, &phi[i + 1], u);
        } else {
            acc.add(-lam, &phi[0].convolve(model.claims().density()), u);
            acc.add(-lam, &sol.omega, u);
        }
        out.push(acc.relative());
    }
    Ok(out)
}
