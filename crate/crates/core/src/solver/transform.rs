use num_complex::Complex;

use super::{lstar_table, lstar_with, ones, q_d, q_w, GerberShiuSolution};
use crate::error::{Error, Result};
use crate::lundberg::eval_l;
use crate::model::RiskModel;
use crate::polyalg::divided_differences;
use crate::scalar::{cone, cplx, to_f64, Real};

use super::VectorPair as Pair;

/// The transforms `(phi_w^(s), phi_d^(s))` computed three ways.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformPaths<T> {
    /// `L*(s) Q(s) / det L(s)`.
    pub raw: Pair<T>,
    /// The divided-difference representation over the `rho` roots.
    pub divided: Pair<T>,
    /// Termwise transform of the closed-form solution.
    pub closed: Pair<T>,
}

impl<T: Real> TransformPaths<T> {
    /// Largest relative disagreement of the other two paths with `raw`.
    pub fn discrepancy(&self) -> T {
        let rel = |a: &[Complex<T>], b: &[Complex<T>]| {
            let scale = a.iter().fold(T::min_positive_value(), |m, z| m.max(z.norm()));
            a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((x - y).norm())) / scale
        };
        rel(&self.raw.0, &self.divided.0)
            .max(rel(&self.raw.1, &self.divided.1))
            .max(rel(&self.raw.0, &self.closed.0))
            .max(rel(&self.raw.1, &self.closed.1))
    }
}

/// Evaluates all three transform paths at `s` without comparing them.
pub fn transform_paths<T: Real>(
    model: &RiskModel<T>,
    sol: &GerberShiuSolution<T>,
    s: Complex<T>,
) -> Result<TransformPaths<T>> {
    let tol = T::tolerances();
    let n = model.phases();
    let l = eval_l(model, s)?;
    let det = l.det();
    if det.norm() == T::zero() {
        return Err(Error::Pole(format!("det L vanishes at s = {}", to_f64(s.re))));
    }
    let lstar_s = l.adjugate();
    let inv_det = cone::<T>() / det;
    let half = cplx(model.half_var());

    let raw_w = lstar_s.matvec(&q_w(model, s, &sol.phi_w_prime0)?);
    let raw_d = lstar_s.matvec(&q_d(model, s, &sol.phi_d_prime0));
    let raw = (raw_w.into_iter().map(|x| x * inv_det).collect(), raw_d.into_iter().map(|x| x * inv_det).collect());

    let rhos = &sol.roots.rhos;
    let table = lstar_table(model, rhos)?;
    let lst: Vec<_> = (0..n).map(|j| table.get(j, j).clone()).collect();
    let full = lstar_with(model, rhos, &lst, s)?;
    let short = lstar_with(model, &rhos[..n - 1], &lst[..n - 1], s)?;
    let mut nodes = rhos.clone();
    nodes.push(s);
    let om_vals = nodes.iter().map(|&x| sol.omega.laplace(x)).collect::<Result<Vec<_>>>()?;
    let om = divided_differences(&nodes, om_vals, tol.root_separation)?;
    let b = model.interclaims().exit_c();
    let prod = rhos.iter().fold(cone::<T>(), |p, &r| p * (s - r));
    let k = prod * inv_det;

    let mut div_w = full.matvec(&sol.diagnostics.q_w);
    let sb = short.matvec(&b);
    for (x, y) in div_w.iter_mut().zip(&sb) {
        *x -= *y * *om.get(n - 1, n);
    }
    for i in 0..n - 1 {
        let v = table.prefix(i + 1).matvec(&b);
        let w = *om.get(i, n);
        for (x, y) in div_w.iter_mut().zip(&v) {
            *x -= *y * w;
        }
    }
    let mut div_d = full.matvec(&sol.diagnostics.q_d);
    for (x, y) in div_d.iter_mut().zip(short.matvec(&ones(n))) {
        *x += half * y;
    }
    let divided = (div_w.into_iter().map(|x| x * k).collect(), div_d.into_iter().map(|x| x * k).collect());

    let closed = (
        sol.phi_w.iter().map(|f| f.laplace(s)).collect::<Result<Vec<_>>>()?,
        sol.phi_d.iter().map(|f| f.laplace(s)).collect::<Result<Vec<_>>>()?,
    );
    Ok(TransformPaths { raw, divided, closed })
}

/// `(phi_w^(s), phi_d^(s))` for `Re(s) > 0`, cross-checked against the
/// divided-difference and closed-form paths.
pub fn laplace_solution<T: Real>(model: &RiskModel<T>, sol: &GerberShiuSolution<T>, s: Complex<T>) -> Result<Pair<T>> {
    if !(s.re > T::zero()) {
        return Err(Error::InvalidParameter(format!("transform argument needs Re(s) > 0, got {}", to_f64(s.re))));
    }
    let paths = transform_paths(model, sol, s)?;
    let gap = paths.discrepancy();
    if !(gap <= T::tolerances().transform_consistency) {
        return Err(Error::ConsistencyFailure(to_f64(gap)));
    }
    Ok(paths.raw)
}
