//! Closed-form Gerber-Shiu functions for the perturbed phase-type renewal
//! model with rational claims.
//!
//! The pipeline is: Lundberg roots, the derivatives at zero from a
//! divided-difference linear system, partial-fraction coefficients, then
//! assembly of `phi_w` and `phi_d` as exponential polynomials.

mod residual;
mod special;
mod transform;

pub use residual::{erlang_scalar_residuals, integro_differential_residuals, Residuals};
pub use special::ruin_prob_special;
pub use transform::{laplace_solution, transform_paths, TransformPaths};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::lundberg::{adj_l, find_roots, LundbergRoots};
use crate::model::RiskModel;
use crate::polyalg::{check_separation, divided_differences, CMatrix, DividedTable};
use crate::scalar::{cone, cplx, czero, lit, Real};

/// Coefficients of the partial-fraction expansion over the roots `-R_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions<T> {
    /// `M_i^(n) = r_m(-R_i) L*[rho_1..rho_n, -R_i] / prod_{l != i} (R_l - R_i)`.
    pub m_n: Vec<CMatrix<T>>,
    /// `M_i^(n-1)`, the same with `rho_n` dropped from the node list.
    pub m_n1: Vec<CMatrix<T>>,
    /// `G_i = r_m(-R_i) / prod_{l != i} (R_l - R_i)`.
    pub g: Vec<Complex<T>>,
}

/// Intermediate quantities of a solve, kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionDiagnostics<T> {
    /// `Q_w(rho_n)`.
    pub q_w: Vec<Complex<T>>,
    /// `Q_d(rho_n)`.
    pub q_d: Vec<Complex<T>>,
    pub partial_fractions: PartialFractions<T>,
    /// `max_i max(|phi_w(0; i)|, |phi_d(0; i) - 1|)`.
    pub boundary_defect: T,
    /// Exponential terms dropped as cancellation residue.
    pub pruned_terms: usize,
}

/// Per-phase exponential-polynomial solution and the scalar
/// `phi = alpha (phi_w + w0 phi_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GerberShiuSolution<T> {
    pub phi_w: Vec<ExpPoly<T>>,
    pub phi_d: Vec<ExpPoly<T>>,
    pub phi: ExpPoly<T>,
    pub phi_w_prime0: Vec<Complex<T>>,
    pub phi_d_prime0: Vec<Complex<T>>,
    pub roots: LundbergRoots<T>,
    pub omega: ExpPoly<T>,
    pub diagnostics: SolutionDiagnostics<T>,
    alpha: Vec<T>,
    w0: T,
}

impl<T: Real> GerberShiuSolution<T> {
    /// `alpha phi_w(u)`, the claim-ruin part.
    pub fn w_part(&self) -> ExpPoly<T> {
        weighted(&self.alpha, &self.phi_w)
    }

    /// `alpha phi_d(u)`, the oscillation part.
    pub fn d_part(&self) -> ExpPoly<T> {
        weighted(&self.alpha, &self.phi_d)
    }

    pub fn w_at(&self, u: T) -> T {
        self.w_part().evaluate(u).re
    }

    pub fn d_at(&self, u: T) -> T {
        self.d_part().evaluate(u).re
    }

    pub fn value(&self, u: T) -> T {
        self.phi.evaluate(u).re
    }

    /// `phi(u; i)` for a process started in phase `i`.
    pub fn phase_value(&self, phase: usize, u: T) -> T {
        (self.phi_w[phase].evaluate(u) + self.phi_d[phase].evaluate(u) * self.w0).re
    }

    /// Largest `|Im|` of `phi_w`, `phi_d`, `phi` at `u`.
    pub fn imag_defect(&self, u: T) -> T {
        self.phi_w
            .iter()
            .chain(&self.phi_d)
            .chain(std::iter::once(&self.phi))
            .fold(T::zero(), |m, f| m.max(f.evaluate(u).im.abs()))
    }

    pub fn w0(&self) -> T {
        self.w0
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }
}

fn weighted<T: Real>(alpha: &[T], parts: &[ExpPoly<T>]) -> ExpPoly<T> {
    alpha.iter().zip(parts).filter(|(a, _)| **a != T::zero()).map(|(&a, f)| f.scaled(cplx(a))).sum()
}

fn ones<T: Real>(n: usize) -> Vec<Complex<T>> {
    vec![cone(); n]
}

fn axpy<T: Real>(acc: &mut [Complex<T>], k: Complex<T>, x: &[Complex<T>]) {
    for (a, &v) in acc.iter_mut().zip(x) {
        *a += k * v;
    }
}

/// Adjugates at the `rho` roots and their divided-difference table.
fn lstar_table<T: Real>(model: &RiskModel<T>, rhos: &[Complex<T>]) -> Result<DividedTable<T, CMatrix<T>>> {
    let values = rhos.iter().map(|&r| adj_l(model, r)).collect::<Result<Vec<_>>>()?;
    divided_differences(rhos, values, T::tolerances().root_separation)
}

/// `L*[nodes..., s]` with the adjugates at `nodes` supplied.
fn lstar_with<T: Real>(
    model: &RiskModel<T>,
    nodes: &[Complex<T>],
    values: &[CMatrix<T>],
    s: Complex<T>,
) -> Result<CMatrix<T>> {
    let mut xs = nodes.to_vec();
    xs.push(s);
    let mut vs = values.to_vec();
    vs.push(adj_l(model, s)?);
    Ok(divided_differences(&xs, vs, T::tolerances().root_separation)?.top().clone())
}

/// `Q_w(s) = (sigma^2/2) phi_w'(0) - omega^(s) b`.
pub fn q_w<T: Real>(model: &RiskModel<T>, s: Complex<T>, phi_w_prime0: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let om = model.claims().omega_hat(model.penalty(), s)?;
    let half = cplx(model.half_var());
    Ok(phi_w_prime0.iter().zip(model.interclaims().exit_c()).map(|(&d, b)| half * d - om * b).collect())
}

/// `Q_d(s) = (sigma^2/2) phi_d'(0) + (sigma^2/2) s + c`.
pub fn q_d<T: Real>(model: &RiskModel<T>, s: Complex<T>, phi_d_prime0: &[Complex<T>]) -> Vec<Complex<T>> {
    let half = cplx(model.half_var());
    let shift = half * s + model.c();
    phi_d_prime0.iter().map(|&d| half * d + shift).collect()
}

/// A `(phi_w, phi_d)` pair of per-phase vectors.
pub type VectorPair<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

/// `phi_w'(0)` and `phi_d'(0)` from the divided-difference system at the
/// `rho` roots.
pub fn derivatives_at_zero<T: Real>(model: &RiskModel<T>, roots: &LundbergRoots<T>) -> Result<VectorPair<T>> {
    let n = model.phases();
    let rhos = &roots.rhos;
    if rhos.len() != n {
        return Err(Error::Dimension(format!("{} rho roots for {n} phases", rhos.len())));
    }
    let tol = T::tolerances();
    let table = lstar_table(model, rhos)?;
    let omega = model.claims().omega(model.penalty())?;
    let om_vals = rhos.iter().map(|&r| omega.laplace(r)).collect::<Result<Vec<_>>>()?;
    let om_table = divided_differences(rhos, om_vals, tol.root_separation)?;

    let d = table.top();
    let scale = d.max_abs();
    if !(scale > T::zero()) || d.det().norm() <= T::epsilon() * scale.powi(n as i32) {
        return Err(Error::SingularDividedDifference);
    }
    let mut sum = CMatrix::zeros(n);
    for i in 0..n {
        sum = sum + table.prefix(i + 1).scaled(*om_table.get(i, n - 1));
    }
    let b = model.interclaims().exit_c();
    let inv_half = cplx(T::one() / model.half_var());
    let pw: Vec<Complex<T>> = d
        .solve(&sum.matvec(&b))
        .map_err(|_| Error::SingularDividedDifference)?
        .into_iter()
        .map(|x| x * inv_half)
        .collect();

    let e = ones(n);
    let rho_n = rhos[n - 1];
    let k = rho_n * model.half_var() + model.c();
    let tail = if n > 1 {
        d.solve(&table.prefix(n - 1).matvec(&e)).map_err(|_| Error::SingularDividedDifference)?
    } else {
        vec![czero(); n]
    };
    let pd = tail.into_iter().map(|t| -k * inv_half - t).collect();
    Ok((pw, pd))
}

/// Partial-fraction coefficients over the `R` roots.
pub fn partial_fraction_coeffs<T: Real>(model: &RiskModel<T>, roots: &LundbergRoots<T>) -> Result<PartialFractions<T>> {
    let tol = T::tolerances();
    let n = model.phases();
    let rhos = &roots.rhos;
    let rs = &roots.rs;
    check_separation(rs, tol.root_separation)?;
    let lst = rhos.iter().map(|&r| adj_l(model, r)).collect::<Result<Vec<_>>>()?;
    let mut out = PartialFractions { m_n: Vec::new(), m_n1: Vec::new(), g: Vec::new() };
    for (i, &ri) in rs.iter().enumerate() {
        let prod = rs.iter().enumerate().filter(|&(l, _)| l != i).fold(cone::<T>(), |p, (_, &rl)| p * (rl - ri));
        let g = model.claims().r_bot().eval(-ri) / prod;
        out.m_n.push(lstar_with(model, rhos, &lst, -ri)?.scaled(g));
        out.m_n1.push(lstar_with(model, &rhos[..n - 1], &lst[..n - 1], -ri)?.scaled(g));
        out.g.push(g);
    }
    Ok(out)
}

/// Solves the model: finds the roots, then assembles the closed form.
pub fn solve<T: Real>(model: &RiskModel<T>) -> Result<GerberShiuSolution<T>> {
    let roots = find_roots(model)?;
    solve_with_roots(model, roots)
}

/// Assembles the solution from a given root set. The order of the `rho`
/// roots only affects intermediate divided differences.
pub fn solve_with_roots<T: Real>(model: &RiskModel<T>, roots: LundbergRoots<T>) -> Result<GerberShiuSolution<T>> {
    let tol = T::tolerances();
    let n = model.phases();
    let (pw, pd) = derivatives_at_zero(model, &roots)?;
    let rho_n = roots.rhos[n - 1];
    let qw = q_w(model, rho_n, &pw)?;
    let qd = q_d(model, rho_n, &pd);
    let pf = partial_fraction_coeffs(model, &roots)?;

    let half = model.half_var();
    let b = model.interclaims().exit_c();
    let e = ones::<T>(n);
    let omega = model.claims().omega(model.penalty())?;

    // chain[l] = T_{rho_l} ... T_{rho_n} omega
    let mut chain = vec![ExpPoly::zero(); n];
    chain[n - 1] = omega.dickson_hipp(rho_n)?;
    for l in (0..n - 1).rev() {
        chain[l] = chain[l + 1].dickson_hipp(roots.rhos[l])?;
    }
    let table = lstar_table(model, &roots.rhos)?;
    let lb: Vec<Vec<Complex<T>>> = (0..n - 1).map(|l| table.prefix(l + 1).matvec(&b)).collect();

    let mut phi_w = vec![ExpPoly::zero(); n];
    let mut phi_d = vec![ExpPoly::zero(); n];
    for (i, &ri) in roots.rs.iter().enumerate() {
        let va = pf.m_n[i].matvec(&qw);
        let vb = pf.m_n1[i].matvec(&b);
        let mut vd = pf.m_n[i].matvec(&qd);
        axpy(&mut vd, cplx(half), &pf.m_n1[i].matvec(&e));
        let kernel = ExpPoly::exp(cone(), ri);
        for k in 0..n {
            let mut g = chain[n - 1].scaled(vb[k]);
            for l in 0..n - 1 {
                let sign = if (n - 1 - l).is_multiple_of(2) { T::one() } else { -T::one() };
                g = g + chain[l].scaled(pf.g[i] * lb[l][k] * sign);
            }
            phi_w[k] = &phi_w[k] + &(ExpPoly::exp(va[k], ri) + kernel.convolve(&g));
            phi_d[k] = &phi_d[k] + &ExpPoly::exp(vd[k], ri);
        }
    }

    let norm = cplx(half.powi(-(n as i32)));
    let mut pruned_terms = 0;
    let mut tidy = |f: &ExpPoly<T>| {
        let raw = f.scaled(norm);
        let out = raw.realified(tol.realness).pruned(tol.prune);
        pruned_terms += raw.terms().len() - out.terms().len();
        out
    };
    let phi_w: Vec<ExpPoly<T>> = phi_w.iter().map(&mut tidy).collect();
    let phi_d: Vec<ExpPoly<T>> = phi_d.iter().map(&mut tidy).collect();

    let alpha = model.interclaims().alpha().to_vec();
    let w0 = model.penalty().w0;
    let phi = (weighted(&alpha, &phi_w) + weighted(&alpha, &phi_d).scaled(cplx(w0))).pruned(tol.prune);

    let boundary_defect = phi_w
        .iter()
        .zip(&phi_d)
        .map(|(w, d)| w.evaluate(T::zero()).norm().max((d.evaluate(T::zero()) - cone()).norm()))
        .fold(T::zero(), T::max);
    if !(boundary_defect <= lit::<T>(1e3) * tol.transform_consistency) {
        return Err(Error::ConsistencyFailure(boundary_defect.to_f64().unwrap_or(f64::NAN)));
    }

    Ok(GerberShiuSolution {
        phi_w,
        phi_d,
        phi,
        phi_w_prime0: pw,
        phi_d_prime0: pd,
        roots,
        omega,
        diagnostics: SolutionDiagnostics { q_w: qw, q_d: qd, partial_fractions: pf, boundary_defect, pruned_terms },
        alpha,
        w0,
    })
}
