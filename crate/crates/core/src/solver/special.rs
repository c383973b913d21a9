use num_complex::Complex;

use crate::claims::PenaltyKind;
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::lundberg::find_roots;
use crate::model::RiskModel;
use crate::scalar::{cone, cplx, lit, Real};

fn not_special<T>(why: &str) -> Result<T> {
    Err(Error::ModelNotInSpecialForm(why.into()))
}

/// Ruin probabilities `(psi_w, psi_d)` from the explicit two-phase formulas
/// for exponential claims and generalized Erlang(2) interclaims at
/// `delta = 0`.
pub fn ruin_prob_special<T: Real>(model: &RiskModel<T>) -> Result<(ExpPoly<T>, ExpPoly<T>)> {
    if model.delta() != T::zero() {
        return not_special("delta must be 0");
    }
    let pen = model.penalty();
    if pen.kind != PenaltyKind::Unit || pen.w0 != T::one() {
        return not_special("penalty must be w = 1, w0 = 1");
    }
    let density = model.claims().density().terms();
    if model.claim_order() != 1 || density.len() != 1 || density[0].power != 0 {
        return not_special("claims must be exponential");
    }
    let beta = density[0].rate.re;
    let ph = model.interclaims();
    let sub = ph.sub_intensity();
    if ph.dim() != 2 || ph.alpha() != [T::one(), T::zero()] || sub[1][0] != T::zero() || sub[0][1] != -sub[0][0] {
        return not_special("interclaims must be generalized Erlang with two phases");
    }
    let (l1, l2) = (-sub[0][0], -sub[1][1]);

    let roots = find_roots(model)?;
    let rho2 = roots.rhos[1];
    let half = model.half_var();
    let c = model.c();
    let k = rho2 * half + c;
    let beta_c = cplx(beta);
    let mut w = ExpPoly::zero();
    let mut d = ExpPoly::zero();
    for (i, &ri) in roots.rs.iter().enumerate() {
        let prod = roots.rs.iter().enumerate().filter(|&(l, _)| l != i).fold(cone::<T>(), |p, (_, &rl)| p * (rl - ri));
        let lead = cplx(l1 * l2) / (beta_c * (beta_c + rho2) * prod);
        let a: Complex<T> = cone::<T>() + (beta_c - ri) * half / k;
        w = w + ExpPoly::exp(lead * a, ri) - ExpPoly::exp(lead, beta_c);
        let coef =
            (beta_c - ri) / prod * (cplx(l1 + l2) / k - ri + lit::<T>(2.0) * c / (model.sigma() * model.sigma()));
        d = d + ExpPoly::exp(coef, ri);
    }
    let tol = T::tolerances();
    let w = w.scaled(cplx(half.powi(-2))).realified(tol.realness).pruned(tol.prune);
    Ok((w, d.realified(tol.realness).pruned(tol.prune)))
}
