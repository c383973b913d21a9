//! The matrix `L(s)`, the characteristic polynomial `r_m(s) det L(s)` and
//! the classified roots of the generalized Lundberg equation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RiskModel;
use crate::polyalg::{check_separation, faddeev_leverrier, poly_roots, CMatrix, Poly};
use crate::scalar::{cplx, czero, Real};

/// Roots of `r_m(s) det L(s)`: the `n` roots `rho` with positive real part
/// (one of them exactly zero when `delta = 0`) and the `m + n` values `R`
/// such that `-R` is a root with negative real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct LundbergRoots<T> {
    pub rhos: Vec<Complex<T>>,
    pub rs: Vec<Complex<T>>,
    pub char_poly: Poly<T>,
    /// `|det L|` at each `rho`, then at each `-R`.
    pub residuals: Vec<T>,
    /// False when some root is genuinely complex.
    pub all_real: bool,
}

/// `L(s) = a(s) I + B + b^T alpha p^(s)`.
pub fn eval_l<T: Real>(model: &RiskModel<T>, s: Complex<T>) -> Result<CMatrix<T>> {
    let ph = model.interclaims();
    let p_hat = model.claims().lt(s)?;
    let rank_one = CMatrix::outer(&ph.exit_c(), &ph.alpha_c()).scaled(p_hat);
    Ok(&ph.b_matrix().add_diagonal(model.a_of_s(s)) + &rank_one)
}

/// `L*(s)`, the adjugate of `L(s)`.
pub fn adj_l<T: Real>(model: &RiskModel<T>, s: Complex<T>) -> Result<CMatrix<T>> {
    Ok(eval_l(model, s)?.adjugate())
}

pub fn det_l<T: Real>(model: &RiskModel<T>, s: Complex<T>) -> Result<Complex<T>> {
    Ok(eval_l(model, s)?.det())
}

/// Exact coefficients of `r_m(s) det L(s)`, assembled as
/// `r_m(s) q(a(s)) - (-1)^n n_k(-a(s)) r_{m-1}(s)` with `q(z) = det(zI + B)`
/// and `n_k(z) = alpha adj(zI - B) b^T`.
pub fn char_poly<T: Real>(model: &RiskModel<T>) -> Poly<T> {
    let ph = model.interclaims();
    let n = ph.dim();
    let (q, _) = faddeev_leverrier(&ph.b_matrix().scaled(-Complex::new(T::one(), T::zero())));
    let (n_k, _) = ph.rational_lt();
    let a = model.a_poly();
    let neg_a = -&a;
    let first = model.claims().r_bot() * &q.compose(&a);
    let second = &n_k.compose(&neg_a) * model.claims().r_top();
    if n.is_multiple_of(2) {
        &first - &second
    } else {
        &first + &second
    }
}

fn cmp_re_im<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

/// Forces exact conjugate symmetry on the roots of a real polynomial:
/// nearly real roots become real, the rest are paired and averaged.
fn symmetrize<T: Real>(roots: &mut [Complex<T>], tol: T) {
    for z in roots.iter_mut() {
        if z.im.abs() <= tol * T::one().max(z.norm()) {
            z.im = T::zero();
        }
    }
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] || roots[i].im <= T::zero() {
            continue;
        }
        let partner = (0..roots.len()).filter(|&j| !used[j] && j != i && roots[j].im < T::zero()).min_by(|&a, &b| {
            let da = (roots[a] - roots[i].conj()).norm();
            let db = (roots[b] - roots[i].conj()).norm();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        });
        if let Some(j) = partner {
            let half = T::one() / (T::one() + T::one());
            let z = (roots[i] + roots[j].conj()) * half;
            roots[i] = z;
            roots[j] = z.conj();
            used[i] = true;
            used[j] = true;
        }
    }
}

/// `r_{m-1}(s) k^(-a(s)) - r_m(s)`: the Lundberg equation cleared of the
/// claim poles but not expanded into coefficients.
fn unexpanded<T: Real>(model: &RiskModel<T>, s: Complex<T>) -> Option<Complex<T>> {
    let k = model.interclaims().lt(-model.a_of_s(s)).ok()?;
    let v = model.claims().r_top().eval(s) * k - model.claims().r_bot().eval(s);
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

/// A few guarded Newton steps on [`unexpanded`]. Expanded coefficients lose
/// accuracy next to a claim pole, where the Lundberg defect is amplified by
/// `|p^(s)|`.
fn polish<T: Real>(model: &RiskModel<T>, z: Complex<T>) -> Complex<T> {
    let Some(mut fz) = unexpanded(model, z) else { return z };
    let mut z = z;
    let two = T::one() + T::one();
    for _ in 0..4 {
        let h = T::epsilon().cbrt() * T::one().max(z.norm());
        let hc = cplx(h);
        let (Some(up), Some(down)) = (unexpanded(model, z + hc), unexpanded(model, z - hc)) else { break };
        let slope = (up - down) / cplx(two * h);
        if slope.norm() == T::zero() {
            break;
        }
        let next = z - fz / slope;
        match unexpanded(model, next) {
            Some(fnext) if fnext.norm() < fz.norm() => {
                z = next;
                fz = fnext;
            }
            _ => break,
        }
    }
    z
}

/// Finds and classifies the roots of `r_m(s) det L(s)`.
pub fn find_roots<T: Real>(model: &RiskModel<T>) -> Result<LundbergRoots<T>> {
    let tol = T::tolerances();
    let n = model.phases();
    let m = model.claim_order();
    let poly = char_poly(model);
    let mut raw: Vec<Complex<T>> = poly_roots(&poly)?.into_iter().map(|z| polish(model, z)).collect();
    if poly.is_real(tol.realness) {
        symmetrize(&mut raw, tol.realness);
    }

    let mut rhos = Vec::with_capacity(n);
    let mut rs = Vec::with_capacity(m + n);
    if model.delta() == T::zero() {
        if let Some((k, _)) = raw
            .iter()
            .enumerate()
            .map(|(k, z)| (k, z.norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .filter(|&(_, r)| r < tol.zero_snap)
        {
            raw.remove(k);
            rhos.push(czero());
        }
    }
    for z in raw {
        if z.re.abs() <= tol.imaginary_axis * T::one().max(z.norm()) {
            return Err(Error::ImaginaryAxisRoot(format!("{z}")));
        }
        if z.re > T::zero() {
            rhos.push(z);
        } else {
            rs.push(-z);
        }
    }
    if rhos.len() != n || rs.len() != m + n {
        return Err(Error::RootCountMismatch {
            expected_rho: n,
            expected_r: m + n,
            found_rho: rhos.len(),
            found_r: rs.len(),
        });
    }
    rhos.sort_by(cmp_re_im);
    rs.sort_by(cmp_re_im);
    check_separation(&rhos, tol.root_separation)?;
    check_separation(&rs, tol.root_separation)?;

    let mut residuals = Vec::with_capacity(m + 2 * n);
    for s in rhos.iter().copied().chain(rs.iter().map(|&r| -r)) {
        residuals.push(det_l(model, s)?.norm());
    }
    let all_real = rhos.iter().chain(&rs).all(|z| z.im == T::zero());
    Ok(LundbergRoots { rhos, rs, char_poly: poly, residuals, all_real })
}

/// Value of the generalized Lundberg equation `k^(delta - c s - sigma^2 s^2 / 2) p^(s) - 1`.
pub fn lundberg_defect<T: Real>(model: &RiskModel<T>, s: Complex<T>) -> Result<Complex<T>> {
    let k = model.interclaims().lt(-model.a_of_s(s))?;
    Ok(k * model.claims().lt(s)? - cplx(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::{Penalty, RationalClaim};
    use crate::phase_type::PhaseType;

    type C = Complex<f64>;

    fn example() -> RiskModel<f64> {
        RiskModel::new(
            1.0,
            1.0,
            0.0,
            PhaseType::coxian(&[1.0, 4.0], &[0.5]).unwrap(),
            RationalClaim::exponential(1.0).unwrap(),
            Penalty::ruin_probability(),
        )
        .unwrap()
    }

    #[test]
    fn l_matrix_matches_closed_form() {
        let m = example();
        let s = C::new(0.7, 0.3);
        let l = eval_l(&m, s).unwrap();
        let one = C::new(1.0, 0.0);
        assert!((l[(0, 0)] - (s * s / 2.0 + s - 1.0 + one / (2.0 * (s + 1.0)))).norm() < 1e-15);
        assert!((l[(0, 1)] - 0.5).norm() < 1e-15);
        assert!((l[(1, 0)] - 4.0 / (s + 1.0)).norm() < 1e-15);
        assert!((l[(1, 1)] - (s * s / 2.0 + s - 4.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_factorization() {
        let m = example().with_delta(0.15).unwrap();
        let ph = m.interclaims();
        for k in 0..10 {
            let s = C::new(0.3 + 0.4 * k as f64, 1.0 - 0.3 * k as f64);
            let a = m.a_of_s(s);
            let lhs = det_l(&m, s).unwrap();
            let rhs = ph.b_matrix().add_diagonal(a).det() * (1.0 - ph.lt(-a).unwrap() * m.claims().lt(s).unwrap());
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
        }
    }

    #[test]
    fn char_poly_two_path() {
        for delta in [0.0, 0.2] {
            let m = example().with_delta(delta).unwrap();
            let p = char_poly(&m);
            assert_eq!(p.degree(), Some(5));
            assert!((p.leading() - 0.25).norm() < 1e-12);
            if delta == 0.0 {
                assert!(p.coeff(0).norm() < 1e-14);
            }
            for k in 0..10 {
                let s = C::new(-2.0 + 0.5 * k as f64, 0.7 * k as f64 - 3.0);
                let direct = m.claims().r_bot().eval(s) * det_l(&m, s).unwrap();
                assert!((p.eval(s) - direct).norm() <= 1e-9 * direct.norm());
            }
        }
    }

    #[test]
    fn example_roots() {
        let r = find_roots(&example()).unwrap();
        assert_eq!(r.rhos[0], C::new(0.0, 0.0));
        assert!((r.rhos[1].re - 2.06412).abs() < 1e-4);
        let want = [0.0806231, 3.0744, 3.90909];
        for (got, w) in r.rs.iter().zip(want) {
            assert!((got.re - w).abs() < 1e-4, "{got} vs {w}");
        }
        assert!(r.all_real);
        assert!(r.residuals.iter().all(|&x| x < 1e-10));
    }

    #[test]
    fn exponential_interclaims_with_discount() {
        let m = RiskModel::new(
            1.0,
            1.0,
            0.1,
            PhaseType::generalized_erlang(&[1.0]).unwrap(),
            RationalClaim::exponential(2.0).unwrap(),
            Penalty::ruin_probability(),
        )
        .unwrap();
        let r = find_roots(&m).unwrap();
        assert_eq!(r.rhos.len(), 1);
        assert_eq!(r.rs.len(), 2);
        // brute-force sign-change count on the real line for the cubic
        let p = char_poly(&m);
        let (mut pos, mut neg) = (0, 0);
        let grid: Vec<f64> = (0..=40_000).map(|k| -20.0 + k as f64 * 1e-3).collect();
        for w in grid.windows(2) {
            let (a, b) = (p.eval(C::new(w[0], 0.0)).re, p.eval(C::new(w[1], 0.0)).re);
            if a.signum() != b.signum() {
                if w[0] > 0.0 {
                    pos += 1
                } else {
                    neg += 1
                }
            }
        }
        assert_eq!((pos, neg), (1, 2));
        assert!(lundberg_defect(&m, r.rhos[0]).unwrap().norm() < 1e-8);
    }

    #[test]
    fn small_delta_root_tends_to_zero() {
        let r = find_roots(&example().with_delta(1e-6).unwrap()).unwrap();
        assert!(r.rhos[0].norm() < 1e-4);
        assert!(r.rhos[0].re > 0.0);
    }
}
