use num_complex::Complex;

use super::{CMatrix, Poly};
use crate::error::{Error, Result};
use crate::scalar::{cone, cplx, czero, lit, Real};

const NEWTON_STEPS: usize = 30;

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR
/// with Wilkinson shifts and deflation.
pub fn hessenberg_eigenvalues<T: Real>(mut h: CMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = h.dim();
    let eps = T::epsilon();
    let max_iter = 60 * n.max(2);
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig.push(h[(0, 0)]);
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == T::zero() {
                s = h.max_abs();
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig.push(h[(hi, hi)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        since_deflation += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence(total));
        }

        let mu = if since_deflation.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + cplx(lit::<T>(0.75) * h[(hi, hi - 1)].norm())
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = cplx::<T>(lit(0.5));
            let m = (a + d) * half;
            let disc = ((a - d) * (a - d) * cplx(lit(0.25)) + b * c).sqrt();
            let (l1, l2) = (m + disc, m - disc);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = x.norm().hypot(y.norm());
            let (c, s) = if r == T::zero() { (cone::<T>(), czero::<T>()) } else { (x / cplx(r), y / cplx(r)) };
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = c.conj() * a + s.conj() * b;
                h[(k + 1, j)] = -s * a + c * b;
            }
            rotations.push((c, s));
        }
        for (k, &(c, s)) in (lo..hi).zip(&rotations) {
            for i in lo..=(k + 1) {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s;
                h[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Diagonal similarity scaling (Parlett-Reinsch) to even out row and
/// column norms before the QR iteration.
fn balance<T: Real>(m: &mut CMatrix<T>) {
    let n = m.dim();
    let radix = lit::<T>(2.0);
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = T::zero();
            let mut row = T::zero();
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == T::zero() || row == T::zero() {
                continue;
            }
            let total = col + row;
            let mut f = T::one();
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col = col * radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < lit::<T>(0.95) * total {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= cplx(f);
                    m[(j, i)] *= cplx(f);
                }
            }
        }
    }
}

fn polish<T: Real>(p: &Poly<T>, dp: &Poly<T>, start: Complex<T>) -> Complex<T> {
    let mut best = start;
    let mut best_val = p.eval(start).norm();
    let mut z = start;
    for _ in 0..NEWTON_STEPS {
        if best_val == T::zero() {
            break;
        }
        let d = dp.eval(z);
        if d.norm() == T::zero() {
            break;
        }
        z = z - p.eval(z) / d;
        let v = p.eval(z).norm();
        if !(v < best_val) {
            if v.is_nan() || v > best_val * lit::<T>(1e3) {
                break;
            }
            continue;
        }
        best = z;
        best_val = v;
    }
    best
}

/// All complex roots of `p`, with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, each polished by Newton
/// iteration on the original polynomial. A polished value is kept only if
/// it lowers `|p(z)|`.
pub fn poly_roots<T: Real>(p: &Poly<T>) -> Result<Vec<Complex<T>>> {
    let deg = match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    let lead = p.leading();
    if deg == 1 {
        return Ok(vec![-p.coeff(0) / lead]);
    }
    let mut companion = CMatrix::zeros(deg);
    for j in 0..deg {
        companion[(0, j)] = -p.coeff(deg - 1 - j) / lead;
    }
    for i in 1..deg {
        companion[(i, i - 1)] = cone();
    }
    balance(&mut companion);
    let raw = hessenberg_eigenvalues(companion)?;
    let dp = p.derivative();
    Ok(raw.into_iter().map(|z| polish(p, &dp, z)).collect())
}
