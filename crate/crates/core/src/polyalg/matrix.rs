use std::fmt;
use std::ops::{Add, Div, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use super::Poly;
use crate::error::{Error, Result};
use crate::scalar::{cone, cplx, czero, lit, Real};

/// Square dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

/// LU factorization with partial pivoting, `P A = L U` packed in one matrix.
struct Lu<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        CMatrix { n, data: vec![czero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("expected a square matrix, got {n} rows")));
        }
        Ok(CMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| cplx(x)).collect()).collect())
    }

    /// `u v^T` for column vector `u` and row vector `v`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        assert_eq!(u.len(), v.len());
        let n = u.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[i] * v[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scaled(&self, k: Complex<T>) -> Self {
        CMatrix { n: self.n, data: self.data.iter().map(|&x| x * k).collect() }
    }

    pub fn add_diagonal(&self, k: Complex<T>) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += k;
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> T {
        (0..self.n).map(|j| (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, j)].norm())).fold(T::zero(), T::max)
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| (0..self.n).fold(czero(), |acc, j| acc + self[(i, j)] * v[j])).collect()
    }

    /// Row vector times matrix.
    pub fn vecmat(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|j| (0..self.n).fold(czero(), |acc, i| acc + v[i] * self[(i, j)])).collect()
    }

    fn lu(&self) -> Lu<T> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].norm().partial_cmp(&a[(j, k)].norm()).unwrap()).unwrap();
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            if pivot.norm() == T::zero() {
                singular = true;
                continue;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Lu { lu: a, perm, sign, singular }
    }

    pub fn det(&self) -> Complex<T> {
        match self.n {
            1 => self[(0, 0)],
            2 => self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)],
            _ => {
                let lu = self.lu();
                if lu.singular {
                    return czero();
                }
                (0..self.n).fold(cplx(lu.sign), |acc, i| acc * lu.lu[(i, i)])
            }
        }
    }

    /// Solves `self x = rhs`.
    pub fn solve(&self, rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let lu = self.lu();
        let scale = self.max_abs();
        let tiny = T::epsilon() * scale * lit::<T>(n as f64);
        if lu.singular || (0..n).any(|i| lu.lu[(i, i)].norm() <= tiny) {
            return Err(Error::Pole("singular linear system".into()));
        }
        let mut x: Vec<Complex<T>> = lu.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = x[j];
                x[i] -= lu.lu[(i, j)] * v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = x[j];
                x[i] -= lu.lu[(i, j)] * v;
            }
            x[i] /= lu.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![czero(); n];
            e[j] = cone();
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n - 1;
        let mut m = Self::zeros(n);
        for (ii, i) in (0..self.n).filter(|&i| i != row).enumerate() {
            for (jj, j) in (0..self.n).filter(|&j| j != col).enumerate() {
                m[(ii, jj)] = self[(i, j)];
            }
        }
        m
    }

    fn adjugate_by_cofactors(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return Self::identity(1);
        }
        let mut adj = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                adj[(j, i)] = if (i + j) % 2 == 0 { c } else { -c };
            }
        }
        adj
    }

    /// Classical adjoint: `self * adj = det(self) I`, defined for singular
    /// matrices too.
    pub fn adjugate(&self) -> Self {
        if self.n <= 4 {
            return self.adjugate_by_cofactors();
        }
        let lu = self.lu();
        let pivots: Vec<T> = (0..self.n).map(|i| lu.lu[(i, i)].norm()).collect();
        let big = pivots.iter().copied().fold(T::zero(), T::max);
        let small = pivots.iter().copied().fold(T::infinity(), T::min);
        if lu.singular || small <= lit::<T>(1e-8) * big {
            return self.adjugate_by_cofactors();
        }
        match self.inverse() {
            Ok(inv) => inv.scaled(self.det()),
            Err(_) => self.adjugate_by_cofactors(),
        }
    }

    /// Matrix exponential by scaling and squaring with a (6,6) Pade approximant.
    pub fn expm(&self) -> Result<Self> {
        const Q: usize = 6;
        let norm = self.norm1();
        let mut squarings = 0u32;
        if norm > lit::<T>(0.5) {
            squarings = (norm / lit::<T>(0.5)).log2().ceil().to_u32().unwrap_or(0);
        }
        let a = self.scaled(cplx(lit::<T>(0.5).powi(squarings as i32)));
        let mut coeff = T::one();
        let mut num = Self::identity(self.n);
        let mut den = Self::identity(self.n);
        let mut power = Self::identity(self.n);
        for k in 1..=Q {
            coeff = coeff * lit::<T>((Q - k + 1) as f64) / lit::<T>(((2 * Q - k + 1) * k) as f64);
            power = &power * &a;
            let term = power.scaled(cplx(coeff));
            num = &num + &term;
            den = if k % 2 == 0 { &den + &term } else { &den - &term };
        }
        let mut r = Self::zeros(self.n);
        for j in 0..self.n {
            let col: Vec<Complex<T>> = (0..self.n).map(|i| num[(i, j)]).collect();
            let x = den.solve(&col)?;
            for i in 0..self.n {
                r[(i, j)] = x[i];
            }
        }
        for _ in 0..squarings {
            r = &r * &r;
        }
        Ok(r)
    }
}

/// Faddeev-LeVerrier recursion for `A`.
///
/// Returns the characteristic polynomial `det(zI - A)` and matrices
/// `C_0..C_{n-1}` with `adj(zI - A) = sum_k C_k z^k`.
pub fn faddeev_leverrier<T: Real>(a: &CMatrix<T>) -> (Poly<T>, Vec<CMatrix<T>>) {
    let n = a.dim();
    let mut coeffs = vec![czero::<T>(); n + 1];
    coeffs[n] = cone();
    // m_k multiplies z^(n-k)
    let mut adj_desc = Vec::with_capacity(n);
    let mut m = CMatrix::identity(n);
    for k in 1..=n {
        if k > 1 {
            m = (a * &m).add_diagonal(coeffs[n - k + 1]);
        }
        adj_desc.push(m.clone());
        let am = a * &m;
        coeffs[n - k] = -am.trace() / cplx(lit::<T>(k as f64));
    }
    adj_desc.reverse();
    (Poly::new(coeffs), adj_desc)
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Sub for CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: CMatrix<T>) -> CMatrix<T> {
        &self - &rhs
    }
}

impl<T: Real> Add for CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: CMatrix<T>) -> CMatrix<T> {
        &self + &rhs
    }
}

impl<T: Real> Div<Complex<T>> for CMatrix<T> {
    type Output = CMatrix<T>;
    fn div(self, rhs: Complex<T>) -> CMatrix<T> {
        let inv = cone::<T>() / rhs;
        self.scaled(inv)
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n.max(1))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn two_by_two_adjugate() {
        let m = CMatrix::from_rows(vec![vec![c(1.0), c(2.0)], vec![c(3.0), c(4.0)]]).unwrap();
        let adj = m.adjugate();
        let want = CMatrix::from_rows(vec![vec![c(4.0), c(-2.0)], vec![c(-3.0), c(1.0)]]).unwrap();
        assert_eq!(adj, want);
    }

    #[test]
    fn identity_adjugate() {
        let id = CMatrix::<f64>::identity(3);
        assert_eq!(id.adjugate(), id);
    }

    #[test]
    fn adjugate_of_singular_matrix() {
        let m = CMatrix::from_rows(vec![
            vec![c(1.0), c(2.0), c(3.0)],
            vec![c(2.0), c(4.0), c(6.0)],
            vec![c(1.0), c(0.0), c(1.0)],
        ])
        .unwrap();
        let prod = &m * &m.adjugate();
        assert!(prod.max_abs() < 1e-12);
        assert!(m.adjugate().max_abs() > 0.1);
    }

    #[test]
    fn large_adjugate_uses_inverse_path() {
        let n = 6;
        let mut m = CMatrix::<f64>::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.1);
            }
            m[(i, i)] += c(6.0);
        }
        let prod = &m * &m.adjugate();
        let det = m.det();
        let target = CMatrix::identity(n).scaled(det);
        assert!((&prod - &target).max_abs() < 1e-9 * det.norm());
    }

    #[test]
    fn solve_and_inverse() {
        let m = CMatrix::from_rows(vec![vec![c(2.0), c(1.0)], vec![c(1.0), c(3.0)]]).unwrap();
        let x = m.solve(&[c(3.0), c(5.0)]).unwrap();
        assert!((x[0] - c(0.8)).norm() < 1e-15 && (x[1] - c(1.4)).norm() < 1e-15);
        let inv = m.inverse().unwrap();
        assert!((&(&m * &inv) - &CMatrix::identity(2)).max_abs() < 1e-15);
        let sing = CMatrix::from_rows(vec![vec![c(1.0), c(1.0)], vec![c(1.0), c(1.0)]]).unwrap();
        assert!(sing.solve(&[c(1.0), c(1.0)]).is_err());
    }

    #[test]
    fn faddeev_leverrier_matches_direct() {
        let b = CMatrix::from_real_rows(&[vec![-1.0, 0.5], vec![0.0, -4.0]]).unwrap();
        let (p, adj) = faddeev_leverrier(&b);
        // det(zI - B) = (z + 1)(z + 4)
        assert_eq!(p, Poly::from_real(&[4.0, 5.0, 1.0]));
        let z = C::new(0.7, 1.3);
        let direct = b.scaled(c(-1.0)).add_diagonal(z).adjugate();
        let series = adj.iter().enumerate().fold(CMatrix::zeros(2), |acc, (k, m)| &acc + &m.scaled(z.powu(k as u32)));
        assert!((&direct - &series).max_abs() < 1e-14);
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let d = CMatrix::from_real_rows(&[vec![-1.0, 0.0], vec![0.0, -4.0]]).unwrap();
        let e = d.scaled(c(3.0)).expm().unwrap();
        assert!((e[(0, 0)].re - (-3.0f64).exp()).abs() < 1e-13);
        assert!((e[(1, 1)].re - (-12.0f64).exp()).abs() < 1e-13);
        let nil = CMatrix::from_real_rows(&[vec![0.0f64, 2.0], vec![0.0, 0.0]]).unwrap();
        let e = nil.expm().unwrap();
        assert!((e[(0, 1)].re - 2.0).abs() < 1e-14);
    }
}
