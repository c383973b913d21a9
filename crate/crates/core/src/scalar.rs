use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Numerical thresholds used throughout the solver.
///
/// The `f64` table holds the values the solver is specified against; the
/// `f32` table widens them to what single precision can resolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Minimum relative separation between distinct roots / nodes.
    pub root_separation: T,
    /// A root this close to zero is snapped to exactly zero when delta = 0.
    pub zero_snap: T,
    /// Relative tolerance under which two exponential rates are merged.
    pub rate_merge: T,
    /// A root with |Re| below this (relative) is considered on the imaginary axis.
    pub imaginary_axis: T,
    /// Imaginary parts below this (relative) are dropped when symmetrizing roots.
    pub realness: T,
    /// Coefficients below this fraction of the largest are pruned from solutions.
    pub prune: T,
    /// Relative discrepancy allowed between the three transform paths.
    pub transform_consistency: T,
}

/// Scalar field for all numerical code: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    fn tolerances() -> Tolerances<Self>;
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            root_separation: 1e-6,
            zero_snap: 1e-8,
            rate_merge: 1e-9,
            imaginary_axis: 1e-10,
            realness: 1e-9,
            prune: 1e-11,
            transform_consistency: 1e-7,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            root_separation: 1e-3,
            zero_snap: 1e-3,
            rate_merge: 1e-5,
            imaginary_axis: 1e-5,
            realness: 1e-4,
            prune: 1e-5,
            transform_consistency: 1e-3,
        }
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn factorial<T: Real>(k: u32) -> T {
    (1..=k).fold(T::one(), |acc, i| acc * lit::<T>(i as f64))
}

pub(crate) fn binomial<T: Real>(n: u32, k: u32) -> T {
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * lit::<T>((n - i) as f64) / lit::<T>((i + 1) as f64);
    }
    acc
}

/// `z^k` for small nonnegative integer powers.
pub(crate) fn cpowi<T: Real>(z: Complex<T>, k: u32) -> Complex<T> {
    let mut acc = cone::<T>();
    for _ in 0..k {
        acc *= z;
    }
    acc
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
