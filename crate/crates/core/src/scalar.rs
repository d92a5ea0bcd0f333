//! Scalar abstractions shared by the numerical modules.
//!
//! Numerical code is written against [`Real`], which is satisfied by `f32`
//! and `f64`. The acceptance tolerances assume `f64`; `f32` instantiations
//! compile and run but will not reach them. Exact code (the mixed Hodge
//! kernel) works over [`Field`] instead, which covers `BigRational` and the
//! Gaussian rationals `Complex<BigRational>`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Floating point scalar used by every numerical routine.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`].
pub type C<T> = Complex<T>;

/// Shorthand for building complex numbers.
#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cl<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `2 pi i`.
#[inline]
pub fn two_pi_i<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::TAU())
}

#[inline]
pub fn to_c64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> C<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

/// Exact field scalar with exact equality and conjugation.
pub trait Field: Clone + Num + std::ops::Neg<Output = Self> + PartialEq + Debug + Conjugate {
    fn from_int(n: i64) -> Self;
}

pub type Rational = num_rational::BigRational;
/// Gaussian rationals `Q(i)`.
pub type GaussianRational = Complex<Rational>;

impl Field for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
}

impl Field for GaussianRational {
    fn from_int(n: i64) -> Self {
        Complex::new(Rational::from_integer(n.into()), Rational::from_integer(0.into()))
    }
}

/// Complex conjugation for exact scalars (identity on real fields).
pub trait Conjugate {
    fn conjugate(&self) -> Self;
}

impl Conjugate for Rational {
    fn conjugate(&self) -> Self {
        self.clone()
    }
}

impl Conjugate for GaussianRational {
    fn conjugate(&self) -> Self {
        self.conj()
    }
}

/// Small dense complex matrix helpers (row-major `Vec<Vec<_>>`), sized for
/// the handful of `2g x 2g` systems that appear in period computations.
pub mod dense {
    use super::*;

    pub type CMat<T> = Vec<Vec<C<T>>>;

    pub fn identity<T: Real>(n: usize) -> CMat<T> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { cone() } else { czero() }).collect())
            .collect()
    }

    pub fn matmul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
        let n = a.len();
        let m = b.first().map_or(0, |r| r.len());
        let k = b.len();
        let mut out = vec![vec![czero(); m]; n];
        for i in 0..n {
            for l in 0..k {
                let ail = a[i][l];
                for j in 0..m {
                    out[i][j] += ail * b[l][j];
                }
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan with partial pivoting. `None` when the pivot
    /// falls below `tol` relative to the largest entry.
    pub fn inverse<T: Real>(a: &CMat<T>, tol: T) -> Option<CMat<T>> {
        let n = a.len();
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, z| m.max(z.norm()));
        if scale == T::zero() {
            return None;
        }
        let mut m: CMat<T> = a.clone();
        let mut inv = identity::<T>(n);
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, m[r][col].norm()))
                .fold((col, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= tol * scale {
                return None;
            }
            m.swap(col, piv);
            inv.swap(col, piv);
            let p = m[col][col];
            for j in 0..n {
                m[col][j] = m[col][j] / p;
                inv[col][j] = inv[col][j] / p;
            }
            for r in 0..n {
                if r != col {
                    let fct = m[r][col];
                    if fct != czero() {
                        for j in 0..n {
                            let (mc, ic) = (m[col][j], inv[col][j]);
                            m[r][j] -= fct * mc;
                            inv[r][j] -= fct * ic;
                        }
                    }
                }
            }
        }
        Some(inv)
    }

    /// Solves `a x = b` for square `a`.
    pub fn solve<T: Real>(a: &CMat<T>, b: &[C<T>], tol: T) -> Option<Vec<C<T>>> {
        let inv = inverse(a, tol)?;
        Some(
            inv.iter()
                .map(|row| row.iter().zip(b).fold(czero(), |s, (x, y)| s + *x * *y))
                .collect(),
        )
    }

    pub fn max_abs_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
        a.iter()
            .zip(b)
            .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (*x - *y).norm()))
            .fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::dense::*;
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a: CMat<f64> = vec![
            vec![cl(2.0, 1.0), cl(0.5, 0.0), cl(0.0, -1.0)],
            vec![cl(1.0, 0.0), cl(3.0, 0.0), cl(0.2, 0.3)],
            vec![cl(0.0, 0.0), cl(-1.0, 2.0), cl(1.0, 1.0)],
        ];
        let inv = inverse(&a, 1e-14).unwrap();
        assert!(max_abs_diff(&matmul(&a, &inv), &identity(3)) < 1e-13);
    }

    #[test]
    fn singular_detected() {
        let a: CMat<f64> = vec![vec![cl(1.0, 0.0), cl(2.0, 0.0)], vec![cl(2.0, 0.0), cl(4.0, 0.0)]];
        assert!(inverse(&a, 1e-12).is_none());
    }
}
