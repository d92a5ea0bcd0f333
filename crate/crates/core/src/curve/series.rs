//! Truncated Laurent series in a local parameter.

use crate::scalar::{czero, Real, C};

/// `t^val * (c[0] + c[1] t + ... )`, truncated after `c.len()` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T: Real> {
    pub val: i64,
    pub c: Vec<C<T>>,
}

impl<T: Real> Series<T> {
    pub fn new(val: i64, c: Vec<C<T>>) -> Self {
        Series { val, c }
    }

    pub fn constant(z: C<T>, len: usize) -> Self {
        let mut c = vec![czero::<T>(); len];
        c[0] = z;
        Series { val: 0, c }
    }

    pub fn zero(len: usize) -> Self {
        Series { val: 0, c: vec![czero::<T>(); len] }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Exclusive upper bound of the known exponents.
    pub fn horizon(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    /// Coefficient of `t^k` (zero outside the stored window).
    pub fn coeff(&self, k: i64) -> C<T> {
        let i = k - self.val;
        if i < 0 || i >= self.c.len() as i64 {
            czero::<T>()
        } else {
            self.c[i as usize]
        }
    }

    fn with_window(val: i64, horizon: i64, f: impl Fn(i64) -> C<T>) -> Self {
        let len = (horizon - val).max(0) as usize;
        Series { val, c: (0..len).map(|i| f(val + i as i64)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = self.val.min(o.val);
        let hor = self.horizon().min(o.horizon());
        Self::with_window(val, hor, |k| self.coeff(k) + o.coeff(k))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-C::new(T::one(), T::zero())))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Series { val: self.val, c: self.c.iter().map(|z| *z * s).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let len = self.len().min(o.len());
        let mut c = vec![czero::<T>(); len];
        for i in 0..len {
            for j in 0..len - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Series { val: self.val + o.val, c }
    }

    /// Coefficient-wise absolute values; multiplying majorants gives a
    /// majorant of the product.
    pub fn abs(&self) -> Self {
        Series { val: self.val, c: self.c.iter().map(|z| C::new(z.norm(), T::zero())).collect() }
    }

    /// Drops the first `k` stored coefficients, raising the valuation.
    pub fn shift_out(&self, k: usize) -> Self {
        Series { val: self.val + k as i64, c: self.c[k.min(self.len())..].to_vec() }
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.c.is_empty() && self.c[0].norm() > T::zero(), "inverse of a series with zero leading term");
        let n = self.len();
        let mut r = vec![czero::<T>(); n];
        r[0] = C::new(T::one(), T::zero()) / self.c[0];
        for k in 1..n {
            let mut s = czero::<T>();
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s * r[0];
        }
        Series { val: -self.val, c: r }
    }

    pub fn powi(&self, e: i64) -> Self {
        if e < 0 {
            return self.inverse().powi(-e);
        }
        let mut acc = Series::constant(C::new(T::one(), T::zero()), self.len());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `self^alpha` for a power series with nonzero constant term, with the
    /// constant term of the result prescribed by `lead` (which must satisfy
    /// `lead^(1/alpha) = c[0]` up to the chosen branch).
    pub fn power_with_lead(&self, alpha: T, lead: C<T>) -> Self {
        assert_eq!(self.val, 0, "power_with_lead expects a power series");
        let n = self.len();
        let f0 = self.c[0];
        let mut h = vec![czero::<T>(); n];
        h[0] = lead;
        for k in 1..n {
            let mut s = czero::<T>();
            for j in 1..=k {
                let w = (alpha + T::one()) * T::from_usize(j).unwrap() - T::from_usize(k).unwrap();
                s += self.c[j] * h[k - j] * w;
            }
            h[k] = s / (f0 * T::from_usize(k).unwrap());
        }
        Series { val: 0, c: h }
    }

    /// `d/dt`.
    pub fn derivative(&self) -> Self {
        Series {
            val: self.val - 1,
            c: self.c.iter().enumerate().map(|(i, z)| *z * T::from_i64(self.val + i as i64).unwrap()).collect(),
        }
    }

    /// Substitutes `t -> t^m` into a power series.
    pub fn compose_power(&self, m: usize, len: usize) -> Self {
        let mut c = vec![czero::<T>(); len];
        for (i, z) in self.c.iter().enumerate() {
            if i * m < len {
                c[i * m] = *z;
            } else {
                break;
            }
        }
        Series { val: self.val * m as i64, c }
    }

    /// Valuation, treating a coefficient as zero when it is below
    /// `rel_tol` times the matching coefficient of `majorant`.
    /// Returns `None` if every stored coefficient is zero.
    pub fn valuation(&self, majorant: &Self, rel_tol: T, abs_tol: T) -> Option<i64> {
        (self.val..self.horizon()).find(|&k| self.coeff(k).norm() > rel_tol * majorant.coeff(k).norm() + abs_tol)
    }

    /// Evaluates the truncation at `t`.
    pub fn eval(&self, t: C<T>) -> C<T> {
        let mut acc: C<T> = czero::<T>();
        for z in self.c.iter().rev() {
            acc = acc * t + *z;
        }
        acc * t.powi(self.val as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    fn geometric(len: usize) -> Series<f64> {
        Series::new(0, (0..len).map(|_| cl(1.0, 0.0)).collect())
    }

    #[test]
    fn inverse_and_powers() {
        let g = geometric(12);
        let inv = g.inverse();
        assert!((inv.c[0] - cl(1.0, 0.0)).norm() < 1e-15);
        assert!((inv.c[1] + cl(1.0, 0.0)).norm() < 1e-15);
        assert!(inv.c[2..].iter().all(|z| z.norm() < 1e-15));
        let sq = g.powi(2);
        for k in 0..12 {
            assert!((sq.c[k] - cl((k + 1) as f64, 0.0)).norm() < 1e-12);
        }
        let root = sq.power_with_lead(0.5, cl(1.0, 0.0));
        for k in 0..12 {
            assert!((root.c[k] - g.c[k]).norm() < 1e-12);
        }
        let neg = sq.power_with_lead(0.5, cl(-1.0, 0.0));
        assert!((neg.c[5] + g.c[5]).norm() < 1e-12);
    }

    #[test]
    fn laurent_valuation_and_derivative() {
        let t = Series::<f64>::new(1, vec![cl(1.0, 0.0); 10]);
        let inv = t.inverse();
        assert_eq!(inv.val, -1);
        let d = inv.derivative();
        assert_eq!(d.val, -2);
        assert!((d.coeff(-2) + cl(1.0, 0.0)).norm() < 1e-14);
        let z = t.sub(&t);
        assert_eq!(z.valuation(&t.abs(), 1e-12, 0.0), None);
        let x = Series::<f64>::new(0, vec![cl(1e-20, 0.0), cl(0.0, 0.0), cl(2.0, 0.0), cl(1.0, 0.0)]);
        let maj = Series::<f64>::new(0, vec![cl(1.0, 0.0); 4]);
        assert_eq!(x.valuation(&maj, 1e-10, 0.0), Some(2));
    }
}
