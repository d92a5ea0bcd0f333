//! Rational functions `f = s * A(x, y) / B(x, y)` on a curve.

use super::poly::Poly2;
use super::series::Series;
use super::{CurveModel, LocalChart, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{cone, Real, C};

#[derive(Clone, Debug)]
pub struct RationalFunction<T: Real> {
    pub numerator: Poly2<T>,
    pub denominator: Poly2<T>,
    pub scale: C<T>,
}

/// `A(x(t), y(t))` together with a coefficient-wise majorant, used to decide
/// which leading coefficients vanish.
pub fn poly_series<T: Real>(a: &Poly2<T>, chart: &LocalChart<T>) -> (Series<T>, Series<T>) {
    let len = chart.x.len().min(chart.y.len());
    let (xa, ya) = (chart.x.abs(), chart.y.abs());
    let mut xs = vec![Series::constant(cone(), len)];
    let mut xm = vec![Series::constant(cone(), len)];
    for i in 1..=a.deg_x() {
        xs.push(xs[i - 1].mul(&chart.x));
        xm.push(xm[i - 1].mul(&xa));
    }
    let mut ys = vec![Series::constant(cone(), len)];
    let mut ym = vec![Series::constant(cone(), len)];
    for j in 1..=a.deg_y() {
        ys.push(ys[j - 1].mul(&chart.y));
        ym.push(ym[j - 1].mul(&ya));
    }
    let mut acc: Option<(Series<T>, Series<T>)> = None;
    for (i, row) in a.coeffs.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if z.norm() == T::zero() {
                continue;
            }
            let term = xs[i].mul(&ys[j]).scale(*z);
            let maj = xm[i].mul(&ym[j]).scale(C::new(z.norm(), T::zero()));
            acc = Some(match acc {
                None => (term, maj),
                Some((s, m)) => (s.add(&term), m.add(&maj)),
            });
        }
    }
    acc.unwrap_or_else(|| (Series::zero(len), Series::zero(len)))
}

/// Relative tolerance for deciding that a series coefficient cancels.
pub const CANCEL_TOL: f64 = 1e-9;

impl<T: Real> RationalFunction<T> {
    pub fn new(numerator: Poly2<T>, denominator: Poly2<T>) -> NumResult<Self> {
        if numerator.is_zero() {
            return Err(NumError::Degenerate("numerator is identically zero".into()));
        }
        if denominator.is_zero() {
            return Err(NumError::Degenerate("denominator is identically zero".into()));
        }
        Ok(RationalFunction { numerator, denominator, scale: cone() })
    }

    pub fn eval(&self, x: C<T>, y: C<T>) -> NumResult<C<T>> {
        let b = self.denominator.eval(x, y);
        if b.norm() == T::zero() {
            return Err(NumError::Singular(format!("denominator vanishes at x = {x}")));
        }
        Ok(self.scale * self.numerator.eval(x, y) / b)
    }

    /// `d log f / dt` along a path with velocity `(dx, dy)`.
    pub fn dlog(&self, x: C<T>, y: C<T>, dx: C<T>, dy: C<T>) -> NumResult<C<T>> {
        let part = |p: &Poly2<T>| -> NumResult<C<T>> {
            let v = p.eval(x, y);
            if v.norm() == T::zero() {
                return Err(NumError::Singular(format!("log-derivative pole at x = {x}")));
            }
            Ok((p.dx().eval(x, y) * dx + p.dy().eval(x, y) * dy) / v)
        };
        Ok(part(&self.numerator)? - part(&self.denominator)?)
    }

    /// Rescales so that `f(P) = 1`.
    pub fn normalize_at(&mut self, x: C<T>, y: C<T>) -> NumResult<()> {
        self.scale = cone();
        let v = self.eval(x, y)?;
        if v.norm() == T::zero() || !v.norm().is_finite() {
            return Err(NumError::Degenerate("f vanishes or has a pole at the normalization point".into()));
        }
        self.scale = cone::<T>() / v;
        Ok(())
    }

    /// Order of vanishing at a point, from local expansions of numerator
    /// and denominator.
    pub fn order_at(&self, model: &CurveModel<T>, pt: &PointOnCurve<T>, len: usize) -> NumResult<i64> {
        let chart = model.local_chart(pt, len)?;
        Ok(poly_order(&self.numerator, &chart)? - poly_order(&self.denominator, &chart)?)
    }
}

pub fn poly_order<T: Real>(a: &Poly2<T>, chart: &LocalChart<T>) -> NumResult<i64> {
    let (s, m) = poly_series(a, chart);
    s.valuation(&m, T::lit(CANCEL_TOL), T::zero())
        .ok_or_else(|| NumError::Divisor("polynomial vanishes to the working series order; is it divisible by the curve equation?".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;
    use crate::scalar::cl;

    #[test]
    fn orders_on_genus_two() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let f = RationalFunction::new(parse_poly("x - 1").unwrap(), parse_poly("x - zeta(5,1)").unwrap()).unwrap();
        let q = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let z5 = crate::curve::root_of_unity::<f64>(5, 1);
        let r = PointOnCurve::affine(z5, cl(0.0, 0.0));
        assert_eq!(f.order_at(&m, &q, 20).unwrap(), 2);
        assert_eq!(f.order_at(&m, &r, 20).unwrap(), -2);
        assert_eq!(f.order_at(&m, &PointOnCurve::Infinity(0), 20).unwrap(), 0);
        let g = RationalFunction::new(parse_poly("y").unwrap(), Poly2::constant(cl(1.0, 0.0))).unwrap();
        assert_eq!(g.order_at(&m, &q, 20).unwrap(), 1);
        assert_eq!(g.order_at(&m, &PointOnCurve::Infinity(0), 20).unwrap(), -5);
    }
}
