//! Symbolic differential forms and their pullbacks along paths.

use super::function::{poly_order, poly_series, RationalFunction, CANCEL_TOL};
use super::poly::Poly2;
use super::series::Series;
use super::{CurveModel, LocalChart, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{cone, czero, Real, C};

/// A point on a parametrized path with its velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint<T: Real> {
    pub x: C<T>,
    pub y: C<T>,
    pub dx: C<T>,
    pub dy: C<T>,
}

#[derive(Clone, Debug)]
pub enum DifferentialForm<T: Real> {
    /// `coeff * x^a * y^(-b) dx`.
    Monomial { coeff: C<T>, a: u32, b: u32 },
    /// `df / f`.
    Dlog(RationalFunction<T>),
    /// `df`.
    Exact(RationalFunction<T>),
    /// `(num / den) dx`.
    Rational { num: Poly2<T>, den: Poly2<T> },
    /// Complex conjugate of a form; not meromorphic.
    Conj(Box<DifferentialForm<T>>),
    /// `g * omega` for a function `g`.
    Times(RationalFunction<T>, Box<DifferentialForm<T>>),
    Combination(Vec<(C<T>, DifferentialForm<T>)>),
}

impl<T: Real> DifferentialForm<T> {
    pub fn monomial(a: u32, b: u32) -> Self {
        DifferentialForm::Monomial { coeff: cone(), a, b }
    }

    pub fn dx() -> Self {
        Self::monomial(0, 0)
    }

    pub fn conj(self) -> Self {
        DifferentialForm::Conj(Box::new(self))
    }

    pub fn combination(terms: Vec<(C<T>, DifferentialForm<T>)>) -> Self {
        DifferentialForm::Combination(terms)
    }

    pub fn is_meromorphic(&self) -> bool {
        match self {
            DifferentialForm::Conj(_) => false,
            DifferentialForm::Times(_, w) => w.is_meromorphic(),
            DifferentialForm::Combination(v) => v.iter().all(|(_, w)| w.is_meromorphic()),
            _ => true,
        }
    }

    /// Pullback coefficient `omega(gamma(t)) / dt`.
    pub fn pullback(&self, p: &PathPoint<T>) -> NumResult<C<T>> {
        match self {
            DifferentialForm::Monomial { coeff, a, b } => {
                if *b > 0 && p.y.norm() == T::zero() {
                    return Err(NumError::Singular(format!("y^-{b} dx evaluated at y = 0 (x = {})", p.x)));
                }
                let mut v = *coeff * p.dx;
                if *a > 0 {
                    v *= p.x.powu(*a);
                }
                if *b > 0 {
                    v /= p.y.powu(*b);
                }
                Ok(v)
            }
            DifferentialForm::Dlog(f) => f.dlog(p.x, p.y, p.dx, p.dy),
            DifferentialForm::Exact(f) => Ok(f.eval(p.x, p.y)? * f.dlog(p.x, p.y, p.dx, p.dy)?),
            DifferentialForm::Rational { num, den } => {
                let d = den.eval(p.x, p.y);
                if d.norm() == T::zero() {
                    return Err(NumError::Singular(format!("form has a pole at x = {}", p.x)));
                }
                Ok(num.eval(p.x, p.y) / d * p.dx)
            }
            DifferentialForm::Conj(w) => Ok(w.pullback(p)?.conj()),
            DifferentialForm::Times(g, w) => Ok(g.eval(p.x, p.y)? * w.pullback(p)?),
            DifferentialForm::Combination(v) => {
                let mut acc = czero();
                for (k, w) in v {
                    acc += *k * w.pullback(p)?;
                }
                Ok(acc)
            }
        }
    }

    /// Laurent expansion of the coefficient of `dt` in a local chart.
    pub fn local_series(&self, chart: &LocalChart<T>) -> NumResult<Series<T>> {
        let len = chart.x.len();
        let xdot = chart.x.derivative();
        let log_derivative = |p: &Poly2<T>| -> NumResult<Series<T>> {
            let (s, m) = poly_series(p, chart);
            let v = s
                .valuation(&m, T::lit(CANCEL_TOL), T::zero())
                .ok_or_else(|| NumError::Divisor("function vanishes identically on the curve".into()))?;
            let lead = s.shift_out((v - s.val) as usize);
            Ok(lead.derivative().mul(&lead.inverse()))
        };
        match self {
            DifferentialForm::Monomial { coeff, a, b } => {
                Ok(chart.x.powi(*a as i64).mul(&chart.y.powi(-(*b as i64))).mul(&xdot).scale(*coeff))
            }
            DifferentialForm::Dlog(f) => Ok(log_derivative(&f.numerator)?.sub(&log_derivative(&f.denominator)?)),
            DifferentialForm::Exact(f) => {
                let (a, _) = poly_series(&f.numerator, chart);
                let (b, bm) = poly_series(&f.denominator, chart);
                let v = b
                    .valuation(&bm, T::lit(CANCEL_TOL), T::zero())
                    .ok_or_else(|| NumError::Divisor("denominator vanishes on the curve".into()))?;
                let b = b.shift_out((v - b.val) as usize);
                Ok(a.mul(&b.inverse()).scale(f.scale).derivative())
            }
            DifferentialForm::Rational { num, den } => {
                let (a, _) = poly_series(num, chart);
                let (b, bm) = poly_series(den, chart);
                let v = b
                    .valuation(&bm, T::lit(CANCEL_TOL), T::zero())
                    .ok_or_else(|| NumError::Divisor("denominator vanishes on the curve".into()))?;
                let b = b.shift_out((v - b.val) as usize);
                Ok(a.mul(&b.inverse()).mul(&xdot))
            }
            DifferentialForm::Conj(_) => Err(NumError::Unsupported("local series of a non-meromorphic form".into())),
            DifferentialForm::Times(g, w) => {
                let (a, _) = poly_series(&g.numerator, chart);
                let (b, bm) = poly_series(&g.denominator, chart);
                let v = b
                    .valuation(&bm, T::lit(CANCEL_TOL), T::zero())
                    .ok_or_else(|| NumError::Divisor("denominator vanishes on the curve".into()))?;
                let b = b.shift_out((v - b.val) as usize);
                Ok(a.mul(&b.inverse()).scale(g.scale).mul(&w.local_series(chart)?))
            }
            DifferentialForm::Combination(v) => {
                let mut acc = Series::zero(len);
                let mut first = true;
                for (k, w) in v {
                    let s = w.local_series(chart)?.scale(*k);
                    acc = if first { s } else { acc.add(&s) };
                    first = false;
                }
                Ok(acc)
            }
        }
    }

    /// Residue at a point of the curve.
    pub fn residue(&self, model: &CurveModel<T>, pt: &PointOnCurve<T>) -> NumResult<C<T>> {
        let chart = model.local_chart(pt, 32)?;
        Ok(self.local_series(&chart)?.coeff(-1))
    }

    /// Order of the form at a point (`None` if it vanishes to the series
    /// order used).
    pub fn order_at(&self, model: &CurveModel<T>, pt: &PointOnCurve<T>) -> NumResult<Option<i64>> {
        let chart = model.local_chart(pt, 32)?;
        let s = self.local_series(&chart)?;
        let scale = s.c.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        Ok(s.valuation(&Series::zero(s.len()), T::zero(), T::lit(1e-12) * scale))
    }
}

/// Raw basis `x^a y^(-b) dx` of holomorphic differentials of `y^n = p(x)`:
/// `1 <= b <= n - 1`, `a >= 0`, `b d - n (a + 1) >= gcd(n, d)`, ordered by
/// `(b, a)`. Regularity is confirmed by local expansion at every branch point
/// and every point at infinity.
pub fn holomorphic_basis<T: Real>(model: &CurveModel<T>) -> NumResult<Vec<DifferentialForm<T>>> {
    let s = model.sup()?;
    let (n, d) = (s.n as i64, s.p.degree() as i64);
    let delta = num_integer::gcd(n, d);
    let mut out = Vec::new();
    for b in 1..n {
        let mut a = 0;
        while b * d - n * (a + 1) >= delta {
            out.push(DifferentialForm::monomial(a as u32, b as u32));
            a += 1;
        }
    }
    if out.len() != s.genus {
        return Err(NumError::Basis(format!("found {} holomorphic monomials for genus {}", out.len(), s.genus)));
    }
    let mut special: Vec<PointOnCurve<T>> =
        s.branch_points.iter().map(|e| PointOnCurve::affine(*e, czero())).collect();
    special.extend((0..model.infinity_count()?).map(PointOnCurve::Infinity));
    for w in &out {
        for pt in &special {
            match w.order_at(model, pt)? {
                Some(o) if o < 0 => {
                    return Err(NumError::Basis(format!("{w:?} has a pole of order {} at {pt}", -o)));
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Order of a polynomial at a point; re-exported for callers that only need
/// the valuation.
pub fn order_of_poly<T: Real>(model: &CurveModel<T>, a: &Poly2<T>, pt: &PointOnCurve<T>) -> NumResult<i64> {
    poly_order(a, &model.local_chart(pt, 32)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;
    use crate::scalar::cl;

    fn genus2() -> CurveModel<f64> {
        CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap()
    }

    #[test]
    fn bases_have_expected_shape() {
        let b = holomorphic_basis(&genus2()).unwrap();
        assert_eq!(b.len(), 2);
        assert!(matches!(b[1], DifferentialForm::Monomial { a: 1, b: 1, .. }));
        assert_eq!(holomorphic_basis(&CurveModel::<f64>::fermat(3).unwrap()).unwrap().len(), 1);
        assert_eq!(holomorphic_basis(&CurveModel::<f64>::fermat(4).unwrap()).unwrap().len(), 3);
        let conic = CurveModel::hyperelliptic(parse_poly::<f64>("x^2 - 3").unwrap().x_part(), None).unwrap();
        assert!(holomorphic_basis(&conic).unwrap().is_empty());
    }

    #[test]
    fn residues_of_dlog_and_holomorphic_forms() {
        let m = genus2();
        let f = RationalFunction::new(parse_poly("x - 1").unwrap(), parse_poly("x - zeta(5,1)").unwrap()).unwrap();
        let w = DifferentialForm::Dlog(f);
        let q = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let r = PointOnCurve::affine(crate::curve::root_of_unity(5, 1), cl(0.0, 0.0));
        assert!((w.residue(&m, &q).unwrap() - cl(2.0, 0.0)).norm() < 1e-8);
        assert!((w.residue(&m, &r).unwrap() + cl(2.0, 0.0)).norm() < 1e-8);
        assert!(w.residue(&m, &PointOnCurve::Infinity(0)).unwrap().norm() < 1e-8);
        for z in holomorphic_basis(&m).unwrap() {
            for e in m.branch_points().unwrap() {
                assert!(z.residue(&m, &PointOnCurve::affine(*e, cl(0.0, 0.0))).unwrap().norm() < 1e-8);
            }
        }
        let y = m.y_values(cl(0.0, 0.0)).unwrap()[0];
        let p = PointOnCurve::affine(cl(0.0, 0.0), y);
        assert!(w.residue(&m, &p).unwrap().norm() < 1e-8);
    }
}
