//! Divisor of a rational function on a superelliptic curve.
//!
//! Zeros and poles of `A(x, y)` lie over the roots of the norm
//! `Norm(A)(x) = prod_l A(x, w^l y(x))`, a polynomial in `x`. Orders are read
//! off local expansions at each point over each root and at infinity. The
//! sum of the orders over a root must equal its multiplicity as a root of
//! the norm, and the orders at infinity must sum to `-deg Norm(A)`; both are
//! checked as an independent consistency oracle.

use super::function::{poly_order, RationalFunction};
use super::poly::{clustered_roots, Poly, Poly2};
use super::{root_of_unity, CurveModel, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{c, czero, Real, C};

const SERIES_LEN: usize = 40;

#[derive(Clone, Debug)]
pub struct DivisorReport<T: Real> {
    pub n: usize,
    pub zero: PointOnCurve<T>,
    pub pole: PointOnCurve<T>,
    /// Every point where the order of `f` was computed, with that order.
    pub examined: Vec<(PointOnCurve<T>, i64)>,
}

/// `A` with `y^n` replaced by `p(x)` until `deg_y A < n`.
pub fn reduce_mod_curve<T: Real>(model: &CurveModel<T>, a: &Poly2<T>) -> NumResult<Poly2<T>> {
    let s = model.sup()?;
    let n = s.n;
    let mut rows = a.y_coefficients();
    while rows.len() > n {
        let top = rows.pop().unwrap();
        let j = rows.len();
        let moved = top.mul(&s.p);
        rows[j - n] = rows[j - n].add(&moved);
    }
    let mut out = Poly2::zero();
    for (j, q) in rows.iter().enumerate() {
        out = out.add(&Poly2::from_x_poly(q).mul(&Poly2::y().pow(j as u32)));
    }
    Ok(out)
}

/// `Norm(A)(x)` by sampling on a circle and discrete Fourier inversion.
pub fn norm_polynomial<T: Real>(model: &CurveModel<T>, a: &Poly2<T>) -> NumResult<Poly<T>> {
    let s = model.sup()?;
    let (n, d) = (s.n, s.p.degree());
    let a = reduce_mod_curve(model, a)?;
    let mut deg = 0;
    for (i, row) in a.coeffs.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if z.norm() > T::zero() {
                deg = deg.max(n * i + j * d);
            }
        }
    }
    let rho = s.branch_points.iter().fold(T::one(), |m, e| m.max(e.norm()));
    let m = deg + 1;
    let values: Vec<C<T>> = (0..m)
        .map(|k| {
            let x = root_of_unity::<T>(m, k as i64) * rho * root_of_unity::<T>(4 * m, 1);
            let ys = model.y_values(x)?;
            Ok(ys.iter().fold(c(T::one(), T::zero()), |acc, y| acc * a.eval(x, *y)))
        })
        .collect::<NumResult<_>>()?;
    let shift = root_of_unity::<T>(4 * m, 1) * rho;
    let mf = T::from_usize(m).unwrap();
    let mut coeffs: Vec<C<T>> = (0..m)
        .map(|k| {
            let mut acc = czero();
            for (j, v) in values.iter().enumerate() {
                acc += *v * root_of_unity::<T>(m, -((j * k % m) as i64));
            }
            acc / mf / shift.powu(k as u32)
        })
        .collect();
    let scale = coeffs.iter().enumerate().fold(T::zero(), |mx, (k, z)| mx.max(z.norm() * rho.powi(k as i32)));
    for (k, z) in coeffs.iter_mut().enumerate() {
        if z.norm() * rho.powi(k as i32) <= T::lit(1e-10) * scale {
            *z = czero();
        }
    }
    Ok(Poly::new(coeffs))
}

/// Points of the curve above `x`.
fn points_above<T: Real>(model: &CurveModel<T>, x: C<T>) -> NumResult<Vec<PointOnCurve<T>>> {
    let sep = model.min_branch_separation()?;
    if let Some(i) = model.branch_index(x, T::lit(1e-6) * sep) {
        return Ok(vec![PointOnCurve::affine(model.branch_points()?[i], czero())]);
    }
    Ok(model.y_values(x)?.into_iter().map(|y| PointOnCurve::affine(x, y)).collect())
}

fn same_point<T: Real>(a: &PointOnCurve<T>, b: &PointOnCurve<T>) -> bool {
    match (a.xy(), b.xy()) {
        (Some((x, y)), Some((u, v))) => {
            let tol = T::lit(1e-6) * (T::one() + x.norm().max(y.norm()));
            (x - u).norm() <= tol && (y - v).norm() <= tol
        }
        _ => a == b,
    }
}

/// Orders of `A` at every point over the roots of its norm; checks the
/// multiplicity oracle.
fn affine_orders<T: Real>(model: &CurveModel<T>, a: &Poly2<T>, label: &str) -> NumResult<(Vec<(PointOnCurve<T>, i64)>, usize)> {
    let norm = norm_polynomial(model, a)?;
    let mut out = Vec::new();
    let sep = model.min_branch_separation()?;
    for (mut r, mult) in clustered_roots(&norm, T::lit(1e-3)) {
        if let Some(i) = model.branch_index(r, T::lit(1e-3) * sep) {
            r = model.branch_points()?[i];
        }
        let mut total = 0;
        for pt in points_above(model, r)? {
            let chart = model.local_chart(&pt, SERIES_LEN)?;
            let o = poly_order(a, &chart)?;
            total += o;
            out.push((pt, o));
        }
        if total != mult as i64 {
            return Err(NumError::Divisor(format!(
                "{label}: orders above x = {r} sum to {total} but the norm has a root of multiplicity {mult}"
            )));
        }
    }
    Ok((out, norm.degree()))
}

/// Confirms `div f = N Q - N R` and returns `N`.
pub fn verify_divisor<T: Real>(
    model: &CurveModel<T>,
    f: &RationalFunction<T>,
    q: &PointOnCurve<T>,
    r: &PointOnCurve<T>,
) -> NumResult<DivisorReport<T>> {
    model.sup().map_err(|_| NumError::Unsupported("divisor verification needs a model of the form y^n = p(x)".into()))?;
    let (zn, dn) = affine_orders(model, &f.numerator, "numerator")?;
    let (zd, dd) = affine_orders(model, &f.denominator, "denominator")?;
    let mut examined: Vec<(PointOnCurve<T>, i64)> = Vec::new();
    let mut add = |pt: PointOnCurve<T>, o: i64| {
        if let Some(e) = examined.iter_mut().find(|(p, _)| same_point(p, &pt)) {
            e.1 += o;
        } else {
            examined.push((pt, o));
        }
    };
    for (pt, o) in zn {
        add(pt, o);
    }
    for (pt, o) in zd {
        add(pt, -o);
    }
    let (mut inf_a, mut inf_b) = (0, 0);
    for k in 0..model.infinity_count()? {
        let pt = PointOnCurve::Infinity(k);
        let chart = model.local_chart(&pt, SERIES_LEN)?;
        let (oa, ob) = (poly_order(&f.numerator, &chart)?, poly_order(&f.denominator, &chart)?);
        inf_a += oa;
        inf_b += ob;
        add(pt, oa - ob);
    }
    if inf_a != -(dn as i64) || inf_b != -(dd as i64) {
        return Err(NumError::Divisor(format!(
            "orders at infinity ({inf_a}, {inf_b}) disagree with the norm degrees ({dn}, {dd})"
        )));
    }
    let support: Vec<(PointOnCurve<T>, i64)> = examined.iter().filter(|(_, o)| *o != 0).cloned().collect();
    if support.is_empty() {
        return Err(NumError::Degenerate("f has no zeros or poles; N is undefined".into()));
    }
    for (pt, o) in &support {
        if !same_point(pt, q) && !same_point(pt, r) {
            return Err(NumError::Divisor(format!("divisor has support outside {{Q, R}}: order {o} at {pt}")));
        }
    }
    let oq = support.iter().find(|(p, _)| same_point(p, q)).map(|x| x.1).unwrap_or(0);
    let or = support.iter().find(|(p, _)| same_point(p, r)).map(|x| x.1).unwrap_or(0);
    if oq <= 0 || oq != -or {
        return Err(NumError::Divisor(format!("unequal orders: {oq} at Q and {or} at R")));
    }
    Ok(DivisorReport { n: oq as usize, zero: *q, pole: *r, examined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;
    use crate::scalar::cl;

    fn rf(a: &str, b: &str) -> RationalFunction<f64> {
        RationalFunction::new(parse_poly(a).unwrap(), parse_poly(b).unwrap()).unwrap()
    }

    #[test]
    fn genus_two_weierstrass_pair() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let q = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let r = PointOnCurve::affine(root_of_unity(5, 1), cl(0.0, 0.0));
        let rep = verify_divisor(&m, &rf("x - 1", "x - zeta(5,1)"), &q, &r).unwrap();
        assert_eq!(rep.n, 2);
        assert!(matches!(verify_divisor(&m, &rf("1", "1"), &q, &r), Err(NumError::Degenerate(_))));
        assert!(matches!(verify_divisor(&m, &rf("x - 1", "x - 2"), &q, &r), Err(NumError::Divisor(_))));
        assert!(matches!(verify_divisor(&m, &rf("y", "x - zeta(5,1)"), &q, &r), Err(NumError::Divisor(_))));
    }

    #[test]
    fn fermat_cubic() {
        let m = CurveModel::<f64>::fermat(3).unwrap();
        let q = PointOnCurve::affine(cl(0.0, 0.0), cl(1.0, 0.0));
        let r = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let rep = verify_divisor(&m, &rf("y - 1", "x - 1"), &q, &r).unwrap();
        assert_eq!(rep.n, 3);
    }

    #[test]
    fn fermat_quartic() {
        let m = CurveModel::<f64>::fermat(4).unwrap();
        let q = PointOnCurve::affine(cl(0.0, 0.0), cl(1.0, 0.0));
        let r = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        assert_eq!(verify_divisor(&m, &rf("y - 1", "x - 1"), &q, &r).unwrap().n, 4);
        // x^4 vanishes at all four points over x = 0.
        let err = verify_divisor(&m, &rf("x^4", "(x - 1)^4"), &q, &r).unwrap_err();
        assert!(matches!(err, NumError::Divisor(_)), "{err}");
    }

    #[test]
    fn norm_polynomial_matches_direct_product() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let a = parse_poly::<f64>("y + x^2 - 1").unwrap();
        // Norm(y + x^2 - 1) = (x^2 - 1)^2 - (x^5 - 1).
        let expect = parse_poly::<f64>("(x^2-1)^2 - x^5 + 1").unwrap().x_part();
        let got = norm_polynomial(&m, &a).unwrap();
        for k in 0..=5 {
            assert!((got.coeffs.get(k).copied().unwrap_or(czero()) - expect.coeffs[k]).norm() < 1e-10);
        }
    }
}
