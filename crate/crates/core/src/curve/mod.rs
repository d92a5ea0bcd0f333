//! Curve models, marked points, rational functions and differential forms.
//!
//! Every supported model is a superelliptic curve `y^n = p(x)` with `p`
//! squarefree: hyperelliptic curves have `n = 2` and the Fermat curve
//! `x^N + y^N = 1` is `y^N = 1 - x^N`. A general plane equation is accepted
//! and recognized when it has this shape; otherwise it is kept for point and
//! form evaluation only.

pub mod divisor;
pub mod expr;
pub mod forms;
pub mod function;
pub mod poly;
pub mod series;

use num_integer::Integer;

use crate::error::{NumError, NumResult};
use crate::scalar::{c, cone, czero, Field, GaussianRational, Real, C};
use poly::{Poly, Poly2};
use series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Hyperelliptic,
    Superelliptic,
    Fermat,
    Plane,
}

/// The superelliptic data `y^n = p(x)`.
#[derive(Clone, Debug)]
pub struct Superelliptic<T: Real> {
    pub n: usize,
    pub p: Poly<T>,
    pub branch_points: Vec<C<T>>,
    pub genus: usize,
}

#[derive(Clone, Debug)]
pub struct CurveModel<T: Real> {
    pub kind: CurveKind,
    pub equation: Poly2<T>,
    sup: Option<Superelliptic<T>>,
}

/// A point of the smooth projective model. Points at infinity are indexed
/// `0..gcd(n, deg p)`; see [`CurveModel::local_chart`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointOnCurve<T: Real> {
    Affine { x: C<T>, y: C<T> },
    Infinity(usize),
}

impl<T: Real> PointOnCurve<T> {
    pub fn affine(x: C<T>, y: C<T>) -> Self {
        PointOnCurve::Affine { x, y }
    }

    pub fn xy(&self) -> Option<(C<T>, C<T>)> {
        match *self {
            PointOnCurve::Affine { x, y } => Some((x, y)),
            PointOnCurve::Infinity(_) => None,
        }
    }

    pub fn distance(&self, o: &Self) -> T {
        match (self, o) {
            (PointOnCurve::Affine { x, y }, PointOnCurve::Affine { x: u, y: v }) => (*x - *u).norm().max((*y - *v).norm()),
            (PointOnCurve::Infinity(a), PointOnCurve::Infinity(b)) if a == b => T::zero(),
            _ => T::infinity(),
        }
    }
}

impl<T: Real> std::fmt::Display for PointOnCurve<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointOnCurve::Affine { x, y } => write!(f, "({:.6}{:+.6}i, {:.6}{:+.6}i)", x.re, x.im, y.re, y.im),
            PointOnCurve::Infinity(k) => write!(f, "infinity[{k}]"),
        }
    }
}

/// Local expansion `x(t), y(t)` of the curve near a point, together with
/// the ramification index of `x` there (`None` at infinity).
#[derive(Clone, Debug)]
pub struct LocalChart<T: Real> {
    pub x: Series<T>,
    pub y: Series<T>,
    pub ramification: usize,
}

/// Degree of `gcd(a, b)` for exact polynomials (ascending coefficients).
pub fn exact_gcd_degree<F: Field>(a: &[F], b: &[F]) -> usize {
    fn trim<F: Field>(mut v: Vec<F>) -> Vec<F> {
        while v.last().is_some_and(|z| z.is_zero()) {
            v.pop();
        }
        v
    }
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        while a.len() >= b.len() {
            let k = a.len() - b.len();
            let q = a.last().unwrap().clone() / b.last().unwrap().clone();
            for (i, bi) in b.iter().enumerate() {
                a[i + k] = a[i + k].clone() - q.clone() * bi.clone();
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn derivative_exact(p: &[GaussianRational]) -> Vec<GaussianRational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, z)| z.clone() * GaussianRational::from(crate::scalar::Rational::from_integer((i as i64).into())))
        .collect()
}

impl<T: Real> CurveModel<T> {
    /// `y^n = p(x)`. `exact` carries the exact coefficients when known and
    /// is used for the squarefree test.
    pub fn superelliptic(kind: CurveKind, n: usize, p: Poly<T>, exact: Option<&[GaussianRational]>) -> NumResult<Self> {
        let d = p.degree();
        if n < 2 || d < 1 {
            return Err(NumError::Config(format!("need n >= 2 and deg p >= 1 (got n = {n}, deg p = {d})")));
        }
        if let Some(e) = exact {
            if exact_gcd_degree(e, &derivative_exact(e)) > 0 {
                return Err(NumError::Config("p(x) is not squarefree".into()));
            }
        }
        let branch_points = p.roots();
        let scale = branch_points.iter().fold(T::one(), |m, z| m.max(z.norm()));
        for (i, a) in branch_points.iter().enumerate() {
            for b in &branch_points[i + 1..] {
                if (*a - *b).norm() < T::lit(1e-7) * scale {
                    return Err(NumError::Config("p(x) has (numerically) repeated roots".into()));
                }
            }
        }
        let delta = n.gcd(&d);
        let genus = ((n - 1) * (d - 1) + 1 - delta) / 2;
        let mut equation = Poly2::y().pow(n as u32);
        equation = equation.add(&Poly2::from_x_poly(&p).neg());
        Ok(CurveModel { kind, equation, sup: Some(Superelliptic { n, p, branch_points, genus }) })
    }

    pub fn hyperelliptic(p: Poly<T>, exact: Option<&[GaussianRational]>) -> NumResult<Self> {
        Self::superelliptic(CurveKind::Hyperelliptic, 2, p, exact)
    }

    /// `x^N + y^N = 1`.
    pub fn fermat(n: usize) -> NumResult<Self> {
        if n < 3 {
            return Err(NumError::Config(format!("Fermat degree must be at least 3 (got {n})")));
        }
        let mut coeffs = vec![czero(); n + 1];
        coeffs[0] = cone();
        coeffs[n] = -cone::<T>();
        Self::superelliptic(CurveKind::Fermat, n, Poly::new(coeffs), None)
    }

    /// A plane curve `F(x, y) = 0`. Recognized as superelliptic when `F` is
    /// `a y^n + b(x)`.
    pub fn plane(f: Poly2<T>) -> NumResult<Self> {
        if f.is_zero() {
            return Err(NumError::Config("zero equation".into()));
        }
        let n = f.deg_y();
        let ycoef = f.y_coefficients();
        let pure = n >= 2 && ycoef[1..n].iter().all(|q| q.is_zero()) && ycoef[n].degree() == 0;
        if pure {
            let a = ycoef[n].coeffs[0];
            let p = ycoef[0].scale(-cone::<T>() / a);
            let mut m = Self::superelliptic(CurveKind::Plane, n, p, None)?;
            m.equation = f;
            return Ok(m);
        }
        Ok(CurveModel { kind: CurveKind::Plane, equation: f, sup: None })
    }

    pub fn sup(&self) -> NumResult<&Superelliptic<T>> {
        self.sup.as_ref().ok_or_else(|| {
            NumError::Unsupported("this plane curve is not of the form y^n = p(x); only evaluation is available".into())
        })
    }

    pub fn is_superelliptic(&self) -> bool {
        self.sup.is_some()
    }

    pub fn genus(&self) -> NumResult<usize> {
        Ok(self.sup()?.genus)
    }

    pub fn n(&self) -> NumResult<usize> {
        Ok(self.sup()?.n)
    }

    pub fn branch_points(&self) -> NumResult<&[C<T>]> {
        Ok(&self.sup()?.branch_points)
    }

    /// Number of points at infinity.
    pub fn infinity_count(&self) -> NumResult<usize> {
        let s = self.sup()?;
        Ok(s.n.gcd(&s.p.degree()))
    }

    /// `|F(x, y)|` relative to the size of the monomials.
    pub fn residual(&self, x: C<T>, y: C<T>) -> T {
        let mut scale = T::zero();
        for (i, row) in self.equation.coeffs.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                scale = scale + a.norm() * x.norm().powi(i as i32) * y.norm().powi(j as i32);
            }
        }
        self.equation.eval(x, y).norm() / scale.max(T::min_positive_value())
    }

    pub fn on_curve(&self, pt: &PointOnCurve<T>, tol: T) -> bool {
        match pt {
            PointOnCurve::Affine { x, y } => self.residual(*x, *y) <= tol,
            PointOnCurve::Infinity(k) => self.infinity_count().map(|m| *k < m).unwrap_or(false),
        }
    }

    /// All `n` values of `y` over `x`, starting from the principal root and
    /// rotating by `exp(2 pi i / n)`.
    pub fn y_values(&self, x: C<T>) -> NumResult<Vec<C<T>>> {
        let s = self.sup()?;
        let y0 = s.p.eval(x).powf(T::one() / T::from_usize(s.n).unwrap());
        Ok((0..s.n).map(|l| y0 * root_of_unity::<T>(s.n, l as i64)).collect())
    }

    /// Index of the branch point within `tol` of `x`.
    pub fn branch_index(&self, x: C<T>, tol: T) -> Option<usize> {
        let s = self.sup.as_ref()?;
        s.branch_points.iter().position(|e| (*e - x).norm() <= tol)
    }

    /// Minimum distance between distinct branch points (1 if fewer than two).
    pub fn min_branch_separation(&self) -> NumResult<T> {
        let b = self.branch_points()?;
        let mut m = T::infinity();
        for (i, a) in b.iter().enumerate() {
            for c in &b[i + 1..] {
                m = m.min((*a - *c).norm());
            }
        }
        Ok(if m.is_finite() { m } else { T::one() })
    }

    /// Snaps an affine point to the exact branch point if it is within
    /// `tol`, otherwise returns the point unchanged.
    pub fn snap(&self, pt: PointOnCurve<T>, tol: T) -> PointOnCurve<T> {
        if let PointOnCurve::Affine { x, y } = pt {
            if let Some(i) = self.branch_index(x, tol) {
                if y.norm() <= tol.sqrt() {
                    return PointOnCurve::affine(self.sup.as_ref().unwrap().branch_points[i], czero());
                }
            }
        }
        pt
    }

    /// Local expansion to `len` terms at a point of the superelliptic model.
    ///
    /// * ordinary point: `x = x0 + l t`, `y = y0 (p(x)/p(x0))^(1/n)`;
    /// * branch point `e`: `x = e + (l t)^n`, `y = (l t) u`, `u^n = p(e + s)/s`;
    /// * infinity `k`: `x = (l t)^(-n/g)`, `y = (l t)^(-d/g) v`,
    ///   `v^n = s^d p(1/s)` at `s = (l t)^(n/g)`, `g = gcd(n, d)`, with
    ///   `v(0) = lead^(1/n) exp(2 pi i k / n)`.
    ///
    /// The scale `l` keeps the coefficients of moderate size.
    pub fn local_chart(&self, pt: &PointOnCurve<T>, len: usize) -> NumResult<LocalChart<T>> {
        let s = self.sup()?;
        let n = s.n;
        let nf = T::from_usize(n).unwrap();
        let inv_n = T::one() / nf;
        let d = s.p.degree();
        let sep = self.min_branch_separation()?;
        match *pt {
            PointOnCurve::Affine { x: x0, y: y0 } => {
                if let Some(bi) = self.branch_index(x0, T::lit(1e-9) * sep) {
                    let e = s.branch_points[bi];
                    let lam = (T::lit(0.5) * sep).powf(inv_n);
                    // q(s) = p(e + s) / s as a power series in s.
                    let shifted = shift_poly(&s.p, e);
                    let q: Vec<C<T>> = shifted.coeffs[1..].to_vec();
                    let q = scale_series(&q, lam.powi(n as i32), len);
                    let qs = Series::new(0, q).compose_power(n, len);
                    let lead = qs.c[0].powf(inv_n);
                    let u = qs.power_with_lead(inv_n, lead);
                    let mut xs = Series::constant(e, len);
                    xs.c[n.min(len - 1)] += c(lam.powi(n as i32), T::zero());
                    let y = Series::new(1, u.c.iter().map(|z| *z * lam).collect());
                    Ok(LocalChart { x: xs, y, ramification: n })
                } else {
                    let dist = s.branch_points.iter().fold(T::infinity(), |m, e| m.min((*e - x0).norm()));
                    let lam = (T::lit(0.5) * dist).min(T::one());
                    let p0 = s.p.eval(x0);
                    let shifted = shift_poly(&s.p, x0);
                    let ratio: Vec<C<T>> = shifted.coeffs.iter().map(|z| *z / p0).collect();
                    let ratio = Series::new(0, scale_series(&ratio, lam, len));
                    let y = ratio.power_with_lead(inv_n, cone()).scale(y0);
                    let mut xs = Series::constant(x0, len);
                    if len > 1 {
                        xs.c[1] = c(lam, T::zero());
                    }
                    Ok(LocalChart { x: xs, y, ramification: 1 })
                }
            }
            PointOnCurve::Infinity(k) => {
                let g = n.gcd(&d);
                if k >= g {
                    return Err(NumError::Precondition(format!("infinity index {k} out of range (have {g})")));
                }
                let m1 = n / g;
                let rmax = s.branch_points.iter().fold(T::zero(), |m, e| m.max(e.norm()));
                let lam = (T::lit(0.5) / rmax.max(T::lit(1e-3))).powf(T::one() / T::from_usize(m1).unwrap()).min(T::one());
                let rev: Vec<C<T>> = s.p.coeffs.iter().rev().cloned().collect();
                let vt = Series::new(0, scale_series(&rev, lam.powi(m1 as i32), len)).compose_power(m1, len);
                let lead = vt.c[0].powf(inv_n) * root_of_unity::<T>(n, k as i64);
                let v = vt.power_with_lead(inv_n, lead);
                let ex = -((d / g) as i64);
                let yscale = lam.powi(ex as i32);
                let y = Series::new(ex, v.c.iter().map(|z| *z * yscale).collect());
                let mut xc = vec![czero(); len];
                xc[0] = c(lam.powi(-(m1 as i32)), T::zero());
                let x = Series::new(-(m1 as i64), xc);
                Ok(LocalChart { x, y, ramification: 0 })
            }
        }
    }

    /// The point at infinity reached by a branch `y ~ c x^(d/n)`, identified
    /// from a sample `(x, y)` with `|x|` large.
    pub fn infinity_index_of(&self, x: C<T>, y: C<T>) -> NumResult<usize> {
        let s = self.sup()?;
        let g = self.infinity_count()?;
        let len = 6;
        let mut best = (T::infinity(), 0);
        for k in 0..g {
            let ch = self.local_chart(&PointOnCurve::Infinity(k), len)?;
            // Solve x(t) = x for t from the leading term, then compare y.
            let m1 = (s.n / g) as i32;
            let x0 = ch.x.c[0];
            for j in 0..m1 {
                let t = (x0 / x).powf(T::one() / T::from_i32(m1).unwrap()) * root_of_unity::<T>(m1 as usize, j as i64);
                let err = (ch.y.eval(t) - y).norm();
                if err < best.0 {
                    best = (err, k);
                }
            }
        }
        Ok(best.1)
    }
}

pub fn root_of_unity<T: Real>(n: usize, k: i64) -> C<T> {
    let th = T::TAU() * T::from_i64(k).unwrap() / T::from_usize(n).unwrap();
    c(th.cos(), th.sin())
}

/// `p(x + a)` as a polynomial in `x`.
pub fn shift_poly<T: Real>(p: &Poly<T>, a: C<T>) -> Poly<T> {
    // Horner with polynomials.
    let mut acc = Poly::new(vec![]);
    let lin = Poly::new(vec![a, cone()]);
    for z in p.coeffs.iter().rev() {
        acc = acc.mul(&lin).add(&Poly::constant(*z));
    }
    acc
}

/// Coefficients `c_k lam^k`, padded or truncated to `len`.
fn scale_series<T: Real>(coeffs: &[C<T>], lam: T, len: usize) -> Vec<C<T>> {
    let mut out = vec![czero(); len];
    let mut w = T::one();
    for (k, z) in coeffs.iter().enumerate() {
        if k >= len {
            break;
        }
        out[k] = *z * w;
        w = w * lam;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;
    use num_traits::Zero;

    fn genus2() -> CurveModel<f64> {
        CurveModel::hyperelliptic(expr::parse_poly::<f64>("x^5 - 1").unwrap().x_part(), None).unwrap()
    }

    #[test]
    fn genus_of_models() {
        assert_eq!(genus2().genus().unwrap(), 2);
        assert_eq!(CurveModel::<f64>::fermat(3).unwrap().genus().unwrap(), 1);
        assert_eq!(CurveModel::<f64>::fermat(4).unwrap().genus().unwrap(), 3);
        assert_eq!(CurveModel::<f64>::fermat(5).unwrap().genus().unwrap(), 6);
        let sextic = expr::parse_poly::<f64>("x^6 - 2x + 3").unwrap().x_part();
        assert_eq!(CurveModel::hyperelliptic(sextic, None).unwrap().genus().unwrap(), 2);
        let cubic = expr::parse_poly::<f64>("x^3 - x").unwrap().x_part();
        let m = CurveModel::hyperelliptic(cubic, None).unwrap();
        assert_eq!(m.genus().unwrap(), 1);
        assert_eq!(m.infinity_count().unwrap(), 1);
    }

    #[test]
    fn squarefree_rejected_exactly() {
        let e = expr::parse("(x-1)^2 (x+2)").unwrap();
        let exact = e.exact().unwrap();
        let coeffs: Vec<GaussianRational> =
            (0..=3).map(|i| exact.get(&(i, 0)).cloned().unwrap_or_else(GaussianRational::zero)).collect();
        let p = e.to_poly::<f64>().unwrap().x_part();
        assert!(CurveModel::hyperelliptic(p, Some(&coeffs)).is_err());
    }

    #[test]
    fn charts_satisfy_equation() {
        let m = genus2();
        let ys = m.y_values(cl(0.3, 0.2)).unwrap();
        let pts = [
            PointOnCurve::affine(cl(0.3, 0.2), ys[1]),
            PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0)),
            PointOnCurve::Infinity(0),
        ];
        for pt in pts {
            let ch = m.local_chart(&pt, 16).unwrap();
            let t = cl(0.05, 0.02);
            let (x, y) = (ch.x.eval(t), ch.y.eval(t));
            assert!(m.residual(x, y) < 1e-12, "{pt}: {}", m.residual(x, y));
        }
        let f = CurveModel::<f64>::fermat(3).unwrap();
        assert_eq!(f.infinity_count().unwrap(), 3);
        for k in 0..3 {
            let ch = f.local_chart(&PointOnCurve::Infinity(k), 16).unwrap();
            let t = cl(0.05, 0.01);
            assert!(f.residual(ch.x.eval(t), ch.y.eval(t)) < 1e-12);
            assert_eq!(f.infinity_index_of(ch.x.eval(t), ch.y.eval(t)).unwrap(), k);
        }
    }
}
