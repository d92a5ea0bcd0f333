//! Chen iterated integrals of length at most three.
//!
//! Convention: `int_a w1 w2 = int_{0 <= t1 <= t2 <= 1} f1(t1) f2(t2)`, where
//! `fi` is the pullback coefficient of `wi`.

pub mod check;

use crate::curve::forms::DifferentialForm;
use crate::error::NumResult;
use crate::path::CurvePath;
use crate::quadrature::{adaptive_panels, GaussLegendre, QuadOptions};
use crate::scalar::{czero, Real, C};

/// Iterated integrals of all words of length `<= depth` in `k` forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature<T: Real> {
    pub k: usize,
    pub depth: usize,
    pub l1: Vec<C<T>>,
    /// Index `a * k + b`.
    pub l2: Vec<C<T>>,
    /// Index `(a * k + b) * k + c`; empty when `depth < 3`.
    pub l3: Vec<C<T>>,
    pub error_estimate: T,
}

impl<T: Real> Signature<T> {
    pub fn identity(k: usize, depth: usize) -> Self {
        Signature {
            k,
            depth,
            l1: vec![czero(); k],
            l2: if depth >= 2 { vec![czero(); k * k] } else { Vec::new() },
            l3: if depth >= 3 { vec![czero(); k * k * k] } else { Vec::new() },
            error_estimate: T::zero(),
        }
    }

    pub fn one(&self, a: usize) -> C<T> {
        self.l1[a]
    }

    pub fn two(&self, a: usize, b: usize) -> C<T> {
        self.l2[a * self.k + b]
    }

    pub fn three(&self, a: usize, b: usize, c: usize) -> C<T> {
        self.l3[(a * self.k + b) * self.k + c]
    }

    /// Signature of the path `self` followed by `other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        let k = self.k;
        let depth = self.depth.min(other.depth);
        let mut out = Self::identity(k, depth);
        for a in 0..k {
            out.l1[a] = self.l1[a] + other.l1[a];
        }
        if depth >= 2 {
            for a in 0..k {
                for b in 0..k {
                    out.l2[a * k + b] = self.two(a, b) + other.two(a, b) + self.l1[a] * other.l1[b];
                }
            }
        }
        if depth >= 3 {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        out.l3[(a * k + b) * k + c] = self.three(a, b, c)
                            + other.three(a, b, c)
                            + self.two(a, b) * other.l1[c]
                            + self.l1[a] * other.two(b, c);
                    }
                }
            }
        }
        out.error_estimate = self.error_estimate + other.error_estimate;
        out
    }

    /// Signature of the reversed path.
    pub fn inverse(&self) -> Self {
        let k = self.k;
        let mut out = Self::identity(k, self.depth);
        for a in 0..k {
            out.l1[a] = -self.l1[a];
        }
        if self.depth >= 2 {
            for a in 0..k {
                for b in 0..k {
                    out.l2[a * k + b] = self.two(b, a);
                }
            }
        }
        if self.depth >= 3 {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        out.l3[(a * k + b) * k + c] = -self.three(c, b, a);
                    }
                }
            }
        }
        out.error_estimate = self.error_estimate;
        out
    }

    /// `self^e` for any integer `e`.
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.k, self.depth);
        acc.error_estimate = T::zero();
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// Concatenation of a word of signatures.
    pub fn product(parts: &[Self]) -> Option<Self> {
        let mut it = parts.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, s| acc.compose(s)))
    }

    pub fn restrict(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut out = Self::identity(k, self.depth);
        for (i, &a) in idx.iter().enumerate() {
            out.l1[i] = self.l1[a];
            if self.depth >= 2 {
                for (j, &b) in idx.iter().enumerate() {
                    out.l2[i * k + j] = self.two(a, b);
                    if self.depth >= 3 {
                        for (l, &c) in idx.iter().enumerate() {
                            out.l3[(i * k + j) * k + l] = self.three(a, b, c);
                        }
                    }
                }
            }
        }
        out.error_estimate = self.error_estimate;
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChenOptions<T> {
    pub quad: QuadOptions<T>,
}

impl<T: Real> Default for ChenOptions<T> {
    fn default() -> Self {
        ChenOptions { quad: QuadOptions::with_tol(T::lit(1e-12)) }
    }
}

/// Iterated integrals over one panel from the node values `f[node][form]`.
fn panel_signature<T: Real>(rule: &GaussLegendre<T>, h: T, f: &[Vec<C<T>>], k: usize, depth: usize) -> Signature<T> {
    let m = rule.len();
    let mut s = Signature::identity(k, depth);
    let col = |a: usize| -> Vec<C<T>> { f.iter().map(|v| v[a]).collect() };
    let cols: Vec<Vec<C<T>>> = (0..k).map(col).collect();
    let prims: Vec<Vec<C<T>>> = cols.iter().map(|c| rule.primitive(c).into_iter().map(|z| z * h).collect()).collect();
    for a in 0..k {
        s.l1[a] = rule.sum(&cols[a]) * h;
    }
    if depth >= 2 {
        for a in 0..k {
            for b in 0..k {
                let prod: Vec<C<T>> = (0..m).map(|i| prims[a][i] * cols[b][i]).collect();
                s.l2[a * k + b] = rule.sum(&prod) * h;
                if depth >= 3 {
                    let q: Vec<C<T>> = rule.primitive(&prod).into_iter().map(|z| z * h).collect();
                    for c in 0..k {
                        let r: Vec<C<T>> = (0..m).map(|i| q[i] * cols[c][i]).collect();
                        s.l3[(a * k + b) * k + c] = rule.sum(&r) * h;
                    }
                }
            }
        }
    }
    s
}

/// Signature of `forms` along every piece of `path`, composed in order.
pub fn signature<T: Real, P: CurvePath<T> + ?Sized>(
    path: &P,
    forms: &[DifferentialForm<T>],
    depth: usize,
    opts: &ChenOptions<T>,
) -> NumResult<Signature<T>> {
    let k = forms.len();
    let rule = GaussLegendre::new(opts.quad.order);
    let mut total = Signature::identity(k, depth);
    for piece in 0..path.piece_count() {
        let panels = adaptive_panels(
            |t| {
                let p = path.point(piece, t)?;
                forms.iter().map(|w| w.pullback(&p)).collect()
            },
            T::zero(),
            T::one(),
            &rule,
            &opts.quad,
            "iterated integral",
        )?;
        for p in &panels.panels {
            let s = panel_signature(&rule, p.half_width(), &p.values, k, depth);
            total = total.compose(&s);
        }
        total.error_estimate += panels.error_estimate;
    }
    Ok(total)
}

/// Plain line integrals.
pub fn line_integrals<T: Real, P: CurvePath<T> + ?Sized>(
    path: &P,
    forms: &[DifferentialForm<T>],
    opts: &ChenOptions<T>,
) -> NumResult<Vec<C<T>>> {
    Ok(signature(path, forms, 1, opts)?.l1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;
    use crate::curve::function::RationalFunction;
    use crate::curve::CurveModel;
    use crate::path::{Arc, SurfacePath};
    use crate::scalar::cl;

    #[test]
    fn straight_line_polynomials() {
        // On x(t) = t (any curve; forms only use x): int dx dx = 1/2,
        // int x dx . dx = int_{t1<t2} t1 = 1/6.
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let y0 = m.y_values(cl(0.0, 0.0)).unwrap()[0];
        let p = SurfacePath::continue_arcs(&m, &[Arc::Segment { a: cl(0.0, 0.0), b: cl(0.5, 0.0) }], y0, 1e-3).unwrap();
        let forms = vec![DifferentialForm::dx(), DifferentialForm::monomial(1, 0)];
        let s = signature(&p, &forms, 3, &ChenOptions::default()).unwrap();
        assert!((s.two(0, 0) - cl(0.125, 0.0)).norm() < 1e-14);
        assert!((s.two(1, 0) - cl(0.5f64.powi(3) / 6.0, 0.0)).norm() < 1e-14);
        assert!((s.three(0, 0, 0) - cl(0.5f64.powi(3) / 6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn composition_inverse_and_identities() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let x0 = cl(0.1, 0.2);
        let y0 = m.y_values(x0).unwrap()[0];
        let arcs = [Arc::Segment { a: x0, b: cl(0.7, 0.4) }, Arc::circle_from(cl(1.0, 0.0), cl(0.7, 0.4), -2.0)];
        let p = SurfacePath::continue_arcs(&m, &arcs, y0, 1e-3).unwrap();
        let f = RationalFunction::new(parse_poly("x + y").unwrap(), parse_poly("x - 3").unwrap()).unwrap();
        let forms = vec![
            DifferentialForm::monomial(0, 1),
            DifferentialForm::monomial(1, 1),
            DifferentialForm::Exact(f.clone()),
            DifferentialForm::Times(f.clone(), Box::new(DifferentialForm::monomial(0, 1))),
            DifferentialForm::monomial(1, 1).conj(),
        ];
        let opts = ChenOptions::default();
        let s = signature(&p, &forms, 3, &opts).unwrap();
        // Route through composition of the two segments.
        let a = SurfacePath { segments: vec![p.segments[0].clone()] };
        let b = SurfacePath { segments: vec![p.segments[1].clone()] };
        let sa = signature(&a, &forms, 3, &opts).unwrap();
        let sb = signature(&b, &forms, 3, &opts).unwrap();
        let sab = sa.compose(&sb);
        for i in 0..s.l3.len() {
            assert!((sab.l3[i] - s.l3[i]).norm() < 1e-11 * (1.0 + s.l3[i].norm()));
        }
        // Shuffle: w1 w2 + w2 w1 = w1 . w2.
        for x in 0..5 {
            for y in 0..5 {
                let lhs = s.two(x, y) + s.two(y, x);
                assert!((lhs - s.one(x) * s.one(y)).norm() < 1e-11 * (1.0 + lhs.norm()));
            }
        }
        // int df w = int f w - f(start) int w.
        let (xs, ys) = p.start().unwrap();
        let (xe, ye) = p.end().unwrap();
        let f0 = f.eval(xs, ys).unwrap();
        let f1 = f.eval(xe, ye).unwrap();
        assert!((s.two(2, 0) - (s.one(3) - f0 * s.one(0))).norm() < 1e-11);
        assert!((s.two(0, 2) - (f1 * s.one(0) - s.one(3))).norm() < 1e-11);
        // Reversed path.
        let r = p.reversed(&m).unwrap();
        let sr = signature(&r, &forms, 3, &opts).unwrap();
        let inv = s.inverse();
        for i in 0..s.l3.len() {
            assert!((sr.l3[i] - inv.l3[i]).norm() < 1e-11 * (1.0 + inv.l3[i].norm()));
        }
        let id = s.compose(&inv);
        assert!(id.l2.iter().all(|z| z.norm() < 1e-11));
    }
}
