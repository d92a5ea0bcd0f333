//! The level set `gamma = f^-1([0, inf])`: `N` arcs from `Q` to `R`.
//!
//! Each component is parametrized by `t` in `[0, 1]` with
//! `f^(1/N) = t / (1 - t)`. Near `Q` and `R` the component is an explicit
//! power series (series reversion of the local expansion of `f^(+-1/N)`);
//! in between it is traced by Newton's method on `F(x, y) = 0`,
//! `f(x, y) = w^N` and stored as checkpoints.

use super::surface::CurvePath;
use crate::curve::forms::PathPoint;
use crate::curve::function::{poly_series, RationalFunction, CANCEL_TOL};
use crate::curve::poly::Poly2;
use crate::curve::{root_of_unity, CurveModel, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{cone, czero, Real, C};

#[derive(Clone, Copy, Debug)]
pub struct GammaOptions<T> {
    pub series_len: usize,
    /// Largest `w` (or `1 / w` near `R`) covered by the endpoint series.
    pub max_series_w: T,
    pub newton_tol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for GammaOptions<T> {
    fn default() -> Self {
        GammaOptions { series_len: 40, max_series_w: T::lit(0.8), newton_tol: T::lit(1e-14), max_steps: 200_000 }
    }
}

/// Power series `sum a_m w^m` of one endpoint piece, valid for `w <= radius`.
#[derive(Clone, Debug)]
struct EndSeries<T: Real> {
    x: Vec<C<T>>,
    y: Vec<C<T>>,
    radius: T,
}

fn horner<T: Real>(a: &[C<T>], w: T) -> (C<T>, C<T>) {
    let mut v = czero::<T>();
    let mut d = czero::<T>();
    for z in a.iter().rev() {
        d = d * w + v;
        v = v * w + *z;
    }
    (v, d)
}

impl<T: Real> EndSeries<T> {
    fn eval(&self, w: T) -> (C<T>, C<T>, C<T>, C<T>) {
        let (x, dx) = horner(&self.x, w);
        let (y, dy) = horner(&self.y, w);
        (x, y, dx, dy)
    }

    fn rotated(&self, k: usize, n: usize) -> Self {
        let rot = |a: &[C<T>]| -> Vec<C<T>> {
            a.iter().enumerate().map(|(m, z)| *z * root_of_unity::<T>(n, -((k * m) as i64))).collect()
        };
        EndSeries { x: rot(&self.x), y: rot(&self.y), radius: self.radius }
    }
}

fn mul_trunc<T: Real>(a: &[C<T>], b: &[C<T>], len: usize) -> Vec<C<T>> {
    let mut out = vec![czero::<T>(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.norm() == T::zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += *x * *y;
        }
    }
    out
}

/// `a(b(w))` for `b(0) = 0`.
fn compose<T: Real>(a: &[C<T>], b: &[C<T>], len: usize) -> Vec<C<T>> {
    let mut out = vec![czero::<T>(); len];
    for z in a.iter().rev() {
        out = mul_trunc(&out, b, len);
        out[0] += *z;
    }
    out
}

/// Compositional inverse of `h` with `h(0) = 0`, `h'(0) != 0`.
fn revert<T: Real>(h: &[C<T>], len: usize) -> Vec<C<T>> {
    let c1 = h[1];
    let mut s = vec![czero::<T>(); len];
    s[1] = cone::<T>() / c1;
    let mut hr: Vec<C<T>> = h.to_vec();
    hr.resize(len, czero());
    let mut nonlinear = hr.clone();
    nonlinear[1] = czero();
    for _ in 0..len {
        let corr = compose(&nonlinear, &s, len);
        let mut next = vec![czero::<T>(); len];
        next[1] = cone::<T>() / c1;
        for m in 2..len {
            next[m] = -corr[m] / c1;
        }
        s = next;
    }
    s
}

fn root_radius<T: Real>(a: &[C<T>]) -> T {
    let len = a.len();
    let mut worst = T::zero();
    for (m, z) in a.iter().enumerate().skip(len / 2) {
        if z.norm() > T::zero() {
            worst = worst.max(z.norm().powf(T::one() / T::from_usize(m).unwrap()));
        }
    }
    if worst == T::zero() {
        T::infinity()
    } else {
        T::one() / worst
    }
}

/// The expansion of one endpoint: `x, y` as series in `w = (f^(+-1))^(1/N)`
/// for the branch with tangent index 0.
fn endpoint_series<T: Real>(
    model: &CurveModel<T>,
    f: &RationalFunction<T>,
    pt: &PointOnCurve<T>,
    n_div: usize,
    invert: bool,
    opts: &GammaOptions<T>,
) -> NumResult<EndSeries<T>> {
    let len = opts.series_len;
    let chart = model.local_chart(pt, len)?;
    let (a, am) = poly_series(&f.numerator, &chart);
    let (b, bm) = poly_series(&f.denominator, &chart);
    let tol = T::lit(CANCEL_TOL);
    let va = a.valuation(&am, tol, T::zero()).ok_or_else(|| NumError::Divisor("numerator vanishes on the curve".into()))?;
    let vb = b.valuation(&bm, tol, T::zero()).ok_or_else(|| NumError::Divisor("denominator vanishes on the curve".into()))?;
    let mut a = a.shift_out((va - a.val) as usize);
    let mut b = b.shift_out((vb - b.val) as usize);
    a.val = 0;
    b.val = 0;
    let order = if invert { vb - va } else { va - vb };
    if order != n_div as i64 {
        return Err(NumError::Divisor(format!("f^{} has order {order} at {pt}, expected {n_div}", if invert { -1 } else { 1 })));
    }
    let u = if invert { b.mul(&a.inverse()).scale(cone::<T>() / f.scale) } else { a.mul(&b.inverse()).scale(f.scale) };
    let inv_n = T::one() / T::from_usize(n_div).unwrap();
    let lead = u.c[0].powf(inv_n);
    let root = u.power_with_lead(inv_n, lead);
    let mut h = vec![czero::<T>(); len];
    for (m, z) in root.c.iter().enumerate() {
        if m + 1 < len {
            h[m + 1] = *z;
        }
    }
    let s = revert(&h, len);
    let pad = |v: &[C<T>]| -> Vec<C<T>> {
        let mut out = v.to_vec();
        out.resize(len, czero());
        out
    };
    if chart.x.val != 0 || chart.y.val < 0 {
        return Err(NumError::Unsupported("gamma endpoints at infinity".into()));
    }
    let mut yc = vec![czero::<T>(); chart.y.val as usize];
    yc.extend(chart.y.c.iter().cloned());
    let x = compose(&pad(&chart.x.c), &s, len);
    let y = compose(&pad(&yc), &s, len);
    let radius = root_radius(&x).min(root_radius(&y)).min(root_radius(&s));
    let radius = (radius * T::lit(0.35)).min(opts.max_series_w);
    Ok(EndSeries { x, y, radius })
}

/// The implicit system `F = 0`, `G = 0` with `G = f_num - w^N f_den`
/// (`t <= 1/2`) or `f_den - v^N f_num` (`t > 1/2`).
#[derive(Clone, Debug)]
struct LevelSystem<T: Real> {
    eq: Poly2<T>,
    eq_x: Poly2<T>,
    eq_y: Poly2<T>,
    num: Poly2<T>,
    den: Poly2<T>,
    num_x: Poly2<T>,
    num_y: Poly2<T>,
    den_x: Poly2<T>,
    den_y: Poly2<T>,
    n: usize,
}

impl<T: Real> LevelSystem<T> {
    fn new(model: &CurveModel<T>, f: &RationalFunction<T>, n: usize) -> Self {
        let num = f.numerator.scale(f.scale);
        let den = f.denominator.clone();
        LevelSystem {
            eq: model.equation.clone(),
            eq_x: model.equation.dx(),
            eq_y: model.equation.dy(),
            num_x: num.dx(),
            num_y: num.dy(),
            den_x: den.dx(),
            den_y: den.dy(),
            num,
            den,
            n,
        }
    }

    /// `(G, G_x, G_y, G_t)` at global parameter `t`.
    fn g(&self, x: C<T>, y: C<T>, t: T) -> (C<T>, C<T>, C<T>, C<T>) {
        let half = T::lit(0.5);
        let nn = T::from_usize(self.n).unwrap();
        let (p, px, py, q, qx, qy, w, dw) = if t <= half {
            let w = t / (T::one() - t);
            let dw = T::one() / ((T::one() - t) * (T::one() - t));
            (self.num.eval(x, y), self.num_x.eval(x, y), self.num_y.eval(x, y), self.den.eval(x, y), self.den_x.eval(x, y), self.den_y.eval(x, y), w, dw)
        } else {
            let v = (T::one() - t) / t;
            let dv = -T::one() / (t * t);
            (self.den.eval(x, y), self.den_x.eval(x, y), self.den_y.eval(x, y), self.num.eval(x, y), self.num_x.eval(x, y), self.num_y.eval(x, y), v, dv)
        };
        let wn = w.powi(self.n as i32);
        let g = p - q * wn;
        let gt = -q * (nn * w.powi(self.n as i32 - 1) * dw);
        (g, px - qx * wn, py - qy * wn, gt)
    }

    fn newton(&self, mut x: C<T>, mut y: C<T>, t: T, tol: T, max_iter: usize) -> Option<(C<T>, C<T>, usize)> {
        for it in 0..max_iter {
            let f = self.eq.eval(x, y);
            let (fx, fy) = (self.eq_x.eval(x, y), self.eq_y.eval(x, y));
            let (g, gx, gy, _) = self.g(x, y, t);
            let det = fx * gy - fy * gx;
            if det.norm() == T::zero() {
                return None;
            }
            let dx = (f * gy - fy * g) / det;
            let dy = (fx * g - f * gx) / det;
            x -= dx;
            y -= dy;
            if !(x.re.is_finite() && y.re.is_finite()) {
                return None;
            }
            if dx.norm() + dy.norm() <= tol * (T::one() + x.norm() + y.norm()) {
                return Some((x, y, it + 1));
            }
        }
        None
    }

    fn velocity(&self, x: C<T>, y: C<T>, t: T) -> (C<T>, C<T>) {
        let (fx, fy) = (self.eq_x.eval(x, y), self.eq_y.eval(x, y));
        let (_, gx, gy, gt) = self.g(x, y, t);
        let det = fx * gy - fy * gx;
        // [fx fy; gx gy] (dx, dy) = (0, -gt).
        let dx = (fy * gt) / det;
        let dy = -(fx * gt) / det;
        (dx, dy)
    }
}

/// One traced component `gamma^i`.
#[derive(Clone, Debug)]
pub struct GammaComponent<T: Real> {
    pub index: usize,
    q_piece: EndSeries<T>,
    r_piece: EndSeries<T>,
    /// Global parameters where the endpoint series hand over.
    pub t_q: T,
    pub t_r: T,
    sys: LevelSystem<T>,
    /// `(t, x, y, dx/dt, dy/dt)`.
    checkpoints: Vec<(T, C<T>, C<T>, C<T>, C<T>)>,
    tol: T,
}

fn w_of<T: Real>(t: T) -> (T, T) {
    (t / (T::one() - t), T::one() / ((T::one() - t) * (T::one() - t)))
}

fn v_of<T: Real>(t: T) -> (T, T) {
    ((T::one() - t) / t, -T::one() / (t * t))
}

impl<T: Real> GammaComponent<T> {
    /// Point at global parameter `t`.
    pub fn at(&self, t: T) -> NumResult<PathPoint<T>> {
        if t <= self.t_q {
            let (w, dw) = w_of(t);
            let (x, y, dx, dy) = self.q_piece.eval(w);
            return Ok(PathPoint { x, y, dx: dx * dw, dy: dy * dw });
        }
        if t >= self.t_r {
            let (v, dv) = v_of(t);
            let (x, y, dx, dy) = self.r_piece.eval(v);
            return Ok(PathPoint { x, y, dx: dx * dv, dy: dy * dv });
        }
        let ck = &self.checkpoints;
        let k = match ck.binary_search_by(|p| p.0.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(k) => k.min(ck.len() - 2),
            Err(k) => k.saturating_sub(1).min(ck.len() - 2),
        };
        let (t0, x0, y0, dx0, dy0) = ck[k];
        let (t1, x1, y1, dx1, dy1) = ck[k + 1];
        let h = t1 - t0;
        let s = (t - t0) / h;
        let herm = |p0: C<T>, p1: C<T>, m0: C<T>, m1: C<T>| {
            let s2 = s * s;
            let s3 = s2 * s;
            let two = T::lit(2.0);
            let three = T::lit(3.0);
            p0 * (two * s3 - three * s2 + T::one())
                + m0 * (h * (s3 - two * s2 + s))
                + p1 * (three * s2 - two * s3)
                + m1 * (h * (s3 - s2))
        };
        let (xp, yp) = (herm(x0, x1, dx0, dx1), herm(y0, y1, dy0, dy1));
        let (x, y, _) = self
            .sys
            .newton(xp, yp, t, self.tol, 12)
            .ok_or_else(|| NumError::Tracing(format!("Newton failed on gamma^{} at t = {:?}", self.index, t.to_f64())))?;
        let (dx, dy) = self.sys.velocity(x, y, t);
        Ok(PathPoint { x, y, dx, dy })
    }

    pub fn checkpoint_count(&self) -> usize {
        self.checkpoints.len()
    }

    /// Sampled polyline of the x-projection.
    pub fn sample(&self, m: usize) -> NumResult<Vec<(C<T>, C<T>)>> {
        (0..=m)
            .map(|k| {
                let t = T::from_usize(k).unwrap() / T::from_usize(m).unwrap();
                let t = t.max(T::lit(1e-12)).min(T::one() - T::lit(1e-12));
                self.at(t).map(|p| (p.x, p.y))
            })
            .collect()
    }
}

impl<T: Real> CurvePath<T> for GammaComponent<T> {
    fn piece_count(&self) -> usize {
        3
    }

    fn point(&self, piece: usize, t: T) -> NumResult<PathPoint<T>> {
        let (a, b) = match piece {
            0 => (T::zero(), self.t_q),
            1 => (self.t_q, self.t_r),
            _ => (self.t_r, T::one()),
        };
        let mut p = self.at(a + (b - a) * t)?;
        p.dx = p.dx * (b - a);
        p.dy = p.dy * (b - a);
        Ok(p)
    }
}

/// The union of the components; integrals over `gamma` are sums over them.
#[derive(Clone, Debug)]
pub struct LevelSetGamma<T: Real> {
    pub components: Vec<GammaComponent<T>>,
    pub q: PointOnCurve<T>,
    pub r: PointOnCurve<T>,
}

/// Traces `f^-1([0, inf])` from `Q` to `R` (`div f = N Q - N R`, `f`
/// normalized). Components are ordered by the argument of their initial
/// tangent in the local parameter at `Q`.
pub fn trace_gamma<T: Real>(
    model: &CurveModel<T>,
    f: &RationalFunction<T>,
    q: &PointOnCurve<T>,
    r: &PointOnCurve<T>,
    n_div: usize,
    opts: &GammaOptions<T>,
) -> NumResult<LevelSetGamma<T>> {
    let qs = endpoint_series(model, f, q, n_div, false, opts)?;
    let rs = endpoint_series(model, f, r, n_div, true, opts)?;
    let sys = LevelSystem::new(model, f, n_div);
    let t_q = qs.radius / (T::one() + qs.radius);
    let t_r = T::one() / (T::one() + rs.radius);
    // Tangent index k has initial direction exp(-2 pi i k / N) / h'(0).
    let mut order: Vec<usize> = (0..n_div).collect();
    let lead = qs.x.get(1).copied().unwrap_or(czero());
    let base = if lead.norm() > T::zero() { lead } else { qs.y[1] };
    let arg_of = |k: usize| (base * root_of_unity::<T>(n_div, -(k as i64))).arg();
    order.sort_by(|&a, &b| arg_of(a).partial_cmp(&arg_of(b)).unwrap_or(std::cmp::Ordering::Equal));
    let scale_of = |x: C<T>, y: C<T>| T::one() + x.norm() + y.norm();
    let mut components = Vec::new();
    let mut used_r = vec![false; n_div];
    for (index, &k) in order.iter().enumerate() {
        let qk = qs.rotated(k, n_div);
        let (w, dw) = w_of(t_q);
        let (mut x, mut y, dx, dy) = qk.eval(w);
        let (mut vx, mut vy) = (dx * dw, dy * dw);
        let mut t = t_q;
        let mut checkpoints = vec![(t, x, y, vx, vy)];
        let span = t_r - t_q;
        let mut h = span / T::lit(64.0);
        let hmin = span * T::lit(1e-12);
        let mut steps = 0;
        while t < t_r {
            steps += 1;
            if steps > opts.max_steps {
                return Err(NumError::Tracing(format!("gamma^{index} did not reach R; last point x = {x}")));
            }
            let hh = h.min(t_r - t);
            let tn = if t_r - t <= h { t_r } else { t + hh };
            let (xp, yp) = (x + vx * hh, y + vy * hh);
            let ok = sys.newton(xp, yp, tn, opts.newton_tol, 8).and_then(|(xn, yn, it)| {
                let corr = (xn - xp).norm() + (yn - yp).norm();
                let moved = (vx.norm() + vy.norm()) * hh;
                (corr <= T::lit(0.1) * moved + T::lit(1e-13) * scale_of(xn, yn)).then_some((xn, yn, it))
            });
            match ok {
                Some((xn, yn, it)) => {
                    let (nvx, nvy) = sys.velocity(xn, yn, tn);
                    t = tn;
                    x = xn;
                    y = yn;
                    vx = nvx;
                    vy = nvy;
                    checkpoints.push((t, x, y, vx, vy));
                    if it <= 3 {
                        h = h * T::lit(1.5);
                    }
                }
                None => {
                    h = h * T::lit(0.5);
                    if h < hmin {
                        return Err(NumError::Tracing(format!("gamma^{index}: step size underflow near x = {x}")));
                    }
                }
            }
        }
        // Identify the branch at R.
        let (v, _) = v_of(t_r);
        let mut best = (T::infinity(), 0);
        for j in 0..n_div {
            let (xr, yr, _, _) = rs.rotated(j, n_div).eval(v);
            let d = (xr - x).norm() + (yr - y).norm();
            if d < best.0 {
                best = (d, j);
            }
        }
        if best.0 > T::lit(1e-7) * scale_of(x, y) {
            return Err(NumError::Tracing(format!("gamma^{index} does not meet the expansion at R (gap {:e})", best.0.to_f64().unwrap_or(f64::NAN))));
        }
        if used_r[best.1] {
            return Err(NumError::Topology(format!("two components of gamma arrive at R on the same branch ({})", best.1)));
        }
        used_r[best.1] = true;
        components.push(GammaComponent {
            index,
            q_piece: qk,
            r_piece: rs.rotated(best.1, n_div),
            t_q,
            t_r,
            sys: sys.clone(),
            checkpoints,
            tol: opts.newton_tol,
        });
    }
    Ok(LevelSetGamma { components, q: *q, r: *r })
}

/// Diagnostics of a traced level set.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GammaReport {
    pub components: usize,
    /// `max |Im f|` (or `|Im 1/f|` where `|f| > 1`) over the samples.
    pub max_im_f: f64,
    pub min_re_f: f64,
    pub endpoint_gap: f64,
    /// Smallest distance between two components away from the endpoints.
    pub min_separation: f64,
}

impl<T: Real> LevelSetGamma<T> {
    pub fn check(&self, f: &RationalFunction<T>, samples: usize) -> NumResult<GammaReport> {
        let mut max_im = T::zero();
        let mut min_re = T::infinity();
        let mut gap = T::zero();
        let pts: Vec<Vec<(C<T>, C<T>)>> = self.components.iter().map(|g| g.sample(samples)).collect::<NumResult<_>>()?;
        for p in &pts {
            if let (Some(&(x0, y0)), Some(&(x1, y1))) = (p.first(), p.last()) {
                if let (Some((qx, qy)), Some((rx, ry))) = (self.q.xy(), self.r.xy()) {
                    gap = gap.max((x0 - qx).norm() + (y0 - qy).norm()).max((x1 - rx).norm() + (y1 - ry).norm());
                }
            }
            for &(x, y) in &p[1..p.len() - 1] {
                let v = f.eval(x, y)?;
                let (im, re) = if v.norm() <= T::one() { (v.im.abs(), v.re) } else { ((cone::<T>() / v).im.abs(), (cone::<T>() / v).re) };
                max_im = max_im.max(im);
                min_re = min_re.min(re);
            }
        }
        let mut sep = T::infinity();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let (a, b) = (&pts[i], &pts[j]);
                for k in samples / 10..=samples - samples / 10 {
                    let d = (a[k].0 - b[k].0).norm() + (a[k].1 - b[k].1).norm();
                    sep = sep.min(d);
                }
            }
        }
        let f64_of = |x: T| x.to_f64().unwrap_or(f64::NAN);
        let rep = GammaReport {
            components: self.components.len(),
            max_im_f: f64_of(max_im),
            min_re_f: f64_of(min_re),
            endpoint_gap: f64_of(gap),
            min_separation: if sep.is_finite() { f64_of(sep) } else { f64::INFINITY },
        };
        if rep.min_separation < 1e-6 {
            return Err(NumError::Topology(format!("components of gamma meet away from Q and R (distance {:e})", rep.min_separation)));
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chen::{line_integrals, ChenOptions};
    use crate::curve::expr::parse_poly;
    use crate::curve::forms::holomorphic_basis;
    use crate::scalar::cl;

    #[test]
    fn reversion_inverts() {
        let h: Vec<C<f64>> = vec![cl(0.0, 0.0), cl(2.0, 1.0), cl(0.3, 0.0), cl(-0.1, 0.2), cl(0.0, 0.0), cl(0.0, 0.0), cl(0.0, 0.0), cl(0.0, 0.0)];
        let s = revert(&h, 8);
        let id = compose(&h, &s, 8);
        assert!((id[1] - cl(1.0, 0.0)).norm() < 1e-14);
        for z in &id[2..] {
            assert!(z.norm() < 1e-13);
        }
    }

    #[test]
    fn genus_two_level_set() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let mut f = RationalFunction::new(parse_poly("x - 1").unwrap(), parse_poly("x - zeta(5,1)").unwrap()).unwrap();
        f.normalize_at(cl(0.0, 0.0), cl(0.0, 1.0)).unwrap();
        let q = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let r = PointOnCurve::affine(crate::curve::root_of_unity(5, 1), cl(0.0, 0.0));
        let g = trace_gamma(&m, &f, &q, &r, 2, &GammaOptions::default()).unwrap();
        let rep = g.check(&f, 400).unwrap();
        assert_eq!(rep.components, 2);
        assert!(rep.max_im_f < 1e-10, "{rep:?}");
        assert!(rep.min_re_f > -1e-10);
        assert!(rep.endpoint_gap < 1e-10);
        let forms = holomorphic_basis(&m).unwrap();
        let mut total: Vec<C<f64>> = vec![cl(0.0, 0.0); 2];
        for comp in &g.components {
            let v = line_integrals(comp, &forms, &ChenOptions::default()).unwrap();
            assert!(v[0].norm() > 1e-3);
            for i in 0..2 {
                total[i] += v[i];
            }
        }
        assert!(total.iter().all(|z| z.norm() < 1e-9), "{total:?}");
    }

    #[test]
    fn fermat_cubic_level_set() {
        let m = CurveModel::<f64>::fermat(3).unwrap();
        let mut f = RationalFunction::new(parse_poly("y - 1").unwrap(), parse_poly("x - 1").unwrap()).unwrap();
        let u = 2f64.powf(-1.0 / 3.0);
        f.normalize_at(cl(u, 0.0), cl(u, 0.0)).unwrap();
        let q = PointOnCurve::affine(cl(0.0, 0.0), cl(1.0, 0.0));
        let r = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let g = trace_gamma(&m, &f, &q, &r, 3, &GammaOptions::default()).unwrap();
        let rep = g.check(&f, 400).unwrap();
        assert_eq!(rep.components, 3);
        assert!(rep.max_im_f < 1e-10, "{rep:?}");
        let forms = holomorphic_basis(&m).unwrap();
        let mut total: C<f64> = cl(0.0, 0.0);
        for comp in &g.components {
            total += line_integrals(comp, &forms, &ChenOptions::default()).unwrap()[0];
        }
        assert!(total.norm() < 1e-9, "{total}");
    }
}
