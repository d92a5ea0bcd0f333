//! Adaptive Gauss-Legendre panels for smooth complex integrands.
//!
//! A panel is accepted once the Legendre expansion of every component,
//! recovered from the node values, has a negligible tail. Accepted panels
//! keep their node values, so running primitives (and therefore iterated
//! integrals) can be formed with the spectral integration matrix without
//! resampling.

use std::collections::VecDeque;

use crate::error::{NumError, NumResult};
use crate::scalar::{czero, to_c64, Real, C};

/// Nodes, weights and spectral operators of an `n`-point rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    /// `coef[k][i]`: node-to-Legendre-coefficient map.
    coef: Vec<Vec<T>>,
    /// `integ[i][j]`: `int_{-1}^{x_i}` of the interpolant of `e_j`.
    integ: Vec<Vec<T>>,
}

fn legendre_all<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut p = vec![T::zero(); n + 1];
    p[0] = T::one();
    if n > 0 {
        p[1] = x;
    }
    for k in 1..n {
        let kk = T::from_usize(k).unwrap();
        p[k + 1] = ((kk + kk + T::one()) * x * p[k] - kk * p[k - 1]) / (kk + T::one());
    }
    p
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "rule needs at least two nodes");
        let nn = T::from_usize(n).unwrap();
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n {
            // Chebyshev-like initial guess, then Newton on P_n.
            let theta = T::PI() * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nn + T::lit(0.5));
            let mut x = -theta.cos();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                let dp = nn * (x * p[n] - p[n - 1]) / (x * x - T::one());
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() <= T::epsilon() {
                    break;
                }
            }
            let p = legendre_all(n, x);
            let dp = nn * (x * p[n] - p[n - 1]) / (x * x - T::one());
            nodes[i] = x;
            weights[i] = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        }
        let mut coef = vec![vec![T::zero(); n]; n];
        let pn: Vec<Vec<T>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        for k in 0..n {
            let kk = T::from_usize(k).unwrap();
            for i in 0..n {
                coef[k][i] = (kk + kk + T::one()) / T::lit(2.0) * weights[i] * pn[i][k];
            }
        }
        let mut integ = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            let x = nodes[i];
            let p = &pn[i];
            let prim: Vec<T> = (0..n)
                .map(|k| {
                    if k == 0 {
                        x + T::one()
                    } else {
                        let kk = T::from_usize(k).unwrap();
                        (p[k + 1] - p[k - 1]) / (kk + kk + T::one())
                    }
                })
                .collect();
            for j in 0..n {
                integ[i][j] = (0..n).fold(T::zero(), |acc, k| acc + prim[k] * coef[k][j]);
            }
        }
        GaussLegendre { nodes, weights, coef, integ }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Legendre coefficients of the interpolant through `values`.
    pub fn legendre_coefficients(&self, values: &[C<T>]) -> Vec<C<T>> {
        self.coef
            .iter()
            .map(|row| row.iter().zip(values).fold(czero(), |acc, (&w, &v)| acc + v * w))
            .collect()
    }

    /// Running primitive at the nodes, on the reference interval.
    pub fn primitive(&self, values: &[C<T>]) -> Vec<C<T>> {
        self.integ
            .iter()
            .map(|row| row.iter().zip(values).fold(czero(), |acc, (&w, &v)| acc + v * w))
            .collect()
    }

    pub fn sum(&self, values: &[C<T>]) -> C<T> {
        self.weights.iter().zip(values).fold(czero(), |acc, (&w, &v)| acc + v * w)
    }

    /// Nodes mapped to `[a, b]`.
    pub fn nodes_on(&self, a: T, b: T) -> Vec<T> {
        let h = (b - a) / T::lit(2.0);
        let m = (a + b) / T::lit(2.0);
        self.nodes.iter().map(|&x| m + h * x).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
    pub order: usize,
    /// Number of equal panels the interval is split into before adapting.
    pub initial_panels: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        QuadOptions {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-300).max(T::min_positive_value()),
            max_panels: 4000,
            order: 20,
            initial_panels: 4,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        QuadOptions { rel_tol: tol, ..Default::default() }
    }
}

/// An accepted panel with the integrand sampled at its nodes:
/// `values[i][c]` is component `c` at node `i`.
#[derive(Clone, Debug)]
pub struct Panel<T> {
    pub a: T,
    pub b: T,
    pub values: Vec<Vec<C<T>>>,
    pub tail: T,
}

impl<T: Real> Panel<T> {
    pub fn half_width(&self) -> T {
        (self.b - self.a) / T::lit(2.0)
    }

    pub fn component(&self, c: usize) -> Vec<C<T>> {
        self.values.iter().map(|v| v[c]).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Panels<T> {
    pub panels: Vec<Panel<T>>,
    pub error_estimate: T,
    pub scale: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralResult<T> {
    pub value: C<T>,
    pub error_estimate: T,
    pub subdivisions: usize,
}

fn sample<T: Real, F: FnMut(T) -> NumResult<Vec<C<T>>>>(
    f: &mut F,
    rule: &GaussLegendre<T>,
    a: T,
    b: T,
) -> NumResult<Vec<Vec<C<T>>>> {
    rule.nodes_on(a, b).into_iter().map(|t| f(t)).collect()
}

fn tail_of<T: Real>(rule: &GaussLegendre<T>, values: &[Vec<C<T>>]) -> (T, T) {
    let n = rule.len();
    let m = values.first().map_or(0, |v| v.len());
    let mut tail = T::zero();
    let mut peak = T::zero();
    for c in 0..m {
        let col: Vec<C<T>> = values.iter().map(|v| v[c]).collect();
        let coef = rule.legendre_coefficients(&col);
        let t = coef[n - 1].norm() + coef[n - 2].norm() + coef[n - 3].norm();
        tail = tail.max(t);
        for z in &coef {
            peak = peak.max(z.norm());
        }
        for z in &col {
            if !z.re.is_finite() || !z.im.is_finite() {
                tail = T::infinity();
            }
        }
    }
    (tail, peak)
}

/// Splits `[a, b]` into panels on which every component of `f` is resolved.
/// `f` returns the same number of components at every point.
pub fn adaptive_panels<T: Real, F: FnMut(T) -> NumResult<Vec<C<T>>>>(
    mut f: F,
    a: T,
    b: T,
    rule: &GaussLegendre<T>,
    opts: &QuadOptions<T>,
    what: &str,
) -> NumResult<Panels<T>> {
    let k = opts.initial_panels.max(1);
    let kk = T::from_usize(k).unwrap();
    let mut queue = VecDeque::new();
    let mut scale = T::zero();
    for i in 0..k {
        let lo = a + (b - a) * T::from_usize(i).unwrap() / kk;
        let hi = a + (b - a) * T::from_usize(i + 1).unwrap() / kk;
        let vals = sample(&mut f, rule, lo, hi)?;
        let (tail, peak) = tail_of(rule, &vals);
        scale = scale.max(peak);
        queue.push_back((lo, hi, vals, tail));
    }
    let mut done: Vec<Panel<T>> = Vec::new();
    let mut err = T::zero();
    while let Some((lo, hi, vals, tail)) = queue.pop_front() {
        let thresh = (opts.rel_tol * scale).max(opts.abs_tol);
        if tail <= thresh {
            err += tail * (hi - lo);
            done.push(Panel { a: lo, b: hi, values: vals, tail });
            continue;
        }
        if done.len() + queue.len() + 2 > opts.max_panels || (hi - lo).abs() <= T::epsilon() * (T::one() + lo.abs()) * T::lit(64.0) {
            let partial = done
                .iter()
                .fold(czero::<T>(), |acc, p| acc + rule.sum(&p.component(0)) * p.half_width());
            let p = to_c64(partial);
            return Err(NumError::Convergence {
                what: what.to_string(),
                partial_re: p.re,
                partial_im: p.im,
                estimate: tail.to_f64().unwrap_or(f64::NAN),
                panels: done.len(),
            });
        }
        let mid = (lo + hi) / T::lit(2.0);
        for (x, y) in [(lo, mid), (mid, hi)] {
            let v = sample(&mut f, rule, x, y)?;
            let (t, peak) = tail_of(rule, &v);
            scale = scale.max(peak);
            queue.push_back((x, y, v, t));
        }
    }
    done.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(Panels { panels: done, error_estimate: err, scale })
}

/// Adaptive integral of a scalar complex function over `[a, b]`.
pub fn integrate<T: Real, F: FnMut(T) -> C<T>>(
    mut f: F,
    a: T,
    b: T,
    opts: &QuadOptions<T>,
) -> NumResult<IntegralResult<T>> {
    let rule = GaussLegendre::new(opts.order);
    let panels = adaptive_panels(|t| Ok(vec![f(t)]), a, b, &rule, opts, "integral")?;
    let value = panels
        .panels
        .iter()
        .fold(czero(), |acc, p| acc + rule.sum(&p.component(0)) * p.half_width());
    Ok(IntegralResult { value, error_estimate: panels.error_estimate, subdivisions: panels.panels.len() })
}

/// Rectangle `[x0, x1] x [y0, y1]` for the 2D cubature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Real> Rect<T> {
    pub fn area(&self) -> T {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn split(&self) -> [Rect<T>; 4] {
        let xm = (self.x0 + self.x1) / T::lit(2.0);
        let ym = (self.y0 + self.y1) / T::lit(2.0);
        [
            Rect { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rect { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rect { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
            Rect { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
        ]
    }

    fn corners(&self) -> [(T, T); 4] {
        [(self.x0, self.y0), (self.x1, self.y0), (self.x0, self.y1), (self.x1, self.y1)]
    }
}

/// Options for [`cubature`].
#[derive(Clone, Copy, Debug)]
pub struct CubatureOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_cells: usize,
    pub order: usize,
    /// Exponent `m` of the radial substitution `xi = s^m` used at singular
    /// corners (after the Duffy collapse).
    pub corner_power: usize,
}

impl<T: Real> Default for CubatureOptions<T> {
    fn default() -> Self {
        CubatureOptions { rel_tol: T::lit(1e-9), abs_tol: T::lit(1e-14), max_cells: 200_000, order: 8, corner_power: 2 }
    }
}

/// Tensor rule on a cell; cells with a singular corner are split into two
/// triangles collapsed onto that corner, with `xi = s^m` along the ray.
fn cell_rule<T: Real, F: FnMut(T, T) -> Vec<C<T>>>(
    f: &mut F,
    dim: usize,
    r: &Rect<T>,
    corner: Option<(T, T)>,
    rule: &GaussLegendre<T>,
    m: usize,
) -> Vec<C<T>> {
    let half = T::lit(0.5);
    let map = |x: T| (x + T::one()) * half;
    let mut acc = vec![czero(); dim];
    let add = |acc: &mut Vec<C<T>>, v: Vec<C<T>>, w: T| {
        for (a, z) in acc.iter_mut().zip(v) {
            *a += z * w;
        }
    };
    match corner {
        None => {
            let hx = (r.x1 - r.x0) * half;
            let hy = (r.y1 - r.y0) * half;
            for (i, &u) in rule.nodes.iter().enumerate() {
                let x = r.x0 + (u + T::one()) * hx;
                for (j, &v) in rule.nodes.iter().enumerate() {
                    let y = r.y0 + (v + T::one()) * hy;
                    add(&mut acc, f(x, y), rule.weights[i] * rule.weights[j] * hx * hy);
                }
            }
        }
        Some((cx, cy)) => {
            let ox = if cx == r.x0 { r.x1 } else { r.x0 };
            let oy = if cy == r.y0 { r.y1 } else { r.y0 };
            // Triangles (corner, (ox, cy), (ox, oy)) and (corner, (ox, oy), (cx, oy)).
            let tris = [((ox, cy), (ox, oy)), ((ox, oy), (cx, oy))];
            let mm = T::from_usize(m).unwrap();
            for (p1, p2) in tris {
                let e1 = (p1.0 - cx, p1.1 - cy);
                let e2 = (p2.0 - cx, p2.1 - cy);
                let jac = (e1.0 * e2.1 - e1.1 * e2.0).abs();
                for (i, &u) in rule.nodes.iter().enumerate() {
                    let s = map(u);
                    let xi = s.powi(m as i32);
                    let dxi = mm * s.powi(m as i32 - 1);
                    for (j, &v) in rule.nodes.iter().enumerate() {
                        let eta = map(v);
                        let x = cx + xi * (e1.0 + eta * (e2.0 - e1.0));
                        let y = cy + xi * (e1.1 + eta * (e2.1 - e1.1));
                        let w = rule.weights[i] * rule.weights[j] * half * half;
                        add(&mut acc, f(x, y), w * jac * xi * dxi);
                    }
                }
            }
        }
    }
    acc
}

/// Adaptive cubature over a union of rectangles. `singular` lists points
/// with integrable singularities; they must sit on cell corners of the
/// initial rectangles (refinement keeps them on corners).
pub fn cubature<T: Real, F: FnMut(T, T) -> C<T>>(
    mut f: F,
    cells: &[Rect<T>],
    singular: &[(T, T)],
    opts: &CubatureOptions<T>,
) -> NumResult<IntegralResult<T>> {
    let (v, err, n) = cubature_vec(|x, y| vec![f(x, y)], 1, cells, singular, opts)?;
    Ok(IntegralResult { value: v[0], error_estimate: err, subdivisions: n })
}

/// Vector-valued [`cubature`]: every component shares the refinement, which
/// is driven by the worst component. Returns `(values, error, cells)`.
pub fn cubature_vec<T: Real, F: FnMut(T, T) -> Vec<C<T>>>(
    mut f: F,
    dim: usize,
    cells: &[Rect<T>],
    singular: &[(T, T)],
    opts: &CubatureOptions<T>,
) -> NumResult<(Vec<C<T>>, T, usize)> {
    let rule = GaussLegendre::new(opts.order);
    let coarse = GaussLegendre::new((opts.order / 2).max(2));
    let close = |a: T, b: T, r: &Rect<T>| {
        let s = (r.x1 - r.x0).abs() + (r.y1 - r.y0).abs();
        (a - b).abs() <= s * T::lit(1e-12)
    };
    let corner_of = |r: &Rect<T>| {
        r.corners().into_iter().find(|&(x, y)| singular.iter().any(|&(sx, sy)| close(x, sx, r) && close(y, sy, r)))
    };
    let mut stack: Vec<(Rect<T>, usize)> = cells.iter().map(|r| (*r, 0)).collect();
    let mut total = vec![czero(); dim];
    let mut err = T::zero();
    let mut count = 0usize;
    let mut estimate_scale = vec![T::zero(); dim];
    let total_area = cells.iter().fold(T::zero(), |acc, r| acc + r.area().abs());
    // First pass for the scale used by the absolute threshold.
    for (r, _) in &stack {
        let v = cell_rule(&mut f, dim, r, corner_of(r), &coarse, opts.corner_power);
        for (s, z) in estimate_scale.iter_mut().zip(v) {
            *s += z.norm();
        }
    }
    while let Some((r, depth)) = stack.pop() {
        let corner = corner_of(&r);
        let fine = cell_rule(&mut f, dim, &r, corner, &rule, opts.corner_power);
        let rough = cell_rule(&mut f, dim, &r, corner, &coarse, opts.corner_power);
        let frac = (r.area() / total_area).abs().sqrt();
        let mut ok = true;
        let mut diff = T::zero();
        for k in 0..dim {
            let d = (fine[k] - rough[k]).norm();
            diff = diff.max(d);
            if d > (opts.rel_tol * estimate_scale[k] * frac).max(opts.abs_tol) {
                ok = false;
            }
        }
        count += 1;
        if ok || depth > 40 {
            if fine.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(NumError::Singular(format!("non-finite cubature value on cell {:?}", (r.x0.to_f64(), r.y0.to_f64()))));
            }
            for (t, z) in total.iter_mut().zip(fine) {
                *t += z;
            }
            err += diff;
            continue;
        }
        if count + stack.len() > opts.max_cells {
            let p = to_c64(total[0]);
            return Err(NumError::Convergence {
                what: "surface cubature".into(),
                partial_re: p.re,
                partial_im: p.im,
                estimate: diff.to_f64().unwrap_or(f64::NAN),
                panels: count,
            });
        }
        for child in r.split() {
            stack.push((child, depth + 1));
        }
    }
    Ok((total, err, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = GaussLegendre::<f64>::new(12);
        let vals: Vec<C<f64>> = r.nodes.iter().map(|&x| c(x.powi(10), 0.0)).collect();
        assert!((r.sum(&vals).re - 2.0 / 11.0).abs() < 1e-14);
        let prim = r.primitive(&vals);
        for (i, &x) in r.nodes.iter().enumerate() {
            assert!((prim[i].re - (x.powi(11) + 1.0) / 11.0).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_integral_of_peaked_function() {
        let res = integrate(|t: f64| c(1.0 / (1e-4 + (t - 0.3) * (t - 0.3)), 0.0), 0.0, 1.0, &QuadOptions::default()).unwrap();
        let exact = ((0.7f64 / 0.01).atan() + (0.3f64 / 0.01).atan()) / 0.01;
        assert!((res.value.re - exact).abs() / exact < 1e-10, "{} vs {exact}", res.value.re);
    }

    #[test]
    fn f32_instantiation_runs() {
        let res = integrate(|t: f32| c(t.cos(), 0.0), 0.0, 1.0, &QuadOptions::with_tol(1e-5)).unwrap();
        assert!((res.value.re - 1f32.sin()).abs() < 1e-5);
    }

    #[test]
    fn cubature_with_corner_singularity() {
        // int over [0,1]^2 of 1/r = 2 ln(1 + sqrt 2).
        let f = |x: f64, y: f64| c(1.0 / (x * x + y * y).sqrt(), 0.0);
        let cells = [Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }];
        let res = cubature(f, &cells, &[(0.0, 0.0)], &CubatureOptions::default()).unwrap();
        let exact = 2.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((res.value.re - exact).abs() < 1e-9, "{}", res.value.re - exact);
    }
}
