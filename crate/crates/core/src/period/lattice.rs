//! Reduction of complex vectors modulo lattices of periods.

use serde::Serialize;

use crate::error::{NumError, NumResult};
use crate::scalar::{czero, Real, C};

pub const DEFAULT_BOX: i64 = 50;

/// A vector in `C^d` together with its reduction modulo a lattice.
#[derive(Clone, Debug)]
pub struct JacobianValue<T: Real> {
    pub ambient_dim: usize,
    pub vector: Vec<C<T>>,
    pub lattice: Vec<Vec<C<T>>>,
    /// `vector - sum coefficients[k] lattice[k]`.
    pub reduced: Vec<C<T>>,
    pub coefficients: Vec<i64>,
    /// Euclidean norm of `reduced`.
    pub residual: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobianSummary {
    pub vector: Vec<[f64; 2]>,
    pub reduced: Vec<[f64; 2]>,
    pub coefficients: Vec<i64>,
    pub residual: f64,
}

impl<T: Real> JacobianValue<T> {
    pub fn summary(&self) -> JacobianSummary {
        let pair = |z: &C<T>| [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)];
        JacobianSummary {
            vector: self.vector.iter().map(pair).collect(),
            reduced: self.reduced.iter().map(pair).collect(),
            coefficients: self.coefficients.clone(),
            residual: self.residual.to_f64().unwrap_or(f64::NAN),
        }
    }
}

fn realify<T: Real>(v: &[C<T>]) -> Vec<T> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

/// Gram-Schmidt vectors and coefficients of the rows of `b`.
fn gram_schmidt<T: Real>(b: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let r = b.len();
    let mut bs: Vec<Vec<T>> = Vec::with_capacity(r);
    let mut mu = vec![vec![T::zero(); r]; r];
    for i in 0..r {
        let mut v = b[i].clone();
        for j in 0..i {
            let nj = dot(&bs[j], &bs[j]);
            mu[i][j] = if nj > T::zero() { dot(&b[i], &bs[j]) / nj } else { T::zero() };
            for (x, y) in v.iter_mut().zip(&bs[j]) {
                *x -= mu[i][j] * *y;
            }
        }
        bs.push(v);
    }
    (bs, mu)
}

/// LLL reduction (`delta = 3/4`) of the rows of `b`; `u` tracks the
/// unimodular transform (`b_new = u b_old`).
fn lll<T: Real>(b: &mut [Vec<T>], u: &mut [Vec<i64>]) {
    let r = b.len();
    let delta = T::lit(0.75);
    let mut k = 1;
    let mut guard = 0;
    while k < r && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(b);
            let q = mu[k][j].round();
            if q != T::zero() {
                let qi = q.to_i64().unwrap_or(0);
                for t in 0..b[k].len() {
                    let v = b[j][t];
                    b[k][t] -= q * v;
                }
                for t in 0..u[k].len() {
                    let v = u[j][t];
                    u[k][t] -= qi * v;
                }
            }
        }
        let (bs, mu) = gram_schmidt(b);
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Nearest lattice point to `v` (Babai on an LLL-reduced basis, refined by
/// enumerating `{-1, 0, 1}` offsets). Lattice generators must be linearly
/// independent over the reals. Coefficients are with respect to the given
/// generators; when one exceeds `coeff_box` the reduction is reported as
/// inconclusive.
pub fn reduce_mod_lattice<T: Real>(v: &[C<T>], lattice: &[Vec<C<T>>], coeff_box: i64) -> NumResult<JacobianValue<T>> {
    let r = lattice.len();
    let d = v.len();
    if lattice.iter().any(|l| l.len() != d) {
        return Err(NumError::Precondition("lattice generators and vector differ in dimension".into()));
    }
    let norm = |z: &[C<T>]| z.iter().fold(T::zero(), |s, w| s + w.norm_sqr()).sqrt();
    if r == 0 {
        return Ok(JacobianValue { ambient_dim: d, vector: v.to_vec(), lattice: Vec::new(), reduced: v.to_vec(), coefficients: Vec::new(), residual: norm(v) });
    }
    let mut b: Vec<Vec<T>> = lattice.iter().map(|l| realify(l)).collect();
    let (bs0, _) = gram_schmidt(&b);
    let scale = b.iter().fold(T::zero(), |m, x| m.max(dot(x, x).sqrt()));
    for (i, x) in bs0.iter().enumerate() {
        if dot(x, x).sqrt() <= T::lit(1e-10) * scale {
            return Err(NumError::Degenerate(format!("lattice generator {i} is dependent on the previous ones")));
        }
    }
    let mut u: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    lll(&mut b, &mut u);
    let (bs, _) = gram_schmidt(&b);
    let target = realify(v);
    let mut rest = target.clone();
    let mut cr = vec![0i64; r];
    for i in (0..r).rev() {
        let q = (dot(&rest, &bs[i]) / dot(&bs[i], &bs[i])).round();
        cr[i] = q.to_i64().ok_or_else(|| NumError::Inconclusive("coefficient overflow".into()))?;
        for (x, y) in rest.iter_mut().zip(&b[i]) {
            *x -= q * *y;
        }
    }
    // Enumerate small offsets around the Babai point.
    let residual_of = |c: &[i64]| -> T {
        let mut w = target.clone();
        for (i, ci) in c.iter().enumerate() {
            let ct = T::from_i64(*ci).unwrap();
            for (x, y) in w.iter_mut().zip(&b[i]) {
                *x -= ct * *y;
            }
        }
        dot(&w, &w)
    };
    let mut best = (residual_of(&cr), cr.clone());
    if r <= 8 {
        let total = 3usize.pow(r as u32);
        for code in 0..total {
            let mut c2 = cr.clone();
            let mut k = code;
            for ci in c2.iter_mut() {
                *ci += (k % 3) as i64 - 1;
                k /= 3;
            }
            let res = residual_of(&c2);
            if res < best.0 {
                best = (res, c2);
            }
        }
    }
    let mut coeffs = vec![0i64; r];
    for (i, ci) in best.1.iter().enumerate() {
        for j in 0..r {
            coeffs[j] += ci * u[i][j];
        }
    }
    if let Some(worst) = coeffs.iter().map(|x| x.abs()).max() {
        if worst > coeff_box {
            return Err(NumError::Inconclusive(format!("lattice coefficient {worst} exceeds the box {coeff_box}")));
        }
    }
    let mut reduced = v.to_vec();
    for (k, l) in lattice.iter().enumerate() {
        let ck = T::from_i64(coeffs[k]).unwrap();
        for (x, y) in reduced.iter_mut().zip(l) {
            *x -= *y * ck;
        }
    }
    let residual = norm(&reduced);
    Ok(JacobianValue { ambient_dim: d, vector: v.to_vec(), lattice: lattice.to_vec(), reduced, coefficients: coeffs, residual })
}

/// Scalar reduction modulo `generator * Z` (a rank-one lattice in `C`).
pub fn reduce_scalar<T: Real>(v: C<T>, generator: C<T>, coeff_box: i64) -> NumResult<JacobianValue<T>> {
    if generator == czero() {
        return Err(NumError::Degenerate("zero lattice generator".into()));
    }
    reduce_mod_lattice(&[v], &[vec![generator]], coeff_box)
}

/// Nearest point to `v` in the integer span of scalar generators that may be
/// dense in `C`. Two well-separated generators form a planar basis and take
/// any coefficient; the others are enumerated within `coeff_box`, shrunk so
/// that at most `budget` combinations are visited.
pub fn reduce_in_span<T: Real>(v: C<T>, gens: &[C<T>], coeff_box: i64, budget: usize) -> NumResult<JacobianValue<T>> {
    let top = gens.iter().fold(T::zero(), |m, g| m.max(g.norm()));
    let nz: Vec<usize> = (0..gens.len()).filter(|&k| gens[k].norm() > T::lit(1e-12) * top).collect();
    if nz.is_empty() {
        return Err(NumError::Degenerate("all generators vanish".into()));
    }
    let mut best_pair: Option<(usize, usize, T)> = None;
    for (x, &a) in nz.iter().enumerate() {
        for &b in &nz[x + 1..] {
            let (ga, gb) = (gens[a], gens[b]);
            let q = (ga.conj() * gb).im.abs() / (ga.norm() * gb.norm());
            if best_pair.map_or(true, |(_, _, bq)| q > bq) {
                best_pair = Some((a, b, q));
            }
        }
    }
    let (a, b) = match best_pair {
        Some((a, b, q)) if q > T::lit(1e-9) => (a, b),
        _ => {
            // Collinear generators: reduce against the shortest one.
            let k = *nz.iter().min_by(|&&x, &&y| gens[x].norm().partial_cmp(&gens[y].norm()).unwrap()).unwrap();
            let r = reduce_scalar(v, gens[k], coeff_box)?;
            let mut coefficients = vec![0; gens.len()];
            coefficients[k] = r.coefficients[0];
            return Ok(JacobianValue { lattice: gens.iter().map(|g| vec![*g]).collect(), coefficients, ..r });
        }
    };
    let rest: Vec<usize> = nz.iter().copied().filter(|&k| k != a && k != b).collect();
    let mut inner = coeff_box;
    while inner > 0 && ((2 * inner + 1) as f64).powi(rest.len() as i32) > budget as f64 {
        inner -= 1;
    }
    let (ga, gb) = (gens[a], gens[b]);
    let det = (ga.conj() * gb).im;
    let mut best: Option<(T, Vec<i64>)> = None;
    let mut n = vec![-inner; rest.len()];
    loop {
        let mut w = v;
        for (k, &idx) in rest.iter().enumerate() {
            w -= gens[idx] * T::from_i64(n[k]).unwrap();
        }
        // w = x ga + y gb over the reals.
        let x = (w.conj() * gb).im / det;
        let y = (ga.conj() * w).im / det;
        let (x0, y0) = (x.floor().to_i64().unwrap_or(i64::MAX / 2), y.floor().to_i64().unwrap_or(i64::MAX / 2));
        for dx in 0..2 {
            for dy in 0..2 {
                let (cx, cy) = (x0 + dx, y0 + dy);
                let r = (w - ga * T::from_i64(cx).unwrap() - gb * T::from_i64(cy).unwrap()).norm();
                if best.as_ref().map_or(true, |(br, _)| r < *br) {
                    let mut coeffs = vec![0; gens.len()];
                    coeffs[a] = cx;
                    coeffs[b] = cy;
                    for (k, &idx) in rest.iter().enumerate() {
                        coeffs[idx] = n[k];
                    }
                    best = Some((r, coeffs));
                }
            }
        }
        let mut k = 0;
        while k < n.len() {
            n[k] += 1;
            if n[k] <= inner {
                break;
            }
            n[k] = -inner;
            k += 1;
        }
        if k == n.len() {
            break;
        }
    }
    let (_, coefficients) = best.ok_or_else(|| NumError::Inconclusive(format!("no combination within the box {coeff_box}")))?;
    let shift = coefficients.iter().zip(gens).fold(czero::<T>(), |s, (n, g)| s + *g * T::from_i64(*n).unwrap());
    let reduced = v - shift;
    Ok(JacobianValue {
        ambient_dim: 1,
        vector: vec![v],
        lattice: gens.iter().map(|g| vec![*g]).collect(),
        reduced: vec![reduced],
        coefficients,
        residual: reduced.norm(),
    })
}

/// Typical distance from a generic point to the set searched by
/// [`reduce_in_span`]: residuals well below it are not coincidences.
pub fn span_resolution<T: Real>(gens: &[C<T>], coeff_box: i64, budget: usize) -> T {
    let top = gens.iter().fold(T::zero(), |m, g| m.max(g.norm()));
    let nz: Vec<C<T>> = gens.iter().copied().filter(|g| g.norm() > T::lit(1e-12) * top).collect();
    let mut area = T::zero();
    for (x, a) in nz.iter().enumerate() {
        for b in &nz[x + 1..] {
            area = area.max((a.conj() * *b).im.abs());
        }
    }
    if area <= T::zero() {
        return nz.iter().fold(T::zero(), |m, g| m.max(g.norm())) * T::lit(0.5);
    }
    let rest = nz.len().saturating_sub(2) as i32;
    let mut inner = coeff_box;
    while inner > 0 && ((2 * inner + 1) as f64).powi(rest) > budget as f64 {
        inner -= 1;
    }
    let count = T::from_f64(((2 * inner + 1) as f64).powi(rest)).unwrap();
    (area / count).sqrt() * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;
    use proptest::prelude::*;

    fn gens() -> Vec<Vec<C<f64>>> {
        vec![
            vec![cl(1.0, 0.0), cl(0.0, 0.0)],
            vec![cl(0.0, 0.0), cl(1.0, 0.0)],
            vec![cl(0.3, 1.1), cl(-0.2, 0.4)],
            vec![cl(-0.2, 0.4), cl(0.5, 0.9)],
        ]
    }

    #[test]
    fn generator_reduces_to_zero() {
        let g = gens();
        let r = reduce_mod_lattice(&g[2], &g, DEFAULT_BOX).unwrap();
        assert!(r.residual < 1e-12);
        assert_eq!(r.coefficients, vec![0, 0, 1, 0]);
    }

    #[test]
    fn half_generator_rank_one() {
        let g = cl(0.7, -1.3);
        let r = reduce_scalar(g * 0.5, g, DEFAULT_BOX).unwrap();
        let z = r.reduced[0];
        assert!((z - g * 0.5).norm() < 1e-12 || (z + g * 0.5).norm() < 1e-12);
    }

    #[test]
    fn box_exceeded_is_inconclusive() {
        let g: C<f64> = cl(1.0, 0.0);
        assert!(matches!(reduce_scalar(cl(123.2, 0.0), g, DEFAULT_BOX), Err(NumError::Inconclusive(_))));
    }

    proptest! {
        #[test]
        fn integer_combinations_vanish(c in proptest::collection::vec(-10i64..=10, 4)) {
            let g = gens();
            let mut v = vec![cl(0.0, 0.0); 2];
            for (k, ck) in c.iter().enumerate() {
                for i in 0..2 { v[i] += g[k][i] * (*ck as f64); }
            }
            let r = reduce_mod_lattice(&v, &g, DEFAULT_BOX).unwrap();
            prop_assert!(r.residual < 1e-9);
            prop_assert_eq!(r.coefficients, c);
        }
    }

    #[test]
    fn span_search_recovers_combination() {
        let gens = [cl(1.0, 0.0), cl(0.0, 0.0), cl(0.0, 1.1756), cl(-0.191, -0.588)];
        let v = gens[0] * -5.0 + gens[2] * 30.0 + gens[3] * 7.0 + cl(1e-9, 0.0);
        let r = reduce_in_span(v, &gens, DEFAULT_BOX, 200_000).unwrap();
        assert!(r.residual < 1e-6, "{}", r.residual);
    }

    #[test]
    fn span_search_collinear() {
        let gens = [cl(0.0, 2.0), cl(0.0, 4.0)];
        let r: JacobianValue<f64> = reduce_in_span(cl(0.1, 6.0), &gens, DEFAULT_BOX, 1000).unwrap();
        assert!((r.residual - 0.1f64).abs() < 1e-12);
    }
}
