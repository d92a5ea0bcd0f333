//! Algebraic intersection numbers of closed paths on the curve.

use super::surface::SurfacePath;
use crate::error::{NumError, NumResult};
use crate::scalar::{Real, C};

const SAMPLES: usize = 48;

struct Poly<T: Real> {
    /// `(segment, t, x)`.
    pts: Vec<(usize, T, C<T>)>,
}

fn polyline<T: Real>(p: &SurfacePath<T>) -> Poly<T> {
    let mut pts = Vec::new();
    for (i, s) in p.segments.iter().enumerate() {
        let m = (SAMPLES as f64 * (1.0 + (s.arc.length().to_f64().unwrap_or(1.0) * 4.0).min(8.0))) as usize;
        for k in 0..m {
            let t = T::from_usize(k).unwrap() / T::from_usize(m).unwrap();
            pts.push((i, t, s.arc.x(t)));
        }
    }
    if let Some(s) = p.segments.last() {
        pts.push((p.segments.len() - 1, T::one(), s.arc.end()));
    }
    Poly { pts }
}

/// Solves `a + s (b - a) = c + u (d - c)`.
fn edge_cross<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Option<(T, T)> {
    let r = b - a;
    let w = d - c;
    let den = (r.conj() * w).im;
    if den.abs() <= T::epsilon() * r.norm() * w.norm() {
        return None;
    }
    let q = c - a;
    let s = (q.conj() * w).im / den;
    let u = (q.conj() * r).im / den;
    if s >= T::zero() && s < T::one() && u >= T::zero() && u < T::one() {
        Some((s, u))
    } else {
        None
    }
}

/// Intersection number `K(p1, p2)`: the sum over transverse crossings on the
/// same sheet of `+1` when `(dp1, dp2)` is positively oriented.
pub fn intersection_number<T: Real>(p1: &SurfacePath<T>, p2: &SurfacePath<T>) -> NumResult<i64> {
    let a = polyline(p1);
    let b = polyline(p2);
    let mut found: Vec<(usize, T, usize, T, i64)> = Vec::new();
    for i in 0..a.pts.len() - 1 {
        let (si, ti, xi) = a.pts[i];
        let (sj, tj, xj) = a.pts[i + 1];
        let (lo_a, hi_a) = (xi.re.min(xj.re), xi.re.max(xj.re));
        for k in 0..b.pts.len() - 1 {
            let (sk, tk, xk) = b.pts[k];
            let (sl, tl, xl) = b.pts[k + 1];
            if xk.re.max(xl.re) < lo_a || xk.re.min(xl.re) > hi_a {
                continue;
            }
            let Some((s, u)) = edge_cross(xi, xj, xk, xl) else { continue };
            // Local parameters on the arcs, then Newton on x1(t1) = x2(t2).
            let t1_end = if sj == si { tj } else { T::one() };
            let t2_end = if sl == sk { tl } else { T::one() };
            let mut t1 = ti + (t1_end - ti) * s;
            let mut t2 = tk + (t2_end - tk) * u;
            let (g1, g2) = (&p1.segments[si], &p2.segments[sk]);
            for _ in 0..30 {
                let r = g1.arc.x(t1) - g2.arc.x(t2);
                let (d1, d2) = (g1.arc.dx(t1), -g2.arc.dx(t2));
                let det = (d1.conj() * d2).im;
                if det.abs() <= T::min_positive_value() {
                    break;
                }
                // Solve d1 a + d2 b = -r for real a, b.
                let da = -(r.conj() * d2).im / det;
                let db = (r.conj() * d1).im / det;
                t1 += da;
                t2 += db;
                if da.abs().max(db.abs()) < T::epsilon() * T::lit(16.0) {
                    break;
                }
            }
            if t1 < T::lit(-1e-9) || t1 > T::lit(1.0 + 1e-9) || t2 < T::lit(-1e-9) || t2 > T::lit(1.0 + 1e-9) {
                continue;
            }
            let q1 = g1.point(t1.max(T::zero()).min(T::one()))?;
            let q2 = g2.point(t2.max(T::zero()).min(T::one()))?;
            let scale = q1.y.norm().max(q2.y.norm());
            if scale < T::lit(1e-6) {
                return Err(NumError::Topology(format!("paths cross at a branch point near x = {}", q1.x)));
            }
            if (q1.y - q2.y).norm() > T::lit(1e-3) * scale {
                continue;
            }
            let orient = (q1.dx.conj() * q2.dx).im;
            let sign = if orient > T::zero() { 1 } else { -1 };
            if orient.abs() <= T::lit(1e-9) * q1.dx.norm() * q2.dx.norm() {
                return Err(NumError::Topology(format!("tangential crossing near x = {}", q1.x)));
            }
            let dup = found.iter().any(|f| {
                f.0 == si && f.2 == sk && (f.1 - t1).abs() < T::lit(1e-7) && (f.3 - t2).abs() < T::lit(1e-7)
            });
            if !dup {
                found.push((si, t1, sk, t2, sign));
            }
        }
    }
    Ok(found.iter().map(|f| f.4).sum())
}

/// Integer symplectic reduction of an antisymmetric form.
///
/// Returns the rows of a change of basis `(a_1..a_g, b_1..b_g)` with
/// `K(a_i, b_j) = delta_ij` and all other pairings zero, together with the
/// vectors spanning the radical.
pub fn symplectic_basis(k: &[Vec<i64>]) -> NumResult<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let m = k.len();
    let pair = |u: &[i64], v: &[i64]| -> i64 {
        let mut s = 0;
        for i in 0..m {
            if u[i] == 0 {
                continue;
            }
            for j in 0..m {
                s += u[i] * k[i][j] * v[j];
            }
        }
        s
    };
    let mut pool: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect();
    let mut a_vecs = Vec::new();
    let mut b_vecs = Vec::new();
    loop {
        // Smallest nonzero pairing in the pool.
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..pool.len() {
            for j in 0..pool.len() {
                let v = pair(&pool[i], &pool[j]);
                if v != 0 && best.is_none_or(|b| v.abs() < b.0.abs()) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, i, j)) = best else { break };
        if v.abs() == 1 {
            let (mut e, f) = (pool[i].clone(), pool[j].clone());
            if v == -1 {
                e.iter_mut().for_each(|x| *x = -*x);
            }
            let mut rest = Vec::new();
            for (l, u) in pool.iter().enumerate() {
                if l == i || l == j {
                    continue;
                }
                let (ue, uf) = (pair(u, &e), pair(u, &f));
                let w: Vec<i64> = (0..m).map(|t| u[t] - uf * e[t] + ue * f[t]).collect();
                rest.push(w);
            }
            a_vecs.push(e);
            b_vecs.push(f);
            pool = rest;
            continue;
        }
        // Euclid step: reduce pairings with pool[j] modulo v using pool[i].
        let target = pool[j].clone();
        let base = pool[i].clone();
        let mut changed = false;
        for l in 0..pool.len() {
            if l == i {
                continue;
            }
            let w = pair(&pool[l], &target);
            let q = w.div_euclid(v);
            if q != 0 {
                for t in 0..m {
                    pool[l][t] -= q * base[t];
                }
                changed = true;
            }
        }
        if !changed {
            return Err(NumError::Basis(format!("intersection form is not unimodular (minimal pairing {v})")));
        }
    }
    let mut basis = a_vecs;
    basis.extend(b_vecs);
    let radical = pool.into_iter().filter(|v| v.iter().any(|x| *x != 0)).collect();
    Ok((basis, radical))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(basis: &[Vec<i64>], k: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = k.len();
        basis
            .iter()
            .map(|u| {
                basis
                    .iter()
                    .map(|v| (0..n).map(|i| (0..n).map(|j| u[i] * k[i][j] * v[j]).sum::<i64>()).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn reduces_chain_form() {
        // Consecutive-cut cycles on a genus-2 hyperelliptic curve.
        let k = vec![vec![0, 1, 0, 0], vec![-1, 0, 1, 0], vec![0, -1, 0, 1], vec![0, 0, -1, 0]];
        let (b, rad) = symplectic_basis(&k).unwrap();
        assert!(rad.is_empty());
        let f = form(&b, &k);
        assert_eq!(f, vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, 0, 0, 0], vec![0, -1, 0, 0]]);
    }

    #[test]
    fn radical_and_euclid() {
        // 2 e1.e2 + e1.e3: gcd structure needs Euclid; e4 is in the radical.
        let k = vec![vec![0, 2, 1, 0], vec![-2, 0, 0, 0], vec![-1, 0, 0, 0], vec![0, 0, 0, 0]];
        let (b, rad) = symplectic_basis(&k).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(rad.len(), 2);
        let f = form(&b, &k);
        assert_eq!(f, vec![vec![0, 1], vec![-1, 0]]);
    }
}
