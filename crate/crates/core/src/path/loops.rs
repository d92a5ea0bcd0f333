//! Symplectic generators `alpha'_i`, the puncture loop `beta_Q`, winding
//! numbers and the kernel loops `alpha_i = alpha'_i^N beta_Q^(-m_i)`.
//!
//! Candidate cycles are figure-eight loops around consecutive branch points
//! (sorted by angle about their centroid), lifted to each of `n - 1` sheets.
//! Each candidate uses its own radius and lane angle so that all candidates
//! are in general position; their intersection numbers are computed from
//! the geometry and reduced to a symplectic basis over the integers.

use super::arc::Arc;
use super::intersect::{intersection_number, symplectic_basis};
use super::route::route;
use super::surface::SurfacePath;
use crate::chen::{line_integrals, ChenOptions};
use crate::curve::forms::DifferentialForm;
use crate::curve::function::RationalFunction;
use crate::curve::{CurveModel, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{c, Real, C};

#[derive(Clone, Copy, Debug)]
pub struct LoopOptions<T> {
    /// Loop radius around branch points, as a fraction of their minimum
    /// separation.
    pub rho_fraction: T,
    /// Half-angle between the two lanes of a figure-eight.
    pub lane_angle: T,
    /// Continuation clearance as a fraction of the minimum separation.
    pub clearance_fraction: T,
    /// Selects a different but homotopic family of loops.
    pub variant: usize,
    pub winding_tol: T,
}

impl<T: Real> Default for LoopOptions<T> {
    fn default() -> Self {
        LoopOptions {
            rho_fraction: T::lit(0.22),
            lane_angle: T::lit(0.45),
            clearance_fraction: T::lit(1e-3),
            variant: 0,
            winding_tol: T::lit(1e-6),
        }
    }
}

/// A figure-eight around `(e_a, e_b)` lifted to a chosen sheet.
#[derive(Clone, Debug)]
pub struct Candidate<T: Real> {
    pub pair: (usize, usize),
    pub shift: usize,
    pub rho: T,
    pub delta: T,
    /// The closed lift (no tail).
    pub cycle: SurfacePath<T>,
    /// `tail . c^shift . cycle . c^-shift . tail^-1`, based at `P`.
    pub based: SurfacePath<T>,
}

/// Product of integer powers of loops, by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word(pub Vec<(usize, i64)>);

#[derive(Clone, Debug)]
pub struct LoopSystem<T: Real> {
    pub basepoint: (C<T>, C<T>),
    pub candidates: Vec<Candidate<T>>,
    pub candidate_intersections: Vec<Vec<i64>>,
    /// Row `i` gives `alpha'_i` in terms of the candidates.
    pub coefficients: Vec<Vec<i64>>,
    pub alpha_prime: Vec<SurfacePath<T>>,
    pub beta_q: SurfacePath<T>,
    pub ramification_q: usize,
    /// Intersection matrix of the `alpha'_i` (should be `J`).
    pub intersection: Vec<Vec<i64>>,
    pub m: Vec<i64>,
    pub n: usize,
    pub winding_alpha_prime: Vec<C<T>>,
    pub winding_beta: C<T>,
    pub genus: usize,
}

fn frac(k: usize, salt: f64) -> f64 {
    let g = 0.618_033_988_749_894_9_f64;
    ((k as f64 + 1.0) * g + salt).fract()
}

/// Branch point indices sorted by angle about the centroid.
pub fn angular_order<T: Real>(branch: &[C<T>]) -> Vec<usize> {
    let n = T::from_usize(branch.len()).unwrap();
    let centroid = branch.iter().fold(c(T::zero(), T::zero()), |a, b| a + *b) / n;
    let mut idx: Vec<usize> = (0..branch.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = ((branch[i] - centroid).arg(), (branch[j] - centroid).arg());
        a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}

/// Arcs of the figure-eight around `(ea, eb)`; starts and ends at
/// `ea + rho u exp(i delta)`.
pub fn figure_eight<T: Real>(ea: C<T>, eb: C<T>, rho: T, delta: T) -> Vec<Arc<T>> {
    let u = (eb - ea) / (eb - ea).norm();
    let rot = |th: T| c(th.cos(), th.sin());
    let pi = T::PI();
    let a1 = ea + u * rot(delta) * rho;
    let b1 = eb + u * rot(pi + delta) * rho;
    let b2 = eb + u * rot(pi - delta) * rho;
    let a2 = ea + u * rot(-delta) * rho;
    let sweep = T::TAU() - delta * T::lit(2.0);
    vec![
        Arc::Segment { a: a1, b: b1 },
        Arc::circle_from(eb, b1, sweep),
        Arc::Segment { a: b2, b: a2 },
        Arc::circle_from(ea, a2, -sweep),
    ]
}

fn reverse_arcs<T: Real>(arcs: &[Arc<T>]) -> Vec<Arc<T>> {
    arcs.iter().rev().map(|a| a.reversed().expect("tail arcs are reversible")).collect()
}

pub struct LoopBuilder<'a, T: Real> {
    pub model: &'a CurveModel<T>,
    pub f: &'a RationalFunction<T>,
    pub p: (C<T>, C<T>),
    pub q: PointOnCurve<T>,
    pub r: PointOnCurve<T>,
    pub n_div: usize,
    pub opts: LoopOptions<T>,
}

impl<'a, T: Real> LoopBuilder<'a, T> {
    fn clearance(&self) -> NumResult<T> {
        Ok(self.opts.clearance_fraction * self.model.min_branch_separation()?)
    }

    /// Points the routes must avoid.
    fn obstacles(&self) -> NumResult<Vec<C<T>>> {
        let mut obs: Vec<C<T>> = self.model.branch_points()?.to_vec();
        for pt in [&self.q, &self.r] {
            if let Some((x, _)) = pt.xy() {
                if !obs.iter().any(|o| (*o - x).norm() < T::lit(1e-12)) {
                    obs.push(x);
                }
            }
        }
        Ok(obs)
    }

    fn candidate(&self, a: usize, b: usize, shift: usize, index: usize) -> NumResult<Candidate<T>> {
        let branch = self.model.branch_points()?;
        let sep = self.model.min_branch_separation()?;
        let v = self.opts.variant;
        let salt = 0.37 * v as f64;
        let rho_scale = if v == 0 { 1.0 } else { 0.85 };
        let delta_scale = if v == 0 { 1.0 } else { 1.2 };
        let rho = self.opts.rho_fraction * sep * T::lit(rho_scale * (0.6 + 0.4 * frac(index, salt)));
        let delta = self.opts.lane_angle * T::lit(delta_scale * (0.6 + 0.4 * frac(index, salt + 0.5)));
        let (ea, eb) = (branch[a], branch[b]);
        let loop_arcs = figure_eight(ea, eb, rho, delta);
        let a1 = loop_arcs[0].start();
        let obstacles = self.obstacles()?;
        let tail = route(self.p.0, a1, &obstacles, rho * T::lit(0.5))?;
        let circle = Arc::circle_from(ea, a1, T::TAU() * T::from_usize(shift).unwrap());
        let back = Arc::circle_from(ea, a1, -T::TAU() * T::from_usize(shift).unwrap());
        let mut arcs = tail.clone();
        if shift > 0 {
            arcs.push(circle);
        }
        let first_loop = arcs.len();
        arcs.extend(loop_arcs.iter().cloned());
        if shift > 0 {
            arcs.push(back);
        }
        arcs.extend(reverse_arcs(&tail));
        let based = SurfacePath::continue_arcs(self.model, &arcs, self.p.1, self.clearance()?)?;
        if !based.is_closed(T::lit(1e-9)) {
            return Err(NumError::Topology("candidate loop does not close on the base sheet".into()));
        }
        let cycle = SurfacePath { segments: based.segments[first_loop..first_loop + loop_arcs.len()].to_vec() };
        if !cycle.is_closed(T::lit(1e-9)) {
            return Err(NumError::Topology(format!("figure-eight around ({a}, {b}) does not close")));
        }
        Ok(Candidate { pair: (a, b), shift, rho, delta, cycle, based })
    }

    fn winding(&self, path: &SurfacePath<T>) -> NumResult<C<T>> {
        let w = line_integrals(path, &[DifferentialForm::Dlog(self.f.clone())], &ChenOptions::default())?;
        Ok(w[0] / c(T::zero(), T::TAU()))
    }

    fn round(&self, w: C<T>, what: &str) -> NumResult<i64> {
        let r = w.re.round();
        if (w - c(r, T::zero())).norm() > self.opts.winding_tol {
            return Err(NumError::Topology(format!("winding of f along {what} is not an integer: {w}")));
        }
        Ok(r.to_i64().unwrap())
    }

    /// Small loop around `Q` based at `P`, traversed so that it encircles
    /// `Q` once on the curve.
    fn beta_q(&self) -> NumResult<(SurfacePath<T>, usize)> {
        let (xq, yq) = self.q.xy().ok_or_else(|| NumError::Unsupported("Q at infinity".into()))?;
        let s = self.model.sup()?;
        let sep = self.model.min_branch_separation()?;
        let q_is_branch = self.model.branch_index(xq, T::lit(1e-9) * sep).is_some();
        let e_q = if q_is_branch { s.n } else { 1 };
        let obstacles = self.obstacles()?;
        let near = obstacles
            .iter()
            .filter(|o| (**o - xq).norm() > T::lit(1e-12))
            .fold(T::infinity(), |m, o| m.min((*o - xq).norm()));
        let r_q = (near * T::lit(0.3)).min(sep * self.opts.rho_fraction);
        let dir = self.p.0 - xq;
        if dir.norm() <= r_q {
            return Err(NumError::Precondition("P lies too close to Q".into()));
        }
        let start = xq + dir / dir.norm() * r_q;
        let clearance = self.clearance()?;
        let circle = Arc::circle_from(xq, start, T::TAU() * T::from_usize(e_q).unwrap());
        let expected = if q_is_branch {
            None
        } else {
            // Q's own branch near xq, continued along the radius.
            let mut acc = c(T::zero(), T::zero());
            for e in &s.branch_points {
                acc += ((start - *e) / (xq - *e)).ln();
            }
            Some(yq * (acc / T::from_usize(s.n).unwrap()).exp())
        };
        let on_sheet = |y: C<T>| expected.is_none_or(|e| (y - e).norm() <= T::lit(1e-6) * (T::one() + e.norm()));
        // Direct tail first; otherwise detour around the branch point nearest
        // to P, circling it until Q's sheet is reached.
        let tail = route(self.p.0, start, &obstacles, r_q * T::lit(0.5))?;
        let probe = SurfacePath::continue_arcs(self.model, &tail, self.p.1, clearance)?;
        let mut chosen = None;
        if on_sheet(probe.end().unwrap().1) {
            chosen = Some(tail);
        } else {
            let branch = &s.branch_points;
            let eb = branch
                .iter()
                .copied()
                .filter(|e| (*e - xq).norm() > T::lit(1e-9))
                .min_by(|a, b| (*a - self.p.0).norm().partial_cmp(&(*b - self.p.0).norm()).unwrap())
                .ok_or_else(|| NumError::Basis("no branch point for the sheet detour".into()))?;
            let rho = sep * self.opts.rho_fraction * T::lit(0.5);
            let w = eb + (self.p.0 - eb) / (self.p.0 - eb).norm() * rho;
            for j in 1..s.n {
                let mut arcs = route(self.p.0, w, &obstacles, rho * T::lit(0.5))?;
                arcs.push(Arc::circle_from(eb, w, T::TAU() * T::from_usize(j).unwrap()));
                arcs.extend(route(w, start, &obstacles, rho * T::lit(0.5))?);
                let probe = SurfacePath::continue_arcs(self.model, &arcs, self.p.1, clearance)?;
                if on_sheet(probe.end().unwrap().1) {
                    chosen = Some(arcs);
                    break;
                }
            }
        }
        let tail = chosen.ok_or_else(|| NumError::Basis("could not reach the sheet of Q".into()))?;
        let mut arcs = tail.clone();
        arcs.push(circle);
        arcs.extend(reverse_arcs(&tail));
        let path = SurfacePath::continue_arcs(self.model, &arcs, self.p.1, clearance)?;
        Ok((path, e_q))
    }

    pub fn build(&self) -> NumResult<LoopSystem<T>> {
        let s = self.model.sup()?;
        let g = s.genus;
        let order = angular_order(&s.branch_points);
        let mut pairs: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        let mut attempt = 0;
        loop {
            let mut candidates = Vec::new();
            for &(a, b) in &pairs {
                for shift in 0..s.n - 1 {
                    let idx = candidates.len();
                    candidates.push(self.candidate(a, b, shift, idx)?);
                }
            }
            let mcount = candidates.len();
            let mut kmat = vec![vec![0i64; mcount]; mcount];
            for i in 0..mcount {
                for j in i + 1..mcount {
                    let v = intersection_number(&candidates[i].cycle, &candidates[j].cycle)?;
                    kmat[i][j] = v;
                    kmat[j][i] = -v;
                }
            }
            let (basis, _radical) = symplectic_basis(&kmat)?;
            if basis.len() < 2 * g {
                if attempt == 0 && order.len() > 2 {
                    pairs.push((order[order.len() - 1], order[0]));
                    attempt += 1;
                    continue;
                }
                return Err(NumError::Basis(format!(
                    "candidate cycles span rank {} but 2g = {}; intersection matrix {:?}",
                    basis.len(),
                    2 * g,
                    kmat
                )));
            }
            if basis.len() > 2 * g {
                return Err(NumError::Basis(format!(
                    "intersection form has rank {} > 2g = {}; matrix {:?}",
                    basis.len(),
                    2 * g,
                    kmat
                )));
            }
            return self.finish(candidates, kmat, basis);
        }
    }

    fn finish(&self, candidates: Vec<Candidate<T>>, kmat: Vec<Vec<i64>>, basis: Vec<Vec<i64>>) -> NumResult<LoopSystem<T>> {
        let g = basis.len() / 2;
        let mut alpha_prime = Vec::new();
        for row in &basis {
            alpha_prime.push(materialize(self.model, &candidates.iter().map(|c| &c.based).collect::<Vec<_>>(), row)?);
        }
        let m = basis.len();
        let mut inter = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut s = 0;
                for (a, ra) in basis[i].iter().enumerate() {
                    for (b, rb) in basis[j].iter().enumerate() {
                        s += ra * kmat[a][b] * rb;
                    }
                }
                inter[i][j] = s;
            }
        }
        let (beta_q, e_q) = self.beta_q()?;
        let wb = self.winding(&beta_q)?;
        let nb = self.round(wb, "beta_Q")?;
        if nb != self.n_div as i64 {
            return Err(NumError::Topology(format!("winding of f along beta_Q is {nb}, expected N = {}", self.n_div)));
        }
        let mut ms = Vec::new();
        let mut wa = Vec::new();
        for (i, a) in alpha_prime.iter().enumerate() {
            let w = self.winding(a)?;
            ms.push(self.round(w, &format!("alpha'_{}", i + 1))?);
            wa.push(w);
        }
        Ok(LoopSystem {
            basepoint: self.p,
            candidates,
            candidate_intersections: kmat,
            coefficients: basis,
            alpha_prime,
            beta_q,
            ramification_q: e_q,
            intersection: inter,
            m: ms,
            n: self.n_div,
            winding_alpha_prime: wa,
            winding_beta: wb,
            genus: g,
        })
    }
}

/// Concatenation `prod_k loops[k]^coeffs[k]` (in index order).
pub fn materialize<T: Real>(model: &CurveModel<T>, loops: &[&SurfacePath<T>], coeffs: &[i64]) -> NumResult<SurfacePath<T>> {
    let mut out = SurfacePath::empty();
    for (k, &e) in coeffs.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let piece = if e > 0 { loops[k].clone() } else { loops[k].reversed(model)? };
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&piece);
        }
    }
    Ok(out)
}

impl<T: Real> LoopSystem<T> {
    /// `alpha_i = alpha'_i^N beta_Q^(-m_i)` as an explicit path.
    pub fn alpha(&self, model: &CurveModel<T>, i: usize) -> NumResult<SurfacePath<T>> {
        materialize(model, &[&self.alpha_prime[i], &self.beta_q], &[self.n as i64, -self.m[i]])
    }

    pub fn is_standard_symplectic(&self) -> bool {
        let g = self.genus;
        (0..2 * g).all(|i| {
            (0..2 * g).all(|j| {
                let want = if j == i + g && i < g {
                    1
                } else if i == j + g && j < g {
                    -1
                } else {
                    0
                };
                self.intersection[i][j] == want
            })
        })
    }
}

/// Continuous `log f` along a loop, sampled at the segment checkpoints, by
/// unwrapping the principal argument between closely spaced samples.
/// Requires `f(start) = 1`-normalization to give value 0 at the start, and
/// returns the samples `(x, log f)`.
pub fn log_f_branch<T: Real>(
    path: &SurfacePath<T>,
    f: &RationalFunction<T>,
    winding: C<T>,
    tol: T,
) -> NumResult<Vec<(C<T>, C<T>)>> {
    if winding.norm() > tol {
        return Err(NumError::Precondition(format!("loop has f-winding {winding}; log f does not close")));
    }
    let mut out = Vec::new();
    let Some((x0, y0)) = path.start() else { return Ok(out) };
    let f0 = f.eval(x0, y0)?;
    let mut acc = f0.ln();
    let mut prev = f0;
    out.push((x0, acc));
    for s in &path.segments {
        let m = 64usize;
        for k in 1..=m {
            let t = T::from_usize(k).unwrap() / T::from_usize(m).unwrap();
            let q = s.point(t)?;
            let v = f.eval(q.x, q.y)?;
            let step = (v / prev).ln();
            if step.im.abs() > T::lit(1.5) {
                return Err(NumError::Tracing("log f jumps between samples; refine the loop".into()));
            }
            acc += step;
            prev = v;
            out.push((q.x, acc));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;
    use crate::curve::root_of_unity;
    use crate::scalar::cl;

    #[test]
    fn genus_two_loop_system() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let mut f = RationalFunction::new(parse_poly("x - 1").unwrap(), parse_poly("x - zeta(5,1)").unwrap()).unwrap();
        let p = (cl(0.0, 0.0), cl(0.0, 1.0));
        f.normalize_at(p.0, p.1).unwrap();
        let b = LoopBuilder {
            model: &m,
            f: &f,
            p,
            q: PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0)),
            r: PointOnCurve::affine(root_of_unity(5, 1), cl(0.0, 0.0)),
            n_div: 2,
            opts: LoopOptions::default(),
        };
        let ls = b.build().unwrap();
        assert!(ls.is_standard_symplectic(), "{:?}", ls.intersection);
        assert_eq!(ls.alpha_prime.len(), 4);
        for i in 0..4 {
            let a = ls.alpha(&m, i).unwrap();
            assert!(a.is_closed(1e-9));
            let w = b.winding(&a).unwrap();
            assert!(w.norm() < 1e-8, "{w}");
            let lg = log_f_branch(&a, &f, w, 1e-6).unwrap();
            assert!(lg.last().unwrap().1.norm() < 1e-8);
        }
        assert!(log_f_branch(&ls.beta_q, &f, ls.winding_beta, 1e-6).is_err());
    }

    #[test]
    fn fermat_cubic_loop_system() {
        let m = CurveModel::<f64>::fermat(3).unwrap();
        let mut f = RationalFunction::new(parse_poly("y - 1").unwrap(), parse_poly("x - 1").unwrap()).unwrap();
        let u = 2f64.powf(-1.0 / 3.0);
        let p = (cl(u, 0.0), cl(u, 0.0));
        f.normalize_at(p.0, p.1).unwrap();
        let b = LoopBuilder {
            model: &m,
            f: &f,
            p,
            q: PointOnCurve::affine(cl(0.0, 0.0), cl(1.0, 0.0)),
            r: PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0)),
            n_div: 3,
            opts: LoopOptions::default(),
        };
        let ls = b.build().unwrap();
        assert!(ls.is_standard_symplectic(), "{:?}", ls.intersection);
        assert_eq!(ls.ramification_q, 1);
        for i in 0..2 {
            let a = ls.alpha(&m, i).unwrap();
            assert!(b.winding(&a).unwrap().norm() < 1e-8);
        }
    }
}
