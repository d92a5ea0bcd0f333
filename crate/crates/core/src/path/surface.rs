//! Sheet-tracked paths on `y^n = p(x)`.
//!
//! Along an arc avoiding the branch points `e_j`,
//! `y(t) = y(0) * prod_j ((x(t) - e_j) / (x(0) - e_j))^(1/n)` where every
//! factor is continued continuously. Checkpoints are placed so that each
//! factor turns by less than a quarter turn between consecutive ones; between
//! checkpoints principal logarithms are then exact.

use super::arc::Arc;
use crate::curve::forms::PathPoint;
use crate::curve::CurveModel;
use crate::error::{NumError, NumResult};
use crate::scalar::{czero, Real, C};

/// Anything that can be evaluated piecewise as a path on the curve.
pub trait CurvePath<T: Real> {
    fn piece_count(&self) -> usize;
    /// Point and velocity at local parameter `t` in `[0, 1]` of a piece.
    fn point(&self, piece: usize, t: T) -> NumResult<PathPoint<T>>;
}

#[derive(Clone, Debug)]
pub struct Segment<T: Real> {
    pub arc: Arc<T>,
    pub y_start: C<T>,
    pub y_end: C<T>,
    n: usize,
    branch: Vec<C<T>>,
    /// Index of the branch point the arc ends on (`ToBranch` arcs).
    target: Option<usize>,
    ck_t: Vec<T>,
    ck_x: Vec<C<T>>,
    ck_s: Vec<C<T>>,
    pub max_residual: T,
}

fn nf<T: Real>(n: usize) -> T {
    T::from_usize(n).unwrap()
}

impl<T: Real> Segment<T> {
    /// Continues `y` along `arc` from `y_start`. Fails if the arc comes
    /// within `clearance` of a branch point it does not end on.
    pub fn continue_along(model: &CurveModel<T>, arc: Arc<T>, y_start: C<T>, clearance: T) -> NumResult<Self> {
        let s = model.sup()?;
        let branch = s.branch_points.clone();
        let target = match arc {
            Arc::ToBranch { e, .. } => Some(
                model
                    .branch_index(e, T::lit(1e-12) * (T::one() + e.norm()))
                    .ok_or_else(|| NumError::Precondition("ToBranch arc does not end on a branch point".into()))?,
            ),
            _ => None,
        };
        for (j, e) in branch.iter().enumerate() {
            if Some(j) != target && arc.distance_to(*e) < clearance {
                return Err(NumError::Clearance(format!(
                    "arc from {} to {} passes within {:e} of branch point {}",
                    arc.start(),
                    arc.end(),
                    arc.distance_to(*e).to_f64().unwrap_or(0.0),
                    e
                )));
            }
        }
        let mut seg = Segment {
            arc,
            y_start,
            y_end: y_start,
            n: s.n,
            branch,
            target,
            ck_t: vec![T::zero()],
            ck_x: Vec::new(),
            ck_s: vec![czero()],
            max_residual: T::zero(),
        };
        seg.ck_x.push(seg.arc.x(T::zero()));
        let mut t = T::zero();
        let quarter = T::FRAC_PI_4();
        while t < T::one() {
            let x = seg.arc.x(t);
            let dx = seg.arc.dx(t).norm();
            let dist = seg
                .branch
                .iter()
                .enumerate()
                .filter(|(j, _)| Some(*j) != seg.target)
                .fold(T::infinity(), |m, (_, e)| m.min((x - *e).norm()));
            // Keep the turn of each factor below a quarter turn.
            let mut h = if dx > T::zero() { quarter * dist / dx } else { T::one() };
            h = h.min(T::lit(0.125)).max(T::lit(1e-9));
            let t1 = (t + h).min(T::one());
            let k = seg.ck_t.len() - 1;
            let s1 = seg.ck_s[k] + seg.log_increment(k, seg.arc.x(t1));
            seg.ck_t.push(t1);
            seg.ck_x.push(seg.arc.x(t1));
            seg.ck_s.push(s1);
            t = t1;
        }
        // Residual check at the checkpoints.
        let p = &s.p;
        for k in 0..seg.ck_t.len() {
            let pt = seg.point(seg.ck_t[k])?;
            let pv = p.eval(pt.x);
            let scale = pv.norm().max(pt.y.norm().powi(s.n as i32)).max(T::min_positive_value());
            let r = (pt.y.powu(s.n as u32) - pv).norm() / scale;
            if seg.target.is_none() || seg.ck_t[k] < T::one() {
                seg.max_residual = seg.max_residual.max(r);
            }
        }
        if seg.max_residual > T::lit(1e-10) {
            return Err(NumError::StepUnderflow(format!("continuation residual {:e}", seg.max_residual.to_f64().unwrap())));
        }
        seg.y_end = seg.point(T::one())?.y;
        Ok(seg)
    }

    fn log_increment(&self, k: usize, x: C<T>) -> C<T> {
        let xk = self.ck_x[k];
        let mut acc = czero::<T>();
        for (j, e) in self.branch.iter().enumerate() {
            if Some(j) == self.target {
                continue;
            }
            acc += ((x - *e) / (xk - *e)).ln();
        }
        acc
    }

    fn checkpoint_before(&self, t: T) -> usize {
        match self.ck_t.binary_search_by(|a| a.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(self.ck_t.len() - 1)
    }

    pub fn point(&self, t: T) -> NumResult<PathPoint<T>> {
        let x = self.arc.x(t);
        let dx = self.arc.dx(t);
        let k = self.checkpoint_before(t);
        let s = self.ck_s[k] + self.log_increment(k, x);
        let e = (s / nf::<T>(self.n)).exp();
        let mut sum = czero::<T>();
        for (j, b) in self.branch.iter().enumerate() {
            if Some(j) != self.target {
                sum += dx / (x - *b);
            }
        }
        sum = sum / nf::<T>(self.n);
        match self.target {
            None => {
                let y = self.y_start * e;
                Ok(PathPoint { x, y, dx, dy: y * sum })
            }
            Some(_) => {
                // y = y_start (1 - t) E(t) with E continued over the other
                // branch points.
                let u = T::one() - t;
                let y = self.y_start * e * u;
                let dy = self.y_start * e * (sum * u - T::one());
                Ok(PathPoint { x, y, dx, dy })
            }
        }
    }
}

/// A concatenation of continued segments.
#[derive(Clone, Debug)]
pub struct SurfacePath<T: Real> {
    pub segments: Vec<Segment<T>>,
}

impl<T: Real> SurfacePath<T> {
    /// Continues along `arcs` starting from `(x0, y0)`; consecutive arcs
    /// must join in the x-plane.
    pub fn continue_arcs(model: &CurveModel<T>, arcs: &[Arc<T>], y0: C<T>, clearance: T) -> NumResult<Self> {
        let mut segments: Vec<Segment<T>> = Vec::with_capacity(arcs.len());
        let mut y = y0;
        for (i, a) in arcs.iter().enumerate() {
            if i > 0 {
                let gap = (arcs[i - 1].end() - a.start()).norm();
                if gap > T::lit(1e-9) * (T::one() + a.start().norm()) {
                    return Err(NumError::Precondition(format!("arcs {} and {} do not join (gap {gap})", i - 1, i)));
                }
            }
            let seg = Segment::continue_along(model, a.clone(), y, clearance)?;
            y = seg.y_end;
            segments.push(seg);
        }
        Ok(SurfacePath { segments })
    }

    pub fn empty() -> Self {
        SurfacePath { segments: Vec::new() }
    }

    pub fn start(&self) -> Option<(C<T>, C<T>)> {
        self.segments.first().map(|s| (s.arc.start(), s.y_start))
    }

    pub fn end(&self) -> Option<(C<T>, C<T>)> {
        self.segments.last().map(|s| (s.arc.end(), s.y_end))
    }

    /// Closed on the curve: returns to the starting point and sheet.
    pub fn is_closed(&self, tol: T) -> bool {
        match (self.start(), self.end()) {
            (Some((x0, y0)), Some((x1, y1))) => {
                (x0 - x1).norm() <= tol * (T::one() + x0.norm()) && (y0 - y1).norm() <= tol * (T::one() + y0.norm())
            }
            _ => true,
        }
    }

    pub fn arcs(&self) -> Vec<Arc<T>> {
        self.segments.iter().map(|s| s.arc.clone()).collect()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        SurfacePath { segments }
    }

    /// The reverse path, recontinued from the end point.
    pub fn reversed(&self, model: &CurveModel<T>) -> NumResult<Self> {
        let Some((_, y_end)) = self.end() else { return Ok(Self::empty()) };
        let arcs: Vec<Arc<T>> = self
            .segments
            .iter()
            .rev()
            .map(|s| s.arc.reversed().ok_or_else(|| NumError::Unsupported("cannot reverse a path ending on a branch point".into())))
            .collect::<NumResult<_>>()?;
        Self::continue_arcs(model, &arcs, y_end, T::zero())
    }

    pub fn max_residual(&self) -> T {
        self.segments.iter().fold(T::zero(), |m, s| m.max(s.max_residual))
    }

    pub fn length(&self) -> T {
        self.segments.iter().fold(T::zero(), |m, s| m + s.arc.length())
    }

    /// Sampled polyline `(x, y)` with `per_segment` points per segment.
    pub fn sample(&self, per_segment: usize) -> NumResult<Vec<(C<T>, C<T>)>> {
        let mut out = Vec::new();
        for s in &self.segments {
            for k in 0..per_segment {
                let t = T::from_usize(k).unwrap() / T::from_usize(per_segment).unwrap();
                let p = s.point(t)?;
                out.push((p.x, p.y));
            }
        }
        if let Some((x, y)) = self.end() {
            out.push((x, y));
        }
        Ok(out)
    }
}

impl<T: Real> CurvePath<T> for SurfacePath<T> {
    fn piece_count(&self) -> usize {
        self.segments.len()
    }

    fn point(&self, piece: usize, t: T) -> NumResult<PathPoint<T>> {
        self.segments[piece].point(t)
    }
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
    fn monodromy_around_branch_point() {
        let m = genus2();
        let x0 = cl(1.1, 0.0);
        let y0 = m.y_values(x0).unwrap()[0];
        let arc = Arc::circle_from(cl(1.0, 0.0), x0, std::f64::consts::TAU);
        let p = SurfacePath::continue_arcs(&m, &[arc], y0, 1e-3).unwrap();
        let (_, y1) = p.end().unwrap();
        assert!((y1 + y0).norm() < 1e-12);
        // Around a non-branch point the sheet returns.
        let arc = Arc::circle_from(cl(0.0, 0.0), cl(0.3, 0.0), std::f64::consts::TAU);
        let y0 = m.y_values(cl(0.3, 0.0)).unwrap()[1];
        let p = SurfacePath::continue_arcs(&m, &[arc], y0, 1e-3).unwrap();
        assert!((p.end().unwrap().1 - y0).norm() < 1e-12);
        // A constant arc keeps the sheet.
        let arc = Arc::Segment { a: cl(0.3, 0.0), b: cl(0.3, 0.0) };
        let p = SurfacePath::continue_arcs(&m, &[arc], y0, 1e-3).unwrap();
        assert!((p.end().unwrap().1 - y0).norm() < 1e-15);
    }

    #[test]
    fn velocities_and_branch_endpoints() {
        let m = genus2();
        let x0 = cl(0.4, 0.3);
        let y0 = m.y_values(x0).unwrap()[0];
        let arcs = [
            Arc::Segment { a: x0, b: cl(1.2, 0.5) },
            Arc::circle_from(cl(1.0, 0.0), cl(1.2, 0.5), -4.0),
        ];
        let p = SurfacePath::continue_arcs(&m, &arcs, y0, 1e-3).unwrap();
        for seg in &p.segments {
            for &t in &[0.2, 0.7] {
                let h = 1e-6;
                let a = seg.point(t + h).unwrap();
                let b = seg.point(t - h).unwrap();
                let q = seg.point(t).unwrap();
                assert!(((a.y - b.y) / (2.0 * h) - q.dy).norm() < 1e-5);
                assert!(m.residual(q.x, q.y) < 1e-13);
            }
        }
        let arc = Arc::ToBranch { e: cl(1.0, 0.0), from: cl(0.6, 0.2), n: 2 };
        let y0 = m.y_values(cl(0.6, 0.2)).unwrap()[1];
        let seg = Segment::continue_along(&m, arc, y0, 1e-3).unwrap();
        assert!(seg.y_end.norm() < 1e-14);
        for &t in &[0.3, 0.9, 0.999] {
            let q = seg.point(t).unwrap();
            assert!(m.residual(q.x, q.y) < 1e-12);
            let h = 1e-7;
            let fd = (seg.point(t + h).unwrap().y - seg.point(t - h).unwrap().y) / (2.0 * h);
            assert!((fd - q.dy).norm() < 1e-5);
        }
    }

    #[test]
    fn reversal_returns_along_same_sheet() {
        let m = genus2();
        let x0 = cl(0.2, -0.3);
        let y0 = m.y_values(x0).unwrap()[1];
        let arcs = [Arc::Segment { a: x0, b: cl(1.5, 0.1) }, Arc::circle_from(cl(1.0, 0.0), cl(1.5, 0.1), 2.5)];
        let p = SurfacePath::continue_arcs(&m, &arcs, y0, 1e-3).unwrap();
        let r = p.reversed(&m).unwrap();
        assert!((r.end().unwrap().1 - y0).norm() < 1e-12);
        assert!(m.sup().is_ok());
    }

    #[test]
    fn clearance_is_enforced() {
        let m = genus2();
        let arc = Arc::Segment { a: cl(0.5, 0.0), b: cl(1.5, 0.0) };
        let err = SurfacePath::continue_arcs(&m, &[arc], m.y_values(cl(0.5, 0.0)).unwrap()[0], 1e-3).unwrap_err();
        assert!(matches!(err, NumError::Clearance(_)));
    }
}
