//! Open paths from the base point to a given point of the curve.

use super::arc::Arc;
use super::route::route;
use super::surface::SurfacePath;
use crate::curve::{CurveModel, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{Real, C};

/// Sheet-tracked path from `base` to `target`. Branch-point targets are
/// entered along a `ToBranch` arc; for other targets the route detours
/// around a nearby branch point until it arrives on the sheet of `target`.
pub fn path_to_point<T: Real>(
    model: &CurveModel<T>,
    base: (C<T>, C<T>),
    target: &PointOnCurve<T>,
    extra_obstacles: &[C<T>],
    clearance_fraction: T,
) -> NumResult<SurfacePath<T>> {
    let (xt, yt) = target.xy().ok_or_else(|| NumError::Unsupported("paths to points at infinity".into()))?;
    let s = model.sup()?;
    let sep = model.min_branch_separation()?;
    let clearance = clearance_fraction * sep;
    let mut obstacles: Vec<C<T>> = s.branch_points.clone();
    for o in extra_obstacles {
        if (*o - xt).norm() > T::lit(1e-12) && !obstacles.iter().any(|b| (*b - *o).norm() < T::lit(1e-12)) {
            obstacles.push(*o);
        }
    }
    let near = |x: C<T>| {
        obstacles.iter().filter(|o| (**o - x).norm() > T::lit(1e-12)).fold(T::infinity(), |m, o| m.min((*o - x).norm()))
    };
    if (base.0 - xt).norm() < T::lit(1e-14) && (base.1 - yt).norm() < T::lit(1e-12) {
        return Ok(SurfacePath::empty());
    }
    if let Some(j) = model.branch_index(xt, T::lit(1e-9) * sep) {
        let e = s.branch_points[j];
        let rho = near(e).min((base.0 - e).norm()) * T::lit(0.3);
        let dir = base.0 - e;
        let from = e + dir / dir.norm() * rho;
        let mut arcs = route(base.0, from, &obstacles, rho * T::lit(0.5))?;
        arcs.push(Arc::ToBranch { e, from, n: s.n });
        return SurfacePath::continue_arcs(model, &arcs, base.1, clearance);
    }
    let on_sheet = |p: &SurfacePath<T>| p.end().is_some_and(|(_, y)| (y - yt).norm() <= T::lit(1e-6) * (T::one() + yt.norm()));
    let rho = near(xt).min(near(base.0)) * T::lit(0.4);
    let direct = route(base.0, xt, &obstacles, rho)?;
    let probe = SurfacePath::continue_arcs(model, &direct, base.1, clearance)?;
    if on_sheet(&probe) {
        return Ok(probe);
    }
    let mut order: Vec<C<T>> = s.branch_points.clone();
    order.sort_by(|a, b| (*a - base.0).norm().partial_cmp(&(*b - base.0).norm()).unwrap_or(std::cmp::Ordering::Equal));
    for eb in order {
        let r = (sep * T::lit(0.15)).min((base.0 - eb).norm() * T::lit(0.5));
        let w = eb + (base.0 - eb) / (base.0 - eb).norm() * r;
        for k in 1..s.n {
            let mut arcs = route(base.0, w, &obstacles, r * T::lit(0.5))?;
            arcs.push(Arc::circle_from(eb, w, T::TAU() * T::from_usize(k).unwrap()));
            arcs.extend(route(w, xt, &obstacles, r * T::lit(0.5))?);
            let p = SurfacePath::continue_arcs(model, &arcs, base.1, clearance)?;
            if on_sheet(&p) {
                return Ok(p);
            }
        }
    }
    Err(NumError::Basis(format!("could not reach the sheet of {target}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn reaches_other_sheet() {
        let m = CurveModel::<f64>::fermat(3).unwrap();
        let base = (cl(2f64.powf(-1.0 / 3.0), 0.0), cl(2f64.powf(-1.0 / 3.0), 0.0));
        for y in m.y_values(cl(0.0, 0.3)).unwrap() {
            let t = PointOnCurve::affine(cl(0.0, 0.3), y);
            let p = path_to_point(&m, base, &t, &[], 1e-3).unwrap();
            let (xe, ye) = p.end().unwrap();
            assert!((xe - cl(0.0, 0.3)).norm() < 1e-12 && (ye - y).norm() < 1e-9);
        }
        let q = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let p = path_to_point(&m, base, &q, &[], 1e-3).unwrap();
        assert!(p.end().unwrap().1.norm() < 1e-9);
    }
}
