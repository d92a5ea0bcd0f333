//! Surface integrals over the curve, written as integrals over the x-plane
//! summed over sheets, in log-polar coordinates `x = c + exp(rho + i theta)`.

use crate::curve::forms::{DifferentialForm, PathPoint};
use crate::curve::CurveModel;
use crate::error::{NumError, NumResult};
use crate::quadrature::{cubature_vec, CubatureOptions, Rect};
use crate::scalar::dense::CMat;
use crate::scalar::{c, czero, Real, C};

/// Breakpoints covering `[lo, hi]` that include every `marks` entry and are
/// at most `gap` apart.
pub fn breakpoints<T: Real>(lo: T, hi: T, marks: &[T], gap: T) -> Vec<T> {
    let mut pts: Vec<T> = marks.iter().copied().filter(|m| *m >= lo && *m <= hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-12) * (T::one() + b.abs()));
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let k = ((w[1] - w[0]) / gap).ceil().to_usize().unwrap_or(1).max(1);
        for j in 1..=k {
            out.push(w[0] + (w[1] - w[0]) * T::from_usize(j).unwrap() / T::from_usize(k).unwrap());
        }
    }
    out
}

/// Log-polar grid around `center` with the given singular points on cell
/// corners; the angular range is `[theta0, theta0 + 2 pi]`, by default
/// starting at the first singular point. Returns `(cells, singular points
/// in (rho, theta))`.
pub fn polar_grid<T: Real>(
    center: C<T>,
    singular: &[C<T>],
    rho_below: T,
    rho_above: T,
    theta0: Option<T>,
) -> (Vec<Rect<T>>, Vec<(T, T)>) {
    let rhos: Vec<T> = singular.iter().map(|e| (*e - center).norm().ln()).collect();
    let thetas: Vec<T> = singular.iter().map(|e| (*e - center).arg()).collect();
    let rmin = rhos.iter().copied().fold(T::zero(), T::min) - rho_below;
    let rmax = rhos.iter().copied().fold(T::zero(), T::max) + rho_above;
    let th0 = theta0.unwrap_or_else(|| thetas.first().copied().unwrap_or(-T::PI()));
    let mut th_marks = Vec::new();
    for t in &thetas {
        let mut u = *t;
        while u < th0 {
            u += T::TAU();
        }
        th_marks.push(u);
    }
    let rg = breakpoints(rmin, rmax, &rhos, T::one());
    let tg = breakpoints(th0, th0 + T::TAU(), &th_marks, T::FRAC_PI_4());
    let mut cells = Vec::new();
    for i in 0..rg.len() - 1 {
        for j in 0..tg.len() - 1 {
            cells.push(Rect { x0: rg[i], x1: rg[i + 1], y0: tg[j], y1: tg[j + 1] });
        }
    }
    let mut sing = Vec::new();
    for (r, t) in rhos.iter().zip(&th_marks) {
        sing.push((*r, *t));
        if (*t - th0).abs() < T::lit(1e-12) {
            sing.push((*r, *t + T::TAU()));
        }
    }
    (cells, sing)
}

/// A point of the x-plane away from the branch points, used as the polar
/// center.
pub fn plane_center<T: Real>(model: &CurveModel<T>) -> NumResult<C<T>> {
    let b = model.branch_points()?;
    let sep = model.min_branch_separation()?;
    let mut ctr = b.iter().fold(czero::<T>(), |s, e| s + *e) / T::from_usize(b.len().max(1)).unwrap();
    for k in 0..16 {
        if b.iter().all(|e| (*e - ctr).norm() > sep * T::lit(0.2)) {
            return Ok(ctr);
        }
        let th = T::lit(0.7 + 1.3 * k as f64);
        ctr += c(th.cos(), th.sin()) * (sep * T::lit(0.37));
    }
    Err(NumError::Degenerate("no polar center away from the branch points".into()))
}

/// `H_kl = int_C conj(omega_k) ^ omega_l = 2i int sum_sheets conj(g_k) g_l dA`
/// for forms `omega = g dx`.
pub fn hermitian_raw<T: Real>(model: &CurveModel<T>, forms: &[DifferentialForm<T>], opts: &CubatureOptions<T>) -> NumResult<CMat<T>> {
    let g = forms.len();
    let ctr = plane_center(model)?;
    let branch = model.branch_points()?.to_vec();
    let (cells, sing) = polar_grid(ctr, &branch, T::lit(12.0), T::lit(36.0), None);
    let eq_x = model.equation.dx();
    let eq_y = model.equation.dy();
    let mut failure: Option<NumError> = None;
    let (vals, _, _) = cubature_vec(
        |rho, theta| {
            let e = rho.exp();
            let x = ctr + c(e * theta.cos(), e * theta.sin());
            let mut out = vec![czero(); g * g];
            let ys = match model.y_values(x) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    return out;
                }
            };
            for y in ys {
                let dy = -eq_x.eval(x, y) / eq_y.eval(x, y);
                let p = PathPoint { x, y, dx: C::new(T::one(), T::zero()), dy };
                let gv: Vec<C<T>> = forms.iter().map(|w| w.pullback(&p).unwrap_or(czero())).collect();
                for k in 0..g {
                    for l in 0..g {
                        out[k * g + l] += gv[k].conj() * gv[l];
                    }
                }
            }
            let w = c(T::zero(), T::lit(2.0) * e * e);
            out.iter_mut().for_each(|z| *z *= w);
            out
        },
        g * g,
        &cells,
        &sing,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((0..g).map(|k| vals[k * g..(k + 1) * g].to_vec()).collect())
}
