//! `int_{C \ gamma} log f conj(omega_k) ^ omega_l` in the chart `u = f(x)`.
//!
//! For `f` of degree one in `x`, `x = f^-1(u)` is a Mobius map and
//! `gamma` projects to the ray `u in [0, inf]`. In log-polar coordinates
//! `u = exp(rho + i theta)`, `theta in (0, 2 pi)`, the cut sits on the
//! boundary of the rectangle and `log f = rho + i theta + 2 pi i M`.

use crate::curve::forms::{DifferentialForm, PathPoint};
use crate::curve::function::RationalFunction;
use crate::curve::CurveModel;
use crate::error::{NumError, NumResult};
use crate::period::plane::polar_grid;
use crate::quadrature::{cubature_vec, CubatureOptions};
use crate::scalar::dense::CMat;
use crate::scalar::{c, czero, Real, C};

/// `u = s (n1 x + n0) / (d1 x + d0)`.
#[derive(Clone, Copy, Debug)]
pub struct Mobius<T: Real> {
    pub s: C<T>,
    pub n1: C<T>,
    pub n0: C<T>,
    pub d1: C<T>,
    pub d0: C<T>,
}

impl<T: Real> Mobius<T> {
    pub fn from_function(f: &RationalFunction<T>) -> NumResult<Self> {
        let (a, b) = (&f.numerator, &f.denominator);
        if !a.is_x_only() || !b.is_x_only() || a.deg_x() > 1 || b.deg_x() > 1 {
            return Err(NumError::Unsupported(
                "surface integrals need f of degree one in x with no y dependence".into(),
            ));
        }
        let m = Mobius { s: f.scale, n1: a.get(1, 0), n0: a.get(0, 0), d1: b.get(1, 0), d0: b.get(0, 0) };
        if (m.n1 * m.d0 - m.n0 * m.d1).norm() == T::zero() {
            return Err(NumError::Degenerate("f is constant".into()));
        }
        Ok(m)
    }

    pub fn apply(&self, x: C<T>) -> C<T> {
        self.s * (self.n1 * x + self.n0) / (self.d1 * x + self.d0)
    }

    /// `(x, dx/du)` at `u`.
    pub fn inverse(&self, u: C<T>) -> (C<T>, C<T>) {
        let den = u * self.d1 - self.s * self.n1;
        let x = (self.s * self.n0 - u * self.d0) / den;
        let dx = self.s * (self.d0 * self.n1 - self.n0 * self.d1) / (den * den);
        (x, dx)
    }

    /// Image of `x = infinity`, if finite.
    pub fn at_infinity(&self) -> Option<C<T>> {
        (self.d1.norm() > T::zero()).then(|| self.s * self.n1 / self.d1)
    }
}

/// Returns `(L, H, cells)` with `L_kl = int_{C \ gamma} log f conj(w_k) ^ w_l`
/// (lift `M`) and `H_kl = int_C conj(w_k) ^ w_l`.
pub fn log_hermitian_raw<T: Real>(
    model: &CurveModel<T>,
    f: &RationalFunction<T>,
    forms: &[DifferentialForm<T>],
    lift: i64,
    opts: &CubatureOptions<T>,
) -> NumResult<(CMat<T>, CMat<T>, usize)> {
    let mob = Mobius::from_function(f)?;
    let g = forms.len();
    let mut sing: Vec<C<T>> = Vec::new();
    let tiny = T::lit(1e-12);
    for e in model.branch_points()? {
        let den = mob.d1 * *e + mob.d0;
        if den.norm() <= tiny {
            continue;
        }
        let u = mob.apply(*e);
        if u.norm() > tiny && u.norm() < T::lit(1e12) {
            sing.push(u);
        }
    }
    if let Some(u) = mob.at_infinity() {
        if u.norm() > tiny {
            sing.push(u);
        }
    }
    let (cells, sing_rt) = polar_grid(czero(), &sing, T::lit(45.0), T::lit(45.0), Some(T::zero()));
    let eq_x = model.equation.dx();
    let eq_y = model.equation.dy();
    let shift = T::TAU() * T::from_i64(lift).unwrap();
    let mut failure: Option<NumError> = None;
    let (vals, _, cells_used) = cubature_vec(
        |rho, theta| {
            let e = rho.exp();
            let u = c(e * theta.cos(), e * theta.sin());
            let (x, dxdu) = mob.inverse(u);
            let mut out = vec![czero(); 2 * g * g];
            let ys = match model.y_values(x) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    return out;
                }
            };
            let mut acc = vec![czero::<T>(); g * g];
            for y in ys {
                let dy = -eq_x.eval(x, y) / eq_y.eval(x, y);
                let p = PathPoint { x, y, dx: C::new(T::one(), T::zero()), dy };
                let gv: Vec<C<T>> = forms.iter().map(|w| w.pullback(&p).unwrap_or(czero())).collect();
                for k in 0..g {
                    for l in 0..g {
                        acc[k * g + l] += gv[k].conj() * gv[l];
                    }
                }
            }
            let jac = c(T::zero(), T::lit(2.0) * dxdu.norm_sqr() * e * e);
            let log_f = c(rho, theta + shift);
            for k in 0..g * g {
                let v = acc[k] * jac;
                out[k] = v * log_f;
                out[g * g + k] = v;
            }
            out
        },
        2 * g * g,
        &cells,
        &sing_rt,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let table = |off: usize| -> CMat<T> { (0..g).map(|k| vals[off + k * g..off + (k + 1) * g].to_vec()).collect() };
    Ok((table(0), table(g * g), cells_used))
}
