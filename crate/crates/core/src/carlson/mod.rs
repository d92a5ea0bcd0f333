//! Extension side: iterated integrals of `df/f` against the frame along the
//! `alpha` loops, the resulting entry table, and its comparison with the
//! regulator side.

use serde::Serialize;

use crate::chen::{signature, ChenOptions};
use crate::curve::forms::DifferentialForm;
use crate::curve::function::RationalFunction;
use crate::curve::CurveModel;
use crate::error::{NumError, NumResult};
use crate::path::loops::log_f_branch;
use crate::path::{LoopSystem, SurfacePath};
use crate::period::{reduce_in_span, span_resolution, PeriodFrame, DEFAULT_BOX};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{czero, two_pi_i, Real, C};

/// Length-one and length-two integrals along every `alpha_l`, with forms
/// ordered `[df/f, dz_1.., conj dz_1..]`.
#[derive(Clone, Debug)]
pub struct LoopIntegrals<T: Real> {
    pub genus: usize,
    /// `[l][a]`: `int_{alpha_l} w_a`.
    pub single: Vec<Vec<C<T>>>,
    /// `[l][a][b]`: `int_{alpha_l} w_a w_b`.
    pub double: Vec<Vec<Vec<C<T>>>>,
    pub error_estimate: T,
}

impl<T: Real> LoopIntegrals<T> {
    pub fn compute(
        model: &CurveModel<T>,
        loops: &LoopSystem<T>,
        frame: &PeriodFrame<T>,
        f: &RationalFunction<T>,
        opts: &ChenOptions<T>,
    ) -> NumResult<Self> {
        let g = frame.genus;
        let forms = Self::forms(frame, f);
        let k = forms.len();
        let mut single = Vec::new();
        let mut double = Vec::new();
        let mut err = T::zero();
        for l in 0..2 * g {
            let path = loops.alpha(model, l)?;
            let s = signature(&path, &forms, 2, opts)?;
            single.push(s.l1.clone());
            double.push((0..k).map(|a| (0..k).map(|b| s.two(a, b)).collect()).collect());
            err += s.error_estimate;
        }
        Ok(LoopIntegrals { genus: g, single, double, error_estimate: err })
    }

    pub fn forms(frame: &PeriodFrame<T>, f: &RationalFunction<T>) -> Vec<DifferentialForm<T>> {
        let mut forms = vec![DifferentialForm::Dlog(f.clone())];
        forms.extend(frame.dz.iter().cloned());
        forms.extend(frame.dz.iter().map(|w| w.clone().conj()));
        forms
    }

    /// `int_{alpha_l} (df/f) dz_i`.
    pub fn dlog_dz(&self, l: usize, i: usize) -> C<T> {
        self.double[l][0][1 + i]
    }

    /// `int_{alpha_l} dz_i (df/f)`.
    pub fn dz_dlog(&self, l: usize, i: usize) -> C<T> {
        self.double[l][1 + i][0]
    }

    /// `int_{alpha_l} (df/f) dx_k` through the frame coefficients.
    pub fn dlog_dx(&self, frame: &PeriodFrame<T>, l: usize, k: usize) -> C<T> {
        let g = self.genus;
        (0..g).fold(czero(), |s, m| {
            s + frame.dx_coefficients[k][m] * self.double[l][0][1 + m]
                + frame.dx_coefficients[k][m + g] * self.double[l][0][1 + g + m]
        })
    }

    pub fn dx_dlog(&self, frame: &PeriodFrame<T>, l: usize, k: usize) -> C<T> {
        let g = self.genus;
        (0..g).fold(czero(), |s, m| {
            s + frame.dx_coefficients[k][m] * self.double[l][1 + m][0]
                + frame.dx_coefficients[k][m + g] * self.double[l][1 + g + m][0]
        })
    }
}

/// Computable part of `G(dx_k)(alpha_j)`: `(2g + 1) int_{alpha_j} (df/f) dx_k`.
/// The `W(dx_k)` term is not evaluated; the value is complete only after
/// contraction against holomorphic combinations.
#[derive(Clone, Copy, Debug)]
pub struct GValue<T: Real> {
    pub value: C<T>,
    /// `int (df/f) dx_k + int dx_k (df/f)`, which must vanish.
    pub shuffle_defect: T,
    pub complete: bool,
}

pub fn evaluate_g<T: Real>(li: &LoopIntegrals<T>, frame: &PeriodFrame<T>, k: usize, j: usize) -> NumResult<GValue<T>> {
    if li.single[j][0].norm() > T::lit(1e-6) {
        return Err(NumError::Precondition(format!("f winds along alpha_{}", j + 1)));
    }
    let g = T::from_usize(frame.genus).unwrap();
    let a = li.dlog_dx(frame, j, k);
    let b = li.dx_dlog(frame, j, k);
    Ok(GValue { value: a * (T::lit(2.0) * g + T::one()), shuffle_defect: (a + b).norm(), complete: false })
}

/// Coefficients of `zeta_j = c(sigma(j)) alpha_sigma(j) + sum_{i <= g} A_ji c(i) alpha_i`
/// on `alpha_1 .. alpha_2g`.
pub fn zeta_coefficients<T: Real>(frame: &PeriodFrame<T>, j: usize) -> Vec<C<T>> {
    let g = frame.genus;
    let mut out = vec![czero(); 2 * g];
    let s = frame.sigma[j];
    out[s] += C::new(T::from_i64(frame.c[s]).unwrap(), T::zero());
    for i in 0..g {
        out[i] += frame.a[j][i] * T::from_i64(frame.c[i]).unwrap();
    }
    out
}

/// `max |int_{zeta_j} dx_l - N int_C dx_l ^ dz_j|`: `zeta_j` represents `N`
/// times the class dual to `dz_j`.
pub fn zeta_duality_defect<T: Real>(frame: &PeriodFrame<T>, li: &LoopIntegrals<T>) -> T {
    let g = frame.genus;
    let nn = T::from_usize(frame.n).unwrap();
    let mut worst = T::zero();
    for j in 0..g {
        let z = zeta_coefficients(frame, j);
        for l in 0..2 * g {
            // int_{alpha_m} dx_l from the loop integrals.
            let mut lhs: C<T> = czero();
            for (m, zm) in z.iter().enumerate() {
                let v: C<T> = (0..g).fold(czero(), |s, k| {
                    s + frame.dx_coefficients[l][k] * li.single[m][1 + k] + frame.dx_coefficients[l][k + g] * li.single[m][1 + g + k]
                });
                lhs += *zm * v;
            }
            // int_C dx_l ^ dz_j = sum_i (A_i(dx_l) B_i(dz_j) - B_i(dx_l) A_i(dz_j)).
            let rhs: C<T> = if l < g { frame.a[j][l] } else if l - g == j { -C::new(T::one(), T::zero()) } else { czero() };
            worst = worst.max((lhs - rhs * nn).norm());
        }
    }
    worst
}

/// One Carlson-side entry for the pair `(dz_i, dx_j)`.
#[derive(Clone, Debug)]
pub struct CarlsonEntry<T: Real> {
    pub i: usize,
    pub j: usize,
    /// `F(c(sigma(j)) alpha_sigma(j) (x) zeta_i)`.
    pub tensor_value: C<T>,
    /// Antisymmetrized value on `alpha ^ zeta`.
    pub value: C<T>,
    /// `2 pi i int_{alpha_sigma(j)} dz_i`.
    pub lattice_generator: C<T>,
    /// `2 pi i int_{alpha_l} dz_i` for every `l`.
    pub period_generators: Vec<C<T>>,
}

/// `F(c(sigma(j)) alpha_sigma(j) (x) zeta_i) = -(2g + 1) N c(sigma(j)) int_{alpha_sigma(j)} (df/f) dz_i`.
/// Only the `dx_sigma(i)`-slot of `zeta_i` survives the identity factor, and
/// `W(dz_i) = 0` removes the remaining term. The antisymmetrized entry is
/// `F(a (x) zeta) - F(zeta (x) a) = 2 F(a (x) zeta)`.
pub fn carlson_entry<T: Real>(frame: &PeriodFrame<T>, li: &LoopIntegrals<T>, i: usize, j: usize) -> CarlsonEntry<T> {
    let g = frame.genus;
    let s = frame.sigma[j];
    let cs = T::from_i64(frame.c[s]).unwrap();
    let k = (T::lit(2.0) * T::from_usize(g).unwrap() + T::one()) * T::from_usize(frame.n).unwrap();
    let tensor_value = -li.dlog_dz(s, i) * (k * cs);
    CarlsonEntry {
        i,
        j,
        tensor_value,
        value: tensor_value * T::lit(2.0),
        lattice_generator: two_pi_i::<T>() * li.single[s][1 + i],
        period_generators: (0..2 * g).map(|l| two_pi_i::<T>() * li.single[l][1 + i]).collect(),
    }
}

/// `int_alpha log f psi` with the continuous branch of `log f` that
/// vanishes at the base point; equals `int_alpha (df/f) psi` when `f` does
/// not wind along `alpha`.
pub fn log_weighted_integral<T: Real>(
    path: &SurfacePath<T>,
    f: &RationalFunction<T>,
    psi: &DifferentialForm<T>,
    winding: C<T>,
    tol: T,
) -> NumResult<C<T>> {
    let branch = log_f_branch(path, f, winding, T::lit(1e-6))?;
    let per = 64usize;
    let mut total = czero();
    let mut failure: Option<NumError> = None;
    for (si, seg) in path.segments.iter().enumerate() {
        let opts = QuadOptions::with_tol(tol);
        let r = integrate(
            |t| {
                let k = (t * T::from_usize(per).unwrap()).floor().to_usize().unwrap_or(0).min(per - 1);
                let (_, lk) = branch[si * per + k];
                let tk = T::from_usize(k).unwrap() / T::from_usize(per).unwrap();
                let eval = || -> NumResult<C<T>> {
                    let p0 = seg.point(tk)?;
                    let p = seg.point(t)?;
                    let f0 = f.eval(p0.x, p0.y)?;
                    let ft = f.eval(p.x, p.y)?;
                    Ok((lk + (ft / f0).ln()) * psi.pullback(&p)?)
                };
                eval().unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    czero()
                })
            },
            T::zero(),
            T::one(),
            &opts,
        )?;
        total += r.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total)
}

/// Residual of `e - kappa r` modulo `generator Z`, relative to the entry size.
pub fn relative_residual<T: Real>(e: C<T>, r: C<T>, kappa: T, generator: C<T>) -> NumResult<(T, i64)> {
    let diff = e - r * kappa;
    let scale = e.norm().max((r * kappa).norm()).max(T::lit(1e-300));
    if generator.norm() <= T::lit(1e-12) * scale {
        return Ok((diff.norm() / scale, 0));
    }
    // Rank one: rounding gives the nearest lattice point.
    let n = ((diff * generator.conj()).re / generator.norm_sqr()).round();
    let red = diff - generator * n;
    Ok((red.norm() / scale, n.to_i64().unwrap_or(i64::MAX)))
}

/// Combinations visited by the search over the full set of period generators.
pub const SPAN_BUDGET: usize = 200_000;

/// Residuals of `e - kappa r` against the sublattice `2 pi i int_{alpha_sigma(j)} dz_i Z`
/// and against the span of all `2 pi i int_{alpha_l} dz_i` with bounded coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct EntryResidual {
    pub kappa: f64,
    pub sublattice: f64,
    pub sublattice_coefficient: i64,
    pub full: f64,
    pub full_coefficients: Vec<i64>,
    /// Relative residual a generic value would reach against the full
    /// generator set with the same coefficient box.
    pub full_chance_level: f64,
}

pub fn entry_residual<T: Real>(entry: &CarlsonEntry<T>, r: C<T>, kappa: T) -> NumResult<EntryResidual> {
    let e = entry.value;
    let scale = e.norm().max((r * kappa).norm()).max(T::lit(1e-300));
    let (sub, sc) = relative_residual(e, r, kappa, entry.lattice_generator)?;
    let red = reduce_in_span(e - r * kappa, &entry.period_generators, DEFAULT_BOX, SPAN_BUDGET)?;
    let chance = span_resolution(&entry.period_generators, DEFAULT_BOX, SPAN_BUDGET) / scale;
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    Ok(EntryResidual {
        kappa: f(kappa),
        sublattice: f(sub),
        sublattice_coefficient: sc,
        full: f(red.residual / scale),
        full_coefficients: red.coefficients,
        full_chance_level: f(chance),
    })
}

/// Least-squares complex ratio `sum conj(r) e / sum |r|^2`.
pub fn least_squares_ratio<T: Real>(e: &[C<T>], r: &[C<T>]) -> C<T> {
    let num = e.iter().zip(r).fold(czero::<T>(), |s, (a, b)| s + b.conj() * *a);
    let den = r.iter().fold(T::zero(), |s, b| s + b.norm_sqr());
    num / den
}
