//! Period matrices, the normalized frame `dz_i`, harmonic duals `dx_i`,
//! Abel-Jacobi images and lattice reduction.

pub mod lattice;
pub mod plane;

use serde::Serialize;

pub use lattice::{reduce_in_span, reduce_mod_lattice, reduce_scalar, span_resolution, JacobianSummary, JacobianValue, DEFAULT_BOX};

use crate::chen::{line_integrals, ChenOptions};
use crate::curve::forms::{holomorphic_basis, DifferentialForm};
use crate::curve::{CurveModel, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::path::{path_to_point, LoopSystem};
use crate::quadrature::CubatureOptions;
use crate::scalar::dense::{inverse, matmul, CMat};
use crate::scalar::{cone, czero, Real, C};

#[derive(Clone, Copy, Debug)]
pub struct FrameOptions<T> {
    pub chen: ChenOptions<T>,
    pub cubature: CubatureOptions<T>,
    /// Run the surface-integral check of the volume-form identity.
    pub volume_check: bool,
}

impl<T: Real> Default for FrameOptions<T> {
    fn default() -> Self {
        FrameOptions {
            chen: ChenOptions::default(),
            cubature: CubatureOptions { rel_tol: T::lit(1e-11), abs_tol: T::lit(1e-15), corner_power: 3, ..CubatureOptions::default() },
            volume_check: true,
        }
    }
}

/// Diagnostics of a frame; all values are maximal absolute deviations.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FrameChecks {
    /// `max |A - A^T|`.
    pub symmetry: f64,
    /// Smallest Cholesky pivot of `Im A` (positive when definite).
    pub im_a_min_pivot: f64,
    /// `max |int_{alpha'_l} dx_j - delta_jl|`.
    pub duality: f64,
    /// `max |int_{alpha_i} dz_j - N delta_ij|` for `i <= g` together with the
    /// `N A` columns for `i > g`.
    pub alpha_dz: f64,
    /// `max |int_{alpha_i} dx_j - N delta_ij|`.
    pub alpha_dx: f64,
    /// `max |int_C dx_a ^ dx_b - J_ab|` from surface integrals, if run.
    pub volume: Option<f64>,
    /// `max |int_C conj(dz_k) ^ dz_l - (A_lk - conj A_kl)|`, if run.
    pub bilinear: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PeriodFrame<T: Real> {
    pub genus: usize,
    pub n: usize,
    pub raw_forms: Vec<DifferentialForm<T>>,
    /// `g x 2g`: `int_{alpha'_l} omega_k`.
    pub raw_periods: CMat<T>,
    /// `dz = M omega`.
    pub normalization: CMat<T>,
    pub dz: Vec<DifferentialForm<T>>,
    /// `g x 2g`: `int_{alpha'_l} dz_k = [I | A]`.
    pub dz_periods: CMat<T>,
    /// `A_ji = int_{alpha'_(i+g)} dz_j = (1/N) int_{alpha_(i+g)} dz_j`.
    pub a: CMat<T>,
    /// `2g x 2g`: row `j` expresses `dx_j` on `(dz_1.., conj dz_1..)`.
    pub dx_coefficients: CMat<T>,
    pub dx: Vec<DifferentialForm<T>>,
    pub c: Vec<i64>,
    pub sigma: Vec<usize>,
    pub checks: FrameChecks,
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Smallest pivot of the Cholesky factorization of a real symmetric matrix
/// (negative or zero if it is not positive definite).
pub fn min_cholesky_pivot<T: Real>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut l = vec![vec![T::zero(); n]; n];
    let mut worst = T::infinity();
    for j in 0..n {
        let mut d = m[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        worst = worst.min(d);
        if d <= T::zero() {
            return d;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
    }
    worst
}

impl<T: Real> PeriodFrame<T> {
    /// Builds the frame from a loop system whose `alpha'` loops form a
    /// standard symplectic basis.
    pub fn compute(model: &CurveModel<T>, loops: &LoopSystem<T>, opts: &FrameOptions<T>) -> NumResult<Self> {
        if !loops.is_standard_symplectic() {
            return Err(NumError::Precondition(format!("loop system is not symplectic: {:?}", loops.intersection)));
        }
        let g = loops.genus;
        let n = loops.n;
        let raw = holomorphic_basis(model)?;
        let mut raw_periods = vec![vec![czero(); 2 * g]; g];
        for (l, path) in loops.alpha_prime.iter().enumerate() {
            let v = line_integrals(path, &raw, &opts.chen)?;
            for k in 0..g {
                raw_periods[k][l] = v[k];
            }
        }
        let pa: CMat<T> = raw_periods.iter().map(|r| r[..g].to_vec()).collect();
        let m = inverse(&pa, T::lit(1e-12)).ok_or_else(|| NumError::Degenerate("A-period matrix is singular".into()))?;
        let dz_periods = matmul(&m, &raw_periods);
        let a: CMat<T> = dz_periods.iter().map(|r| r[g..].to_vec()).collect();
        let dz: Vec<DifferentialForm<T>> = (0..g)
            .map(|j| DifferentialForm::combination((0..g).map(|k| (m[j][k], raw[k].clone())).collect()))
            .collect();
        let mut pi = vec![vec![czero(); 2 * g]; 2 * g];
        for k in 0..g {
            for l in 0..2 * g {
                pi[k][l] = dz_periods[k][l];
                pi[k + g][l] = dz_periods[k][l].conj();
            }
        }
        let dx_coefficients =
            inverse(&pi, T::lit(1e-12)).ok_or_else(|| NumError::Degenerate("full period matrix is singular".into()))?;
        let dx: Vec<DifferentialForm<T>> = (0..2 * g)
            .map(|j| {
                let mut terms = Vec::new();
                for k in 0..g {
                    terms.push((dx_coefficients[j][k], dz[k].clone()));
                    terms.push((dx_coefficients[j][k + g], dz[k].clone().conj()));
                }
                DifferentialForm::combination(terms)
            })
            .collect();
        let c: Vec<i64> = (0..2 * g).map(|i| if i < g { 1 } else { -1 }).collect();
        let sigma: Vec<usize> = (0..2 * g).map(|i| if i < g { i + g } else { i - g }).collect();
        let mut frame = PeriodFrame {
            genus: g,
            n,
            raw_forms: raw,
            raw_periods,
            normalization: m,
            dz,
            dz_periods,
            a,
            dx_coefficients,
            dx,
            c,
            sigma,
            checks: FrameChecks::default(),
        };
        frame.checks = frame.run_checks(model, loops, opts)?;
        Ok(frame)
    }

    fn run_checks(&self, model: &CurveModel<T>, loops: &LoopSystem<T>, opts: &FrameOptions<T>) -> NumResult<FrameChecks> {
        let g = self.genus;
        let nn = T::from_usize(self.n).unwrap();
        let mut ch = FrameChecks::default();
        let mut sym = T::zero();
        let mut im = vec![vec![T::zero(); g]; g];
        for i in 0..g {
            for j in 0..g {
                sym = sym.max((self.a[i][j] - self.a[j][i]).norm());
                im[i][j] = (self.a[i][j].im + self.a[j][i].im) * T::lit(0.5);
            }
        }
        ch.symmetry = to_f64(sym);
        ch.im_a_min_pivot = to_f64(min_cholesky_pivot(&im));
        let mut dual = T::zero();
        for (l, path) in loops.alpha_prime.iter().enumerate() {
            let v = line_integrals(path, &self.dx, &opts.chen)?;
            for (j, z) in v.iter().enumerate() {
                let want = if j == l { cone() } else { czero() };
                dual = dual.max((*z - want).norm());
            }
        }
        ch.duality = to_f64(dual);
        let mut adz = T::zero();
        let mut adx = T::zero();
        for i in 0..2 * g {
            let path = loops.alpha(model, i)?;
            let v = line_integrals(&path, &self.dz, &opts.chen)?;
            for j in 0..g {
                adz = adz.max((v[j] - self.dz_periods[j][i] * nn).norm());
            }
            for j in 0..2 * g {
                let mut s: C<T> = czero();
                for k in 0..g {
                    s += self.dx_coefficients[j][k] * v[k] + self.dx_coefficients[j][k + g] * v[k].conj();
                }
                let want = if i == j { nn } else { T::zero() };
                adx = adx.max((s - C::new(want, T::zero())).norm());
            }
        }
        ch.alpha_dz = to_f64(adz);
        ch.alpha_dx = to_f64(adx);
        if opts.volume_check {
            let h = self.hermitian_pairing(model, &opts.cubature)?;
            let mut bil = T::zero();
            for k in 0..g {
                for l in 0..g {
                    let want = self.a[l][k] - self.a[k][l].conj();
                    bil = bil.max((h[k][l] - want).norm());
                }
            }
            ch.bilinear = Some(to_f64(bil));
            let vol = self.dx_wedge_matrix(&h);
            let mut err = T::zero();
            for a in 0..2 * g {
                for b in 0..2 * g {
                    let want = if b == self.sigma[a] { T::from_i64(self.c[a]).unwrap() } else { T::zero() };
                    err = err.max((vol[a][b] - C::new(want, T::zero())).norm());
                }
            }
            ch.volume = Some(to_f64(err));
        }
        Ok(ch)
    }

    /// `H_kl = int_C conj(dz_k) ^ dz_l` by surface cubature.
    pub fn hermitian_pairing(&self, model: &CurveModel<T>, opts: &CubatureOptions<T>) -> NumResult<CMat<T>> {
        let g = self.genus;
        let raw = plane::hermitian_raw(model, &self.raw_forms, opts)?;
        // dz = M omega, so H^z = conj(M) H^raw M^T.
        let m = &self.normalization;
        let mut out = vec![vec![czero(); g]; g];
        for k in 0..g {
            for l in 0..g {
                let mut s = czero();
                for a in 0..g {
                    for b in 0..g {
                        s += m[k][a].conj() * raw[a][b] * m[l][b];
                    }
                }
                out[k][l] = s;
            }
        }
        Ok(out)
    }

    /// `int_C dx_a ^ dx_b` from `H_kl = int_C conj(dz_k) ^ dz_l`.
    pub fn dx_wedge_matrix(&self, h: &CMat<T>) -> CMat<T> {
        let g = self.genus;
        let cx = &self.dx_coefficients;
        let mut out = vec![vec![czero(); 2 * g]; 2 * g];
        for a in 0..2 * g {
            for b in 0..2 * g {
                let mut s = czero();
                for k in 0..g {
                    for l in 0..g {
                        // dz_k ^ conj dz_l = -conj dz_l ^ dz_k.
                        s -= cx[a][k] * cx[b][l + g] * h[l][k];
                        s += cx[a][k + g] * cx[b][l] * h[k][l];
                    }
                }
                out[a][b] = s;
            }
        }
        out
    }

    /// The `2g` period vectors of `dz` (columns of `[I | A]`).
    pub fn lattice(&self) -> Vec<Vec<C<T>>> {
        (0..2 * self.genus).map(|l| (0..self.genus).map(|k| self.dz_periods[k][l]).collect()).collect()
    }

    /// `int_{alpha'_l} dx_j`-style evaluation: periods of an explicit form
    /// over the `alpha'` loops.
    pub fn dx_coefficient_on_periods(&self, j: usize, periods: &[C<T>]) -> C<T> {
        let g = self.genus;
        let mut s = czero();
        for k in 0..g {
            s += self.dx_coefficients[j][k] * periods[k] + self.dx_coefficients[j][k + g] * periods[k].conj();
        }
        s
    }
}

/// `sum_k n_k int_P^{D_k} dz` modulo the period lattice of `dz`.
pub fn abel_jacobi<T: Real>(
    model: &CurveModel<T>,
    frame: &PeriodFrame<T>,
    base: (C<T>, C<T>),
    divisor: &[(i64, PointOnCurve<T>)],
    opts: &ChenOptions<T>,
) -> NumResult<JacobianValue<T>> {
    let degree: i64 = divisor.iter().map(|d| d.0).sum();
    if degree != 0 {
        return Err(NumError::Divisor(format!("divisor has degree {degree}, expected 0")));
    }
    let g = frame.genus;
    let mut v = vec![czero(); g];
    let avoid: Vec<C<T>> = divisor.iter().filter_map(|d| d.1.xy().map(|p| p.0)).collect();
    for (mult, pt) in divisor {
        if *mult == 0 {
            continue;
        }
        let path = path_to_point(model, base, pt, &avoid, T::lit(1e-3))?;
        if path.segments.is_empty() {
            continue;
        }
        let w = line_integrals(&path, &frame.dz, opts)?;
        let m = T::from_i64(*mult).unwrap();
        for k in 0..g {
            v[k] += w[k] * m;
        }
    }
    reduce_mod_lattice(&v, &frame.lattice(), DEFAULT_BOX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;
    use crate::curve::function::RationalFunction;
    use crate::curve::root_of_unity;
    use crate::path::{LoopBuilder, LoopOptions};
    use crate::scalar::cl;

    #[test]
    fn genus_two_frame() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let mut f = RationalFunction::new(parse_poly("x - 1").unwrap(), parse_poly("x - zeta(5,1)").unwrap()).unwrap();
        let p = (cl(0.0, 0.0), cl(0.0, 1.0));
        f.normalize_at(p.0, p.1).unwrap();
        let q = PointOnCurve::affine(cl(1.0, 0.0), cl(0.0, 0.0));
        let r = PointOnCurve::affine(root_of_unity(5, 1), cl(0.0, 0.0));
        let b = LoopBuilder { model: &m, f: &f, p, q, r, n_div: 2, opts: LoopOptions::default() };
        let ls = b.build().unwrap();
        let fr = PeriodFrame::compute(&m, &ls, &FrameOptions::default()).unwrap();
        let ch = &fr.checks;
        assert!(ch.symmetry < 1e-8, "{ch:?}");
        assert!(ch.im_a_min_pivot > 0.0, "{ch:?}");
        assert!(ch.duality < 1e-7 && ch.alpha_dz < 1e-7 && ch.alpha_dx < 1e-7, "{ch:?}");
        assert!(ch.volume.unwrap() < 1e-7, "{ch:?}");
        let aj = abel_jacobi(&m, &fr, p, &[(2, q), (-2, r)], &ChenOptions::default()).unwrap();
        assert!(aj.residual < 1e-6, "{:?}", aj.residual);
        let aj1 = abel_jacobi(&m, &fr, p, &[(1, q), (-1, r)], &ChenOptions::default()).unwrap();
        assert!(aj1.residual > 1e-3, "{:?}", aj1.residual);
        let zero = abel_jacobi(&m, &fr, p, &[(1, q), (-1, q)], &ChenOptions::default()).unwrap();
        assert!(zero.residual < 1e-14);
    }
}
