//! Regulator side: the cycle `Z_{QR,P}`, its pairing with 2-forms through a
//! surface integral on `C \ gamma` plus a boundary term on `gamma`, and the
//! disc integrals over the difference maps of the components of `gamma`.

pub mod surface;

use serde::Serialize;

use crate::chen::{signature, ChenOptions};
use crate::curve::forms::DifferentialForm;
use crate::curve::function::RationalFunction;
use crate::curve::CurveModel;
use crate::error::{NumError, NumResult};
use crate::path::gamma::{GammaComponent, LevelSetGamma};
use crate::period::PeriodFrame;
use crate::quadrature::{cubature_vec, CubatureOptions, Rect};
use crate::scalar::dense::CMat;
use crate::scalar::{czero, two_pi_i, Real, C};

/// `sum_k holo_k dz_k + anti_k conj(dz_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameForm<T: Real> {
    pub holo: Vec<C<T>>,
    pub anti: Vec<C<T>>,
}

impl<T: Real> FrameForm<T> {
    pub fn dz(g: usize, i: usize) -> Self {
        let mut holo = vec![czero(); g];
        holo[i] = C::new(T::one(), T::zero());
        FrameForm { holo, anti: vec![czero(); g] }
    }

    /// The harmonic dual `dx_j`, `0 <= j < 2g`.
    pub fn dx(frame: &PeriodFrame<T>, j: usize) -> Self {
        let g = frame.genus;
        FrameForm { holo: frame.dx_coefficients[j][..g].to_vec(), anti: frame.dx_coefficients[j][g..].to_vec() }
    }

    pub fn is_holomorphic(&self) -> bool {
        self.anti.iter().all(|z| *z == czero())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        FrameForm { holo: self.holo.iter().map(|z| *z * s).collect(), anti: self.anti.iter().map(|z| *z * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        FrameForm {
            holo: self.holo.iter().zip(&o.holo).map(|(a, b)| *a + *b).collect(),
            anti: self.anti.iter().zip(&o.anti).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn to_form(&self, frame: &PeriodFrame<T>) -> DifferentialForm<T> {
        let mut terms = Vec::new();
        for k in 0..frame.genus {
            if self.holo[k] != czero() {
                terms.push((self.holo[k], frame.dz[k].clone()));
            }
            if self.anti[k] != czero() {
                terms.push((self.anti[k], frame.dz[k].clone().conj()));
            }
        }
        DifferentialForm::combination(terms)
    }

    /// Periods over the `alpha'` loops.
    pub fn periods(&self, frame: &PeriodFrame<T>) -> Vec<C<T>> {
        (0..2 * frame.genus)
            .map(|l| {
                let mut s = czero();
                for k in 0..frame.genus {
                    let p = frame.dz_periods[k][l];
                    s += self.holo[k] * p + self.anti[k] * p.conj();
                }
                s
            })
            .collect()
    }
}

/// `int_C phi ^ psi` through the bilinear relations on the `alpha'` basis.
pub fn wedge_from_periods<T: Real>(frame: &PeriodFrame<T>, phi: &FrameForm<T>, psi: &FrameForm<T>) -> C<T> {
    let g = frame.genus;
    let (p, q) = (phi.periods(frame), psi.periods(frame));
    (0..g).fold(czero(), |s, i| s + p[i] * q[i + g] - p[i + g] * q[i])
}

/// `int phi ^ psi` weighted by a Hermitian table `h_kl = int w conj(dz_k) ^ dz_l`.
pub fn pair_with_table<T: Real>(h: &CMat<T>, phi: &FrameForm<T>, psi: &FrameForm<T>) -> C<T> {
    let g = h.len();
    let mut s = czero();
    for k in 0..g {
        for l in 0..g {
            // conj dz_k ^ dz_l and dz_k ^ conj dz_l = -(conj dz_l ^ dz_k).
            s += phi.anti[k] * psi.holo[l] * h[k][l];
            s -= phi.holo[k] * psi.anti[l] * h[l][k];
        }
    }
    s
}

/// `reg((C, a))(phi ^ psi) = log(a) int_C phi ^ psi`.
pub fn decomposable_regulator<T: Real>(a: C<T>, frame: &PeriodFrame<T>, phi: &FrameForm<T>, psi: &FrameForm<T>) -> NumResult<C<T>> {
    if a == czero() {
        return Err(NumError::Precondition("decomposable regulator of the zero constant".into()));
    }
    Ok(a.ln() * wedge_from_periods(frame, phi, psi))
}

/// The cycle `Z_{QR,P}` represented by `f` and the traced level set.
#[derive(Clone, Debug)]
pub struct MotivicCycle<T: Real> {
    pub f: RationalFunction<T>,
    pub n: usize,
    pub gamma: LevelSetGamma<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct RegulatorOptions<T> {
    pub chen: ChenOptions<T>,
    pub surface: CubatureOptions<T>,
    pub disc: CubatureOptions<T>,
    /// Branch lift: `log f` takes values with imaginary part in
    /// `(2 pi M, 2 pi (M + 1))` on `C \ gamma`.
    pub lift: i64,
}

impl<T: Real> Default for RegulatorOptions<T> {
    fn default() -> Self {
        RegulatorOptions {
            chen: ChenOptions::default(),
            surface: CubatureOptions { rel_tol: T::lit(1e-10), abs_tol: T::lit(1e-15), corner_power: 3, ..CubatureOptions::default() },
            disc: CubatureOptions { rel_tol: T::lit(1e-9), abs_tol: T::lit(1e-13), corner_power: 2, ..CubatureOptions::default() },
            lift: 0,
        }
    }
}

/// Surface tables for one cycle and lift: `int_{C \ gamma} log f conj(dz_k) ^ dz_l`
/// and the same without the logarithm.
#[derive(Clone, Debug)]
pub struct SurfaceTables<T: Real> {
    pub log_table: CMat<T>,
    pub plain_table: CMat<T>,
    pub lift: i64,
    pub cells: usize,
}

impl<T: Real> SurfaceTables<T> {
    pub fn compute(model: &CurveModel<T>, z: &MotivicCycle<T>, frame: &PeriodFrame<T>, opts: &RegulatorOptions<T>) -> NumResult<Self> {
        let (raw_log, raw_plain, cells) = surface::log_hermitian_raw(model, &z.f, &frame.raw_forms, opts.lift, &opts.surface)?;
        let m = &frame.normalization;
        let g = frame.genus;
        let conv = |raw: &CMat<T>| -> CMat<T> {
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
            out
        };
        Ok(SurfaceTables { log_table: conv(&raw_log), plain_table: conv(&raw_plain), lift: opts.lift, cells })
    }
}

/// One evaluated pairing `reg_Z(Z)(phi ^ psi)`.
#[derive(Clone, Debug, Serialize)]
pub struct RegulatorEntry {
    pub value: [f64; 2],
    pub surface: [f64; 2],
    pub boundary: [f64; 2],
    pub error_estimate: f64,
}

fn pair<T: Real>(z: C<T>) -> [f64; 2] {
    [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)]
}

/// `sum_i int_{gamma^i} (phi psi - psi phi)` and its error estimate.
pub fn boundary_term<T: Real>(
    gamma: &LevelSetGamma<T>,
    phi: &DifferentialForm<T>,
    psi: &DifferentialForm<T>,
    opts: &ChenOptions<T>,
) -> NumResult<(C<T>, T)> {
    let forms = vec![phi.clone(), psi.clone()];
    let mut total = czero();
    let mut err = T::zero();
    for comp in &gamma.components {
        let s = signature(comp, &forms, 2, opts)?;
        total += s.two(0, 1) - s.two(1, 0);
        err += s.error_estimate;
    }
    Ok((total, err))
}

/// `2 int_{C \ gamma} log f phi ^ psi + 2 pi i int_gamma (phi psi - psi phi)`.
pub fn regulator_pair<T: Real>(
    z: &MotivicCycle<T>,
    frame: &PeriodFrame<T>,
    tables: &SurfaceTables<T>,
    phi: &FrameForm<T>,
    psi: &FrameForm<T>,
    opts: &RegulatorOptions<T>,
) -> NumResult<(C<T>, RegulatorEntry)> {
    if !psi.is_holomorphic() {
        return Err(NumError::Precondition("second argument of the regulator pairing must be holomorphic".into()));
    }
    let s = pair_with_table(&tables.log_table, phi, psi);
    let (b, err) = boundary_term(&z.gamma, &phi.to_form(frame), &psi.to_form(frame), &opts.chen)?;
    let two = T::lit(2.0);
    let v = s * two + two_pi_i::<T>() * b;
    Ok((v, RegulatorEntry { value: pair(v), surface: pair(s), boundary: pair(b), error_estimate: err.to_f64().unwrap_or(f64::NAN) }))
}

/// Pullback coefficient of a form at global parameter `t` of a component.
fn pull<T: Real>(comp: &GammaComponent<T>, forms: &[DifferentialForm<T>], t: T) -> NumResult<Vec<C<T>>> {
    let p = comp.at(t)?;
    forms.iter().map(|w| w.pullback(&p)).collect()
}

/// `int_{D_i} phi ^ psi` over the difference map
/// `F(s, t) = gamma^i(t) - gamma^i(t (1 - s) / (1 - s + s t))` for every pair
/// `(forms[a], forms[b])` listed in `pairs`.
pub fn disc_integrals<T: Real>(
    comp: &GammaComponent<T>,
    forms: &[DifferentialForm<T>],
    pairs: &[(usize, usize)],
    opts: &CubatureOptions<T>,
) -> NumResult<Vec<C<T>>> {
    let half = T::lit(0.5);
    let cells = [
        Rect { x0: T::zero(), x1: half, y0: T::zero(), y1: half },
        Rect { x0: half, x1: T::one(), y0: T::zero(), y1: half },
        Rect { x0: T::zero(), x1: half, y0: half, y1: T::one() },
        Rect { x0: half, x1: T::one(), y0: half, y1: T::one() },
    ];
    let mut failure: Option<NumError> = None;
    let (vals, _, _) = cubature_vec(
        |s, t| {
            let den = T::one() - s + s * t;
            let b = t * (T::one() - s) / den;
            let db_ds = -(t * t) / (den * den);
            let (pa, pb) = match (pull(comp, forms, t), pull(comp, forms, b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    return vec![czero(); pairs.len()];
                }
            };
            pairs.iter().map(|&(i, j)| (pb[i] * pa[j] - pa[i] * pb[j]) * (-db_ds)).collect()
        },
        pairs.len(),
        &cells,
        &[(T::one(), T::zero())],
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(vals)
}

/// `int_gamma psi` for each form (vanishes for holomorphic forms).
pub fn gamma_periods<T: Real>(gamma: &LevelSetGamma<T>, forms: &[DifferentialForm<T>], opts: &ChenOptions<T>) -> NumResult<Vec<C<T>>> {
    let mut acc = vec![czero(); forms.len()];
    for comp in &gamma.components {
        let v = crate::chen::line_integrals(comp, forms, opts)?;
        for (a, z) in acc.iter_mut().zip(v) {
            *a += z;
        }
    }
    Ok(acc)
}
