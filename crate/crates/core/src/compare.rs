//! Comparison of the Carlson-side table with the regulator side: fit of the
//! proportionality constant modulo period lattices, the per-loop identity
//! behind it, and stability under a change of branch and loop system.

use serde::Serialize;

use crate::carlson::{entry_residual, CarlsonEntry, EntryResidual, LoopIntegrals, SPAN_BUDGET};
use crate::chen::{signature, ChenOptions};
use crate::error::NumResult;
use crate::path::gamma::LevelSetGamma;
use crate::period::{reduce_in_span, PeriodFrame, DEFAULT_BOX};
use crate::regulator::{pair_with_table, FrameForm, SurfaceTables};
use crate::scalar::{czero, two_pi_i, Real, C};

fn pair<T: Real>(z: C<T>) -> [f64; 2] {
    [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)]
}

/// Both sides of one entry `(dz_i, dx_j)`.
#[derive(Clone, Debug)]
pub struct EntryPair<T: Real> {
    pub carlson: CarlsonEntry<T>,
    pub regulator: C<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaScore {
    pub kappa: i64,
    /// Largest relative residual over the entries against the full generator set.
    pub max_full: f64,
    /// Same against the per-entry sublattice.
    pub max_sublattice: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaFit {
    /// `(2g + 1) N`.
    pub stated: i64,
    /// `2 (2g + 1) N`.
    pub doubled: i64,
    /// `(2g + 1) N^2`.
    pub n_squared: i64,
    pub fitted: i64,
    pub scan: Vec<KappaScore>,
}

impl KappaFit {
    pub fn score(&self, kappa: i64) -> Option<&KappaScore> {
        self.scan.iter().find(|s| s.kappa == kappa)
    }
}

/// Scans integer `kappa` in `[-bound, bound]`; the fitted value minimizes the
/// largest full-lattice residual, ties going to the smaller `|kappa|`.
pub fn fit_kappa<T: Real>(entries: &[EntryPair<T>], genus: usize, n: usize, bound: i64) -> NumResult<KappaFit> {
    let base = (2 * genus + 1) as i64 * n as i64;
    let mut scan = Vec::new();
    for kappa in -bound..=bound {
        if kappa == 0 {
            continue;
        }
        let k = T::from_i64(kappa).unwrap();
        let (mut mf, mut ms) = (0.0f64, 0.0f64);
        for e in entries {
            let r = entry_residual(&e.carlson, e.regulator, k)?;
            mf = mf.max(r.full);
            ms = ms.max(r.sublattice);
        }
        scan.push(KappaScore { kappa, max_full: mf, max_sublattice: ms });
    }
    let best = scan
        .iter()
        .min_by(|a, b| {
            a.max_full
                .partial_cmp(&b.max_full)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.kappa.abs().cmp(&b.kappa.abs()))
                .then(b.kappa.cmp(&a.kappa))
        })
        .map(|s| s.kappa)
        .unwrap_or(base);
    Ok(KappaFit { stated: base, doubled: 2 * base, n_squared: base * n as i64, fitted: best, scan })
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryComparison {
    pub i: usize,
    pub j: usize,
    pub carlson: [f64; 2],
    pub regulator: [f64; 2],
    pub ratio: [f64; 2],
    pub at_fitted: EntryResidual,
    pub at_stated: EntryResidual,
}

pub fn compare_entries<T: Real>(entries: &[EntryPair<T>], fit: &KappaFit) -> NumResult<Vec<EntryComparison>> {
    entries
        .iter()
        .map(|e| {
            Ok(EntryComparison {
                i: e.carlson.i,
                j: e.carlson.j,
                carlson: pair(e.carlson.value),
                regulator: pair(e.regulator),
                ratio: pair(e.carlson.value / e.regulator),
                at_fitted: entry_residual(&e.carlson, e.regulator, T::from_i64(fit.fitted).unwrap())?,
                at_stated: entry_residual(&e.carlson, e.regulator, T::from_i64(fit.stated).unwrap())?,
            })
        })
        .collect()
}

/// `int_{alpha_l} (df/f) dz_i` against
/// `int_{C \ gamma} log f eta_l ^ dz_i + 2 pi i int_gamma eta_l dz_i`, with
/// `eta_l = -N c(l) dx_sigma(l)` the dual of `alpha_l`, modulo
/// `2 pi i int_{alpha'_m} dz_i`.
#[derive(Clone, Debug, Serialize)]
pub struct LoopIdentity {
    pub l: usize,
    pub i: usize,
    pub loop_value: [f64; 2],
    pub surface_value: [f64; 2],
    pub relative_residual: f64,
    pub coefficients: Vec<i64>,
}

pub fn loop_identities<T: Real>(
    frame: &PeriodFrame<T>,
    li: &LoopIntegrals<T>,
    tables: &SurfaceTables<T>,
    gamma: &LevelSetGamma<T>,
    chen: &ChenOptions<T>,
) -> NumResult<Vec<LoopIdentity>> {
    let g = frame.genus;
    let nn = T::from_usize(frame.n).unwrap();
    let mut out = Vec::new();
    for l in 0..2 * g {
        let cl = T::from_i64(frame.c[l]).unwrap();
        let eta = FrameForm::dx(frame, frame.sigma[l]).scale(C::new(-nn * cl, T::zero()));
        let eta_form = eta.to_form(frame);
        for i in 0..g {
            let x = li.dlog_dz(l, i);
            let forms = vec![eta_form.clone(), frame.dz[i].clone()];
            let mut along = czero();
            for comp in &gamma.components {
                along += signature(comp, &forms, 2, chen)?.two(0, 1);
            }
            let y = pair_with_table(&tables.log_table, &eta, &FrameForm::dz(g, i)) + two_pi_i::<T>() * along;
            let gens: Vec<C<T>> = (0..2 * g).map(|m| two_pi_i::<T>() * frame.dz_periods[i][m]).collect();
            let red = reduce_in_span(x - y, &gens, DEFAULT_BOX, SPAN_BUDGET)?;
            let scale = x.norm().max(y.norm()).max(T::lit(1e-300));
            out.push(LoopIdentity {
                l,
                i,
                loop_value: pair(x),
                surface_value: pair(y),
                relative_residual: (red.residual / scale).to_f64().unwrap_or(f64::NAN),
                coefficients: red.coefficients,
            });
        }
    }
    Ok(out)
}

/// Change of `E - kappa R` between two runs, reduced modulo the full
/// generator set of the first run.
#[derive(Clone, Debug, Serialize)]
pub struct EntryChange {
    pub i: usize,
    pub j: usize,
    pub carlson_change: f64,
    pub regulator_change: f64,
    /// Relative size of the reduced change of `E - kappa R`.
    pub reduced_change: f64,
    pub coefficients: Vec<i64>,
}

pub fn entry_changes<T: Real>(a: &[EntryPair<T>], b: &[EntryPair<T>], kappa: i64) -> NumResult<Vec<EntryChange>> {
    let k = T::from_i64(kappa).unwrap();
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let dx = x.carlson.value - x.regulator * k;
            let dy = y.carlson.value - y.regulator * k;
            let red = reduce_in_span(dy - dx, &x.carlson.period_generators, DEFAULT_BOX, SPAN_BUDGET)?;
            let scale = x.carlson.value.norm().max((x.regulator * k).norm()).max(T::lit(1e-300));
            let f = |z: T| z.to_f64().unwrap_or(f64::NAN);
            Ok(EntryChange {
                i: x.carlson.i,
                j: x.carlson.j,
                carlson_change: f((y.carlson.value - x.carlson.value).norm()),
                regulator_change: f((y.regulator - x.regulator).norm()),
                reduced_change: f(red.residual / scale),
                coefficients: red.coefficients,
            })
        })
        .collect()
}
