//! Run configuration, read from TOML.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::curve::expr::{parse, parse_constant, parse_poly};
use crate::curve::function::RationalFunction;
use crate::curve::{CurveModel, PointOnCurve};
use crate::error::{NumError, NumResult};
use crate::scalar::{GaussianRational, Real, C};

use super::Stage;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    /// Stages run by `all`; every stage when absent.
    #[serde(default)]
    pub stages: Option<Vec<Stage>>,
    #[serde(default)]
    pub seed: u64,
    pub curve: Option<CurveConfig>,
    pub points: Option<PointsConfig>,
    pub function: Option<FunctionConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CurveKindConfig {
    Hyperelliptic,
    Superelliptic,
    Fermat,
    Plane,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub kind: CurveKindConfig,
    /// `p(x)` for `y^n = p(x)`.
    pub p: Option<String>,
    /// Exponent of `y` (superelliptic) or degree (Fermat).
    pub n: Option<usize>,
    /// `F(x, y)` for a plane curve.
    pub equation: Option<String>,
}

/// A point is `[x, y]` or `"infinity"` / `"infinity:k"`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PointSpec {
    Affine([String; 2]),
    Named(String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointsConfig {
    /// Base point; `f(P) = 1` after normalization.
    pub p: [String; 2],
    pub q: PointSpec,
    pub r: PointSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub numerator: String,
    pub denominator: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub chen: f64,
    pub bilinear: f64,
    pub duality: f64,
    pub winding: f64,
    pub log_closure: f64,
    pub torsion_zero: f64,
    pub torsion_nonzero: f64,
    pub gamma_im: f64,
    pub gamma_period: f64,
    pub disc: f64,
    pub main: f64,
    pub loop_identity: f64,
    pub independence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            chen: 1e-8,
            bilinear: 1e-8,
            duality: 1e-7,
            winding: 1e-8,
            log_closure: 1e-8,
            torsion_zero: 1e-6,
            torsion_nonzero: 1e-3,
            gamma_im: 1e-8,
            gamma_period: 1e-6,
            disc: 1e-4,
            main: 1e-3,
            loop_identity: 1e-4,
            independence: 1e-4,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub chen_samples: usize,
    pub mhs_cases: usize,
    pub mhs_diagrams: usize,
    /// Run the surface-integral volume and bilinear checks of the frame.
    pub volume_check: bool,
    /// Branch lift and loop variant of the independence rerun.
    pub rerun_lift: i64,
    pub rerun_loop_variant: usize,
    /// Run the independence rerun in `compare`.
    pub rerun: bool,
    /// Relative target of the adaptive quadratures; `--tol` overrides it.
    pub quadrature_tol: Option<f64>,
    /// Largest `|kappa|` scanned in `compare`; `2 (2g + 1) N^2` when absent.
    pub kappa_bound: Option<i64>,
    /// Report the regulator of `f` normalized to `f(P) = 1`. When false the
    /// regulator table includes the decomposable term `log f(P) int_C phi ^ psi`
    /// of `f` as written; `compare` always uses the normalized function.
    pub normalize: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            chen_samples: 100,
            mhs_cases: 200,
            mhs_diagrams: 40,
            volume_check: true,
            rerun_lift: 1,
            rerun_loop_variant: 1,
            rerun: true,
            quadrature_tol: None,
            kappa_bound: None,
            normalize: true,
        }
    }
}

impl RunConfig {
    /// Parses TOML; errors carry the line and field.
    pub fn from_toml(src: &str) -> NumResult<Self> {
        toml::from_str(src).map_err(|e| NumError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> NumResult<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| NumError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&src).map_err(|e| NumError::Config(format!("{}: {e}", path.display())))
    }

    pub fn curve_config(&self) -> NumResult<&CurveConfig> {
        self.curve.as_ref().ok_or_else(|| NumError::Config("missing [curve] table".into()))
    }
}

/// Exact coefficients of `p(x)` by degree, when `src` has only rational
/// Gaussian constants.
fn exact_x_coefficients(src: &str) -> NumResult<Option<Vec<GaussianRational>>> {
    let Some(map) = parse(src)?.exact() else { return Ok(None) };
    if map.keys().any(|(_, dy)| *dy > 0) {
        return Err(NumError::Config(format!("p(x) = {src} must not involve y")));
    }
    let deg = map.keys().map(|(dx, _)| *dx).max().unwrap_or(0);
    let mut out = vec![GaussianRational::zero(); deg + 1];
    for ((dx, _), z) in map {
        out[dx] = z;
    }
    Ok(Some(out))
}

impl CurveConfig {
    pub fn build<T: Real>(&self) -> NumResult<CurveModel<T>> {
        let need_p = || self.p.as_deref().ok_or_else(|| NumError::Config("curve.p is required for this kind".into()));
        match self.kind {
            CurveKindConfig::Hyperelliptic => {
                let src = need_p()?;
                CurveModel::hyperelliptic(parse_poly::<T>(src)?.x_part(), exact_x_coefficients(src)?.as_deref())
            }
            CurveKindConfig::Superelliptic => {
                let src = need_p()?;
                let n = self.n.ok_or_else(|| NumError::Config("curve.n is required for a superelliptic curve".into()))?;
                CurveModel::superelliptic(
                    crate::curve::CurveKind::Superelliptic,
                    n,
                    parse_poly::<T>(src)?.x_part(),
                    exact_x_coefficients(src)?.as_deref(),
                )
            }
            CurveKindConfig::Fermat => {
                CurveModel::fermat(self.n.ok_or_else(|| NumError::Config("curve.n is required for a Fermat curve".into()))?)
            }
            CurveKindConfig::Plane => {
                let src = self.equation.as_deref().ok_or_else(|| NumError::Config("curve.equation is required for a plane curve".into()))?;
                CurveModel::plane(parse_poly(src)?)
            }
        }
    }
}

fn xy<T: Real>(pair: &[String; 2], label: &str) -> NumResult<(C<T>, C<T>)> {
    let x = parse_constant(&pair[0]).map_err(|e| NumError::Config(format!("points.{label}[0]: {e}")))?;
    let y = parse_constant(&pair[1]).map_err(|e| NumError::Config(format!("points.{label}[1]: {e}")))?;
    Ok((x, y))
}

impl PointSpec {
    pub fn build<T: Real>(&self, label: &str) -> NumResult<PointOnCurve<T>> {
        match self {
            PointSpec::Affine(p) => {
                let (x, y) = xy(p, label)?;
                Ok(PointOnCurve::affine(x, y))
            }
            PointSpec::Named(s) => {
                let s = s.trim();
                let k = match s.strip_prefix("infinity") {
                    Some("") => 0,
                    Some(rest) => rest
                        .strip_prefix(':')
                        .and_then(|k| k.parse().ok())
                        .ok_or_else(|| NumError::Config(format!("points.{label}: cannot read \"{s}\"")))?,
                    None => return Err(NumError::Config(format!("points.{label}: expected [x, y] or \"infinity:k\", got \"{s}\""))),
                };
                Ok(PointOnCurve::Infinity(k))
            }
        }
    }
}

/// Points and function of a run, checked to lie on the curve.
#[derive(Clone, Debug)]
pub struct CurveData<T: Real> {
    pub p: (C<T>, C<T>),
    pub q: PointOnCurve<T>,
    pub r: PointOnCurve<T>,
    /// Normalized so that `f(P) = 1`.
    pub f: RationalFunction<T>,
    /// Value at `P` of `f` as written in the config.
    pub f_at_p: C<T>,
}

impl RunConfig {
    pub fn curve_data<T: Real>(&self, model: &CurveModel<T>) -> NumResult<CurveData<T>> {
        let pts = self.points.as_ref().ok_or_else(|| NumError::Config("missing [points] table".into()))?;
        let fc = self.function.as_ref().ok_or_else(|| NumError::Config("missing [function] table".into()))?;
        let p = xy(&pts.p, "p")?;
        let tol = T::lit(1e-8);
        let snap = |pt: PointOnCurve<T>, label: &str| -> NumResult<PointOnCurve<T>> {
            let s = model.snap(pt, tol);
            if !model.on_curve(&s, tol) {
                return Err(NumError::Config(format!("point {label} = {pt} is not on the curve")));
            }
            Ok(s)
        };
        let pp = snap(PointOnCurve::affine(p.0, p.1), "P")?;
        let p = pp.xy().expect("affine");
        let q = snap(pts.q.build("q")?, "Q")?;
        let r = snap(pts.r.build("r")?, "R")?;
        let num = parse_poly(&fc.numerator).map_err(|e| NumError::Config(format!("function.numerator: {e}")))?;
        let den = parse_poly(&fc.denominator).map_err(|e| NumError::Config(format!("function.denominator: {e}")))?;
        let mut f = RationalFunction::new(num, den)?;
        let f_at_p = f.eval(p.0, p.1)?;
        f.normalize_at(p.0, p.1)?;
        Ok(CurveData { p, q, r, f, f_at_p })
    }
}
