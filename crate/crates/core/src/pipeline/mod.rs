//! Staged runs driven by a TOML config: each stage computes its products,
//! records verdicts, and hands its results to the stages that depend on it.

pub mod config;
pub mod render;
pub mod report;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::carlson::{carlson_entry, evaluate_g, log_weighted_integral, zeta_duality_defect, LoopIntegrals};
use crate::chen::check::chen_suite;
use crate::chen::{line_integrals, ChenOptions};
use crate::compare::{compare_entries, entry_changes, fit_kappa, loop_identities, EntryPair};
use crate::curve::divisor::verify_divisor;
use crate::curve::forms::DifferentialForm;
use crate::curve::CurveModel;
use crate::error::{NumError, NumResult};
use crate::mhs::run_selftest;
use crate::path::loops::log_f_branch;
use crate::path::{trace_gamma, GammaOptions, LevelSetGamma, LoopBuilder, LoopOptions, LoopSystem};
use crate::period::{abel_jacobi, FrameOptions, PeriodFrame};
use crate::quadrature::{CubatureOptions, QuadOptions};
use crate::regulator::surface::Mobius;
use crate::regulator::{decomposable_regulator, disc_integrals, gamma_periods, regulator_pair, FrameForm, MotivicCycle, RegulatorOptions, SurfaceTables};
use crate::scalar::C;

pub use config::{CurveData, RunConfig};
pub use render::{render_paths, Marker, PlotPath};
pub use report::{complex_json, hex_f64, RunReport, StageReport, StageStatus, Timing, Verdict, SCHEMA, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Verify,
    Homology,
    Periods,
    Gamma,
    Regulator,
    Carlson,
    Compare,
    MhsSelftest,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Verify,
        Stage::Homology,
        Stage::Periods,
        Stage::Gamma,
        Stage::Regulator,
        Stage::Carlson,
        Stage::Compare,
        Stage::MhsSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Verify => "verify",
            Stage::Homology => "homology",
            Stage::Periods => "periods",
            Stage::Gamma => "gamma",
            Stage::Regulator => "regulator",
            Stage::Carlson => "carlson",
            Stage::Compare => "compare",
            Stage::MhsSelftest => "mhs-selftest",
        }
    }

    pub fn dependencies(self) -> &'static [Stage] {
        match self {
            Stage::Verify | Stage::MhsSelftest => &[],
            Stage::Homology => &[Stage::Verify],
            Stage::Periods => &[Stage::Homology],
            Stage::Gamma => &[Stage::Periods],
            Stage::Regulator => &[Stage::Gamma],
            Stage::Carlson => &[Stage::Periods],
            Stage::Compare => &[Stage::Regulator, Stage::Carlson],
        }
    }

    /// The stage and everything it needs, in run order.
    pub fn closure(targets: &[Stage]) -> Vec<Stage> {
        fn visit(s: Stage, out: &mut Vec<Stage>) {
            for d in s.dependencies() {
                visit(*d, out);
            }
            if !out.contains(&s) {
                out.push(s);
            }
        }
        let mut out = Vec::new();
        for s in targets {
            visit(*s, &mut out);
        }
        out.sort();
        out
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `all`, or a single stage with its dependencies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    All,
    Stage(Stage),
}

impl std::str::FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Target::All);
        }
        Stage::ALL
            .iter()
            .find(|st| st.name() == s)
            .map(|st| Target::Stage(*st))
            .ok_or_else(|| format!("unknown stage \"{s}\"; expected all, {}", Stage::ALL.map(|s| s.name()).join(", ")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Overrides `options.quadrature_tol`.
    pub tol: Option<f64>,
    /// Forces `options.normalize = false`.
    pub unnormalized: bool,
}

/// A CSV table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> NumResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| NumError::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| NumError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Tables and plots produced alongside the report.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub tables: BTreeMap<String, Table>,
    pub plots: BTreeMap<String, String>,
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn f64s(z: C<f64>) -> [f64; 2] {
    [z.re, z.im]
}

fn cj(z: C<f64>) -> serde_json::Value {
    complex_json(z.re, z.im)
}

/// Numerical settings derived from the quadrature target `tol`.
#[derive(Clone, Copy, Debug)]
pub struct Numerics {
    pub chen: ChenOptions<f64>,
    pub frame: FrameOptions<f64>,
    pub regulator: RegulatorOptions<f64>,
}

impl Numerics {
    /// Line integrals get `tol`; the frame, surface and disc cubatures
    /// get 10, 100 and 1000 times `tol`. `tol = 1e-12` gives the defaults.
    pub fn new(tol: f64, volume_check: bool) -> Self {
        let chen = ChenOptions { quad: QuadOptions::with_tol(tol) };
        let frame_default = FrameOptions::<f64>::default();
        let reg_default = RegulatorOptions::<f64>::default();
        let scaled = |base: CubatureOptions<f64>, k: f64| CubatureOptions { rel_tol: tol * k, ..base };
        Numerics {
            chen,
            frame: FrameOptions { chen, cubature: scaled(frame_default.cubature, 10.0), volume_check },
            regulator: RegulatorOptions {
                chen,
                surface: scaled(reg_default.surface, 100.0),
                disc: scaled(reg_default.disc, 1000.0),
                lift: 0,
            },
        }
    }
}

/// Results handed from one stage to the next.
#[derive(Default)]
struct Context {
    model: Option<CurveModel<f64>>,
    data: Option<CurveData<f64>>,
    n: Option<usize>,
    loops: Option<LoopSystem<f64>>,
    frame: Option<PeriodFrame<f64>>,
    gamma: Option<LevelSetGamma<f64>>,
    cycle: Option<MotivicCycle<f64>>,
    tables: Option<SurfaceTables<f64>>,
    regulator: Option<Vec<Vec<C<f64>>>>,
    loop_integrals: Option<LoopIntegrals<f64>>,
}

enum StageError {
    /// A product of an earlier stage is missing.
    Skip(String),
    Num(NumError),
}

impl From<NumError> for StageError {
    fn from(e: NumError) -> Self {
        StageError::Num(e)
    }
}

fn need<'a, X>(x: &'a Option<X>, what: &str) -> Result<&'a X, StageError> {
    x.as_ref().ok_or_else(|| StageError::Skip(format!("{what} is not available")))
}

struct Runner<'a> {
    config: &'a RunConfig,
    seed: u64,
    normalize: bool,
    numerics: Numerics,
    ctx: Context,
    artifacts: Artifacts,
}

/// Runs the requested stages. The report is always produced; operational
/// errors are recorded in it rather than returned.
pub fn run(config: &RunConfig, target: Target, opts: &RunOptions) -> (RunReport, Artifacts) {
    let started = Instant::now();
    let started_unix_ms = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let seed = opts.seed.unwrap_or(config.seed);
    let tol = opts.tol.or(config.options.quadrature_tol).unwrap_or(1e-12);
    let stages = match target {
        Target::All => Stage::closure(config.stages.as_deref().unwrap_or(&Stage::ALL)),
        Target::Stage(s) => Stage::closure(&[s]),
    };
    let mut runner = Runner {
        config,
        seed,
        normalize: config.options.normalize && !opts.unnormalized,
        numerics: Numerics::new(tol, config.options.volume_check),
        ctx: Context::default(),
        artifacts: Artifacts::default(),
    };
    let mut reports: Vec<StageReport> = Vec::new();
    let mut stage_seconds = Vec::new();
    for s in stages {
        let t0 = Instant::now();
        let blocked = s.dependencies().iter().find(|d| {
            reports.iter().find(|r| r.stage == **d).map(|r| matches!(r.status, StageStatus::Error | StageStatus::Skipped)).unwrap_or(true)
        });
        let mut rep = StageReport::new(s);
        if let Some(d) = blocked {
            rep.status = StageStatus::Skipped;
            rep.message = Some(format!("stage {d} did not complete"));
        } else {
            match runner.run_stage(s, &mut rep) {
                Ok(()) => {
                    if rep.verdicts.iter().any(|v| !v.pass) {
                        rep.status = StageStatus::Fail;
                    }
                }
                Err(StageError::Skip(m)) => {
                    rep.status = StageStatus::Skipped;
                    rep.message = Some(m);
                }
                Err(StageError::Num(e)) => {
                    rep.status = StageStatus::Error;
                    rep.message = Some(e.to_string());
                }
            }
        }
        stage_seconds.push((s, t0.elapsed().as_secs_f64()));
        reports.push(rep);
    }
    let operational_error = reports.iter().any(|r| r.status == StageStatus::Error);
    let all_pass = reports.iter().all(|r| r.status == StageStatus::Pass);
    let report = RunReport {
        schema: SCHEMA.into(),
        version: SCHEMA_VERSION,
        name: config.name.clone(),
        seed,
        stages: reports,
        all_pass,
        operational_error,
        timing: Timing { started_unix_ms, stage_seconds, total_seconds: started.elapsed().as_secs_f64() },
    };
    (report, runner.artifacts)
}

/// Writes `report.json`, `tables/*.csv` and `plots/*.svg` under `dir`.
pub fn write_outputs(dir: &Path, report: &RunReport, artifacts: &Artifacts) -> std::io::Result<()> {
    let io = |e: NumError| std::io::Error::new(std::io::ErrorKind::Other, e.to_string());
    std::fs::create_dir_all(dir.join("tables"))?;
    std::fs::create_dir_all(dir.join("plots"))?;
    let json = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    for (name, t) in &artifacts.tables {
        std::fs::write(dir.join("tables").join(format!("{name}.csv")), t.to_csv().map_err(io)?)?;
    }
    for (name, svg) in &artifacts.plots {
        std::fs::write(dir.join("plots").join(format!("{name}.svg")), svg)?;
    }
    Ok(())
}

impl<'a> Runner<'a> {
    fn run_stage(&mut self, s: Stage, rep: &mut StageReport) -> Result<(), StageError> {
        match s {
            Stage::Verify => self.verify(rep),
            Stage::Homology => self.homology(rep),
            Stage::Periods => self.periods(rep),
            Stage::Gamma => self.gamma(rep),
            Stage::Regulator => self.regulator(rep),
            Stage::Carlson => self.carlson(rep),
            Stage::Compare => self.compare(rep),
            Stage::MhsSelftest => self.mhs(rep),
        }
    }

    fn tol(&self) -> &config::Tolerances {
        &self.config.tolerances
    }

    fn verify(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model: CurveModel<f64> = self.config.curve_config()?.build()?;
        let data = self.config.curve_data(&model)?;
        let chen = chen_suite(&model, self.seed, self.config.options.chen_samples, &self.numerics.chen)?;
        rep.verdicts.push(Verdict::below(
            "chen-identities",
            "largest relative error of composition, shuffle and the exact-form rules over random samples",
            chen.worst(),
            self.tol().chen,
        ));
        let genus = model.genus().ok();
        let divisor = match verify_divisor(&model, &data.f, &data.q, &data.r) {
            Ok(d) => {
                rep.verdicts.push(Verdict::above("divisor", "order N of f at Q (and of 1/f at R); div f = N Q - N R", d.n as f64, 0.0));
                self.ctx.n = Some(d.n);
                json!({ "n": d.n, "examined": d.examined.iter().map(|(p, o)| json!({"point": p.to_string(), "order": o})).collect::<Vec<_>>() })
            }
            Err(e @ (NumError::Divisor(_) | NumError::Degenerate(_))) => {
                rep.verdicts.push(Verdict::above("divisor", "order N of f at Q (and of 1/f at R); div f = N Q - N R", 0.0, 0.0));
                rep.notes.push(format!("divisor rejected: {e}"));
                json!({ "error": e.to_string() })
            }
            Err(e) => return Err(e.into()),
        };
        rep.data = json!({
            "curve": { "kind": model.kind, "genus": genus, "sheets": model.n().ok() },
            "divisor": divisor,
            "chen_suite": chen,
        });
        self.ctx.model = Some(model);
        self.ctx.data = Some(data);
        Ok(())
    }

    fn homology(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model = need(&self.ctx.model, "the curve")?;
        let data = need(&self.ctx.data, "the curve data")?;
        let n = *need(&self.ctx.n, "the divisor order N")?;
        let ls = LoopBuilder { model, f: &data.f, p: data.p, q: data.q, r: data.r, n_div: n, opts: LoopOptions::default() }.build()?;
        let g = ls.genus;
        rep.verdicts.push(Verdict::equals(
            "symplectic-intersection",
            "intersection matrix of alpha'_1..alpha'_2g equals the standard symplectic form (1 = yes)",
            if ls.is_standard_symplectic() { 1.0 } else { 0.0 },
            1.0,
        ));
        let dlog = vec![DifferentialForm::Dlog(data.f.clone())];
        let (mut winding, mut closure) = (0.0f64, 0.0f64);
        let mut loops = Table::new(&["loop", "winding_re", "winding_im", "log_closure"]);
        let mut plot = Vec::new();
        for i in 0..2 * g {
            let path = ls.alpha(model, i)?;
            let w = line_integrals(&path, &dlog, &self.numerics.chen)?[0];
            winding = winding.max(w.norm());
            let branch = log_f_branch(&path, &data.f, w, self.tol().winding.max(1e-6))?;
            let cl = match (branch.first(), branch.last()) {
                (Some(a), Some(b)) => (b.1 - a.1).norm(),
                _ => 0.0,
            };
            closure = closure.max(cl);
            loops.push(vec![format!("alpha_{}", i + 1), num(w.re), num(w.im), num(cl)]);
            plot.push(PlotPath { label: format!("alpha'_{}", i + 1), points: ls.alpha_prime[i].sample(24)? });
        }
        plot.push(PlotPath { label: "beta_Q".into(), points: ls.beta_q.sample(24)? });
        rep.verdicts.push(Verdict::below("f-winding", "max |int_{alpha_i} df/f| over the V-subgroup loops", winding, self.tol().winding));
        rep.verdicts.push(Verdict::below("log-closure", "max change of the continued log f around each alpha_i", closure, self.tol().log_closure));
        rep.data = json!({
            "genus": g,
            "n": n,
            "intersection": ls.intersection,
            "m": ls.m,
            "ramification_q": ls.ramification_q,
            "candidate_coefficients": ls.coefficients,
            "winding_alpha_prime": ls.winding_alpha_prime.iter().map(|z| f64s(*z)).collect::<Vec<_>>(),
            "winding_beta": f64s(ls.winding_beta),
        });
        self.artifacts.tables.insert("loops".into(), loops);
        self.artifacts.plots.insert("loops".into(), render_paths(model, "loops alpha' and beta_Q", &plot, &self.markers()));
        self.ctx.loops = Some(ls);
        Ok(())
    }

    fn markers(&self) -> Vec<Marker> {
        let Some(d) = &self.ctx.data else { return Vec::new() };
        let mut out = vec![Marker { label: "P".into(), x: d.p.0 }];
        for (label, pt) in [("Q", d.q), ("R", d.r)] {
            if let Some((x, _)) = pt.xy() {
                out.push(Marker { label: label.into(), x });
            }
        }
        out
    }

    fn periods(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model = need(&self.ctx.model, "the curve")?;
        let data = need(&self.ctx.data, "the curve data")?;
        let ls = need(&self.ctx.loops, "the loop system")?;
        let n = *need(&self.ctx.n, "the divisor order N")?;
        let fr = PeriodFrame::compute(model, ls, &self.numerics.frame)?;
        let g = fr.genus;
        let ch = &fr.checks;
        let t = self.tol().clone();
        rep.verdicts.push(Verdict::below("period-symmetry", "max |A - A^T|", ch.symmetry, t.bilinear));
        rep.verdicts.push(Verdict::above("period-positivity", "smallest Cholesky pivot of Im A", ch.im_a_min_pivot, 0.0));
        rep.verdicts.push(Verdict::below("dual-basis", "max |int_{alpha'_i} dx_j - delta_ij|", ch.duality, t.duality));
        rep.verdicts.push(Verdict::below("alpha-dz", "max |int_{alpha_i} dz_j - N delta_ij| (and N A for i > g)", ch.alpha_dz, t.duality));
        rep.verdicts.push(Verdict::below("alpha-dx", "max |int_{alpha_i} dx_j - N delta_ij|", ch.alpha_dx, t.duality));
        match (ch.bilinear, ch.volume) {
            (Some(b), Some(v)) => {
                rep.verdicts.push(Verdict::below("bilinear", "max |int_C conj(dz_k) ^ dz_l - (A_lk - conj A_kl)|", b, t.bilinear));
                rep.verdicts.push(Verdict::below("volume", "max |int_C dx_a ^ dx_b - J_ab|", v, t.bilinear));
            }
            _ => rep.notes.push("surface checks of the bilinear relations were not run (options.volume_check = false)".into()),
        }
        let base = data.p;
        let nn = n as i64;
        let aj_n = abel_jacobi(model, &fr, base, &[(nn, data.q), (-nn, data.r)], &self.numerics.chen)?;
        let aj_1 = abel_jacobi(model, &fr, base, &[(1, data.q), (-1, data.r)], &self.numerics.chen)?;
        rep.verdicts.push(Verdict::below("torsion-n", "lattice residual of the Abel-Jacobi image of N(Q - R)", aj_n.residual, t.torsion_zero));
        if n > 1 {
            rep.verdicts.push(Verdict::above("torsion-1", "lattice residual of the Abel-Jacobi image of Q - R", aj_1.residual, t.torsion_nonzero));
        } else {
            rep.notes.push("N = 1: Q - R is itself principal, no non-torsion check".into());
        }
        let mut periods = Table::new(&["form", "loop", "re", "im", "re_hex", "im_hex"]);
        for k in 0..g {
            for l in 0..2 * g {
                let z = fr.dz_periods[k][l];
                periods.push(vec![format!("dz_{}", k + 1), format!("alpha'_{}", l + 1), num(z.re), num(z.im), hex_f64(z.re), hex_f64(z.im)]);
            }
        }
        rep.data = json!({
            "genus": g,
            "n": fr.n,
            "a": fr.a.iter().map(|r| r.iter().map(|z| cj(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "dz_periods": fr.dz_periods.iter().map(|r| r.iter().map(|z| cj(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "c": fr.c,
            "sigma": fr.sigma,
            "checks": ch,
            "abel_jacobi_n": aj_n.summary(),
            "abel_jacobi_1": aj_1.summary(),
        });
        self.artifacts.tables.insert("periods".into(), periods);
        self.ctx.frame = Some(fr);
        Ok(())
    }

    fn gamma(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model = need(&self.ctx.model, "the curve")?;
        let data = need(&self.ctx.data, "the curve data")?;
        let fr = need(&self.ctx.frame, "the period frame")?;
        let n = *need(&self.ctx.n, "the divisor order N")?;
        let gamma = trace_gamma(model, &data.f, &data.q, &data.r, n, &GammaOptions::default())?;
        let check = gamma.check(&data.f, 400)?;
        let per = gamma_periods(&gamma, &fr.dz, &self.numerics.chen)?;
        let worst = per.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        rep.verdicts.push(Verdict::equals("gamma-components", "number of arcs of f^-1([0, inf]) from Q to R", check.components as f64, n as f64));
        rep.verdicts.push(Verdict::below("gamma-real", "max |Im f| along gamma (|Im 1/f| where |f| > 1)", check.max_im_f, self.tol().gamma_im));
        rep.verdicts.push(Verdict::below("gamma-periods", "max |int_gamma dz_i|", worst, self.tol().gamma_period));
        rep.data = json!({ "check": check, "dz_integrals": per.iter().map(|z| cj(*z)).collect::<Vec<_>>() });
        let mut plot = Vec::new();
        for c in &gamma.components {
            plot.push(PlotPath { label: format!("gamma^{}", c.index + 1), points: c.sample(200)? });
        }
        if let Some(ls) = &self.ctx.loops {
            plot.push(PlotPath { label: "beta_Q".into(), points: ls.beta_q.sample(24)? });
        }
        self.artifacts.plots.insert("gamma".into(), render_paths(model, "level set gamma = f^-1([0, inf])", &plot, &self.markers()));
        self.ctx.cycle = Some(MotivicCycle { f: data.f.clone(), n, gamma: gamma.clone() });
        self.ctx.gamma = Some(gamma);
        Ok(())
    }

    fn regulator(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model = need(&self.ctx.model, "the curve")?;
        let data = need(&self.ctx.data, "the curve data")?;
        let fr = need(&self.ctx.frame, "the period frame")?;
        let z = need(&self.ctx.cycle, "the cycle")?;
        Mobius::from_function(&z.f)?;
        let ro = self.numerics.regulator;
        let tables = SurfaceTables::compute(model, z, fr, &ro)?;
        let g = fr.genus;
        let mut values = vec![vec![C::new(0.0, 0.0); 2 * g]; g];
        let mut table = Table::new(&[
            "i",
            "j",
            "re",
            "im",
            "surface_re",
            "surface_im",
            "boundary_re",
            "boundary_im",
            "decomposable_re",
            "decomposable_im",
            "re_hex",
            "im_hex",
        ]);
        let mut entries = Vec::new();
        for (i, row) in values.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let (v, e) = regulator_pair(z, fr, &tables, &FrameForm::dx(fr, j), &FrameForm::dz(g, i), &ro)?;
                *slot = v;
                let d = decomposable_regulator(data.f_at_p, fr, &FrameForm::dx(fr, j), &FrameForm::dz(g, i))?;
                let v = if self.normalize { v } else { v + d };
                table.push(vec![
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                    num(v.re),
                    num(v.im),
                    num(e.surface[0]),
                    num(e.surface[1]),
                    num(e.boundary[0]),
                    num(e.boundary[1]),
                    num(d.re),
                    num(d.im),
                    hex_f64(v.re),
                    hex_f64(v.im),
                ]);
                entries.push(json!({ "i": i + 1, "j": j + 1, "value": cj(v), "normalized": e, "decomposable": cj(d) }));
            }
        }
        // Disc identity for phi in {dx_j, dz_k} against psi = dz_i.
        let mut forms: Vec<DifferentialForm<f64>> = (0..2 * g).map(|j| FrameForm::dx(fr, j).to_form(fr)).collect();
        forms.extend(fr.dz.iter().cloned());
        let mut pairs = Vec::new();
        for a in 0..forms.len() {
            for i in 0..g {
                if a != 2 * g + i {
                    pairs.push((a, 2 * g + i));
                }
            }
        }
        let mut disc = Table::new(&["component", "phi", "psi", "disc_re", "disc_im", "chen_re", "chen_im", "relative_error"]);
        let label = |a: usize| if a < 2 * g { format!("dx_{}", a + 1) } else { format!("dz_{}", a - 2 * g + 1) };
        let mut worst = 0.0f64;
        for comp in &z.gamma.components {
            let d = disc_integrals(comp, &forms, &pairs, &ro.disc)?;
            let s = crate::chen::signature(comp, &forms, 2, &ro.chen)?;
            for (k, &(a, b)) in pairs.iter().enumerate() {
                let ch = s.two(a, b) - s.two(b, a);
                let scale = d[k].norm().max(ch.norm()).max(1e-300);
                let e = (d[k] - ch).norm() / scale;
                worst = worst.max(e);
                disc.push(vec![(comp.index + 1).to_string(), label(a), label(b), num(d[k].re), num(d[k].im), num(ch.re), num(ch.im), num(e)]);
            }
        }
        rep.verdicts.push(Verdict::below(
            "disc-identity",
            "max relative gap between int_D phi ^ psi and int_gamma^i (phi psi - psi phi)",
            worst,
            self.tol().disc,
        ));
        if !self.normalize {
            rep.notes.push("regulator values are for f as written: they include log f(P) int_C phi ^ psi".into());
        }
        rep.data = json!({ "lift": tables.lift, "cells": tables.cells, "normalized": self.normalize, "f_at_p": cj(data.f_at_p), "entries": entries });
        self.artifacts.tables.insert("regulator".into(), table);
        self.artifacts.tables.insert("disc".into(), disc);
        self.ctx.tables = Some(tables);
        self.ctx.regulator = Some(values);
        Ok(())
    }

    fn carlson(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model = need(&self.ctx.model, "the curve")?;
        let data = need(&self.ctx.data, "the curve data")?;
        let ls = need(&self.ctx.loops, "the loop system")?;
        let fr = need(&self.ctx.frame, "the period frame")?;
        let li = LoopIntegrals::compute(model, ls, fr, &data.f, &self.numerics.chen)?;
        let g = fr.genus;
        let zeta = zeta_duality_defect(fr, &li);
        rep.verdicts.push(Verdict::below("zeta-duality", "max |int_{zeta_j} dx_l - N int_C dx_l ^ dz_j|", zeta, self.tol().duality));
        // Shuffle of the recorded length-two integrals against products of
        // length-one integrals.
        let mut shuffle = 0.0f64;
        for l in 0..2 * g {
            let k = li.single[l].len();
            for a in 0..k {
                for b in 0..k {
                    let lhs = li.double[l][a][b] + li.double[l][b][a];
                    let rhs = li.single[l][a] * li.single[l][b];
                    shuffle = shuffle.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0));
                }
            }
        }
        rep.verdicts.push(Verdict::below("loop-shuffle", "max shuffle defect of the loop integrals", shuffle, self.tol().chen));
        // For f that does not wind, int (df/f) w equals int log f w.
        let mut oracle = 0.0f64;
        for l in 0..2 * g {
            let path = ls.alpha(model, l)?;
            for i in 0..g {
                let direct = log_weighted_integral(&path, &data.f, &fr.dz[i], li.single[l][0], self.tol().winding.max(1e-6))?;
                let via = li.dlog_dz(l, i);
                oracle = oracle.max((direct - via).norm() / direct.norm().max(via.norm()).max(1e-300));
            }
        }
        rep.verdicts.push(Verdict::below("log-weighted", "max relative gap of int (df/f) dz_i and int log f dz_i along alpha_l", oracle, self.tol().chen.max(1e-8)));
        let mut gmax = 0.0f64;
        for j in 0..2 * g {
            for k in 0..2 * g {
                gmax = gmax.max(evaluate_g(&li, fr, k, j)?.shuffle_defect);
            }
        }
        rep.verdicts.push(Verdict::below("dlog-shuffle", "max |int (df/f) dx_k + int dx_k (df/f)| along alpha_j", gmax, self.tol().chen));
        let mut table = Table::new(&["i", "j", "re", "im", "tensor_re", "tensor_im", "re_hex", "im_hex"]);
        for i in 0..g {
            for j in 0..2 * g {
                let e = carlson_entry(fr, &li, i, j);
                table.push(vec![
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                    num(e.value.re),
                    num(e.value.im),
                    num(e.tensor_value.re),
                    num(e.tensor_value.im),
                    hex_f64(e.value.re),
                    hex_f64(e.value.im),
                ]);
            }
        }
        rep.data = json!({
            "zeta_duality": zeta,
            "error_estimate": li.error_estimate,
            "dlog_periods": (0..2 * g).map(|l| cj(li.single[l][0])).collect::<Vec<_>>(),
        });
        self.artifacts.tables.insert("carlson".into(), table);
        self.ctx.loop_integrals = Some(li);
        Ok(())
    }

    fn entry_pairs(fr: &PeriodFrame<f64>, li: &LoopIntegrals<f64>, reg: &[Vec<C<f64>>]) -> Vec<EntryPair<f64>> {
        let g = fr.genus;
        (0..g)
            .flat_map(|i| (0..2 * g).map(move |j| (i, j)))
            .map(|(i, j)| EntryPair { carlson: carlson_entry(fr, li, i, j), regulator: reg[i][j] })
            .collect()
    }

    fn compare(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let model = need(&self.ctx.model, "the curve")?;
        let data = need(&self.ctx.data, "the curve data")?;
        let fr = need(&self.ctx.frame, "the period frame")?;
        let li = need(&self.ctx.loop_integrals, "the loop integrals")?;
        let reg = need(&self.ctx.regulator, "the regulator table")?;
        let tables = need(&self.ctx.tables, "the surface tables")?;
        let z = need(&self.ctx.cycle, "the cycle")?;
        let n = fr.n;
        let g = fr.genus;
        let entries = Self::entry_pairs(fr, li, reg);
        let bound = self.config.options.kappa_bound.unwrap_or(2 * (2 * g as i64 + 1) * (n as i64) * (n as i64));
        let fit = fit_kappa(&entries, g, n, bound)?;
        let rows = compare_entries(&entries, &fit)?;
        let best = fit.score(fit.fitted).expect("fitted kappa was scanned");
        let runner_up = fit.scan.iter().filter(|s| s.kappa != fit.fitted).map(|s| s.max_full).fold(f64::INFINITY, f64::min);
        let chance = rows.iter().map(|r| r.at_fitted.full_chance_level).fold(f64::INFINITY, f64::min);
        rep.verdicts.push(Verdict::below(
            "proportionality",
            "max relative residual of E - kappa R modulo the 2 pi i periods of dz_i, at the fitted kappa",
            best.max_full,
            self.tol().main,
        ));
        rep.verdicts.push(Verdict::below(
            "fit-separation",
            "residual at the fitted kappa relative to the best residual at any other kappa",
            best.max_full / runner_up.max(1e-300),
            1e-3,
        ));
        let stated = fit.score(fit.stated).map(|s| s.max_full).unwrap_or(f64::NAN);
        if fit.fitted == fit.stated {
            rep.notes.push(format!("fitted constant {} equals (2g+1)N", fit.fitted));
        } else {
            let mut m = format!("fitted constant {} differs from (2g+1)N = {} (residual {:.2e} there)", fit.fitted, fit.stated, stated);
            if fit.fitted == fit.doubled {
                m.push_str(&format!("; it equals 2(2g+1)N = {}", fit.doubled));
            }
            if fit.fitted == fit.n_squared {
                m.push_str(&format!("; it equals (2g+1)N^2 = {}", fit.n_squared));
            }
            rep.notes.push(m);
        }
        if best.max_sublattice > self.tol().main {
            rep.notes.push(format!(
                "the relation needs every generator 2 pi i int_{{alpha_l}} dz_i: modulo the single generator of alpha_sigma(j) the largest residual is {:.2e}",
                best.max_sublattice
            ));
        }
        let mut cmp = Table::new(&["i", "j", "carlson_re", "carlson_im", "regulator_re", "regulator_im", "ratio_re", "ratio_im", "residual_fitted", "sublattice_fitted", "chance_level", "residual_stated", "coefficients"]);
        for r in &rows {
            cmp.push(vec![
                (r.i + 1).to_string(),
                (r.j + 1).to_string(),
                num(r.carlson[0]),
                num(r.carlson[1]),
                num(r.regulator[0]),
                num(r.regulator[1]),
                num(r.ratio[0]),
                num(r.ratio[1]),
                num(r.at_fitted.full),
                num(r.at_fitted.sublattice),
                num(r.at_fitted.full_chance_level),
                num(r.at_stated.full),
                r.at_fitted.full_coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
            ]);
        }
        let mut scan = Table::new(&["kappa", "max_full", "max_sublattice"]);
        for s in &fit.scan {
            scan.push(vec![s.kappa.to_string(), num(s.max_full), num(s.max_sublattice)]);
        }
        let ident = loop_identities(fr, li, tables, &z.gamma, &self.numerics.chen)?;
        let iw = ident.iter().map(|x| x.relative_residual).fold(0.0, f64::max);
        rep.verdicts.push(Verdict::below(
            "loop-identity",
            "max relative residual of int_{alpha_l} (df/f) dz_i against its surface form",
            iw,
            self.tol().loop_identity,
        ));
        let mut idt = Table::new(&["l", "i", "loop_re", "loop_im", "surface_re", "surface_im", "relative_residual", "coefficients"]);
        for x in &ident {
            idt.push(vec![
                (x.l + 1).to_string(),
                (x.i + 1).to_string(),
                num(x.loop_value[0]),
                num(x.loop_value[1]),
                num(x.surface_value[0]),
                num(x.surface_value[1]),
                num(x.relative_residual),
                x.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
            ]);
        }
        let mut rerun = serde_json::Value::Null;
        if self.config.options.rerun {
            let opts = &self.config.options;
            let ls2 = LoopBuilder {
                model,
                f: &data.f,
                p: data.p,
                q: data.q,
                r: data.r,
                n_div: n,
                opts: LoopOptions { variant: opts.rerun_loop_variant, ..LoopOptions::default() },
            }
            .build()?;
            let fo = FrameOptions { volume_check: false, ..self.numerics.frame };
            let fr2 = PeriodFrame::compute(model, &ls2, &fo)?;
            let li2 = LoopIntegrals::compute(model, &ls2, &fr2, &data.f, &self.numerics.chen)?;
            let ro2 = RegulatorOptions { lift: opts.rerun_lift, ..self.numerics.regulator };
            let t2 = SurfaceTables::compute(model, z, &fr2, &ro2)?;
            let mut reg2 = vec![vec![C::new(0.0, 0.0); 2 * g]; g];
            for (i, row) in reg2.iter_mut().enumerate() {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = regulator_pair(z, &fr2, &t2, &FrameForm::dx(&fr2, j), &FrameForm::dz(g, i), &ro2)?.0;
                }
            }
            let entries2 = Self::entry_pairs(&fr2, &li2, &reg2);
            let changes = entry_changes(&entries, &entries2, fit.fitted)?;
            let worst = changes.iter().map(|c| c.reduced_change).fold(0.0, f64::max);
            rep.verdicts.push(Verdict::below(
                "choice-independence",
                "max reduced change of E - kappa R under another branch lift and loop system",
                worst,
                self.tol().independence,
            ));
            let frame_change = (0..g)
                .flat_map(|k| (0..2 * g).map(move |l| (k, l)))
                .map(|(k, l)| (fr2.dz_periods[k][l] - fr.dz_periods[k][l]).norm())
                .fold(0.0, f64::max);
            rerun = json!({
                "lift": opts.rerun_lift,
                "loop_variant": opts.rerun_loop_variant,
                "frame_change": frame_change,
                "changes": changes,
            });
        } else {
            rep.notes.push("independence rerun disabled (options.rerun = false)".into());
        }
        rep.data = json!({
            "kappa": {
                "stated": fit.stated,
                "doubled": fit.doubled,
                "n_squared": fit.n_squared,
                "fitted": fit.fitted,
                "bound": bound,
                "residual_fitted": best.max_full,
                "residual_stated": stated,
                "runner_up": runner_up,
                "chance_level": chance,
            },
            "entries": rows,
            "loop_identities": ident,
            "rerun": rerun,
        });
        self.artifacts.tables.insert("compare".into(), cmp);
        self.artifacts.tables.insert("kappa_scan".into(), scan);
        self.artifacts.tables.insert("loop_identity".into(), idt);
        Ok(())
    }

    fn mhs(&mut self, rep: &mut StageReport) -> Result<(), StageError> {
        let o = &self.config.options;
        let r = run_selftest(self.seed, o.mhs_cases, o.mhs_diagrams);
        for (id, desc, s) in [
            ("baer-additivity", "failed cases of additivity of Carlson classes under Baer sum", &r.baer_additivity),
            ("difference-exactness", "failed cross diagrams for exactness of the generalized Baer difference", &r.difference_exactness),
            ("pushforward-identity", "failed cases of the pushforward identity for the Baer difference", &r.pushforward_identity),
        ] {
            rep.verdicts.push(Verdict::equals(id, desc, s.failures as f64, 0.0));
            if s.cases == 0 {
                rep.verdicts.push(Verdict::above(&format!("{id}-cases"), "number of cases run", 0.0, 0.0));
            }
        }
        rep.data = serde_json::to_value(&r).unwrap_or_default();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_orders_dependencies() {
        assert_eq!(
            Stage::closure(&[Stage::Compare]),
            vec![Stage::Verify, Stage::Homology, Stage::Periods, Stage::Gamma, Stage::Regulator, Stage::Carlson, Stage::Compare]
        );
        assert_eq!(Stage::closure(&[Stage::MhsSelftest]), vec![Stage::MhsSelftest]);
    }

    #[test]
    fn target_parsing() {
        assert_eq!("all".parse::<Target>().unwrap(), Target::All);
        assert_eq!("mhs-selftest".parse::<Target>().unwrap(), Target::Stage(Stage::MhsSelftest));
        assert!("nope".parse::<Target>().is_err());
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1 2".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1 2,\"x,y\"\n");
    }
}
