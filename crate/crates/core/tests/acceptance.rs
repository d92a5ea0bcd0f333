//! Acceptance suite: one line per criterion on the genus-2 curve
//! y^2 = x^5 - 1 (N = 2) and the Fermat cubic (N = 3).

use std::path::PathBuf;

use regulab::pipeline::{run, RunConfig, RunOptions, RunReport, Stage, StageStatus, Target};

fn config(name: &str) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(&path).unwrap()
}

fn value(r: &RunReport, s: Stage, id: &str) -> (f64, bool) {
    let v = r.stage(s).and_then(|st| st.verdict(id));
    v.map(|v| (v.value, v.pass)).unwrap_or((f64::NAN, false))
}

fn seconds(r: &RunReport, s: Stage) -> f64 {
    r.timing.stage_seconds.iter().find(|(t, _)| *t == s).map(|x| x.1).unwrap_or(f64::NAN)
}

struct Line {
    k: usize,
    pass: bool,
    text: String,
}

fn all(r: &RunReport, checks: &[(Stage, &str)]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (s, id) in checks {
        let (v, p) = value(r, *s, id);
        ok &= p;
        parts.push(format!("{id}={v:.2e}"));
    }
    (ok, parts.join(" "))
}

#[test]
fn acceptance() {
    let g2 = config("genus2.toml");
    let (r, _) = run(&g2, Target::All, &RunOptions::default());
    let fermat = config("fermat3.toml");
    let (rf, _) = run(&fermat, Target::All, &RunOptions::default());
    let mut lines: Vec<Line> = Vec::new();

    let samples = r.stage(Stage::Verify).map(|s| s.data["chen_suite"]["samples"].as_u64().unwrap_or(0)).unwrap_or(0);
    let (v, p) = value(&r, Stage::Verify, "chen-identities");
    let t = seconds(&r, Stage::Verify);
    lines.push(Line {
        k: 1,
        pass: p && samples >= 100 && v < 1e-8 && t < 120.0,
        text: format!("iterated-integral identities: {samples} samples, max relative error {v:.2e} (< 1e-8), {t:.1} s (< 120 s)"),
    });

    let (ok, txt) = all(
        &r,
        &[
            (Stage::Homology, "symplectic-intersection"),
            (Stage::Periods, "bilinear"),
            (Stage::Periods, "dual-basis"),
            (Stage::Periods, "alpha-dz"),
        ],
    );
    lines.push(Line { k: 2, pass: ok, text: format!("homology and periods: {txt}") });

    let (ok, txt) = all(&r, &[(Stage::Homology, "f-winding"), (Stage::Homology, "log-closure")]);
    lines.push(Line { k: 3, pass: ok, text: format!("V-subgroup loops: {txt}") });

    let (ok, txt) = all(&r, &[(Stage::Periods, "torsion-n"), (Stage::Periods, "torsion-1")]);
    lines.push(Line { k: 4, pass: ok, text: format!("torsion of Q - R: {txt} (N(Q-R) < 1e-6, Q-R > 1e-3)") });

    let (ok, txt) = all(&r, &[(Stage::Gamma, "gamma-components"), (Stage::Gamma, "gamma-real"), (Stage::Gamma, "gamma-periods")]);
    lines.push(Line { k: 5, pass: ok, text: format!("level set gamma: {txt}") });

    let (v, p) = value(&r, Stage::Regulator, "disc-identity");
    let t = seconds(&r, Stage::Regulator);
    lines.push(Line {
        k: 6,
        pass: p && v < 1e-4 && t < 300.0,
        text: format!("disc identity: max relative gap {v:.2e} (< 1e-4), regulator stage {t:.1} s for all pairs (< 300 s per pair)"),
    });

    let cmp = r.stage(Stage::Compare);
    let kappa = cmp.map(|s| s.data["kappa"].clone()).unwrap_or_default();
    let (v, p) = value(&r, Stage::Compare, "proportionality");
    let (sep, sep_ok) = value(&r, Stage::Compare, "fit-separation");
    let entries = cmp.map(|s| s.data["entries"].as_array().map(|a| a.len()).unwrap_or(0)).unwrap_or(0);
    let total = r.timing.total_seconds;
    lines.push(Line {
        k: 7,
        pass: p && sep_ok && v < 1e-3 && entries >= 4 && total < 1800.0,
        text: format!(
            "Carlson side vs regulator: {entries} entries, residual {v:.2e} (< 1e-3) at fitted constant {} \
             (stated (2g+1)N = {}: residual {:.2e}; 2(2g+1)N = {}; (2g+1)N^2 = {}), separation {sep:.1e}, run {total:.0} s",
            kappa["fitted"], kappa["stated"], kappa["residual_stated"].as_f64().unwrap_or(f64::NAN), kappa["doubled"], kappa["n_squared"]
        ),
    });
    if let Some(s) = cmp {
        for n in &s.notes {
            println!("    {n}");
        }
    }

    let (v, p) = value(&r, Stage::Compare, "choice-independence");
    lines.push(Line { k: 8, pass: p && v < 1e-4, text: format!("branch lift and loop choice: max reduced change {v:.2e} (< 1e-4)") });

    let mhs = r.stage(Stage::MhsSelftest);
    let cases = mhs.map(|s| s.data["baer_additivity"]["cases"].as_u64().unwrap_or(0)).unwrap_or(0);
    let diagrams = mhs.map(|s| s.data["difference_exactness"]["cases"].as_u64().unwrap_or(0)).unwrap_or(0);
    let t = seconds(&r, Stage::MhsSelftest);
    let ok = mhs.map(|s| s.status == StageStatus::Pass).unwrap_or(false);
    lines.push(Line {
        k: 9,
        pass: ok && cases >= 200 && t < 60.0,
        text: format!("exact extension suite: {cases} extensions, {diagrams} cross diagrams, no failures = {ok}, {t:.1} s (< 60 s)"),
    });

    let (ok2, t2) = all(
        &rf,
        &[
            (Stage::Verify, "divisor"),
            (Stage::Homology, "symplectic-intersection"),
            (Stage::Periods, "bilinear"),
            (Stage::Periods, "dual-basis"),
            (Stage::Periods, "alpha-dz"),
        ],
    );
    let (ok3, t3) = all(&rf, &[(Stage::Homology, "f-winding"), (Stage::Homology, "log-closure")]);
    let (ok5, t5) = all(&rf, &[(Stage::Gamma, "gamma-components"), (Stage::Gamma, "gamma-real"), (Stage::Gamma, "gamma-periods")]);
    let n = value(&rf, Stage::Verify, "divisor").0;
    lines.push(Line {
        k: 10,
        pass: ok2 && ok3 && ok5 && n == 3.0,
        text: format!("Fermat cubic: {t2} {t3} {t5}"),
    });

    for l in &lines {
        println!("criterion {:>2}: {} - {}", l.k, if l.pass { "PASS" } else { "FAIL" }, l.text);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.k).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
