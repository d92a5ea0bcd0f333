use std::path::{Path, PathBuf};
use std::process::Command;

use regulab::pipeline::{run, RunConfig, RunOptions, Stage, StageStatus, Target};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regulab"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const SMALL_MHS: &str = r#"
name = "small"
seed = 3
[options]
mhs_cases = 10
mhs_diagrams = 3
"#;

#[test]
fn report_is_deterministic() {
    let c = RunConfig::from_toml(SMALL_MHS).unwrap();
    let (a, _) = run(&c, Target::Stage(Stage::MhsSelftest), &RunOptions::default());
    let (b, _) = run(&c, Target::Stage(Stage::MhsSelftest), &RunOptions::default());
    assert_eq!(a.deterministic_json(), b.deterministic_json());
    let v: serde_json::Value = serde_json::from_str(&a.deterministic_json()).unwrap();
    assert_eq!(v["schema"], "regulab-report");
    assert_eq!(v["version"], 1);
    assert!(v.get("timing").is_none());
    let (c2, _) = run(&c, Target::Stage(Stage::MhsSelftest), &RunOptions { seed: Some(4), ..RunOptions::default() });
    assert_eq!(c2.seed, 4);
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.toml", SMALL_MHS);
    let out = dir.path().join("out");
    let st = bin().args(["mhs-selftest", "--config"]).arg(&ok).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let json = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(json.contains("\"timing\""));

    // A verdict that cannot pass gives 2.
    let strict = write(
        dir.path(),
        "strict.toml",
        r#"
name = "strict"
[curve]
kind = "hyperelliptic"
p = "x^5 - 1"
[points]
p = ["0", "i"]
q = ["1", "0"]
r = ["zeta(5,1)", "0"]
[function]
numerator = "x - 1"
denominator = "x - zeta(5,1)"
[tolerances]
chen = 1e-300
[options]
chen_samples = 3
"#,
    );
    let st = bin().args(["verify", "--config"]).arg(&strict).arg("--out").arg(dir.path().join("o2")).status().unwrap();
    assert_eq!(st.code(), Some(2));

    // Operational errors give 1.
    let bad = write(dir.path(), "bad.toml", "name = \"bad\"\nbogus = 1\n");
    let o = bin().args(["all", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bogus"), "{err}");
    let st = bin().args(["verify", "--config"]).arg(dir.path().join("missing.toml")).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let st = bin().args(["nonsense", "--config"]).arg(&ok).status().unwrap();
    assert_eq!(st.code(), Some(1));
    // Verify without a curve is an operational error recorded in the report.
    let st = bin().args(["verify", "--config"]).arg(&ok).arg("--out").arg(dir.path().join("o3")).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn config_diagnostics() {
    let e = RunConfig::from_toml("name = \"x\"\n[curve]\nkind = \"elliptic\"\n").unwrap_err().to_string();
    assert!(e.contains("elliptic") && e.contains("line"), "{e}");
    let c = RunConfig::from_toml("name = \"x\"\n[curve]\nkind = \"hyperelliptic\"\n").unwrap();
    let e = c.curve_config().unwrap().build::<f64>().unwrap_err().to_string();
    assert!(e.contains("curve.p"), "{e}");
    let c = RunConfig::from_toml(
        "name = \"x\"\n[curve]\nkind = \"hyperelliptic\"\np = \"x^5 - 1\"\n[points]\np = [\"0\", \"1\"]\nq = [\"1\", \"0\"]\nr = \"infinity\"\n[function]\nnumerator = \"x - 1\"\ndenominator = \"1\"\n",
    )
    .unwrap();
    let m = c.curve_config().unwrap().build::<f64>().unwrap();
    let e = c.curve_data(&m).unwrap_err().to_string();
    assert!(e.contains("not on the curve"), "{e}");
}

#[test]
fn fermat_regulator_needs_mobius() {
    let mut c = RunConfig::load(&configs().join("fermat3.toml")).unwrap();
    c.options.chen_samples = 5;
    c.options.volume_check = false;
    let (r, _) = run(&c, Target::Stage(Stage::Regulator), &RunOptions::default());
    let st = r.stage(Stage::Regulator).unwrap();
    assert_eq!(st.status, StageStatus::Error);
    assert!(st.message.as_deref().unwrap_or("").contains("degree one"));
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn example_configs_parse() {
    for e in std::fs::read_dir(configs()).unwrap() {
        let p = e.unwrap().path();
        let c = RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        if let Some(cc) = &c.curve {
            let m = cc.build::<f64>().unwrap();
            c.curve_data(&m).unwrap();
        }
    }
}

#[test]
fn unnormalized_adds_decomposable_term() {
    let mut c = RunConfig::load(&configs().join("genus2.toml")).unwrap();
    c.options.chen_samples = 5;
    c.options.volume_check = false;
    let (a, ta) = run(&c, Target::Stage(Stage::Regulator), &RunOptions::default());
    let (b, tb) = run(&c, Target::Stage(Stage::Regulator), &RunOptions { unnormalized: true, ..RunOptions::default() });
    assert_eq!(a.exit_code(), 0);
    assert_eq!(b.exit_code(), 0);
    let (ra, rb) = (&ta.tables["regulator"], &tb.tables["regulator"]);
    let col = |name: &str| ra.header.iter().position(|h| h == name).unwrap();
    let f = |s: &str| s.parse::<f64>().unwrap();
    for (x, y) in ra.rows.iter().zip(&rb.rows) {
        for (v, d) in [("re", "decomposable_re"), ("im", "decomposable_im")] {
            let want = f(&x[col(v)]) + f(&x[col(d)]);
            assert!((f(&y[col(v)]) - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }
    // f(P) = 1/zeta_5 here, so the term is not zero.
    assert!(ra.rows.iter().any(|r| f(&r[col("decomposable_im")]).abs() > 1e-3));
}
