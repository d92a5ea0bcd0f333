//! Report schema v1.

use serde::Serialize;
use serde_json::Value;

use super::Stage;

pub const SCHEMA: &str = "regulab-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Pass,
    /// Ran to completion but a verdict failed.
    Fail,
    /// Operational failure (bad input, unsupported case, non-convergence).
    Error,
    /// A stage it depends on did not complete.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub id: String,
    pub description: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<"`, `">"` or `"=="`.
    pub relation: String,
    pub pass: bool,
}

impl Verdict {
    pub fn below(id: &str, description: &str, value: f64, threshold: f64) -> Self {
        Verdict {
            id: id.into(),
            description: description.into(),
            value,
            threshold,
            relation: "<".into(),
            pass: value < threshold,
        }
    }

    pub fn above(id: &str, description: &str, value: f64, threshold: f64) -> Self {
        Verdict {
            id: id.into(),
            description: description.into(),
            value,
            threshold,
            relation: ">".into(),
            pass: value > threshold,
        }
    }

    pub fn equals(id: &str, description: &str, value: f64, expected: f64) -> Self {
        Verdict {
            id: id.into(),
            description: description.into(),
            value,
            threshold: expected,
            relation: "==".into(),
            pass: value == expected,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: Stage,
    pub status: StageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub verdicts: Vec<Verdict>,
    /// Findings worth a reader's attention that are not pass/fail.
    pub notes: Vec<String>,
    pub data: Value,
}

impl StageReport {
    pub fn new(stage: Stage) -> Self {
        StageReport { stage, status: StageStatus::Pass, message: None, verdicts: Vec::new(), notes: Vec::new(), data: Value::Null }
    }

    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub stage_seconds: Vec<(Stage, f64)>,
    pub total_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: String,
    pub version: u32,
    pub name: String,
    pub seed: u64,
    pub stages: Vec<StageReport>,
    pub all_pass: bool,
    pub operational_error: bool,
    /// Wall-clock data; the only part that differs between identical runs.
    pub timing: Timing,
}

impl RunReport {
    pub fn stage(&self, s: Stage) -> Option<&StageReport> {
        self.stages.iter().find(|r| r.stage == s)
    }

    /// 0 when every verdict passes, 2 on a failed verdict, 1 on an
    /// operational error.
    pub fn exit_code(&self) -> i32 {
        if self.operational_error {
            1
        } else if self.all_pass {
            0
        } else {
            2
        }
    }

    /// The report without the timing block, for byte comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// C99 hexadecimal float, e.g. `0x1.8p+1`; exact for every finite `f64`.
pub fn hex_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{mant:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    format!("{sign}0x{lead}{frac}p{e:+}")
}

/// `[re, im]` in decimal and hexadecimal.
pub fn complex_json(re: f64, im: f64) -> Value {
    serde_json::json!({ "re": re, "im": im, "hex": [hex_f64(re), hex_f64(im)] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_hex(s: &str) -> f64 {
        let (neg, s) = s.strip_prefix('-').map(|r| (true, r)).unwrap_or((false, s));
        let s = s.strip_prefix("0x").unwrap();
        let (m, e) = s.split_once('p').unwrap();
        let (int, frac) = m.split_once('.').unwrap_or((m, ""));
        let mut v = int.parse::<u64>().unwrap() as f64;
        let mut scale = 1.0 / 16.0;
        for c in frac.chars() {
            v += c.to_digit(16).unwrap() as f64 * scale;
            scale /= 16.0;
        }
        let v = v * 2f64.powi(e.parse::<i32>().unwrap());
        if neg {
            -v
        } else {
            v
        }
    }

    #[test]
    fn hex_known_values() {
        assert_eq!(hex_f64(3.0), "0x1.8p+1");
        assert_eq!(hex_f64(1.0), "0x1p+0");
        assert_eq!(hex_f64(-0.5), "-0x1p-1");
        assert_eq!(hex_f64(0.0), "0x0p+0");
    }

    #[test]
    fn hex_roundtrip() {
        for x in [std::f64::consts::PI, -1.0e-300, 5e-324, 1.7976931348623157e308, 0.1] {
            assert_eq!(parse_hex(&hex_f64(x)), x, "{x}");
        }
    }
}
