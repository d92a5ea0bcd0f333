//! SVG plots of paths projected to the x-plane, colored by sheet.

use std::fmt::Write;

use crate::curve::CurveModel;

/// A labeled polyline of `(x, y)` samples on the curve.
#[derive(Clone, Debug)]
pub struct PlotPath {
    pub label: String,
    pub points: Vec<(num_complex::Complex<f64>, num_complex::Complex<f64>)>,
}

#[derive(Clone, Debug)]
pub struct Marker {
    pub label: String,
    pub x: num_complex::Complex<f64>,
}

const SHEET_COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const SIZE: f64 = 640.0;
const LEGEND: f64 = 200.0;

fn sheet_of(model: &CurveModel<f64>, x: num_complex::Complex<f64>, y: num_complex::Complex<f64>) -> usize {
    match model.y_values(x) {
        Ok(ys) => ys
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - y).norm().partial_cmp(&(b.1 - y).norm()).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(k, _)| k)
            .unwrap_or(0),
        Err(_) => 0,
    }
}

/// Renders branch points, markers and paths. Each path is split into runs
/// on one sheet (relative to the principal branch of `y`).
pub fn render_paths(model: &CurveModel<f64>, title: &str, paths: &[PlotPath], markers: &[Marker]) -> String {
    let branch: Vec<num_complex::Complex<f64>> = model.branch_points().map(|b| b.to_vec()).unwrap_or_default();
    let mut xs: Vec<num_complex::Complex<f64>> = branch.clone();
    xs.extend(markers.iter().map(|m| m.x));
    for p in paths {
        xs.extend(p.points.iter().map(|q| q.0));
    }
    let finite: Vec<_> = xs.into_iter().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
    if !finite.is_empty() {
        lo_re = finite.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        hi_re = finite.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        lo_im = finite.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
        hi_im = finite.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
    }
    let span = (hi_re - lo_re).max(hi_im - lo_im).max(1e-9) * 1.1;
    let (cx, cy) = ((lo_re + hi_re) / 2.0, (lo_im + hi_im) / 2.0);
    let map = |z: num_complex::Complex<f64>| -> (f64, f64) { (SIZE / 2.0 + (z.re - cx) / span * SIZE, SIZE / 2.0 - (z.im - cy) / span * SIZE) };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = SIZE + LEGEND,
        h = SIZE
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, SIZE + LEGEND, SIZE);
    let _ = writeln!(s, r#"<text x="8" y="16">{}</text>"#, escape(title));
    for p in paths {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut sheet = usize::MAX;
        let flush = |s: &mut String, run: &[(f64, f64)], sheet: usize| {
            if run.len() < 2 {
                return;
            }
            let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.4" points="{}"/>"#,
                SHEET_COLORS[sheet % SHEET_COLORS.len()],
                pts.join(" ")
            );
        };
        for &(x, y) in &p.points {
            let k = sheet_of(model, x, y);
            let q = map(x);
            if k != sheet && !run.is_empty() {
                run.push(q);
                flush(&mut s, &run, sheet);
                run = vec![q];
            } else {
                run.push(q);
            }
            sheet = k;
        }
        if sheet != usize::MAX {
            flush(&mut s, &run, sheet);
        }
    }
    for e in &branch {
        let (a, b) = map(*e);
        let _ = writeln!(s, r#"<circle cx="{a:.2}" cy="{b:.2}" r="3.5" fill="black"/>"#);
    }
    for m in markers {
        if !(m.x.re.is_finite() && m.x.im.is_finite()) {
            continue;
        }
        let (a, b) = map(m.x);
        let _ = writeln!(s, r#"<circle cx="{a:.2}" cy="{b:.2}" r="4" fill="none" stroke="black"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, a + 6.0, b - 6.0, escape(&m.label));
    }
    let lx = SIZE + 10.0;
    let _ = writeln!(s, r#"<text x="{lx}" y="20">paths</text>"#);
    for (k, p) in paths.iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{lx}" y="{:.0}">{}</text>"#, 40.0 + 16.0 * k as f64, escape(&p.label));
    }
    let base = 60.0 + 16.0 * paths.len() as f64;
    let sheets = model.n().unwrap_or(1).min(SHEET_COLORS.len());
    for k in 0..sheets {
        let yk = base + 16.0 * k as f64;
        let _ = writeln!(s, r#"<rect x="{lx}" y="{:.0}" width="10" height="10" fill="{}"/>"#, yk - 9.0, SHEET_COLORS[k]);
        let _ = writeln!(s, r#"<text x="{:.0}" y="{yk:.0}">sheet {k}</text>"#, lx + 16.0);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::expr::parse_poly;

    #[test]
    fn empty_plot_is_valid() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let s = render_paths(&m, "empty", &[], &[]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 0);
    }
}
