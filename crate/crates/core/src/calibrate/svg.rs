use std::fmt::Write;

use super::{CalibrationReport, RocCurve};

const SIZE: f64 = 320.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn px(x: f64) -> f64 {
    MARGIN + x.clamp(0.0, 1.0) * SIZE
}

fn py(y: f64) -> f64 {
    MARGIN + (1.0 - y.clamp(0.0, 1.0)) * SIZE
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let full = SIZE + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999" stroke-dasharray="4 3"/>"##,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for t in 0..=10 {
        let v = t as f64 / 10.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{v:.1}</text>"#,
            px(v),
            py(0.0) + 14.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#,
            px(0.0) - 4.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{title}</text>"#, px(0.5));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        px(0.5),
        py(0.0) + 30.0
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">{y_label}</text>"#,
        py(0.5),
        py(0.5)
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
        coords.join(" ")
    );
}

/// Reliability diagram: bin means against observed rates, plus the
/// isotonic step function.
pub fn reliability_svg(report: &CalibrationReport) -> String {
    let mut out = String::new();
    frame(
        &mut out,
        &format!("{} (score {:.3})", report.method, report.calibration_score),
        "estimate",
        "observed positive rate",
    );
    let iso = &report.isotonic;
    let mut steps = Vec::new();
    for (k, v) in iso.values.iter().enumerate() {
        let start = if k == 0 { 0.0 } else { iso.breakpoints[k] };
        let end = iso.breakpoints.get(k + 1).copied().unwrap_or(1.0);
        steps.push((start, *v));
        steps.push((end, *v));
    }
    polyline(&mut out, &steps, COLORS[1], false);
    for b in &report.bins {
        if let (Some(m), Some(r)) = (b.mean_estimate, b.positive_rate) {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}"/>"#,
                px(m),
                py(r),
                COLORS[0]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Overlaid ROC curves; the second and later curves are dashed.
pub fn roc_svg(curves: &[(&str, &RocCurve)]) -> String {
    let mut out = String::new();
    frame(&mut out, "ROC", "false positive rate", "true positive rate");
    for (i, (name, curve)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        polyline(&mut out, &curve.points, color, i > 0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{name} (AUC {:.3})</text>"#,
            px(0.45),
            py(0.1) + 14.0 * i as f64,
            curve.auc
        );
    }
    out.push_str("</svg>\n");
    out
}
