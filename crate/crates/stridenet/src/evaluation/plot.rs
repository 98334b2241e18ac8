//! Self-contained SVG rendering of the agreement scatter: one dot per
//! stride, dashed ±1.96σ limit lines, the mean-difference line, and the
//! error-regression line. Axes are in meters.

use std::fmt::Write as _;

use crate::evaluation::EvaluationReport;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 64.0;

/// Renders the report's Bland–Altman view as a standalone SVG document.
pub fn bland_altman_svg(report: &EvaluationReport) -> String {
    let ba = &report.bland_altman;
    let agreements: Vec<f64> = ba.points.iter().map(|p| p.agreement / 100.0).collect();
    let differences: Vec<f64> = ba.points.iter().map(|p| p.difference / 100.0).collect();
    let mean_m = ba.mean_difference / 100.0;
    let lower_m = ba.lower_limit / 100.0;
    let upper_m = ba.upper_limit / 100.0;
    let slope = report.regression_slope;
    let intercept_m = report.regression_intercept_cm / 100.0;

    let (x0, x1) = padded_range(&agreements, 0.05);
    let mut y_values = differences.clone();
    y_values.extend([lower_m, upper_m, mean_m]);
    y_values.extend([slope * x0 + intercept_m, slope * x1 + intercept_m]);
    let (y0, y1) = padded_range(&y_values, 0.08);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // Gridlines and tick labels, five per axis.
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let gx = px(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{gx:.2}" y1="{top:.2}" x2="{gx:.2}" y2="{bottom:.2}" stroke="#e0e0e0"/>"##,
            top = MARGIN_TOP,
            bottom = MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{gx:.2}" y="{ty:.2}" text-anchor="middle">{x:.2}</text>"#,
            ty = MARGIN_TOP + plot_h + 20.0
        );
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let gy = py(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.2}" y1="{gy:.2}" x2="{right:.2}" y2="{gy:.2}" stroke="#e0e0e0"/>"##,
            left = MARGIN_LEFT,
            right = MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{tx:.2}" y="{gy:.2}" text-anchor="end" dominant-baseline="middle">{y:.3}</text>"#,
            tx = MARGIN_LEFT - 8.0
        );
    }

    // Axis frame.
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // Mean difference and limits of agreement.
    for (value, dash, label) in [
        (mean_m, "none", "mean"),
        (upper_m, "6 4", "+1.96 sd"),
        (lower_m, "6 4", "-1.96 sd"),
    ] {
        let gy = py(value);
        let dash_attr = if dash == "none" { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.2}" y1="{gy:.2}" x2="{right:.2}" y2="{gy:.2}" stroke="#666666"{dash_attr}/>"##,
            left = MARGIN_LEFT,
            right = MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r##"<text x="{tx:.2}" y="{ty:.2}" text-anchor="end" fill="#666666">{label}</text>"##,
            tx = MARGIN_LEFT + plot_w - 4.0,
            ty = gy - 4.0
        );
    }

    // Error-vs-agreement regression line.
    let _ = writeln!(
        svg,
        r##"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="#b03030" stroke-width="1.5"/>"##,
        ax = px(x0),
        ay = py(slope * x0 + intercept_m),
        bx = px(x1),
        by = py(slope * x1 + intercept_m)
    );

    // The strides themselves.
    for (&a, &d) in agreements.iter().zip(&differences) {
        let _ = writeln!(
            svg,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="#3060b0" fill-opacity="0.45"/>"##,
            cx = px(a),
            cy = py(d)
        );
    }

    // Axis titles.
    let _ = writeln!(
        svg,
        r#"<text x="{tx:.2}" y="{ty:.2}" text-anchor="middle">mean of prediction and reference (m)</text>"#,
        tx = MARGIN_LEFT + plot_w / 2.0,
        ty = HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{ty:.2}" text-anchor="middle" transform="rotate(-90 20 {ty:.2})">prediction − reference (m)</text>"#,
        ty = MARGIN_TOP + plot_h / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Smallest range covering `values`, widened by `pad` on each side. A
/// zero-width range is widened around its value so the mapping stays finite.
fn padded_range(values: &[f64], pad: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = if hi > lo { hi - lo } else { lo.abs().max(1e-6) };
    (lo - pad * span, hi + pad * span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{evaluate, PredictionRecord};
    use crate::preprocess::StrideDefinition;
    use crate::tensor::SeededRng;

    fn sample_report() -> EvaluationReport {
        let mut rng = SeededRng::new(31);
        let records: Vec<PredictionRecord> = (0..40)
            .map(|i| {
                let y_ref = rng.uniform_in(60.0, 140.0);
                PredictionRecord {
                    patient_id: format!("p{}", i % 5),
                    definition: StrideDefinition::MsDtw,
                    predicted_cm: y_ref + rng.uniform_in(-6.0, 6.0),
                    reference_cm: y_ref,
                    fold: i % 4,
                }
            })
            .collect();
        evaluate(&records).unwrap()
    }

    #[test]
    fn svg_contains_every_point_and_all_annotation_lines() {
        let report = sample_report();
        let svg = bland_altman_svg(&report);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle ").count(), 40);
        // Two dashed limit lines plus the solid mean line and regression line.
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert!(svg.contains("+1.96 sd") && svg.contains("-1.96 sd"));
        assert!(svg.contains(r##"stroke="#b03030""##));
        // All plotted coordinates must be finite pixels inside the canvas.
        for chunk in svg.split("cx=\"").skip(1) {
            let value: f64 = chunk.split('"').next().unwrap().parse().unwrap();
            assert!(value.is_finite() && (0.0..=WIDTH).contains(&value));
        }
    }

    #[test]
    fn svg_survives_near_degenerate_inputs() {
        // Two points with equal differences: zero-width limits.
        let records = vec![
            PredictionRecord {
                patient_id: "a".into(),
                definition: StrideDefinition::MsDtw,
                predicted_cm: 101.0,
                reference_cm: 100.0,
                fold: 0,
            },
            PredictionRecord {
                patient_id: "b".into(),
                definition: StrideDefinition::MsDtw,
                predicted_cm: 121.0,
                reference_cm: 120.0,
                fold: 1,
            },
        ];
        let report = evaluate(&records).unwrap();
        let svg = bland_altman_svg(&report);
        assert!(svg.contains("</svg>"));
        assert_eq!(svg.matches("<circle ").count(), 2);
    }
}
