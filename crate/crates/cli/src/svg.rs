//! Minimal static ROC plot.

use std::fmt::Write;

use qad_core::eval::RocCurve;

const SIZE: f64 = 400.0;
const PAD: f64 = 40.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn px(v: f64) -> f64 {
    PAD + v * SIZE
}

fn py(v: f64) -> f64 {
    PAD + (1.0 - v) * SIZE
}

pub fn roc_svg(curves: &[(String, RocCurve)]) -> String {
    let side = SIZE + 2.0 * PAD;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#, w = side + 160.0, h = side);
    let _ = writeln!(s, r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 4"/>"#, px(0.0), py(0.0), px(1.0), py(1.0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">FPR</text>"#, px(0.5), side - 10.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})">TPR</text>"#, py(0.5), py(0.5));
    for (i, (name, c)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = c.points.iter().map(|p| format!("{:.2},{:.2}", px(p.fpr), py(p.tpr))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = PAD + 16.0 * (i as f64 + 1.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" font-size="12" fill="{color}">{name} ({:.3})</text>"#, side + 5.0, c.auroc);
    }
    s.push_str("</svg>\n");
    s
}
