//! Static SVG plot of a spectrum: eigenvalue against index, with
//! horizontal reference lines.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `lines` are `(label, value)` pairs drawn dashed across the plot.
pub fn spectrum_svg(title: &str, eigenvalues: &[f64], lines: &[(&str, f64)]) -> String {
    let n = eigenvalues.len().max(1);
    let top = eigenvalues
        .iter()
        .chain(lines.iter().map(|(_, v)| v))
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.1;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let x = |i: usize| LEFT + pw * (i as f64 + 0.5) / n as f64;
    let y = |v: f64| TOP + ph * (1.0 - v.max(0.0) / top);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        esc(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let v = top * k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.4}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0
        );
    }
    let every = n.div_ceil(20);
    for i in (0..n).step_by(every) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{i}</text>"#,
            x(i),
            TOP + ph + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">index</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.1})" text-anchor="middle">eigenvalue</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let colors = ["#c0392b", "#2471a3", "#7d3c98"];
    for (k, (label, v)) in lines.iter().enumerate() {
        if !v.is_finite() || *v > top {
            continue;
        }
        let c = colors[k % colors.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="{c}" stroke-dasharray="6 4"/>"#,
            y(*v),
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{c}">{} = {v:.5}</text>"#,
            LEFT + pw + 6.0,
            y(*v) + 4.0 + 12.0 * k as f64,
            esc(label)
        );
    }
    for (i, v) in eigenvalues.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="black"/>"#,
            x(i),
            y(*v)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_points_and_lines() {
        let svg = spectrum_svg("a < b", &[0.0, 0.1, 0.3], &[("1/4", 0.25), ("off", f64::NAN)]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert!(svg.contains("a &lt; b"));
    }
}
