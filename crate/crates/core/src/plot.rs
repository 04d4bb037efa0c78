//! Standalone SVG heatmaps with a linear colour map.

use std::fmt::Write as _;

use nalgebra::DMatrix;

/// Linear map from 0 (dark blue) through teal to 1 (yellow).
fn colour(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 3] = [(30.0, 20.0, 90.0), (30.0, 150.0, 140.0), (250.0, 230.0, 40.0)];
    let t = t.clamp(0.0, 1.0) * 2.0;
    let i = (t.floor() as usize).min(1);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let lerp = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

/// Heatmap of a real matrix normalized to its largest entry; row `i` is
/// drawn top to bottom.
pub fn heatmap_svg(values: &DMatrix<f64>, title: &str) -> String {
    let (rows, cols) = values.shape();
    let cell = (360.0 / rows.max(cols).max(1) as f64).max(2.0);
    let (left, top) = (40.0, 30.0);
    let width = left + cell * cols as f64 + 10.0;
    let height = top + cell * rows as f64 + 10.0;
    let max = values.iter().cloned().fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="18" font-family="sans-serif" font-size="13">{}</text>"#,
        escape(title)
    );
    for i in 0..rows {
        for j in 0..cols {
            let t = if max > 0.0 { values[(i, j)] / max } else { 0.0 };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>({i},{j}) {:.4e}</title></rect>"#,
                left + cell * j as f64,
                top + cell * i as f64,
                cell + 0.05,
                cell + 0.05,
                colour(t),
                values[(i, j)]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_endpoints() {
        assert_eq!(colour(0.0), "#1e145a");
        assert_eq!(colour(1.0), "#fae628");
        assert_eq!(colour(0.5), "#1e968c");
    }

    #[test]
    fn one_rect_per_cell() {
        let svg = heatmap_svg(&DMatrix::identity(3, 4), "a < b");
        assert_eq!(svg.matches("<rect").count(), 13);
        assert!(svg.contains("a &lt; b"));
        let zero = heatmap_svg(&DMatrix::zeros(2, 2), "");
        assert!(zero.contains("#1e145a"));
    }
}
