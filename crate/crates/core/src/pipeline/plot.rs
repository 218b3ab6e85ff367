//! Static SVG plots of sampled scalar data.

use std::fmt::Write;

use crate::fields::GridDomain;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;

fn transform(v: f64, log: bool) -> f64 {
    if log {
        v.abs().max(1e-300).log10()
    } else {
        v
    }
}

fn range(vals: &[f64]) -> (f64, f64) {
    let finite = vals.iter().cloned().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot over a 1-D grid, or a heat map over a 2-D grid. With `log` the
/// values are shown as `log₁₀|v|`.
pub fn scalar_plot_svg(domain: &GridDomain, values: &[f64], title: &str, log: bool) -> String {
    let ys: Vec<f64> = values.iter().map(|&v| transform(v, log)).collect();
    let (lo, hi) = range(&ys);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let pw = WIDTH - 2.0 * MARGIN;
    let ph = HEIGHT - 2.0 * MARGIN;
    let (nx, ny) = domain.shape();
    if domain.dim() == 1 || ny <= 1 {
        let xs: Vec<f64> = (0..values.len()).map(|i| domain.coords(i)[0]).collect();
        let (x0, x1) = range(&xs);
        let mut pts = String::new();
        for (x, y) in xs.iter().zip(&ys) {
            if !y.is_finite() {
                continue;
            }
            let px = MARGIN + (x - x0) / (x1 - x0) * pw;
            let py = MARGIN + ph - (y - lo) / (hi - lo) * ph;
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, pts.trim_end());
    } else {
        let cw = pw / nx as f64;
        let ch = ph / ny as f64;
        for (idx, y) in ys.iter().enumerate() {
            let (i, j) = domain.multi_index(idx);
            let s = if y.is_finite() { (y - lo) / (hi - lo) } else { 1.0 };
            let r = (255.0 * s) as u8;
            let b = (255.0 * (1.0 - s)) as u8;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},64,{b})"/>"#,
                MARGIN + i as f64 * cw,
                MARGIN + ph - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let label = if log { "log10 |v|" } else { "v" };
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="11">{label}: [{lo:.3e}, {hi:.3e}]</text>"#,
        HEIGHT - 16.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_heat_map_render() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let s = scalar_plot_svg(&d, &[1e-3, 1e-5, 0.0, 1.0, 2.0], "res <1>", true);
        assert!(s.starts_with("<svg") && s.contains("polyline") && s.contains("res &lt;1&gt;"));
        let d = GridDomain::square(0.0, 1.0, 3).unwrap();
        let s = scalar_plot_svg(&d, &[0.0; 9], "flat", false);
        assert_eq!(s.matches("fill=\"rgb(").count(), 9);
    }
}
