//! Hand-written SVG figures.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write;

use releq::freqmap::{FrequencyVector, InertiaSpectrum};
use releq::horn::BasicPoint;
use releq::p2::{Contour, CriticalAnalysis};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 40.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

/// Affine map from a data box onto the drawing area, equal scale on both axes.
struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    left: f64,
    bottom: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)], width: f64, height: f64) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let scale = (width - 2.0 * MARGIN).min(height - 2.0 * MARGIN) / span;
        Frame {
            x0: x0 - ((width - 2.0 * MARGIN) / scale - (x1 - x0)) / 2.0,
            y0: y0 - ((height - 2.0 * MARGIN) / scale - (y1 - y0)) / 2.0,
            scale,
            left: MARGIN,
            bottom: height - MARGIN,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            self.left + (x - self.x0) * self.scale,
            self.bottom - (y - self.y0) * self.scale,
        )
    }
}

/// Coordinates of a point of the trace hyperplane: the plane itself for
/// `p = 3`, the `nu_1` axis for `p = 2`.
fn project(nu: &FrequencyVector) -> (f64, f64) {
    let v = nu.values();
    match v.len() {
        3 => (
            (v[0] - v[2]) / 2f64.sqrt(),
            (v[0] + v[2] - 2.0 * v[1]) / 6f64.sqrt(),
        ),
        _ => (v[0], 0.0),
    }
}

/// Polytope slice (p = 3) or segment (p = 2) with the basic points labeled
/// `1..` in pairing order.
pub fn polytope(s: &InertiaSpectrum, vertices: &[FrequencyVector], basic: &[BasicPoint]) -> String {
    let plot_width = WIDTH - 220.0;
    let mut pts: Vec<(f64, f64)> = vertices
        .iter()
        .chain(basic.iter().map(|b| &b.nu))
        .map(project)
        .collect();
    if s.p() == 2 {
        // room above and below the segment
        let (a, b) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.0), b.max(p.0))
            });
        pts.push((a, (b - a) / 4.0));
        pts.push((a, -(b - a) / 4.0));
    }
    let frame = Frame::fit(&pts, plot_width, HEIGHT);
    let sigma: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
    let mut out = String::new();
    header(
        &mut out,
        &format!("Frequency polytope for sigma = ({})", sigma.join(", ")),
    );

    let mut corners: Vec<(f64, f64)> = vertices.iter().map(|v| frame.map(project(v))).collect();
    let (cx, cy) = corners
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let n = corners.len().max(1) as f64;
    let (cx, cy) = (cx / n, cy / n);
    corners.sort_by(|a, b| {
        (a.1 - cy)
            .atan2(a.0 - cx)
            .total_cmp(&(b.1 - cy).atan2(b.0 - cx))
    });
    let path: Vec<String> = corners
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    let _ = writeln!(
        out,
        r##"<polygon class="polytope" points="{}" fill="#dfe9f5" stroke="#2b5d9c" stroke-width="1.5"/>"##,
        path.join(" ")
    );
    for (v, (x, y)) in vertices
        .iter()
        .zip(vertices.iter().map(|v| frame.map(project(v))))
    {
        let _ = writeln!(
            out,
            r##"<circle class="vertex" cx="{x:.2}" cy="{y:.2}" r="2.5" fill="#2b5d9c"><title>{}</title></circle>"##,
            escape(&v.to_string())
        );
    }
    for (k, b) in basic.iter().enumerate() {
        let (x, y) = frame.map(project(&b.nu));
        let label = k + 1;
        let _ = writeln!(
            out,
            r##"<g class="basic-point" id="basic-{label}" data-pairing="{}"><title>{} {}</title><circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#c0392b"/><text x="{:.2}" y="{:.2}">{label}</text></g>"##,
            escape(&b.pairing.to_string()),
            escape(&b.pairing.to_string()),
            escape(&b.nu.to_string()),
            x + 5.0,
            y - 5.0
        );
    }
    let _ = writeln!(out, r#"<g class="legend">"#);
    for (k, b) in basic.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}: {} {}</text>"#,
            plot_width + 10.0,
            MARGIN + 14.0 * k as f64,
            k + 1,
            escape(&b.pairing.to_string()),
            escape(&b.nu.to_string())
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

fn chart(phi: f64, theta: f64) -> (f64, f64) {
    let w = WIDTH - 2.0 * MARGIN;
    let h = HEIGHT - 2.0 * MARGIN;
    (
        MARGIN + theta / TAU * w,
        MARGIN + (FRAC_PI_2 - phi) / PI * h,
    )
}

/// Level curves of `det Sigma` over the `(theta, phi)` chart with the great
/// circles through the critical structures and the critical points.
pub fn contour_plot(a: &CriticalAnalysis, contours: &[Contour]) -> String {
    let sigma: Vec<String> = a.sigma.iter().map(|v| v.to_string()).collect();
    let mut out = String::new();
    header(
        &mut out,
        &format!("det Sigma for sigma = ({})", sigma.join(", ")),
    );
    let (x0, y0) = chart(FRAC_PI_2, 0.0);
    let (x1, y1) = chart(-FRAC_PI_2, TAU);
    let _ = writeln!(
        out,
        r#"<rect class="chart" x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for k in contours {
        let mut d = String::new();
        for s in &k.segments {
            let (ax, ay) = chart(s.from.0, s.from.1);
            let (bx, by) = chart(s.to.0, s.to.1);
            let _ = write!(d, "M{ax:.2} {ay:.2}L{bx:.2} {by:.2}");
        }
        let _ = writeln!(
            out,
            r##"<path class="contour" data-level="{}" data-components="{}" d="{d}" fill="none" stroke="#2b5d9c"/>"##,
            k.level, k.components
        );
    }
    for theta in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
        let (x, ya) = chart(FRAC_PI_2, theta);
        let (_, yb) = chart(-FRAC_PI_2, theta);
        let _ = writeln!(
            out,
            r##"<line class="great-circle" data-theta="{theta}" x1="{x:.2}" y1="{ya:.2}" x2="{x:.2}" y2="{yb:.2}" stroke="#999" stroke-dasharray="4 3"/>"##
        );
    }
    let (xa, y) = chart(0.0, 0.0);
    let (xb, _) = chart(0.0, TAU);
    let _ = writeln!(
        out,
        r##"<line class="great-circle" data-phi="0" x1="{xa:.2}" y1="{y:.2}" x2="{xb:.2}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 3"/>"##
    );
    for p in &a.points {
        let (x, y) = chart(p.coords.phi(), p.coords.theta());
        let _ = writeln!(
            out,
            r##"<g class="critical-point" data-label="{0}"><circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#c0392b"/><text x="{1:.2}" y="{2:.2}">{0} f={3}</text></g>"##,
            escape(p.label),
            x + 5.0,
            y - 5.0,
            p.value
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">theta</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(out, r#"<text x="8" y="{:.2}">phi</text>"#, HEIGHT / 2.0);
    let _ = writeln!(out, "</svg>");
    out
}
