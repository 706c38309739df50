//! SVG 1.1 figures of singular sets and their images.
//!
//! A figure shows one panel per chart with the domain outline, the singular
//! curves in parameter coordinates and the cusps (filled for confirmed
//! cusps, blue for positive and red for negative, hollow otherwise), and a
//! panel with the image curves on the component sphere under stereographic
//! projection, with the image of the great circle `x₁ = 0` as reference.
//! Coordinates are printed with three decimals so output is deterministic.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::atlas::Atlas;
use crate::gaussmap::stereographic;
use crate::singular::{CuspStatus, SingularAnalysis};
use crate::topology::ChartParam;

const PANEL: f64 = 320.0;
const MARGIN: f64 = 24.0;
/// Stereographic images farther out than this are not drawn.
const STEREO_CLIP: f64 = 4.0;

fn f3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Minimal SVG document builder.
#[derive(Debug, Clone)]
pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    /// Empty document of the given size in pixels.
    pub fn new(width: f64, height: f64) -> Svg {
        Svg { width, height, body: String::new() }
    }

    /// Open polyline; fewer than two points draw nothing.
    pub fn polyline(&mut self, pts: &[[f64; 2]], stroke: &str, width: f64, closed: bool) {
        if pts.len() < 2 {
            return;
        }
        let p: Vec<String> = pts.iter().map(|q| format!("{},{}", f3(q[0]), f3(q[1]))).collect();
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            self.body,
            r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
            p.join(" "),
            f3(width)
        );
    }

    /// Circle.
    pub fn circle(&mut self, c: [f64; 2], r: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}" stroke="{stroke}"/>"#,
            f3(c[0]),
            f3(c[1]),
            f3(r)
        );
    }

    /// Text label.
    pub fn text(&mut self, p: [f64; 2], size: f64, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}">{}</text>"#,
            f3(p[0]),
            f3(p[1]),
            f3(size),
            escape(s)
        );
    }

    /// Rectangle outline.
    pub fn rect(&mut self, p: [f64; 2], w: f64, h: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{stroke}"/>"#,
            f3(p[0]),
            f3(p[1]),
            f3(w),
            f3(h)
        );
    }

    /// The finished document.
    pub fn finish(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            f3(self.width),
            f3(self.height),
            f3(self.width),
            f3(self.height),
            self.body
        )
    }
}

/// Maps data coordinates into a square panel with equal scales, `y` up.
#[derive(Debug, Clone, Copy)]
struct Frame {
    origin: [f64; 2],
    centre: [f64; 2],
    scale: f64,
}

impl Frame {
    fn new(origin: [f64; 2], bounds: [f64; 4]) -> Frame {
        let span = (bounds[1] - bounds[0]).max(bounds[3] - bounds[2]).max(1e-12);
        Frame {
            origin,
            centre: [0.5 * (bounds[0] + bounds[1]), 0.5 * (bounds[2] + bounds[3])],
            scale: (PANEL - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + 0.5 * PANEL + (p[0] - self.centre[0]) * self.scale,
            self.origin[1] + 0.5 * PANEL - (p[1] - self.centre[1]) * self.scale,
        ]
    }
}

fn bounds_of(pts: &[[f64; 2]]) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in pts {
        b[0] = b[0].min(p[0]);
        b[1] = b[1].max(p[0]);
        b[2] = b[2].min(p[1]);
        b[3] = b[3].max(p[1]);
    }
    b
}

/// Outline of a chart domain in parameter coordinates.
fn domain_outline(param: &ChartParam) -> Vec<[f64; 2]> {
    match param {
        ChartParam::Rect { u, v } => vec![[u[0], v[0]], [u[1], v[0]], [u[1], v[1]], [u[0], v[1]]],
        ChartParam::Polar(pm) => (0..720)
            .map(|i| {
                let phi = TAU * i as f64 / 720.0;
                let r = pm.boundary_radius(phi);
                [pm.center[0] + r * phi.cos(), pm.center[1] + r * phi.sin()]
            })
            .collect(),
    }
}

fn cusp_style(sign: i8, status: CuspStatus) -> (&'static str, &'static str) {
    let colour = if sign > 0 { "#1f4fd1" } else { "#d12f1f" };
    if status == CuspStatus::Confirmed {
        (colour, colour)
    } else {
        ("none", colour)
    }
}

/// Figure of a singular-set analysis.
pub fn singular_figure(atlas: &Atlas, a: &SingularAnalysis) -> String {
    let nc = atlas.charts.len();
    let cols = nc.clamp(1, 2);
    let rows = nc.div_ceil(cols).max(1);
    let width = PANEL * (cols as f64 + 1.0);
    let height = PANEL * rows as f64;
    let mut svg = Svg::new(width, height);
    for (ci, chart) in atlas.charts.iter().enumerate() {
        let origin = [PANEL * (ci % cols) as f64, PANEL * (ci / cols) as f64];
        let outline = domain_outline(&ChartParam::new(chart));
        let frame = Frame::new(origin, bounds_of(&outline));
        svg.rect(origin, PANEL, PANEL, "#cccccc");
        let mapped: Vec<[f64; 2]> = outline.iter().map(|&p| frame.map(p)).collect();
        svg.polyline(&mapped, "#777777", 1.0, true);
        for curve in &a.curves {
            for (c, first, last) in curve.chart_runs() {
                if c != ci {
                    continue;
                }
                let n = curve.points.len();
                let len = if last >= first { last - first + 1 } else { n - first + last + 1 };
                let pts: Vec<[f64; 2]> =
                    (0..len).map(|k| frame.map(curve.points[(first + k) % n].uv)).collect();
                let whole = curve.closed && len == n;
                svg.polyline(&pts, "#111111", 1.5, whole);
            }
        }
        for r in a.cusps.iter().filter(|r| r.chart == ci) {
            let (fill, stroke) = cusp_style(r.sign, r.status);
            svg.circle(frame.map(r.uv), 4.0, fill, stroke);
        }
        svg.text([origin[0] + 6.0, origin[1] + 16.0], 12.0, &format!("chart {}", chart.name));
    }
    // image panel
    let origin = [PANEL * cols as f64, 0.0];
    let unit: Vec<[f64; 2]> = (0..360).map(|i| [(TAU * i as f64 / 360.0).cos(), (TAU * i as f64 / 360.0).sin()]).collect();
    let project = |p: &[f64; 3]| stereographic(p).filter(|q| q[0].hypot(q[1]) <= STEREO_CLIP);
    let mut all = unit.clone();
    for curve in &a.curves {
        all.extend(curve.points.iter().filter_map(|p| p.data.as_ref().and_then(|d| project(&d.image))));
    }
    let frame = Frame::new(origin, bounds_of(&all));
    svg.rect(origin, PANEL, PANEL, "#cccccc");
    let circle: Vec<[f64; 2]> = unit.iter().map(|&p| frame.map(p)).collect();
    svg.polyline(&circle, "#bbbbbb", 1.0, true);
    for curve in &a.curves {
        let mut run: Vec<[f64; 2]> = Vec::new();
        for p in &curve.points {
            match p.data.as_ref().and_then(|d| project(&d.image)) {
                Some(q) => run.push(frame.map(q)),
                None => {
                    svg.polyline(&run, "#111111", 1.2, false);
                    run.clear();
                }
            }
        }
        if curve.closed {
            if let Some(&first) = curve.points.first().and_then(|p| p.data.as_ref()).and_then(|d| project(&d.image)).map(|q| frame.map(q)).as_ref() {
                run.push(first);
            }
        }
        svg.polyline(&run, "#111111", 1.2, false);
    }
    for r in &a.cusps {
        if let Some(q) = project(&r.image) {
            let (fill, stroke) = cusp_style(r.sign, r.status);
            svg.circle(frame.map(q), 4.0, fill, stroke);
        }
    }
    svg.text([origin[0] + 6.0, origin[1] + 16.0], 12.0, &format!("image of g{} (stereographic)", a.component.index()));
    svg.finish()
}
