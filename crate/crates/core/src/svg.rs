//! Deterministic SVG rendering of arc chains and point sets.
//!
//! Each region chain becomes one closed `<polygon>` for the fill plus one
//! `<path>` per boundary arc, so the arc structure stays visible (and
//! countable) in the output. A point chain is drawn as a cross, an empty one
//! as a text note.

use std::fmt::Write as _;
use std::path::Path;

use crate::arcgeom::{Arc, ArcChain};
use crate::error::{GeomError, Result};
use crate::norm::{Gauge, Vec2};

const STROKES: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MIN_SEGMENTS: usize = 16;
const MAX_DEPTH: u32 = 20;

/// One drawable chain, optionally required to lie inside an earlier layer.
#[derive(Debug, Clone)]
pub struct Layer {
    pub name: String,
    pub chain: ArcChain,
    pub within: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub layers: Vec<Layer>,
    pub points: Vec<Vec2>,
    /// Canvas width in pixels; the height follows the aspect ratio.
    pub width: f64,
    /// Maximum distance in pixels between an arc and its polyline.
    pub max_deviation: f64,
}

impl Scene {
    pub fn new(points: &[Vec2]) -> Scene {
        Scene {
            layers: Vec::new(),
            points: points.to_vec(),
            width: 600.0,
            max_deviation: 0.5,
        }
    }

    pub fn layer(mut self, name: &str, chain: ArcChain) -> Scene {
        self.layers.push(Layer { name: name.into(), chain, within: None });
        self
    }

    /// Adds a layer that must be contained in layer `outer`; checked at render time.
    pub fn nested_layer(mut self, name: &str, chain: ArcChain, outer: usize) -> Scene {
        self.layers.push(Layer { name: name.into(), chain, within: Some(outer) });
        self
    }
}

struct View {
    min: Vec2,
    scale: f64,
    height: f64,
    pad: f64,
}

impl View {
    fn fit(g: &Gauge, scene: &Scene) -> View {
        let mut pts: Vec<Vec2> = scene.points.clone();
        for l in &scene.layers {
            pts.extend(l.chain.boundary_samples(g, 16));
        }
        if pts.is_empty() {
            pts.push(Vec2::ZERO);
        }
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in &pts {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        let pad = 20.0;
        let scale = (scene.width - 2.0 * pad) / span;
        View {
            min: lo,
            scale,
            height: (hi.y - lo.y) * scale + 2.0 * pad,
            pad,
        }
    }

    fn px(&self, p: Vec2) -> (f64, f64) {
        (
            self.pad + (p.x - self.min.x) * self.scale,
            self.height - self.pad - (p.y - self.min.y) * self.scale,
        )
    }
}

/// Polyline along `arc` with at most `tol_px` deviation at the view scale.
fn flatten(g: &Gauge, arc: &Arc, view: &View, tol_px: f64) -> Vec<Vec2> {
    let sweep = arc.sweep();
    let mut out = vec![arc.point_at_offset(g, 0.0)];
    for k in 0..MIN_SEGMENTS {
        let a = sweep * k as f64 / MIN_SEGMENTS as f64;
        let b = sweep * (k + 1) as f64 / MIN_SEGMENTS as f64;
        refine(g, arc, view, tol_px, a, b, 0, &mut out);
    }
    out
}

// pushes the points of (a, b]
#[allow(clippy::too_many_arguments)]
fn refine(g: &Gauge, arc: &Arc, view: &View, tol_px: f64, a: f64, b: f64, depth: u32, out: &mut Vec<Vec2>) {
    let pa = arc.point_at_offset(g, a);
    let pb = arc.point_at_offset(g, b);
    let dev = (0..3)
        .map(|i| {
            let s = a + (b - a) * (i as f64 + 1.0) / 4.0;
            seg_dist(arc.point_at_offset(g, s), pa, pb)
        })
        .fold(0.0, f64::max);
    if dev * view.scale <= tol_px || depth >= MAX_DEPTH {
        out.push(pb);
    } else {
        let m = 0.5 * (a + b);
        refine(g, arc, view, tol_px, a, m, depth + 1, out);
        refine(g, arc, view, tol_px, m, b, depth + 1, out);
    }
}

fn seg_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.dot(ab);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn num(x: f64) -> String {
    // fixed precision keeps the output byte-stable
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Largest gauge excess of `x` over the discs bounding `chain`.
fn excess(g: &Gauge, chain: &ArcChain, x: Vec2) -> f64 {
    match chain {
        ArcChain::Empty => f64::INFINITY,
        ArcChain::Point(p) => p.dist(x),
        ArcChain::Region(arcs) => arcs
            .iter()
            .map(|a| g.dist(x, a.circle.center) - a.circle.radius)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Whether `inner` lies in `outer`, checked on boundary samples.
pub fn contained_in(g: &Gauge, inner: &ArcChain, outer: &ArcChain, slack: f64) -> bool {
    match inner {
        ArcChain::Empty => true,
        _ => inner
            .boundary_samples(g, 64)
            .into_iter()
            .all(|x| excess(g, outer, x) <= slack),
    }
}

pub fn render_svg(g: &Gauge, scene: &Scene) -> Result<String> {
    let view = View::fit(g, scene);
    let diam_px = scene.width;
    for (i, l) in scene.layers.iter().enumerate() {
        if let Some(o) = l.within {
            let outer = scene
                .layers
                .get(o)
                .filter(|_| o != i)
                .ok_or_else(|| GeomError::InvalidArgument(format!("layer {i} nested in missing layer {o}")))?;
            let slack = 1e-7 * diam_px / view.scale;
            if !contained_in(g, &l.chain, &outer.chain, slack) {
                return Err(GeomError::InvalidArgument(format!(
                    "layer '{}' is not contained in layer '{}'",
                    l.name, outer.name
                )));
            }
        }
    }

    let mut s = String::new();
    let w = scene.width;
    let h = view.height;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, l) in scene.layers.iter().enumerate() {
        let color = STROKES[i % STROKES.len()];
        writeln!(s, r#"<g id="layer-{i}" class="chain" data-name="{}">"#, escape(&l.name)).unwrap();
        match &l.chain {
            ArcChain::Empty => {
                writeln!(
                    s,
                    r#"<text x="{}" y="{}" fill="{color}" font-family="sans-serif" font-size="14">{}: region empty</text>"#,
                    num(view.pad),
                    num(view.pad + 16.0 * (i as f64 + 1.0)),
                    escape(&l.name)
                )
                .unwrap();
            }
            ArcChain::Point(p) => {
                let (x, y) = view.px(*p);
                writeln!(
                    s,
                    r#"<path class="point-chain" d="M{} {}L{} {}M{} {}L{} {}" stroke="{color}" stroke-width="2"/>"#,
                    num(x - 6.0),
                    num(y - 6.0),
                    num(x + 6.0),
                    num(y + 6.0),
                    num(x - 6.0),
                    num(y + 6.0),
                    num(x + 6.0),
                    num(y - 6.0)
                )
                .unwrap();
            }
            ArcChain::Region(arcs) => {
                let polys: Vec<Vec<Vec2>> = arcs.iter().map(|a| flatten(g, a, &view, scene.max_deviation)).collect();
                let mut fill = String::new();
                for poly in &polys {
                    for p in &poly[..poly.len() - 1] {
                        let (x, y) = view.px(*p);
                        write!(fill, "{},{} ", num(x), num(y)).unwrap();
                    }
                }
                writeln!(
                    s,
                    r#"<polygon class="fill" points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
                    fill.trim_end()
                )
                .unwrap();
                for (a, poly) in arcs.iter().zip(&polys) {
                    let mut d = String::new();
                    for (k, p) in poly.iter().enumerate() {
                        let (x, y) = view.px(*p);
                        write!(d, "{}{} {}", if k == 0 { "M" } else { "L" }, num(x), num(y)).unwrap();
                    }
                    let label = a.label.map(|l| format!(r#" data-label="{l}""#)).unwrap_or_default();
                    writeln!(s, r#"<path class="arc"{label} d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#)
                        .unwrap();
                }
            }
        }
        writeln!(s, "</g>").unwrap();
    }
    for p in &scene.points {
        let (x, y) = view.px(*p);
        writeln!(s, r#"<circle class="site" cx="{}" cy="{}" r="3" fill="black"/>"#, num(x), num(y)).unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(g: &Gauge, scene: &Scene, path: &Path) -> Result<()> {
    let doc = render_svg(g, scene)?;
    std::fs::write(path, doc).map_err(|e| GeomError::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
