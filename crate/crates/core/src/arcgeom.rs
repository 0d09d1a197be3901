//! Circles, arcs and convex arc chains of a fixed gauge.

use crate::error::{GeomError, Result};
use crate::norm::{wrap01, Gauge, Vec2};
use crate::roots::{bracketed_root, golden_min};

/// Vertices closer than this (plane distance) are merged.
pub const WELD: f64 = 1e-8;

const SAMPLES: usize = 256;
const PARAM_XTOL: f64 = 1e-15;
/// Roots closer than this in parameter collapse to one tangency point.
const TANGENT_COLLAPSE: f64 = 1e-7;

/// A norm circle `S(center, radius)`; the gauge is carried by context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Vec2, radius: f64) -> Result<Circle> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeomError::InvalidRadius(radius));
        }
        if !center.is_finite() {
            return Err(GeomError::NonFinite);
        }
        Ok(Circle { center, radius })
    }

    #[inline]
    pub fn point_at(&self, g: &Gauge, t: f64) -> Vec2 {
        self.center + g.unit_boundary(t) * self.radius
    }

    #[inline]
    pub fn param_of(&self, g: &Gauge, q: Vec2) -> f64 {
        g.param_of(q - self.center)
    }

    fn same_as(&self, o: &Circle, g: &Gauge) -> bool {
        let tol = g.tolerance() * self.radius.max(o.radius);
        (self.radius - o.radius).abs() <= tol && g.dist(self.center, o.center) <= tol
    }
}

/// Position of a point relative to a closed disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscSide {
    Inside,
    On,
    Outside,
}

/// Side of a directed line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub fn in_disc(g: &Gauge, c: &Circle, q: Vec2) -> DiscSide {
    let d = g.dist(q, c.center);
    let band = g.tolerance() * c.radius;
    if d < c.radius - band {
        DiscSide::Inside
    } else if d <= c.radius + band {
        DiscSide::On
    } else {
        DiscSide::Outside
    }
}

/// A piece of a circle traversed counterclockwise from `start` to `end`.
///
/// `label` optionally records which input point generated the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub circle: Circle,
    pub start: Vec2,
    pub end: Vec2,
    pub t_start: f64,
    pub t_end: f64,
    pub full: bool,
    pub label: Option<usize>,
}

impl Arc {
    /// Counterclockwise arc of `circle` from `start` to `end`.
    pub fn ccw(g: &Gauge, circle: Circle, start: Vec2, end: Vec2, label: Option<usize>) -> Arc {
        Arc {
            circle,
            start,
            end,
            t_start: circle.param_of(g, start),
            t_end: circle.param_of(g, end),
            full: false,
            label,
        }
    }

    pub fn full(g: &Gauge, circle: Circle, label: Option<usize>) -> Arc {
        let p = circle.point_at(g, 0.0);
        Arc {
            circle,
            start: p,
            end: p,
            t_start: 0.0,
            t_end: 0.0,
            full: true,
            label,
        }
    }

    /// Parameter length in turns.
    pub fn sweep(&self) -> f64 {
        if self.full {
            1.0
        } else {
            (self.t_end - self.t_start).rem_euclid(1.0)
        }
    }

    /// Offset of circle parameter `t` from the start of the arc, in `[0, 1)`.
    #[inline]
    pub fn offset_of(&self, t: f64) -> f64 {
        (t - self.t_start).rem_euclid(1.0)
    }

    pub fn contains_param(&self, t: f64, slack: f64) -> bool {
        if self.full {
            return true;
        }
        let s = self.offset_of(t);
        s <= self.sweep() + slack || s >= 1.0 - slack
    }

    pub fn point_at_offset(&self, g: &Gauge, s: f64) -> Vec2 {
        self.circle.point_at(g, self.t_start + s)
    }

    pub fn midpoint(&self, g: &Gauge) -> Vec2 {
        self.point_at_offset(g, 0.5 * self.sweep())
    }

    /// `k + 1` points from start to end.
    pub fn sample(&self, g: &Gauge, k: usize) -> Vec<Vec2> {
        let k = k.max(1);
        let sw = self.sweep();
        let mut out: Vec<Vec2> = (0..=k)
            .map(|i| self.point_at_offset(g, sw * i as f64 / k as f64))
            .collect();
        if !self.full {
            out[0] = self.start;
            out[k] = self.end;
        }
        out
    }

    /// The open arc and the circle's center lie on opposite sides of the
    /// chord (or the center is on it).
    pub fn is_minimal(&self, g: &Gauge) -> bool {
        if self.full {
            return false;
        }
        let chord = self.end - self.start;
        let scale = self.circle.radius;
        let side_c = chord.cross(self.circle.center - self.start);
        let side_m = chord.cross(self.midpoint(g) - self.start);
        let eps = 1e-9 * scale * scale;
        side_m.abs() <= eps || side_c * side_m <= eps * side_m.abs().max(eps)
    }
}

/// Parameters on `c1` of the common points of `S(c1)` and `S(c2)`.
fn intersect_params(g: &Gauge, c1: &Circle, c2: &Circle) -> Vec<f64> {
    let d = c2.center - c1.center;
    let nd = g.eval(d);
    let (r1, r2) = (c1.radius, c2.radius);
    let tol = g.tolerance();
    if nd == 0.0 || nd > (r1 + r2) * (1.0 + tol) || nd < (r1 - r2).abs() * (1.0 - tol) {
        return Vec::new();
    }
    let f = |t: f64| g.eval(c1.point_at(g, t) - c2.center) - r2;

    if (r1 - r2).abs() <= 1e-12 * r1.max(r2) {
        // Equal radii: f < 0 in the direction of c2 and f > 0 opposite, and by
        // central symmetry there is exactly one root on each half-turn.
        let phi = g.param_of(d);
        if nd >= (r1 + r2) * (1.0 - tol) {
            return vec![phi];
        }
        let f0 = f(phi);
        let f1 = f(phi + 0.5);
        if !(f0 < 0.0 && f1 > 0.0) {
            return general_params(g, c1, c2);
        }
        let a = bracketed_root(f, phi, phi + 0.5, f0, f1, PARAM_XTOL);
        let b = bracketed_root(f, phi - 0.5, phi, f1, f0, PARAM_XTOL);
        return vec![wrap01(a), wrap01(b)];
    }
    general_params(g, c1, c2)
}

/// Sampled root isolation for circles of different radii.
fn general_params(g: &Gauge, c1: &Circle, c2: &Circle) -> Vec<f64> {
    let r2 = c2.radius;
    let band = g.tolerance() * r2;
    let f = |t: f64| g.eval(c1.point_at(g, t) - c2.center) - r2;
    let h = 1.0 / SAMPLES as f64;
    let vals: Vec<f64> = (0..SAMPLES).map(|i| f(i as f64 * h)).collect();
    let mut roots = Vec::new();
    for i in 0..SAMPLES {
        let j = (i + 1) % SAMPLES;
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (fa, fb) = (vals[i], vals[j]);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(bracketed_root(f, a, b, fa, fb, PARAM_XTOL));
        }
    }
    // near tangencies hide between samples: refine every grid extremum
    // whose sign says the curve may touch zero without a sign change
    for i in 0..SAMPLES {
        let prev = vals[(i + SAMPLES - 1) % SAMPLES];
        let next = vals[(i + 1) % SAMPLES];
        let v = vals[i];
        let is_min = v > 0.0 && v <= prev && v <= next;
        let is_max = v < 0.0 && v >= prev && v >= next;
        if !(is_min || is_max) {
            continue;
        }
        let (lo, hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let sign = if is_min { 1.0 } else { -1.0 };
        let (tm, vm) = golden_min(|t| sign * f(t), lo, hi, 1e-13);
        let vm = sign * vm;
        if vm.abs() <= band {
            roots.push(wrap01(tm));
        } else if vm.signum() != v.signum() {
            let (fl, fh) = (f(lo), f(hi));
            roots.push(wrap01(bracketed_root(f, lo, tm, fl, vm, PARAM_XTOL)));
            roots.push(wrap01(bracketed_root(f, tm, hi, vm, fh, PARAM_XTOL)));
        }
    }
    collapse_roots(roots)
}

fn collapse_roots(mut roots: Vec<f64>) -> Vec<f64> {
    for r in roots.iter_mut() {
        *r = wrap01(*r);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        if let Some(last) = out.last() {
            if r - last < TANGENT_COLLAPSE {
                continue;
            }
        }
        out.push(r);
    }
    if out.len() > 1 && out[0] + 1.0 - out[out.len() - 1] < TANGENT_COLLAPSE {
        out.pop();
    }
    out
}

/// Common points of two circles: two at a transversal crossing, one at
/// tangency, none when disjoint, nested or identical.
pub fn circle_intersect(g: &Gauge, c1: &Circle, c2: &Circle) -> Vec<Vec2> {
    intersect_params(g, c1, c2)
        .into_iter()
        .map(|t| c1.point_at(g, t))
        .collect()
}

/// Centers of the radius-`lambda` circles through both `p` and `q`.
pub fn centers_through(g: &Gauge, p: Vec2, q: Vec2, lambda: f64) -> Result<Vec<Vec2>> {
    if !p.is_finite() || !q.is_finite() {
        return Err(GeomError::NonFinite);
    }
    if p == q {
        return Err(GeomError::InvalidArgument(
            "centers_through needs two distinct points".into(),
        ));
    }
    let a = Circle::new(p, lambda)?;
    let b = Circle::new(q, lambda)?;
    Ok(circle_intersect(g, &a, &b))
}

/// The minimal arc of radius `lambda` through `p` and `q` on the given side
/// of the directed line `p -> q`. Its circle's center lies on the other side.
pub fn minimal_arc(g: &Gauge, p: Vec2, q: Vec2, lambda: f64, side: Side) -> Result<Arc> {
    let centers = centers_through(g, p, q, lambda)?;
    let dir = q - p;
    let want = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let center = match centers.len() {
        0 => {
            return Err(GeomError::RadiusTooSmall {
                lambda,
                lambda_k: 0.5 * g.dist(p, q),
            })
        }
        1 => centers[0],
        _ => {
            // the center sits opposite the arc
            if dir.cross(centers[0] - p) * want < 0.0 {
                centers[0]
            } else {
                centers[1]
            }
        }
    };
    let circle = Circle::new(center, lambda)?;
    let a = Arc::ccw(g, circle, p, q, None);
    let m = a.midpoint(g);
    if dir.cross(m - p) * want > 0.0 {
        Ok(a)
    } else {
        Ok(Arc::ccw(g, circle, q, p, None))
    }
}

/// A convex region bounded by circular arcs.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcChain {
    Empty,
    Point(Vec2),
    /// Arcs in counterclockwise boundary order; `arcs[k].end == arcs[k+1].start`.
    /// A single full arc encodes a whole disc.
    Region(Vec<Arc>),
}

impl ArcChain {
    pub fn disc(g: &Gauge, circle: Circle, label: Option<usize>) -> ArcChain {
        ArcChain::Region(vec![Arc::full(g, circle, label)])
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ArcChain::Empty)
    }

    pub fn arcs(&self) -> &[Arc] {
        match self {
            ArcChain::Region(a) => a,
            _ => &[],
        }
    }

    pub fn vertices(&self) -> Vec<Vec2> {
        match self {
            ArcChain::Empty => Vec::new(),
            ArcChain::Point(p) => vec![*p],
            ArcChain::Region(arcs) => {
                if arcs.len() == 1 && arcs[0].full {
                    Vec::new()
                } else {
                    arcs.iter().map(|a| a.start).collect()
                }
            }
        }
    }

    pub fn labels(&self) -> Vec<Option<usize>> {
        self.arcs().iter().map(|a| a.label).collect()
    }

    /// Closed membership with the gauge tolerance.
    pub fn contains(&self, g: &Gauge, x: Vec2) -> bool {
        match self {
            ArcChain::Empty => false,
            ArcChain::Point(p) => p.dist(x) <= WELD,
            ArcChain::Region(arcs) => arcs
                .iter()
                .all(|a| in_disc(g, &a.circle, x) != DiscSide::Outside),
        }
    }

    fn contains_strictly(&self, g: &Gauge, x: Vec2) -> bool {
        match self {
            ArcChain::Region(arcs) => arcs
                .iter()
                .all(|a| in_disc(g, &a.circle, x) == DiscSide::Inside),
            _ => false,
        }
    }

    /// Deterministic member: a point's own position, or the start of the first arc.
    pub fn representative(&self) -> Option<Vec2> {
        match self {
            ArcChain::Empty => None,
            ArcChain::Point(p) => Some(*p),
            ArcChain::Region(arcs) => arcs.first().map(|a| a.start),
        }
    }

    /// Average of the vertices; the center for a single disc.
    pub fn centroid(&self) -> Option<Vec2> {
        match self {
            ArcChain::Empty => None,
            ArcChain::Point(p) => Some(*p),
            ArcChain::Region(arcs) => {
                if arcs.len() == 1 && arcs[0].full {
                    return Some(arcs[0].circle.center);
                }
                let mut s = Vec2::ZERO;
                for a in arcs {
                    s += a.start;
                }
                Some(s / arcs.len() as f64)
            }
        }
    }

    /// Boundary samples, `per_arc` segments per arc.
    pub fn boundary_samples(&self, g: &Gauge, per_arc: usize) -> Vec<Vec2> {
        match self {
            ArcChain::Empty => Vec::new(),
            ArcChain::Point(p) => vec![*p],
            ArcChain::Region(arcs) => arcs
                .iter()
                .flat_map(|a| {
                    let mut s = a.sample(g, per_arc);
                    s.pop();
                    s
                })
                .collect(),
        }
    }

    /// Point of the region maximizing `<u, x>`.
    pub fn support_point(&self, g: &Gauge, u: Vec2) -> Option<Vec2> {
        match self {
            ArcChain::Empty => None,
            ArcChain::Point(p) => Some(*p),
            ArcChain::Region(arcs) => {
                // every arc shares the gauge, so the unit support direction is common
                let su = g.support(u);
                let tau = g.param_of(su);
                let mut best = arcs[0].start;
                let mut best_v = u.dot(best);
                for a in arcs {
                    let (p, v) = if a.full || a.contains_param(tau, 0.0) {
                        let p = a.circle.center + su * a.circle.radius;
                        (p, u.dot(p))
                    } else {
                        let ve = u.dot(a.end);
                        (a.end, ve)
                    };
                    if v > best_v {
                        best = p;
                        best_v = v;
                    }
                }
                Some(best)
            }
        }
    }

    /// Same status and the same vertex set within `tol`.
    pub fn same_as(&self, other: &ArcChain, tol: f64) -> bool {
        match (self, other) {
            (ArcChain::Empty, ArcChain::Empty) => true,
            (ArcChain::Point(a), ArcChain::Point(b)) => a.dist(*b) <= tol,
            (ArcChain::Region(a), ArcChain::Region(b)) => {
                let full_a = a.len() == 1 && a[0].full;
                let full_b = b.len() == 1 && b[0].full;
                if full_a || full_b {
                    return full_a
                        && full_b
                        && a[0].circle.center.dist(b[0].circle.center) <= tol
                        && (a[0].circle.radius - b[0].circle.radius).abs() <= tol;
                }
                let va = self.vertices();
                let vb = other.vertices();
                let covered = |xs: &[Vec2], ys: &[Vec2]| {
                    xs.iter().all(|x| ys.iter().any(|y| x.dist(*y) <= tol))
                };
                covered(&va, &vb) && covered(&vb, &va)
            }
            _ => false,
        }
    }
}

/// A boundary edit that turns one arc chain into another.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainEdit {
    Unchanged,
    /// Rotate the old region so that arc `at` comes first, replace the first
    /// `removed.len()` arcs by `added`, then rotate left by `shift`.
    Splice {
        at: usize,
        removed: Vec<Arc>,
        added: Vec<Arc>,
        shift: usize,
    },
    Replace { from: ArcChain, to: ArcChain },
}

impl ChainEdit {
    pub fn apply(&self, chain: &ArcChain) -> Result<ArcChain> {
        match self {
            ChainEdit::Unchanged => Ok(chain.clone()),
            ChainEdit::Replace { to, .. } => Ok(to.clone()),
            ChainEdit::Splice {
                at,
                removed,
                added,
                shift,
            } => {
                let old = match chain {
                    ArcChain::Region(a) => a,
                    _ => return Err(GeomError::Internal("splice applied to a non-region".into())),
                };
                let n = old.len();
                if *at >= n.max(1) || removed.len() > n {
                    return Err(GeomError::Internal("splice out of range".into()));
                }
                if let Some(first) = removed.first() {
                    if old[*at].start.dist(first.start) > WELD {
                        return Err(GeomError::Internal("splice position mismatch".into()));
                    }
                }
                let mut out: Vec<Arc> = added.clone();
                for k in removed.len()..n {
                    out.push(old[(at + k) % n].clone());
                }
                if !out.is_empty() {
                    let s = shift % out.len();
                    out.rotate_left(s);
                }
                Ok(ArcChain::Region(out))
            }
        }
    }

    /// Edit that undoes `self`, valid on the chain `self` produced.
    pub fn inverse(&self, before: &ArcChain) -> ChainEdit {
        match self {
            ChainEdit::Unchanged => ChainEdit::Unchanged,
            ChainEdit::Replace { from, to } => ChainEdit::Replace {
                from: to.clone(),
                to: from.clone(),
            },
            ChainEdit::Splice {
                at, removed, added, ..
            } => {
                let n = before.arcs().len();
                ChainEdit::Splice {
                    at: 0,
                    removed: added.clone(),
                    added: removed.clone(),
                    shift: (n - at % n.max(1)) % n.max(1),
                }
            }
        }
    }

    /// Number of arcs touched by the edit.
    pub fn size(&self) -> usize {
        match self {
            ChainEdit::Unchanged => 0,
            ChainEdit::Splice { removed, added, .. } => removed.len() + added.len(),
            ChainEdit::Replace { from, to } => from.arcs().len() + to.arcs().len() + 1,
        }
    }
}

/// Result of clipping a chain by a disc.
#[derive(Debug, Clone)]
pub struct ClipResult {
    pub chain: ArcChain,
    pub edit: ChainEdit,
}

/// `chain ∩ disc`.
pub fn chain_clip(g: &Gauge, chain: &ArcChain, disc: &Circle) -> ArcChain {
    chain_clip_labeled(g, chain, disc, None).chain
}

#[derive(Debug, Clone)]
struct Piece {
    p0: Vec2,
    p1: Vec2,
    t0: f64,
    t1: f64,
    inside: bool,
}

/// Splits every arc at its crossings with the disc boundary.
fn split_arcs(g: &Gauge, arcs: &[Arc], disc: &Circle) -> Vec<Vec<Piece>> {
    let tol_ang = 1e-12;
    arcs.iter()
        .map(|a| {
            let inside_of = |q: Vec2| in_disc(g, disc, q) != DiscSide::Outside;
            if a.circle.same_as(disc, g) {
                return vec![whole_piece(a, true)];
            }
            let same_radius = (a.circle.radius - disc.radius).abs() <= 1e-12 * disc.radius;
            if !a.full {
                let (si, ei) = (inside_of(a.start), inside_of(a.end));
                // a disc of the same radius containing both endpoints contains the minimal arc
                if same_radius && si && ei && a.is_minimal(g) {
                    return vec![whole_piece(a, true)];
                }
                if same_radius && g.dist(a.circle.center, disc.center) > 2.0 * disc.radius * (1.0 + g.tolerance()) {
                    return vec![whole_piece(a, false)];
                }
            }
            let sweep = a.sweep();
            let mut cuts: Vec<f64> = intersect_params(g, &a.circle, disc)
                .into_iter()
                .filter_map(|t| {
                    let s = a.offset_of(t);
                    if a.full {
                        Some(s)
                    } else if s > tol_ang && s < sweep - tol_ang {
                        Some(s)
                    } else {
                        None
                    }
                })
                .collect();
            cuts.sort_by(|x, y| x.total_cmp(y));
            let mut pieces = Vec::new();
            if a.full {
                if cuts.is_empty() {
                    let mid = a.point_at_offset(g, 0.5);
                    return vec![whole_piece(a, inside_of(mid))];
                }
                let k = cuts.len();
                for i in 0..k {
                    let s0 = cuts[i];
                    let s1 = if i + 1 < k { cuts[i + 1] } else { cuts[0] + 1.0 };
                    pieces.push(make_piece(g, a, s0, s1, None, None, disc));
                }
                return pieces;
            }
            let mut bounds = vec![0.0];
            bounds.extend(cuts);
            bounds.push(sweep);
            for w in 0..bounds.len() - 1 {
                let p0 = (w == 0).then_some(a.start);
                let p1 = (w + 2 == bounds.len()).then_some(a.end);
                pieces.push(make_piece(g, a, bounds[w], bounds[w + 1], p0, p1, disc));
            }
            pieces
        })
        .collect()
}

fn whole_piece(a: &Arc, inside: bool) -> Piece {
    Piece {
        p0: a.start,
        p1: a.end,
        t0: a.t_start,
        t1: if a.full { a.t_start + 1.0 } else { a.t_start + a.sweep() },
        inside,
    }
}

fn make_piece(
    g: &Gauge,
    a: &Arc,
    s0: f64,
    s1: f64,
    p0: Option<Vec2>,
    p1: Option<Vec2>,
    disc: &Circle,
) -> Piece {
    let mid = a.point_at_offset(g, 0.5 * (s0 + s1));
    Piece {
        p0: p0.unwrap_or_else(|| a.point_at_offset(g, s0)),
        p1: p1.unwrap_or_else(|| a.point_at_offset(g, s1)),
        t0: a.t_start + s0,
        t1: a.t_start + s1,
        inside: in_disc(g, disc, mid) != DiscSide::Outside,
    }
}

/// Accumulates boundary arcs, dropping arcs shorter than the weld distance
/// and merging consecutive pieces of one circle.
struct Builder<'a> {
    g: &'a Gauge,
    arcs: Vec<Arc>,
    cursor: Option<Vec2>,
}

impl<'a> Builder<'a> {
    fn new(g: &'a Gauge, cursor: Option<Vec2>) -> Self {
        Builder {
            g,
            arcs: Vec::new(),
            cursor,
        }
    }

    fn push(&mut self, mut arc: Arc) {
        let start = self.cursor.unwrap_or(arc.start);
        if start.dist(arc.end) < WELD {
            if self.cursor.is_none() {
                self.cursor = Some(start);
            }
            return;
        }
        if start != arc.start {
            arc.start = start;
            arc.t_start = arc.circle.param_of(self.g, start);
        }
        if let Some(last) = self.arcs.last_mut() {
            if last.circle.same_as(&arc.circle, self.g) && last.label == arc.label {
                last.end = arc.end;
                last.t_end = arc.t_end;
                self.cursor = Some(arc.end);
                return;
            }
        }
        self.cursor = Some(arc.end);
        self.arcs.push(arc);
    }

    fn piece(&mut self, src: &Arc, p: &Piece) {
        self.push(Arc {
            circle: src.circle,
            start: p.p0,
            end: p.p1,
            t_start: wrap01(p.t0),
            t_end: wrap01(p.t1),
            full: false,
            label: src.label,
        });
    }

    fn disc_arc(&mut self, disc: &Circle, from: Vec2, to: Vec2, label: Option<usize>) {
        self.push(Arc::ccw(self.g, *disc, from, to, label));
    }

    /// Snap the last arc's end onto `v`.
    fn end_at(&mut self, v: Vec2) {
        if let Some(last) = self.arcs.last_mut() {
            if last.end.dist(v) < WELD {
                last.end = v;
                last.t_end = last.circle.param_of(self.g, v);
            }
        }
    }
}

fn finish_closed(g: &Gauge, mut arcs: Vec<Arc>) -> ArcChain {
    if arcs.is_empty() {
        return ArcChain::Empty;
    }
    let n = arcs.len();
    let last_end = arcs[n - 1].end;
    if arcs[0].start.dist(last_end) < WELD {
        arcs[0].start = last_end;
        arcs[0].t_start = arcs[0].circle.param_of(g, last_end);
    }
    if n >= 2 && arcs[0].circle.same_as(&arcs[n - 1].circle, g) && arcs[0].label == arcs[n - 1].label {
        let first = arcs.remove(0);
        let last = arcs.last_mut().unwrap();
        last.end = first.end;
        last.t_end = first.t_end;
    }
    collapse_if_degenerate(g, arcs)
}

fn collapse_if_degenerate(g: &Gauge, arcs: Vec<Arc>) -> ArcChain {
    let _ = g;
    if arcs.is_empty() {
        return ArcChain::Empty;
    }
    if arcs.len() == 1 && !arcs[0].full {
        return ArcChain::Point(arcs[0].start);
    }
    let v0 = arcs[0].start;
    if !arcs[0].full && arcs.iter().all(|a| a.start.dist(v0) < WELD && a.end.dist(v0) < WELD) {
        return ArcChain::Point(v0);
    }
    ArcChain::Region(arcs)
}

/// `chain ∩ disc` together with the boundary edit. The new boundary piece of
/// the disc carries `label`.
pub fn chain_clip_labeled(g: &Gauge, chain: &ArcChain, disc: &Circle, label: Option<usize>) -> ClipResult {
    let unchanged = |c: &ArcChain| ClipResult {
        chain: c.clone(),
        edit: ChainEdit::Unchanged,
    };
    let replace = |to: ArcChain| ClipResult {
        edit: ChainEdit::Replace {
            from: chain.clone(),
            to: to.clone(),
        },
        chain: to,
    };
    let arcs = match chain {
        ArcChain::Empty => return unchanged(chain),
        ArcChain::Point(p) => {
            return if in_disc(g, disc, *p) == DiscSide::Outside {
                replace(ArcChain::Empty)
            } else {
                unchanged(chain)
            };
        }
        ArcChain::Region(arcs) => arcs,
    };

    let pieces = split_arcs(g, arcs, disc);
    let touched: Vec<bool> = pieces.iter().map(|ps| ps.iter().any(|p| !p.inside)).collect();
    if !touched.iter().any(|&t| t) {
        return unchanged(chain);
    }
    let any_inside = pieces.iter().flatten().any(|p| p.inside);
    if !any_inside {
        // no boundary of the chain inside the disc: nested, touching or disjoint
        let probes = [disc.point_at(g, 0.0), disc.point_at(g, 0.5), disc.point_at(g, 0.25)];
        if probes.iter().any(|q| chain.contains_strictly(g, *q)) {
            return replace(ArcChain::disc(g, *disc, label));
        }
        let touch = pieces
            .iter()
            .flatten()
            .map(|p| p.p0)
            .find(|q| in_disc(g, disc, *q) == DiscSide::On);
        return replace(match touch {
            Some(q) => ArcChain::Point(q),
            None => ArcChain::Empty,
        });
    }

    let n = arcs.len();
    if touched.iter().all(|&t| t) {
        // walk the whole boundary starting at a piece that re-enters the disc
        let flat: Vec<(usize, &Piece)> = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, ps)| ps.iter().map(move |p| (i, p)))
            .collect();
        let m = flat.len();
        let s = (0..m)
            .find(|&j| flat[j].1.inside && !flat[(j + m - 1) % m].1.inside)
            .unwrap_or(0);
        let mut b = Builder::new(g, None);
        let mut exit: Option<Vec2> = None;
        for k in 0..m {
            let (i, p) = flat[(s + k) % m];
            if p.inside {
                if let Some(x) = exit.take() {
                    b.disc_arc(disc, x, p.p0, label);
                }
                b.piece(&arcs[i], p);
            } else if exit.is_none() {
                exit = Some(p.p0);
            }
        }
        if let Some(x) = exit {
            b.disc_arc(disc, x, flat[s].1.p0, label);
        }
        let out = finish_closed(g, b.arcs);
        return match &out {
            ArcChain::Region(new_arcs) => ClipResult {
                edit: ChainEdit::Splice {
                    at: 0,
                    removed: arcs.clone(),
                    added: new_arcs.clone(),
                    shift: 0,
                },
                chain: out,
            },
            _ => replace(out),
        };
    }

    // runs of touched arcs, each bracketed by untouched arcs
    let first_untouched = (0..n).find(|&i| !touched[i]).unwrap();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut k = 1;
    while k <= n {
        let i = (first_untouched + k) % n;
        if touched[i] {
            let start = i;
            let mut len = 0;
            while touched[(start + len) % n] {
                len += 1;
            }
            runs.push((start, len));
            k += len;
        } else {
            k += 1;
        }
    }

    let build_run = |start: usize, len: usize| -> Vec<Arc> {
        let entry_vertex = arcs[start].start;
        let exit_vertex = arcs[(start + len) % n].start;
        let mut b = Builder::new(g, Some(entry_vertex));
        let mut exit: Option<Vec2> = None;
        for j in 0..len {
            let i = (start + j) % n;
            for p in &pieces[i] {
                if p.inside {
                    if let Some(x) = exit.take() {
                        b.disc_arc(disc, x, p.p0, label);
                    }
                    b.piece(&arcs[i], p);
                } else if exit.is_none() {
                    exit = Some(p.p0);
                }
            }
        }
        if let Some(x) = exit {
            b.disc_arc(disc, x, exit_vertex, label);
        }
        b.end_at(exit_vertex);
        b.arcs
    };

    if runs.len() == 1 {
        let (at, len) = runs[0];
        let added = build_run(at, len);
        let removed: Vec<Arc> = (0..len).map(|j| arcs[(at + j) % n].clone()).collect();
        let mut new_arcs = added.clone();
        for j in len..n {
            new_arcs.push(arcs[(at + j) % n].clone());
        }
        let out = collapse_if_degenerate(g, new_arcs);
        return match out {
            ArcChain::Region(_) => ClipResult {
                chain: out,
                edit: ChainEdit::Splice {
                    at,
                    removed,
                    added,
                    shift: 0,
                },
            },
            other => replace(other),
        };
    }

    let mut new_arcs = Vec::new();
    for (r, &(start, len)) in runs.iter().enumerate() {
        new_arcs.extend(build_run(start, len));
        let next = runs[(r + 1) % runs.len()].0;
        let mut i = (start + len) % n;
        while i != next {
            new_arcs.push(arcs[i].clone());
            i = (i + 1) % n;
        }
    }
    replace(collapse_if_degenerate(g, new_arcs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S3: f64 = 0.866_025_403_784_438_6;

    fn e() -> Gauge {
        Gauge::euclidean()
    }

    fn circ(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(Vec2::new(x, y), r).unwrap()
    }

    fn sorted_by_y(mut v: Vec<Vec2>) -> Vec<Vec2> {
        v.sort_by(|a, b| a.y.total_cmp(&b.y));
        v
    }

    #[test]
    fn euclidean_unit_circles_cross() {
        let pts = sorted_by_y(circle_intersect(&e(), &circ(0.0, 0.0, 1.0), &circ(1.0, 0.0, 1.0)));
        assert_eq!(pts.len(), 2);
        assert!(pts[0].dist(Vec2::new(0.5, -S3)) < 1e-12);
        assert!(pts[1].dist(Vec2::new(0.5, S3)) < 1e-12);
    }

    #[test]
    fn far_circles_disjoint_in_any_gauge() {
        for g in [e(), Gauge::lp(1.5).unwrap(), Gauge::lp(40.0).unwrap()] {
            assert!(circle_intersect(&g, &circ(0.0, 0.0, 1.0), &circ(3.0, 0.0, 1.0)).is_empty());
        }
    }

    /// Independent root isolation: 256-sample sign changes along S1 refined by bisection.
    fn bisection_oracle(g: &Gauge, c1: &Circle, c2: &Circle) -> Vec<Vec2> {
        let f = |t: f64| g.eval(g.boundary_point(c1.center, c1.radius, t).unwrap() - c2.center) - c2.radius;
        let mut out = Vec::new();
        for i in 0..256 {
            let (mut a, mut b) = (i as f64 / 256.0, (i + 1) as f64 / 256.0);
            if f(a).signum() == f(b).signum() {
                continue;
            }
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                if f(m).signum() == f(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(g.boundary_point(c1.center, c1.radius, 0.5 * (a + b)).unwrap());
        }
        out
    }

    #[test]
    fn l3_unit_circles_match_bisection_oracle() {
        let g = Gauge::lp(3.0).unwrap();
        let (a, b) = (circ(0.0, 0.0, 1.0), circ(1.0, 0.0, 1.0));
        let got = sorted_by_y(circle_intersect(&g, &a, &b));
        let want = sorted_by_y(bisection_oracle(&g, &a, &b));
        assert_eq!(got.len(), 2);
        assert_eq!(want.len(), 2);
        for (x, y) in got.iter().zip(&want) {
            assert!(x.dist(*y) < 1e-9);
        }
        // symmetric about the x-axis, on the bisector x = 0.5
        assert!((got[0].y + got[1].y).abs() < 1e-12);
        assert!((got[0].x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unequal_radii_match_oracle() {
        let g = Gauge::lp(1.5).unwrap();
        let (a, b) = (circ(0.0, 0.0, 1.3), circ(0.7, 0.4, 0.8));
        let got = sorted_by_y(circle_intersect(&g, &a, &b));
        let want = sorted_by_y(bisection_oracle(&g, &a, &b));
        assert_eq!(got.len(), want.len());
        for (x, y) in got.iter().zip(&want) {
            assert!(x.dist(*y) < 1e-9);
            assert!((g.dist(*x, b.center) - b.radius).abs() < 1e-9);
        }
    }

    #[test]
    fn tangency_and_nesting() {
        let t = circle_intersect(&e(), &circ(0.0, 0.0, 1.0), &circ(2.0, 0.0, 1.0));
        assert_eq!(t.len(), 1);
        assert!(t[0].dist(Vec2::new(1.0, 0.0)) < 1e-12);
        let inner = circle_intersect(&e(), &circ(0.0, 0.0, 1.0), &circ(0.5, 0.0, 0.5));
        assert_eq!(inner.len(), 1);
        assert!(inner[0].dist(Vec2::new(1.0, 0.0)) < 1e-6);
        assert!(circle_intersect(&e(), &circ(0.0, 0.0, 1.0), &circ(0.1, 0.0, 0.2)).is_empty());
        // near-tangent crossing narrower than the sample grid
        let near = circle_intersect(&e(), &circ(0.0, 0.0, 1.0), &circ(1.5, 0.0, 0.5 + 1e-6));
        assert_eq!(near.len(), 2);
    }

    #[test]
    fn centers_through_examples() {
        let c = centers_through(&e(), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].dist(Vec2::ZERO) < 1e-12);
        let c = sorted_by_y(centers_through(&e(), Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0).unwrap());
        assert!(c[0].dist(Vec2::new(0.5, -S3)) < 1e-12 && c[1].dist(Vec2::new(0.5, S3)) < 1e-12);
        let g = Gauge::lp(4.0).unwrap();
        let (p, q) = (Vec2::ZERO, Vec2::new(1.0, 0.0));
        let c = centers_through(&g, p, q, 1.0).unwrap();
        assert_eq!(c.len(), 2);
        for x in &c {
            assert!((g.dist(p, *x) - 1.0).abs() < 1e-9 && (g.dist(q, *x) - 1.0).abs() < 1e-9);
            assert!((x.x - 0.5).abs() < 1e-12);
        }
        // the two centers lie on different sides of <p, q>
        assert!(c[0].y * c[1].y < 0.0);
        assert!(centers_through(&g, p, p, 1.0).is_err());
        assert!(centers_through(&g, p, q, 0.0).is_err());
    }

    #[test]
    fn minimal_arc_examples() {
        let a = minimal_arc(&e(), Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, Side::Left).unwrap();
        assert!(a.circle.center.dist(Vec2::new(0.5, -S3)) < 1e-12);
        assert!(a.midpoint(&e()).dist(Vec2::new(0.5, 1.0 - S3)) < 1e-12);
        assert!(a.is_minimal(&e()));
        let h = minimal_arc(&e(), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), 1.0, Side::Left).unwrap();
        assert!(h.midpoint(&e()).dist(Vec2::new(0.0, 1.0)) < 1e-12);
        let h = minimal_arc(&e(), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), 1.0, Side::Right).unwrap();
        assert!(h.midpoint(&e()).dist(Vec2::new(0.0, -1.0)) < 1e-12);
        assert!(matches!(
            minimal_arc(&e(), Vec2::ZERO, Vec2::new(3.0, 0.0), 1.0, Side::Left),
            Err(GeomError::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn l3_minimal_arc_sampling() {
        let g = Gauge::lp(3.0).unwrap();
        let (p, q) = (Vec2::ZERO, Vec2::new(1.0, 0.0));
        let a = minimal_arc(&g, p, q, 1.0, Side::Left).unwrap();
        // center is the member of centers_through right of p -> q
        assert!(a.circle.center.y < 0.0);
        for u in a.sample(&g, 64).iter().skip(1).take(63) {
            assert!(u.y > 0.0, "arc point {u:?} not left of the chord");
            assert!((g.dist(*u, a.circle.center) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn in_disc_examples() {
        let c = circ(0.0, 0.0, 1.0);
        assert_eq!(in_disc(&e(), &c, Vec2::ZERO), DiscSide::Inside);
        assert_eq!(in_disc(&e(), &c, Vec2::new(1.0, 0.0)), DiscSide::On);
        let g = Gauge::lp(4.0).unwrap();
        assert!((g.eval(Vec2::new(0.9, 0.9)) - 1.070286).abs() < 1e-6);
        assert_eq!(in_disc(&g, &c, Vec2::new(0.9, 0.9)), DiscSide::Outside);
    }

    #[test]
    fn clip_examples() {
        let g = e();
        let disc = ArcChain::disc(&g, circ(0.0, 0.0, 1.0), Some(0));
        assert_eq!(chain_clip(&g, &disc, &circ(3.0, 0.0, 1.0)), ArcChain::Empty);
        match chain_clip(&g, &disc, &circ(2.0, 0.0, 1.0)) {
            ArcChain::Point(p) => assert!(p.dist(Vec2::new(1.0, 0.0)) < 1e-9),
            other => panic!("expected point, got {other:?}"),
        }
        let lens = chain_clip(&g, &disc, &circ(1.0, 0.0, 1.0));
        let v = sorted_by_y(lens.vertices());
        assert_eq!(v.len(), 2);
        assert!(v[0].dist(Vec2::new(0.5, -S3)) < 1e-12 && v[1].dist(Vec2::new(0.5, S3)) < 1e-12);
        assert_eq!(lens.arcs().len(), 2);
        for a in lens.arcs() {
            assert!(a.is_minimal(&g));
        }
        // nested: the bigger chain clipped by a smaller inner disc
        let small = chain_clip(&g, &disc, &circ(0.1, 0.0, 0.3));
        assert!(small.same_as(&ArcChain::disc(&g, circ(0.1, 0.0, 0.3), None), 1e-12));
        // contained: disc of radius 2 leaves the chain alone
        assert_eq!(chain_clip(&g, &lens, &circ(0.5, 0.0, 2.0)), lens);
    }

    #[test]
    fn clip_edits_replay() {
        let g = Gauge::lp(3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut chain = ArcChain::disc(&g, circ(0.0, 0.0, 1.0), Some(0));
            for k in 1..8 {
                let c = circ(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), 1.0);
                let res = chain_clip_labeled(&g, &chain, &c, Some(k));
                let replayed = res.edit.apply(&chain).unwrap();
                assert!(replayed.same_as(&res.chain, 1e-12));
                let undone = res.edit.inverse(&chain).apply(&res.chain).unwrap();
                assert!(undone.same_as(&chain, 1e-12));
                if let (ArcChain::Region(a), ArcChain::Region(b)) = (&undone, &chain) {
                    assert_eq!(a.len(), b.len());
                    for (x, y) in a.iter().zip(b) {
                        assert!(x.start.dist(y.start) < 1e-12);
                    }
                }
                chain = res.chain;
            }
        }
    }

    fn random_circle(rng: &mut ChaCha8Rng) -> Circle {
        circ(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.5))
    }

    #[test]
    fn at_most_two_crossings_fuzz() {
        let gauges = [
            e(),
            Gauge::lp(1.5).unwrap(),
            Gauge::lp(3.0).unwrap(),
            Gauge::lp(4.0).unwrap(),
            Gauge::linear_image([[1.4, 0.3], [0.0, 0.7]], &Gauge::lp(3.0).unwrap()).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in &gauges {
            for _ in 0..10_000 {
                let (a, b) = (random_circle(&mut rng), random_circle(&mut rng));
                let pts = circle_intersect(g, &a, &b);
                assert!(pts.len() <= 2);
                for q in pts {
                    assert!((g.dist(q, a.center) - a.radius).abs() <= 1e-9 * a.radius.max(1.0));
                    assert!((g.dist(q, b.center) - b.radius).abs() <= 1e-8 * b.radius.max(1.0));
                }
            }
        }
    }

    #[test]
    fn minimal_arc_containment_properties() {
        let gauges = [Gauge::lp(1.5).unwrap(), Gauge::lp(3.0).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in &gauges {
            for _ in 0..20 {
                let p = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                let q = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                let lambda = 1.0;
                let alpha = rng.gen_range(1.0..3.0);
                let arcs = [
                    minimal_arc(g, p, q, lambda, Side::Left).unwrap(),
                    minimal_arc(g, p, q, lambda, Side::Right).unwrap(),
                    minimal_arc(g, p, q, alpha, Side::Left).unwrap(),
                    minimal_arc(g, p, q, alpha, Side::Right).unwrap(),
                ];
                let mut found = 0;
                while found < 100 {
                    let c = Vec2::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                    if g.dist(c, p) > lambda || g.dist(c, q) > lambda {
                        continue;
                    }
                    found += 1;
                    let disc = circ(c.x, c.y, lambda);
                    for a in &arcs {
                        for u in a.sample(g, 64) {
                            assert_ne!(in_disc(g, &disc, u), DiscSide::Outside);
                        }
                    }
                }
            }
        }
    }

    fn grid_members(g: &Gauge, ch: &ArcChain) -> Vec<bool> {
        let mut out = Vec::new();
        for i in 0..64 {
            for j in 0..64 {
                let x = Vec2::new(-2.0 + 4.0 * (i as f64 + 0.5) / 64.0, -2.0 + 4.0 * (j as f64 + 0.5) / 64.0);
                out.push(ch.contains(g, x));
            }
        }
        out
    }

    #[test]
    fn clip_idempotent_and_commutative() {
        let g = Gauge::lp(1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let base = {
                let mut ch = ArcChain::disc(&g, circ(0.0, 0.0, 1.0), None);
                for _ in 0..3 {
                    let c = circ(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7), 1.0);
                    ch = chain_clip(&g, &ch, &c);
                }
                ch
            };
            let c1 = circ(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8), 1.0);
            let c2 = circ(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8), 1.0);
            let once = chain_clip(&g, &base, &c1);
            let twice = chain_clip(&g, &once, &c1);
            assert!(once.same_as(&twice, 1e-8));
            let ab = chain_clip(&g, &once, &c2);
            let ba = chain_clip(&g, &chain_clip(&g, &base, &c2), &c1);
            // direct membership oracle: inside all discs
            let all = [c1, c2];
            let mut mism = 0;
            for (idx, (x, y)) in grid_members(&g, &ab).iter().zip(grid_members(&g, &ba)).enumerate() {
                if *x != y {
                    mism += 1;
                }
                let i = idx / 64;
                let j = idx % 64;
                let pt = Vec2::new(-2.0 + 4.0 * (i as f64 + 0.5) / 64.0, -2.0 + 4.0 * (j as f64 + 0.5) / 64.0);
                let direct = base.contains(&g, pt) && all.iter().all(|c| in_disc(&g, c, pt) != DiscSide::Outside);
                assert_eq!(*x, direct);
            }
            assert_eq!(mism, 0);
        }
    }
}
