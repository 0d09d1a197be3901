//! Intersection tests between the A- and D-chains of a sweep segment.

use crate::arcgeom::{chain_clip, ArcChain};
use crate::error::{GeomError, Result};
use crate::norm::{Gauge, Vec2};

use super::transcript::Transcript;

/// Closest-point distance below which two chains are declared to meet.
const TOUCH: f64 = 1e-9;
const MAX_ITERS: usize = 96;

#[derive(Clone, Copy, Debug)]
struct SimplexPt {
    m: Vec2,
    a: Vec2,
    d: Vec2,
}

/// Outcome of a distance query between two convex chains.
#[derive(Debug, Clone, Copy)]
pub enum Separation {
    /// A common point.
    Meet(Vec2),
    /// A direction `u` with `max_A <u,.> < min_D <u,.>`.
    Apart(Vec2),
    Unknown,
}

fn support_diff(g: &Gauge, a: &ArcChain, d: &ArcChain, u: Vec2) -> SimplexPt {
    let pa = a.support_point(g, u).unwrap();
    let pd = d.support_point(g, -u).unwrap();
    SimplexPt { m: pa - pd, a: pa, d: pd }
}

/// Closest point of a 1- or 2-simplex to the origin, reducing the simplex to
/// the supporting feature; weights are barycentric.
fn closest_segment(s: &[SimplexPt]) -> (Vec2, Vec<(SimplexPt, f64)>) {
    if s.len() == 1 {
        return (s[0].m, vec![(s[0], 1.0)]);
    }
    let (p, q) = (s[0].m, s[1].m);
    let e = q - p;
    let ee = e.dot(e);
    let t = if ee > 0.0 { (-p.dot(e) / ee).clamp(0.0, 1.0) } else { 0.0 };
    if t <= 0.0 {
        (p, vec![(s[0], 1.0)])
    } else if t >= 1.0 {
        (q, vec![(s[1], 1.0)])
    } else {
        (p + e * t, vec![(s[0], 1.0 - t), (s[1], t)])
    }
}

fn closest_simplex(s: &[SimplexPt]) -> (Vec2, Vec<(SimplexPt, f64)>) {
    if s.len() < 3 {
        return closest_segment(s);
    }
    let (a, b, c) = (s[0].m, s[1].m, s[2].m);
    let area = (b - a).cross(c - a);
    if area.abs() > 0.0 {
        // barycentric coordinates of the origin
        let wa = (b.cross(c)) / area;
        let wb = (c.cross(a)) / area;
        let wc = (a.cross(b)) / area;
        if wa >= 0.0 && wb >= 0.0 && wc >= 0.0 {
            return (Vec2::ZERO, vec![(s[0], wa), (s[1], wb), (s[2], wc)]);
        }
    }
    let cands = [
        closest_segment(&[s[0], s[1]]),
        closest_segment(&[s[1], s[2]]),
        closest_segment(&[s[0], s[2]]),
    ];
    cands
        .into_iter()
        .min_by(|x, y| x.0.length().total_cmp(&y.0.length()))
        .unwrap()
}

/// GJK distance between two nonempty chains, warm-started from `dir`.
pub fn gjk(g: &Gauge, a: &ArcChain, d: &ArcChain, dir: Option<Vec2>, scale: f64) -> Separation {
    let mut v = dir.filter(|v| v.length() > 0.0).unwrap_or_else(|| {
        let ca = a.representative().unwrap();
        let cd = d.representative().unwrap();
        let w = ca - cd;
        if w.length() > 0.0 {
            w
        } else {
            Vec2::new(1.0, 0.0)
        }
    });
    let first = support_diff(g, a, d, -v);
    let mut simplex: Vec<SimplexPt> = vec![first];
    let (mut v_pt, mut weights) = closest_simplex(&simplex);
    v = v_pt;
    let touch = TOUCH * scale.max(1e-300);
    for _ in 0..MAX_ITERS {
        let dist = v.length();
        if dist <= touch {
            return Separation::Meet(meet_point(&weights));
        }
        let w = support_diff(g, a, d, -v);
        // <v, w> / |v| bounds the distance from below
        let lower = v.dot(w.m) / dist;
        if lower > 0.0 {
            return Separation::Apart(-v / dist);
        }
        if dist - lower <= 1e-12 * scale.max(1e-300) {
            // converged onto a contact
            return if dist <= 10.0 * touch {
                Separation::Meet(meet_point(&weights))
            } else {
                Separation::Unknown
            };
        }
        let mut s: Vec<SimplexPt> = weights.iter().map(|x| x.0).collect();
        if s.iter().any(|p| p.m.dist(w.m) <= 1e-15 * scale) {
            return if dist <= 10.0 * touch {
                Separation::Meet(meet_point(&weights))
            } else {
                Separation::Unknown
            };
        }
        s.push(w);
        simplex = s;
        let r = closest_simplex(&simplex);
        v_pt = r.0;
        weights = r.1;
        v = v_pt;
    }
    Separation::Unknown
}

fn meet_point(weights: &[(SimplexPt, f64)]) -> Vec2 {
    let mut pa = Vec2::ZERO;
    let mut pd = Vec2::ZERO;
    for (p, w) in weights {
        pa += p.a * *w;
        pd += p.d * *w;
    }
    pa.midpoint(pd)
}

/// `A ∩ D` by clipping A with every disc bounding D.
pub fn exact_meet(g: &Gauge, a: &ArcChain, d: &ArcChain) -> Option<Vec2> {
    match d {
        ArcChain::Empty => None,
        ArcChain::Point(p) => a.contains(g, *p).then_some(*p),
        ArcChain::Region(arcs) => {
            let mut c = a.clone();
            for arc in arcs {
                c = chain_clip(g, &c, &arc.circle);
                if c.is_empty() {
                    return None;
                }
            }
            c.representative()
        }
    }
}

/// Stateful overlap test; remembers the last separating direction, which
/// usually stays valid across consecutive events.
#[derive(Debug, Default, Clone)]
pub struct OverlapTracker {
    dir: Option<Vec2>,
    pub gjk_calls: usize,
    pub fallbacks: usize,
}

impl OverlapTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// A common point of the two states, where `None` is the whole plane.
    pub fn check(&mut self, g: &Gauge, a: &Option<ArcChain>, d: &Option<ArcChain>) -> Option<Vec2> {
        match (a, d) {
            (None, None) => Some(Vec2::ZERO),
            (None, Some(c)) | (Some(c), None) => c.representative(),
            (Some(ca), Some(cd)) => {
                if ca.is_empty() || cd.is_empty() {
                    return None;
                }
                if let Some(u) = self.dir {
                    let ha = u.dot(ca.support_point(g, u).unwrap());
                    let hd = u.dot(cd.support_point(g, -u).unwrap());
                    if ha < hd {
                        return None;
                    }
                }
                self.gjk_calls += 1;
                match gjk(g, ca, cd, self.dir.map(|u| -u), 1.0) {
                    Separation::Meet(p) => Some(p),
                    Separation::Apart(u) => {
                        self.dir = Some(u);
                        None
                    }
                    Separation::Unknown => {
                        self.fallbacks += 1;
                        exact_meet(g, ca, cd)
                    }
                }
            }
        }
    }
}

/// Order in which the two transcripts' steps happen along a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    Insert,
    Delete,
}

/// First position (number of interleave entries consumed) at which the
/// A- and D-states meet, with a common point. Checked at the start and after
/// every run of deletions: insertions only shrink A.
pub fn detect_overlap(
    g: &Gauge,
    ta: &Transcript,
    td: &Transcript,
    interleave: &[Interleave],
) -> Result<Option<(usize, Vec2)>> {
    let n_ins = interleave.iter().filter(|&&x| x == Interleave::Insert).count();
    let n_del = interleave.len() - n_ins;
    if n_del != td.steps.len() || n_ins < ta.steps.len() {
        return Err(GeomError::Internal("interleave does not match transcripts".into()));
    }
    let mut tracker = OverlapTracker::new();
    let mut sa = ta.initial.clone();
    let mut sd = td.initial.clone();
    let (mut ia, mut id) = (0, 0);
    if let Some(w) = tracker.check(g, &sa, &sd) {
        return Ok(Some((0, w)));
    }
    for (pos, step) in interleave.iter().enumerate() {
        match step {
            Interleave::Insert => {
                if ia < ta.steps.len() {
                    sa = ta.apply_step(&sa, ia)?;
                    ia += 1;
                }
                if matches!(sa, Some(ArcChain::Empty)) {
                    return Ok(None);
                }
            }
            Interleave::Delete => {
                sd = td.apply_step(&sd, id)?;
                id += 1;
                let next_is_delete = interleave.get(pos + 1) == Some(&Interleave::Delete);
                if !next_is_delete {
                    if let Some(w) = tracker.check(g, &sa, &sd) {
                        return Ok(Some((pos + 1, w)));
                    }
                }
            }
        }
    }
    Ok(None)
}
