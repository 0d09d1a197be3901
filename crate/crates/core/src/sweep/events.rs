//! Crossing events along the host circles and their split into sweep segments.

use crate::arcgeom::{circle_intersect, Circle};
use crate::ballops::PointSet;
use crate::norm::Gauge;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    /// The point becomes covered by the host-centered disc and leaves F.
    LeaveF,
    /// The point stops being covered and enters F.
    EnterF,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub point_index: usize,
    pub kind: EventKind,
}

/// Events of every host circle `S(K[i], r)`, sorted by parameter with
/// leaves before enters at equal parameters.
pub fn build_event_lists(g: &Gauge, k: &PointSet, r: f64) -> Vec<Vec<Event>> {
    let pts = k.points();
    let n = pts.len();
    let mut lists: Vec<Vec<Event>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if g.dist(pts[i], pts[j]) > 2.0 * r * (1.0 + g.tolerance()) {
                continue;
            }
            let ci = Circle { center: pts[i], radius: r };
            let cj = Circle { center: pts[j], radius: r };
            let xs = circle_intersect(g, &ci, &cj);
            // the same crossing points serve both host circles
            push_pair_events(g, &mut lists[i], pts[i], pts[j], j, r, &xs);
            push_pair_events(g, &mut lists[j], pts[j], pts[i], i, r, &xs);
        }
    }
    for l in lists.iter_mut() {
        sort_events(l);
    }
    lists
}

fn sort_events(l: &mut [Event]) {
    l.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then(a.kind.cmp(&b.kind))
            .then(a.point_index.cmp(&b.point_index))
    });
}

fn push_pair_events(
    g: &Gauge,
    out: &mut Vec<Event>,
    host: crate::Vec2,
    other: crate::Vec2,
    j: usize,
    r: f64,
    xs: &[crate::Vec2],
) {
    match xs.len() {
        0 => {}
        1 => {
            let t = g.param_of(xs[0] - host);
            out.push(Event { t, point_index: j, kind: EventKind::LeaveF });
            out.push(Event { t, point_index: j, kind: EventKind::EnterF });
        }
        _ => {
            let t1 = g.param_of(xs[0] - host);
            let t2 = g.param_of(xs[1] - host);
            let mid = host + g.unit_boundary(t1 + 0.5 * (t2 - t1).rem_euclid(1.0)) * r;
            let (leave, enter) = if g.dist(mid, other) <= r { (t1, t2) } else { (t2, t1) };
            out.push(Event { t: leave, point_index: j, kind: EventKind::LeaveF });
            out.push(Event { t: enter, point_index: j, kind: EventKind::EnterF });
        }
    }
}

/// A stretch of one host circle on which F splits into an insertion-only set
/// A (starting empty) and a deletion-only set D (starting at `initial_d`).
#[derive(Debug, Clone)]
pub struct SweepSegment {
    pub host: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub events: Vec<Event>,
    pub initial_d: Vec<usize>,
}

impl SweepSegment {
    pub fn deletions(&self) -> impl Iterator<Item = usize> + '_ {
        let mut in_d = vec![false; self.max_index() + 1];
        for &i in &self.initial_d {
            in_d[i] = true;
        }
        self.events.iter().filter_map(move |e| {
            if e.kind == EventKind::LeaveF && in_d[e.point_index] {
                in_d[e.point_index] = false;
                Some(e.point_index)
            } else {
                None
            }
        })
    }

    pub fn insertions(&self) -> impl Iterator<Item = usize> + '_ {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::EnterF)
            .map(|e| e.point_index)
    }

    fn max_index(&self) -> usize {
        self.initial_d
            .iter()
            .chain(self.events.iter().map(|e| &e.point_index))
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Membership in F just before parameter `t`, derived from the events.
pub(crate) fn f_before(n: usize, host: usize, events: &[Event], t: f64) -> Vec<bool> {
    let mut leave = vec![None; n];
    let mut enter = vec![None; n];
    for e in events {
        match e.kind {
            EventKind::LeaveF => leave[e.point_index] = Some(e.t),
            EventKind::EnterF => enter[e.point_index] = Some(e.t),
        }
    }
    (0..n)
        .map(|j| {
            if j == host {
                return false;
            }
            match (leave[j], enter[j]) {
                (Some(l), Some(en)) => {
                    let len = (en - l).rem_euclid(1.0);
                    let s = (t - l).rem_euclid(1.0);
                    // covered on the closed parameter interval [l, en]
                    !(s > 0.0 && s <= len)
                }
                _ => true,
            }
        })
        .collect()
}

/// Splits a host circle at the four parameter quarters, and further wherever
/// a point inserted into A would have to leave again.
pub fn quarter_split(n: usize, host: usize, events: &[Event]) -> Vec<SweepSegment> {
    let bounds = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut out = Vec::new();
    for q in 0..4 {
        let (ta, tb) = (bounds[q], bounds[q + 1]);
        let evs: Vec<Event> = events.iter().filter(|e| e.t >= ta && e.t < tb).copied().collect();
        let mut f = f_before(n, host, events, ta);
        let mut in_a = vec![false; n];
        let mut seg_start = ta;
        let mut seg_events: Vec<Event> = Vec::new();
        let mut initial: Vec<usize> = (0..n).filter(|&j| f[j]).collect();
        for e in evs {
            if e.kind == EventKind::LeaveF && in_a[e.point_index] {
                out.push(SweepSegment {
                    host,
                    t_start: seg_start,
                    t_end: e.t,
                    events: std::mem::take(&mut seg_events),
                    initial_d: initial,
                });
                seg_start = e.t;
                initial = (0..n).filter(|&j| f[j]).collect();
                in_a.iter_mut().for_each(|x| *x = false);
            }
            match e.kind {
                EventKind::LeaveF => f[e.point_index] = false,
                EventKind::EnterF => {
                    f[e.point_index] = true;
                    in_a[e.point_index] = true;
                }
            }
            seg_events.push(e);
        }
        out.push(SweepSegment {
            host,
            t_start: seg_start,
            t_end: tb,
            events: seg_events,
            initial_d: initial,
        });
    }
    out
}
