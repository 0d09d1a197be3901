//! The 2-center decision problem: can K be covered by a disc of radius `r1`
//! and a disc of radius `r2`?
//!
//! After scaling so that `r2 = 1` and `r = r1 / r2 > 1`, the first center is
//! moved along every circle `S(q, r)`, `q ∈ K`. At parameter `t` the points
//! left uncovered form `F_t`, and the answer is yes exactly when `bi(F_t, 1)`
//! is nonempty somewhere. Each circle is cut into segments on which `F_t` is
//! the union of an insertion-only set A and a deletion-only set D; their ball
//! intersections are kept as change transcripts and tested for a common point.

pub mod events;
pub mod overlap;
pub mod transcript;

use rayon::prelude::*;

use crate::arcgeom::{ArcChain, ChainEdit};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::ballops::{ball_intersection, PointSet};
use crate::error::{GeomError, Result};
use crate::norm::{Gauge, Vec2};

pub use events::{build_event_lists, quarter_split, Event, EventKind, SweepSegment};
pub use overlap::{detect_overlap, Interleave, OverlapTracker};
pub use transcript::{deletion_transcript, insertion_transcript, Step, StepEdit, Transcript};

/// Relative slack when certifying a witness.
pub const WITNESS_SLACK: f64 = 1e-7;

/// Scales K by `1/r2`; returns the scaled set and `r = r1 / r2`.
pub fn normalize(k: &PointSet, r1: f64, r2: f64) -> Result<(PointSet, f64)> {
    if !(r2 > 0.0) || !(r1 > r2) || !r1.is_finite() {
        return Err(GeomError::InvalidRadii { r1, r2 });
    }
    Ok((k.scaled(1.0 / r2), r1 / r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Transcripts plus incremental overlap tracking.
    #[default]
    Transcripts,
    /// Recompute `bi(F_t)` from scratch at every check; slow, for cross-checks.
    Recompute,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecideOptions {
    pub parallel: bool,
    /// Keep sweeping after the first witness and record one per segment.
    pub exhaustive: bool,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub center1: Vec2,
    pub center2: Vec2,
    /// Host circle index, or `None` for a single covering disc.
    pub host: Option<usize>,
    pub t: f64,
    pub segment: usize,
    pub event: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SweepStats {
    pub events: usize,
    pub segments: usize,
    pub checks: usize,
    pub rejected_witnesses: usize,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Every witness found; only populated in exhaustive mode.
    pub all_witnesses: Vec<Witness>,
    pub stats: SweepStats,
}

/// Every point within `r1` of `c1` or `r2` of `c2`, with [`WITNESS_SLACK`].
pub fn verify_cover(g: &Gauge, k: &PointSet, r1: f64, r2: f64, c1: Vec2, c2: Vec2) -> bool {
    k.points().iter().all(|&p| {
        g.dist(p, c1) <= r1 * (1.0 + WITNESS_SLACK) || g.dist(p, c2) <= r2 * (1.0 + WITNESS_SLACK)
    })
}

pub fn decide(g: &Gauge, k: &PointSet, r1: f64, r2: f64) -> Result<Decision> {
    decide_with(g, k, r1, r2, &DecideOptions::default())
}

pub fn decide_with(g: &Gauge, k: &PointSet, r1: f64, r2: f64, opts: &DecideOptions) -> Result<Decision> {
    let (kn, r) = normalize(k, r1, r2)?;
    let mut stats = SweepStats::default();

    // one disc suffices iff bi(K, r1) is nonempty; its vertex centroid lies inside
    let bi1 = ball_intersection(g, k, r1)?.chain;
    let one_disc = [bi1.centroid(), bi1.representative()]
        .into_iter()
        .flatten()
        .find(|&c| verify_cover(g, k, r1, r2, c, c))
        .map(|c| Witness { center1: c, center2: c, host: None, t: 0.0, segment: 0, event: 0 });
    if one_disc.is_some() && !opts.exhaustive {
        return Ok(Decision { verdict: Verdict::Yes, witness: one_disc, all_witnesses: Vec::new(), stats });
    }

    let lists = build_event_lists(g, &kn, r);
    stats.events = lists.iter().map(|l| l.len()).sum();
    let n = kn.len();
    let ctx = Ctx { g, k, kn: &kn, r, r1, r2, opts, tally: Default::default() };

    let run_host = |host: usize| ctx.sweep_host(host, &lists[host]);
    let results: Vec<HostResult> = if opts.exhaustive {
        if opts.parallel {
            (0..n).into_par_iter().map(run_host).collect::<Result<_>>()?
        } else {
            (0..n).map(run_host).collect::<Result<_>>()?
        }
    } else {
        // hosts in index order; the first one with a witness wins
        let found = if opts.parallel {
            (0..n).into_par_iter().map(run_host).find_map_first(|r| match r {
                Ok(h) if !h.witnesses.is_empty() => Some(Ok(h)),
                Err(e) => Some(Err(e)),
                _ => None,
            })
        } else {
            (0..n).map(run_host).find_map(|r| match r {
                Ok(h) if !h.witnesses.is_empty() => Some(Ok(h)),
                Err(e) => Some(Err(e)),
                _ => None,
            })
        };
        match found {
            Some(h) => vec![h?],
            None => Vec::new(),
        }
    };
    let mut all = Vec::new();
    all.extend(one_disc);
    for h in &results {
        all.extend(h.witnesses.iter().copied());
    }
    // every swept host counts, not only the ones returned
    stats.segments = ctx.tally[0].load(Ordering::Relaxed);
    stats.checks = ctx.tally[1].load(Ordering::Relaxed);
    stats.rejected_witnesses = ctx.tally[2].load(Ordering::Relaxed);
    let witness = all.first().copied();
    Ok(Decision {
        verdict: if witness.is_some() { Verdict::Yes } else { Verdict::No },
        witness,
        all_witnesses: if opts.exhaustive { all } else { Vec::new() },
        stats,
    })
}

struct Ctx<'a> {
    g: &'a Gauge,
    k: &'a PointSet,
    kn: &'a PointSet,
    r: f64,
    r1: f64,
    r2: f64,
    opts: &'a DecideOptions,
    /// Segments, checks and rejected witnesses over all hosts.
    tally: [AtomicUsize; 3],
}

#[derive(Debug, Default)]
struct HostResult {
    witnesses: Vec<Witness>,
    segments: usize,
    checks: usize,
    rejected: usize,
}

impl Ctx<'_> {
    fn sweep_host(&self, host: usize, events: &[Event]) -> Result<HostResult> {
        let n = self.kn.len();
        let segs = quarter_split(n, host, events);
        let mut out = HostResult { segments: segs.len(), ..Default::default() };
        for (si, seg) in segs.iter().enumerate() {
            if let Some(w) = self.sweep_segment(host, si, seg, &mut out)? {
                out.witnesses.push(w);
                if !self.opts.exhaustive {
                    break;
                }
            }
        }
        for (slot, v) in self.tally.iter().zip([out.segments, out.checks, out.rejected]) {
            slot.fetch_add(v, Ordering::Relaxed);
        }
        Ok(out)
    }

    fn host_point(&self, host: usize, t: f64) -> Vec2 {
        self.kn.points()[host] + self.g.unit_boundary(t) * self.r
    }

    /// Turns a normalized candidate into a certified witness, if it is one.
    fn certify(&self, host: usize, si: usize, ei: usize, t: f64, w: Vec2, chains: Option<(&Option<ArcChain>, &Option<ArcChain>)>) -> Option<Witness> {
        let c1 = self.host_point(host, t) * self.r2;
        let mk = |c2: Vec2| Witness { center1: c1, center2: c2, host: Some(host), t, segment: si, event: ei };
        if verify_cover(self.g, self.k, self.r1, self.r2, c1, w * self.r2) {
            return Some(mk(w * self.r2));
        }
        // near-tangent: retry with an exact clip
        if let Some((Some(a), Some(d))) = chains {
            if let Some(p) = overlap::exact_meet(self.g, a, d) {
                if verify_cover(self.g, self.k, self.r1, self.r2, c1, p * self.r2) {
                    return Some(mk(p * self.r2));
                }
            }
        }
        None
    }

    fn sweep_segment(&self, host: usize, si: usize, seg: &SweepSegment, out: &mut HostResult) -> Result<Option<Witness>> {
        let g = self.g;
        let pts = self.kn.points();
        let dels: Vec<usize> = seg.deletions().collect();
        let mut deleted = vec![false; pts.len()];
        dels.iter().for_each(|&j| deleted[j] = true);
        let stat: Vec<(usize, Vec2)> = seg.initial_d.iter().filter(|&&j| !deleted[j]).map(|&j| (j, pts[j])).collect();
        let del_pts: Vec<(usize, Vec2)> = dels.iter().map(|&j| (j, pts[j])).collect();
        let ins_pts: Vec<(usize, Vec2)> = seg.insertions().map(|j| (j, pts[j])).collect();

        // check positions: start, then after the last leave at each parameter
        let mut checks: Vec<(usize, f64, usize)> = vec![(0, seg.t_start, 0)];
        let mut nd = 0;
        let mut in_d = vec![false; pts.len()];
        seg.initial_d.iter().for_each(|&j| in_d[j] = true);
        let mut interleave = Vec::with_capacity(seg.events.len());
        for (ei, e) in seg.events.iter().enumerate() {
            match e.kind {
                EventKind::LeaveF => {
                    if in_d[e.point_index] {
                        in_d[e.point_index] = false;
                        interleave.push(Interleave::Delete);
                        nd += 1;
                    }
                    let last_leave = seg.events.get(ei + 1).map_or(true, |x| x.t != e.t || x.kind != EventKind::LeaveF);
                    if last_leave {
                        checks.push((ei + 1, e.t, nd));
                    }
                }
                EventKind::EnterF => interleave.push(Interleave::Insert),
            }
        }

        if self.opts.strategy == Strategy::Recompute {
            return Ok(self.recompute_segment(host, si, seg, &checks, out));
        }

        let td = deletion_transcript(g, &stat, &del_pts);
        let static_empty = matches!(td.initial, Some(ArcChain::Empty))
            && td.steps.iter().all(|s| s.edit == StepEdit::Edit(ChainEdit::Unchanged));
        if static_empty {
            // the points never deleted already admit no second center
            return Ok(None);
        }
        let ta = insertion_transcript(g, &ins_pts);

        // walk events, applying steps and testing at check positions
        let mut tracker = OverlapTracker::new();
        let mut sa = ta.initial.clone();
        let mut sd = td.initial.clone();
        let (mut ia, mut id) = (0, 0);
        let mut next_check = 0;
        let mut in_d = vec![false; pts.len()];
        seg.initial_d.iter().for_each(|&j| in_d[j] = true);
        for ei in 0..=seg.events.len() {
            if next_check < checks.len() && checks[next_check].0 == ei {
                let t = checks[next_check].1;
                next_check += 1;
                out.checks += 1;
                if let Some(w) = tracker.check(g, &sa, &sd) {
                    match self.certify(host, si, ei, t, w, Some((&sa, &sd))) {
                        Some(wit) => return Ok(Some(wit)),
                        None => out.rejected += 1,
                    }
                }
            }
            let Some(e) = seg.events.get(ei) else { break };
            match e.kind {
                EventKind::LeaveF => {
                    if in_d[e.point_index] {
                        in_d[e.point_index] = false;
                        if td.steps[id].point != e.point_index {
                            return Err(GeomError::Internal("deletion transcript out of step".into()));
                        }
                        sd = td.apply_step(&sd, id)?;
                        id += 1;
                    }
                }
                EventKind::EnterF => {
                    if ia < ta.steps.len() {
                        sa = ta.apply_step(&sa, ia)?;
                        ia += 1;
                    }
                    if matches!(sa, Some(ArcChain::Empty)) {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(None)
    }

    fn recompute_segment(&self, host: usize, si: usize, seg: &SweepSegment, checks: &[(usize, f64, usize)], out: &mut HostResult) -> Option<Witness> {
        let pts = self.kn.points();
        let mut f = vec![false; pts.len()];
        seg.initial_d.iter().for_each(|&j| f[j] = true);
        let mut applied = 0;
        for &(ei, t, _) in checks {
            for e in &seg.events[applied..ei] {
                f[e.point_index] = e.kind == EventKind::EnterF;
            }
            applied = ei;
            out.checks += 1;
            let members: Vec<(usize, Vec2)> = (0..pts.len()).filter(|&j| f[j]).map(|j| (j, pts[j])).collect();
            let state = insertion_transcript(self.g, &members).final_state().ok()?;
            let w = match &state {
                None => Some(self.host_point(host, t)),
                Some(c) => c.representative(),
            };
            if let Some(w) = w {
                match self.certify(host, si, ei, t, w, None) {
                    Some(wit) => return Some(wit),
                    None => out.rejected += 1,
                }
            }
        }
        None
    }
}
