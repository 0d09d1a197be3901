//! Slow, independent references for testing. Nothing here reuses the main
//! algorithms; only gauge evaluation and boundary points are shared.

use crate::ballops::PointSet;
use crate::error::{GeomError, Result};
use crate::norm::{Gauge, Vec2};
use crate::sweep::Verdict;

/// Largest point set the bipartition oracle accepts.
pub const PARTITION_LIMIT: usize = 20;
/// Relative slack of the bipartition oracle's radius test.
pub const PARTITION_SLACK: f64 = 1e-6;

/// An axis-aligned sampling grid of cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: Vec2,
    pub max: Vec2,
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(min: Vec2, max: Vec2, resolution: usize) -> GridSpec {
        GridSpec { min, max, resolution: resolution.max(16) }
    }

    /// Bounding box of `pts` widened by `margin` about its center.
    pub fn around(pts: &[Vec2], margin: f64, resolution: usize) -> GridSpec {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let c = lo.midpoint(hi);
        let half = ((hi - lo) * 0.5 * margin).max_component().max(1e-9);
        GridSpec::new(c - Vec2::new(half, half), c + Vec2::new(half, half), resolution)
    }

    pub fn cell(&self) -> Vec2 {
        (self.max - self.min) / self.resolution as f64
    }

    pub fn cell_diag(&self) -> f64 {
        self.cell().length()
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        let c = self.cell();
        Vec2::new(self.min.x + (i as f64 + 0.5) * c.x, self.min.y + (j as f64 + 0.5) * c.y)
    }

    pub fn centers(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.resolution).flat_map(move |i| (0..self.resolution).map(move |j| self.center(i, j)))
    }
}

trait MaxComponent {
    fn max_component(self) -> f64;
}

impl MaxComponent for Vec2 {
    fn max_component(self) -> f64 {
        self.x.max(self.y)
    }
}

fn max_eval(g: &Gauge, pts: &[Vec2], x: Vec2) -> f64 {
    pts.iter().map(|&p| g.eval(x - p)).fold(0.0, f64::max)
}

/// Grid descent for `min_x max_i ‖x − p_i‖`: three refinements, each 8×
/// finer around the incumbent. On every level the window is re-centered
/// until the incumbent is off its border, so a flat valley cannot strand it.
pub fn minimax_center(g: &Gauge, k: &PointSet, grid: &GridSpec) -> (f64, Vec2) {
    let pts = k.points();
    if pts.len() == 1 {
        return (0.0, pts[0]);
    }
    let mut gs = *grid;
    let mut best = (f64::INFINITY, pts[0]);
    for round in 0..4 {
        for _ in 0..64 {
            let mut local = (f64::INFINITY, Vec2::ZERO, 0, 0);
            for i in 0..gs.resolution {
                for j in 0..gs.resolution {
                    let x = gs.center(i, j);
                    let v = max_eval(g, pts, x);
                    if v < local.0 {
                        local = (v, x, i, j);
                    }
                }
            }
            if local.0 < best.0 {
                best = (local.0, local.1);
            }
            let edge = |i: usize| i < 2 || i + 2 >= gs.resolution;
            if !(edge(local.2) || edge(local.3)) {
                break;
            }
            let half = (gs.max - gs.min) * 0.5;
            gs = GridSpec::new(local.1 - half, local.1 + half, gs.resolution);
        }
        if round < 3 {
            let half = (gs.max - gs.min) * (0.5 / 8.0);
            gs = GridSpec::new(best.1 - half, best.1 + half, gs.resolution);
        }
    }
    best
}

/// Membership test for the intersection of an explicit disc family.
#[derive(Debug, Clone)]
pub struct DiscFamily {
    pub lambda: f64,
    pub centers: Vec<Vec2>,
    single: Option<Vec2>,
}

impl DiscFamily {
    pub fn contains(&self, g: &Gauge, x: Vec2) -> bool {
        if let Some(p) = self.single {
            return x.dist(p) <= 1e-9;
        }
        self.centers.iter().all(|&c| g.eval(x - c) <= self.lambda * (1.0 + 1e-7))
    }

    /// `max_c ‖x − c‖ / λ − 1`; negative inside.
    pub fn excess(&self, g: &Gauge, x: Vec2) -> f64 {
        self.centers.iter().map(|&c| g.eval(x - c) / self.lambda - 1.0).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Centers of radius-λ circles through `p` and `q`: sign changes of
/// `‖z(t) − q‖ − λ` for `z(t)` on `S(p, λ)`, refined by bisection.
fn equidistant_centers(g: &Gauge, p: Vec2, q: Vec2, lambda: f64) -> Vec<Vec2> {
    let m = 512;
    let h = |t: f64| g.eval(g.boundary_point(p, lambda, t).unwrap() - q) - lambda;
    let mut out = Vec::new();
    let mut prev = h(0.0);
    for i in 1..=m {
        let (a0, b0) = ((i - 1) as f64 / m as f64, i as f64 / m as f64);
        let cur = h(b0);
        if prev == 0.0 || (prev < 0.0) != (cur < 0.0) {
            let (mut a, mut b, mut fa) = (a0, b0, prev);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let fm = h(mid);
                if (fm < 0.0) == (fa < 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            out.push(g.boundary_point(p, lambda, 0.5 * (a + b)).unwrap());
        }
        prev = cur;
    }
    out
}

/// The hull as the intersection of every radius-λ disc through two points
/// of K that contains K.
pub fn hull_by_enumeration(g: &Gauge, k: &PointSet, lambda: f64) -> Result<DiscFamily> {
    let pts = k.points();
    if pts.len() == 1 {
        return Ok(DiscFamily { lambda, centers: Vec::new(), single: Some(pts[0]) });
    }
    let mut centers = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for c in equidistant_centers(g, pts[i], pts[j], lambda) {
                if pts.iter().all(|&p| g.eval(p - c) <= lambda * (1.0 + 1e-7)) {
                    centers.push(c);
                }
            }
        }
    }
    if centers.is_empty() {
        return Err(GeomError::InvalidArgument(format!(
            "no disc of radius {lambda} through two points contains the set"
        )));
    }
    Ok(DiscFamily { lambda, centers, single: None })
}

fn golden<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// Smallest enclosing radius of up to three points by nested golden search.
fn small_radius(g: &Gauge, pts: &[Vec2], reach: f64) -> f64 {
    match pts.len() {
        0 | 1 => 0.0,
        2 => 0.5 * g.eval(pts[0] - pts[1]),
        _ => {
            // a pair midpoint that covers the rest is optimal
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let m = pts[i].midpoint(pts[j]);
                    let r = 0.5 * g.eval(pts[i] - pts[j]);
                    if max_eval(g, pts, m) <= r * (1.0 + 1e-12) {
                        return r;
                    }
                }
            }
            let (mut lo, mut hi) = (pts[0], pts[0]);
            for p in pts {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            let tol = 1e-10 * reach.max(1e-300);
            golden(
                |x| golden(|y| max_eval(g, pts, Vec2::new(x, y)), lo.y - reach, hi.y + reach, tol),
                lo.x - reach,
                hi.x + reach,
                tol,
            )
        }
    }
}

/// Euclidean length bound for vectors of gauge length `d`.
fn reach(g: &Gauge, d: f64) -> f64 {
    (0..64)
        .map(|i| g.boundary_point(Vec2::ZERO, 1.0, i as f64 / 64.0).unwrap().length())
        .fold(0.0, f64::max)
        * d
        * 1.1
}

/// Circumradius of every subset of K, indexed by bitmask. By Helly's theorem
/// a set fits in a disc iff every three of its points do.
pub fn subset_radii(g: &Gauge, k: &PointSet) -> Result<Vec<f64>> {
    let pts = k.points();
    let n = pts.len();
    if n > PARTITION_LIMIT {
        return Err(GeomError::OracleTooLarge(n, PARTITION_LIMIT));
    }
    let mut diam = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            diam = diam.max(g.eval(pts[i] - pts[j]));
        }
    }
    let rch = reach(g, diam);
    let mut pair = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            pair[i][j] = small_radius(g, &[pts[i], pts[j]], rch);
            pair[j][i] = pair[i][j];
        }
    }
    // triple[i][j][k] for i < j < k
    let mut triple = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                triple[(i * n + j) * n + l] = small_radius(g, &[pts[i], pts[j], pts[l]], rch);
            }
        }
    }
    let mut rad = vec![0.0; 1 << n];
    for s in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - s.leading_zeros() as usize;
        let rest = s & !(1 << top);
        let mut v: f64 = rad[rest];
        let members: Vec<usize> = (0..top).filter(|&b| rest >> b & 1 == 1).collect();
        for (a, &i) in members.iter().enumerate() {
            v = v.max(pair[i][top]);
            for &j in &members[a + 1..] {
                v = v.max(triple[(i * n + j) * n + top]);
            }
        }
        rad[s] = v;
    }
    Ok(rad)
}

/// YES iff some bipartition has circumradii within `r1` and `r2` (with
/// [`PARTITION_SLACK`]); an empty part is allowed.
pub fn two_center_by_partition(g: &Gauge, k: &PointSet, r1: f64, r2: f64) -> Result<Verdict> {
    if !(r2 > 0.0) || !(r1 > r2) {
        return Err(GeomError::InvalidRadii { r1, r2 });
    }
    let rad = subset_radii(g, k)?;
    let full = rad.len() - 1;
    let fits = (0..rad.len()).any(|s| {
        rad[s] <= r1 * (1.0 + PARTITION_SLACK) && rad[full & !s] <= r2 * (1.0 + PARTITION_SLACK)
    });
    Ok(if fits { Verdict::Yes } else { Verdict::No })
}

/// Smallest `s` such that radii `(rho·s, s)` admit a bipartition.
pub fn two_center_threshold(g: &Gauge, k: &PointSet, rho: f64) -> Result<f64> {
    let rad = subset_radii(g, k)?;
    let full = rad.len() - 1;
    Ok((0..rad.len())
        .map(|s| (rad[s] / rho).max(rad[full & !s]))
        .fold(f64::INFINITY, f64::min))
}
