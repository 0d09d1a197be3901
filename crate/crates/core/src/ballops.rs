//! Ball hull, ball intersection, circumradius and Chebyshev set of finite point sets.

use crate::arcgeom::{centers_through, chain_clip_labeled, Arc, ArcChain, Circle};
use crate::error::{GeomError, Result};
use crate::norm::{Gauge, Vec2};

/// Points closer than this are treated as one.
pub const DEDUP_DIST: f64 = 1e-10;
/// Radii above `LAMBDA_CAP * diam` are clamped.
pub const LAMBDA_CAP: f64 = 1e6;

/// A nonempty, deduplicated finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vec2>,
}

impl PointSet {
    /// Keeps the first of any group of points closer than [`DEDUP_DIST`].
    pub fn new(points: &[Vec2]) -> Result<PointSet> {
        if points.is_empty() {
            return Err(GeomError::EmptyPointSet);
        }
        let mut kept: Vec<Vec2> = Vec::with_capacity(points.len());
        for &p in points {
            if !p.is_finite() {
                return Err(GeomError::NonFinite);
            }
            if kept.iter().all(|q| q.dist(p) >= DEDUP_DIST) {
                kept.push(p);
            }
        }
        Ok(PointSet { points: kept })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scaled(&self, s: f64) -> PointSet {
        PointSet {
            points: self.points.iter().map(|&p| p * s).collect(),
        }
    }
}

pub fn diameter(g: &Gauge, k: &PointSet) -> f64 {
    let p = k.points();
    let mut d: f64 = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            d = d.max(g.dist(p[i], p[j]));
        }
    }
    d
}

fn max_dist(g: &Gauge, k: &PointSet, x: Vec2) -> f64 {
    k.points().iter().map(|&p| g.dist(x, p)).fold(0.0, f64::max)
}

/// `bi(K, λ)` with the generating point index stored as each arc's label.
#[derive(Debug, Clone)]
pub struct BiResult {
    pub chain: ArcChain,
    pub arc_centers: Vec<Vec2>,
}

impl BiResult {
    /// Indices into K of the points generating boundary arcs.
    pub fn arc_labels(&self) -> Vec<usize> {
        self.chain.arcs().iter().filter_map(|a| a.label).collect()
    }
}

pub fn ball_intersection(g: &Gauge, k: &PointSet, lambda: f64) -> Result<BiResult> {
    let circle0 = Circle::new(k.points()[0], lambda)?;
    let mut chain = ArcChain::disc(g, circle0, Some(0));
    for (i, &p) in k.points().iter().enumerate().skip(1) {
        chain = chain_clip_labeled(g, &chain, &Circle { center: p, radius: lambda }, Some(i)).chain;
        if chain.is_empty() {
            break;
        }
    }
    let arc_centers = chain.arcs().iter().map(|a| a.circle.center).collect();
    Ok(BiResult { chain, arc_centers })
}

/// Circumradius `λ_K` and a center of a smallest enclosing disc.
///
/// Bisects on λ using non-emptiness of `bi(K, λ)`.
pub fn circumradius(g: &Gauge, k: &PointSet) -> (f64, Vec2) {
    let (lam, w, _) = circumradius_with_chain(g, k);
    (lam, w)
}

fn circumradius_with_chain(g: &Gauge, k: &PointSet) -> (f64, Vec2, ArcChain) {
    if k.len() == 1 {
        return (0.0, k.points()[0], ArcChain::Point(k.points()[0]));
    }
    let diam = diameter(g, k);
    let bi = |lam: f64| {
        ball_intersection(g, k, lam)
            .map(|b| b.chain)
            .unwrap_or(ArcChain::Empty)
    };
    let mut lo = 0.5 * diam;
    let at_lo = bi(lo);
    if !at_lo.is_empty() {
        let w = at_lo.centroid().unwrap();
        return (lo.max(max_dist(g, k, w)).min(lo * (1.0 + 1e-12)), w, at_lo);
    }
    let mut hi = diam;
    let mut best = bi(hi);
    while best.is_empty() {
        // only reachable through rounding at the upper bracket
        hi *= 1.0 + 1e-9;
        best = bi(hi);
    }
    let width = 1e-12 * diam;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let c = bi(mid);
        if c.is_empty() {
            lo = mid;
        } else {
            hi = mid;
            best = c;
        }
    }
    let w = best.centroid().unwrap();
    let lam = hi.min(max_dist(g, k, w));
    (lam, w, best)
}

/// Centers of smallest enclosing discs, `bi(K, λ_K)`.
///
/// For a strictly convex gauge this set is a single point; the bisection
/// leaves a sliver around it that is collapsed to its centroid.
pub fn chebyshev_set(g: &Gauge, k: &PointSet) -> ArcChain {
    let (_, w, chain) = circumradius_with_chain(g, k);
    if let ArcChain::Region(_) = &chain {
        let diam = diameter(g, k);
        let spread = chain
            .boundary_samples(g, 4)
            .iter()
            .map(|v| v.dist(w))
            .fold(0.0, f64::max);
        if spread < 1e-4 * diam.max(f64::MIN_POSITIVE) {
            return ArcChain::Point(w);
        }
    }
    chain
}

/// One boundary arc of a ball hull between consecutive vertices.
#[derive(Debug, Clone)]
pub struct HullEdge {
    pub from: usize,
    pub to: usize,
    pub arc: Arc,
    pub center: Vec2,
}

#[derive(Debug, Clone)]
pub struct HullResult {
    pub chain: ArcChain,
    /// Counterclockwise.
    pub vertices: Vec<Vec2>,
    pub vertex_indices: Vec<usize>,
    pub edges: Vec<HullEdge>,
    pub lambda: f64,
    /// λ was clamped at [`LAMBDA_CAP`]·diam; the result is close to conv(K).
    pub near_convex_hull: bool,
}

/// `bh(K, λ)`: intersection of all radius-λ discs containing K.
///
/// A disc of radius λ containing K is rolled around K: its center turns
/// clockwise about the current contact point until a second point of K
/// reaches the boundary, which becomes the next contact.
pub fn ball_hull(g: &Gauge, k: &PointSet, lambda: f64) -> Result<HullResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(GeomError::InvalidRadius(lambda));
    }
    let pts = k.points();
    if pts.len() == 1 {
        return Ok(HullResult {
            chain: ArcChain::Point(pts[0]),
            vertices: vec![pts[0]],
            vertex_indices: vec![0],
            edges: Vec::new(),
            lambda,
            near_convex_hull: false,
        });
    }
    let (lambda_k, c) = circumradius(g, k);
    let diam = diameter(g, k);
    if lambda < lambda_k - 1e-7 * diam.max(1.0) {
        return Err(GeomError::RadiusTooSmall { lambda, lambda_k });
    }
    let near_convex_hull = lambda > LAMBDA_CAP * diam;
    let lambda = lambda.min(LAMBDA_CAP * diam).max(lambda_k);
    let fits = |z: Vec2| pts.iter().all(|&p| g.dist(z, p) <= lambda * (1.0 + 1e-9) + 1e-12 * diam);

    // start: the point farthest from a smallest-disc center, with the disc
    // through it whose center lies on the ray back through c
    let (i0, d0) = pts
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, g.dist(p, c)))
        .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    let p0 = pts[i0];
    let mut z = if d0 > 0.0 {
        c - (p0 - c) * ((lambda - d0) / d0)
    } else {
        p0 + Vec2::new(lambda, 0.0)
    };

    let mut cw_order: Vec<usize> = vec![i0];
    let mut centers: Vec<Vec2> = Vec::new();
    let mut cur = i0;
    for _ in 0..=pts.len() + 1 {
        let p = pts[cur];
        let tau0 = g.param_of(z - p);
        let mut cands: Vec<(f64, f64, usize, Vec2)> = Vec::new();
        for (j, &q) in pts.iter().enumerate() {
            if j == cur {
                continue;
            }
            for w in centers_through(g, p, q, lambda)? {
                let s = (tau0 - g.param_of(w - p)).rem_euclid(1.0);
                if s > 1e-11 && s < 1.0 - 1e-11 {
                    cands.push((s, q.dist(p), j, w));
                }
            }
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        // co-circular contacts: among candidates within rounding of the first, take the farthest
        let next = {
            let mut chosen = None;
            let mut i = 0;
            while i < cands.len() {
                let s0 = cands[i].0;
                let mut group: Vec<&(f64, f64, usize, Vec2)> =
                    cands[i..].iter().take_while(|x| x.0 - s0 <= 1e-9).collect();
                group.sort_by(|a, b| b.1.total_cmp(&a.1));
                if let Some(hit) = group.iter().find(|x| fits(x.3)) {
                    chosen = Some((hit.2, hit.3));
                    break;
                }
                i += group.len();
            }
            chosen.ok_or_else(|| GeomError::Internal("ball hull wrap found no supporting disc".into()))?
        };
        centers.push(next.1);
        z = next.1;
        cur = next.0;
        if let Some(pos) = cw_order.iter().position(|&v| v == cur) {
            // closed the loop; drop any tail before the repeated vertex
            cw_order.drain(..pos);
            centers.drain(..pos);
            break;
        }
        cw_order.push(cur);
    }
    if centers.len() != cw_order.len() {
        return Err(GeomError::Internal("ball hull wrap did not close".into()));
    }

    // cw edge cw_order[i] -> cw_order[i+1] has center centers[i]; walk it backwards
    let h = cw_order.len();
    let mut vertex_indices: Vec<usize> = cw_order.iter().rev().cloned().collect();
    let first = vertex_indices.iter().position(|&v| v == i0).unwrap_or(0);
    vertex_indices.rotate_left(first);
    let mut edges = Vec::with_capacity(h);
    for idx in 0..h {
        let from = vertex_indices[idx];
        let to = vertex_indices[(idx + 1) % h];
        let cw_pos = cw_order.iter().position(|&v| v == to).unwrap();
        debug_assert_eq!(cw_order[(cw_pos + 1) % h], from);
        let center = centers[cw_pos];
        let circle = Circle::new(center, lambda)?;
        let arc = Arc::ccw(g, circle, pts[from], pts[to], None);
        edges.push(HullEdge { from, to, arc, center });
    }
    let chain = ArcChain::Region(edges.iter().map(|e| e.arc.clone()).collect());
    Ok(HullResult {
        chain,
        vertices: vertex_indices.iter().map(|&i| pts[i]).collect(),
        vertex_indices,
        edges,
        lambda,
        near_convex_hull,
    })
}

/// Violations of the hull/intersection duality, empty when it holds.
#[derive(Debug, Clone, Default)]
pub struct DualityReport {
    pub violations: Vec<String>,
    /// Largest distance from a bi vertex to the nearest hull-edge center.
    pub max_center_distance: f64,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn duality_check(g: &Gauge, k: &PointSet, lambda: f64) -> Result<DualityReport> {
    let bh = ball_hull(g, k, lambda)?;
    let bi = ball_intersection(g, k, bh.lambda)?;
    let mut report = DualityReport::default();
    let diam = diameter(g, k);
    for label in bi.arc_labels() {
        if !bh.vertex_indices.contains(&label) {
            report.violations.push(format!(
                "bi arc generated by point {label} {:?} which is not a hull vertex",
                k.points()[label]
            ));
        }
    }
    let h = bh.vertices.len();
    let mut edge_centers = Vec::new();
    for i in 0..h {
        let (p, q) = (bh.vertices[i], bh.vertices[(i + 1) % h]);
        if p != q {
            edge_centers.extend(centers_through(g, p, q, bh.lambda)?);
        }
    }
    let tol = 1e-6 * diam.max(1e-12);
    let bi_vertices = bi.chain.vertices();
    for &v in &bi_vertices {
        let d = edge_centers.iter().map(|c| c.dist(v)).fold(f64::INFINITY, f64::min);
        report.max_center_distance = report.max_center_distance.max(d);
        if d > tol {
            report
                .violations
                .push(format!("bi vertex {v:?} is {d:.3e} from every hull edge center"));
        }
    }
    // the converse direction; a point-like bi (λ = λ_K) has no arcs to match
    if let ArcChain::Region(_) = bi.chain {
        let labels = bi.arc_labels();
        for &i in &bh.vertex_indices {
            if !labels.contains(&i) {
                report
                    .violations
                    .push(format!("hull vertex {i} {:?} generates no bi arc", k.points()[i]));
            }
        }
        for c in &edge_centers {
            // an edge has two candidate centers; only the one covering K bounds the hull
            if k.points().iter().any(|&p| g.dist(p, *c) > bh.lambda * (1.0 + 1e-7)) {
                continue;
            }
            let d = bi_vertices.iter().map(|v| c.dist(*v)).fold(f64::INFINITY, f64::min);
            report.max_center_distance = report.max_center_distance.max(d);
            if d > tol {
                report
                    .violations
                    .push(format!("hull edge center {c:?} is {d:.3e} from every bi vertex"));
            }
        }
    }
    Ok(report)
}
