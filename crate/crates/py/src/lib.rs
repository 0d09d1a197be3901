//! Python bindings: gauges, ball hull / intersection, Chebyshev set and the
//! two-center decision. Points cross the boundary as `(x, y)` tuples.

use normplane::ballops::{self, PointSet};
use normplane::sweep::{self, DecideOptions, Verdict};
use normplane::{ArcChain, Gauge, GeomError, NormSpec, Vec2};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Pt = (f64, f64);

fn err(e: GeomError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn v(p: Pt) -> Vec2 {
    Vec2::new(p.0, p.1)
}

fn pt(v: Vec2) -> Pt {
    (v.x, v.y)
}

fn point_set(points: Vec<Pt>) -> PyResult<PointSet> {
    let pts: Vec<Vec2> = points.into_iter().map(v).collect();
    PointSet::new(&pts).map_err(err)
}

/// A strictly convex norm on the plane.
#[pyclass(name = "Gauge", module = "normplane_py", frozen)]
struct PyGauge {
    inner: Gauge,
}

#[pymethods]
impl PyGauge {
    #[staticmethod]
    fn lp(p: f64) -> PyResult<Self> {
        Ok(PyGauge { inner: Gauge::lp(p).map_err(err)? })
    }

    #[staticmethod]
    fn euclidean() -> Self {
        PyGauge { inner: Gauge::euclidean() }
    }

    /// Norm `x ↦ ‖A⁻¹x‖_base`, whose unit ball is `A` applied to the base ball.
    #[staticmethod]
    fn linear_image(matrix: [[f64; 2]; 2], base: &PyGauge) -> PyResult<Self> {
        Ok(PyGauge { inner: Gauge::linear_image(matrix, &base.inner).map_err(err)? })
    }

    /// Same JSON shape as the CLI `norm` field.
    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<Self> {
        let spec: NormSpec = serde_json::from_str(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyGauge { inner: Gauge::from_spec(&spec).map_err(err)? })
    }

    fn with_tolerance(&self, tolerance: f64) -> Self {
        PyGauge { inner: self.inner.clone().with_tolerance(tolerance) }
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    fn norm(&self, p: Pt) -> f64 {
        self.inner.eval(v(p))
    }

    fn dist(&self, a: Pt, b: Pt) -> f64 {
        self.inner.dist(v(a), v(b))
    }

    /// Unit-sphere point at parameter `t` (one turn per unit).
    fn unit_boundary(&self, t: f64) -> Pt {
        pt(self.inner.unit_boundary(t))
    }

    fn radial_bounds(&self) -> Pt {
        self.inner.radial_bounds()
    }

    #[pyo3(signature = (samples = 4096))]
    fn is_strictly_convex(&self, samples: usize) -> bool {
        self.inner.validate_strict_convexity(samples)
    }

    fn __repr__(&self) -> String {
        format!("Gauge({})", serde_json::to_string(&self.inner.to_spec()).unwrap_or_default())
    }
}

/// Boundary chain of a region bounded by circle arcs.
#[pyclass(name = "Chain", module = "normplane_py", frozen)]
struct PyChain {
    gauge: Gauge,
    inner: ArcChain,
}

#[pymethods]
impl PyChain {
    /// `"empty"`, `"point"` or `"region"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner {
            ArcChain::Empty => "empty",
            ArcChain::Point(_) => "point",
            ArcChain::Region(_) => "region",
        }
    }

    fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    #[getter]
    fn vertices(&self) -> Vec<Pt> {
        self.inner.vertices().into_iter().map(pt).collect()
    }

    /// `(center, radius, start, end, label)` per counterclockwise arc.
    #[getter]
    fn arcs(&self) -> Vec<(Pt, f64, Pt, Pt, Option<usize>)> {
        self.inner
            .arcs()
            .iter()
            .map(|a| (pt(a.circle.center), a.circle.radius, pt(a.start), pt(a.end), a.label))
            .collect()
    }

    fn contains(&self, p: Pt) -> bool {
        self.inner.contains(&self.gauge, v(p))
    }

    fn centroid(&self) -> Option<Pt> {
        self.inner.centroid().map(pt)
    }

    #[pyo3(signature = (per_arc = 32))]
    fn boundary_samples(&self, per_arc: usize) -> Vec<Pt> {
        self.inner.boundary_samples(&self.gauge, per_arc).into_iter().map(pt).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.arcs().len()
    }

    fn __repr__(&self) -> String {
        format!("Chain(kind={:?}, arcs={})", self.kind(), self.inner.arcs().len())
    }
}

#[pyclass(name = "Hull", module = "normplane_py", frozen, get_all)]
struct PyHull {
    chain: Py<PyChain>,
    vertex_indices: Vec<usize>,
    lambda_: f64,
    near_convex_hull: bool,
}

#[pyclass(name = "Decision", module = "normplane_py", frozen, get_all)]
struct PyDecision {
    yes: bool,
    center1: Option<Pt>,
    center2: Option<Pt>,
    host: Option<usize>,
    events: usize,
    segments: usize,
}

#[pymethods]
impl PyDecision {
    fn __bool__(&self) -> bool {
        self.yes
    }

    fn __repr__(&self) -> String {
        let c = |p: Option<Pt>| p.map_or("None".to_string(), |(x, y)| format!("({x}, {y})"));
        let yes = if self.yes { "True" } else { "False" };
        format!("Decision(yes={yes}, center1={}, center2={})", c(self.center1), c(self.center2))
    }
}

fn chain(py: Python<'_>, g: &Gauge, c: ArcChain) -> PyResult<Py<PyChain>> {
    Py::new(py, PyChain { gauge: g.clone(), inner: c })
}

#[pyfunction]
fn diameter(g: &PyGauge, points: Vec<Pt>) -> PyResult<f64> {
    Ok(ballops::diameter(&g.inner, &point_set(points)?))
}

/// `(λ_K, center)`: smallest radius of a disc containing the points.
#[pyfunction]
fn circumradius(g: &PyGauge, points: Vec<Pt>) -> PyResult<(f64, Pt)> {
    let (r, c) = ballops::circumradius(&g.inner, &point_set(points)?);
    Ok((r, pt(c)))
}

#[pyfunction]
fn ball_intersection(py: Python<'_>, g: &PyGauge, points: Vec<Pt>, lam: f64) -> PyResult<Py<PyChain>> {
    let bi = ballops::ball_intersection(&g.inner, &point_set(points)?, lam).map_err(err)?;
    chain(py, &g.inner, bi.chain)
}

#[pyfunction]
fn ball_hull(py: Python<'_>, g: &PyGauge, points: Vec<Pt>, lam: f64) -> PyResult<PyHull> {
    let h = ballops::ball_hull(&g.inner, &point_set(points)?, lam).map_err(err)?;
    Ok(PyHull {
        chain: chain(py, &g.inner, h.chain)?,
        vertex_indices: h.vertex_indices,
        lambda_: h.lambda,
        near_convex_hull: h.near_convex_hull,
    })
}

#[pyfunction]
fn chebyshev_set(py: Python<'_>, g: &PyGauge, points: Vec<Pt>) -> PyResult<Py<PyChain>> {
    let c = ballops::chebyshev_set(&g.inner, &point_set(points)?);
    chain(py, &g.inner, c)
}

/// Can the points be covered by two discs of radii `r1` and `r2`?
#[pyfunction]
#[pyo3(signature = (g, points, r1, r2, exhaustive = false))]
fn decide(py: Python<'_>, g: &PyGauge, points: Vec<Pt>, r1: f64, r2: f64, exhaustive: bool) -> PyResult<PyDecision> {
    let k = point_set(points)?;
    let opts = DecideOptions { exhaustive, ..Default::default() };
    let d = py.detach(|| sweep::decide_with(&g.inner, &k, r1, r2, &opts)).map_err(err)?;
    Ok(PyDecision {
        yes: d.verdict == Verdict::Yes,
        center1: d.witness.map(|w| pt(w.center1)),
        center2: d.witness.map(|w| pt(w.center2)),
        host: d.witness.and_then(|w| w.host),
        events: d.stats.events,
        segments: d.stats.segments,
    })
}

#[pymodule]
pub fn normplane_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", normplane::VERSION)?;
    m.add_class::<PyGauge>()?;
    m.add_class::<PyChain>()?;
    m.add_class::<PyHull>()?;
    m.add_class::<PyDecision>()?;
    m.add_function(wrap_pyfunction!(diameter, m)?)?;
    m.add_function(wrap_pyfunction!(circumradius, m)?)?;
    m.add_function(wrap_pyfunction!(ball_intersection, m)?)?;
    m.add_function(wrap_pyfunction!(ball_hull, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev_set, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    Ok(())
}
