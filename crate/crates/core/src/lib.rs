//! Ball hulls, ball intersections and the 2-center decision problem in
//! strictly convex normed planes.

pub mod arcgeom;
pub mod ballops;
pub mod cli;
pub mod error;
pub mod norm;
pub mod oracle;
pub mod svg;
pub mod sweep;
mod roots;
mod vec2;

pub use arcgeom::{Arc, ArcChain, Circle, DiscSide, Side};
pub use error::{GeomError, Result};
pub use norm::{Gauge, NormSpec, Vec2};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
