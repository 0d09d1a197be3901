#![allow(dead_code)]

use normplane::ballops::PointSet;
use normplane::oracle::two_center_threshold;
use normplane::{Gauge, Vec2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn families() -> Vec<(&'static str, Gauge)> {
    vec![
        ("lp1.5", Gauge::lp(1.5).unwrap()),
        ("lp2", Gauge::euclidean()),
        ("lp3", Gauge::lp(3.0).unwrap()),
        ("lp4", Gauge::lp(4.0).unwrap()),
        (
            "linear-image",
            Gauge::linear_image([[1.3, 0.4], [-0.2, 0.8]], &Gauge::lp(3.0).unwrap()).unwrap(),
        ),
    ]
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> PointSet {
    let v: Vec<Vec2> = (0..n)
        .map(|_| Vec2::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect();
    PointSet::new(&v).unwrap()
}

/// Radii `(r1, r2)` a relative distance of 0.2% to 5% on either side of the
/// feasibility threshold for a random ratio `r1 / r2`.
pub fn radii_near_threshold(rng: &mut ChaCha8Rng, g: &Gauge, k: &PointSet) -> (f64, f64, bool) {
    let rho = rng.gen_range(1.2..3.0);
    let s = two_center_threshold(g, k, rho).unwrap();
    let delta = rng.gen_range(0.002..0.05);
    let yes = rng.gen_bool(0.5);
    let r2 = if yes { s * (1.0 + delta) } else { s * (1.0 - delta) };
    (rho * r2, r2, yes)
}
