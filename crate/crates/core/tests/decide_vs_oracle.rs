mod common;

use normplane::oracle::two_center_by_partition;
use normplane::sweep::{decide, verify_cover, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn decide_matches_partition_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, g) in common::families() {
        for trial in 0..40 {
            let n = rng.gen_range(4..=10);
            let k = common::random_points(&mut rng, n, 2.0);
            let (r1, r2, _) = common::radii_near_threshold(&mut rng, &g, &k);
            let want = two_center_by_partition(&g, &k, r1, r2).unwrap();
            let got = decide(&g, &k, r1, r2).unwrap();
            assert_eq!(got.verdict, want, "{name} trial {trial} n={n} r1={r1} r2={r2} {:?}", k.points());
            if let Some(w) = got.witness {
                assert!(verify_cover(&g, &k, r1, r2, w.center1, w.center2));
            }
            assert!(got.stats.events <= 2 * k.len() * (k.len() - 1));
        }
    }
}

#[test]
fn separated_pairs() {
    let e = normplane::Gauge::euclidean();
    let k = normplane::ballops::PointSet::new(&[
        normplane::Vec2::new(0.0, 0.0),
        normplane::Vec2::new(0.0, 2.0),
        normplane::Vec2::new(10.0, 0.0),
        normplane::Vec2::new(10.0, 2.0),
    ])
    .unwrap();
    assert_eq!(decide(&e, &k, 1.5, 1.0).unwrap().verdict, Verdict::Yes);
    assert_eq!(decide(&e, &k, 0.9, 0.5).unwrap().verdict, Verdict::No);
}
