//! Values cross-checked against the window-truncated breadth-first oracles.

use farey_core::metric::bidirectional_bfs;
use farey_core::*;

fn sl(s: &str) -> Slope {
    s.parse().unwrap()
}

#[test]
fn documented_distances() {
    for (s, t, d) in [
        ("1/0", "2/5", 3),
        ("1/0", "0/1", 1),
        ("1/0", "3/1", 1),
        ("0/1", "1/2", 1),
        ("0/1", "3/5", 2),
        ("1/0", "-3/7", 3),
        ("1/2", "3/7", 1),
        ("1/0", "13/8", 3),
    ] {
        let (s, t) = (sl(s), sl(t));
        assert_eq!(distance(s, t).unwrap(), d, "{s} {t}");
        assert_eq!(oracle_distance_bfs(s, t, safety_window(s, t)), Some(d));
    }
}

#[test]
fn ball_sizes_match_single_source_oracle() {
    for (n, bound) in [(0u32, 5i64), (1, 10), (2, 30), (3, 30)] {
        let w = Window::square(bound).unwrap();
        let b = ball(Slope::INFINITY, n, w).unwrap();
        let oracle = oracle_distances(Slope::INFINITY, w);
        let expected = oracle.values().filter(|&&d| d <= n).count();
        assert_eq!(b.len(), expected, "n = {n}");
        for m in &b.members {
            assert_eq!(oracle[&m.slope], m.distance);
        }
    }
    assert_eq!(
        ball(Slope::INFINITY, 1, Window::square(10).unwrap())
            .unwrap()
            .len(),
        22
    );
}

#[test]
fn golden_orbit_distances() {
    // d(s, m^n s) = d(m^-h s, m^(n-h) s) with h = n/2 keeps the oracle's
    // coordinates near the square root of the orbit's.
    let m = MappingClass::new(2, 1, 1, 1).unwrap();
    let start = Slope::ZERO;
    let report = orbit_growth(&m, start, 12).unwrap();
    assert_eq!(report.steps[0].image, sl("1/2"));
    assert_eq!(report.steps[1].image, sl("3/5"));
    for st in &report.steps {
        let h = (st.n / 2) as i64;
        let left = act(&m.power(-h).unwrap(), start).unwrap();
        let right = act(&m.power(st.n as i64 - h).unwrap(), start).unwrap();
        let w = safety_window(left, right).doubled().unwrap();
        assert_eq!(
            bidirectional_bfs(left, right, w),
            Some(st.dist),
            "n = {}",
            st.n
        );
    }
    let d = report.distances();
    assert_eq!(&d[..2], &[1, 2]);
    assert!(d.windows(2).all(|w| w[0] <= w[1]));
    assert!(d[11] >= 4);
    assert!(report.growth_slope_estimate > Rational::zero());
}

#[test]
fn eigen_examples() {
    let golden = eigen_directions(&MappingClass::new(2, 1, 1, 1).unwrap(), 8).unwrap();
    assert_eq!(golden.cf_prefix, vec![0, 1, 1, 1, 1, 1, 1, 1]);
    assert_eq!(golden.periodic, vec![1]);
    let x = golden.attracting_direction;
    assert_eq!(
        (x.p, x.q, x.d),
        (Rational::new(-1, 2), Rational::new(1, 2), 5)
    );

    let r = eigen_directions(&MappingClass::new(3, 2, 1, 1).unwrap(), 10).unwrap();
    assert_eq!(r.discriminant, 12);
    assert!(r.irrational && r.block_verified && r.attraction_verified);
    // (3,2;1,1) fixes directions solving 2z^2 + 2z - 1 = 0: z = (-1 +- sqrt 3)/2.
    assert_eq!(r.attracting_direction.d, 3);
    assert_eq!(r.attracting_direction.p, Rational::new(-1, 2));
}

#[test]
fn classification_examples() {
    let c = |p, q, r, s| classify(&MappingClass::new(p, q, r, s).unwrap()).unwrap();
    assert_eq!(c(2, 1, 1, 1), Classification::Anosov);
    assert_eq!(c(1, 1, 0, 1), Classification::Reducible);
    assert_eq!(c(0, -1, 1, 0), Classification::Periodic);
    assert!(classify(&MappingClass::new(1, 0, 0, -1).unwrap()).is_err());
}
