//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use farey_cli::cache::{CacheEntry, DistanceCache};
use farey_cli::svg::render_ball;
use farey_cli::DistReport;
use farey_core::cone::CoverReport;
use farey_core::metric::bidirectional_bfs;
use farey_core::{
    act, ball, build_cover, distance, eigen_directions, find_safe_cone, geodesic_witness,
    oracle_distance_bfs, orbit_growth, safety_window, verify_cover, verify_safe_cone,
    windowed_distance, MappingClass, Rational, Slope, Window,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::de::DeserializeOwned;
use serde::Serialize;

type Outcome = Result<String, String>;

/// Name, check and optional time budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn centers() -> [Slope; 3] {
    [Slope::INFINITY, Slope::ZERO, Slope::integer(1)]
}

fn corpus() -> Vec<(Slope, Slope)> {
    let targets = Window::square(30).unwrap().slopes();
    centers()
        .into_iter()
        .flat_map(|c| targets.iter().map(move |&t| (c, t)))
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let pairs = corpus();
    for &(s, t) in &pairs {
        let d = distance(s, t).map_err(|e| e.to_string())?;
        let o = oracle_distance_bfs(s, t, safety_window(s, t));
        check(o == Some(d), || format!("d({s}, {t}) = {d}, oracle {o:?}"))?;
    }
    Ok(format!("{} pairs agree exactly", pairs.len()))
}

fn integer_neighbours() -> Outcome {
    for k in (-100..=100).filter(|&k| k != 0) {
        let d = distance(Slope::INFINITY, Slope::integer(k)).map_err(|e| e.to_string())?;
        check(d == 1, || format!("d(1/0, {k}/1) = {d}"))?;
    }
    let mut far = 0;
    for s in Window::square(30).unwrap().slopes() {
        if s.a().abs() >= 2 {
            let d = distance(Slope::INFINITY, s).map_err(|e| e.to_string())?;
            check(d >= 2, || format!("d(1/0, {s}) = {d}"))?;
            far += 1;
        }
    }
    Ok(format!(
        "200 integers at distance 1, {far} slopes with |a| >= 2 at distance >= 2"
    ))
}

fn random_unimodular(rng: &mut StdRng) -> MappingClass {
    loop {
        let e: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-20..=20));
        if let Ok(m) = MappingClass::new(e[0], e[1], e[2], e[3]) {
            return m;
        }
    }
}

fn isometry() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let slopes = Window::square(20).unwrap().slopes();
    let mut negative = 0;
    for _ in 0..50 {
        let m = random_unimodular(&mut rng);
        negative += usize::from(m.determinant() == -1);
        for _ in 0..50 {
            let (s, t) = (
                *slopes.choose(&mut rng).unwrap(),
                *slopes.choose(&mut rng).unwrap(),
            );
            let (ms, mt) = (act(&m, s).unwrap(), act(&m, t).unwrap());
            let (d, md) = (distance(s, t).unwrap(), distance(ms, mt).unwrap());
            check(d == md, || {
                format!("{m}: d({s}, {t}) = {d} but d({ms}, {mt}) = {md}")
            })?;
        }
    }
    Ok(format!("50 matrices ({negative} with det -1) x 50 pairs"))
}

fn cover_and_safe_cone() -> Outcome {
    let w = Window::square(200).unwrap();
    let mut parts = Vec::new();
    for n in 1..=3 {
        let r = build_cover(n, w).map_err(|e| e.to_string())?;
        check(r.certificates.disjoint && r.certificates.covering, || {
            format!("n = {n}: certificates {:?}", r.certificates)
        })?;
        let v = verify_cover(&r);
        check(v.disjoint && v.covering, || {
            format!("n = {n}: oracle re-check {v:?}")
        })?;
        let safe = find_safe_cone(n, w).map_err(|e| e.to_string())?;
        check(safe.certificate, || {
            format!("n = {n}: safe cone not certified")
        })?;
        check(verify_safe_cone(&safe.cone, n, w), || {
            format!("n = {n}: oracle finds a ball member in {}", safe.cone)
        })?;
        check(safe.cone.lo() > Rational::zero(), || {
            format!("n = {n}: cone {}", safe.cone)
        })?;
        parts.push(format!(
            "n={n}: {} cones, safe {}",
            r.cones.len(),
            safe.cone
        ));
    }
    Ok(parts.join("; "))
}

fn radius_one_structure() -> Outcome {
    let b = ball(Slope::INFINITY, 1, Window::square(100).unwrap()).map_err(|e| e.to_string())?;
    let got: BTreeSet<Slope> = b.slopes().collect();
    let mut want: BTreeSet<Slope> = (-100..=100).map(Slope::integer).collect();
    want.insert(Slope::INFINITY);
    check(got == want, || {
        format!(
            "extra {:?}, missing {:?}",
            got.difference(&want).collect::<Vec<_>>(),
            want.difference(&got).collect::<Vec<_>>()
        )
    })?;
    Ok(format!("{} members: 1/0 and k/1 for |k| <= 100", got.len()))
}

fn growth() -> Outcome {
    let m = MappingClass::new(2, 1, 1, 1).unwrap();
    let r = orbit_growth(&m, Slope::ZERO, 12).map_err(|e| e.to_string())?;
    let d = r.distances();
    // Oracle: d(s, m^n s) = d(m^-h s, m^(n-h) s), small enough for
    // breadth-first search.
    for st in &r.steps {
        let h = (st.n / 2) as i64;
        let left = act(&m.power(-h).unwrap(), Slope::ZERO).unwrap();
        let right = act(&m.power(st.n as i64 - h).unwrap(), Slope::ZERO).unwrap();
        let w = safety_window(left, right).doubled().unwrap();
        let o = bidirectional_bfs(left, right, w);
        check(o == Some(st.dist), || {
            format!("n = {}: dist {} oracle {o:?}", st.n, st.dist)
        })?;
    }
    check(d.windows(2).all(|w| w[0] <= w[1]), || {
        format!("not nondecreasing: {d:?}")
    })?;
    check(d[11] >= 4, || format!("dist(12) = {}", d[11]))?;
    check(r.growth_slope_estimate > Rational::zero(), || {
        format!("secant slope {}", r.growth_slope_estimate)
    })?;
    check(r.is_self_consistent(), || "offsets inconsistent".into())?;
    Ok(format!(
        "dist = {d:?}, secant slope {}",
        r.growth_slope_estimate
    ))
}

fn metric_axioms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let slopes = Window::square(25).unwrap().slopes();
    for _ in 0..200 {
        let [s, t, u] = std::array::from_fn(|_| *slopes.choose(&mut rng).unwrap());
        let d = |x, y| distance(x, y).unwrap();
        check(d(s, t) == d(t, s), || format!("asymmetric: {s}, {t}"))?;
        check(d(s, u) <= d(s, t) + d(t, u), || {
            format!("triangle: {s}, {t}, {u}")
        })?;
        check((d(s, t) == 0) == (s == t), || format!("identity: {s}, {t}"))?;
    }
    Ok("200 triples: symmetry, triangle inequality, identity".into())
}

fn window_stability() -> Outcome {
    let pairs = corpus();
    for &(s, t) in &pairs {
        let w = safety_window(s, t);
        let (a, b) = (
            oracle_distance_bfs(s, t, w),
            oracle_distance_bfs(s, t, w.doubled().unwrap()),
        );
        check(a.is_some() && a == b, || {
            format!("{s}, {t}: {a:?} then {b:?}")
        })?;
        let wd = windowed_distance(s, t).map_err(|e| e.to_string())?;
        check(Some(wd.distance) == a, || {
            format!("{s}, {t}: windowed {wd:?}")
        })?;
    }
    Ok(format!("{} pairs unchanged under doubling", pairs.len()))
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(
    name: &str,
    value: &T,
) -> Result<(), String> {
    let json = serde_json::to_string(value).map_err(|e| format!("{name}: {e}"))?;
    let back: T = serde_json::from_str(&json).map_err(|e| format!("{name}: {e}"))?;
    check(&back == value, || format!("{name} changed in round trip"))?;
    let again = serde_json::to_string(&back).map_err(|e| format!("{name}: {e}"))?;
    check(again == json, || format!("{name} reserializes differently"))
}

fn serialization() -> Outcome {
    let w = Window::square(100).unwrap();
    let b = ball(Slope::INFINITY, 1, w).map_err(|e| e.to_string())?;
    round_trip("BallReport", &b)?;
    let cover: CoverReport =
        build_cover(2, Window::square(30).unwrap()).map_err(|e| e.to_string())?;
    round_trip("CoverReport", &cover)?;
    round_trip(
        "SafeConeCertificate",
        &find_safe_cone(2, Window::square(30).unwrap()).unwrap(),
    )?;
    let m = MappingClass::new(2, 1, 1, 1).unwrap();
    round_trip("OrbitReport", &orbit_growth(&m, Slope::ZERO, 12).unwrap())?;
    round_trip("EigenDirectionReport", &eigen_directions(&m, 10).unwrap())?;
    let s: Slope = "2/5".parse().unwrap();
    round_trip(
        "DistReport",
        &DistReport {
            from: Slope::INFINITY,
            to: s,
            distance: 3,
            witness: Some(geodesic_witness(Slope::INFINITY, s).unwrap().vertices),
        },
    )?;
    round_trip(
        "GeodesicWitness",
        &geodesic_witness(Slope::ZERO, s).unwrap(),
    )?;

    // Cache: entries written, reloaded and compacted come back identical.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("cache.txt");
    let mut cache = DistanceCache::open(&path).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(9);
    let slopes = Window::square(40).unwrap().slopes();
    for _ in 0..300 {
        let (s, t) = (
            *slopes.choose(&mut rng).unwrap(),
            *slopes.choose(&mut rng).unwrap(),
        );
        let entry = CacheEntry {
            distance: distance(s, t).unwrap(),
            window: safety_window(s, t),
        };
        cache.insert(s, t, entry).map_err(|e| e.to_string())?;
    }
    let written: Vec<_> = cache.entries().collect();
    let reloaded = DistanceCache::open(&path).map_err(|e| e.to_string())?;
    check(reloaded.entries().collect::<Vec<_>>() == written, || {
        "cache reload differs".into()
    })?;
    reloaded.compact().map_err(|e| e.to_string())?;
    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    let compacted = DistanceCache::open(&path).map_err(|e| e.to_string())?;
    check(compacted.entries().collect::<Vec<_>>() == written, || {
        "cache compaction differs".into()
    })?;
    compacted.compact().map_err(|e| e.to_string())?;
    check(
        std::fs::read(&path).map_err(|e| e.to_string())? == bytes,
        || "compaction is not byte-stable".into(),
    )?;
    for (s, t, e) in &written {
        check(distance(*s, *t).unwrap() == e.distance, || {
            format!("stale entry {s} {t}")
        })?;
    }

    // SVG of the radius-one ball in the (100, 100) window.
    let svg = render_ball(&b, 8);
    let doc = roxmltree::Document::parse(&svg).map_err(|e| format!("SVG: {e}"))?;
    let markers = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle") && n.attribute("class") == Some("member"))
        .count();
    check(markers == b.len(), || {
        format!("{markers} markers for {} members", b.len())
    })?;
    Ok(format!(
        "7 report types, {} cache entries, SVG with {markers} markers",
        written.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "oracle equivalence",
            oracle_equivalence,
            Some(Duration::from_secs(120)),
        ),
        ("d(1/0, k/1) = 1", integer_neighbours, None),
        ("isometry invariance", isometry, None),
        (
            "cover and safe cone, window 200",
            cover_and_safe_cone,
            Some(Duration::from_secs(600)),
        ),
        ("radius-one ball", radius_one_structure, None),
        ("orbit growth", growth, None),
        ("metric axioms", metric_axioms, None),
        ("window stability", window_stability, None),
        ("serialization", serialization, None),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(msg), Some(b)) if elapsed > b => {
                Err(format!("{msg}, but took {elapsed:.1?} > {b:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg} [{elapsed:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
