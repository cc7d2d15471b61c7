use std::fs;
use std::path::Path;

use farey_cli::{run_with_cache_env, DistReport, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE};
use farey_core::cone::CoverReport;
use farey_core::{BallReport, EigenDirectionReport, OrbitReport, SafeConeCertificate};
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn farey(args: &[&str]) -> Output {
    farey_with_cache(args, None)
}

fn farey_with_cache(args: &[&str], cache: Option<&Path>) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("farey").chain(args.iter().copied());
    let code = run_with_cache_env(argv, cache.map(Path::to_path_buf), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let o = farey(args);
    assert_eq!(o.code, EXIT_OK, "{args:?}: {}", o.stderr);
    o.stdout
}

#[test]
fn dist_reports_distance_and_witness() {
    let r: DistReport =
        serde_json::from_str(&ok(&["dist", "--from", "1/0", "--to", "2/5"])).unwrap();
    assert_eq!(r.distance, 3);
    assert_eq!(r.witness.unwrap().len(), 4);
    let r: DistReport =
        serde_json::from_str(&ok(&["dist", "--from", "-3/7", "--to", "inf"])).unwrap();
    assert_eq!(r.distance, 3);
    let r: DistReport =
        serde_json::from_str(&ok(&["dist", "--from", "4/6", "--to", "2/3"])).unwrap();
    assert_eq!(r.distance, 0);
}

#[test]
fn ball_radius_zero_is_the_center() {
    let b: BallReport = serde_json::from_str(&ok(&[
        "ball", "--center", "1/0", "-n", "0", "--window", "5",
    ]))
    .unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b.members[0].distance, 0);
}

#[test]
fn rectangular_windows() {
    let b: BallReport = serde_json::from_str(&ok(&["ball", "-n", "1", "--window", "3,7"])).unwrap();
    assert_eq!((b.window.max_a(), b.window.max_b()), (3, 7));
    // 1/0 and k/1 for |k| <= 7.
    assert_eq!(b.len(), 16);
}

#[test]
fn safe_cone_has_certificate() {
    let v: Value = serde_json::from_str(&ok(&["safe-cone", "-n", "2", "--window", "100"])).unwrap();
    assert_eq!(v["certificate"], Value::Bool(true));
    let c: SafeConeCertificate = serde_json::from_value(v).unwrap();
    assert!(c.cone.lo() > farey_core::Rational::zero());
}

#[test]
fn cover_orbit_and_eigen_parse_back() {
    let c: CoverReport =
        serde_json::from_str(&ok(&["cover", "-n", "2", "--window", "20"])).unwrap();
    assert!(c.certificates.disjoint && c.certificates.covering);
    let o: OrbitReport = serde_json::from_str(&ok(&[
        "orbit", "--matrix", "2,1,1,1", "--start", "0/1", "--steps", "2",
    ]))
    .unwrap();
    assert_eq!(o.distances(), vec![1, 2]);
    let e: EigenDirectionReport =
        serde_json::from_str(&ok(&["eigen", "--matrix", "2,1,1,1", "-k", "4"])).unwrap();
    assert_eq!(e.cf_prefix, vec![0, 1, 1, 1]);
    let e: EigenDirectionReport =
        serde_json::from_str(&ok(&["eigen", "--matrix", "-3,-2,-1,-1", "-k", "3"])).unwrap();
    assert!(e.block_verified);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["cover", "-n", "3", "--window", "25"][..],
        &["ball", "--center", "2/3", "-n", "2", "--window", "12"],
        &["eigen", "--matrix", "5,2,2,1", "-k", "12"],
    ] {
        assert_eq!(ok(args), ok(args));
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let o = farey(&["dist", "--from", "1/0", "--to", "2/5", "--out", p]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.is_empty());
    let r: DistReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.distance, 3);
}

#[test]
fn argument_errors_exit_2_with_json() {
    for args in [
        &["dist", "--from", "0/0", "--to", "1/2"][..],
        &["dist", "--from", "1.5", "--to", "1/2"],
        &["ball", "-n", "1", "--window", "0"],
        &["ball", "-n", "-1", "--window", "4"],
        &["ball", "-n", "1", "--window", "2.5"],
        &[
            "orbit", "--matrix", "2,1,1,2", "--start", "0/1", "--steps", "3",
        ],
        &[
            "orbit", "--matrix", "1,1,0,1", "--start", "0/1", "--steps", "3",
        ],
        &[
            "orbit", "--matrix", "2,1,1,1", "--start", "0/1", "--steps", "0",
        ],
        &["eigen", "--matrix", "0,1,1,0", "-k", "3"],
        &["safe-cone", "-n", "0", "--window", "10"],
        &["render", "-n", "1", "--window", "5", "--svg", "x.svg"],
        &["frobnicate"],
    ] {
        let o = farey(args);
        assert_eq!(o.code, EXIT_USAGE, "{args:?}");
        let v: Value = serde_json::from_str(o.stderr.trim()).unwrap();
        assert!(
            v["error"].is_string() && v["message"].is_string(),
            "{args:?}"
        );
    }
}

#[test]
fn computation_errors_exit_3() {
    let o = farey(&[
        "dist",
        "--from",
        "1/0",
        "--to",
        "9223372036854775807/9223372036854775806",
    ]);
    // Adjacent pair: no overflow, answered directly.
    assert_eq!(o.code, EXIT_OK);
    let o = farey(&[
        "orbit", "--matrix", "2,1,1,1", "--start", "0/1", "--steps", "200",
    ]);
    assert_eq!(o.code, EXIT_COMPUTE);
    let v: Value = serde_json::from_str(o.stderr.trim()).unwrap();
    assert_eq!(v["error"], "Overflow");
}

#[test]
fn help_exits_zero() {
    let o = farey(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("safe-cone"));
}

#[test]
fn cache_serves_repeat_queries() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.txt");
    let p = path.to_str().unwrap();
    let first = ok(&["dist", "--from", "1/0", "--to", "2/5", "--cache", p]);
    assert!(first.contains("witness"));
    assert_eq!(fs::read_to_string(&path).unwrap(), "1/0 2/5 3 5 2\n");
    let second = ok(&["dist", "--from", "2/5", "--to", "1/0", "--cache", p]);
    let r: DistReport = serde_json::from_str(&second).unwrap();
    assert_eq!((r.distance, r.witness), (3, None));

    // The environment variable supplies the path when no flag is given.
    let env_path = dir.path().join("env.txt");
    let o = farey_with_cache(&["dist", "--from", "0/1", "--to", "3/5"], Some(&env_path));
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(fs::read_to_string(&env_path).unwrap(), "0/1 3/5 2 5 3\n");
}

#[test]
fn cache_compaction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.txt");
    fs::write(&path, "1/0 2/5 3 5 2\n2/5 1/0 3 5 2\n").unwrap();
    let p = path.to_str().unwrap();
    ok(&[
        "dist",
        "--from",
        "0/1",
        "--to",
        "1/0",
        "--cache",
        p,
        "--compact-cache",
    ]);
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        "0/1 1/0 1 1 1\n1/0 2/5 3 5 2\n"
    );
}

#[test]
fn malformed_cache_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.txt");
    fs::write(&path, "garbage\n").unwrap();
    let o = farey(&[
        "dist",
        "--from",
        "0/1",
        "--to",
        "1/0",
        "--cache",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_COMPUTE);
    assert!(o.stderr.contains("line 1"));
}

fn count(doc: &roxmltree::Document, tag: &str, class: &str) -> usize {
    doc.descendants()
        .filter(|n| n.has_tag_name(tag) && n.attribute("class") == Some(class))
        .count()
}

#[test]
fn render_ball_and_cover() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("ball.svg");
    let s = svg.to_str().unwrap();
    ok(&["render", "--ball", "-n", "1", "--window", "10", "--svg", s]);
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(count(&doc, "circle", "member"), 22);
    assert_eq!(count(&doc, "path", "cone"), 0);
    assert_eq!(count(&doc, "line", "line"), 3);
    assert!(text.contains("Canvas mapping"));

    ok(&["render", "--cover", "-n", "1", "--window", "10", "--svg", s]);
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(count(&doc, "path", "cone"), 0);
    assert_eq!(count(&doc, "line", "safe"), 2);

    let out = ok(&[
        "render", "--cover", "-n", "2", "--window", "15", "--svg", s, "--scale", "4",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(
        count(&doc, "path", "cone") as u64,
        v["cones"].as_u64().unwrap()
    );
    assert_eq!(
        count(&doc, "circle", "member") as u64,
        v["members"].as_u64().unwrap()
    );
    assert!(v["cones"].as_u64().unwrap() > 0);

    ok(&["render", "--ball", "-n", "0", "--window", "5", "--svg", s]);
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(count(&doc, "circle", "member"), 1);
}
