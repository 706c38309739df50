//! Command line: reports, exit codes, determinism and SVG output.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use r4gauss::cli::report::{lookup, parse};
use r4gauss::cli::{run, ExitCode, Outcome};
use std::path::PathBuf;
use std::process::Command;

fn r4(args: &[&str]) -> Outcome {
    run(std::iter::once("r4gauss").chain(args.iter().copied()))
}

fn value(out: &Outcome, key: &str) -> String {
    lookup(&out.stdout, key).unwrap_or_else(|| panic!("missing `{key}` in\n{}", out.stdout))
}

fn real(out: &Outcome, key: &str) -> f64 {
    value(out, key).parse().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn invariants_at_the_example1_origin() {
    let out = r4(&["invariants", "@example1", "--at", "0,0"]);
    assert_eq!(out.code, ExitCode::Success, "{}", out.stderr);
    assert_eq!(value(&out, "mode"), "point");
    assert_abs_diff_eq!(real(&out, "K"), -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(real(&out, "KN"), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(real(&out, "H2"), 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(real(&out, "J1"), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(real(&out, "J2"), -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(real(&out, "J2.pullback"), -1.0, epsilon = 1e-9);
    // negative coordinates are accepted
    let out = r4(&["invariants", "@example1", "--at", "-0.1,-0.2", "--chart", "main"]);
    assert_eq!(out.code, ExitCode::Success, "{}", out.stderr);
}

#[test]
fn invariants_over_grids() {
    let out = r4(&["invariants", "@clifford", "--grid", "32"]);
    assert_eq!(out.code, ExitCode::Success);
    assert!(real(&out, "K.max_abs") < 1e-8 && real(&out, "KN.max_abs") < 1e-8);
    assert_eq!(value(&out, "failed_nodes"), "0");
    let out = r4(&["invariants", "@plane", "--grid", "8"]);
    for key in ["K.max_abs", "KN.max_abs", "Delta.max_abs", "H2.max_abs", "J1.max_abs", "J2.max_abs"] {
        assert_eq!(real(&out, key), 0.0, "{key}");
    }
}

#[test]
fn parameters_and_settings_appear_in_the_header() {
    let out = r4(&["invariants", "@sphere", "--at", "0,0", "--param", "r=2", "--tol", "1e-6", "--grid", "12"]);
    assert_eq!(out.code, ExitCode::Success, "{}", out.stderr);
    assert_eq!(real(&out, "param.r"), 2.0);
    assert_eq!(real(&out, "tol"), 1e-6);
    assert_eq!(value(&out, "grid"), "12");
    assert_relative_eq!(real(&out, "K"), 0.25, max_relative = 1e-12);
    let keys: Vec<String> = parse(&out.stdout).into_iter().map(|(k, _)| k).collect();
    assert_eq!(&keys[..3], ["command", "surface", "source"]);
}

#[test]
fn parse_errors_exit_with_code_2() {
    let bad = tmp("bad.toml");
    std::fs::write(&bad, "name = \"x\"\n[[charts]]\nname = \"c\"\ncoords = [\"u +\", \"v\", \"0\", \"0\"]\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["invariants", bad.to_str().unwrap()],
        vec!["invariants", "@no_such_surface"],
        vec!["invariants", "/nonexistent/surface.toml"],
        vec!["invariants", "@sphere", "--param", "r"],
        vec!["invariants", "@sphere", "--param", "nope=1"],
        vec!["invariants", "@sphere", "--tol", "-1"],
        vec!["invariants", "@sphere", "--at", "1;2"],
        vec!["invariants", "@example2", "--at", "0,0", "--chart", "zz"],
        vec!["singular", "@example1", "--component", "3"],
        vec!["frobnicate", "@sphere"],
    ];
    for args in cases {
        let out = r4(&args);
        assert_eq!(out.code, ExitCode::Parse, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty() && out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_with_code_3() {
    let out = r4(&["invariants", "@plane", "--at", "5,5"]);
    assert_eq!(out.code, ExitCode::Domain);
    assert!(out.stderr.contains("outside"), "{}", out.stderr);
    let out = r4(&["invariants", "@plane", "--at", "0,0", "--report", "/nonexistent/dir/report.txt"]);
    assert_eq!(out.code, ExitCode::Domain);
}

#[test]
fn verify_gb_exit_codes() {
    let sphere = r4(&["verify-gb", "@sphere", "--grid", "24"]);
    assert_eq!(sphere.code, ExitCode::Success, "{}", sphere.stdout);
    assert_eq!(value(&sphere, "pass"), "true");
    assert_eq!(value(&sphere, "identity.quine.1"), "pass");
    assert_eq!(value(&sphere, "compare.chi_M"), "match computed 2 expected 2");

    // too coarse a grid: the quadrature based identities fail
    let coarse = r4(&["verify-gb", "@peanut", "--grid", "12"]);
    assert_eq!(coarse.code, ExitCode::IdentityFailed);
    assert_eq!(value(&coarse, "identity.gb1.1"), "fail");
    assert_eq!(value(&coarse, "pass"), "false");

    let plane = r4(&["verify-gb", "@plane", "--grid", "16"]);
    assert_eq!(plane.code, ExitCode::NotClosedSurface);
    assert!(plane.stderr.contains("not closed"));

    let clifford = r4(&["verify-gb", "@clifford", "--grid", "24"]);
    assert_eq!(clifford.code, ExitCode::GenericityViolation);
    assert_eq!(value(&clifford, "generic"), "false");
    assert_eq!(value(&clifford, "identity.gb1.1"), "skipped");
}

#[test]
fn genericity_exit_codes() {
    let e1 = r4(&["genericity", "@example1", "--grid", "64"]);
    assert_eq!(e1.code, ExitCode::Success);
    for key in ["g1.1.pass", "g2.1.pass", "g1.2.pass", "g2.2.pass", "pass"] {
        assert_eq!(value(&e1, key), "true", "{key}");
    }
    let clifford = r4(&["genericity", "@clifford", "--grid", "24", "--component", "1"]);
    assert_eq!(clifford.code, ExitCode::GenericityViolation);
    assert_eq!(value(&clifford, "g1.1.pass"), "false");
    assert_eq!(value(&clifford, "g1.1.identically_zero"), "true");
    assert!(lookup(&clifford.stdout, "g1.2.pass").is_none());
    // the Gauss map of the flat-point family is regular at the origin; its
    // singular set fails (G₁) elsewhere
    let flat = r4(&["genericity", "@flat_family", "--grid", "64"]);
    assert_eq!(flat.code, ExitCode::GenericityViolation);
    assert_eq!(value(&flat, "rank.deficient"), "0");
    assert_eq!(value(&flat, "rank.characterization_mismatches"), "0");
}

#[test]
fn singular_report_of_example1() {
    let out = r4(&["singular", "@example1", "--grid", "64", "--component", "1"]);
    assert_eq!(out.code, ExitCode::Success);
    assert_eq!(value(&out, "curves"), "1");
    assert_eq!(value(&out, "curve.0.closed"), "true");
    let cusps: usize = value(&out, "cusps").parse().unwrap();
    let at_origin = (0..cusps)
        .filter(|i| {
            let v = value(&out, &format!("cusp.{i}"));
            let f: Vec<&str> = v.split_whitespace().collect();
            let (u, w): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
            u.hypot(w) < 1e-6
        })
        .count();
    assert_eq!(at_origin, 1);
    let fields = parse(&out.stdout);
    let points = fields.iter().filter(|(k, _)| k.starts_with("curve.0.point.")).count();
    assert_eq!(points.to_string(), value(&out, "curve.0.points"));
    assert!(fields.iter().filter(|(k, _)| k.starts_with("curve.0.point.")).all(|(_, v)| v.ends_with("fold")));
}

fn assert_valid_svg(path: &PathBuf) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    assert_eq!(root.tag_name().namespace(), Some("http://www.w3.org/2000/svg"));
    text
}

#[test]
fn svg_figures_are_valid() {
    let e1 = tmp("example1.svg");
    let out = r4(&["singular", "@example1", "--grid", "48", "--svg", e1.to_str().unwrap()]);
    assert_eq!(out.code, ExitCode::Success);
    let text = assert_valid_svg(&e1);
    let doc = roxmltree::Document::parse(&text).unwrap();
    let count = |tag: &str| doc.descendants().filter(|n| n.tag_name().name() == tag).count();
    assert!(count("polyline") >= 1 && count("circle") >= 1, "{text}");

    let plane = tmp("plane.svg");
    let out = r4(&["singular", "@plane", "--grid", "8", "--svg", plane.to_str().unwrap()]);
    assert_eq!(out.code, ExitCode::Success);
    assert_eq!(value(&out, "curves"), "0");
    let text = assert_valid_svg(&plane);
    assert!(!text.contains("<polyline") && !text.contains("<circle"));
}

#[test]
fn reports_and_figures_are_deterministic() {
    let (a, b) = (tmp("det_a.svg"), tmp("det_b.svg"));
    let run_once = |svg: &PathBuf| r4(&["singular", "@example2", "--grid", "48", "--svg", svg.to_str().unwrap()]);
    let (x, y) = (run_once(&a), run_once(&b));
    assert_eq!(x.code, y.code);
    // the reports differ only in the svg path line
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("svg = ")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&x.stdout), strip(&y.stdout));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let g1 = r4(&["verify-gb", "@peanut", "--grid", "32"]);
    let g2 = r4(&["verify-gb", "@peanut", "--grid", "32"]);
    assert_eq!(g1, g2);
}

#[test]
fn report_flag_writes_the_same_text() {
    let path = tmp("report.txt");
    let to_file = r4(&["genericity", "@sphere", "--grid", "16", "--report", path.to_str().unwrap()]);
    assert_eq!(to_file.code, ExitCode::Success);
    assert!(to_file.stdout.is_empty());
    let to_stdout = r4(&["genericity", "@sphere", "--grid", "16"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_r4gauss");
    let code = |args: &[&str]| Command::new(exe).args(args).output().unwrap().status.code();
    assert_eq!(code(&["invariants", "@example1", "--at", "0,0"]), Some(0));
    assert_eq!(code(&["verify-gb", "@peanut", "--grid", "12"]), Some(1));
    assert_eq!(code(&["invariants", "@nothing"]), Some(2));
    assert_eq!(code(&["invariants", "@plane", "--at", "9,9"]), Some(3));
    assert_eq!(code(&["verify-gb", "@plane"]), Some(4));
    assert_eq!(code(&["genericity", "@clifford", "--grid", "16"]), Some(5));
    let help = Command::new(exe).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify-gb"));
}
