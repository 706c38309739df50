//! Acceptance suite: one PASS/FAIL line per criterion, followed by indented
//! diagnostics. The process exits with status 0 unless
//! `R4GAUSS_ACCEPTANCE_STRICT=1` is set, in which case any FAIL line makes
//! it exit with status 1.

mod common;

use common::{
    atlas, double_torus_sigma, double_torus_sigma_distance, example1_poly, jacobian_points, jet_fd_error, line_angle,
    monge_curvatures, peanut_kg_oracle, random_monge, rng, sample_points, smooth_expr,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use r4gauss::atlas::{to_monge, Atlas, Chart};
use r4gauss::frames::{connection_forms, darboux_frame, rotate_frame};
use r4gauss::gaussmap::{dgauss_components, gauss_components, plucker, rank_dg, svd2, Component, SPHERE_RADIUS};
use r4gauss::integrate::{integrate_surface, mapping_degree, Field};
use r4gauss::invariants::{invariants_at, jacobian_by_pullback};
use r4gauss::singular::{analyze_point, analyze_singular_set, project_to_curve, rank_scan, SingularAnalysis};
use r4gauss::topology::gb::gauss_bonnet_report;
use r4gauss::topology::{build_mesh, sample_nodes, Mesh, NodeSample};
use rand::Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const BOTH: [Component; 2] = [Component::One, Component::Two];

/// Verdict of one criterion.
struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(summary: &str) -> Verdict {
        Verdict { pass: true, summary: summary.to_string(), details: Vec::new() }
    }

    /// Records a sub-check; the criterion fails if any sub-check fails.
    fn check(&mut self, ok: bool, text: impl Into<String>) {
        self.pass &= ok;
        self.details.push(format!("[{}] {}", if ok { "ok" } else { "FAIL" }, text.into()));
    }

    /// Records a diagnostic that does not affect the verdict.
    fn note(&mut self, text: impl Into<String>) {
        self.details.push(format!("[info] {}", text.into()));
    }
}

fn analyse(a: &Atlas, mesh: &Mesh, samples: &[NodeSample], c: Component) -> SingularAnalysis {
    analyze_singular_set(a, mesh, samples, c)
}

fn vector_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let c = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    c.atan2(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
}

fn c1_jacobian() -> Verdict {
    let mut v = Verdict::new("Jacobian identity J(gᵢ) = ½(K ± K^N) by pullback on 10⁴ points");
    let start = Instant::now();
    let points = jacobian_points(10_000, 101);
    let mut worst = 0.0_f64;
    let mut failures = 0;
    for (c, u, w) in &points {
        let inv = invariants_at(c, *u, *w).unwrap();
        let scale = 1.0 + inv.k.abs() + inv.kn.abs();
        for comp in BOTH {
            let j = jacobian_by_pullback(c, *u, *w, comp).unwrap();
            let err = (j - inv.jacobian(comp)).abs() / scale;
            worst = worst.max(err);
            if err >= 1e-6 {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    v.check(points.len() == 10_000 && failures == 0, format!("{} points, worst scaled error {worst:.2e} (< 1e-6)", points.len()));
    v.check(elapsed < Duration::from_secs(30), format!("runtime {:.2} s (< 30 s)", elapsed.as_secs_f64()));
    v
}

/// Points of the singular sets near random points of several surfaces, with
/// the surface name and the component that is singular there.
fn singular_points(n: usize, seed: u64) -> Vec<(&'static str, Chart, [f64; 2], Component)> {
    const PER_CHART: usize = 200;
    const SURFACES: [&str; 4] = ["example1", "flat_family", "clifford", "example2"];
    let mut out = Vec::new();
    for (i, (c, u, w)) in sample_points(PER_CHART, seed).into_iter().enumerate() {
        let surface = if i < 4 * PER_CHART { SURFACES[i % 4] } else { "monge" };
        if surface == "clifford" {
            continue;
        }
        let comp = BOTH[(i / 4) % 2];
        if let Ok(p) = project_to_curve(&c, [u, w], comp) {
            // the projection takes a few Newton steps only, so far starts are dropped
            let on_sigma = analyze_point(&c, p, comp, None).is_ok_and(|d| d.residual < 1e-10);
            if c.contains(p[0], p[1]) && on_sigma {
                out.push((surface, c, p, comp));
            }
        }
    }
    // spread the selection over the surfaces
    let mut picked = Vec::new();
    let mut k = 0;
    while picked.len() < n && !out.is_empty() {
        let want = ["example1", "flat_family", "example2", "monge"][k % 4];
        k += 1;
        if let Some(j) = out.iter().position(|p| p.0 == want) {
            picked.push(out.remove(j));
        } else if k > 4 * n {
            picked.push(out.remove(0));
        }
    }
    picked
}

fn c2_rotation() -> Verdict {
    let mut v = Verdict::new("frame-rotation invariance of g₁, g₂ and the Pfaffian kernels (100 rotations × 100 points)");
    let pts = singular_points(100, 102);
    let mut r = rng(103);
    let rotations: Vec<(f64, f64)> = (0..100).map(|_| (r.gen_range(-PI..PI), r.gen_range(-PI..PI))).collect();
    let (mut worst_g, mut worst_k, mut worst_ratio, mut rank_changes, mut kernels) = (0.0_f64, 0.0_f64, 0.0_f64, 0, 0);
    for (_, c, p, comp) in &pts {
        let f = darboux_frame(c, p[0], p[1], 3).unwrap();
        let cf = connection_forms(&f).unwrap();
        let g = gauss_components(&f);
        let d = dgauss_components(&cf);
        let m = if *comp == Component::One { d.0 } else { d.1 };
        // projected points are singular to about 1e-8, so the kernel is the
        // right singular vector of the smaller singular value
        let (smax, smin, k) = svd2(&m);
        worst_ratio = worst_ratio.max(smin / smax);
        for &(al, be) in &rotations {
            let fr = rotate_frame(&f, al, be);
            let cr = connection_forms(&fr).unwrap();
            let gr = gauss_components(&fr);
            worst_g = worst_g.max(vector_angle(&g.beta, &gr.beta)).max(vector_angle(&g.gamma, &gr.gamma));
            if rank_dg(&cr) != rank_dg(&cf) {
                rank_changes += 1;
            }
            let dr = dgauss_components(&cr);
            let mr = if *comp == Component::One { dr.0 } else { dr.1 };
            worst_k = worst_k.max(line_angle(&k, &svd2(&mr).2));
            kernels += 1;
        }
    }
    let mut by_chart = std::collections::BTreeMap::<&str, usize>::new();
    for (name, _, _, _) in &pts {
        *by_chart.entry(name).or_default() += 1;
    }
    v.check(pts.len() == 100, format!("{} singular points by surface: {by_chart:?}", pts.len()));
    v.check(worst_g < 1e-8, format!("largest angular change of g₁, g₂: {worst_g:.2e} rad (< 1e-8)"));
    v.check(worst_ratio < 1e-6, format!("σ_min/σ_max of the singular component at most {worst_ratio:.1e}"));
    v.check(kernels == pts.len() * rotations.len() && worst_k < 1e-8, format!("{kernels} kernel comparisons, largest angle {worst_k:.2e} rad (< 1e-8)"));
    v.check(rank_changes == 0, format!("rank of dgᵢ changed in {rank_changes} cases"));
    v
}

fn c3_example1() -> Verdict {
    let mut v = Verdict::new("Example 1 reproduction as stated (K(0,0) = 1, Σ of g₂, cusp of g₂, g₁ regular)");
    let e1 = atlas("example1");
    let ch = &e1.charts[0];
    let inv = invariants_at(ch, 0.0, 0.0).unwrap();
    v.check((inv.k - 1.0).abs() < 1e-9, format!("K(0,0) = {} (stated 1)", inv.k));
    v.check((inv.kn - 1.0).abs() < 1e-9, format!("K^N(0,0) = {} (stated 1)", inv.kn));
    let mesh = build_mesh(&e1, 256).unwrap();
    let samples = sample_nodes(&e1, &mesh);
    let both = [analyse(&e1, &mesh, &samples, Component::One), analyse(&e1, &mesh, &samples, Component::Two)];

    // residual of the reference polynomial at 200 evenly spread traced points
    let poly_residual = |a: &SingularAnalysis| -> (usize, f64) {
        let pts: Vec<[f64; 2]> = a.analysed_points().map(|(p, _)| p.uv).collect();
        if pts.is_empty() {
            return (0, f64::INFINITY);
        }
        let sel: Vec<[f64; 2]> = (0..200).map(|i| pts[i * pts.len() / 200]).collect();
        (sel.len(), sel.iter().map(|p| example1_poly(p[0], p[1]).abs()).fold(0.0, f64::max))
    };
    let cusps_in_disk = |a: &SingularAnalysis| -> Vec<f64> {
        let mut d: Vec<f64> = a.cusps.iter().map(|r| r.uv[0].hypot(r.uv[1])).filter(|&d| d < 0.5).collect();
        d.sort_by(f64::total_cmp);
        d
    };
    let origin_cusp_ok = |a: &SingularAnalysis| -> bool {
        a.cusps.iter().any(|r| {
            r.uv[0].hypot(r.uv[1]) < 1e-6
                && line_angle(&r.kernel, &[1.0, 0.0]) < 1e-6
                && line_angle(&r.tangent, &[1.0, 0.0]) < 1e-6
        })
    };
    let regular_at_origin = |c: Component| analyze_point(ch, [0.0, 0.0], c, None).map_or(true, |d| d.residual > 1e-6);

    let (n, res) = poly_residual(&both[1]);
    v.check(res < 1e-6, format!("Σ of g₂ against the degree-7 polynomial: max residual {res:.2e} at {n} points"));
    let disk = cusps_in_disk(&both[1]);
    v.check(disk.len() == 1 && origin_cusp_ok(&both[1]), format!("cusps of g₂ within radius 0.5: {}", disk.len()));
    v.check(regular_at_origin(Component::One), "g₁ regular at the origin");

    // the same statements with the roles of g₁ and g₂ exchanged, which is
    // what K(0,0) = -1 implies
    v.note(format!("computed K(0,0) = {}, so J(g₁)(0) = ½(K + K^N) = {} and J(g₂)(0) = {}", inv.k, inv.jacobian(Component::One), inv.jacobian(Component::Two)));
    let (n, res) = poly_residual(&both[0]);
    v.note(format!("relabelled: Σ of g₁ against the polynomial: max residual {res:.2e} at {n} points (< 1e-6: {})", res < 1e-6));
    let disk = cusps_in_disk(&both[0]);
    v.note(format!(
        "relabelled: cusps of g₁ within radius 0.5 at distances {:?}; cusp at the origin with kernel and tangent (1,0): {}",
        disk.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>(),
        origin_cusp_ok(&both[0])
    ));
    v.note(format!("relabelled: g₂ regular at the origin: {}", regular_at_origin(Component::Two)));
    v
}

fn c4_clifford() -> Verdict {
    let mut v = Verdict::new("Clifford torus: K = K^N = 0, (G₁) fails, χ = 0");
    let cl = atlas("clifford");
    let mesh = build_mesh(&cl, 256).unwrap();
    let samples = sample_nodes(&cl, &mesh);
    let kmax = samples.iter().map(|s| s.k.abs()).fold(0.0, f64::max);
    let knmax = samples.iter().map(|s| s.kn.abs()).fold(0.0, f64::max);
    v.check(kmax < 1e-8 && knmax < 1e-8, format!("{} nodes: max|K| = {kmax:.2e}, max|K^N| = {knmax:.2e} (< 1e-8)", samples.len()));
    for c in BOTH {
        let a = analyse(&cl, &mesh, &samples, c);
        v.check(!a.g1.pass && a.g1.gradient_vanishes, format!("(G₁) for g{}: pass = {}, gradient vanishes = {}", c.index(), a.g1.pass, a.g1.gradient_vanishes));
    }
    v.check(mesh.euler_characteristic() == 0, format!("χ(mesh) = {}", mesh.euler_characteristic()));
    v
}

fn c5_sphere() -> Verdict {
    let mut v = Verdict::new("round sphere: ∫K = 4π, ∫K^N = 0, degrees 1, (KdA) identity");
    let s = atlas("sphere");
    let grid = 64;
    let four_pi = 4.0 * PI;
    let k = integrate_surface(&s, Field::K, grid).unwrap();
    v.check((k.value - four_pi).abs() < 0.01 * four_pi, format!("∫K dA = {:.6} (4π ± 1%)", k.value));
    let kn = integrate_surface(&s, Field::KN, grid).unwrap();
    v.check(kn.value.abs() < 1e-3 * four_pi, format!("∫K^N dA = {:.2e}", kn.value));
    for c in BOTH {
        let d = mapping_degree(&s, c, grid).unwrap();
        v.check(d.rounded == 1 && (d.value.value - 1.0).abs() < 0.05, format!("deg(g{}) = {:.6} → {}", c.index(), d.value.value, d.rounded));
    }
    let r = gauss_bonnet_report(&s, grid, 1e-8).unwrap();
    let empty = r.components.iter().all(|t| t.curves == 0 && t.s_plus + t.s_minus == 0);
    v.check(empty, "singular sets empty");
    let kda = r.identity("kda").unwrap();
    v.check(kda.asserted && kda.holds(), format!("(KdA): ∫K/π = {:.6} vs Σ(χ⁺ − χ⁻ + S⁺ − S⁻) = {}", kda.lhs, kda.rhs));
    v.check(
        (kda.lhs - kda.rhs).abs() * PI <= 2.0 * k.estimated_error + 1e-12,
        format!("(KdA) residual {:.2e} within the quadrature error {:.2e}", (kda.lhs - kda.rhs).abs() * PI, k.estimated_error),
    );
    v
}

/// Root of `ρ ↦ Σ̂(ρ s, φ)` between `lo` and `hi` by bisection.
fn sigma_root(phi: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let fa = double_torus_sigma(a, phi);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if double_torus_sigma(m, phi) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn c6_double_torus() -> Verdict {
    let mut v = Verdict::new("Example 2 double torus at the default 512 grid");
    let start = Instant::now();
    let e2 = atlas("example2");
    let grid = 512;
    let mesh = build_mesh(&e2, grid).unwrap();
    let samples = sample_nodes(&e2, &mesh);

    // Δ < 0 away from the origins, |K| > 0.1 near them
    let (mut bad_delta, mut near, mut weak_k) = (0, 0, 0);
    for (node, s) in mesh.nodes.iter().zip(&samples) {
        if node.uv[0].hypot(node.uv[1]) > 1e-3 {
            if s.delta.is_nan() || s.delta >= 0.0 {
                bad_delta += 1;
            }
        } else {
            near += 1;
            if s.k.abs() <= 0.1 {
                weak_k += 1;
            }
        }
    }
    let origin_k: Vec<f64> = e2.charts.iter().map(|c| invariants_at(c, 0.0, 0.0).unwrap().k).collect();
    v.check(bad_delta == 0, format!("Δ < 0 at all {} nodes farther than 1e-3 from the origins ({bad_delta} exceptions)", samples.len() - near));
    v.check(weak_k == 0 && origin_k.iter().all(|k| k.abs() > 0.1), format!("|K| > 0.1 at the {near} nodes near the origins; K at the origins {origin_k:?}"));

    let scan = rank_scan(&mesh, &samples);
    v.check(scan.rank_deficient.is_empty(), format!("rank scan of {} nodes: {} rank drops", scan.nodes, scan.rank_deficient.len()));

    // singular sets against the two zero curves of Σ̂
    let analyses: Vec<SingularAnalysis> = BOTH.iter().map(|&c| analyse(&e2, &mesh, &samples, c)).collect();
    let all_pts: Vec<[f64; 2]> = analyses.iter().flat_map(|a| a.analysed_points().map(|(p, _)| p.uv)).collect();
    // calibration: the scale s minimizing the mean square distance
    let msd = |s: f64| all_pts.iter().map(|p| double_torus_sigma_distance(*p, s).powi(2)).sum::<f64>() / all_pts.len() as f64;
    let (mut a, mut b) = (0.95, 1.05);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (x1, x2) = (b - gr * (b - a), a + gr * (b - a));
        if msd(x1) < msd(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let s_cal = 0.5 * (a + b);
    let worst = all_pts.iter().map(|p| double_torus_sigma_distance(*p, s_cal)).fold(0.0, f64::max);
    v.check(worst < 1e-4, format!("{} traced points: calibrated scale {s_cal:.6}, largest distance to Σ̂ = 0 is {worst:.2e} (< 1e-4)", all_pts.len()));
    for (a, c) in analyses.iter().zip(BOTH) {
        let mut per_chart = Vec::new();
        let mut ok = true;
        for chart in 0..e2.charts.len() {
            // assign each point to the nearer radial root of Σ̂
            let (mut inner, mut outer, mut far) = (0, 0, 0);
            for p in a.curves.iter().flat_map(|cu| &cu.points).filter(|p| p.chart == chart) {
                let (rho, phi) = (p.uv[0].hypot(p.uv[1]) * s_cal, p.uv[1].atan2(p.uv[0]));
                let (r1, r2) = (sigma_root(phi, 1e-3, 0.6), sigma_root(phi, 0.6, 1.2));
                if (rho - r1).abs() < 1e-3 {
                    inner += 1;
                } else if (rho - r2).abs() < 1e-3 {
                    outer += 1;
                } else {
                    far += 1;
                }
            }
            let closed_inner = a
                .curves
                .iter()
                .filter(|cu| cu.closed && cu.points.iter().all(|p| p.chart == chart && p.uv[0].hypot(p.uv[1]) < 0.6))
                .count();
            ok &= inner > 0 && outer > 0 && far == 0 && closed_inner == 1;
            per_chart.push(format!("{}: inner {inner} / outer {outer} / other {far}", e2.charts[chart].name));
        }
        v.check(ok, format!("g{}: every chart meets exactly the two zero curves of Σ̂ ({})", c.index(), per_chart.join(", ")));
    }
    v.check(mesh.euler_characteristic() == -2, format!("χ(mesh) = {}", mesh.euler_characteristic()));
    drop(analyses);

    let r = gauss_bonnet_report(&e2, grid, 1e-8).unwrap();
    for t in &r.components {
        let i = t.component.index();
        v.check(
            t.degree.rounded == -1 && (t.degree.value.value + 1.0).abs() < 0.05,
            format!("deg(g{i}) = {:.6} → {}", t.degree.value.value, t.degree.rounded),
        );
        let q = r.identity(&format!("quine.{i}")).unwrap();
        v.check(
            q.asserted && q.holds(),
            format!(
                "Quine for g{i}: 2·deg = {} and χ⁺ − χ⁻ + S⁺ − S⁻ = {} − ({}) + {} − {} = {}",
                q.lhs, t.chi_plus, t.chi_minus, t.s_plus, t.s_minus, q.rhs
            ),
        );
        v.note(format!(
            "g{i} reference counts χ⁺ = −12, χ⁻ = 10, S⁻ = 24; computed χ⁺ = {}, χ⁻ = {}, S⁺ = {}, S⁻ = {}{}",
            t.chi_plus,
            t.chi_minus,
            t.s_plus,
            t.s_minus,
            if (t.chi_plus, t.chi_minus) == (-12, 10) { "" } else { " (discrepancy: the reference χ± are exchanged)" }
        ));
    }
    let elapsed = start.elapsed();
    v.check(elapsed < Duration::from_secs(300), format!("runtime {:.1} s (< 5 min)", elapsed.as_secs_f64()));
    v
}

fn c7_gb1() -> Verdict {
    let mut v = Verdict::new("GB1 residual on the sphere and on a rotationally symmetric fold-only surface");
    let s = gauss_bonnet_report(&atlas("sphere"), 64, 1e-8).unwrap();
    for t in &s.components {
        let id = s.identity(&format!("gb1.{}", t.component.index())).unwrap();
        let err = t.abs_integral.estimated_error + t.kg.value.estimated_error;
        v.check(
            id.asserted && id.residual().abs() <= 2.0 * err + 1e-12,
            format!("sphere g{}: residual {:.2e} within the quadrature error {err:.2e}", t.component.index(), id.residual()),
        );
    }
    let oracle = peanut_kg_oracle(0.25, 1.5);
    let p = gauss_bonnet_report(&atlas("peanut"), 96, 1e-8).unwrap();
    for t in &p.components {
        let i = t.component.index();
        let id = p.identity(&format!("gb1.{i}")).unwrap();
        let bound = 0.02 * 2.0 * PI * p.chi_m.abs() as f64;
        v.check(
            id.asserted && id.residual().abs() < bound,
            format!("peanut g{i}: |2πχ − ∫|K±K^N| − 2∫κ_g| = {:.2e} (< {bound:.3e})", id.residual().abs()),
        );
        v.check(
            t.s_plus + t.s_minus == 0 && t.curves == 2,
            format!("peanut g{i}: {} fold circles, {} cusps", t.curves, t.s_plus + t.s_minus),
        );
        v.check(
            (t.kg.value.value - oracle).abs() < 0.01 * oracle.abs(),
            format!("peanut g{i}: ∫κ_g dτ = {:.6} vs small-circle oracle {oracle:.6}", t.kg.value.value),
        );
    }
    v
}

fn c8_properties() -> Verdict {
    let mut v = Verdict::new("property suites");

    // jets against finite differences
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let mut r = rng(104);
    let strategy = smooth_expr();
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let e = strategy.new_tree(&mut runner).unwrap().current();
        let (u, w) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        worst = worst.max(jet_fd_error(&e, u, w));
    }
    v.check(worst < 1e-6, format!("jet coefficients vs finite differences, 1000 random expressions: worst relative error {worst:.2e}"));

    // bivectors of every frame and both components
    let points = sample_points(200, 105);
    let (mut plk, mut nrm, mut sph) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (c, u, w) in &points {
        let f = darboux_frame(c, *u, *w, 1).unwrap();
        let e = f.values();
        for (i, j) in [(0, 1), (2, 3), (0, 2), (1, 3)] {
            let b = plucker(&e[i], &e[j]);
            plk = plk.max(b.plucker_relation().abs());
            nrm = nrm.max((b.norm2() - 1.0).abs());
        }
        let g = gauss_components(&f);
        let half = SPHERE_RADIUS * SPHERE_RADIUS;
        sph = sph.max((g.beta.iter().map(|x| x * x).sum::<f64>() - half).abs());
        sph = sph.max((g.gamma.iter().map(|x| x * x).sum::<f64>() - half).abs());
    }
    v.check(
        plk < 1e-10 && nrm < 1e-10 && sph < 1e-10,
        format!("bivectors at {} points: Plücker relation {plk:.1e}, unit norm {nrm:.1e}, component radii {sph:.1e}", points.len()),
    );

    // curvature from the Monge form against the frame route
    let mut worst = 0.0_f64;
    for (c, u, w) in &points {
        let m = to_monge(c, *u, *w, 2).unwrap();
        let (k, kn) = monge_curvatures(&m.a, &m.b);
        let inv = invariants_at(c, *u, *w).unwrap();
        worst = worst.max((k - inv.k).abs() / (1.0 + inv.k.abs())).max((kn - inv.kn).abs() / (1.0 + inv.kn.abs()));
    }
    v.check(worst < 1e-9, format!("K, K^N by Monge form vs Darboux frame at {} points: worst {worst:.1e}", points.len()));

    // fold criterion against kernel transversality
    let mut r = rng(106);
    let mut fixtures: Vec<(String, Atlas, usize)> =
        [("example1", 128), ("example2", 128), ("flat_family", 128), ("peanut", 64), ("sphere", 32), ("clifford", 32), ("plane", 16)]
            .iter()
            .map(|&(n, g)| (n.to_string(), atlas(n), g))
            .collect();
    for i in 0..3 {
        let chart = random_monge(&mut r);
        fixtures.push((format!("monge{i}"), Atlas { name: "monge".into(), charts: vec![chart], glue: vec![], params: Default::default() }, 48));
    }
    let (mut classified, mut mismatches) = (0, 0);
    for (_, a, grid) in &fixtures {
        let mesh = build_mesh(a, *grid).unwrap();
        let samples = sample_nodes(a, &mesh);
        for c in BOTH {
            let an = analyse(a, &mesh, &samples, c);
            mismatches += an.g2.criterion_mismatches;
            for (_, d) in an.analysed_points() {
                classified += 1;
                if (d.is_fold_by_kernel() || d.is_fold_by_q()) && d.is_fold_by_kernel() != d.is_fold_by_q() {
                    mismatches += 1;
                }
            }
        }
    }
    v.check(
        mismatches == 0 && classified > 0,
        format!("fold criteria agree at {classified} classified points on {} surfaces ({mismatches} mismatches)", fixtures.len()),
    );
    v
}

/// A criterion's label and its check.
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("C1", c1_jacobian),
        ("C2", c2_rotation),
        ("C3", c3_example1),
        ("C4", c4_clifford),
        ("C5", c5_sphere),
        ("C6", c6_double_torus),
        ("C7", c7_gb1),
        ("C8", c8_properties),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == name) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        println!("{name} {} {} ({:.1} s)", if v.pass { "PASS" } else { "FAIL" }, v.summary, start.elapsed().as_secs_f64());
        for d in &v.details {
            println!("    {d}");
        }
        if !v.pass {
            failed.push(name);
        }
    }
    println!("acceptance: {} failed {:?}", failed.len(), failed);
    if !failed.is_empty() && std::env::var("R4GAUSS_ACCEPTANCE_STRICT").is_ok_and(|s| s == "1") {
        std::process::exit(1);
    }
}
