//! Helpers shared by the integration tests.
#![allow(dead_code)]

use r4gauss::atlas::{Atlas, Chart};
use r4gauss::cli::surface::SurfaceFile;
use r4gauss::exprlang::Expr;
use proptest::prelude::*;
use r4gauss::exprlang::{Func, Params};
use r4gauss::jets::{Jet2, MAX_ORDER};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Built-in surface by name.
pub fn atlas(name: &str) -> Atlas {
    let src = r4gauss::fixtures::get(name).unwrap_or_else(|| panic!("no fixture {name}"));
    SurfaceFile::parse(src).unwrap().atlas().unwrap()
}

/// Surface from TOML text.
pub fn atlas_from(src: &str) -> Atlas {
    SurfaceFile::parse(src).unwrap().atlas().unwrap()
}

/// Deterministic generator for randomized checks.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Half-width of the domain of [`random_monge`] charts.
pub const MONGE_HALF_WIDTH: f64 = 0.3;

/// Random cubic graph `(u, v, p(u, v), q(u, v))` with quadratic and cubic
/// coefficients uniform in `[-2, 2]`, on `[-0.3, 0.3]²`.
pub fn random_monge(rng: &mut impl Rng) -> Chart {
    const MONOMIALS: [&str; 7] = ["u^2", "u*v", "v^2", "u^3", "u^2*v", "u*v^2", "v^3"];
    let mut poly = || {
        MONOMIALS
            .iter()
            .map(|m| format!("({:?})*{m}", rng.gen_range(-2.0..2.0)))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let (p, q) = (poly(), poly());
    let w = MONGE_HALF_WIDTH;
    let src = format!(
        "name = \"monge\"\n[[charts]]\nname = \"m\"\ncoords = [\"u\", \"v\", \"{p}\", \"{q}\"]\n\
         domain = {{ kind = \"rect\", u = [{:?}, {w:?}], v = [{:?}, {w:?}] }}\n",
        -w, -w
    );
    atlas_from(&src).charts.remove(0)
}

/// Point drawn uniformly from the rectangle `[-w, w]²`.
pub fn point_in(rng: &mut impl Rng, w: f64) -> (f64, f64) {
    (rng.gen_range(-w..w), rng.gen_range(-w..w))
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Angle between two lines through the origin (sign of the vectors ignored).
/// Uses `2 atan2(|â - b̂|, |â + b̂|)`, accurate for nearly parallel vectors.
pub fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let s = if dot < 0.0 { -1.0 } else { 1.0 };
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / na - s * y / nb).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / na + s * y / nb).collect();
    2.0 * norm(&diff).atan2(norm(&sum))
}

/// Profile of the peanut fixture: squared distance to the axis at height `z`,
/// `ρ² = (1 - z²)(c₀ + c₂ z²)`.
fn peanut_rho(z: f64, c0: f64, c2: f64) -> f64 {
    ((1.0 - z * z) * (c0 + c2 * z * z)).sqrt()
}

/// Closed-form oracle for `∫κ_g dτ` over the fold images of either Gauss map
/// component of the peanut (a surface of revolution in R³ × {0}).
///
/// Both components map through the unit normal, so each parabolic circle
/// (an inflection of the profile) has a small circle of colatitude `α` as
/// image, with `∫κ_g dτ = 2π cos α` in magnitude. Here `cos α = |ρ'| /
/// √(1 + ρ'²)` at the inflection. The sign is negative with the image of
/// the region `K ± K^N > 0` on the left: the total absolute curvature
/// exceeds `4π` there. Both inflections contribute equally by symmetry.
pub fn peanut_kg_oracle(c0: f64, c2: f64) -> f64 {
    let h = 1e-4;
    let d2 = |z: f64| {
        (peanut_rho(z + h, c0, c2) - 2.0 * peanut_rho(z, c0, c2) + peanut_rho(z - h, c0, c2)) / (h * h)
    };
    // the inflection is the sign change of ρ'' on (0, 1) nearest the waist
    let mut lo = 1e-3;
    let mut hi = lo;
    while d2(hi) * d2(lo) > 0.0 {
        hi += 1e-3;
        assert!(hi < 0.99, "no inflection in the peanut profile");
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if d2(mid) * d2(lo) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    let h1 = 1e-6;
    let slope = (peanut_rho(z + h1, c0, c2) - peanut_rho(z - h1, c0, c2)) / (2.0 * h1);
    let cos_alpha = slope.abs() / (1.0 + slope * slope).sqrt();
    -2.0 * (2.0 * std::f64::consts::PI * cos_alpha)
}

/// Reference polynomial for the singular set of `g₁` of the double torus in
/// polar chart coordinates `(ρ, φ)`.
pub fn double_torus_sigma(rho: f64, phi: f64) -> f64 {
    let r2 = rho * rho;
    9.0 * r2.powi(5) - 248.0 * r2.powi(4) + 232.0 * r2.powi(3) - 464.0 * r2 * r2 + 352.0 * r2 - 32.0
        + (9.0 * r2 * r2 - 86.0 * r2 + 16.0) * r2.powi(3) * (6.0 * phi).cos()
}

/// Distance estimate `|Σ̂| / |∇Σ̂|` of a chart point to the zero set of
/// [`double_torus_sigma`] with coordinates scaled by `s`.
pub fn double_torus_sigma_distance(uv: [f64; 2], s: f64) -> f64 {
    let (rho, phi) = (uv[0].hypot(uv[1]) * s, uv[1].atan2(uv[0]));
    let h = 1e-6;
    let f = double_torus_sigma;
    let fr = (f(rho + h, phi) - f(rho - h, phi)) / (2.0 * h);
    let fp = (f(rho, phi + h) - f(rho, phi - h)) / (2.0 * h * rho);
    f(rho, phi).abs() / fr.hypot(fp) / s
}

/// Reference polynomial of degree 7 for a singular set of Example 1. It
/// equals `-(K + K^N)` times [`example1_denominator`].
pub fn example1_poly(u: f64, v: f64) -> f64 {
    -4.0 * v + 8.0 * u * u - 4.0 * u * v + 8.0 * v * v - 4.0 * u * u * v + 2.0 * u * v * v
        + 2.0 * u * v.powi(3)
        + v.powi(4)
        + 6.0 * u * v.powi(4)
        - 6.0 * u * u * v.powi(3)
        + 4.0 * u.powi(4) * v
        - 6.0 * u.powi(3) * v * v
        + 2.0 * v.powi(5)
        - 28.0 * u.powi(3) * v.powi(3)
        + 32.0 * u * u * v.powi(4)
        - 16.0 * u * v.powi(5)
        + 24.0 * u.powi(4) * v * v
}

/// Positive common denominator of the curvatures of Example 1.
pub fn example1_denominator(u: f64, v: f64) -> f64 {
    (1.0 + v * v
        + 2.0 * u.powi(3) * v * v * (-6.0 * v.powi(3) - 5.0 * v * v + v + 1.0)
        + 2.0 * u * v * v * (1.0 - 2.0 * v)
        + 2.0 * (v - 1.0) * v.powi(3)
        + u.powi(4) * (v * (v + 1.0) * (3.0 * v - 2.0) * (3.0 * v + 1.0) + 2.0)
        + u * u * ((v * v * (2.0 * v + 1.0).powi(2) + 8.0) * v * v + 2.0))
        .powi(2)
}

/// Replaces `u` and `v` in `e` by `p` and `q`.
pub fn substitute(e: &Expr, p: &Expr, q: &Expr) -> Expr {
    let s = |a: &Expr| Box::new(substitute(a, p, q));
    match e {
        Expr::U => p.clone(),
        Expr::V => q.clone(),
        Expr::Num(_) | Expr::Pi | Expr::Param(_) => e.clone(),
        Expr::Neg(a) => Expr::Neg(s(a)),
        Expr::Add(a, b) => Expr::Add(s(a), s(b)),
        Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
        Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
        Expr::Div(a, b) => Expr::Div(s(a), s(b)),
        Expr::Pow(a, n) => Expr::Pow(s(a), *n),
        Expr::Call(f, a) => Expr::Call(*f, s(a)),
    }
}

/// Chart with coordinate expressions on a rectangle.
pub fn rect_chart(coords: [&str; 4], half_width: f64) -> Chart {
    let w = half_width;
    let src = format!(
        "name = \"c\"\n[[charts]]\nname = \"c\"\ncoords = [\"{}\", \"{}\", \"{}\", \"{}\"]\n\
         domain = {{ kind = \"rect\", u = [{:?}, {w:?}], v = [{:?}, {w:?}] }}\n",
        coords[0], coords[1], coords[2], coords[3], -w, -w
    );
    atlas_from(&src).charts.remove(0)
}

/// `n` random points cycling through Example 1 on `[-0.6, 0.6]²`, the
/// flat-point family on `[-0.2, 0.2]²` and fresh random cubic graphs.
pub fn jacobian_points(n: usize, seed: u64) -> Vec<(Chart, f64, f64)> {
    let mut r = rng(seed);
    let e1 = atlas("example1").charts.remove(0);
    let ff = atlas("flat_family").charts.remove(0);
    (0..n)
        .map(|i| match i % 3 {
            0 => {
                let (u, v) = point_in(&mut r, 0.6);
                (e1.clone(), u, v)
            }
            1 => {
                let (u, v) = point_in(&mut r, 0.2);
                (ff.clone(), u, v)
            }
            _ => {
                let m = random_monge(&mut r);
                let (u, v) = point_in(&mut r, MONGE_HALF_WIDTH);
                (m, u, v)
            }
        })
        .collect()
}

/// Central difference with one Richardson step, `O(h⁴)` accurate.
pub fn derivative_fd(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Coordinates of the graph surface of Example 1.
pub const EXAMPLE1: [&str; 4] = ["u", "v", "u*v - u*v^2 + v^3/3", "-u^2/2 - u^2*v"];

/// Example 1 on the square of half width 0.6.
pub fn example1() -> Chart {
    rect_chart(EXAMPLE1, 0.6)
}

/// Random points on Example 1, the flat-point family, the Clifford torus,
/// a chart of the double torus and fresh random Monge charts.
pub fn sample_points(n_per_chart: usize, seed: u64) -> Vec<(Chart, f64, f64)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let e1 = example1();
    let ff = atlas("flat_family").charts.remove(0);
    let cl = atlas("clifford").charts.remove(0);
    let e2 = atlas("example2").charts.remove(0);
    let tau = 2.0 * std::f64::consts::PI;
    for _ in 0..n_per_chart {
        let (u, v) = point_in(&mut r, 0.6);
        out.push((e1.clone(), u, v));
        let (u, v) = point_in(&mut r, 0.2);
        out.push((ff.clone(), u, v));
        let (u, v) = (r.gen_range(0.0..tau), r.gen_range(0.0..tau));
        out.push((cl.clone(), u, v));
        let (u, v) = point_in(&mut r, 0.5);
        out.push((e2.clone(), u, v));
    }
    for _ in 0..n_per_chart {
        let m = random_monge(&mut r);
        let (u, v) = point_in(&mut r, MONGE_HALF_WIDTH);
        out.push((m, u, v));
    }
    out
}

/// `K` and `K^N` of a graph `(s, t, a, b)` at its origin, where the first
/// derivatives vanish: the second fundamental form is the pair of Hessians.
pub fn monge_curvatures(a: &r4gauss::jets::Jet2, b: &r4gauss::jets::Jet2) -> (f64, f64) {
    let (l3, m3, n3) = (a.deriv(2, 0), a.deriv(1, 1), a.deriv(0, 2));
    let (l4, m4, n4) = (b.deriv(2, 0), b.deriv(1, 1), b.deriv(0, 2));
    let k = l3 * n3 - m3 * m3 + l4 * n4 - m4 * m4;
    let kn = (l3 - n3) * m4 - (l4 - n4) * m3;
    (k, kn)
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Random expressions whose every subterm is smooth and well conditioned on
/// `[-1, 1]²`: quotients and square roots get arguments bounded away from 0.
pub fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::U),
        Just(Expr::V),
        (-2.0..2.0f64).prop_map(Expr::Num),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(bx(a), bx(b))),
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (inner.clone(), 0..4i32).prop_map(|(a, n)| Expr::Pow(bx(a), n)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(
                bx(a),
                bx(Expr::Add(bx(Expr::Num(1.5)), bx(Expr::Pow(bx(b), 2))))
            )),
            inner.clone().prop_map(|a| Expr::Call(
                Func::Sqrt,
                bx(Expr::Add(bx(Expr::Num(1.0)), bx(Expr::Pow(bx(a), 2))))
            )),
            inner.clone().prop_map(|a| Expr::Call(Func::Sin, bx(a))),
            inner.prop_map(|a| Expr::Call(Func::Cos, bx(a))),
        ]
    })
}

/// Largest relative error (unit floor) of the jet coefficients of `e` at
/// `(u, v)` against finite differences. Degree-one coefficients are compared
/// with central differences of the value, degree `d > 1` coefficients with
/// central differences of the degree `d - 1` coefficients, so every
/// coefficient is checked against a first-derivative difference quotient of
/// an already checked quantity.
pub fn jet_fd_error(e: &Expr, u: f64, v: f64) -> f64 {
    let h = 1e-3;
    let p = Params::new();
    let jet = |u: f64, v: f64, order: usize| -> Jet2 { e.eval_jet(u, v, order, &p).unwrap() };
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let j = jet(u, v, MAX_ORDER);
    let du = derivative_fd(|t| e.eval(u + t, v, &p).unwrap(), h);
    let dv = derivative_fd(|t| e.eval(u, v + t, &p).unwrap(), h);
    let mut worst = rel(j.coeff(1, 0), du).max(rel(j.coeff(0, 1), dv));
    for d in 2..=MAX_ORDER {
        for jj in 0..=d {
            let i = d - jj;
            // c_ij = ∂_u c_(i-1)j / i, or ∂_v c_i(j-1) / j when i = 0
            let fd = if i > 0 {
                derivative_fd(|t| jet(u + t, v, d - 1).coeff(i - 1, jj), h) / i as f64
            } else {
                derivative_fd(|t| jet(u, v + t, d - 1).coeff(i, jj - 1), h) / jj as f64
            };
            worst = worst.max(rel(j.coeff(i, jj), fd));
        }
    }
    worst
}
