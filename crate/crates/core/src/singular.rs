//! Singular sets of the Gauss map components: tracing, fold/cusp
//! classification, cusp signs and the genericity conditions (G₁)–(G₃).
//!
//! The singular set of `gᵢ` is the zero set of `f = K ± K^N`. It is traced
//! by marching triangles over the glued mesh, so curves pass across chart
//! boundaries through identified vertices. Each crossing is refined by a
//! one-dimensional root search along its mesh edge.
//!
//! At a singular point with kernel `k` the quantity
//! `t = sin∠(k, T)` between the kernel and the curve tangent `T` (measured in
//! the induced metric) separates folds (`t ≠ 0`) from cusps (`t = 0`).
//! Cusps are located by bisection on sign changes of `t`, with kernels
//! compared locally so that the orientation of the kernel line never
//! introduces spurious sign changes.
//!
//! A cusp is positive when `dgᵢ` preserves orientation on the side of the
//! cusp where `gᵢ` is injective. The sign is read off the normal form
//! `(x, y) ↦ (x, A xy + B y³)` reached by coordinate changes preserving
//! orientation; the injective side has Jacobian sign `sign B`. It is
//! cross-checked by sampling the Jacobian on the injective side.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::atlas::{Atlas, AtlasError, Chart};
use crate::frames::{connection_forms, darboux_frame};
use crate::gaussmap::{beta_jets, dgauss_components, svd2, Component, SPHERE_RADIUS};
use crate::invariants::{invariant_jets, invariants_at, invariants_jets_at};
use crate::jets::{Jet2, JetError};
use crate::topology::{Mesh, NodeSample};

/// Relative residual below which a value counts as zero.
pub const ZERO_TOL: f64 = 1e-8;
/// Threshold on the normalized gradient for (G₁).
pub const G1_THRESHOLD: f64 = 1e-6;
/// Relative value of `K ± K^N` below which a critical point of it counts as
/// lying on the singular set.
pub const G1_LEVEL_TOL: f64 = 1e-6;
/// Number of local minima of the gradient along the curves that seed the
/// critical-point search of (G₁).
const G1_SEEDS: usize = 64;
/// Target for `|t|` when refining cusps.
pub const CUSP_T_TOL: f64 = 1e-9;
/// Threshold on `|t|` below which a sample point is not called a fold.
pub const FOLD_T_MIN: f64 = 1e-6;
/// Threshold on the derivative of `t` along the curve at a cusp.
pub const TANGENCY_MIN: f64 = 1e-6;
/// Image coincidence tolerance for (G₃), relative to the sphere radius.
pub const G3_TOL: f64 = 1e-4;
/// Minimal crossing angle of image curves for (G₃), in radians.
pub const G3_MIN_ANGLE: f64 = 1e-4;

/// Errors of singular-set analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SingularError {
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error("jet arithmetic failed: {0}")]
    Jet(#[from] JetError),
}

/// A point of a traced singular curve with its pointwise analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub chart: usize,
    pub uv: [f64; 2],
    /// Position in R⁴.
    pub x: [f64; 4],
    /// True if the point lies on a mesh edge touching a chart boundary where
    /// the chart cannot be evaluated, or if the edge root search failed
    /// (its chord leaves the domain); such points are not analysed.
    pub boundary: bool,
    /// Pointwise data; `None` for boundary points or failed evaluations.
    pub data: Option<PointData>,
}

/// Pointwise differential data at a singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointData {
    /// `|K ± K^N| / (1 + |K| + |K^N|)`.
    pub residual: f64,
    /// Chart gradient of `K ± K^N`.
    pub gradient: [f64; 2],
    /// `|∇f| / (1 + ‖∇²f‖)`.
    pub gradient_norm: f64,
    /// Kernel of `dgᵢ` from the connection forms, unit in chart coordinates.
    pub kernel: [f64; 2],
    /// Angle between that kernel and the kernel of the differential of the
    /// bivector coordinates.
    pub kernel_mismatch: f64,
    /// `σ_min / σ_max` of `dgᵢ`.
    pub rank_ratio: f64,
    /// Unit tangent of the curve in chart coordinates, `(−f_v, f_u)` up to
    /// sign, oriented along the polyline.
    pub tangent: [f64; 2],
    /// Kernel and tangent pushed to R⁴.
    pub kernel4: [f64; 4],
    pub tangent4: [f64; 4],
    /// `sin∠(kernel, tangent)` in the induced metric.
    pub t: f64,
    /// `det[β̂, ∂_w β, ∂²_k β]`: the second derivative along the kernel
    /// measured against the image line, nonzero exactly at folds.
    pub q: f64,
    /// `q / (|∂_w β| |∂²_k β|)`.
    pub q_normalized: f64,
    /// `∇f · k`.
    pub gradient_along_kernel: f64,
    /// Signed area element `±|x_u ∧ x_v|`.
    pub area: f64,
    /// Image on the component sphere.
    pub image: [f64; 3],
}

impl PointData {
    /// Fold test by transversality of the kernel to the curve.
    pub fn is_fold_by_kernel(&self) -> bool {
        self.t.abs() > FOLD_T_MIN
    }

    /// Fold test by the second-order condition `Q(ker) ⊄ image`.
    pub fn is_fold_by_q(&self) -> bool {
        self.q_normalized.abs() > FOLD_T_MIN
    }
}

/// A traced singular curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularCurve {
    pub component: Component,
    pub points: Vec<CurvePoint>,
    pub closed: bool,
}

impl SingularCurve {
    /// Maximal runs of consecutive points lying in one chart, as
    /// `(chart, first, last)` index triples; a closed curve inside a single
    /// chart gives one run.
    pub fn chart_runs(&self) -> Vec<(usize, usize, usize)> {
        let n = self.points.len();
        let mut runs: Vec<(usize, usize, usize)> = Vec::new();
        for i in 0..n {
            let c = self.points[i].chart;
            match runs.last_mut() {
                Some(r) if r.0 == c => r.2 = i,
                _ => runs.push((c, i, i)),
            }
        }
        if self.closed && runs.len() > 1 && runs[0].0 == runs[runs.len() - 1].0 {
            let last = runs.pop().expect("nonempty");
            runs[0].1 = last.1;
        }
        runs
    }
}

/// Status of a detected cusp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CuspStatus {
    Confirmed,
    /// Normal form and Jacobian sampling disagree on the sign.
    InconclusiveSign,
    /// `t` and its derivative along the curve both vanish: (G₂) violated.
    DegenerateTangency,
    /// A normal-form coefficient vanishes: not a simple cusp.
    DegenerateNormalForm,
}

/// A cusp point of a Gauss map component.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspRecord {
    pub component: Component,
    pub chart: usize,
    pub uv: [f64; 2],
    pub x: [f64; 4],
    /// `+1` if `dgᵢ` preserves orientation on the injective side.
    pub sign: i8,
    /// Sign `ε` of the normal form `(uv + εv³, u)` under orientation
    /// preserving coordinate changes; always `-sign`.
    pub normal_form_sign: i8,
    /// Sign from sampling the Jacobian on the injective side.
    pub sampled_sign: Option<i8>,
    /// Residual `|t|` at the located point.
    pub t_residual: f64,
    /// Derivative of `t` along the curve (per unit length in R⁴).
    pub tangency: f64,
    pub normal_form: NormalForm,
    pub kernel: [f64; 2],
    pub tangent: [f64; 2],
    pub image: [f64; 3],
    pub status: CuspStatus,
}

/// A sign change of `t` that could not be refined to a cusp.
#[derive(Debug, Clone, PartialEq)]
pub struct UnresolvedCandidate {
    pub curve: usize,
    pub index: usize,
    pub reason: String,
}

/// Coefficients of a planar map germ at a rank-one point in adapted
/// coordinates: source `(x, y)` along `(w, k)` with `k` the kernel, target
/// along `(a, c)` with `a = dG·w` and `c` its rotation by a right angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    /// Coefficient of `xy` in the second target coordinate.
    pub a: f64,
    /// Cubic coefficient after absorbing the `y²` term of the first
    /// coordinate.
    pub b: f64,
    /// Coefficient of `y²` in the second target coordinate; zero at a cusp.
    pub q02: f64,
}

impl NormalForm {
    /// Jacobian sign on the injective side, in the adapted orientations.
    pub fn orientation_sign(&self) -> i8 {
        if self.b >= 0.0 {
            1
        } else {
            -1
        }
    }

    /// True if `A` or `B` vanishes to working precision.
    pub fn is_degenerate(&self) -> bool {
        self.a.abs() < 1e-8 || self.b.abs() < 1e-8 * (1.0 + self.a.abs())
    }
}

/// Normal form data of the planar germ `g = (g₁, g₂)` (jets of order 3 at
/// least) at a point where `k` spans the kernel of `dg`.
pub fn normal_form(g: [Jet2; 2], k: [f64; 2]) -> NormalForm {
    let n = (k[0] * k[0] + k[1] * k[1]).sqrt();
    let k = [k[0] / n, k[1] / n];
    let w = [k[1], -k[0]];
    let m = [[w[0], k[0]], [w[1], k[1]]];
    let gx = g[0].linear_change(m).with_value(0.0);
    let gy = g[1].linear_change(m).with_value(0.0);
    let a = [gx.coeff(1, 0), gy.coeff(1, 0)];
    let c = [-a[1], a[0]];
    let n2 = a[0] * a[0] + a[1] * a[1];
    let xx = (gx.scale(a[0]) + gy.scale(a[1])).scale(1.0 / n2);
    let yy = (gx.scale(c[0]) + gy.scale(c[1])).scale(1.0 / n2);
    let q11 = yy.coeff(1, 1);
    NormalForm { a: q11, b: yy.coeff(0, 3) - q11 * xx.coeff(0, 2), q02: yy.coeff(0, 2) }
}

/// (G₁) report.
#[derive(Debug, Clone, PartialEq)]
pub struct G1Report {
    pub pass: bool,
    /// Minimum normalized gradient over analysed curve points and over
    /// near-zero mesh nodes.
    pub min_gradient: f64,
    /// Where the minimum is attained: chart and parameters.
    pub witness: Option<(usize, [f64; 2])>,
    /// `K ± K^N` and its gradient vanish together somewhere.
    pub gradient_vanishes: bool,
    /// `K ± K^N` vanishes at every mesh node.
    pub identically_zero: bool,
    /// Critical points of `K ± K^N` on its zero set found by Newton
    /// refinement from the traced curves.
    pub critical_points: usize,
}

/// (G₂) report.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Report {
    pub pass: bool,
    pub folds: usize,
    pub cusps: usize,
    /// Analysed points labelled differently by the two fold criteria.
    pub criterion_mismatches: usize,
    pub degenerate: usize,
    pub unresolved: usize,
}

/// (G₃) report.
#[derive(Debug, Clone, PartialEq)]
pub struct G3Report {
    pub pass: bool,
    /// Transverse double points of the image curves.
    pub crossings: usize,
    /// Smallest crossing angle found (π/2 if there are none).
    pub min_angle: f64,
    /// Cusp images lying on another branch of the image.
    pub cusp_coincidences: usize,
    /// Points where three or more branches meet.
    pub triple_points: usize,
    /// Witness images for failures.
    pub witnesses: Vec<[f64; 3]>,
}

/// Full singular-set analysis of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularAnalysis {
    pub component: Component,
    pub curves: Vec<SingularCurve>,
    pub cusps: Vec<CuspRecord>,
    pub unresolved: Vec<UnresolvedCandidate>,
    pub g1: G1Report,
    pub g2: G2Report,
    pub g3: G3Report,
}

impl SingularAnalysis {
    /// Numbers of positive and negative confirmed cusps.
    pub fn cusp_counts(&self) -> (usize, usize) {
        let conf = self.cusps.iter().filter(|c| c.status == CuspStatus::Confirmed);
        let pos = conf.clone().filter(|c| c.sign > 0).count();
        let neg = conf.filter(|c| c.sign < 0).count();
        (pos, neg)
    }

    /// All analysed points of all curves.
    pub fn analysed_points(&self) -> impl Iterator<Item = (&CurvePoint, &PointData)> {
        self.curves
            .iter()
            .flat_map(|c| c.points.iter())
            .filter_map(|p| p.data.as_ref().map(|d| (p, d)))
    }
}

fn singular_value(s: &NodeSample, c: Component) -> f64 {
    match c {
        Component::One => s.k + s.kn,
        Component::Two => s.k - s.kn,
    }
}

fn scale_of(s: &NodeSample) -> f64 {
    1.0 + s.k.abs() + s.kn.abs()
}

fn eval_f(chart: &Chart, uv: [f64; 2], c: Component) -> Option<f64> {
    invariants_at(chart, uv[0], uv[1]).ok().map(|k| k.singular_function(c))
}

/// Root of `f` on the segment between `a` and `b`, where `fa` and `fb` have
/// opposite signs, by the Illinois variant of regula falsi. Returns `None`
/// if the segment leaves the chart domain.
fn segment_root(
    chart: &Chart,
    a: [f64; 2],
    b: [f64; 2],
    mut fa: f64,
    mut fb: f64,
    c: Component,
) -> Option<([f64; 2], f64)> {
    let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut side = 0;
    for _ in 0..80 {
        let s = (lo * fb - hi * fa) / (fb - fa);
        let s = if s.is_finite() && s > lo && s < hi { s } else { 0.5 * (lo + hi) };
        let fs = eval_f(chart, at(s), c)?;
        if fs == 0.0 {
            return Some((at(s), 0.0));
        }
        if (fs > 0.0) == (fa > 0.0) {
            lo = s;
            fa = fs;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            fb = fs;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Some(if fa.abs() < fb.abs() { (at(lo), fa) } else { (at(hi), fb) })
}

/// Traces the singular curves of component `c` on a sampled mesh. Edge
/// roots are accepted if `|K ± K^N| ≤ tol·(1 + |K| + |K^N|)` there.
pub fn trace_singular_set(
    atlas: &Atlas,
    mesh: &Mesh,
    samples: &[NodeSample],
    c: Component,
    tol: f64,
) -> Vec<SingularCurve> {
    let node_f: Vec<f64> = samples.iter().map(|s| singular_value(s, c)).collect();
    let vf = mesh.vertex_values(&node_f);
    let positive: Vec<bool> = vf.iter().map(|&x| x >= 0.0).collect();
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for t in &mesh.triangles {
        let v = t.map(|k| mesh.vertex[k]);
        let s = v.map(|x| positive[x]);
        if s[0] == s[1] && s[1] == s[2] {
            continue;
        }
        let mut hit = Vec::with_capacity(2);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            if s[i] != s[j] && v[i] != v[j] {
                let key = (v[i].min(v[j]), v[i].max(v[j]));
                let next = reps.len();
                let id = *ids.entry(key).or_insert(next);
                if id == next {
                    let (a, b) = if v[i] < v[j] { (t[i], t[j]) } else { (t[j], t[i]) };
                    reps.push((a, b));
                    adj.push(Vec::new());
                }
                hit.push(id);
            }
        }
        if hit.len() == 2 {
            adj[hit[0]].push(hit[1]);
            adj[hit[1]].push(hit[0]);
        }
    }
    let points: Vec<CurvePoint> = reps
        .par_iter()
        .map(|&(a, b)| {
            let (na, nb) = (&mesh.nodes[a], &mesh.nodes[b]);
            let chart = &atlas.charts[na.chart];
            let (fa, fb) = (node_f[a], node_f[b]);
            let lin = {
                let s = if fa != fb { fa / (fa - fb) } else { 0.5 };
                let s = if s.is_finite() { s.clamp(0.0, 1.0) } else { 0.5 };
                [na.uv[0] + s * (nb.uv[0] - na.uv[0]), na.uv[1] + s * (nb.uv[1] - na.uv[1])]
            };
            let mut boundary = !(na.interior && nb.interior);
            let mut uv = lin;
            if !boundary && (fa > 0.0) != (fb > 0.0) && fa != 0.0 && fb != 0.0 {
                // fa, fb carry the Illinois halvings, so test the value itself
                match segment_root(chart, na.uv, nb.uv, fa, fb, c) {
                    Some((r, _)) => match eval_f(chart, r, c) {
                        Some(fr) if fr.abs() <= tol * scale_of(&samples[a]) => uv = r,
                        _ => boundary = true,
                    },
                    None => boundary = true,
                }
            }
            let x = chart
                .eval_point(uv[0], uv[1])
                .or_else(|_| chart.eval_point(na.uv[0], na.uv[1]))
                .unwrap_or([f64::NAN; 4]);
            CurvePoint { chart: na.chart, uv, x, boundary, data: None }
        })
        .collect();

    // link crossings into polylines, open curves first
    let n = reps.len();
    let mut visited = vec![false; n];
    let mut curves = Vec::new();
    let starts: Vec<usize> =
        (0..n).filter(|&i| adj[i].len() == 1).chain((0..n).filter(|&i| adj[i].len() != 1)).collect();
    for start in starts {
        if visited[start] {
            continue;
        }
        let mut order = vec![start];
        visited[start] = true;
        let mut cur = start;
        let closed;
        loop {
            let next = adj[cur].iter().copied().find(|&j| !visited[j]);
            match next {
                Some(j) => {
                    visited[j] = true;
                    order.push(j);
                    cur = j;
                }
                None => {
                    closed = order.len() > 2 && adj[cur].contains(&start);
                    break;
                }
            }
        }
        // crossings on edges sharing a zero vertex coincide; keep one
        let mut pts: Vec<CurvePoint> = Vec::with_capacity(order.len());
        for &i in &order {
            let p = &points[i];
            let dup = pts.last().is_some_and(|q| same_point(q, p));
            if !dup {
                pts.push(p.clone());
            }
        }
        if closed && pts.len() > 1 && same_point(&pts[0], &pts[pts.len() - 1]) {
            pts.pop();
        }
        curves.push(SingularCurve { component: c, points: pts, closed });
    }
    curves
}

fn same_point(a: &CurvePoint, b: &CurvePoint) -> bool {
    a.chart == b.chart && (a.uv[0] - b.uv[0]).abs() < 1e-13 && (a.uv[1] - b.uv[1]).abs() < 1e-13
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let x = cross3(b, c);
    a[0] * x[0] + a[1] * x[1] + a[2] * x[2]
}

pub(crate) fn push4(xu: &[f64; 4], xv: &[f64; 4], d: [f64; 2]) -> [f64; 4] {
    std::array::from_fn(|i| xu[i] * d[0] + xv[i] * d[1])
}

/// Unit vector spanning the kernel of a 3×2 matrix given by its columns.
pub(crate) fn kernel_3x2(cu: &[f64; 3], cv: &[f64; 3]) -> [f64; 2] {
    let a = cu.iter().map(|x| x * x).sum::<f64>();
    let b = cu.iter().zip(cv).map(|(x, y)| x * y).sum::<f64>();
    let c = cv.iter().map(|x| x * x).sum::<f64>();
    // eigenvector of [[a, b], [b, c]] for the small eigenvalue
    let lmin = 0.5 * (a + c - ((a - c).powi(2) + 4.0 * b * b).sqrt());
    let v = if (a - lmin).abs() > (c - lmin).abs() { [-b, a - lmin] } else { [c - lmin, -b] };
    let n = norm(&v);
    if n == 0.0 {
        [1.0, 0.0]
    } else {
        [v[0] / n, v[1] / n]
    }
}

/// Pointwise analysis at a singular point; `dir` orients the tangent.
pub fn analyze_point(
    chart: &Chart,
    uv: [f64; 2],
    c: Component,
    dir: Option<[f64; 4]>,
) -> Result<PointData, SingularError> {
    let f = darboux_frame(chart, uv[0], uv[1], 4)?;
    let cf = connection_forms(&f)?;
    let inv = invariant_jets(&cf)?;
    let fj = inv.singular_function(c);
    let curv = inv.curvatures();
    let residual = fj.value().abs() / (1.0 + curv.k.abs() + curv.kn.abs());
    let gradient = fj.gradient();
    let h = fj.hessian();
    let hn = (h[0][0].powi(2) + 2.0 * h[0][1].powi(2) + h[1][1].powi(2)).sqrt();
    let gradient_norm = norm(&gradient) / (1.0 + hn);
    let (d1, d2) = dgauss_components(&cf);
    let dg = if c == Component::One { d1 } else { d2 };
    let (smax, smin, kv) = svd2(&dg);
    let kernel = kv;
    let beta = beta_jets(&f, c);
    let b0 = beta.map(|j| j.value());
    let bu = beta.map(|j| j.coeff(1, 0));
    let bv = beta.map(|j| j.coeff(0, 1));
    let kb = kernel_3x2(&bu, &bv);
    let kernel_mismatch = (kernel[0] * kb[1] - kernel[1] * kb[0]).abs().asin();
    let xu = f.xu.map(|j| j.value());
    let xv = f.xv.map(|j| j.value());
    let e = f.values();
    let mut tangent = [-gradient[1], gradient[0]];
    let tn = norm(&tangent);
    if tn > 0.0 {
        tangent = [tangent[0] / tn, tangent[1] / tn];
    }
    let mut tangent4 = push4(&xu, &xv, tangent);
    if let Some(d) = dir {
        if dot4(&tangent4, &d) < 0.0 {
            tangent = [-tangent[0], -tangent[1]];
            tangent4 = tangent4.map(|x| -x);
        }
    }
    let kernel4 = push4(&xu, &xv, kernel);
    let (k1, k2) = (dot4(&kernel4, &e[0]), dot4(&kernel4, &e[1]));
    let (t1, t2) = (dot4(&tangent4, &e[0]), dot4(&tangent4, &e[1]));
    let t = (k1 * t2 - k2 * t1) / (k1.hypot(k2) * t1.hypot(t2));
    // second derivative of β along the kernel against the image line
    let w = [kernel[1], -kernel[0]];
    let bw: [f64; 3] = std::array::from_fn(|i| bu[i] * w[0] + bv[i] * w[1]);
    let bkk: [f64; 3] = std::array::from_fn(|i| {
        let j = &beta[i];
        2.0 * j.coeff(2, 0) * kernel[0] * kernel[0]
            + 2.0 * j.coeff(1, 1) * kernel[0] * kernel[1]
            + 2.0 * j.coeff(0, 2) * kernel[1] * kernel[1]
    });
    let bn = norm(&b0);
    let bhat = b0.map(|x| x / bn);
    let q = det3(&bhat, &bw, &bkk);
    let qd = norm(&bw) * norm(&bkk);
    let q_normalized = if qd > 0.0 { q / qd } else { 0.0 };
    let guu: f64 = xu.iter().map(|a| a * a).sum();
    let gvv: f64 = xv.iter().map(|a| a * a).sum();
    let guv: f64 = xu.iter().zip(&xv).map(|(a, b)| a * b).sum();
    let area = (guu * gvv - guv * guv).max(0.0).sqrt() * chart.orientation as f64;
    Ok(PointData {
        residual,
        gradient,
        gradient_norm,
        kernel,
        kernel_mismatch,
        rank_ratio: if smax > 0.0 { smin / smax } else { 0.0 },
        tangent,
        kernel4,
        tangent4,
        t,
        q,
        q_normalized,
        gradient_along_kernel: gradient[0] * kernel[0] + gradient[1] * kernel[1],
        area,
        image: b0,
    })
}

/// Newton projection of `uv` onto the zero set of `K ± K^N` along the
/// gradient.
pub fn project_to_curve(chart: &Chart, mut uv: [f64; 2], c: Component) -> Result<[f64; 2], SingularError> {
    for _ in 0..4 {
        let inv = invariants_jets_at(chart, uv[0], uv[1], 1)?;
        let f = inv.singular_function(c);
        let g = f.gradient();
        let g2 = g[0] * g[0] + g[1] * g[1];
        if g2 == 0.0 {
            break;
        }
        let s = f.value() / g2;
        uv = [uv[0] - s * g[0], uv[1] - s * g[1]];
        if s.abs() * g2.sqrt() < 1e-15 {
            break;
        }
    }
    Ok(uv)
}

/// `t` at a point, with the kernel oriented along `kref` and the tangent
/// along `tref`.
fn oriented_t(
    chart: &Chart,
    uv: [f64; 2],
    c: Component,
    kref: &[f64; 4],
    tref: &[f64; 4],
) -> Option<(f64, PointData)> {
    let d = analyze_point(chart, uv, c, Some(*tref)).ok()?;
    let s = if dot4(&d.kernel4, kref) < 0.0 { -1.0 } else { 1.0 };
    Some((s * d.t, d))
}

fn sign_i8(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Locates and classifies the cusp between analysed points `i` and `j`
/// of a curve.
fn refine_cusp(
    atlas: &Atlas,
    curve: &SingularCurve,
    i: usize,
    j: usize,
    c: Component,
) -> Result<CuspRecord, String> {
    let (pi, pj) = (&curve.points[i], &curve.points[j]);
    let chart = &atlas.charts[pi.chart];
    let (di, dj) = (pi.data.as_ref().unwrap(), pj.data.as_ref().unwrap());
    let kref = di.kernel4;
    let tref = di.tangent4;
    let t_lo = di.t;
    let at = |s: f64| [pi.uv[0] + s * (pj.uv[0] - pi.uv[0]), pi.uv[1] + s * (pj.uv[1] - pi.uv[1])];
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best: Option<([f64; 2], f64, PointData)> = None;
    let _ = dj;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let q = project_to_curve(chart, at(mid), c).map_err(|e| e.to_string())?;
        let (t, d) = oriented_t(chart, q, c, &kref, &tref).ok_or("evaluation failed")?;
        best = Some((q, t, d));
        if t.abs() < CUSP_T_TOL {
            break;
        }
        if (t > 0.0) == (t_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (uv, t, d) = best.ok_or("no bisection step")?;
    // derivative of t along the curve
    let step = 1e-5 * (norm(&[pj.uv[0] - pi.uv[0], pj.uv[1] - pi.uv[1]]) + 1e-3);
    let shift = |s: f64| [uv[0] + s * d.tangent[0], uv[1] + s * d.tangent[1]];
    let qp = project_to_curve(chart, shift(step), c).map_err(|e| e.to_string())?;
    let qm = project_to_curve(chart, shift(-step), c).map_err(|e| e.to_string())?;
    let (tp, _) = oriented_t(chart, qp, c, &kref, &tref).ok_or("evaluation failed")?;
    let (tm, _) = oriented_t(chart, qm, c, &kref, &tref).ok_or("evaluation failed")?;
    let xp = chart.eval_point(qp[0], qp[1]).map_err(|e| e.to_string())?;
    let xm = chart.eval_point(qm[0], qm[1]).map_err(|e| e.to_string())?;
    let ds: f64 = norm(&std::array::from_fn::<f64, 4, _>(|k| xp[k] - xm[k]));
    let tangency = (tp - tm) / ds;

    // normal form of the component in a tangent plane chart of the sphere
    let f = darboux_frame(chart, uv[0], uv[1], 4).map_err(|e| e.to_string())?;
    let beta = beta_jets(&f, c);
    let b0 = beta.map(|j| j.value());
    let bn = norm(&b0);
    let bhat = b0.map(|x| x / bn);
    let axis = (0..3)
        .min_by(|&a, &b| bhat[a].abs().partial_cmp(&bhat[b].abs()).unwrap())
        .unwrap();
    let mut ea = [0.0; 3];
    ea[axis] = 1.0;
    let t1 = cross3(&bhat, &ea);
    let n1 = norm(&t1);
    let t1 = t1.map(|x| x / n1);
    let t2 = cross3(&bhat, &t1);
    let g = [t1, t2].map(|t| beta[0].scale(t[0]) + beta[1].scale(t[1]) + beta[2].scale(t[2]));
    let nf = normal_form(g, d.kernel);
    let sign = nf.orientation_sign() * chart.orientation;

    // cross-check: Jacobian on the injective side
    let sampled_sign = (|| {
        let n = curve.points.len();
        let walk = |start: usize, step: usize| {
            let len = if curve.closed { n } else if step == 1 { n - start } else { start + 1 };
            (0..len).map(move |k| (start + step * k) % n)
        };
        let nth_analysed = |start: usize, step: usize| {
            walk(start, step).filter_map(|k| curve.points[k].data.as_ref()).nth(2)
        };
        let before = nth_analysed(i, n - 1)?;
        let after = nth_analysed(j, 1)?;
        let open: [f64; 3] = std::array::from_fn(|k| 0.5 * (before.image[k] + after.image[k]) - b0[k]);
        let w = [d.kernel[1], -d.kernel[0]];
        let delta = norm(&[pj.uv[0] - pi.uv[0], pj.uv[1] - pi.uv[1]]).max(1e-6);
        for s in [1.0, -1.0] {
            let q = [uv[0] + s * delta * w[0], uv[1] + s * delta * w[1]];
            let fq = darboux_frame(chart, q[0], q[1], 2).ok()?;
            let bq = beta_jets(&fq, c).map(|j| j.value());
            let dq: f64 = (0..3).map(|k| (bq[k] - b0[k]) * open[k]).sum();
            if dq < 0.0 {
                let jac = invariants_at(chart, q[0], q[1]).ok()?.jacobian(c);
                return Some(sign_i8(jac));
            }
        }
        None
    })();

    let status = if tangency.abs() < TANGENCY_MIN {
        CuspStatus::DegenerateTangency
    } else if nf.is_degenerate() {
        CuspStatus::DegenerateNormalForm
    } else if sampled_sign != Some(sign) {
        CuspStatus::InconclusiveSign
    } else {
        CuspStatus::Confirmed
    };
    let x = chart.eval_point(uv[0], uv[1]).map_err(|e| e.to_string())?;
    Ok(CuspRecord {
        component: c,
        chart: pi.chart,
        uv,
        x,
        sign,
        normal_form_sign: -sign,
        sampled_sign,
        t_residual: t.abs(),
        tangency,
        normal_form: nf,
        kernel: d.kernel,
        tangent: d.tangent,
        image: b0,
        status,
    })
}

/// Analyses the singular set of component `c` with the default zero
/// tolerance [`ZERO_TOL`].
pub fn analyze_singular_set(
    atlas: &Atlas,
    mesh: &Mesh,
    samples: &[NodeSample],
    c: Component,
) -> SingularAnalysis {
    analyze_singular_set_tol(atlas, mesh, samples, c, ZERO_TOL)
}

/// Analyses the singular set of component `c`: traces curves, classifies
/// points, locates cusps and checks (G₁)–(G₃). `tol` is the relative
/// tolerance below which `K ± K^N` counts as zero.
pub fn analyze_singular_set_tol(
    atlas: &Atlas,
    mesh: &Mesh,
    samples: &[NodeSample],
    c: Component,
    tol: f64,
) -> SingularAnalysis {
    let g1_nodes = node_g1_check(atlas, mesh, samples, c, tol);
    let mut curves = if g1_nodes.identically_zero {
        Vec::new()
    } else {
        trace_singular_set(atlas, mesh, samples, c, tol)
    };
    for curve in &mut curves {
        let n = curve.points.len();
        let pos: Vec<[f64; 4]> = curve.points.iter().map(|p| p.x).collect();
        let good: Vec<bool> = curve.points.iter().map(|p| !p.boundary).collect();
        let closed = curve.closed;
        // nearest refined neighbour on each side, else the point itself
        // (one-sided difference), else the adjacent point
        let neighbour = |i: usize, step: isize| -> usize {
            let at = |k: isize| -> Option<usize> {
                let j = i as isize + step * k;
                if closed {
                    Some(j.rem_euclid(n as isize) as usize)
                } else if j < 0 || j >= n as isize {
                    None
                } else {
                    Some(j as usize)
                }
            };
            (1..=4).filter_map(at).find(|&j| good[j]).unwrap_or(i)
        };
        let dirs: Vec<[f64; 4]> = (0..n)
            .map(|i| {
                let (mut a, mut b) = (neighbour(i, -1), neighbour(i, 1));
                if a == b {
                    a = if closed { (i + n - 1) % n } else { i.saturating_sub(1) };
                    b = if closed { (i + 1) % n } else { (i + 1).min(n - 1) };
                }
                std::array::from_fn(|k| pos[b][k] - pos[a][k])
            })
            .collect();
        let data: Vec<Option<PointData>> = curve
            .points
            .par_iter()
            .zip(dirs.par_iter())
            .map(|(p, d)| {
                if p.boundary {
                    None
                } else {
                    analyze_point(&atlas.charts[p.chart], p.uv, c, Some(*d)).ok()
                }
            })
            .collect();
        for (p, d) in curve.points.iter_mut().zip(data) {
            p.data = d;
        }
    }

    // cusp candidates: sign changes of t between consecutive analysed points
    let mut cands = Vec::new();
    let mut unresolved = Vec::new();
    for (ci, curve) in curves.iter().enumerate() {
        let np = curve.points.len();
        // points with t already at the cusp tolerance are skipped; the
        // bracketing neighbours then refine onto them
        let idx: Vec<usize> = (0..np)
            .filter(|&i| curve.points[i].data.is_some_and(|d| d.t.abs() > CUSP_T_TOL))
            .collect();
        let m = idx.len();
        let pairs = if curve.closed { m } else { m.saturating_sub(1) };
        for r in 0..pairs {
            let (i, j) = (idx[r], idx[(r + 1) % m]);
            let (di, dj) = (curve.points[i].data.unwrap(), curve.points[j].data.unwrap());
            let s = if dot4(&di.kernel4, &dj.kernel4) < 0.0 { -1.0 } else { 1.0 };
            if di.t * dj.t * s < 0.0 {
                let between = |k: usize| (i + k) % np;
                let gap = (j + np - i) % np;
                let contiguous = (0..=gap).all(|k| {
                    let p = &curve.points[between(k)];
                    p.data.is_some() && p.chart == curve.points[i].chart
                });
                if contiguous {
                    cands.push((ci, i, j));
                } else {
                    unresolved.push(UnresolvedCandidate {
                        curve: ci,
                        index: i,
                        reason: "sign change of t across a chart boundary or an unevaluable stretch"
                            .into(),
                    });
                }
            }
        }
    }
    let results: Vec<Result<CuspRecord, String>> =
        cands.par_iter().map(|&(ci, i, j)| refine_cusp(atlas, &curves[ci], i, j, c)).collect();
    let mut cusps = Vec::new();
    for (r, &(ci, i, _)) in results.into_iter().zip(&cands) {
        match r {
            Ok(rec) => cusps.push(rec),
            Err(reason) => unresolved.push(UnresolvedCandidate { curve: ci, index: i, reason }),
        }
    }

    // (G1) over curve points
    let mut g1 = g1_nodes;
    for curve in &curves {
        for p in &curve.points {
            if let Some(d) = &p.data {
                if d.gradient_norm < g1.min_gradient {
                    g1.min_gradient = d.gradient_norm;
                    g1.witness = Some((p.chart, p.uv));
                }
            }
        }
    }
    for (chart, uv, g) in critical_points_on_curves(atlas, &curves, c) {
        g1.critical_points += 1;
        if g < g1.min_gradient {
            g1.min_gradient = g;
            g1.witness = Some((chart, uv));
        }
    }
    if g1.min_gradient < G1_THRESHOLD || g1.critical_points > 0 {
        g1.gradient_vanishes = true;
    }
    g1.pass = !g1.gradient_vanishes && !g1.identically_zero;

    // (G2)
    let mut folds = 0;
    let mut mismatches = 0;
    for curve in &curves {
        for d in curve.points.iter().filter_map(|p| p.data.as_ref()) {
            if d.is_fold_by_kernel() {
                folds += 1;
            }
            if d.is_fold_by_kernel() != d.is_fold_by_q() {
                mismatches += 1;
            }
        }
    }
    let degenerate = cusps
        .iter()
        .filter(|r| {
            matches!(r.status, CuspStatus::DegenerateTangency | CuspStatus::DegenerateNormalForm)
        })
        .count();
    let g2 = G2Report {
        pass: g1.pass && degenerate == 0 && unresolved.is_empty(),
        folds,
        cusps: cusps.len(),
        criterion_mismatches: mismatches,
        degenerate,
        unresolved: unresolved.len(),
    };
    let g3 = check_g3(&curves, &cusps);
    SingularAnalysis { component: c, curves, cusps, unresolved, g1, g2, g3 }
}

/// Critical points of `f = K ± K^N` on the zero set near the traced curves.
///
/// Sampling the gradient can step over a crossing of two branches, where
/// `∇f` vanishes only at an isolated point. Newton iteration on `∇f = 0` is
/// started from the local minima of the normalized gradient along each
/// curve and kept within a few point spacings of its seed; a limit where
/// `f` is numerically zero is reported with its normalized gradient.
fn critical_points_on_curves(
    atlas: &Atlas,
    curves: &[SingularCurve],
    c: Component,
) -> Vec<(usize, [f64; 2], f64)> {
    let mut seeds: Vec<(f64, usize, [f64; 2], f64)> = Vec::new();
    for curve in curves {
        let n = curve.points.len();
        let at = |i: isize| -> Option<&CurvePoint> {
            let j = if curve.closed { i.rem_euclid(n as isize) } else { i };
            (0..n as isize).contains(&j).then(|| &curve.points[j as usize])
        };
        for i in 0..n as isize {
            let p = &curve.points[i as usize];
            let Some(d) = &p.data else { continue };
            let mut minimum = true;
            let mut reach: f64 = 0.0;
            for q in [at(i - 1), at(i + 1)].into_iter().flatten() {
                if q.chart == p.chart {
                    reach = reach.max((q.uv[0] - p.uv[0]).hypot(q.uv[1] - p.uv[1]));
                }
                if q.data.is_some_and(|e| e.gradient_norm < d.gradient_norm) {
                    minimum = false;
                }
            }
            if minimum && reach > 0.0 {
                seeds.push((d.gradient_norm, p.chart, p.uv, 4.0 * reach));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(G1_SEEDS);
    let found: Vec<(usize, [f64; 2], f64)> = seeds
        .par_iter()
        .filter_map(|&(_, chart, uv, reach)| {
            let ch = &atlas.charts[chart];
            let mut p = uv;
            for _ in 0..30 {
                let inv = invariants_jets_at(ch, p[0], p[1], 2).ok()?;
                let f = inv.singular_function(c);
                let (g, h) = (f.gradient(), f.hessian());
                let hn = (h[0][0].powi(2) + 2.0 * h[0][1].powi(2) + h[1][1].powi(2)).sqrt();
                let curv = inv.curvatures();
                let level = f.value().abs() / (1.0 + curv.k.abs() + curv.kn.abs());
                let gn = norm(&g) / (1.0 + hn);
                if gn < 1e-3 * G1_THRESHOLD {
                    return (level <= G1_LEVEL_TOL).then_some((chart, p, gn));
                }
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                if det.abs() <= 1e-14 * (1.0 + hn * hn) {
                    return None;
                }
                p = [
                    p[0] - (h[1][1] * g[0] - h[0][1] * g[1]) / det,
                    p[1] - (h[0][0] * g[1] - h[1][0] * g[0]) / det,
                ];
                if (p[0] - uv[0]).hypot(p[1] - uv[1]) > reach || !ch.contains(p[0], p[1]) {
                    return None;
                }
            }
            None
        })
        .collect();
    let mut unique: Vec<(usize, [f64; 2], f64)> = Vec::new();
    for q in found {
        if !unique.iter().any(|u| u.0 == q.0 && (u.1[0] - q.1[0]).hypot(u.1[1] - q.1[1]) < 1e-7) {
            unique.push(q);
        }
    }
    unique
}

/// (G₁) pre-check at mesh nodes where `K ± K^N` is numerically zero.
fn node_g1_check(atlas: &Atlas, mesh: &Mesh, samples: &[NodeSample], c: Component, tol: f64) -> G1Report {
    let mut near = Vec::new();
    let mut finite = 0;
    for (k, s) in samples.iter().enumerate() {
        if !mesh.nodes[k].interior || !s.k.is_finite() {
            continue;
        }
        finite += 1;
        if singular_value(s, c).abs() <= tol * scale_of(s) {
            near.push(k);
        }
    }
    let identically_zero = finite > 0 && near.len() == finite;
    const CAP: usize = 2000;
    let stride = (near.len() / CAP).max(1);
    let checked: Vec<(f64, usize)> = near
        .iter()
        .step_by(stride)
        .collect::<Vec<_>>()
        .par_iter()
        .filter_map(|&&k| {
            let node = &mesh.nodes[k];
            let inv = invariants_jets_at(&atlas.charts[node.chart], node.uv[0], node.uv[1], 2).ok()?;
            let f = inv.singular_function(c);
            let g = f.gradient();
            let h = f.hessian();
            let hn = (h[0][0].powi(2) + 2.0 * h[0][1].powi(2) + h[1][1].powi(2)).sqrt();
            Some((norm(&g) / (1.0 + hn), k))
        })
        .collect();
    let mut rep = G1Report {
        pass: true,
        min_gradient: f64::INFINITY,
        witness: None,
        gradient_vanishes: false,
        identically_zero,
        critical_points: 0,
    };
    for (g, k) in checked {
        if g < rep.min_gradient {
            rep.min_gradient = g;
            rep.witness = Some((mesh.nodes[k].chart, mesh.nodes[k].uv));
        }
    }
    rep
}

fn check_g3(curves: &[SingularCurve], cusps: &[CuspRecord]) -> G3Report {
    let tol = G3_TOL * SPHERE_RADIUS;
    // image segments between consecutive analysed neighbours
    struct Seg {
        curve: usize,
        index: usize,
        a: [f64; 3],
        b: [f64; 3],
    }
    let mut segs = Vec::new();
    for (ci, curve) in curves.iter().enumerate() {
        let n = curve.points.len();
        let pairs = if curve.closed { n } else { n.saturating_sub(1) };
        for i in 0..pairs {
            let j = (i + 1) % n;
            if let (Some(a), Some(b)) = (&curve.points[i].data, &curve.points[j].data) {
                segs.push(Seg { curve: ci, index: i, a: a.image, b: b.image });
            }
        }
    }
    let mut report = G3Report {
        pass: true,
        crossings: 0,
        min_angle: std::f64::consts::FRAC_PI_2,
        cusp_coincidences: 0,
        triple_points: 0,
        witnesses: Vec::new(),
    };
    if segs.is_empty() {
        return report;
    }
    // cusp neighbourhoods, by curve and point index
    let mut cusp_idx: Vec<(usize, usize)> = Vec::new();
    let mut own_idx: Vec<Option<(usize, usize)>> = Vec::new();
    for r in cusps {
        own_idx.push(None);
        for (ci, curve) in curves.iter().enumerate() {
            if let Some((i, _)) = curve
                .points
                .iter()
                .enumerate()
                .filter(|(_, p)| p.chart == r.chart)
                .min_by(|a, b| {
                    let da = (a.1.uv[0] - r.uv[0]).hypot(a.1.uv[1] - r.uv[1]);
                    let db = (b.1.uv[0] - r.uv[0]).hypot(b.1.uv[1] - r.uv[1]);
                    da.partial_cmp(&db).unwrap()
                })
            {
                let p = &curve.points[i];
                if (p.uv[0] - r.uv[0]).hypot(p.uv[1] - r.uv[1]) < 1e-2 {
                    cusp_idx.push((ci, i));
                    own_idx.last_mut().expect("pushed").get_or_insert((ci, i));
                }
            }
        }
    }
    let index_gap = |ca: usize, ia: usize, ib: usize| {
        let n = curves[ca].points.len();
        let d = ia.abs_diff(ib);
        if curves[ca].closed {
            d.min(n - d)
        } else {
            d
        }
    };
    const NEAR: usize = 3;
    const CUSP_WINDOW: usize = 8;
    let near_cusp = |c: usize, i: usize| {
        cusp_idx.iter().any(|&(cc, ii)| cc == c && index_gap(c, i, ii) <= CUSP_WINDOW)
    };
    let cell = segs.iter().map(|s| norm(&std::array::from_fn::<f64, 3, _>(|k| s.b[k] - s.a[k]))).fold(tol, f64::max);
    let key = |p: &[f64; 3]| p.map(|x| (x / cell).floor() as i64);
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (si, s) in segs.iter().enumerate() {
        let (ka, kb) = (key(&s.a), key(&s.b));
        for x in ka[0].min(kb[0])..=ka[0].max(kb[0]) {
            for y in ka[1].min(kb[1])..=ka[1].max(kb[1]) {
                for z in ka[2].min(kb[2])..=ka[2].max(kb[2]) {
                    grid.entry([x, y, z]).or_default().push(si);
                }
            }
        }
    }
    let candidates = |p: &[f64; 3]| {
        let k = key(p);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(l) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        out.extend_from_slice(l);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    };
    // crossings
    let mut crossings: Vec<([f64; 3], usize, usize)> = Vec::new();
    for (si, s) in segs.iter().enumerate() {
        let mid: [f64; 3] = std::array::from_fn(|k| 0.5 * (s.a[k] + s.b[k]));
        let nrm = mid.map(|x| x / norm(&mid));
        let d1: [f64; 3] = std::array::from_fn(|k| s.b[k] - s.a[k]);
        let l1 = norm(&d1);
        if l1 == 0.0 {
            continue;
        }
        let ex = d1.map(|x| x / l1);
        let ey = cross3(&nrm, &ex);
        let proj = |p: &[f64; 3]| {
            let r: [f64; 3] = std::array::from_fn(|k| p[k] - s.a[k]);
            [r.iter().zip(&ex).map(|(a, b)| a * b).sum::<f64>(), r.iter().zip(&ey).map(|(a, b)| a * b).sum::<f64>()]
        };
        for sj in candidates(&mid) {
            if sj <= si {
                continue;
            }
            let o = &segs[sj];
            if o.curve == s.curve && index_gap(s.curve, s.index, o.index) <= NEAR {
                continue;
            }
            if near_cusp(s.curve, s.index) && near_cusp(o.curve, o.index) {
                continue;
            }
            let (pa, pb) = (proj(&o.a), proj(&o.b));
            if pa[1] == pb[1] || (pa[1] > 0.0) == (pb[1] > 0.0) {
                // parallel or on one side; check tangential contact
                let dist = pa[1].abs().min(pb[1].abs());
                let inside = |p: [f64; 2]| p[0] >= 0.0 && p[0] <= l1;
                if dist < tol && (inside(pa) || inside(pb)) {
                    let d2 = [pb[0] - pa[0], pb[1] - pa[1]];
                    let ang = (d2[1] / norm(&d2)).abs().asin();
                    if ang < G3_MIN_ANGLE {
                        report.pass = false;
                        report.min_angle = report.min_angle.min(ang);
                        report.witnesses.push(mid);
                    }
                }
                continue;
            }
            let s0 = pa[1] / (pa[1] - pb[1]);
            let x = pa[0] + s0 * (pb[0] - pa[0]);
            if x < 0.0 || x > l1 {
                continue;
            }
            let d2 = [pb[0] - pa[0], pb[1] - pa[1]];
            let ang = (d2[1] / norm(&d2)).abs().asin();
            let point: [f64; 3] = std::array::from_fn(|k| s.a[k] + x * ex[k]);
            report.min_angle = report.min_angle.min(ang);
            if ang < G3_MIN_ANGLE {
                report.pass = false;
                report.witnesses.push(point);
            }
            crossings.push((point, si, sj));
        }
    }
    // merge duplicates of one crossing seen through neighbouring segments
    let same_branch = |a: usize, b: usize| {
        segs[a].curve == segs[b].curve && index_gap(segs[a].curve, segs[a].index, segs[b].index) <= 1
    };
    let mut unique: Vec<([f64; 3], Vec<usize>)> = Vec::new();
    for (p, a, b) in &crossings {
        let found = unique.iter_mut().find(|(q, br)| {
            norm(&std::array::from_fn::<f64, 3, _>(|k| p[k] - q[k])) < 10.0 * tol
                && br.iter().any(|&x| same_branch(x, *a) || same_branch(x, *b))
        });
        match found {
            Some((_, br)) => {
                for s in [*a, *b] {
                    if !br.iter().any(|&x| same_branch(x, s)) {
                        br.push(s);
                    }
                }
            }
            None => unique.push((*p, vec![*a, *b])),
        }
    }
    report.crossings = unique.len();
    for (p, br) in &unique {
        if br.len() >= 3 {
            report.triple_points += 1;
            report.pass = false;
            report.witnesses.push(*p);
        }
    }
    // cusp images on other branches
    for (r, own) in cusps.iter().zip(&own_idx) {
        for si in candidates(&r.image) {
            let s = &segs[si];
            if let Some((c, i)) = *own {
                if s.curve == c && index_gap(c, s.index, i) <= CUSP_WINDOW {
                    continue;
                }
            }
            let d: [f64; 3] = std::array::from_fn(|k| s.b[k] - s.a[k]);
            let r0: [f64; 3] = std::array::from_fn(|k| r.image[k] - s.a[k]);
            let l2 = d.iter().map(|x| x * x).sum::<f64>();
            let tpar = if l2 > 0.0 { (r0.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / l2).clamp(0.0, 1.0) } else { 0.0 };
            let dist = norm(&std::array::from_fn::<f64, 3, _>(|k| r0[k] - tpar * d[k]));
            if dist < tol {
                report.cusp_coincidences += 1;
                report.pass = false;
                report.witnesses.push(r.image);
                break;
            }
        }
    }
    report
}

/// Regularity scan of the full Gauss map over the mesh nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RankScan {
    pub nodes: usize,
    /// Nodes where the Gauss map differential has rank below two, with
    /// chart, parameters, `K` and `Δ`.
    pub rank_deficient: Vec<(usize, [f64; 2], f64, f64)>,
    /// Nodes where rank deficiency and `K = Δ = 0` disagree.
    pub characterization_mismatches: usize,
    /// Smallest `|K| + |Δ|` seen, with its location.
    pub min_k_delta: f64,
    pub min_location: Option<(usize, [f64; 2])>,
}

/// Scans node samples for rank drops of the Gauss map and checks that they
/// occur exactly where `K` and `Δ` both vanish.
pub fn rank_scan(mesh: &Mesh, samples: &[NodeSample]) -> RankScan {
    let mut out = RankScan {
        nodes: 0,
        rank_deficient: Vec::new(),
        characterization_mismatches: 0,
        min_k_delta: f64::INFINITY,
        min_location: None,
    };
    for (k, s) in samples.iter().enumerate() {
        let Some(rank) = s.rank else { continue };
        out.nodes += 1;
        let node = &mesh.nodes[k];
        let scale = 1.0 + s.h2;
        let flat = s.k.abs() <= ZERO_TOL * scale && s.delta.abs() <= ZERO_TOL * scale * scale;
        if rank < 2 {
            out.rank_deficient.push((node.chart, node.uv, s.k, s.delta));
        }
        if (rank < 2) != flat {
            out.characterization_mismatches += 1;
        }
        let m = s.k.abs() + s.delta.abs();
        if m < out.min_k_delta {
            out.min_k_delta = m;
            out.min_location = Some((node.chart, node.uv));
        }
    }
    out
}
