//! Quadrature of invariant fields over a surface, mapping degrees of the
//! Gauss map components and geodesic curvature integrals of their fold
//! curves.
//!
//! Surface integrals use the composite midpoint rule on the mapped cells of
//! each chart's parameter grid (the same maps as the mesh): uniform cells on
//! rectangles, `(τ, σ)` cells of the polar map on implicit domains. Cell
//! centres never touch an implicit boundary, where charts may degenerate
//! like a square root. Charts of an atlas tile the surface along their
//! glued edges, so every cell has weight one. Each integral is evaluated at
//! resolutions `n`, `n/2` and `n/4`; the observed convergence ratio gives a
//! Richardson error estimate and a convergence flag.
//!
//! Reductions are pairwise over a fixed ordering, so results do not depend
//! on the thread count.

use std::f64::consts::TAU;

use rayon::prelude::*;
use thiserror::Error;

use crate::atlas::{Atlas, AtlasError, Chart};
use crate::frames::{connection_forms, darboux_frame};
use crate::gaussmap::{beta_jets, dgauss_components, svd2, Component, SPHERE_RADIUS};
use crate::invariants::{invariant_jets, Curvatures};
use crate::jets::JetError;
use crate::singular::{det3, norm, push4, SingularAnalysis};
use crate::topology::{ChartParam, TopologyError};

/// Largest accepted ratio between successive refinement differences; a
/// convergent rule of order at least one gives about `0.5` or less.
pub const CONVERGENCE_RATIO: f64 = 0.75;

/// Largest accepted distance of a mapping degree from an integer.
pub const DEGREE_TOL: f64 = 0.05;

/// Refinement differences below this fraction of the integral's magnitude
/// scale count as converged regardless of their ratio.
const NOISE_FLOOR: f64 = 1e-11;

/// Errors raised by quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    /// A closed surface is required.
    #[error("surface is not closed: {0} boundary edge(s) are not glued")]
    NotClosedSurface(usize),
    /// Refinement does not reduce the error.
    #[error("{what} did not converge: refinement ratio {ratio:.3}")]
    NonConvergent { what: String, ratio: f64 },
    /// Geodesic curvature is undefined where the curve's velocity vanishes.
    #[error("geodesic curvature undefined: curve velocity vanishes")]
    AtCusp,
    /// Grid too coarse for three refinement levels.
    #[error("grid resolution {0} is too small (need at least 8)")]
    GridTooSmall(usize),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

impl From<JetError> for IntegrateError {
    fn from(e: JetError) -> Self {
        IntegrateError::Atlas(AtlasError::from(e))
    }
}

/// Value of an integral with its estimated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub estimated_error: f64,
    /// Integrand evaluations at the finest level.
    pub samples: usize,
    /// Ratio of the last two refinement differences (`0` if negligible).
    pub ratio: f64,
    pub converged: bool,
}

impl QuadratureResult {
    /// The result, or `NonConvergent` if the refinement check failed.
    pub fn require_converged(self, what: &str) -> Result<Self, IntegrateError> {
        if self.converged {
            Ok(self)
        } else {
            Err(IntegrateError::NonConvergent { what: what.to_string(), ratio: self.ratio })
        }
    }
}

/// Combines three refinement levels (finest first) into a result.
/// `scale` is the magnitude against which differences are judged
/// negligible.
pub fn richardson(levels: [f64; 3], scale: f64, samples: usize) -> QuadratureResult {
    let d1 = (levels[0] - levels[1]).abs();
    let d2 = (levels[1] - levels[2]).abs();
    let floor = NOISE_FLOOR * scale.max(1.0);
    if d1 <= floor {
        return QuadratureResult { value: levels[0], estimated_error: d1, samples, ratio: 0.0, converged: true };
    }
    let ratio = if d2 > 0.0 { d1 / d2 } else { f64::INFINITY };
    let converged = ratio <= CONVERGENCE_RATIO;
    // observed order, clamped to a sensible range
    let p = if converged { (-ratio.log2()).clamp(1.0, 4.0) } else { 1.0 };
    let estimated_error = d1 / (2f64.powf(p) - 1.0);
    QuadratureResult { value: levels[0], estimated_error, samples, ratio, converged }
}

/// Pairwise sum over a fixed ordering.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// A quadrature node: chart, parameter point and parameter-space weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub chart: usize,
    pub uv: [f64; 2],
    pub weight: f64,
}

/// Midpoint cells of all charts at resolution `n`.
pub fn midpoint_cells(atlas: &Atlas, n: usize) -> Result<Vec<Cell>, TopologyError> {
    let mut cells = Vec::new();
    for (ci, chart) in atlas.charts.iter().enumerate() {
        match ChartParam::new(chart) {
            ChartParam::Rect { u, v } => {
                let (du, dv) = ((u[1] - u[0]) / n as f64, (v[1] - v[0]) / n as f64);
                for j in 0..n {
                    for i in 0..n {
                        let uv = [u[0] + (i as f64 + 0.5) * du, v[0] + (j as f64 + 0.5) * dv];
                        cells.push(Cell { chart: ci, uv, weight: du * dv });
                    }
                }
            }
            ChartParam::Polar(pm) => {
                if !pm.fits_radius() {
                    return Err(TopologyError::DomainExceedsRadius(chart.name.clone()));
                }
                let ns = n.max(4);
                for (seg, k) in pm.segments.iter().zip(pm.segment_cells(n)) {
                    for m in 0..k {
                        let (phi, dphi) = pm.phi(seg, (m as f64 + 0.5) / k as f64);
                        let rb = pm.boundary_radius(phi);
                        for j in 0..ns {
                            let sigma = (j as f64 + 0.5) / ns as f64;
                            let (uv, rho, drho) = pm.point(phi, rb, sigma);
                            let weight = rho * drho * dphi / (k * ns) as f64;
                            cells.push(Cell { chart: ci, uv, weight });
                        }
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// Invariants and area element at a point.
fn local_values(chart: &Chart, uv: [f64; 2]) -> Result<(Curvatures, f64), IntegrateError> {
    let f = darboux_frame(chart, uv[0], uv[1], 2)?;
    let cf = connection_forms(&f)?;
    let c = invariant_jets(&cf)?.curvatures();
    let xu = f.xu.map(|j| j.value());
    let xv = f.xv.map(|j| j.value());
    let guu: f64 = xu.iter().map(|a| a * a).sum();
    let gvv: f64 = xv.iter().map(|a| a * a).sum();
    let guv: f64 = xu.iter().zip(&xv).map(|(a, b)| a * b).sum();
    Ok((c, (guu * gvv - guv * guv).max(0.0).sqrt()))
}

/// Integrands available to [`integrate_surface`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Area,
    K,
    KN,
    /// `|K ± K^N|`.
    AbsSingular(Component),
    /// `J(gᵢ) = (K ± K^N)/2`.
    Jacobian(Component),
}

impl Field {
    /// All fields in report order.
    pub const ALL: [Field; 7] = [
        Field::Area,
        Field::K,
        Field::KN,
        Field::AbsSingular(Component::One),
        Field::AbsSingular(Component::Two),
        Field::Jacobian(Component::One),
        Field::Jacobian(Component::Two),
    ];

    /// Integrand value from the invariants.
    pub fn eval(self, c: &Curvatures) -> f64 {
        match self {
            Field::Area => 1.0,
            Field::K => c.k,
            Field::KN => c.kn,
            Field::AbsSingular(i) => c.singular_function(i).abs(),
            Field::Jacobian(i) => c.jacobian(i),
        }
    }
}

/// One level of all fields: sums and magnitude scales.
fn level(atlas: &Atlas, n: usize) -> Result<(Vec<f64>, Vec<f64>, usize), IntegrateError> {
    let cells = midpoint_cells(atlas, n)?;
    let vals: Vec<[f64; 7]> = cells
        .par_iter()
        .map(|cell| {
            let (c, da) = local_values(&atlas.charts[cell.chart], cell.uv)?;
            let w = da * cell.weight;
            Ok(Field::ALL.map(|f| f.eval(&c) * w))
        })
        .collect::<Result<_, IntegrateError>>()?;
    let mut sums = Vec::with_capacity(7);
    let mut scales = Vec::with_capacity(7);
    let mut col = vec![0.0; vals.len()];
    for k in 0..7 {
        for (c, v) in col.iter_mut().zip(&vals) {
            *c = v[k];
        }
        sums.push(pairwise_sum(&col));
        col.iter_mut().for_each(|c| *c = c.abs());
        scales.push(pairwise_sum(&col));
    }
    Ok((sums, scales, cells.len()))
}

/// Integrals of all [`Field`]s over the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceIntegrals {
    pub grid: usize,
    pub results: Vec<(Field, QuadratureResult)>,
}

impl SurfaceIntegrals {
    /// Result for one field.
    pub fn get(&self, field: Field) -> QuadratureResult {
        self.results.iter().find(|(f, _)| *f == field).map(|(_, r)| *r).expect("all fields are integrated")
    }
}

/// Integrates every [`Field`] at resolutions `n`, `n/2`, `n/4`.
pub fn integrate_all(atlas: &Atlas, n: usize) -> Result<SurfaceIntegrals, IntegrateError> {
    if n < 8 {
        return Err(IntegrateError::GridTooSmall(n));
    }
    let (s0, scale, samples) = level(atlas, n)?;
    let (s1, _, _) = level(atlas, n / 2)?;
    let (s2, _, _) = level(atlas, n / 4)?;
    let results = Field::ALL
        .iter()
        .enumerate()
        .map(|(k, &f)| (f, richardson([s0[k], s1[k], s2[k]], scale[k], samples)))
        .collect();
    Ok(SurfaceIntegrals { grid: n, results })
}

/// Integral of one field over the surface.
pub fn integrate_surface(atlas: &Atlas, field: Field, n: usize) -> Result<QuadratureResult, IntegrateError> {
    Ok(integrate_all(atlas, n)?.get(field))
}

/// Mapping degree of a Gauss map component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree {
    /// `∫J(gᵢ) dA / 2π`.
    pub value: QuadratureResult,
    pub rounded: i64,
    /// True if `value` lies within [`DEGREE_TOL`] of `rounded`.
    pub integral: bool,
}

impl Degree {
    /// Degree from the integral of the Jacobian.
    pub fn from_jacobian_integral(j: QuadratureResult) -> Degree {
        let value = QuadratureResult {
            value: j.value / TAU,
            estimated_error: j.estimated_error / TAU,
            ..j
        };
        let rounded = value.value.round() as i64;
        Degree { value, rounded, integral: (value.value - rounded as f64).abs() < DEGREE_TOL }
    }
}

/// Checks that the atlas describes a closed surface.
pub fn require_closed(atlas: &Atlas) -> Result<(), IntegrateError> {
    let open = atlas.unglued_edges().len();
    if open > 0 {
        Err(IntegrateError::NotClosedSurface(open))
    } else {
        Ok(())
    }
}

/// Degree of `gᵢ` as `∫J(gᵢ) dA / 2π` (each component sphere has area `2π`).
pub fn mapping_degree(atlas: &Atlas, c: Component, n: usize) -> Result<Degree, IntegrateError> {
    require_closed(atlas)?;
    Ok(Degree::from_jacobian_integral(integrate_surface(atlas, Field::Jacobian(c), n)?))
}

/// Geodesic curvature `det[c, c', c''] / (R |c'|³)` of a curve on the sphere
/// of radius `R` about the origin, positive when turning left about the
/// outward normal.
pub fn geodesic_curvature(c: [f64; 3], c1: [f64; 3], c2: [f64; 3]) -> Result<f64, IntegrateError> {
    let s = norm(&c1);
    if s <= 1e-14 * norm(&c).max(1.0) {
        return Err(IntegrateError::AtCusp);
    }
    Ok(det3(&c, &c1, &c2) / (SPHERE_RADIUS * s * s * s))
}

/// Geodesic curvature data at a fold point of `gᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldCurvature {
    /// `κ_g` of the image curve oriented with the image on its left.
    pub kappa_g: f64,
    /// `κ_g dτ` per unit surface arclength of the source curve.
    pub density: f64,
    /// `+1` if the image lies left of the image of the direction
    /// `(-∂_v f, ∂_u f)` along the curve, `-1` otherwise.
    pub side: i8,
}

/// Geodesic curvature of the image of the singular curve of `gᵢ` through a
/// fold point. Derivatives are exact: the source curve's velocity and
/// acceleration come from the jets of `K ± K^N`, those of the image from
/// the jets of `gᵢ`.
pub fn fold_curvature(chart: &Chart, uv: [f64; 2], c: Component) -> Result<FoldCurvature, IntegrateError> {
    let f = darboux_frame(chart, uv[0], uv[1], 4)?;
    let cf = connection_forms(&f)?;
    let fj = invariant_jets(&cf)?.singular_function(c);
    let g = fj.gradient();
    let h = fj.hessian();
    let gn = norm(&g);
    if gn == 0.0 {
        return Err(IntegrateError::AtCusp);
    }
    let t = [-g[1] / gn, g[0] / gn];
    // acceleration of the level curve parameterized by uv arclength
    let tht = t[0] * t[0] * h[0][0] + 2.0 * t[0] * t[1] * h[0][1] + t[1] * t[1] * h[1][1];
    let acc = [-tht * g[0] / (gn * gn), -tht * g[1] / (gn * gn)];
    let beta = beta_jets(&f, c);
    let b0 = beta.map(|j| j.value());
    let bu = beta.map(|j| j.coeff(1, 0));
    let bv = beta.map(|j| j.coeff(0, 1));
    let d1 = |d: [f64; 2]| -> [f64; 3] { std::array::from_fn(|i| bu[i] * d[0] + bv[i] * d[1]) };
    let d2 = |d: [f64; 2]| -> [f64; 3] {
        std::array::from_fn(|i| {
            let j = &beta[i];
            2.0 * (j.coeff(2, 0) * d[0] * d[0] + j.coeff(1, 1) * d[0] * d[1] + j.coeff(0, 2) * d[1] * d[1])
        })
    };
    let c1 = d1(t);
    let dacc = d1(acc);
    let ctt = d2(t);
    let c2: [f64; 3] = std::array::from_fn(|i| ctt[i] + dacc[i]);
    let kappa = geodesic_curvature(b0, c1, c2)?;
    // the image lies on the side of the second derivative along the kernel
    let (d1g, d2g) = dgauss_components(&cf);
    let (_, _, k) = svd2(if c == Component::One { &d1g } else { &d2g });
    let q = det3(&b0, &c1, &d2(k));
    let side: i8 = if q >= 0.0 { 1 } else { -1 };
    let x4 = push4(&f.xu.map(|j| j.value()), &f.xv.map(|j| j.value()), t);
    let speed = norm(&c1) / norm(&x4);
    let kappa_g = side as f64 * kappa;
    Ok(FoldCurvature { kappa_g, density: kappa_g * speed, side })
}

/// `∫κ_g dτ` over the fold curves of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveIntegral {
    pub component: Component,
    /// Extrapolated to vanishing cusp neighbourhoods.
    pub value: QuadratureResult,
    /// Integral over whole curves, cusp neighbourhoods included.
    pub raw: f64,
    /// Radius (surface distance) of the smallest excluded cusp neighbourhood.
    pub epsilon: f64,
    /// Integrals excluding neighbourhoods of radius `ε`, `2ε`, `4ε`.
    pub shells: [f64; 3],
    /// Per curve: integral over the whole curve.
    pub per_curve: Vec<f64>,
    /// Curve points where the density could not be evaluated.
    pub skipped: usize,
}

/// Arclength integral of `κ_g` along the fold images of `gᵢ`, oriented
/// with the image on the left.
///
/// The density `κ_g dτ / ds` (`s` the surface arclength of the source curve)
/// stays bounded at cusps, so the trapezoid rule in `s` applies. Cusp
/// neighbourhoods of radius `ε`, `2ε`, `4ε` are excluded and the results
/// extrapolated linearly to `ε → 0`; the refinement ratio of the shells
/// decides convergence.
pub fn curve_integral_kg(atlas: &Atlas, analysis: &SingularAnalysis) -> CurveIntegral {
    let c = analysis.component;
    let mut centres: Vec<[f64; 4]> = analysis.cusps.iter().map(|r| r.x).collect();
    for u in &analysis.unresolved {
        centres.push(analysis.curves[u.curve].points[u.index].x);
    }
    // (x, density) for each evaluable point, per curve
    let curves: Vec<(Vec<([f64; 4], f64)>, bool, usize)> = analysis
        .curves
        .iter()
        .map(|curve| {
            let vals: Vec<Option<([f64; 4], f64)>> = curve
                .points
                .par_iter()
                .map(|p| {
                    if p.boundary {
                        return None;
                    }
                    fold_curvature(&atlas.charts[p.chart], p.uv, c).ok().map(|fc| (p.x, fc.density))
                })
                .collect();
            let skipped = vals.iter().filter(|v| v.is_none()).count();
            (vals.into_iter().flatten().collect(), curve.closed, skipped)
        })
        .collect();
    let dist = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let mut lengths = Vec::new();
    for (pts, closed, _) in &curves {
        for w in pts.windows(2) {
            lengths.push(dist(&w[0].0, &w[1].0));
        }
        if *closed && pts.len() > 1 {
            lengths.push(dist(&pts[0].0, &pts[pts.len() - 1].0));
        }
    }
    lengths.sort_by(|a, b| a.total_cmp(b));
    let h = lengths.get(lengths.len() / 2).copied().unwrap_or(0.0);
    let epsilon = 4.0 * h;
    // trapezoid sum with the parts of segments inside radius r of a cusp
    // removed exactly; with `stride` 2 every other point is used
    let integrate = |r: f64, stride: usize| -> (f64, Vec<f64>) {
        let per: Vec<f64> = curves
            .iter()
            .map(|(pts, closed, _)| {
                let sel: Vec<&([f64; 4], f64)> = pts.iter().step_by(stride).collect();
                let mut terms = Vec::with_capacity(sel.len());
                let n = sel.len();
                let segs = if *closed { n } else { n.saturating_sub(1) };
                for s in 0..segs {
                    let (a, b) = (sel[s], sel[(s + 1) % n]);
                    let len = dist(&a.0, &b.0);
                    let inside = if r > 0.0 { ball_intervals(&a.0, &b.0, &centres, r) } else { Vec::new() };
                    // ∫ of the linear density over [t0, t1] of the segment
                    let part = |t0: f64, t1: f64| {
                        let m = 0.5 * (t0 + t1);
                        (a.1 + m * (b.1 - a.1)) * (t1 - t0) * len
                    };
                    let mut total = part(0.0, 1.0);
                    for (t0, t1) in inside {
                        total -= part(t0, t1);
                    }
                    terms.push(total);
                }
                pairwise_sum(&terms)
            })
            .collect();
        (pairwise_sum(&per), per)
    };
    let (raw, per_curve) = integrate(0.0, 1);
    let skipped = curves.iter().map(|c| c.2).sum();
    if centres.is_empty() {
        let (coarse, _) = integrate(0.0, 2);
        let d = (raw - coarse).abs();
        let value = QuadratureResult {
            value: raw,
            estimated_error: d / 3.0,
            samples: lengths.len(),
            ratio: 0.0,
            converged: true,
        };
        return CurveIntegral { component: c, value, raw, epsilon: 0.0, shells: [raw; 3], per_curve, skipped };
    }
    let shells = [integrate(epsilon, 1).0, integrate(2.0 * epsilon, 1).0, integrate(4.0 * epsilon, 1).0];
    let extrapolated = 2.0 * shells[0] - shells[1];
    let d1 = (shells[0] - shells[1]).abs();
    let d2 = (shells[1] - shells[2]).abs();
    let floor = NOISE_FLOOR * raw.abs().max(1.0);
    let ratio = if d1 <= floor { 0.0 } else if d2 > 0.0 { d1 / d2 } else { f64::INFINITY };
    let value = QuadratureResult {
        value: extrapolated,
        estimated_error: (extrapolated - shells[0]).abs(),
        samples: lengths.len(),
        ratio,
        converged: ratio <= CONVERGENCE_RATIO,
    };
    CurveIntegral { component: c, value, raw, epsilon, shells, per_curve, skipped }
}

/// Disjoint parameter intervals of the segment `a + t(b - a)`, `t ∈ [0, 1]`,
/// lying inside balls of radius `r` about the centres.
fn ball_intervals(a: &[f64; 4], b: &[f64; 4], centres: &[[f64; 4]], r: f64) -> Vec<(f64, f64)> {
    let d: [f64; 4] = std::array::from_fn(|i| b[i] - a[i]);
    let dd: f64 = d.iter().map(|x| x * x).sum();
    let mut iv = Vec::new();
    for c in centres {
        let w: [f64; 4] = std::array::from_fn(|i| a[i] - c[i]);
        let ww: f64 = w.iter().map(|x| x * x).sum();
        let wd: f64 = w.iter().zip(&d).map(|(x, y)| x * y).sum();
        if dd == 0.0 {
            if ww < r * r {
                iv.push((0.0, 1.0));
            }
            continue;
        }
        // |w + t d|² = r²
        let disc = wd * wd - dd * (ww - r * r);
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let (t0, t1) = (((-wd - sq) / dd).max(0.0), ((-wd + sq) / dd).min(1.0));
        if t0 < t1 {
            iv.push((t0, t1));
        }
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (t0, t1) in iv {
        match merged.last_mut() {
            Some(last) if t0 <= last.1 => last.1 = last.1.max(t1),
            _ => merged.push((t0, t1)),
        }
    }
    merged
}
