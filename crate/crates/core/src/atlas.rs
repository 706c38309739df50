//! Charts, domains and gluing data for parametrized surfaces in R⁴.
//!
//! A [`Chart`] is a map `(u, v) ↦ x(u, v) ∈ R⁴` given by four expressions on
//! a domain that is either a closed rectangle or an open region
//! `{h₁ > 0, h₂ > 0, ...}` star-shaped about a centre. An [`Atlas`] is a list
//! of charts plus affine gluing maps identifying boundary edges.

use thiserror::Error;

use crate::exprlang::{Expr, ExprError, Params};
use crate::jets::{Jet2, JetError};

/// Errors raised by chart evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtlasError {
    /// The point lies outside the chart domain.
    #[error("point ({u}, {v}) lies outside the domain of chart `{chart}`")]
    OutOfDomain { chart: String, u: f64, v: f64 },
    /// Expression evaluation failed.
    #[error(transparent)]
    Expr(#[from] ExprError),
    /// The parametrization is not an immersion at the point.
    #[error("chart `{chart}` is not immersive at ({u}, {v})")]
    NotImmersive { chart: String, u: f64, v: f64 },
    /// Inconsistent atlas description.
    #[error("invalid atlas: {0}")]
    Invalid(String),
}

impl From<JetError> for AtlasError {
    fn from(e: JetError) -> Self {
        AtlasError::Expr(ExprError::from(e))
    }
}

/// Chart domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Closed rectangle `[u0, u1] × [v0, v1]`.
    Rect { u: [f64; 2], v: [f64; 2] },
    /// Open region where every constraint is positive, star-shaped about
    /// `center` and contained in the disk of radius `radius` around it.
    Implicit { constraints: Vec<Expr>, center: [f64; 2], radius: f64 },
}

/// Identifies one boundary edge of a chart domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    UMin,
    UMax,
    VMin,
    VMax,
    /// Zero set of the constraint with this index.
    Constraint(usize),
}

impl Edge {
    /// Parses `u_min`, `u_max`, `v_min`, `v_max` or `h<k>` (constraint index).
    pub fn parse(s: &str) -> Option<Edge> {
        match s {
            "u_min" => Some(Edge::UMin),
            "u_max" => Some(Edge::UMax),
            "v_min" => Some(Edge::VMin),
            "v_max" => Some(Edge::VMax),
            _ => s.strip_prefix('h').and_then(|n| n.parse().ok()).map(Edge::Constraint),
        }
    }

    /// Inverse of [`Edge::parse`].
    pub fn name(&self) -> String {
        match self {
            Edge::UMin => "u_min".into(),
            Edge::UMax => "u_max".into(),
            Edge::VMin => "v_min".into(),
            Edge::VMax => "v_max".into(),
            Edge::Constraint(k) => format!("h{k}"),
        }
    }
}

/// A local parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub name: String,
    /// Coordinate expressions with parameters already bound.
    pub coords: [Expr; 4],
    pub domain: Domain,
    /// `+1` if `(∂u, ∂v)` is positively oriented for the surface, else `-1`.
    pub orientation: i8,
}

/// Affine identification `(u', v') = A (u, v) + t` from chart `from` to chart `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Glue {
    pub from: usize,
    pub from_edge: Edge,
    pub to: usize,
    pub to_edge: Edge,
    pub a: [[f64; 2]; 2],
    pub t: [f64; 2],
}

impl Glue {
    /// Maps a point of chart `from` into chart `to`.
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.a[0][0] * p[0] + self.a[0][1] * p[1] + self.t[0],
            self.a[1][0] * p[0] + self.a[1][1] * p[1] + self.t[1],
        ]
    }
}

/// Charts with gluing data.
#[derive(Debug, Clone, PartialEq)]
pub struct Atlas {
    pub name: String,
    pub charts: Vec<Chart>,
    pub glue: Vec<Glue>,
    pub params: Params,
}

impl Atlas {
    /// Index of the chart with the given name.
    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    /// All boundary edges of all charts.
    pub fn boundary_edges(&self) -> Vec<(usize, Edge)> {
        let mut out = Vec::new();
        for (ci, c) in self.charts.iter().enumerate() {
            match &c.domain {
                Domain::Rect { .. } => {
                    out.extend([Edge::UMin, Edge::UMax, Edge::VMin, Edge::VMax].map(|e| (ci, e)))
                }
                Domain::Implicit { constraints, .. } => {
                    out.extend((0..constraints.len()).map(|k| (ci, Edge::Constraint(k))))
                }
            }
        }
        out
    }

    /// Boundary edges not covered by any glue entry.
    pub fn unglued_edges(&self) -> Vec<(usize, Edge)> {
        self.boundary_edges()
            .into_iter()
            .filter(|&(c, e)| {
                !self
                    .glue
                    .iter()
                    .any(|g| (g.from == c && g.from_edge == e) || (g.to == c && g.to_edge == e))
            })
            .collect()
    }

    /// True if every boundary edge is glued.
    pub fn is_closed(&self) -> bool {
        self.unglued_edges().is_empty()
    }
}

impl Chart {
    /// True if the chart's first two coordinates are `u` and `v`, so that the
    /// chart is a graph over the coordinate plane.
    pub fn is_monge(&self) -> bool {
        self.coords[0] == Expr::U && self.coords[1] == Expr::V
    }

    /// Closed-domain membership for rectangles, open for implicit domains.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        match &self.domain {
            Domain::Rect { u: ur, v: vr } => {
                let eu = 1e-12 * (1.0 + ur[0].abs().max(ur[1].abs()));
                let ev = 1e-12 * (1.0 + vr[0].abs().max(vr[1].abs()));
                u >= ur[0] - eu && u <= ur[1] + eu && v >= vr[0] - ev && v <= vr[1] + ev
            }
            Domain::Implicit { constraints, .. } => constraints
                .iter()
                .all(|h| h.eval(u, v, &Params::new()).map(|x| x > 0.0).unwrap_or(false)),
        }
    }

    /// Values of the implicit constraints (empty for rectangles).
    pub fn constraint_values(&self, u: f64, v: f64) -> Result<Vec<f64>, ExprError> {
        match &self.domain {
            Domain::Rect { .. } => Ok(Vec::new()),
            Domain::Implicit { constraints, .. } => {
                constraints.iter().map(|h| h.eval(u, v, &Params::new())).collect()
            }
        }
    }

    fn out_of_domain(&self, u: f64, v: f64) -> AtlasError {
        AtlasError::OutOfDomain { chart: self.name.clone(), u, v }
    }

    /// Jets of the four coordinate functions about `(u, v)`.
    pub fn eval_jets(&self, u: f64, v: f64, order: usize) -> Result<[Jet2; 4], AtlasError> {
        if !self.contains(u, v) {
            return Err(self.out_of_domain(u, v));
        }
        let p = Params::new();
        let mut out = [Jet2::zero(order)?; 4];
        for (k, e) in self.coords.iter().enumerate() {
            out[k] = e.eval_jet(u, v, order, &p)?;
        }
        Ok(out)
    }

    /// Position `x(u, v)`.
    pub fn eval_point(&self, u: f64, v: f64) -> Result<[f64; 4], AtlasError> {
        if !self.contains(u, v) {
            return Err(self.out_of_domain(u, v));
        }
        let p = Params::new();
        let mut out = [0.0; 4];
        for (k, e) in self.coords.iter().enumerate() {
            out[k] = e.eval(u, v, &p)?;
        }
        Ok(out)
    }
}

/// Jets of the chart coordinates about `(u, v)`; see [`Chart::eval_jets`].
pub fn eval_chart(chart: &Chart, u: f64, v: f64, order: usize) -> Result<[Jet2; 4], AtlasError> {
    chart.eval_jets(u, v, order)
}

/// Local graph form of a surface about a point: after translating the point
/// to the origin and applying `rotation`, the surface is
/// `(s, t, a(s, t), b(s, t))` with `a`, `b` vanishing to first order.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeChart {
    pub point: [f64; 4],
    /// Rows are an oriented orthonormal basis `(t₁, t₂, n₁, n₂)` of R⁴.
    pub rotation: [[f64; 4]; 4],
    pub a: Jet2,
    pub b: Jet2,
    /// The map `(s, t) ↦ (du, dv)` back to the original chart coordinates.
    pub reparam: [Jet2; 2],
}

/// Orthonormal frame from the tangent vectors `xu`, `xv` completed by the two
/// standard basis vectors least aligned with the tangent plane; the result is
/// positively oriented in R⁴.
pub fn complete_frame(xu: [f64; 4], xv: [f64; 4]) -> Option<[[f64; 4]; 4]> {
    let e1 = normalize(xu)?;
    let e2 = normalize(sub_proj(xv, &[e1]))?;
    let (ea, eb) = least_aligned(&e1, &e2);
    let e3 = normalize(sub_proj(unit(ea), &[e1, e2]))?;
    let mut e4 = normalize(sub_proj(unit(eb), &[e1, e2, e3]))?;
    if det4(&[e1, e2, e3, e4]) < 0.0 {
        e4 = e4.map(|x| -x);
    }
    Some([e1, e2, e3, e4])
}

/// Indices of the two standard basis vectors with the smallest tangential
/// projections, in increasing index order.
pub fn least_aligned(e1: &[f64; 4], e2: &[f64; 4]) -> (usize, usize) {
    let mut idx = [0usize, 1, 2, 3];
    let w = |k: usize| e1[k] * e1[k] + e2[k] * e2[k];
    idx.sort_by(|&a, &b| w(a).total_cmp(&w(b)).then(a.cmp(&b)));
    let (a, b) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
    (a, b)
}

fn unit(k: usize) -> [f64; 4] {
    let mut e = [0.0; 4];
    e[k] = 1.0;
    e
}

fn normalize(x: [f64; 4]) -> Option<[f64; 4]> {
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n < 1e-300 || !n.is_finite() {
        None
    } else {
        Some(x.map(|a| a / n))
    }
}

fn sub_proj(mut x: [f64; 4], basis: &[[f64; 4]]) -> [f64; 4] {
    for b in basis {
        let d: f64 = (0..4).map(|k| x[k] * b[k]).sum();
        for k in 0..4 {
            x[k] -= d * b[k];
        }
    }
    x
}

/// Determinant of the 4×4 matrix with the given rows.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for c in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for k in 0..4 {
                if k != c {
                    minor[r - 1][cc] = m[r][k];
                    cc += 1;
                }
            }
        }
        let d3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1])
            - minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0])
            + minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
        det += if c % 2 == 0 { 1.0 } else { -1.0 } * m[0][c] * d3;
    }
    det
}

/// Re-expresses the chart about `(u0, v0)` in local graph form up to `order`.
pub fn to_monge(chart: &Chart, u0: f64, v0: f64, order: usize) -> Result<MongeChart, AtlasError> {
    let x = chart.eval_jets(u0, v0, order)?;
    let xu = x.map(|j| j.coeff(1, 0));
    let xv = x.map(|j| j.coeff(0, 1));
    let not_immersive = || AtlasError::NotImmersive { chart: chart.name.clone(), u: u0, v: v0 };
    let mut frame = complete_frame(xu, xv).ok_or_else(not_immersive)?;
    if chart.orientation < 0 {
        frame[1] = frame[1].map(|a| -a);
        frame[3] = frame[3].map(|a| -a);
    }
    let point = x.map(|j| j.value());
    // y_k = <frame_k, x - p>
    let mut y = [Jet2::zero(order)?; 4];
    for k in 0..4 {
        let mut acc = Jet2::zero(order)?;
        for i in 0..4 {
            acc += x[i].with_value(0.0).scale(frame[k][i]);
        }
        y[k] = acc;
    }
    let l = [[y[0].coeff(1, 0), y[0].coeff(0, 1)], [y[1].coeff(1, 0), y[1].coeff(0, 1)]];
    let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
    if det.abs() < 1e-300 {
        return Err(not_immersive());
    }
    let li = [[l[1][1] / det, -l[0][1] / det], [-l[1][0] / det, l[0][0] / det]];
    let s = Jet2::var_u(0.0, order)?;
    let t = Jet2::var_v(0.0, order)?;
    // nonlinear parts of y1, y2
    let strip = |j: &Jet2| {
        let mut j = *j;
        if order >= 1 {
            j.set_coeff(1, 0, 0.0);
            j.set_coeff(0, 1, 0.0);
        }
        j
    };
    let n1 = strip(&y[0]);
    let n2 = strip(&y[1]);
    let mut phi = [s.scale(li[0][0]) + t.scale(li[0][1]), s.scale(li[1][0]) + t.scale(li[1][1])];
    for _ in 0..order {
        let r1 = s - n1.compose(&phi[0], &phi[1]);
        let r2 = t - n2.compose(&phi[0], &phi[1]);
        phi = [r1.scale(li[0][0]) + r2.scale(li[0][1]), r1.scale(li[1][0]) + r2.scale(li[1][1])];
    }
    let a = y[2].compose(&phi[0], &phi[1]);
    let b = y[3].compose(&phi[0], &phi[1]);
    Ok(MongeChart { point, rotation: frame, a, b, reparam: phi })
}
