//! Surface description files.
//!
//! A surface file is TOML with named parameters, charts given by four
//! coordinate expressions, gluing entries and analysis options:
//!
//! ```toml
//! name = "sphere"
//!
//! [params]
//! r = 1.0
//!
//! [[charts]]
//! name = "upper"
//! coords = ["u", "v", "sqrt(r^2 - u^2 - v^2)", "0"]
//! orientation = 1
//! domain = { kind = "implicit", constraints = ["r^2 - u^2 - v^2"], radius = "r" }
//!
//! [[glue]]
//! from = "upper"
//! from_edge = "h0"
//! to = "lower"
//! to_edge = "h0"
//! map = ["u", "v"]
//! ```
//!
//! Numeric fields accept either numbers or expressions in the parameters.
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{Atlas, Chart, Domain, Edge, Glue};
use crate::exprlang::{parse, Expr, ExprError, Params};

/// Errors raised while loading a surface file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    /// Malformed TOML or unknown keys; the message carries the location.
    #[error("parse error: {0}")]
    Parse(String),
    /// An expression failed to parse or references an unknown parameter.
    #[error("in {context}: {source}")]
    Expr { context: String, source: ExprError },
    /// Structurally valid but inconsistent description.
    #[error("invalid surface: {0}")]
    Invalid(String),
}

/// A number or an expression in the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Expr(String),
}

impl Scalar {
    fn value(&self, params: &Params, context: &str) -> Result<f64, SurfaceError> {
        match self {
            Scalar::Num(x) => Ok(*x),
            Scalar::Expr(s) => {
                let e = parse_expr(s, params, context)?;
                e.eval(0.0, 0.0, params)
                    .map_err(|source| SurfaceError::Expr { context: context.into(), source })
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Num(x) => write!(f, "{x}"),
            Scalar::Expr(s) => write!(f, "{s}"),
        }
    }
}

/// Chart domain as written in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Rect { u: [Scalar; 2], v: [Scalar; 2] },
    Implicit {
        constraints: Vec<String>,
        #[serde(default = "origin")]
        center: [Scalar; 2],
        radius: Scalar,
    },
}

fn origin() -> [Scalar; 2] {
    [Scalar::Num(0.0), Scalar::Num(0.0)]
}

/// One chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub name: String,
    pub coords: [String; 4],
    #[serde(default = "plus_one")]
    pub orientation: i8,
    pub domain: DomainSpec,
}

fn plus_one() -> i8 {
    1
}

/// One gluing entry; `map` gives the target coordinates as affine
/// expressions in the source coordinates `u`, `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueSpec {
    pub from: String,
    pub from_edge: String,
    pub to: String,
    pub to_edge: String,
    pub map: [String; 2],
}

/// Analysis options with their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Grid resolution per chart.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Relative tolerance below which `K ± K^N` counts as zero.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

/// Default grid resolution.
pub const DEFAULT_GRID: usize = 256;
/// Default zero tolerance of the singular-set analysis.
pub const DEFAULT_TOL: f64 = crate::singular::ZERO_TOL;

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for Options {
    fn default() -> Self {
        Options { grid: DEFAULT_GRID, tol: DEFAULT_TOL }
    }
}

/// Parsed surface file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub name: String,
    /// Free-form hint such as `closed` or `open`; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology_hint: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub charts: Vec<ChartSpec>,
    #[serde(default)]
    pub glue: Vec<GlueSpec>,
    #[serde(default)]
    pub options: Options,
    /// Reference values to print next to computed ones (e.g. literature
    /// counts); never used in computations.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, f64>,
}

fn parse_expr(src: &str, params: &Params, context: &str) -> Result<Expr, SurfaceError> {
    let e = parse(src).map_err(|source| SurfaceError::Expr { context: context.into(), source })?;
    let mut names = Vec::new();
    e.param_names(&mut names);
    if let Some(n) = names.into_iter().find(|n| !params.contains_key(n)) {
        return Err(SurfaceError::Expr {
            context: context.into(),
            source: ExprError::UnknownIdentifier(n),
        });
    }
    e.bind(params).map_err(|source| SurfaceError::Expr { context: context.into(), source })
}

impl SurfaceFile {
    /// Parses TOML text.
    pub fn parse(text: &str) -> Result<SurfaceFile, SurfaceError> {
        toml::from_str(text).map_err(|e| SurfaceError::Parse(e.to_string()))
    }

    /// Serializes back to TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("surface files always serialize")
    }

    /// Overrides parameters; unknown names are rejected.
    pub fn set_params(&mut self, overrides: &[(String, f64)]) -> Result<(), SurfaceError> {
        for (k, v) in overrides {
            match self.params.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    return Err(SurfaceError::Invalid(format!("unknown parameter `{k}`")));
                }
            }
        }
        Ok(())
    }

    /// Builds the atlas with parameters bound.
    pub fn atlas(&self) -> Result<Atlas, SurfaceError> {
        let params: Params = self.params.clone();
        let mut charts = Vec::with_capacity(self.charts.len());
        for (ci, c) in self.charts.iter().enumerate() {
            let ctx = |what: &str| format!("chart `{}` {what}", c.name);
            if charts.iter().any(|d: &Chart| d.name == c.name) {
                return Err(SurfaceError::Invalid(format!("duplicate chart name `{}`", c.name)));
            }
            let mut coords = Vec::with_capacity(4);
            for (k, s) in c.coords.iter().enumerate() {
                coords.push(parse_expr(s, &params, &ctx(&format!("coordinate {}", k + 1)))?);
            }
            if c.orientation != 1 && c.orientation != -1 {
                return Err(SurfaceError::Invalid(format!(
                    "chart #{ci} orientation must be 1 or -1"
                )));
            }
            let domain = match &c.domain {
                DomainSpec::Rect { u, v } => {
                    let u = [u[0].value(&params, &ctx("domain"))?, u[1].value(&params, &ctx("domain"))?];
                    let v = [v[0].value(&params, &ctx("domain"))?, v[1].value(&params, &ctx("domain"))?];
                    if !(u[0] < u[1] && v[0] < v[1]) {
                        return Err(SurfaceError::Invalid(ctx("has an empty rectangle")));
                    }
                    Domain::Rect { u, v }
                }
                DomainSpec::Implicit { constraints, center, radius } => {
                    if constraints.is_empty() {
                        return Err(SurfaceError::Invalid(ctx("has no constraints")));
                    }
                    let cs = constraints
                        .iter()
                        .map(|s| parse_expr(s, &params, &ctx("constraint")))
                        .collect::<Result<Vec<_>, _>>()?;
                    Domain::Implicit {
                        constraints: cs,
                        center: [
                            center[0].value(&params, &ctx("center"))?,
                            center[1].value(&params, &ctx("center"))?,
                        ],
                        radius: radius.value(&params, &ctx("radius"))?,
                    }
                }
            };
            let coords: [Expr; 4] = coords.try_into().expect("four coordinates");
            charts.push(Chart { name: c.name.clone(), coords, domain, orientation: c.orientation });
        }
        let find = |n: &str| {
            charts
                .iter()
                .position(|c| c.name == n)
                .ok_or_else(|| SurfaceError::Invalid(format!("glue refers to unknown chart `{n}`")))
        };
        let mut glue = Vec::new();
        for g in &self.glue {
            let from = find(&g.from)?;
            let to = find(&g.to)?;
            let edge = |s: &str| {
                Edge::parse(s).ok_or_else(|| SurfaceError::Invalid(format!("unknown edge `{s}`")))
            };
            let from_edge = edge(&g.from_edge)?;
            let to_edge = edge(&g.to_edge)?;
            let ctx = format!("glue {} -> {}", g.from, g.to);
            let mu = parse_expr(&g.map[0], &params, &ctx)?;
            let mv = parse_expr(&g.map[1], &params, &ctx)?;
            let ev = |e: &Expr, u: f64, v: f64| {
                e.eval(u, v, &params)
                    .map_err(|source| SurfaceError::Expr { context: ctx.clone(), source })
            };
            let t = [ev(&mu, 0.0, 0.0)?, ev(&mv, 0.0, 0.0)?];
            let a = [
                [ev(&mu, 1.0, 0.0)? - t[0], ev(&mu, 0.0, 1.0)? - t[0]],
                [ev(&mv, 1.0, 0.0)? - t[1], ev(&mv, 0.0, 1.0)? - t[1]],
            ];
            // affinity check at an off-axis point
            for (e, row, ti) in [(&mu, a[0], t[0]), (&mv, a[1], t[1])] {
                let (pu, pv) = (0.37, -1.21);
                let lin = row[0] * pu + row[1] * pv + ti;
                if (ev(e, pu, pv)? - lin).abs() > 1e-9 * (1.0 + lin.abs()) {
                    return Err(SurfaceError::Invalid(format!("{ctx}: map is not affine")));
                }
            }
            glue.push(Glue { from, from_edge, to, to_edge, a, t });
        }
        let atlas = Atlas { name: self.name.clone(), charts, glue, params };
        let edges = atlas.boundary_edges();
        for g in &atlas.glue {
            for (c, e) in [(g.from, g.from_edge), (g.to, g.to_edge)] {
                if !edges.contains(&(c, e)) {
                    return Err(SurfaceError::Invalid(format!(
                        "chart `{}` has no edge `{}`",
                        atlas.charts[c].name,
                        e.name()
                    )));
                }
            }
        }
        Ok(atlas)
    }
}
