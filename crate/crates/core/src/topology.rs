//! Parameter grids on chart domains, the glued triangle mesh of an atlas and
//! Euler characteristics of the surface and of sign regions.
//!
//! Rectangular domains use a uniform grid. Implicit domains use a polar grid
//! about their centre: the angle is split at the points where the active
//! boundary constraint changes and graded towards them with the smoothstep
//! `3τ² - 2τ³`, and the radius is `ρ = ρ_b(φ) (1 - (1 - σ)²)`. The squared
//! radial map makes surface spacing roughly uniform near boundaries where
//! the chart degenerates like a square root. Boundary nodes of implicit
//! domains are never evaluated; fields there are extrapolated along `σ`.

pub mod gb;

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::ops::Range;

use rayon::prelude::*;
use thiserror::Error;

use crate::atlas::{Atlas, Chart, Domain, Edge};
use crate::exprlang::{Expr, Params};
use crate::frames::{connection_forms, darboux_frame};
use crate::gaussmap::rank_dg;
use crate::invariants::invariant_jets;

pub use gb::{gauss_bonnet_report, region_characteristics, ComponentTally, GBReport, Identity};

/// Errors raised while building meshes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    /// Boundary nodes of two glued edges do not correspond.
    #[error("glue {from} -> {to}: {count} boundary nodes without a partner")]
    GlueMismatch { from: String, to: String, count: usize },
    /// Grid too coarse.
    #[error("grid resolution {0} is too small")]
    GridTooSmall(usize),
    /// An implicit domain is not contained in its declared disk.
    #[error("chart {0}: implicit domain extends beyond its radius")]
    DomainExceedsRadius(String),
}

/// One angular segment of a polar grid, between consecutive kinks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub phi0: f64,
    pub phi1: f64,
    /// Fraction of the full turn covered, used to distribute cells.
    pub weight: f64,
    pub graded: bool,
}

/// Polar parametrization `(φ, σ) ↦ (u, v)` of a star-shaped implicit domain.
#[derive(Debug, Clone)]
pub struct PolarMap {
    pub center: [f64; 2],
    pub segments: Vec<Segment>,
    constraints: Vec<Expr>,
    radius: f64,
}

impl PolarMap {
    /// Builds the map, locating kinks of the boundary.
    pub fn new(constraints: &[Expr], center: [f64; 2], radius: f64) -> PolarMap {
        let mut pm = PolarMap {
            center,
            segments: Vec::new(),
            constraints: constraints.to_vec(),
            radius,
        };
        let mut kinks = Vec::new();
        if constraints.len() > 1 {
            const M: usize = 1440;
            let act: Vec<usize> = (0..M).map(|i| pm.active(TAU * i as f64 / M as f64)).collect();
            for i in 0..M {
                let j = (i + 1) % M;
                if act[i] != act[j] {
                    let (mut lo, mut hi) = (TAU * i as f64 / M as f64, TAU * (i + 1) as f64 / M as f64);
                    let a0 = act[i];
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if pm.active(mid) == a0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    kinks.push(0.5 * (lo + hi));
                }
            }
        }
        if kinks.is_empty() {
            pm.segments = vec![Segment { phi0: 0.0, phi1: TAU, weight: 1.0, graded: false }];
        } else {
            let m = kinks.len();
            pm.segments = (0..m)
                .map(|i| {
                    let phi0 = kinks[i];
                    let phi1 = if i + 1 < m { kinks[i + 1] } else { kinks[0] + TAU };
                    Segment { phi0, phi1, weight: (phi1 - phi0) / TAU, graded: true }
                })
                .collect();
        }
        pm
    }

    fn min_constraint(&self, u: f64, v: f64) -> (f64, usize) {
        let p = Params::new();
        let mut best = (f64::INFINITY, 0);
        for (k, h) in self.constraints.iter().enumerate() {
            let x = h.eval(u, v, &p).unwrap_or(f64::NEG_INFINITY);
            if x < best.0 {
                best = (x, k);
            }
        }
        best
    }

    fn active(&self, phi: f64) -> usize {
        let r = self.boundary_radius(phi);
        let (c, s) = (phi.cos(), phi.sin());
        self.min_constraint(self.center[0] + r * c, self.center[1] + r * s).1
    }

    /// False if some ray from the centre is still inside the domain at the
    /// declared radius, so the domain is not contained in its disk.
    pub fn fits_radius(&self) -> bool {
        const M: usize = 1440;
        (0..M).all(|i| {
            let phi = TAU * i as f64 / M as f64;
            let r = self.radius * (1.0 + 1e-9);
            self.min_constraint(self.center[0] + r * phi.cos(), self.center[1] + r * phi.sin()).0 <= 0.0
        })
    }

    /// Distance from the centre to the boundary along angle `phi`.
    pub fn boundary_radius(&self, phi: f64) -> f64 {
        let (c, s) = (phi.cos(), phi.sin());
        let m = |r: f64| self.min_constraint(self.center[0] + r * c, self.center[1] + r * s).0;
        const STEPS: usize = 128;
        let mut lo = 0.0;
        let mut hi = self.radius;
        for j in 1..=STEPS {
            let r = self.radius * j as f64 / STEPS as f64;
            if m(r) <= 0.0 {
                hi = r;
                break;
            }
            lo = r;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if m(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Angle and its derivative at local parameter `tau ∈ [0, 1]` of a segment.
    pub fn phi(&self, seg: &Segment, tau: f64) -> (f64, f64) {
        let d = seg.phi1 - seg.phi0;
        if seg.graded {
            (seg.phi0 + d * tau * tau * (3.0 - 2.0 * tau), d * 6.0 * tau * (1.0 - tau))
        } else {
            (seg.phi0 + d * tau, d)
        }
    }

    /// Cells per segment for a grid of about `n` angular cells; each count
    /// is a positive multiple of four so the grid can be coarsened twice.
    pub fn segment_cells(&self, n: usize) -> Vec<usize> {
        self.segments
            .iter()
            .map(|s| 4 * ((n as f64 * s.weight / 4.0).round() as usize).max(1))
            .collect()
    }

    /// Point `(u, v)` at angle `phi`, boundary radius `rb` and radial
    /// parameter `sigma`, with `∂ρ/∂σ`.
    pub fn point(&self, phi: f64, rb: f64, sigma: f64) -> ([f64; 2], f64, f64) {
        let w = 1.0 - sigma;
        let rho = rb * (1.0 - w * w);
        let drho = rb * 2.0 * w;
        ([self.center[0] + rho * phi.cos(), self.center[1] + rho * phi.sin()], rho, drho)
    }
}

/// Parameter map of one chart domain.
#[derive(Debug, Clone)]
pub enum ChartParam {
    Rect { u: [f64; 2], v: [f64; 2] },
    Polar(PolarMap),
}

impl ChartParam {
    /// Parameter map for a chart.
    pub fn new(chart: &Chart) -> ChartParam {
        match &chart.domain {
            Domain::Rect { u, v } => ChartParam::Rect { u: *u, v: *v },
            Domain::Implicit { constraints, center, radius } => {
                ChartParam::Polar(PolarMap::new(constraints, *center, *radius))
            }
        }
    }
}

/// A node of the mesh, expressed in its chart's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshNode {
    pub chart: usize,
    pub uv: [f64; 2],
    /// False for boundary nodes of implicit domains (not evaluable).
    pub interior: bool,
    /// For non-interior nodes, the three inward neighbours used for
    /// quadratic extrapolation `3a - 3b + c`.
    pub extrap: Option<[usize; 3]>,
    /// Boundary edges the node lies on.
    pub edges: Vec<Edge>,
}

/// Triangle mesh of all charts with glued boundary nodes identified.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<MeshNode>,
    /// Node triples; all three nodes of a triangle belong to the same chart.
    pub triangles: Vec<[usize; 3]>,
    /// Vertex id of each node after gluing.
    pub vertex: Vec<usize>,
    pub n_vertices: usize,
    /// Node index range of each chart.
    pub chart_nodes: Vec<Range<usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn rect_edges(u: &[f64; 2], v: &[f64; 2], p: [f64; 2]) -> Vec<Edge> {
    let mut e = Vec::new();
    if p[0] == u[0] {
        e.push(Edge::UMin);
    }
    if p[0] == u[1] {
        e.push(Edge::UMax);
    }
    if p[1] == v[0] {
        e.push(Edge::VMin);
    }
    if p[1] == v[1] {
        e.push(Edge::VMax);
    }
    e
}

fn chart_grid(
    ci: usize,
    chart: &Chart,
    param: &ChartParam,
    n: usize,
    nodes: &mut Vec<MeshNode>,
    tris: &mut Vec<[usize; 3]>,
) {
    let base = nodes.len();
    match param {
        ChartParam::Rect { u, v } => {
            let at = |i: usize, k: usize, r: &[f64; 2]| {
                if i == 0 {
                    r[0]
                } else if i == k {
                    r[1]
                } else {
                    r[0] + (r[1] - r[0]) * i as f64 / k as f64
                }
            };
            for j in 0..=n {
                for i in 0..=n {
                    let p = [at(i, n, u), at(j, n, v)];
                    nodes.push(MeshNode {
                        chart: ci,
                        uv: p,
                        interior: true,
                        extrap: None,
                        edges: rect_edges(u, v, p),
                    });
                }
            }
            let id = |i: usize, j: usize| base + j * (n + 1) + i;
            for j in 0..n {
                for i in 0..n {
                    tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
        ChartParam::Polar(pm) => {
            let cells = pm.segment_cells(n);
            let mut angles = Vec::new();
            for (seg, &k) in pm.segments.iter().zip(&cells) {
                for m in 0..k {
                    angles.push(pm.phi(seg, m as f64 / k as f64).0);
                }
            }
            let na = angles.len();
            let ns = n.max(4);
            let radii: Vec<f64> = angles.par_iter().map(|&a| pm.boundary_radius(a)).collect();
            let Domain::Implicit { constraints, .. } = &chart.domain else { unreachable!() };
            nodes.push(MeshNode {
                chart: ci,
                uv: pm.center,
                interior: true,
                extrap: None,
                edges: Vec::new(),
            });
            let id = |i: usize, j: usize| base + 1 + (j - 1) * na + (i % na);
            for j in 1..=ns {
                let sigma = j as f64 / ns as f64;
                for i in 0..na {
                    let (p, _, _) = pm.point(angles[i], radii[i], sigma);
                    let boundary = j == ns;
                    let mut edges = Vec::new();
                    if boundary {
                        let pr = Params::new();
                        let vals: Vec<f64> = constraints
                            .iter()
                            .map(|h| h.eval(p[0], p[1], &pr).unwrap_or(0.0))
                            .collect();
                        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                        for (k, &x) in vals.iter().enumerate() {
                            if x <= min + 1e-9 * (1.0 + pm.radius * pm.radius) {
                                edges.push(Edge::Constraint(k));
                            }
                        }
                    }
                    nodes.push(MeshNode {
                        chart: ci,
                        uv: p,
                        interior: !boundary,
                        extrap: boundary.then(|| [id(i, ns - 1), id(i, ns - 2), id(i, ns - 3)]),
                        edges,
                    });
                }
            }
            for i in 0..na {
                tris.push([base, id(i, 1), id(i + 1, 1)]);
            }
            for j in 1..ns {
                for i in 0..na {
                    tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
    }
}

/// Builds the glued mesh with about `n` cells per chart direction.
pub fn build_mesh(atlas: &Atlas, n: usize) -> Result<Mesh, TopologyError> {
    if n < 8 {
        return Err(TopologyError::GridTooSmall(n));
    }
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    let mut chart_nodes = Vec::new();
    for (ci, chart) in atlas.charts.iter().enumerate() {
        let start = nodes.len();
        let param = ChartParam::new(chart);
        if let ChartParam::Polar(pm) = &param {
            if !pm.fits_radius() {
                return Err(TopologyError::DomainExceedsRadius(chart.name.clone()));
            }
        }
        chart_grid(ci, chart, &param, n, &mut nodes, &mut triangles);
        chart_nodes.push(start..nodes.len());
    }
    let mut uf = UnionFind((0..nodes.len()).collect());
    for g in &atlas.glue {
        let targets: Vec<usize> = chart_nodes[g.to]
            .clone()
            .filter(|&k| nodes[k].edges.contains(&g.to_edge))
            .collect();
        let scale = targets
            .iter()
            .map(|&k| nodes[k].uv[0].abs().max(nodes[k].uv[1].abs()))
            .fold(1.0, f64::max);
        let tol = 1e-9 * scale;
        let key = |p: [f64; 2]| ((p[0] / (1e3 * tol)).round() as i64, (p[1] / (1e3 * tol)).round() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for &k in &targets {
            buckets.entry(key(nodes[k].uv)).or_default().push(k);
        }
        let mut missing = 0;
        let sources: Vec<usize> = chart_nodes[g.from]
            .clone()
            .filter(|&k| nodes[k].edges.contains(&g.from_edge))
            .collect();
        for k in sources {
            let p = g.apply(nodes[k].uv);
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                        for &t in list {
                            let q = nodes[t].uv;
                            if (q[0] - p[0]).abs() <= tol && (q[1] - p[1]).abs() <= tol {
                                found = Some(t);
                                break 'search;
                            }
                        }
                    }
                }
            }
            match found {
                Some(t) => uf.union(k, t),
                None => missing += 1,
            }
        }
        if missing > 0 {
            return Err(TopologyError::GlueMismatch {
                from: atlas.charts[g.from].name.clone(),
                to: atlas.charts[g.to].name.clone(),
                count: missing,
            });
        }
    }
    let mut ids = HashMap::new();
    let mut vertex = vec![0; nodes.len()];
    for k in 0..nodes.len() {
        let r = uf.find(k);
        let next = ids.len();
        vertex[k] = *ids.entry(r).or_insert(next);
    }
    let n_vertices = ids.len();
    Ok(Mesh { nodes, triangles, vertex, n_vertices, chart_nodes })
}

impl Mesh {
    /// Sorted unique edges as vertex pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = Vec::with_capacity(self.triangles.len() * 3);
        for t in &self.triangles {
            let v = t.map(|k| self.vertex[k]);
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                if a != b {
                    e.push((a.min(b), a.max(b)));
                }
            }
        }
        e.par_sort_unstable();
        e.dedup();
        e
    }

    /// Number of edges with only one incident triangle.
    pub fn boundary_edge_count(&self) -> usize {
        let mut e: Vec<(usize, usize)> = Vec::with_capacity(self.triangles.len() * 3);
        for t in &self.triangles {
            let v = t.map(|k| self.vertex[k]);
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                e.push((a.min(b), a.max(b)));
            }
        }
        e.par_sort_unstable();
        let mut count = 0;
        let mut i = 0;
        while i < e.len() {
            let mut j = i;
            while j < e.len() && e[j] == e[i] {
                j += 1;
            }
            if j - i == 1 {
                count += 1;
            }
            i = j;
        }
        count
    }

    /// Euler characteristic `V - E + F` of the glued mesh.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// Euler characteristic of the full subcomplex spanned by the vertices
    /// with `mask[v]` set.
    pub fn region_euler_characteristic(&self, mask: &[bool]) -> i64 {
        let v = mask.iter().filter(|&&m| m).count() as i64;
        let e = self.edges().iter().filter(|(a, b)| mask[*a] && mask[*b]).count() as i64;
        let f = self
            .triangles
            .iter()
            .filter(|t| t.iter().all(|&k| mask[self.vertex[k]]))
            .count() as i64;
        v - e + f
    }

    /// Averages node values over each glued vertex.
    pub fn vertex_values(&self, node_values: &[f64]) -> Vec<f64> {
        let mut sum = vec![0.0; self.n_vertices];
        let mut cnt = vec![0usize; self.n_vertices];
        for (k, &x) in node_values.iter().enumerate() {
            sum[self.vertex[k]] += x;
            cnt[self.vertex[k]] += 1;
        }
        sum.iter().zip(&cnt).map(|(s, &c)| s / c as f64).collect()
    }

    /// Largest difference between node values glued to the same vertex.
    pub fn glue_discrepancy(&self, node_values: &[f64]) -> f64 {
        let mut lo = vec![f64::INFINITY; self.n_vertices];
        let mut hi = vec![f64::NEG_INFINITY; self.n_vertices];
        for (k, &x) in node_values.iter().enumerate() {
            let v = self.vertex[k];
            lo[v] = lo[v].min(x);
            hi[v] = hi[v].max(x);
        }
        lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max)
    }
}

/// Invariants sampled at a mesh node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub k: f64,
    pub kn: f64,
    pub delta: f64,
    pub h2: f64,
    /// Rank of the Gauss map differential; `None` if extrapolated.
    pub rank: Option<u8>,
}

/// Evaluates invariants at every interior node and extrapolates them to
/// boundary nodes. Nodes whose evaluation fails yield `NaN` fields.
pub fn sample_nodes(atlas: &Atlas, mesh: &Mesh) -> Vec<NodeSample> {
    let nan = NodeSample { k: f64::NAN, kn: f64::NAN, delta: f64::NAN, h2: f64::NAN, rank: None };
    let mut out: Vec<NodeSample> = mesh
        .nodes
        .par_iter()
        .map(|node| {
            if !node.interior {
                return nan;
            }
            let chart = &atlas.charts[node.chart];
            let Ok(f) = darboux_frame(chart, node.uv[0], node.uv[1], 2) else { return nan };
            let Ok(cf) = connection_forms(&f) else { return nan };
            let Ok(inv) = invariant_jets(&cf) else { return nan };
            let c = inv.curvatures();
            NodeSample { k: c.k, kn: c.kn, delta: c.delta, h2: c.h2, rank: Some(rank_dg(&cf) as u8) }
        })
        .collect();
    for k in 0..mesh.nodes.len() {
        if let Some([a, b, c]) = mesh.nodes[k].extrap {
            let (a, b, c) = (out[a], out[b], out[c]);
            let ex = |x: f64, y: f64, z: f64| 3.0 * x - 3.0 * y + z;
            out[k] = NodeSample {
                k: ex(a.k, b.k, c.k),
                kn: ex(a.kn, b.kn, c.kn),
                delta: ex(a.delta, b.delta, c.delta),
                h2: ex(a.h2, b.h2, c.h2),
                rank: None,
            };
        }
    }
    out
}
