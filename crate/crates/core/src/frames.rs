//! Darboux frames and their connection forms.
//!
//! A Darboux frame `(e₁, e₂, e₃, e₄)` is a positively oriented orthonormal
//! frame of R⁴ along the surface with `(e₁, e₂)` a positive basis of the
//! tangent plane. Frames are carried as jets so that connection forms and
//! everything built from them can be differentiated further.

use crate::atlas::{least_aligned, AtlasError, Chart};
use crate::jets::{dot, Jet2, JetError};

/// Darboux frame jets about a point; `e[i][k]` is component `k` of `e_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxFrame {
    pub e: [[Jet2; 4]; 4],
    /// Coordinate tangent vectors `x_u`, `x_v`, same order as the frame.
    pub xu: [Jet2; 4],
    pub xv: [Jet2; 4],
}

impl DarbouxFrame {
    /// Jet order of the frame.
    pub fn order(&self) -> usize {
        self.e[0][0].order()
    }

    /// Frame vectors at the base point.
    pub fn values(&self) -> [[f64; 4]; 4] {
        self.e.map(|v| v.map(|j| j.value()))
    }
}

fn normalize(v: [Jet2; 4]) -> Result<[Jet2; 4], JetError> {
    let inv = dot(&v, &v).sqrt()?.recip()?;
    Ok(v.map(|c| c * inv))
}

fn reject(mut v: [Jet2; 4], basis: &[[Jet2; 4]]) -> [Jet2; 4] {
    for b in basis {
        let d = dot(&v, b);
        for k in 0..4 {
            v[k] = v[k] - d * b[k];
        }
    }
    v
}

fn tangents(x: &[Jet2; 4]) -> Result<([Jet2; 4], [Jet2; 4]), JetError> {
    let mut xu = [Jet2::zero(0)?; 4];
    let mut xv = xu;
    for k in 0..4 {
        xu[k] = x[k].partial(0)?;
        xv[k] = x[k].partial(1)?;
    }
    Ok((xu, xv))
}

fn det_values(e: &[[Jet2; 4]; 4]) -> f64 {
    crate::atlas::det4(&e.map(|v| v.map(|j| j.value())))
}

fn orient(mut e: [[Jet2; 4]; 4], orientation: i8) -> [[Jet2; 4]; 4] {
    if orientation < 0 {
        e[1] = e[1].map(|j| -j);
        e[3] = e[3].map(|j| -j);
    }
    e
}

fn wrap(chart: &Chart, u: f64, v: f64) -> impl Fn(JetError) -> AtlasError + '_ {
    move |_| AtlasError::NotImmersive { chart: chart.name.clone(), u, v }
}

/// Frame by Gram-Schmidt on `x_u`, `x_v` and the two standard basis vectors
/// least aligned with the tangent plane. `order` is the chart jet order; the
/// frame has order `order - 1`.
pub fn frame_from_jets(x: &[Jet2; 4], orientation: i8) -> Result<DarbouxFrame, JetError> {
    let (xu, xv) = tangents(x)?;
    let n = xu[0].order();
    let e1 = normalize(xu)?;
    let e2 = normalize(reject(xv, &[e1]))?;
    let (a, b) = least_aligned(&e1.map(|j| j.value()), &e2.map(|j| j.value()));
    let mut ea = [Jet2::zero(n)?; 4];
    let mut eb = ea;
    ea[a] = Jet2::constant(1.0, n)?;
    eb[b] = Jet2::constant(1.0, n)?;
    let e3 = normalize(reject(ea, &[e1, e2]))?;
    let mut e4 = normalize(reject(eb, &[e1, e2, e3]))?;
    if det_values(&[e1, e2, e3, e4]) < 0.0 {
        e4 = e4.map(|j| -j);
    }
    Ok(DarbouxFrame { e: orient([e1, e2, e3, e4], orientation), xu, xv })
}

/// Frame in closed form for graphs `(u, v, a(u, v), b(u, v))`: tangent
/// Gram-Schmidt, `e₃ ∝ (-a_u, -a_v, 1, 0)` and the complementary `e₄`.
pub fn frame_monge(x: &[Jet2; 4], orientation: i8) -> Result<DarbouxFrame, JetError> {
    let (xu, xv) = tangents(x)?;
    let e1 = normalize(xu)?;
    let e2 = normalize(reject(xv, &[e1]))?;
    let (a10, a01, b10, b01) = (xu[2], xv[2], xu[3], xv[3]);
    let one = Jet2::constant(1.0, a10.order())?;
    let e3 = normalize([-a10, -a01, one, one.scale(0.0)])?;
    let s = one + a10 * a10 + a01 * a01;
    let e4 = normalize([
        a01 * a10 * b01 - b10 * (one + a01 * a01),
        a01 * a10 * b10 - b01 * (one + a10 * a10),
        -(a01 * b01) - a10 * b10,
        s,
    ])?;
    Ok(DarbouxFrame { e: orient([e1, e2, e3, e4], orientation), xu, xv })
}

/// Darboux frame of a chart about `(u, v)`; `order` is the chart jet order
/// (the frame has one order less). Graph charts use the closed form.
pub fn darboux_frame(
    chart: &Chart,
    u: f64,
    v: f64,
    order: usize,
) -> Result<DarbouxFrame, AtlasError> {
    let x = chart.eval_jets(u, v, order)?;
    let f = if chart.is_monge() {
        frame_monge(&x, chart.orientation)
    } else {
        frame_from_jets(&x, chart.orientation)
    };
    f.map_err(wrap(chart, u, v))
}

/// Rotates the tangent pair by `alpha` and the normal pair by `beta`:
/// `ẽ₁ = cos α e₁ + sin α e₂`, `ẽ₂ = -sin α e₁ + cos α e₂` and likewise
/// for `(e₃, e₄)`.
pub fn rotate_frame(f: &DarbouxFrame, alpha: f64, beta: f64) -> DarbouxFrame {
    let rot = |a: [Jet2; 4], b: [Jet2; 4], t: f64| {
        let (s, c) = t.sin_cos();
        let mut p = a;
        let mut q = b;
        for k in 0..4 {
            p[k] = a[k].scale(c) + b[k].scale(s);
            q[k] = b[k].scale(c) - a[k].scale(s);
        }
        (p, q)
    };
    let (e1, e2) = rot(f.e[0], f.e[1], alpha);
    let (e3, e4) = rot(f.e[2], f.e[3], beta);
    DarbouxFrame { e: [e1, e2, e3, e4], xu: f.xu, xv: f.xv }
}

/// Connection and coframe forms evaluated on the coordinate fields.
///
/// `w[i][j][d] = ⟨∂_d e_i, e_j⟩` and `theta[a][d] = ⟨∂_d x, e_a⟩` with
/// `d = 0` for `∂u` and `d = 1` for `∂v`; both are jets one order below the
/// frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionForms {
    pub w: [[[Jet2; 2]; 4]; 4],
    pub theta: [[Jet2; 2]; 2],
}

impl ConnectionForms {
    /// Jet order.
    pub fn order(&self) -> usize {
        self.theta[0][0].order()
    }

    /// `ω_i^j(∂_d)` at the base point (indices from zero).
    pub fn omega(&self, i: usize, j: usize, d: usize) -> f64 {
        self.w[i][j][d].value()
    }

    /// The inverse coframe matrix: `e_b = Σ_d m[d][b] ∂_d`.
    pub fn inverse_coframe(&self) -> Result<[[Jet2; 2]; 2], JetError> {
        let t = &self.theta;
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        let inv = det.recip()?;
        Ok([[t[1][1] * inv, -(t[0][1] * inv)], [-(t[1][0] * inv), t[0][0] * inv]])
    }

    /// `ω_i^j(e_b)` as jets for all `i`, `j`, `b`.
    pub fn on_frame(&self) -> Result<[[[Jet2; 2]; 4]; 4], JetError> {
        let m = self.inverse_coframe()?;
        let mut out = self.w;
        for i in 0..4 {
            for j in 0..4 {
                for b in 0..2 {
                    out[i][j][b] = self.w[i][j][0] * m[0][b] + self.w[i][j][1] * m[1][b];
                }
            }
        }
        Ok(out)
    }

    /// Signed area element `(θ₁ ∧ θ₂)(∂u, ∂v)`.
    pub fn area_element(&self) -> Jet2 {
        let t = &self.theta;
        t[0][0] * t[1][1] - t[0][1] * t[1][0]
    }
}

/// Connection forms of a frame; requires frame order at least 1.
pub fn connection_forms(f: &DarbouxFrame) -> Result<ConnectionForms, JetError> {
    let n = f.order();
    if n == 0 {
        return Err(JetError::OrderUnderflow);
    }
    let z = Jet2::zero(n - 1)?;
    let mut de = [[[z; 4]; 4]; 2];
    for i in 0..4 {
        for k in 0..4 {
            de[0][i][k] = f.e[i][k].partial(0)?;
            de[1][i][k] = f.e[i][k].partial(1)?;
        }
    }
    let e = f.e.map(|v| v.map(|j| j.truncate(n - 1)));
    let mut w = [[[z; 2]; 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            for d in 0..2 {
                let x = dot(&de[d][i], &e[j]);
                w[i][j][d] = x;
                w[j][i][d] = -x;
            }
        }
    }
    let xu = f.xu.map(|j| j.truncate(n - 1));
    let xv = f.xv.map(|j| j.truncate(n - 1));
    let theta = [[dot(&xu, &e[0]), dot(&xv, &e[0])], [dot(&xu, &e[1]), dot(&xv, &e[1])]];
    Ok(ConnectionForms { w, theta })
}
