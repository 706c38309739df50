//! Second fundamental form and curvature invariants.
//!
//! With `l_j = ω₁ʲ(e₁)`, `m_j = ω₁ʲ(e₂) = ω₂ʲ(e₁)`, `n_j = ω₂ʲ(e₂)` for
//! `j = 3, 4`:
//!
//! * Gaussian curvature `K = l₃n₃ - m₃² + l₄n₄ - m₄²`
//! * normal curvature `K^N = (l₃ - n₃)m₄ - (l₄ - n₄)m₃`
//! * `Δ`, minus a quarter of the resultant of the two quadratic forms
//!   `l_j x² + 2m_j xy + n_j y²`; `Δ < 0` means the curvature ellipse does
//!   not contain the surface point
//! * `|H|² = ((l₃ + n₃)² + (l₄ + n₄)²) / 4`
//!
//! so that `K ± K^N` are the determinants of the two matrices whose
//! degeneracy defines the singular sets of the Gauss map components.

use crate::atlas::{AtlasError, Chart};
use crate::frames::{connection_forms, darboux_frame, ConnectionForms};
use crate::gaussmap::{beta_jets, Component};
use crate::jets::{Jet2, JetError};

/// Coefficients of the second fundamental form; index 0 refers to `e₃`,
/// index 1 to `e₄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamentalForm {
    pub l: [f64; 2],
    pub m: [f64; 2],
    pub n: [f64; 2],
}

/// Pointwise curvature invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvatures {
    pub k: f64,
    pub kn: f64,
    pub delta: f64,
    pub h2: f64,
}

impl Curvatures {
    /// `K + K^N` for component 1, `K - K^N` for component 2.
    pub fn singular_function(&self, c: Component) -> f64 {
        match c {
            Component::One => self.k + self.kn,
            Component::Two => self.k - self.kn,
        }
    }

    /// Jacobian of `g_i`: `(K ± K^N) / 2`.
    pub fn jacobian(&self, c: Component) -> f64 {
        0.5 * self.singular_function(c)
    }
}

/// Jets of the invariants about a point, one order below the connection forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantJets {
    pub l: [Jet2; 2],
    pub m: [Jet2; 2],
    pub n: [Jet2; 2],
    pub k: Jet2,
    pub kn: Jet2,
    pub delta: Jet2,
    pub h2: Jet2,
}

impl InvariantJets {
    /// Values at the base point.
    pub fn curvatures(&self) -> Curvatures {
        Curvatures {
            k: self.k.value(),
            kn: self.kn.value(),
            delta: self.delta.value(),
            h2: self.h2.value(),
        }
    }

    /// Second fundamental form at the base point.
    pub fn sff(&self) -> SecondFundamentalForm {
        SecondFundamentalForm {
            l: self.l.map(|j| j.value()),
            m: self.m.map(|j| j.value()),
            n: self.n.map(|j| j.value()),
        }
    }

    /// Jet of `K ± K^N`.
    pub fn singular_function(&self, c: Component) -> Jet2 {
        match c {
            Component::One => self.k + self.kn,
            Component::Two => self.k - self.kn,
        }
    }
}

fn det4_jets(m: [[Jet2; 4]; 4]) -> Jet2 {
    let det3 = |a: [[Jet2; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let mut acc = m[0][0].scale(0.0);
    for c in 0..4 {
        let mut minor = [[acc; 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for k in 0..4 {
                if k != c {
                    minor[r - 1][cc] = m[r][k];
                    cc += 1;
                }
            }
        }
        let t = m[0][c] * det3(minor);
        acc = if c % 2 == 0 { acc + t } else { acc - t };
    }
    acc
}

/// Invariant jets from connection forms.
pub fn invariant_jets(cf: &ConnectionForms) -> Result<InvariantJets, JetError> {
    let w = cf.on_frame()?;
    let l = [w[0][2][0], w[0][3][0]];
    let m = [w[0][2][1], w[0][3][1]];
    let n = [w[1][2][1], w[1][3][1]];
    let k = l[0] * n[0] - m[0] * m[0] + l[1] * n[1] - m[1] * m[1];
    let kn = (l[0] - n[0]) * m[1] - (l[1] - n[1]) * m[0];
    let z = l[0].scale(0.0);
    let (a, b, c) = (l[0], m[0].scale(2.0), n[0]);
    let (e, f, g) = (l[1], m[1].scale(2.0), n[1]);
    let delta = det4_jets([[a, b, c, z], [e, f, g, z], [z, a, b, c], [z, e, f, g]]).scale(0.25);
    let s3 = l[0] + n[0];
    let s4 = l[1] + n[1];
    let h2 = (s3 * s3 + s4 * s4).scale(0.25);
    Ok(InvariantJets { l, m, n, k, kn, delta, h2 })
}

/// Second fundamental form coefficients at the base point.
pub fn second_fundamental_form(cf: &ConnectionForms) -> Result<SecondFundamentalForm, JetError> {
    Ok(invariant_jets(cf)?.sff())
}

/// Curvature invariants from second fundamental form coefficients.
pub fn curvatures(s: &SecondFundamentalForm) -> Curvatures {
    let (l, m, n) = (s.l, s.m, s.n);
    let k = l[0] * n[0] - m[0] * m[0] + l[1] * n[1] - m[1] * m[1];
    let kn = (l[0] - n[0]) * m[1] - (l[1] - n[1]) * m[0];
    let (a, b, c, e, f, g) = (l[0], m[0], n[0], l[1], m[1], n[1]);
    // minus a quarter of the resultant of a x² + 2b x + c and e x² + 2f x + g
    let delta = -0.25 * ((a * g - c * e).powi(2) - 4.0 * (a * f - b * e) * (b * g - c * f));
    let h2 = 0.25 * ((l[0] + n[0]).powi(2) + (l[1] + n[1]).powi(2));
    Curvatures { k, kn, delta, h2 }
}

/// Invariant jets of a chart about `(u, v)` to the given order (the chart is
/// expanded to `order + 2`).
pub fn invariants_jets_at(
    chart: &Chart,
    u: f64,
    v: f64,
    order: usize,
) -> Result<InvariantJets, AtlasError> {
    let f = darboux_frame(chart, u, v, order + 2)?;
    let bad = |_| AtlasError::NotImmersive { chart: chart.name.clone(), u, v };
    let cf = connection_forms(&f).map_err(bad)?;
    invariant_jets(&cf).map_err(bad)
}

/// Curvature invariants of a chart at `(u, v)`.
pub fn invariants_at(chart: &Chart, u: f64, v: f64) -> Result<Curvatures, AtlasError> {
    Ok(invariants_jets_at(chart, u, v, 0)?.curvatures())
}

/// Jacobian of `g_i` computed independently of the second fundamental form:
/// the oriented area ratio of the pulled-back sphere area form, from the
/// derivatives of the bivector coordinates.
pub fn jacobian_by_pullback(
    chart: &Chart,
    u: f64,
    v: f64,
    component: Component,
) -> Result<f64, AtlasError> {
    let f = darboux_frame(chart, u, v, 2)?;
    let b = beta_jets(&f, component);
    let p = b.map(|j| j.value());
    let bu = b.map(|j| j.coeff(1, 0));
    let bv = b.map(|j| j.coeff(0, 1));
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let cross = [
        bu[1] * bv[2] - bu[2] * bv[1],
        bu[2] * bv[0] - bu[0] * bv[2],
        bu[0] * bv[1] - bu[1] * bv[0],
    ];
    let vol = (p[0] * cross[0] + p[1] * cross[1] + p[2] * cross[2]) / norm;
    let xu = f.xu.map(|j| j.value());
    let xv = f.xv.map(|j| j.value());
    let guu: f64 = xu.iter().map(|a| a * a).sum();
    let gvv: f64 = xv.iter().map(|a| a * a).sum();
    let guv: f64 = xu.iter().zip(&xv).map(|(a, b)| a * b).sum();
    let area = (guu * gvv - guv * guv).max(0.0).sqrt() * chart.orientation as f64;
    Ok(vol / area)
}
