//! The Gauss map into the Grassmannian of oriented planes and its two
//! sphere components.
//!
//! Oriented planes are unit decomposable bivectors. Splitting Λ²R⁴ into
//! self-dual and anti-self-dual parts with orthonormal bases
//!
//! ```text
//! X₁ = (E₁₂ + E₃₄)/√2   X₂ = (E₂₃ + E₁₄)/√2   X₃ = (E₃₁ + E₂₄)/√2
//! Y₁ = (E₁₂ - E₃₄)/√2   Y₂ = (E₂₃ - E₁₄)/√2   Y₃ = (E₃₁ - E₂₄)/√2
//! ```
//!
//! gives `e₁∧e₂ = g₁ + g₂` with `g₁ = ½(e₁∧e₂ + e₃∧e₄)` on the sphere of
//! radius `1/√2` in span(X) and `g₂ = ½(e₁∧e₂ - e₃∧e₄)` on the sphere of
//! radius `1/√2` in span(Y). Their coordinates are `β` and `γ`. Spheres are
//! oriented by the outward normal.

use crate::frames::{ConnectionForms, DarbouxFrame};
use crate::jets::Jet2;

const SQRT1_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Radius of both component spheres.
pub const SPHERE_RADIUS: f64 = SQRT1_2;

/// Which component of the Gauss map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    One,
    Two,
}

impl Component {
    /// Parses `1` or `2`.
    pub fn from_index(i: u32) -> Option<Component> {
        match i {
            1 => Some(Component::One),
            2 => Some(Component::Two),
            _ => None,
        }
    }

    /// `1` or `2`.
    pub fn index(self) -> u32 {
        match self {
            Component::One => 1,
            Component::Two => 2,
        }
    }

    /// `+1` for the first component, `-1` for the second.
    pub fn sign(self) -> f64 {
        match self {
            Component::One => 1.0,
            Component::Two => -1.0,
        }
    }
}

/// Plücker coordinates `α_ij` of a bivector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bivector {
    pub a12: f64,
    pub a23: f64,
    pub a31: f64,
    pub a34: f64,
    pub a14: f64,
    pub a24: f64,
}

impl Bivector {
    /// Self-dual coordinates in the `X` basis.
    pub fn x_coords(&self) -> [f64; 3] {
        [
            (self.a12 + self.a34) * SQRT1_2,
            (self.a23 + self.a14) * SQRT1_2,
            (self.a31 + self.a24) * SQRT1_2,
        ]
    }

    /// Anti-self-dual coordinates in the `Y` basis.
    pub fn y_coords(&self) -> [f64; 3] {
        [
            (self.a12 - self.a34) * SQRT1_2,
            (self.a23 - self.a14) * SQRT1_2,
            (self.a31 - self.a24) * SQRT1_2,
        ]
    }

    /// Plücker relation `α₁₂α₃₄ + α₂₃α₁₄ + α₃₁α₂₄`, zero iff decomposable.
    pub fn plucker_relation(&self) -> f64 {
        self.a12 * self.a34 + self.a23 * self.a14 + self.a31 * self.a24
    }

    /// Euclidean norm squared.
    pub fn norm2(&self) -> f64 {
        [self.a12, self.a23, self.a31, self.a34, self.a14, self.a24].iter().map(|x| x * x).sum()
    }
}

/// Plücker coordinates of `v₁ ∧ v₂`.
pub fn plucker(v1: &[f64; 4], v2: &[f64; 4]) -> Bivector {
    let w = |i: usize, j: usize| v1[i] * v2[j] - v1[j] * v2[i];
    Bivector { a12: w(0, 1), a23: w(1, 2), a31: w(2, 0), a34: w(2, 3), a14: w(0, 3), a24: w(1, 3) }
}

fn wedge_jets(v1: &[Jet2; 4], v2: &[Jet2; 4]) -> [Jet2; 6] {
    let w = |i: usize, j: usize| v1[i] * v2[j] - v1[j] * v2[i];
    [w(0, 1), w(1, 2), w(2, 0), w(2, 3), w(0, 3), w(1, 3)]
}

/// Jets of the sphere coordinates of `g_i` (`β` for component 1, `γ` for 2).
pub fn beta_jets(f: &DarbouxFrame, c: Component) -> [Jet2; 3] {
    let a = wedge_jets(&f.e[0], &f.e[1]);
    let b = wedge_jets(&f.e[2], &f.e[3]);
    let s = c.sign();
    // g = ½(a ± b); coordinates in X (component 1) or Y (component 2)
    let half = 0.5 * SQRT1_2;
    let g: Vec<Jet2> = (0..6).map(|k| (a[k] + b[k].scale(s)).scale(half)).collect();
    [g[0] + g[3].scale(s), g[1] + g[4].scale(s), g[2] + g[5].scale(s)]
}

/// Values of both components at a frame's base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussPoint {
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
    /// Stereographic images; `None` at the projection pole.
    pub stereo1: Option<[f64; 2]>,
    pub stereo2: Option<[f64; 2]>,
}

/// Stereographic projection from the pole `-X₁/√2` onto the plane through
/// the centre.
pub fn stereographic(p: &[f64; 3]) -> Option<[f64; 2]> {
    let d = SQRT1_2 + p[0];
    if d.abs() < 1e-14 {
        None
    } else {
        Some([p[1] / d, p[2] / d])
    }
}

/// Both Gauss map components at the frame's base point.
pub fn gauss_components(f: &DarbouxFrame) -> GaussPoint {
    let beta = beta_jets(f, Component::One).map(|j| j.value());
    let gamma = beta_jets(f, Component::Two).map(|j| j.value());
    GaussPoint { beta, gamma, stereo1: stereographic(&beta), stereo2: stereographic(&gamma) }
}

/// Differentials of both components in the frame-adapted sphere bases:
/// rows are the coefficients on `(x₂, x₃)` (resp. `(y₂, y₃)`), columns the
/// values on `∂u`, `∂v`.
pub fn dgauss_components(cf: &ConnectionForms) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let w = |i: usize, j: usize, d: usize| cf.omega(i - 1, j - 1, d);
    let mut d1 = [[0.0; 2]; 2];
    let mut d2 = [[0.0; 2]; 2];
    for d in 0..2 {
        d1[0][d] = SQRT1_2 * (w(2, 4, d) - w(1, 3, d));
        d1[1][d] = SQRT1_2 * (-w(1, 4, d) - w(2, 3, d));
        d2[0][d] = SQRT1_2 * (-w(1, 3, d) - w(2, 4, d));
        d2[1][d] = SQRT1_2 * (w(1, 4, d) - w(2, 3, d));
    }
    (d1, d2)
}

/// Kernel direction of a 2×2 differential: `None` if it has rank 2 (relative
/// tolerance `1e-8`), otherwise the unit right singular vector of the smallest
/// singular value with its first nonzero component positive.
pub fn kernel_direction(m: &[[f64; 2]; 2]) -> Option<[f64; 2]> {
    let (smax, smin, v) = svd2(m);
    if smin > 1e-8 * smax.max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(canonical_sign(v))
}

fn canonical_sign(v: [f64; 2]) -> [f64; 2] {
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Singular values `(σ_max, σ_min)` of a 2×2 matrix and the right singular
/// vector for `σ_min`.
pub fn svd2(m: &[[f64; 2]; 2]) -> (f64, f64, [f64; 2]) {
    // eigen-decomposition of MᵀM
    let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
    let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
    let c = m[0][1] * m[0][1] + m[1][1] * m[1][1];
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let lmax = 0.5 * (tr + disc);
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    let smax = lmax.max(0.0).sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    // eigenvector of the smaller eigenvalue: orthogonal to that of lmax
    let vmax = if b.abs() > 1e-300 {
        [b, lmax - a]
    } else if a >= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let n = (vmax[0] * vmax[0] + vmax[1] * vmax[1]).sqrt();
    let vmax = [vmax[0] / n, vmax[1] / n];
    (smax, smin, [-vmax[1], vmax[0]])
}

/// Numerical rank (0, 1 or 2) of the differential of the full Gauss map,
/// the 4×2 matrix of `ω₁³, ω₁⁴, ω₂³, ω₂⁴` on the orthonormal tangent basis.
pub fn rank_dg(cf: &ConnectionForms) -> usize {
    let Ok(w) = cf.on_frame() else { return 0 };
    let rows = [w[0][2], w[0][3], w[1][2], w[1][3]];
    let mut g = [[0.0; 2]; 2];
    for r in rows {
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] += r[i].value() * r[j].value();
            }
        }
    }
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let lmax = 0.5 * (tr + ((g[0][0] - g[1][1]).powi(2) + 4.0 * g[0][1] * g[0][1]).sqrt());
    if lmax <= 1e-28 {
        return 0;
    }
    let lmin = det / lmax;
    if lmin.max(0.0).sqrt() > 1e-8 * lmax.sqrt() {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_plane_maps_to_first_axis() {
        let b = plucker(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(b.plucker_relation(), 0.0);
        let x = b.x_coords();
        assert!((x[0] - SQRT1_2).abs() < 1e-15 && x[1] == 0.0 && x[2] == 0.0);
    }

    #[test]
    fn svd_kernel_of_rank_one() {
        let m = [[1.0, 2.0], [2.0, 4.0]];
        let k = kernel_direction(&m).unwrap();
        assert!((k[0] - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((k[1] + 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!(kernel_direction(&[[1.0, 0.0], [0.0, 1.0]]).is_none());
    }
}
