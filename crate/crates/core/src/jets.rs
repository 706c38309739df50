//! Truncated two-variable Taylor jets.
//!
//! A [`Jet2`] of order `n` stores the Taylor polynomial of a function of
//! `(u, v)` about a base point, truncated after total degree `n`. Coefficient
//! `c[i,j]` multiplies `du^i dv^j`, so the partial derivative
//! `∂^{i+j} f / ∂u^i ∂v^j` equals `i! j! c[i,j]`.
//!
//! Arithmetic is closed under truncation: every operation produces the exact
//! Taylor polynomial of the result up to the order of its inputs. Mixed-order
//! operands truncate to the smaller order.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// Highest supported jet order.
pub const MAX_ORDER: usize = 4;

const CAP: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;
const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Errors raised by jet construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    /// The requested order exceeds [`MAX_ORDER`].
    #[error("jet order {0} exceeds the maximum of {MAX_ORDER}")]
    OrderOverflow(usize),
    /// Differentiation of an order-0 jet.
    #[error("cannot differentiate an order-0 jet")]
    OrderUnderflow,
    /// An elementary function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Number of coefficients of a jet of the given order.
#[inline]
pub const fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Position of `c[i,j]` in the dense coefficient array (graded by total degree).
#[inline]
pub const fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Truncated Taylor polynomial in two variables of order at most [`MAX_ORDER`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    order: u8,
    c: [f64; CAP],
}

impl Jet2 {
    /// The zero jet of the given order.
    pub fn zero(order: usize) -> Result<Self, JetError> {
        if order > MAX_ORDER {
            return Err(JetError::OrderOverflow(order));
        }
        Ok(Jet2 { order: order as u8, c: [0.0; CAP] })
    }

    /// A constant jet.
    pub fn constant(value: f64, order: usize) -> Result<Self, JetError> {
        let mut j = Self::zero(order)?;
        j.c[0] = value;
        Ok(j)
    }

    /// The coordinate `u` expanded about `u0`.
    pub fn var_u(u0: f64, order: usize) -> Result<Self, JetError> {
        let mut j = Self::constant(u0, order)?;
        if order >= 1 {
            j.c[index(1, 0)] = 1.0;
        }
        Ok(j)
    }

    /// The coordinate `v` expanded about `v0`.
    pub fn var_v(v0: f64, order: usize) -> Result<Self, JetError> {
        let mut j = Self::constant(v0, order)?;
        if order >= 1 {
            j.c[index(0, 1)] = 1.0;
        }
        Ok(j)
    }

    /// Builds a jet from dense coefficients in graded order.
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        let mut j = Self::zero(order)?;
        let n = coeff_count(order);
        if coeffs.len() != n {
            return Err(JetError::Domain(format!(
                "expected {n} coefficients for order {order}, got {}",
                coeffs.len()
            )));
        }
        j.c[..n].copy_from_slice(coeffs);
        Ok(j)
    }

    /// Truncation order.
    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// Dense coefficients, `coeff_count(order)` entries in graded order.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..coeff_count(self.order())]
    }

    /// Value at the base point.
    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of `du^i dv^j` (zero beyond the order).
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order() {
            0.0
        } else {
            self.c[index(i, j)]
        }
    }

    /// Sets the Taylor coefficient of `du^i dv^j`.
    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.order(), "coefficient beyond jet order");
        self.c[index(i, j)] = value;
    }

    /// Partial derivative `∂^{i+j} f / ∂u^i ∂v^j` at the base point.
    #[inline]
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * FACT[i.min(4)] * FACT[j.min(4)]
    }

    /// Gradient `(f_u, f_v)` at the base point.
    pub fn gradient(&self) -> [f64; 2] {
        [self.coeff(1, 0), self.coeff(0, 1)]
    }

    /// Hessian `[[f_uu, f_uv], [f_uv, f_vv]]` at the base point.
    pub fn hessian(&self) -> [[f64; 2]; 2] {
        let uv = self.coeff(1, 1);
        [[2.0 * self.coeff(2, 0), uv], [uv, 2.0 * self.coeff(0, 2)]]
    }

    /// Copy truncated to a lower order.
    pub fn truncate(&self, order: usize) -> Jet2 {
        let order = order.min(self.order());
        let mut out = Jet2 { order: order as u8, c: [0.0; CAP] };
        let n = coeff_count(order);
        out.c[..n].copy_from_slice(&self.c[..n]);
        out
    }

    /// Same jet with the constant term replaced.
    pub fn with_value(mut self, value: f64) -> Jet2 {
        self.c[0] = value;
        self
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: f64) -> Jet2 {
        let mut out = *self;
        for x in out.c[..coeff_count(self.order())].iter_mut() {
            *x *= s;
        }
        out
    }

    /// Truncated product.
    pub fn prod(&self, other: &Jet2) -> Jet2 {
        let n = self.order().min(other.order());
        let mut out = Jet2 { order: n as u8, c: [0.0; CAP] };
        for d1 in 0..=n {
            let b1 = d1 * (d1 + 1) / 2;
            for j1 in 0..=d1 {
                let a = self.c[b1 + j1];
                if a == 0.0 {
                    continue;
                }
                for d2 in 0..=(n - d1) {
                    let b2 = d2 * (d2 + 1) / 2;
                    let d = d1 + d2;
                    let bo = d * (d + 1) / 2;
                    for j2 in 0..=d2 {
                        out.c[bo + j1 + j2] += a * other.c[b2 + j2];
                    }
                }
            }
        }
        out
    }

    /// Applies a univariate function given its Taylor coefficients
    /// `t[k] = f^{(k)}(x0) / k!` at `x0 = self.value()`.
    fn compose_series(&self, t: &[f64; 5]) -> Jet2 {
        let n = self.order();
        let delta = self.with_value(0.0);
        let mut r = Jet2::constant(t[n], n).expect("order already validated");
        for k in (0..n).rev() {
            r = r.prod(&delta);
            r.c[0] += t[k];
        }
        r
    }

    /// Reciprocal `1/f`; fails if `f(0) = 0`.
    pub fn recip(&self) -> Result<Jet2, JetError> {
        let x0 = self.value();
        if x0 == 0.0 || !x0.is_finite() {
            return Err(JetError::Domain(format!("reciprocal of jet with value {x0}")));
        }
        let r = 1.0 / x0;
        let mut t = [0.0; 5];
        let mut p = r;
        for tk in t.iter_mut() {
            *tk = p;
            p *= -r;
        }
        Ok(self.compose_series(&t))
    }

    /// Quotient `self / other`.
    pub fn div(&self, other: &Jet2) -> Result<Jet2, JetError> {
        Ok(self.prod(&other.recip()?))
    }

    /// Square root; requires a positive value, except that an order-0 jet
    /// with value zero maps to zero.
    pub fn sqrt(&self) -> Result<Jet2, JetError> {
        let x0 = self.value();
        if self.order() == 0 && x0 == 0.0 {
            return Ok(*self);
        }
        if x0 <= 0.0 || !x0.is_finite() {
            return Err(JetError::Domain(format!("sqrt of jet with value {x0}")));
        }
        let s = x0.sqrt();
        // binomial series of (x0 + d)^{1/2}
        let mut t = [0.0; 5];
        let mut coef = 1.0;
        let mut pw = s;
        for (k, tk) in t.iter_mut().enumerate() {
            *tk = coef * pw;
            coef *= (0.5 - k as f64) / (k as f64 + 1.0);
            pw /= x0;
        }
        Ok(self.compose_series(&t))
    }

    /// Sine.
    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose_series(&[s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }

    /// Cosine.
    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose_series(&[c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }

    /// Integer power; negative exponents require a nonzero value.
    pub fn powi(&self, n: i32) -> Result<Jet2, JetError> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Jet2::constant(1.0, self.order()).expect("valid order");
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.prod(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.prod(&b);
            }
        }
        Ok(acc)
    }

    /// Partial derivative with respect to `u` (`var = 0`) or `v` (`var = 1`),
    /// one order lower.
    pub fn partial(&self, var: usize) -> Result<Jet2, JetError> {
        let n = self.order();
        if n == 0 {
            return Err(JetError::OrderUnderflow);
        }
        let mut out = Jet2 { order: (n - 1) as u8, c: [0.0; CAP] };
        for d in 0..n {
            for j in 0..=d {
                let i = d - j;
                out.c[index(i, j)] = if var == 0 {
                    (i + 1) as f64 * self.c[index(i + 1, j)]
                } else {
                    (j + 1) as f64 * self.c[index(i, j + 1)]
                };
            }
        }
        Ok(out)
    }

    /// Evaluates the Taylor polynomial at the displacement `(du, dv)`.
    pub fn eval_at(&self, du: f64, dv: f64) -> f64 {
        let n = self.order();
        let mut sum = 0.0;
        for d in (0..=n).rev() {
            let mut s = 0.0;
            for j in 0..=d {
                s += self.c[index(d - j, j)] * du.powi((d - j) as i32) * dv.powi(j as i32);
            }
            sum += s;
        }
        sum
    }

    /// Composition `f(p(s,t), q(s,t))` where `p` and `q` have zero constant
    /// term; the result is a jet in `(s, t)` of order `min(order(f), order(p), order(q))`.
    pub fn compose(&self, p: &Jet2, q: &Jet2) -> Jet2 {
        let n = self.order().min(p.order()).min(q.order());
        let p = p.truncate(n).with_value(0.0);
        let q = q.truncate(n).with_value(0.0);
        // powers of p and q up to n
        let one = Jet2::constant(1.0, n).expect("valid order");
        let mut pp = [one; MAX_ORDER + 1];
        let mut qp = [one; MAX_ORDER + 1];
        for k in 1..=n {
            pp[k] = pp[k - 1].prod(&p);
            qp[k] = qp[k - 1].prod(&q);
        }
        let mut out = Jet2::zero(n).expect("valid order");
        for d in 0..=n {
            for j in 0..=d {
                let a = self.c[index(d - j, j)];
                if a != 0.0 {
                    out += pp[d - j].prod(&qp[j]).scale(a);
                }
            }
        }
        out
    }

    /// Re-expands the jet in linear coordinates `(s, t)` with
    /// `(du, dv) = M (s, t)`.
    pub fn linear_change(&self, m: [[f64; 2]; 2]) -> Jet2 {
        let n = self.order();
        let mut p = Jet2::zero(n).expect("valid order");
        let mut q = p;
        if n >= 1 {
            p.c[index(1, 0)] = m[0][0];
            p.c[index(0, 1)] = m[0][1];
            q.c[index(1, 0)] = m[1][0];
            q.c[index(0, 1)] = m[1][1];
        }
        self.compose(&p, &q)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let n = self.order().min(rhs.order());
        let mut out = self.truncate(n);
        for k in 0..coeff_count(n) {
            out.c[k] += rhs.c[k];
        }
        out
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.prod(&rhs)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.c[0] -= rhs;
        self
    }
}

/// Dot product of two jet vectors.
pub fn dot<const D: usize>(a: &[Jet2; D], b: &[Jet2; D]) -> Jet2 {
    let mut s = a[0].prod(&b[0]);
    for k in 1..D {
        s += a[k].prod(&b[k]);
    }
    s
}
