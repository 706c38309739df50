//! C ABI for the r4gauss engine.
//!
//! Surfaces are loaded into opaque [`R4Surface`] handles, queried through
//! functions returning an [`R4Status`] code, and released with
//! [`r4_surface_free`]. Results are written into caller-provided plain
//! structs. When a call fails, a message describing the failure is kept per
//! thread and can be read with [`r4_last_error`] until the next failing call
//! on that thread.
//!
//! The header `include/r4gauss.h` is generated from this file by the build
//! script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use r4gauss::atlas::Atlas;
use r4gauss::cli::surface::SurfaceFile;
use r4gauss::gaussmap::Component;
use r4gauss::integrate::{Field, IntegrateError};
use r4gauss::invariants::{invariants_at, jacobian_by_pullback};
use r4gauss::singular::analyze_singular_set_tol;
use r4gauss::topology::{build_mesh, gauss_bonnet_report, sample_nodes};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R4Status {
    /// Success.
    R4Ok = 0,
    /// A required pointer argument was null.
    R4NullPointer = 1,
    /// A string argument was not valid UTF-8.
    R4InvalidUtf8 = 2,
    /// The surface description could not be parsed or built.
    R4Parse = 3,
    /// A point or chart lies outside the surface, or the evaluation failed.
    R4Domain = 4,
    /// The operation needs a closed surface.
    R4NotClosed = 5,
    /// An argument is out of range.
    R4InvalidArgument = 6,
    /// A quadrature did not converge.
    R4NonConvergent = 7,
    /// The engine panicked; this is a bug.
    R4Internal = 8,
}

/// A parsed surface with its atlas.
pub struct R4Surface {
    file: SurfaceFile,
    atlas: Atlas,
}

/// Curvature invariants and Gauss map Jacobians at a point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct R4Invariants {
    /// Gaussian curvature `K`.
    pub k: f64,
    /// Normal curvature `K^N`.
    pub kn: f64,
    /// Discriminant `Δ` of the curvature ellipse.
    pub delta: f64,
    /// Squared mean curvature `|H|²`.
    pub h2: f64,
    /// Jacobian of `g₁`, equal to `(K + K^N)/2`.
    pub j1: f64,
    /// Jacobian of `g₂`, equal to `(K - K^N)/2`.
    pub j2: f64,
    /// Jacobian of `g₁` from the pulled-back area form.
    pub j1_pullback: f64,
    /// Jacobian of `g₂` from the pulled-back area form.
    pub j2_pullback: f64,
}

/// Summary of the singular set of one Gauss map component.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct R4SingularSummary {
    pub curves: usize,
    pub cusps_positive: usize,
    pub cusps_negative: usize,
    /// Cusp candidates that could not be classified.
    pub unresolved: usize,
    pub g1_pass: bool,
    pub g2_pass: bool,
    pub g3_pass: bool,
}

/// Global quantities and identity verdict of a closed surface.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct R4GaussBonnet {
    /// Euler characteristic of the surface.
    pub chi: i64,
    pub area: f64,
    /// `∫K dA`.
    pub total_k: f64,
    /// `∫K^N dA`.
    pub total_kn: f64,
    /// Degrees of `g₁` and `g₂` as quadrature values.
    pub degree: [f64; 2],
    /// `χ(Mᵢ⁺)` for `i = 1, 2`.
    pub chi_plus: [i64; 2],
    /// `χ(Mᵢ⁻)` for `i = 1, 2`.
    pub chi_minus: [i64; 2],
    /// Positive cusp counts for `i = 1, 2`.
    pub cusps_positive: [usize; 2],
    /// Negative cusp counts for `i = 1, 2`.
    pub cusps_negative: [usize; 2],
    /// Both components satisfy (G₁) and (G₂).
    pub generic: bool,
    /// Every asserted identity holds.
    pub pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    let c = CString::new(s).expect("interior nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type FfiResult<T> = Result<T, (R4Status, String)>;

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> R4Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => R4Status::R4Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: the engine panicked");
            R4Status::R4Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((R4Status::R4NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (R4Status::R4InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn surface_arg<'a>(p: *const R4Surface) -> FfiResult<&'a R4Surface> {
    p.as_ref().ok_or_else(|| (R4Status::R4NullPointer, "surface handle is null".to_string()))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| (R4Status::R4NullPointer, "output pointer is null".to_string()))
}

fn parse_err(e: impl std::fmt::Display) -> (R4Status, String) {
    (R4Status::R4Parse, e.to_string())
}

fn domain_err(e: impl std::fmt::Display) -> (R4Status, String) {
    (R4Status::R4Domain, e.to_string())
}

fn integrate_err(e: IntegrateError) -> (R4Status, String) {
    let status = match e {
        IntegrateError::NotClosedSurface(_) => R4Status::R4NotClosed,
        IntegrateError::NonConvergent { .. } => R4Status::R4NonConvergent,
        _ => R4Status::R4Domain,
    };
    (status, e.to_string())
}

fn component(i: u32) -> FfiResult<Component> {
    Component::from_index(i)
        .ok_or_else(|| (R4Status::R4InvalidArgument, format!("component must be 1 or 2, got {i}")))
}

fn grid_arg(s: &R4Surface, grid: usize) -> usize {
    if grid == 0 {
        s.file.options.grid
    } else {
        grid
    }
}

fn build(text: &str) -> FfiResult<Box<R4Surface>> {
    let file = SurfaceFile::parse(text).map_err(parse_err)?;
    let atlas = file.atlas().map_err(parse_err)?;
    Ok(Box::new(R4Surface { file, atlas }))
}

/// Parses a surface description in TOML and stores a new handle in `*out`.
///
/// # Safety
/// `toml` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r4_surface_from_toml(toml: *const c_char, out: *mut *mut R4Surface) -> R4Status {
    guard(|| {
        let out = out_arg(out)?;
        let s = build(str_arg(toml, "toml")?)?;
        *out = Box::into_raw(s);
        Ok(())
    })
}

/// Loads a built-in surface by name, such as `sphere` or `example2`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r4_surface_builtin(name: *const c_char, out: *mut *mut R4Surface) -> R4Status {
    guard(|| {
        let out = out_arg(out)?;
        let name = str_arg(name, "name")?;
        let text = r4gauss::fixtures::get(name)
            .ok_or_else(|| (R4Status::R4InvalidArgument, format!("no built-in surface `{name}`")))?;
        *out = Box::into_raw(build(text)?);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `surface` must be null or a handle not yet released.
#[no_mangle]
pub unsafe extern "C" fn r4_surface_free(surface: *mut R4Surface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Overrides a declared parameter and rebuilds the atlas. The handle is
/// unchanged on failure.
///
/// # Safety
/// `surface` must be a valid handle and `name` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn r4_surface_set_param(surface: *mut R4Surface, name: *const c_char, value: f64) -> R4Status {
    guard(|| {
        let s = surface.as_mut().ok_or_else(|| (R4Status::R4NullPointer, "surface handle is null".to_string()))?;
        let name = str_arg(name, "name")?;
        let mut file = s.file.clone();
        file.set_params(&[(name.to_string(), value)]).map_err(|e| (R4Status::R4InvalidArgument, e.to_string()))?;
        let atlas = file.atlas().map_err(parse_err)?;
        *s = R4Surface { file, atlas };
        Ok(())
    })
}

/// Number of charts of the surface, or 0 for a null handle.
///
/// # Safety
/// `surface` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn r4_surface_chart_count(surface: *const R4Surface) -> usize {
    surface.as_ref().map_or(0, |s| s.atlas.charts.len())
}

/// Curvature invariants at `(u, v)` in chart `chart` (0-based).
///
/// # Safety
/// `surface` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r4_invariants_at(
    surface: *const R4Surface,
    chart: usize,
    u: f64,
    v: f64,
    out: *mut R4Invariants,
) -> R4Status {
    guard(|| {
        let s = surface_arg(surface)?;
        let out = out_arg(out)?;
        let ch = s.atlas.charts.get(chart).ok_or_else(|| {
            (R4Status::R4InvalidArgument, format!("chart index {chart} out of range ({} charts)", s.atlas.charts.len()))
        })?;
        if !ch.contains(u, v) {
            return Err((R4Status::R4Domain, format!("({u}, {v}) is outside the domain of chart {}", ch.name)));
        }
        let inv = invariants_at(ch, u, v).map_err(domain_err)?;
        *out = R4Invariants {
            k: inv.k,
            kn: inv.kn,
            delta: inv.delta,
            h2: inv.h2,
            j1: inv.jacobian(Component::One),
            j2: inv.jacobian(Component::Two),
            j1_pullback: jacobian_by_pullback(ch, u, v, Component::One).map_err(domain_err)?,
            j2_pullback: jacobian_by_pullback(ch, u, v, Component::Two).map_err(domain_err)?,
        };
        Ok(())
    })
}

/// Traces and classifies the singular set of component `component` (1 or
/// 2) at grid resolution `grid`; 0 selects the surface's default grid.
///
/// # Safety
/// `surface` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r4_singular_summary(
    surface: *const R4Surface,
    component: u32,
    grid: usize,
    out: *mut R4SingularSummary,
) -> R4Status {
    guard(|| {
        let s = surface_arg(surface)?;
        let out = out_arg(out)?;
        let c = self::component(component)?;
        let mesh = build_mesh(&s.atlas, grid_arg(s, grid)).map_err(domain_err)?;
        let samples = sample_nodes(&s.atlas, &mesh);
        let a = analyze_singular_set_tol(&s.atlas, &mesh, &samples, c, s.file.options.tol);
        let (plus, minus) = a.cusp_counts();
        *out = R4SingularSummary {
            curves: a.curves.len(),
            cusps_positive: plus,
            cusps_negative: minus,
            unresolved: a.unresolved.len(),
            g1_pass: a.g1.pass,
            g2_pass: a.g2.pass,
            g3_pass: a.g3.pass,
        };
        Ok(())
    })
}

/// Computes the global quantities of a closed surface and checks the
/// Gauss–Bonnet type identities; `grid` 0 selects the default grid.
///
/// # Safety
/// `surface` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r4_gauss_bonnet(surface: *const R4Surface, grid: usize, out: *mut R4GaussBonnet) -> R4Status {
    guard(|| {
        let s = surface_arg(surface)?;
        let out = out_arg(out)?;
        let r = gauss_bonnet_report(&s.atlas, grid_arg(s, grid), s.file.options.tol).map_err(integrate_err)?;
        let [t1, t2] = &r.components;
        *out = R4GaussBonnet {
            chi: r.chi_m,
            area: r.integrals.get(Field::Area).value,
            total_k: r.integrals.get(Field::K).value,
            total_kn: r.integrals.get(Field::KN).value,
            degree: [t1.degree.value.value, t2.degree.value.value],
            chi_plus: [t1.chi_plus, t2.chi_plus],
            chi_minus: [t1.chi_minus, t2.chi_minus],
            cusps_positive: [t1.s_plus, t2.s_plus],
            cusps_negative: [t1.s_minus, t2.s_minus],
            generic: r.generic,
            pass: r.pass(),
        };
        Ok(())
    })
}

/// Message of the last failing call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn r4_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn r4_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
