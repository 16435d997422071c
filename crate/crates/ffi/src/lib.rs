//! C ABI over the `fracbem` solver.
//!
//! Objects cross the boundary as opaque handles created by `fracbem_*_new`
//! style constructors and released with the matching `*_free`. Every fallible
//! call returns a [`FracbemStatus`]; on failure a message describing the error
//! is kept per thread and can be read with [`fracbem_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use fracbem::bem::{assemble_galerkin, eval_single_layer, solve_density, BoundaryDensity, SingleLayerMatrix, TraceData};
use fracbem::geometry::{discretize, gauss_rule, BoundaryCurve, PanelMesh, Point2};
use fracbem::specfun::{riesz_constant, FracOrder};
use fracbem::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracbemStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Domain = 3,
    Singularity = 4,
    Data = 5,
    Assembly = 6,
    Solver = 7,
    Evaluation = 8,
    Oracle = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

/// Boundary curve discretized into straight panels.
pub struct FracbemMesh {
    mesh: Arc<PanelMesh>,
}

/// Assembled Galerkin single-layer matrix.
pub struct FracbemMatrix {
    matrix: SingleLayerMatrix,
}

/// Piecewise-constant boundary density together with its order.
pub struct FracbemDensity {
    density: BoundaryDensity,
    order: FracOrder,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FracbemStatus {
    match e {
        Error::Domain(_) => FracbemStatus::Domain,
        Error::Config(_) => FracbemStatus::Config,
        Error::Singularity(_) => FracbemStatus::Singularity,
        Error::Data(_) => FracbemStatus::Data,
        Error::Assembly(_) => FracbemStatus::Assembly,
        Error::Solver(_) => FracbemStatus::Solver,
        Error::Evaluation(_) => FracbemStatus::Evaluation,
        Error::Oracle(_) => FracbemStatus::Oracle,
        Error::Io(_) => FracbemStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), FracbemStatus>>(f: F) -> FracbemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FracbemStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            FracbemStatus::Panic
        }
    }
}

fn fail(e: Error) -> FracbemStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> FracbemStatus {
    set_error(format!("{what} is null"));
    FracbemStatus::NullPointer
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], FracbemStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], FracbemStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, FracbemStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

fn points(xy: &[f64]) -> Vec<Point2> {
    xy.chunks_exact(2).map(|c| [c[0], c[1]]).collect()
}

fn emit<T>(out: *mut *mut T, value: T) -> Result<(), FracbemStatus> {
    // SAFETY: callers check `out` for null before building `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fracbem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Riesz kernel constant `C(d, α)` for `α ∈ (0, 1)`, `d ∈ {2, 3}`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_riesz_constant(dim: usize, alpha: f64, out: *mut f64) -> FracbemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let o = FracOrder::kernel(dim, alpha).map_err(fail)?;
        *out = riesz_constant(o);
        Ok(())
    })
}

/// Circle of radius `radius` about `(cx, cy)` split into `n_panels` chords.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_mesh_circle(
    cx: f64,
    cy: f64,
    radius: f64,
    n_panels: usize,
    out: *mut *mut FracbemMesh,
) -> FracbemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let curve = BoundaryCurve::circle([cx, cy], radius).map_err(fail)?;
        let mesh = discretize(&curve, n_panels).map_err(fail)?;
        emit(out, FracbemMesh { mesh: Arc::new(mesh) })
    })
}

/// Polygon through `n_vertices` points `xy = [x0, y0, x1, y1, ...]`.
///
/// # Safety
/// `xy` must point to `2 * n_vertices` doubles and `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_mesh_polygon(
    xy: *const f64,
    n_vertices: usize,
    n_panels: usize,
    out: *mut *mut FracbemMesh,
) -> FracbemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = slice(xy, 2 * n_vertices, "xy")?;
        let curve = BoundaryCurve::polygon(points(v)).map_err(fail)?;
        let mesh = discretize(&curve, n_panels).map_err(fail)?;
        emit(out, FracbemMesh { mesh: Arc::new(mesh) })
    })
}

/// Number of panels, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fracbem_mesh_len(mesh: *const FracbemMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.len())
}

/// Copies panel midpoints as `[x0, y0, x1, y1, ...]` into `out` of length `2 * len`.
///
/// # Safety
/// `mesh` must be a live handle and `out` must hold `2 * len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracbem_mesh_midpoints(mesh: *const FracbemMesh, out: *mut f64, len: usize) -> FracbemStatus {
    guard(|| {
        let m = &handle(mesh, "mesh")?.mesh;
        if len < m.len() {
            set_error(format!("buffer holds {len} points, mesh has {}", m.len()));
            return Err(FracbemStatus::BufferTooSmall);
        }
        let dst = slice_mut(out, 2 * m.len(), "out")?;
        for (d, p) in dst.chunks_exact_mut(2).zip(m.midpoints()) {
            d.copy_from_slice(p);
        }
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracbem_mesh_free(mesh: *mut FracbemMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Assembles the Galerkin matrix of order `alpha` in 2D with `quad_order` Gauss points.
///
/// # Safety
/// `mesh` must be a live handle and `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_assemble(
    mesh: *const FracbemMesh,
    alpha: f64,
    quad_order: usize,
    out: *mut *mut FracbemMatrix,
) -> FracbemStatus {
    guard(|| {
        let m = handle(mesh, "mesh")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let order = FracOrder::new(2, alpha).map_err(fail)?;
        let q = gauss_rule(quad_order).map_err(fail)?;
        let matrix = assemble_galerkin(m.mesh.clone(), order, &q).map_err(fail)?;
        emit(out, FracbemMatrix { matrix })
    })
}

/// Matrix dimension, or 0 for a null handle.
///
/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fracbem_matrix_size(matrix: *const FracbemMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.matrix.len())
}

/// Copies the entries row-major into `out` of length `len ≥ n²`.
///
/// # Safety
/// `matrix` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracbem_matrix_entries(
    matrix: *const FracbemMatrix,
    out: *mut f64,
    len: usize,
) -> FracbemStatus {
    guard(|| {
        let a = &handle(matrix, "matrix")?.matrix;
        let n = a.len();
        if len < n * n {
            set_error(format!("buffer holds {len} entries, matrix has {}", n * n));
            return Err(FracbemStatus::BufferTooSmall);
        }
        let dst = slice_mut(out, n * n, "out")?;
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = a.entries()[(i, j)];
            }
        }
        Ok(())
    })
}

/// Writes 1 if Cholesky factorization succeeds, else 0.
///
/// # Safety
/// `matrix` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_matrix_is_spd(matrix: *const FracbemMatrix, out: *mut i32) -> FracbemStatus {
    guard(|| {
        let a = &handle(matrix, "matrix")?.matrix;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = i32::from(a.is_positive_definite());
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracbem_matrix_free(matrix: *mut FracbemMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Solves for the density whose panel-averaged trace is `trace[0..n]`.
///
/// # Safety
/// `matrix` must be a live handle, `trace` must hold `n` doubles and `out`
/// must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_solve(
    matrix: *const FracbemMatrix,
    trace: *const f64,
    n: usize,
    out: *mut *mut FracbemDensity,
) -> FracbemStatus {
    guard(|| {
        let a = &handle(matrix, "matrix")?.matrix;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = TraceData::new(slice(trace, n, "trace")?.to_vec()).map_err(fail)?;
        let s = solve_density(a, &t).map_err(fail)?;
        emit(
            out,
            FracbemDensity {
                density: s.density,
                order: a.order(),
            },
        )
    })
}

/// Copies the panel values of the density into `out` of length `len`.
///
/// # Safety
/// `density` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracbem_density_coeffs(
    density: *const FracbemDensity,
    out: *mut f64,
    len: usize,
) -> FracbemStatus {
    guard(|| {
        let g = handle(density, "density")?.density.coeffs();
        if len < g.len() {
            set_error(format!("buffer holds {len} values, density has {}", g.len()));
            return Err(FracbemStatus::BufferTooSmall);
        }
        slice_mut(out, g.len(), "out")?.copy_from_slice(g);
        Ok(())
    })
}

/// `‖G‖_{L₁}` of the density.
///
/// # Safety
/// `density` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracbem_density_l1_norm(density: *const FracbemDensity, out: *mut f64) -> FracbemStatus {
    guard(|| {
        let g = handle(density, "density")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = g.density.l1_norm();
        Ok(())
    })
}

/// Evaluates `S_α G` at `n_points` points `xy = [x0, y0, ...]` off the boundary.
///
/// # Safety
/// `density` must be a live handle, `xy` must hold `2 * n_points` doubles and
/// `out` must hold `n_points` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracbem_density_eval(
    density: *const FracbemDensity,
    xy: *const f64,
    n_points: usize,
    out: *mut f64,
) -> FracbemStatus {
    guard(|| {
        let g = handle(density, "density")?;
        let pts = points(slice(xy, 2 * n_points, "xy")?);
        let dst = slice_mut(out, n_points, "out")?;
        let v = eval_single_layer(&g.density, g.order, &pts).map_err(fail)?;
        dst.copy_from_slice(&v);
        Ok(())
    })
}

/// # Safety
/// `density` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracbem_density_free(density: *mut FracbemDensity) {
    if !density.is_null() {
        drop(Box::from_raw(density));
    }
}
