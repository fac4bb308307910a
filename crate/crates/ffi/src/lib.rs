//! C ABI over `fekete-sphere`.
//!
//! Every fallible function returns an [`FsStatus`]; outputs go through
//! pointer arguments. On failure a message is stored per thread and can be
//! read with [`fs_last_error`]. Point sets and cardinal bases are opaque
//! handles owned by the caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fekete_sphere::analysis::{fejes_toth_bound, frame_bounds_p2, molnar_kappa, separation};
use fekete_sphere::geometry::{read_points, write_points};
use fekete_sphere::harmonics::space_dimension;
use fekete_sphere::interpolation::{cardinal_basis, CardinalBasis};
use fekete_sphere::solver::{fekete_points, vandermonde};
use fekete_sphere::{Error, FeketeConfig, PointSet, PolySpace, SpherePoint};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    UnsupportedDimension = 4,
    Singular = 5,
    Io = 6,
    Parse = 7,
    MissingDegree = 8,
    Overflow = 9,
    BufferTooSmall = 10,
    Panic = 11,
    Internal = 12,
}

/// A set of points on S¹ or S², optionally carrying the solver log.
pub struct FsPointSet {
    inner: PointSet,
    log: Option<CString>,
}

/// Cardinal functions of a fundamental system.
pub struct FsCardinalBasis {
    inner: CardinalBasis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FsStatus {
    match err {
        Error::DimensionMismatch { .. } => FsStatus::DimensionMismatch,
        Error::UnsupportedDimension(_) => FsStatus::UnsupportedDimension,
        Error::Singular | Error::RankDeficient { .. } => FsStatus::Singular,
        Error::Io { .. } => FsStatus::Io,
        Error::Parse { .. } => FsStatus::Parse,
        Error::MissingDegree(_) => FsStatus::MissingDegree,
        Error::Overflow(_) => FsStatus::Overflow,
        Error::InvalidArgument(_) | Error::DegreeMismatch(_) | Error::TooFewPoints { .. } => FsStatus::InvalidArgument,
        Error::InsufficientExactness { .. } => FsStatus::InvalidArgument,
        _ => FsStatus::Internal,
    }
}

fn fail(status: FsStatus, msg: impl Into<String>) -> FsStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), FsStatus>) -> FsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(FsStatus::Panic, "internal panic"),
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, FsStatus>;
}

impl<T> IntoStatus<T> for Result<T, Error> {
    fn status(self) -> Result<T, FsStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), FsStatus> {
    if p.is_null() {
        Err(fail(FsStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, FsStatus> {
    non_null(path, "path")?;
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| fail(FsStatus::InvalidArgument, "path is not valid UTF-8"))
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// π_L, the dimension of polynomials of degree ≤ L on S^d.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_space_dimension(d: usize, degree: usize, out: *mut usize) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = space_dimension(d, degree).status()?;
        Ok(())
    })
}

/// Computes Fekete points of degree L on S^d with the default solver
/// settings and the given seed.
///
/// # Safety
/// `out` must be valid for one write; the handle is released with
/// [`fs_point_set_free`].
#[no_mangle]
pub unsafe extern "C" fn fs_fekete_points(d: usize, degree: usize, seed: u64, out: *mut *mut FsPointSet) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        let space = PolySpace::new(d, degree).status()?;
        let config = FeketeConfig {
            seed,
            ..FeketeConfig::default()
        };
        let sol = fekete_points(&space, &config).status()?;
        let log = serde_json::to_string(&sol.log).map_err(|e| fail(FsStatus::Internal, e.to_string()))?;
        *out = into_handle(FsPointSet {
            inner: sol.points,
            log: Some(CString::new(log).expect("JSON has no nul")),
        });
        Ok(())
    })
}

/// Builds a point set from `n` rows of `d + 1` coordinates (row major).
/// Rows are normalized; zero rows and exact duplicates are rejected.
///
/// # Safety
/// `coords` must point to `n * (d + 1)` readable doubles and `out` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_new(d: usize, coords: *const f64, n: usize, out: *mut *mut FsPointSet) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        if n > 0 {
            non_null(coords, "coords")?;
        }
        let stride = d + 1;
        let flat = if n == 0 { &[][..] } else { std::slice::from_raw_parts(coords, n * stride) };
        let points = flat
            .chunks(stride)
            .map(|c| SpherePoint::new(c.to_vec()))
            .collect::<Result<Vec<_>, _>>()
            .status()?;
        let set = PointSet::new(d, points).status()?;
        *out = into_handle(FsPointSet { inner: set, log: None });
        Ok(())
    })
}

/// Reads a point file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_read(path: *const c_char, out: *mut *mut FsPointSet) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = path_arg(path)?;
        let set = read_points(path).status()?;
        *out = into_handle(FsPointSet { inner: set, log: None });
        Ok(())
    })
}

/// Writes a point file.
///
/// # Safety
/// `set` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_write(set: *const FsPointSet, path: *const c_char) -> FsStatus {
    guard(|| {
        non_null(set, "set")?;
        let path = path_arg(path)?;
        write_points(&(*set).inner, path).status()
    })
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_len(set: *const FsPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Sphere dimension d, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_dim(set: *const FsPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.dim())
}

/// Copies the coordinates (row major, `len * (d + 1)` doubles) into `buf`.
///
/// # Safety
/// `set` must be a live handle and `buf` writable for `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_coords(set: *const FsPointSet, buf: *mut f64, buf_len: usize) -> FsStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(buf, "buf")?;
        let s = &(*set).inner;
        let need = s.len() * (s.dim() + 1);
        if buf_len < need {
            return Err(fail(FsStatus::BufferTooSmall, format!("need {need} doubles, got {buf_len}")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (dst, p) in out.chunks_mut(s.dim() + 1).zip(s.iter()) {
            dst.copy_from_slice(p.coords());
        }
        Ok(())
    })
}

/// Solver log as JSON for sets produced by [`fs_fekete_points`], else NULL.
/// The string lives as long as the handle.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_log_json(set: *const FsPointSet) -> *const c_char {
    set.as_ref()
        .and_then(|s| s.log.as_ref())
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fs_point_set_free(set: *mut FsPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// log|det V| of the degree-L Vandermonde matrix of a set of π_L points;
/// −∞ when singular.
///
/// # Safety
/// `set` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_logabsdet(set: *const FsPointSet, degree: usize, out: *mut f64) -> FsStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        let s = &(*set).inner;
        let space = PolySpace::new(s.dim(), degree).status()?;
        let v = vandermonde(&space, s).status()?;
        *out = v
            .logabsdet()
            .ok_or_else(|| fail(FsStatus::InvalidArgument, format!("{} points for π_L = {}", s.len(), space.dim())))?;
        Ok(())
    })
}

/// Minimal pairwise geodesic distance.
///
/// # Safety
/// `set` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_separation(set: *const FsPointSet, out: *mut f64) -> FsStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        *out = separation(&(*set).inner).status()?;
        Ok(())
    })
}

/// Extreme eigenvalues A ≤ B of the normalized Gram matrix for degree L.
///
/// # Safety
/// `set` must be a live handle; `lower` and `upper` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_frame_bounds(set: *const FsPointSet, degree: usize, lower: *mut f64, upper: *mut f64) -> FsStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(lower, "lower")?;
        non_null(upper, "upper")?;
        let s = &(*set).inner;
        let fb = frame_bounds_p2(&PolySpace::new(s.dim(), degree).status()?, s).status()?;
        *lower = fb.lower;
        *upper = fb.upper;
        Ok(())
    })
}

/// Cardinal functions of degree L on a set of π_L points.
///
/// # Safety
/// `set` must be a live handle and `out` valid for one write; the result
/// is released with [`fs_cardinal_basis_free`].
#[no_mangle]
pub unsafe extern "C" fn fs_cardinal_basis_new(set: *const FsPointSet, degree: usize, out: *mut *mut FsCardinalBasis) -> FsStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        let s = &(*set).inner;
        let space = PolySpace::new(s.dim(), degree).status()?;
        *out = into_handle(FsCardinalBasis {
            inner: cardinal_basis(&space, s).status()?,
        });
        Ok(())
    })
}

/// Number of cardinal functions (π_L), or 0 for NULL.
///
/// # Safety
/// `basis` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fs_cardinal_basis_len(basis: *const FsCardinalBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.len())
}

/// Evaluates every ℓ_i at the point `z` (d + 1 coordinates, normalized on
/// input) into `out`.
///
/// # Safety
/// `basis` must be a live handle, `z` readable for d + 1 doubles and `out`
/// writable for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fs_cardinal_eval(basis: *const FsCardinalBasis, z: *const f64, out: *mut f64, out_len: usize) -> FsStatus {
    guard(|| {
        non_null(basis, "basis")?;
        non_null(z, "z")?;
        non_null(out, "out")?;
        let b = &(*basis).inner;
        let n = b.len();
        if out_len < n {
            return Err(fail(FsStatus::BufferTooSmall, format!("need {n} doubles, got {out_len}")));
        }
        let coords = std::slice::from_raw_parts(z, b.space().d() + 1).to_vec();
        let values = b.eval_all(&SpherePoint::new(coords).status()?).status()?;
        std::slice::from_raw_parts_mut(out, n).copy_from_slice(values.as_slice());
        Ok(())
    })
}

/// # Safety
/// `basis` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fs_cardinal_basis_free(basis: *mut FsCardinalBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Fejes Tóth bound on S²: ω_L and the distance bound d_L.
///
/// # Safety
/// `omega` and `d_l` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_fejes_toth_bound(degree: usize, omega: *mut f64, d_l: *mut f64) -> FsStatus {
    guard(|| {
        non_null(omega, "omega")?;
        non_null(d_l, "d_l")?;
        let c = fejes_toth_bound(2, degree).status()?;
        *omega = c.omega;
        *d_l = c.d_l;
        Ok(())
    })
}

/// κ = 4·(π/√12)^{1/2}.
#[no_mangle]
pub extern "C" fn fs_molnar_kappa() -> f64 {
    molnar_kappa()
}
