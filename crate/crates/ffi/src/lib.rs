//! C ABI over `ckn-eigen`.
//!
//! Every function returns a [`CknStatus`]; on failure the message is kept
//! per thread and read back with [`ckn_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ckn_eigen::assembly::{DiscreteOperatorPair, Geometry};
use ckn_eigen::config::RunConfig;
use ckn_eigen::eigensolve::solve_successive;
use ckn_eigen::inequalities::{critical_exponent, hardy_constant};
use ckn_eigen::oracle::{oracle_eigen, RadialProblem, ShootSettings};

/// Status codes; the first four match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CknStatus {
    Ok = 0,
    Config = 1,
    Numerical = 2,
    Io = 3,
    NullPointer = 4,
    Panic = 5,
    BufferTooSmall = 6,
}

/// An assembled problem.
pub struct CknSolver {
    config: RunConfig,
    pair: DiscreteOperatorPair,
}

/// Eigenpairs computed by [`ckn_solver_solve`].
pub struct CknSequence {
    lambdas: Vec<f64>,
    residuals: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    partial: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CknStatus, String);

impl From<ckn_eigen::Error> for Failure {
    fn from(e: ckn_eigen::Error) -> Self {
        let status = match e.exit_code() {
            1 => CknStatus::Config,
            3 => CknStatus::Io,
            _ => CknStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CknStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CknStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            CknStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CknStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CknStatus::Config, format!("{what} is not valid UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn build_solver(config: RunConfig) -> Result<*mut CknSolver, Failure> {
    let pair = config.problem.assemble()?;
    Ok(Box::into_raw(Box::new(CknSolver { config, pair })))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ckn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ckn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Assembles a builtin preset.
///
/// # Safety
/// `name` must be a NUL-terminated string; `solver` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ckn_solver_new_from_preset(name: *const c_char, solver: *mut *mut CknSolver) -> CknStatus {
    guard(|| {
        let slot = out(solver, "solver")?;
        *slot = std::ptr::null_mut();
        *slot = build_solver(RunConfig::preset(text(name, "name")?)?)?;
        Ok(())
    })
}

/// Assembles a problem from TOML configuration text. Relative paths in the
/// text resolve against the working directory.
///
/// # Safety
/// `config` must be a NUL-terminated string; `solver` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ckn_solver_new_from_config(config: *const c_char, solver: *mut *mut CknSolver) -> CknStatus {
    guard(|| {
        let slot = out(solver, "solver")?;
        *slot = std::ptr::null_mut();
        *slot = build_solver(RunConfig::from_toml(text(config, "config")?, None)?)?;
        Ok(())
    })
}

/// # Safety
/// `solver` must come from a `ckn_solver_new_*` call and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ckn_solver_free(solver: *mut CknSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Number of unknowns of the assembled pencil.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ckn_solver_order(solver: *const CknSolver, order: *mut usize) -> CknStatus {
    guard(|| {
        *out(order, "order")? = handle(solver, "solver")?.pair.order();
        Ok(())
    })
}

/// Computes the first `count` positive eigenpairs (`count = 0` uses the configured count).
/// A partial result is not an error; see [`ckn_sequence_is_partial`].
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ckn_solver_solve(
    solver: *const CknSolver,
    count: usize,
    sequence: *mut *mut CknSequence,
) -> CknStatus {
    guard(|| {
        let slot = out(sequence, "sequence")?;
        *slot = std::ptr::null_mut();
        let s = handle(solver, "solver")?;
        let mut settings = s.config.problem.settings(s.config.seed);
        if count > 0 {
            settings.count = count;
        }
        let seq = solve_successive(&s.pair, &settings)?;
        *slot = Box::into_raw(Box::new(CknSequence {
            lambdas: seq.lambdas(),
            residuals: seq.pairs.iter().map(|p| p.residual).collect(),
            partial: seq.is_partial(),
            vectors: seq.pairs.into_iter().map(|p| p.vector).collect(),
        }));
        Ok(())
    })
}

/// # Safety
/// `sequence` must come from [`ckn_solver_solve`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ckn_sequence_free(sequence: *mut CknSequence) {
    if !sequence.is_null() {
        drop(Box::from_raw(sequence));
    }
}

/// Number of eigenpairs found.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ckn_sequence_len(sequence: *const CknSequence, len: *mut usize) -> CknStatus {
    guard(|| {
        *out(len, "len")? = handle(sequence, "sequence")?.lambdas.len();
        Ok(())
    })
}

/// Whether fewer eigenpairs than requested were found.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ckn_sequence_is_partial(sequence: *const CknSequence, partial: *mut bool) -> CknStatus {
    guard(|| {
        *out(partial, "partial")? = handle(sequence, "sequence")?.partial;
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], buffer: *mut f64, capacity: usize) -> Result<(), Failure> {
    if capacity < src.len() {
        return Err(Failure(
            CknStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buffer.is_null() {
        return Err(null("buffer"));
    }
    std::slice::from_raw_parts_mut(buffer, src.len()).copy_from_slice(src);
    Ok(())
}

/// Copies the eigenvalues (ascending) into `buffer`.
///
/// # Safety
/// `buffer` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ckn_sequence_eigenvalues(
    sequence: *const CknSequence,
    buffer: *mut f64,
    capacity: usize,
) -> CknStatus {
    guard(|| copy_out(&handle(sequence, "sequence")?.lambdas, buffer, capacity))
}

fn index_of(seq: &CknSequence, index: usize) -> Result<usize, Failure> {
    if index >= seq.lambdas.len() {
        return Err(Failure(
            CknStatus::Config,
            format!("index {index} out of range (sequence has {})", seq.lambdas.len()),
        ));
    }
    Ok(index)
}

/// Copies eigenvector `index` (0-based, B-normalized nodal values) into `buffer`.
///
/// # Safety
/// `buffer` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ckn_sequence_eigenvector(
    sequence: *const CknSequence,
    index: usize,
    buffer: *mut f64,
    capacity: usize,
) -> CknStatus {
    guard(|| {
        let seq = handle(sequence, "sequence")?;
        copy_out(&seq.vectors[index_of(seq, index)?], buffer, capacity)
    })
}

/// Relative residual `||A e - lambda B e|| / ||A e||` of pair `index`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ckn_sequence_residual(
    sequence: *const CknSequence,
    index: usize,
    residual: *mut f64,
) -> CknStatus {
    guard(|| {
        let seq = handle(sequence, "sequence")?;
        *out(residual, "residual")? = seq.residuals[index_of(seq, index)?];
        Ok(())
    })
}

fn check_parameters(dimension: usize, alpha: f64) -> Result<(), Failure> {
    if dimension < 3 {
        return Err(Failure(CknStatus::Config, "dimension must be at least 3".into()));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Failure(
            CknStatus::Config,
            format!("alpha must lie in the open interval (0,2), got {alpha}"),
        ));
    }
    Ok(())
}

/// `2N / (N - 2 + alpha)`.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ckn_critical_exponent(dimension: usize, alpha: f64, value: *mut f64) -> CknStatus {
    guard(|| {
        check_parameters(dimension, alpha)?;
        *out(value, "value")? = critical_exponent(dimension, alpha);
        Ok(())
    })
}

/// `(2 / (N - 2 + alpha))^2`.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ckn_hardy_constant(dimension: usize, alpha: f64, value: *mut f64) -> CknStatus {
    guard(|| {
        check_parameters(dimension, alpha)?;
        *out(value, "value")? = hardy_constant(dimension, alpha);
        Ok(())
    })
}

/// Shooting-oracle eigenvalue `n` (1-based) for a radial solver.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ckn_oracle_eigen(
    solver: *const CknSolver,
    n: usize,
    lambda: *mut f64,
    certified: *mut bool,
) -> CknStatus {
    guard(|| {
        let s = handle(solver, "solver")?;
        if !matches!(s.pair.geometry, Geometry::Radial(_)) {
            return Err(Failure(
                CknStatus::Config,
                "the shooting oracle needs a radial geometry".into(),
            ));
        }
        if n == 0 {
            return Err(Failure(CknStatus::Config, "mode index n starts at 1".into()));
        }
        let problem = RadialProblem {
            dimension: s.config.problem.dimension,
            alpha: s.config.problem.alpha,
            weight: &s.config.problem.weight,
            radius: s.pair.truncation_radius(),
        };
        let settings = ShootSettings {
            rtol: s.config.oracle.rtol,
            ..ShootSettings::default()
        };
        let r = oracle_eigen(&problem, n, &settings)?;
        let (l, c) = (out(lambda, "lambda")?, out(certified, "certified")?);
        *l = r.lambda;
        *c = r.certified;
        Ok(())
    })
}
