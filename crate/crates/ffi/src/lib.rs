//! C ABI over the qtraj engine.
//!
//! Objects are opaque heap handles released with the matching `*_free`. Every entry point
//! returns a [`QtrajStatus`]; on failure the message is available from
//! [`qtraj_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use qtraj::numerics::ComplexMatrix;
use qtraj::protocol::{report, QubitProtocol, Step4};
use qtraj::states::{pythagorean_split, DensityMatrix, Hamiltonian};
use qtraj::trajectories::{
    build_step3_ensemble, build_step3_ensemble_with_reference, classical_heat_distribution,
    entropy_production_stats, integral_fluctuation_sum, quantum_heat_distribution, Step3Ensemble,
};
use qtraj::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QtrajStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    InvalidMatrix = 3,
    OutOfDomain = 4,
    Infeasible = 5,
    TooLarge = 6,
    InvalidArgument = 7,
    Panic = 8,
}

impl From<&Error> for QtrajStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::DimensionError { .. } => {
                QtrajStatus::DimensionMismatch
            }
            Error::NonHermitianInput { .. }
            | Error::NonUnitaryInput { .. }
            | Error::InvalidDensity(_)
            | Error::InvalidHamiltonian(_)
            | Error::BlochNormExceeded(_) => QtrajStatus::InvalidMatrix,
            Error::DomainError { .. }
            | Error::NonpositiveTemperature(_)
            | Error::AlphaOutOfRange(_)
            | Error::NegativeTime(_)
            | Error::MixingOutOfRange(_)
            | Error::ThetaOutOfRange(_)
            | Error::InfiniteNonthermality => QtrajStatus::OutOfDomain,
            Error::ZeroProbabilityRecord
            | Error::RankDeficientState(_)
            | Error::InfeasibleTerminal(_)
            | Error::SpectrumMismatch(_) => QtrajStatus::Infeasible,
            Error::EnsembleTooLarge(..) | Error::DimensionTooLarge(_) => QtrajStatus::TooLarge,
            Error::InvalidArgument(_) => QtrajStatus::InvalidArgument,
        }
    }
}

pub struct QtrajHamiltonian(Hamiltonian);
pub struct QtrajDensity(DensityMatrix);
pub struct QtrajEnsemble(Step3Ensemble);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QtrajRecord {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub probability: f64,
    pub q_heat: f64,
    pub cl_heat: f64,
    pub s_qu: f64,
    pub s_cl: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QtrajEnsembleStats {
    pub avg_q_qu: f64,
    pub var_q_qu: f64,
    pub avg_q_cl: f64,
    pub var_q_cl: f64,
    pub avg_s_qu: f64,
    pub avg_s_cl: f64,
    /// Σ P e^{-s_irr}
    pub fluctuation_sum: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QtrajEntropySplit {
    pub total: f64,
    pub quantum: f64,
    pub classical: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QtrajProtocolReport {
    pub delta_f_prot: f64,
    pub avg_w_ext: f64,
    pub avg_s_qu: f64,
    pub avg_s_cl: f64,
    pub avg_s_step4: f64,
    pub avg_q_qu: f64,
    pub avg_q_cl_step3: f64,
    pub avg_q_cl_step4: f64,
    pub avg_delta_u: f64,
    pub q_diss: f64,
    pub w_irr: f64,
    pub footprint_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(QtrajStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(QtrajStatus::from(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> QtrajStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            QtrajStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            QtrajStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(QtrajStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next qtraj call on this thread.
#[no_mangle]
pub extern "C" fn qtraj_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// H = diag(levels).
///
/// # Safety
/// `levels` must point to `dim` doubles and `out` to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qtraj_hamiltonian_new(
    levels: *const f64,
    dim: usize,
    out: *mut *mut QtrajHamiltonian,
) -> QtrajStatus {
    guard(|| {
        let levels = slice(levels, dim, "levels")?;
        let h = Hamiltonian::new(levels.to_vec())?;
        write(out, boxed(QtrajHamiltonian(h)), "out")
    })
}

/// # Safety
/// `h` must come from `qtraj_hamiltonian_new` and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qtraj_hamiltonian_free(h: *mut QtrajHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// ρ = Σ_l p_l |v_l><v_l| with the columns v_l of a row-major basis; `basis_im` may be null.
///
/// # Safety
/// `probabilities` must hold `dim` doubles, `basis_re` (and `basis_im` if non-null) `dim * dim`.
#[no_mangle]
pub unsafe extern "C" fn qtraj_density_from_spectrum(
    probabilities: *const f64,
    basis_re: *const f64,
    basis_im: *const f64,
    dim: usize,
    out: *mut *mut QtrajDensity,
) -> QtrajStatus {
    guard(|| {
        let p = slice(probabilities, dim, "probabilities")?;
        let re = slice(basis_re, dim * dim, "basis_re")?;
        let im = if basis_im.is_null() {
            None
        } else {
            Some(slice(basis_im, dim * dim, "basis_im")?)
        };
        let entries = (0..dim * dim)
            .map(|k| Complex64::new(re[k], im.map_or(0.0, |im| im[k])))
            .collect();
        let basis = ComplexMatrix::from_row_major(entries)?;
        let rho = DensityMatrix::from_spectrum(p, &basis)?;
        write(out, boxed(QtrajDensity(rho)), "out")
    })
}

/// ρ_θ = p Π[θ_-] + (1-p) Π[θ_+].
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qtraj_density_qubit(
    p: f64,
    theta: f64,
    out: *mut *mut QtrajDensity,
) -> QtrajStatus {
    guard(|| {
        let rho = DensityMatrix::qubit(p, theta)?;
        write(out, boxed(QtrajDensity(rho)), "out")
    })
}

/// Diagonal of ρ in the energy basis.
///
/// # Safety
/// `rho` must be a live handle and `out` must hold its dimension in doubles.
#[no_mangle]
pub unsafe extern "C" fn qtraj_density_populations(
    rho: *const QtrajDensity,
    out: *mut f64,
) -> QtrajStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        for (k, x) in rho.populations().into_iter().enumerate() {
            out.add(k).write(x);
        }
        Ok(())
    })
}

/// # Safety
/// `rho` must come from a qtraj density constructor and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qtraj_density_free(rho: *mut QtrajDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Thermalization ensemble of ρ̃ towards the thermal state of `h` at `temperature`.
///
/// # Safety
/// `rho` and `h` must be live handles; `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_build(
    rho: *const QtrajDensity,
    h: *const QtrajHamiltonian,
    temperature: f64,
    out: *mut *mut QtrajEnsemble,
) -> QtrajStatus {
    guard(|| {
        let ens = build_step3_ensemble(&deref(rho, "rho")?.0, &deref(h, "h")?.0, temperature)?;
        write(out, boxed(QtrajEnsemble(ens)), "out")
    })
}

/// Thermalization ensemble towards explicit reference populations.
///
/// # Safety
/// `reference` must hold as many doubles as the dimension of `rho`.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_build_with_reference(
    rho: *const QtrajDensity,
    h: *const QtrajHamiltonian,
    reference: *const f64,
    out: *mut *mut QtrajEnsemble,
) -> QtrajStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.0;
        let q = slice(reference, rho.dim(), "reference")?;
        let ens = build_step3_ensemble_with_reference(rho, &deref(h, "h")?.0, q)?;
        write(out, boxed(QtrajEnsemble(ens)), "out")
    })
}

/// # Safety
/// `ens` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_len(
    ens: *const QtrajEnsemble,
    out: *mut usize,
) -> QtrajStatus {
    guard(|| write(out, deref(ens, "ens")?.0.len(), "out"))
}

/// Record `index` in (l, m, n) lexicographic order.
///
/// # Safety
/// `ens` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_record(
    ens: *const QtrajEnsemble,
    index: usize,
    out: *mut QtrajRecord,
) -> QtrajStatus {
    guard(|| {
        let ens = &deref(ens, "ens")?.0;
        let r = ens.records().get(index).ok_or_else(|| {
            Fail(
                QtrajStatus::InvalidArgument,
                format!("record {index} out of range for {} records", ens.len()),
            )
        })?;
        write(
            out,
            QtrajRecord {
                l: r.l,
                m: r.m,
                n: r.n,
                probability: r.probability,
                q_heat: r.q_heat,
                cl_heat: r.cl_heat,
                s_qu: r.s_qu,
                s_cl: r.s_cl,
            },
            "out",
        )
    })
}

/// # Safety
/// `ens` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_stats(
    ens: *const QtrajEnsemble,
    out: *mut QtrajEnsembleStats,
) -> QtrajStatus {
    guard(|| {
        let ens = &deref(ens, "ens")?.0;
        let q = quantum_heat_distribution(ens);
        let c = classical_heat_distribution(ens);
        let s = entropy_production_stats(ens);
        write(
            out,
            QtrajEnsembleStats {
                avg_q_qu: q.mean(),
                var_q_qu: q.variance(),
                avg_q_cl: c.mean(),
                var_q_cl: c.variance(),
                avg_s_qu: s.avg_s_qu,
                avg_s_cl: s.avg_s_cl,
                fluctuation_sum: integral_fluctuation_sum(ens),
            },
            "out",
        )
    })
}

/// # Safety
/// `ens` must come from a qtraj ensemble constructor and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_free(ens: *mut QtrajEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// D[ρ̃‖τ] split into D[ρ̃‖η̃] and D[η̃‖τ].
///
/// # Safety
/// `rho` and `h` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qtraj_pythagorean_split(
    rho: *const QtrajDensity,
    h: *const QtrajHamiltonian,
    temperature: f64,
    out: *mut QtrajEntropySplit,
) -> QtrajStatus {
    guard(|| {
        let s = pythagorean_split(&deref(rho, "rho")?.0, &deref(h, "h")?.0, temperature)?;
        write(
            out,
            QtrajEntropySplit {
                total: s.total,
                quantum: s.quantum,
                classical: s.classical,
            },
            "out",
        )
    })
}

/// Qubit work extraction protocol; `n_steps` = 0 selects the quasistatic limit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtraj_protocol_qubit_report(
    p: f64,
    theta: f64,
    theta_tilde: f64,
    q1: f64,
    temperature: f64,
    omega0: f64,
    n_steps: usize,
    out: *mut QtrajProtocolReport,
) -> QtrajStatus {
    guard(|| {
        let qp = QubitProtocol {
            p,
            theta,
            theta_tilde,
            q1,
            temperature,
            omega0,
        };
        let step4 = if n_steps == 0 {
            Step4::Quasistatic
        } else {
            Step4::Steps(n_steps)
        };
        let r = report(&qp.plan(step4)?)?;
        write(
            out,
            QtrajProtocolReport {
                delta_f_prot: r.delta_f_prot,
                avg_w_ext: r.avg_w_ext,
                avg_s_qu: r.avg_s_qu,
                avg_s_cl: r.avg_s_cl,
                avg_s_step4: r.avg_s_step4,
                avg_q_qu: r.avg_q_qu,
                avg_q_cl_step3: r.avg_q_cl_step3,
                avg_q_cl_step4: r.avg_q_cl_step4,
                avg_delta_u: r.avg_delta_u,
                q_diss: r.q_diss,
                w_irr: r.w_irr,
                footprint_residual: r.footprint_residual,
            },
            "out",
        )
    })
}

/// Null-terminated crate version.
#[no_mangle]
pub extern "C" fn qtraj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
