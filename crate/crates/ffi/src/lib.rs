//! C ABI over `photon_current`.
//!
//! Every entry point returns a [`PcStatus`]; results come back through out
//! pointers. Handles are opaque and must be released with the matching
//! `*_free`. After a non-OK status, [`pc_last_error`] describes the failure
//! on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use photon_current::circuit::{run_circuit, Ledger, Netlist, PulseState};
use photon_current::cli::circuit_results;
use photon_current::density::density_field;
use photon_current::io::StateSpec;
use photon_current::localization::{localized_density_1d, localized_density_3d};
use photon_current::optics::{fresnel_interface, FresnelConvention};
use photon_current::spectral::{evolve_free, make_gaussian_state, scalar_product, ScalarProductMethod, SpectralAmplitudeJson};
use photon_current::{Error, Helicity, KGrid1D, SpectralAmplitude, UnitMode, Units};

/// Result code of every `pc_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    Grid = 5,
    Domain = 6,
    Numerical = 7,
    Port = 8,
    BufferSize = 9,
    Panic = 10,
}

/// 0 = natural units, 1 = SI.
pub type PcUnits = i32;

/// One-photon spectral state.
pub struct PcState {
    inner: SpectralAmplitude,
}

/// Result of running a netlist.
pub struct PcCircuit {
    netlist: Netlist,
    state: PulseState,
    ledger: Ledger,
}

/// Normal-incidence interface coefficients.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PcFresnel {
    pub r_re: f64,
    pub r_im: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub reflectance: f64,
    pub transmittance: f64,
    /// reflectance + transmittance − 1
    pub defect: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

struct Failure(PcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) | Error::Io(_) => PcStatus::Parse,
            Error::Validation(_) => PcStatus::Validation,
            Error::Grid(_) | Error::GridCoverage(_) | Error::Dimension(_) | Error::Support(_) => PcStatus::Grid,
            Error::Domain(_) | Error::Passivity(_) | Error::InvalidMode(_) | Error::StepSize { .. } => PcStatus::Domain,
            Error::Normalization { .. } | Error::Unitarity { .. } | Error::Truncation(_) => PcStatus::Numerical,
            Error::Port(_) => PcStatus::Port,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn guard(body: impl FnOnce() -> FfiResult) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(PcStatus::InvalidArgument, format!("{what} is not UTF-8: {e}")))
}

fn units(u: PcUnits) -> Result<Units, Failure> {
    match u {
        0 => Ok(Units::from_mode(UnitMode::Natural)),
        1 => Ok(Units::from_mode(UnitMode::Si)),
        other => Err(Failure(PcStatus::InvalidArgument, format!("unknown units code {other}"))),
    }
}

fn grid(n: usize, dk: f64, area: f64, u: PcUnits) -> Result<KGrid1D, Failure> {
    Ok(KGrid1D::new(n, dk, area, units(u)?)?)
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(PcStatus::InvalidArgument, "string contains NUL".into()))
}

/// Message for the last failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from a `pc_*` function and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Unit-number Gaussian centred at `x0` with helicity ±1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_state_gaussian(
    n: usize,
    dk: f64,
    area: f64,
    units: PcUnits,
    k0: f64,
    sigma: f64,
    x0: f64,
    helicity: i32,
    out_state: *mut *mut PcState,
) -> PcStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        let g = grid(n, dk, area, units)?;
        let s = make_gaussian_state(k0, sigma, g, Helicity::try_from(helicity)?)?.translated(x0);
        *slot = Box::into_raw(Box::new(PcState { inner: s }));
        Ok(())
    })
}

/// Parses `{N,dk,area,helicity,re,im}` or `{"gaussian":{...}}`. Gaussian
/// specs use the grid given here; explicit spectra carry their own, but the
/// given grid must still be valid.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_state` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_state_from_json(
    json: *const c_char,
    n: usize,
    dk: f64,
    area: f64,
    units: PcUnits,
    out_state: *mut *mut PcState,
) -> PcStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        let spec = StateSpec::from_json(text(json, "json")?)?;
        let s = spec.into_state(grid(n, dk, area, units)?)?;
        *slot = Box::into_raw(Box::new(PcState { inner: s }));
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle or null; `out_json` a valid pointer.
/// Free the result with [`pc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pc_state_to_json(state: *const PcState, out_json: *mut *mut c_char) -> PcStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let s = deref(state, "state")?;
        let text = serde_json::to_string(&SpectralAmplitudeJson::from_state(&s.inner)).map_err(Error::from)?;
        *slot = into_c_string(text)?;
        Ok(())
    })
}

/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pc_state_free(state: *mut PcState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_state_len(state: *const PcState, out_len: *mut usize) -> PcStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(state, "state")?.inner.grid().len();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_state_photon_number(state: *const PcState, out_number: *mut f64) -> PcStatus {
    guard(|| {
        *out(out_number, "out_number")? = deref(state, "state")?.inner.photon_number();
        Ok(())
    })
}

/// New handle holding the state freely evolved by `dt`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_state_evolve(state: *const PcState, dt: f64, out_state: *mut *mut PcState) -> PcStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        if !dt.is_finite() {
            return Err(Failure(PcStatus::InvalidArgument, "dt must be finite".into()));
        }
        let s = evolve_free(&deref(state, "state")?.inner, dt);
        *slot = Box::into_raw(Box::new(PcState { inner: s }));
        Ok(())
    })
}

/// ⟨a|b⟩ from the k-space sum (`x_space == false`) or from the fields on
/// the hyperplane at time `t`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_scalar_product(
    a: *const PcState,
    b: *const PcState,
    x_space: bool,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PcStatus {
    guard(|| {
        let re = out(out_re, "out_re")?;
        let im = out(out_im, "out_im")?;
        let method = if x_space {
            ScalarProductMethod::XSpace { t }
        } else {
            ScalarProductMethod::KSpace
        };
        let z = scalar_product(&deref(a, "a")?.inner, &deref(b, "b")?.inner, method)?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Writes ρ(x_i, t) for the N grid points into `buffer`.
///
/// # Safety
/// `buffer` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_density(state: *const PcState, t: f64, buffer: *mut f64, len: usize) -> PcStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let n = s.grid().len();
        if len != n {
            return Err(Failure(PcStatus::BufferSize, format!("buffer holds {len} values, grid has {n}")));
        }
        let rho = density_field(s, s, t)?;
        std::slice::from_raw_parts_mut(buffer, len).copy_from_slice(&rho.rho);
        Ok(())
    })
}

/// Positive-frequency density of the 1D localized state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_localized_density_1d(u: f64, k_max: f64, area: f64, out_re: *mut f64, out_im: *mut f64) -> PcStatus {
    guard(|| {
        let re = out(out_re, "out_re")?;
        let im = out(out_im, "out_im")?;
        let z = localized_density_1d(u, k_max, area)?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Positive-frequency density of the 3D localized state at radius `r`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_localized_density_3d(
    r: f64,
    dt: f64,
    k_max: f64,
    units: PcUnits,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PcStatus {
    guard(|| {
        let re = out(out_re, "out_re")?;
        let im = out(out_im, "out_im")?;
        let z = localized_density_3d(r, dt, k_max, &self::units(units)?)?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Interface coefficients from n1 into n2. `paper_convention` selects the
/// literal `((n−1)/(n+1), 2n/(n+1))` pair.
///
/// # Safety
/// `out_coeffs` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_fresnel(
    n1_re: f64,
    n1_im: f64,
    n2_re: f64,
    n2_im: f64,
    paper_convention: bool,
    out_coeffs: *mut PcFresnel,
) -> PcStatus {
    guard(|| {
        let slot = out(out_coeffs, "out_coeffs")?;
        let convention = if paper_convention {
            FresnelConvention::PaperLiteral
        } else {
            FresnelConvention::FluxConserving
        };
        let f = fresnel_interface(Complex64::new(n1_re, n1_im), Complex64::new(n2_re, n2_im), convention)?;
        *slot = PcFresnel {
            r_re: f.r.re,
            r_im: f.r.im,
            t_re: f.t.re,
            t_im: f.t.im,
            reflectance: f.reflectance,
            transmittance: f.transmittance,
            defect: f.defect,
        };
        Ok(())
    })
}

/// Validates and runs a netlist. Relative medium-table paths resolve
/// against the working directory.
///
/// # Safety
/// `netlist_json` must be NUL-terminated; `out_circuit` valid.
#[no_mangle]
pub unsafe extern "C" fn pc_circuit_run(
    netlist_json: *const c_char,
    n: usize,
    dk: f64,
    area: f64,
    units: PcUnits,
    out_circuit: *mut *mut PcCircuit,
) -> PcStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        let netlist = Netlist::from_json(text(netlist_json, "netlist_json")?, grid(n, dk, area, units)?, None)?;
        let (state, ledger) = run_circuit(&netlist)?;
        *slot = Box::into_raw(Box::new(PcCircuit { netlist, state, ledger }));
        Ok(())
    })
}

/// # Safety
/// `circuit` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pc_circuit_free(circuit: *mut PcCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Click probability at a detector port.
///
/// # Safety
/// Pointers must be valid; `port` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pc_circuit_probability(circuit: *const PcCircuit, port: *const c_char, out_p: *mut f64) -> PcStatus {
    guard(|| {
        let slot = out(out_p, "out_p")?;
        *slot = deref(circuit, "circuit")?.state.probability(text(port, "port")?)?;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_circuit_absorbed(circuit: *const PcCircuit, out_absorbed: *mut f64) -> PcStatus {
    guard(|| {
        *out(out_absorbed, "out_absorbed")? = deref(circuit, "circuit")?.state.absorbed;
        Ok(())
    })
}

/// Largest |in − out − absorbed| over the ledger rows.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_circuit_ledger_imbalance(circuit: *const PcCircuit, out_imbalance: *mut f64) -> PcStatus {
    guard(|| {
        *out(out_imbalance, "out_imbalance")? = deref(circuit, "circuit")?.ledger.max_imbalance();
        Ok(())
    })
}

/// Full results record as JSON, with `samples` seeded detection draws.
///
/// # Safety
/// Pointers must be valid. Free the result with [`pc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pc_circuit_results_json(
    circuit: *const PcCircuit,
    seed: u64,
    samples: u64,
    out_json: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let c = deref(circuit, "circuit")?;
        let results = circuit_results(&c.netlist, samples, seed, FresnelConvention::FluxConserving)?;
        *slot = into_c_string(serde_json::to_string_pretty(&results).map_err(Error::from)?)?;
        Ok(())
    })
}
