//! C ABI for the curved-wigner toolkit: plain functions for the closed-form
//! quantities and an opaque scenario handle for config-driven runs.
//!
//! All functions return a status code; results come back through out
//! pointers. Strings returned by this library must be released with
//! `cw_string_free`, scenario handles with `cw_scenario_free`.

#![allow(clippy::excessive_precision)]

use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use curved_wigner::cli_app::{run_scenario, RunResult, ScenarioConfig};
use curved_wigner::dirac_wkb::{circular_corrections, orbital_frequency_shift};
use curved_wigner::entanglement::radial_epr_report;
use curved_wigner::error::CwError;
use curved_wigner::frames::{geodetic_precession, PrecessionMode};

/// Status codes mirroring the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    ConfigError = 2,
    DomainError = 3,
    InvariantFailure = 4,
    InternalError = 5,
}

fn status_of(e: &CwError) -> CwStatus {
    match e.exit_code() {
        2 => CwStatus::ConfigError,
        3 => CwStatus::DomainError,
        4 => CwStatus::InvariantFailure,
        _ => CwStatus::InternalError,
    }
}

/// Geodetic precession angle per orbit. `numeric` != 0 integrates the
/// transport equations instead of evaluating the closed form.
///
/// # Safety
/// `out` must point to writable memory for one f64.
#[no_mangle]
pub unsafe extern "C" fn cw_geodetic_precession(
    mass: f64,
    radius: f64,
    numeric: c_int,
    out: *mut f64,
) -> CwStatus {
    if out.is_null() {
        return CwStatus::NullPointer;
    }
    let mode = if numeric != 0 {
        PrecessionMode::Numeric
    } else {
        PrecessionMode::Analytic
    };
    match geodetic_precession(mass, radius, mode) {
        Ok(v) => {
            *out = v;
            CwStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form first-order corrections on the circular orbit: covariant
/// velocity correction (4 components), covariant acceleration (4 components)
/// and the spin-up frame rotation rate, all per unit correction strength.
///
/// # Safety
/// `out_dv` and `out_accel` must point to writable arrays of four f64;
/// `out_chi_up` to one f64.
#[no_mangle]
pub unsafe extern "C" fn cw_circular_corrections(
    mass: f64,
    radius: f64,
    m_particle: f64,
    zeta: f64,
    phi: f64,
    t: f64,
    out_dv: *mut f64,
    out_accel: *mut f64,
    out_chi_up: *mut f64,
) -> CwStatus {
    if out_dv.is_null() || out_accel.is_null() || out_chi_up.is_null() {
        return CwStatus::NullPointer;
    }
    match circular_corrections(mass, radius, m_particle, zeta, phi, t) {
        Ok(c) => {
            for k in 0..4 {
                *out_dv.add(k) = c.delta_v[k];
                *out_accel.add(k) = c.accel[k];
            }
            *out_chi_up = c.chi_up;
            CwStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// First-order orbital frequency shift coefficient omega_1.
///
/// # Safety
/// `out_omega1` must point to writable memory for one f64.
#[no_mangle]
pub unsafe extern "C" fn cw_orbital_frequency_shift(
    mass: f64,
    radius: f64,
    m_particle: f64,
    out_omega1: *mut f64,
) -> CwStatus {
    if out_omega1.is_null() {
        return CwStatus::NullPointer;
    }
    match orbital_frequency_shift(mass, radius, m_particle) {
        Ok(s) => {
            *out_omega1 = s.omega1;
            CwStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Triplet admixture amplitude of the radially infalling singlet observed
/// from a single shared free-fall frame.
///
/// # Safety
/// `out` must point to writable memory for one f64.
#[no_mangle]
pub unsafe extern "C" fn cw_radial_triplet_admixture(
    mass: f64,
    r: f64,
    eps: f64,
    out: *mut f64,
) -> CwStatus {
    if out.is_null() {
        return CwStatus::NullPointer;
    }
    match radial_epr_report(mass, r, eps) {
        Ok(rep) => {
            *out = rep.triplet_admixture;
            CwStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Opaque scenario handle: parse once, run, read the result documents.
pub struct CwScenario {
    config: ScenarioConfig,
    result: Option<RunResult>,
}

/// Parse a JSON scenario config. Returns null when the document is invalid.
///
/// # Safety
/// `config_json` must be a valid NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_new(config_json: *const c_char) -> *mut CwScenario {
    if config_json.is_null() {
        return ptr::null_mut();
    }
    let Ok(text) = CStr::from_ptr(config_json).to_str() else {
        return ptr::null_mut();
    };
    match ScenarioConfig::from_json(text) {
        Ok(config) => Box::into_raw(Box::new(CwScenario {
            config,
            result: None,
        })),
        Err(_) => ptr::null_mut(),
    }
}

/// Execute the scenario held by the handle.
///
/// # Safety
/// `handle` must come from `cw_scenario_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_run(handle: *mut CwScenario) -> CwStatus {
    let Some(scenario) = handle.as_mut() else {
        return CwStatus::NullPointer;
    };
    match run_scenario(&scenario.config) {
        Ok(result) => {
            let ok = result.manifest.all_pass();
            scenario.result = Some(result);
            if ok {
                CwStatus::Ok
            } else {
                CwStatus::InvariantFailure
            }
        }
        Err(e) => status_of(&e),
    }
}

/// Manifest and tables of the last run as a JSON string; null before a run.
/// Free with `cw_string_free`.
///
/// # Safety
/// `handle` must come from `cw_scenario_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_result_json(handle: *const CwScenario) -> *mut c_char {
    let Some(scenario) = handle.as_ref() else {
        return ptr::null_mut();
    };
    let Some(result) = &scenario.result else {
        return ptr::null_mut();
    };
    let doc = serde_json::json!({
        "manifest": &result.manifest,
        "tables": &result.tables,
    });
    match serde_json::to_string(&doc) {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(_) => ptr::null_mut(),
    }
}

/// Release a scenario handle.
///
/// # Safety
/// `handle` must come from `cw_scenario_new` and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_free(handle: *mut CwScenario) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Release a string produced by this library.
///
/// # Safety
/// `s` must have been returned by a cw_* function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn cw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precession_roundtrip() {
        let mut out = 0.0f64;
        let st = unsafe { cw_geodetic_precession(1.0, 6.0, 0, &mut out) };
        assert_eq!(st, CwStatus::Ok);
        assert!((out - 1.8403023690212202).abs() < 1e-12);
        let st = unsafe { cw_geodetic_precession(1.0, 2.5, 0, &mut out) };
        assert_eq!(st, CwStatus::DomainError);
        let st = unsafe { cw_geodetic_precession(1.0, 6.0, 0, std::ptr::null_mut()) };
        assert_eq!(st, CwStatus::NullPointer);
    }

    #[test]
    fn corrections_roundtrip() {
        let mut dv = [0.0f64; 4];
        let mut accel = [0.0f64; 4];
        let mut chi = 0.0f64;
        let st = unsafe {
            cw_circular_corrections(
                1.0,
                6.0,
                1.0,
                0.0,
                0.0,
                0.0,
                dv.as_mut_ptr(),
                accel.as_mut_ptr(),
                &mut chi,
            )
        };
        assert_eq!(st, CwStatus::Ok);
        assert!((dv[3] - 0.47140452079103168).abs() < 1e-14);
        assert!((accel[1] + 0.0056701151453314308).abs() < 1e-16);
        assert!((chi - 1.0 / 108.0).abs() < 1e-17);
    }

    #[test]
    fn frequency_shift_roundtrip() {
        let mut w1 = 0.0f64;
        let st = unsafe { cw_orbital_frequency_shift(1.0, 6.0, 1.0, &mut w1) };
        assert_eq!(st, CwStatus::Ok);
        assert!((w1 - 0.035657512124735222).abs() < 1e-12);
    }

    #[test]
    fn admixture_roundtrip() {
        let mut amp = 0.0f64;
        let st = unsafe { cw_radial_triplet_admixture(1.0, 10.0, 1e-3, &mut amp) };
        assert_eq!(st, CwStatus::Ok);
        assert!((amp - 2.5e-6).abs() < 1e-12);
        let mut half = 0.0f64;
        unsafe { cw_radial_triplet_admixture(1.0, 10.0, 5e-4, &mut half) };
        assert!((amp / half - 2.0).abs() < 1e-6);
    }

    #[test]
    fn scenario_handle_lifecycle() {
        let cfg = CString::new(
            r#"{"scenario": "radial-epr", "parameters": {"M": 1.0, "r": 10.0, "epsilon": 1e-3}}"#,
        )
        .unwrap();
        let handle = unsafe { cw_scenario_new(cfg.as_ptr()) };
        assert!(!handle.is_null());
        // result requested before running: null
        assert!(unsafe { cw_scenario_result_json(handle) }.is_null());
        let st = unsafe { cw_scenario_run(handle) };
        assert_eq!(st, CwStatus::Ok);
        let json = unsafe { cw_scenario_result_json(handle) };
        assert!(!json.is_null());
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .unwrap()
            .to_string();
        assert!(text.contains("matched-frame-singlet-fidelity"));
        unsafe {
            cw_string_free(json);
            cw_scenario_free(handle);
        }
        // invalid config strings return null handles
        let bad = CString::new("{nope").unwrap();
        assert!(unsafe { cw_scenario_new(bad.as_ptr()) }.is_null());
    }
}
