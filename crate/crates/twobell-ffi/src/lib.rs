//! C ABI for the twobell simulator.
//!
//! Every entry point returns a [`TwobellStatus`]; results come back
//! through out-pointers. Transcripts are opaque handles that must be
//! released with [`twobell_transcript_free`], and every returned string
//! with [`twobell_string_free`]. The generated header lives at
//! `include/twobell.h`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twobell::bell::{BellLabel, BellOutcome, CorrectionTable};
use twobell::protocol::{
    run_end_to_end, trial_seed, CoefficientSet, CompressionVariant, TeleportMode,
    TeleportTranscript,
};
use twobell::resources::{audit, min_bell_pairs, Scheme, FORMULA_NOTE};
use twobell::verify::standard_suite;
use twobell::Error;

/// Result of every C entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwobellStatus {
    TwobellOk = 0,
    TwobellNullPointer = 1,
    TwobellInvalidArgument = 2,
    TwobellNotNormalized = 3,
    TwobellNotConstructible = 4,
    TwobellZeroProbability = 5,
    TwobellProtocolFailure = 6,
    TwobellPanic = 7,
}

use TwobellStatus::*;

/// Opaque protocol-run transcript.
pub struct TwobellTranscript {
    inner: TeleportTranscript,
}

fn status_for(err: &Error) -> TwobellStatus {
    match err {
        Error::CoefficientsNotNormalized { .. } | Error::ZeroNormCoefficients => {
            TwobellNotNormalized
        }
        Error::ChannelNotConstructible { .. } => TwobellNotConstructible,
        Error::ZeroProbabilityOutcome { .. } => TwobellZeroProbability,
        Error::FactorizationFailed { .. } | Error::OutsideEncodedFamily => TwobellProtocolFailure,
        _ => TwobellInvalidArgument,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn twobell_status_message(status: TwobellStatus) -> *const c_char {
    let message: &'static [u8] = match status {
        TwobellOk => b"ok\0",
        TwobellNullPointer => b"null pointer argument\0",
        TwobellInvalidArgument => b"invalid argument\0",
        TwobellNotNormalized => b"coefficients are not normalized\0",
        TwobellNotConstructible => b"channel cannot be constituted\0",
        TwobellZeroProbability => b"forced outcome has zero probability\0",
        TwobellProtocolFailure => b"protocol failed to reach unit fidelity\0",
        TwobellPanic => b"internal panic\0",
    };
    message.as_ptr() as *const c_char
}

unsafe fn parse_cstr<'a>(ptr: *const c_char) -> Result<&'a str, TwobellStatus> {
    if ptr.is_null() {
        return Err(TwobellNullPointer);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| TwobellInvalidArgument)
}

fn parse_variant(s: &str) -> Result<CompressionVariant, TwobellStatus> {
    CompressionVariant::from_str(s).map_err(|_| TwobellInvalidArgument)
}

fn parse_channel(s: &str) -> Result<(BellLabel, BellLabel), TwobellStatus> {
    BellOutcome::from_str(s)
        .map(|outcome| (outcome.first, outcome.second))
        .map_err(|_| TwobellInvalidArgument)
}

fn guard(body: impl FnOnce() -> TwobellStatus) -> TwobellStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(TwobellPanic)
}

fn run_into(
    c: CoefficientSet,
    seed: u64,
    trial: u64,
    forced: Option<BellOutcome>,
    variant: CompressionVariant,
    channel: (BellLabel, BellLabel),
    out: *mut *mut TwobellTranscript,
) -> TwobellStatus {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
    let mode = match forced {
        Some(outcome) => TeleportMode::Forced(outcome),
        None => TeleportMode::Random(&mut rng),
    };
    match run_end_to_end(&c, mode, variant, channel) {
        Ok(mut transcript) => {
            transcript.seed = Some(seed);
            transcript.trial = Some(trial);
            let handle = Box::new(TwobellTranscript { inner: transcript });
            unsafe { *out = Box::into_raw(handle) };
            TwobellOk
        }
        Err(err) => status_for(&err),
    }
}

/// Run the protocol with seeded random coefficients and a sampled
/// outcome. `variant` is "two-cnot" or "paper-literal"; `channel` is a
/// pair like "phi+:phi+".
///
/// # Safety
/// `variant` and `channel` must be valid NUL-terminated strings and
/// `out` a valid pointer; the returned handle must be released with
/// [`twobell_transcript_free`].
#[no_mangle]
pub unsafe extern "C" fn twobell_run_random(
    seed: u64,
    trial: u64,
    variant: *const c_char,
    channel: *const c_char,
    out: *mut *mut TwobellTranscript,
) -> TwobellStatus {
    guard(|| {
        if out.is_null() {
            return TwobellNullPointer;
        }
        *out = ptr::null_mut();
        let variant = match parse_cstr(variant).and_then(parse_variant) {
            Ok(v) => v,
            Err(status) => return status,
        };
        let channel = match parse_cstr(channel).and_then(parse_channel) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
        let c = CoefficientSet::random(&mut rng);
        run_into(c, seed, trial, None, variant, channel, out)
    })
}

/// Run the protocol with explicit coefficients: eight reals in (re, im)
/// pairs for alpha..delta. `forced_outcome` may be NULL for sampled
/// branches or a pair like "phi-:psi+" to force one.
///
/// # Safety
/// `coefficients` must point to eight doubles; string arguments must be
/// valid NUL-terminated strings (or NULL where documented); `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twobell_run_coefficients(
    coefficients: *const f64,
    seed: u64,
    trial: u64,
    variant: *const c_char,
    channel: *const c_char,
    forced_outcome: *const c_char,
    out: *mut *mut TwobellTranscript,
) -> TwobellStatus {
    guard(|| {
        if out.is_null() || coefficients.is_null() {
            return TwobellNullPointer;
        }
        *out = ptr::null_mut();
        let variant = match parse_cstr(variant).and_then(parse_variant) {
            Ok(v) => v,
            Err(status) => return status,
        };
        let channel = match parse_cstr(channel).and_then(parse_channel) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let forced = if forced_outcome.is_null() {
            None
        } else {
            match parse_cstr(forced_outcome).map(BellOutcome::from_str) {
                Ok(Ok(outcome)) => Some(outcome),
                _ => return TwobellInvalidArgument,
            }
        };
        let mut values = [0.0f64; 8];
        values.copy_from_slice(std::slice::from_raw_parts(coefficients, 8));
        let c = match CoefficientSet::from_reals(values) {
            Ok(c) => c,
            Err(err) => return status_for(&err),
        };
        run_into(c, seed, trial, forced, variant, channel, out)
    })
}

/// Fidelity of the reconstructed eight-qubit state, in [0, 1].
///
/// # Safety
/// `transcript` must be a live handle from a `twobell_run_*` call.
#[no_mangle]
pub unsafe extern "C" fn twobell_transcript_fidelity_8q(
    transcript: *const TwobellTranscript,
) -> f64 {
    if transcript.is_null() {
        return f64::NAN;
    }
    (*transcript).inner.fidelity_8q
}

/// Fidelity of the teleported two-qubit carrier, in [0, 1].
///
/// # Safety
/// `transcript` must be a live handle from a `twobell_run_*` call.
#[no_mangle]
pub unsafe extern "C" fn twobell_transcript_fidelity_2q(
    transcript: *const TwobellTranscript,
) -> f64 {
    if transcript.is_null() {
        return f64::NAN;
    }
    (*transcript).inner.fidelity_2q
}

/// Classical bits the sender transmitted (4 for this protocol).
///
/// # Safety
/// `transcript` must be a live handle from a `twobell_run_*` call.
#[no_mangle]
pub unsafe extern "C" fn twobell_transcript_classical_bits(
    transcript: *const TwobellTranscript,
) -> u32 {
    if transcript.is_null() {
        return 0;
    }
    (*transcript).inner.classical_bits_sent
}

/// Serialize the transcript as JSON into a newly allocated string.
///
/// # Safety
/// `transcript` must be a live handle and `out` a valid pointer; free
/// the string with [`twobell_string_free`].
#[no_mangle]
pub unsafe extern "C" fn twobell_transcript_json(
    transcript: *const TwobellTranscript,
    out: *mut *mut c_char,
) -> TwobellStatus {
    guard(|| {
        if transcript.is_null() || out.is_null() {
            return TwobellNullPointer;
        }
        let json = match serde_json::to_string(&(*transcript).inner) {
            Ok(json) => json,
            Err(_) => return TwobellInvalidArgument,
        };
        match CString::new(json) {
            Ok(cstring) => {
                *out = cstring.into_raw();
                TwobellOk
            }
            Err(_) => TwobellInvalidArgument,
        }
    })
}

/// Release a transcript handle. NULL is a no-op.
///
/// # Safety
/// `transcript` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twobell_transcript_free(transcript: *mut TwobellTranscript) {
    if !transcript.is_null() {
        drop(Box::from_raw(transcript));
    }
}

/// Release a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twobell_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run the identity-verification suite. `corrupt_branch` injects a
/// single-branch table corruption when in 0..16 (pass -1 for the
/// canonical table); `all_hold` reports whether every identity held;
/// `json_out` (optional, may be NULL) receives the full report array.
///
/// # Safety
/// `all_hold` must be a valid pointer; `json_out` NULL or valid; any
/// returned string must be freed with [`twobell_string_free`].
#[no_mangle]
pub unsafe extern "C" fn twobell_verify(
    seed: u64,
    corrupt_branch: i32,
    all_hold: *mut bool,
    json_out: *mut *mut c_char,
) -> TwobellStatus {
    guard(|| {
        if all_hold.is_null() {
            return TwobellNullPointer;
        }
        let table = match corrupt_branch {
            -1 => CorrectionTable::canonical(),
            branch if (0..16).contains(&branch) => {
                CorrectionTable::canonical().corrupted(branch as usize)
            }
            _ => return TwobellInvalidArgument,
        };
        let reports = standard_suite(seed, &table);
        *all_hold = reports.iter().all(|r| r.holds);
        if !json_out.is_null() {
            let json = match serde_json::to_string(&reports) {
                Ok(json) => json,
                Err(_) => return TwobellInvalidArgument,
            };
            match CString::new(json) {
                Ok(cstring) => *json_out = cstring.into_raw(),
                Err(_) => return TwobellInvalidArgument,
            }
        }
        TwobellOk
    })
}

/// Resource comparison of both schemes as a JSON document.
///
/// # Safety
/// `variant` must be a valid NUL-terminated string and `out` a valid
/// pointer; free the string with [`twobell_string_free`].
#[no_mangle]
pub unsafe extern "C" fn twobell_resources_json(
    variant: *const c_char,
    out: *mut *mut c_char,
) -> TwobellStatus {
    guard(|| {
        if out.is_null() {
            return TwobellNullPointer;
        }
        let variant = match parse_cstr(variant).and_then(parse_variant) {
            Ok(v) => v,
            Err(status) => return status,
        };
        let doc = serde_json::json!({
            "schemes": [
                audit(Scheme::ZhaoCluster, variant),
                audit(Scheme::TwoBellPairs, variant),
            ],
            "note": FORMULA_NOTE,
        });
        match CString::new(doc.to_string()) {
            Ok(cstring) => {
                *out = cstring.into_raw();
                TwobellOk
            }
            Err(_) => TwobellInvalidArgument,
        }
    })
}

/// Bell pairs required for `n_unknown` unknown coefficients
/// (ceil(log2 n)); fails for n = 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twobell_min_bell_pairs(n_unknown: u32, out: *mut u32) -> TwobellStatus {
    guard(|| {
        if out.is_null() {
            return TwobellNullPointer;
        }
        match min_bell_pairs(n_unknown) {
            Ok(pairs) => {
                *out = pairs;
                TwobellOk
            }
            Err(err) => status_for(&err),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn random_run_reaches_unit_fidelity() {
        let variant = cstr("two-cnot");
        let channel = cstr("phi+:phi+");
        let mut handle: *mut TwobellTranscript = ptr::null_mut();
        let status =
            unsafe { twobell_run_random(7, 0, variant.as_ptr(), channel.as_ptr(), &mut handle) };
        assert_eq!(status, TwobellOk);
        assert!(!handle.is_null());
        unsafe {
            assert!(twobell_transcript_fidelity_8q(handle) >= 1.0 - 1e-10);
            assert_eq!(twobell_transcript_classical_bits(handle), 4);

            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(twobell_transcript_json(handle, &mut json), TwobellOk);
            let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
            assert!(text.contains("\"fidelity_8q\""));
            twobell_string_free(json);
            twobell_transcript_free(handle);
        }
    }

    #[test]
    fn explicit_coefficients_and_forced_outcome() {
        let variant = cstr("two-cnot");
        let channel = cstr("phi+:phi+");
        let forced = cstr("psi-:psi+");
        let coeffs = [0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0];
        let mut handle: *mut TwobellTranscript = ptr::null_mut();
        let status = unsafe {
            twobell_run_coefficients(
                coeffs.as_ptr(),
                0,
                0,
                variant.as_ptr(),
                channel.as_ptr(),
                forced.as_ptr(),
                &mut handle,
            )
        };
        assert_eq!(status, TwobellOk);
        unsafe {
            assert!((twobell_transcript_fidelity_2q(handle) - 1.0).abs() < 1e-10);
            twobell_transcript_free(handle);
        }
    }

    #[test]
    fn bad_inputs_map_to_statuses() {
        let variant = cstr("two-cnot");
        let channel = cstr("phi+:phi+");
        let mut handle: *mut TwobellTranscript = ptr::null_mut();

        let unnormalized = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let status = unsafe {
            twobell_run_coefficients(
                unnormalized.as_ptr(),
                0,
                0,
                variant.as_ptr(),
                channel.as_ptr(),
                ptr::null(),
                &mut handle,
            )
        };
        assert_eq!(status, TwobellNotNormalized);
        assert!(handle.is_null());

        let bad_channel = cstr("sigma+:phi+");
        let status = unsafe {
            twobell_run_random(0, 0, variant.as_ptr(), bad_channel.as_ptr(), &mut handle)
        };
        assert_eq!(status, TwobellInvalidArgument);

        let status =
            unsafe { twobell_run_random(0, 0, ptr::null(), channel.as_ptr(), &mut handle) };
        assert_eq!(status, TwobellNullPointer);
    }

    #[test]
    fn verify_reports_through_the_abi() {
        let mut all_hold = false;
        let status = unsafe { twobell_verify(7, -1, &mut all_hold, ptr::null_mut()) };
        assert_eq!(status, TwobellOk);
        assert!(all_hold);

        let mut json: *mut c_char = ptr::null_mut();
        let status = unsafe { twobell_verify(7, 4, &mut all_hold, &mut json) };
        assert_eq!(status, TwobellOk);
        assert!(!all_hold);
        unsafe {
            let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
            assert!(text.contains("bell-decomposition"));
            twobell_string_free(json);
        }

        let status = unsafe { twobell_verify(7, 42, &mut all_hold, ptr::null_mut()) };
        assert_eq!(status, TwobellInvalidArgument);
    }

    #[test]
    fn resource_helpers() {
        let mut pairs = 0u32;
        assert_eq!(unsafe { twobell_min_bell_pairs(4, &mut pairs) }, TwobellOk);
        assert_eq!(pairs, 2);
        assert_eq!(
            unsafe { twobell_min_bell_pairs(0, &mut pairs) },
            TwobellInvalidArgument
        );

        let variant = cstr("paper-literal");
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { twobell_resources_json(variant.as_ptr(), &mut json) },
            TwobellOk
        );
        unsafe {
            let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
            assert!(text.contains("\"SWAP\":1"));
            twobell_string_free(json);
        }
    }

    #[test]
    fn status_messages_are_static() {
        let message = twobell_status_message(TwobellZeroProbability);
        let text = unsafe { CStr::from_ptr(message) }.to_str().unwrap();
        assert!(text.contains("zero probability"));
    }
}
