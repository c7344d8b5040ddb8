//! C interface to skope. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free` function. Strings returned through
//! `out` parameters are owned by the caller and released with
//! [`skope_string_free`]. On any status other than `Ok` or `Empty`,
//! [`skope_last_error`] describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use skope::decoder::{decode, parse_frames, DecoderConfig};
use skope::grammar::Lexicon;
use skope::lattice::{format_lattices, parse_lattices, ConfusionMatrix, SimConfig};
use skope::morph::{load_dictionary, CompiledDictionary};
use skope::parser::{parse, ParseInput, ParseOptions, RelaxationParams};
use skope::phonology::PhonemeInventory;
use skope::pipeline::{
    analyze_sentence, join_inputs, morph_plain, morph_report, parse_report, read_morph_report,
    read_sentence, simulate_sentence,
};
use skope::sample;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkopeStatus {
    Ok = 0,
    /// The call ran but found nothing. The output is still written.
    Empty = 1,
    InvalidInput = 2,
    NullPointer = 3,
    Utf8 = 4,
    Panic = 5,
}

pub struct SkopeInventory(PhonemeInventory);

pub struct SkopeDictionary(CompiledDictionary);

pub struct SkopeLexicon(Lexicon);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let c = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SkopeStatus, String);

impl From<skope::Error> for Failure {
    fn from(e: skope::Error) -> Self {
        Failure(SkopeStatus::InvalidInput, e.to_string())
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<SkopeStatus, Failure>) -> SkopeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SkopeStatus::Panic
        }
    }
}

unsafe fn arg_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SkopeStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SkopeStatus::Utf8, format!("{what} is not UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        arg_str(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(SkopeStatus::NullPointer, format!("{what} is null")))
}

unsafe fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(SkopeStatus::NullPointer, "out is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<SkopeStatus, Failure> {
    *out = Box::into_raw(Box::new(value));
    Ok(SkopeStatus::Ok)
}

unsafe fn put_string(
    out: *mut *mut c_char,
    s: String,
    found: bool,
) -> Result<SkopeStatus, Failure> {
    let c = CString::new(s)
        .map_err(|_| Failure(SkopeStatus::InvalidInput, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(if found {
        SkopeStatus::Ok
    } else {
        SkopeStatus::Empty
    })
}

fn params_from(text: Option<&str>) -> Result<RelaxationParams, Failure> {
    Ok(match text {
        Some(t) => RelaxationParams::parse(t, "params")?,
        None => sample::params(),
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn skope_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn skope_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The bundled sample inventory.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skope_inventory_sample(out: *mut *mut SkopeInventory) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        put_handle(out, SkopeInventory(sample::inventory()))
    })
}

/// # Safety
/// `text` is a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skope_inventory_parse(
    text: *const c_char,
    out: *mut *mut SkopeInventory,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let inv = PhonemeInventory::parse(arg_str(text, "text")?, "inventory")?;
        put_handle(out, SkopeInventory(inv))
    })
}

/// # Safety
/// `p` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn skope_inventory_free(p: *mut SkopeInventory) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The bundled sample dictionary, compiled against the sample inventory.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skope_dictionary_sample(out: *mut *mut SkopeDictionary) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        put_handle(out, SkopeDictionary(sample::dictionary()))
    })
}

/// Compiles a dictionary from file contents. A null `tags` selects the flat
/// tag set of the entries.
///
/// # Safety
/// Strings are NUL-terminated (`tags` may be null); handles are live; `out`
/// is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skope_dictionary_load(
    inventory: *const SkopeInventory,
    dictionary: *const c_char,
    tags: *const c_char,
    morph_matrix: *const c_char,
    phon_matrix: *const c_char,
    out: *mut *mut SkopeDictionary,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let inv = handle(inventory, "inventory")?;
        let report = load_dictionary(
            &inv.0,
            (arg_str(dictionary, "dictionary")?, "dictionary"),
            optional_text(tags, "tags")?.map(|t| (t, "tags")),
            (arg_str(morph_matrix, "morph_matrix")?, "morph_matrix"),
            (arg_str(phon_matrix, "phon_matrix")?, "phon_matrix"),
        )?;
        put_handle(out, SkopeDictionary(report.dictionary))
    })
}

/// # Safety
/// `p` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn skope_dictionary_free(p: *mut SkopeDictionary) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The bundled sample lexicon.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skope_lexicon_sample(out: *mut *mut SkopeLexicon) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        put_handle(out, SkopeLexicon(sample::lexicon()))
    })
}

/// # Safety
/// `text` is a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skope_lexicon_parse(
    text: *const c_char,
    out: *mut *mut SkopeLexicon,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let lex = Lexicon::parse(arg_str(text, "text")?, "lexicon")?;
        put_handle(out, SkopeLexicon(lex))
    })
}

/// # Safety
/// `p` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn skope_lexicon_free(p: *mut SkopeLexicon) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Decodes spotting frames into a lattice file. `Empty` when no phoneme
/// survives.
///
/// # Safety
/// `frames` is NUL-terminated, `inventory` live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn skope_decode(
    inventory: *const SkopeInventory,
    frames: *const c_char,
    min_count: usize,
    out: *mut *mut c_char,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let inv = handle(inventory, "inventory")?;
        let frames = parse_frames(arg_str(frames, "frames")?, "frames", &inv.0)?;
        let d = decode(&frames, &DecoderConfig::with_min_count(min_count)?);
        let found = !d.lattice.is_empty();
        put_string(out, d.lattice.to_text(), found)
    })
}

/// Simulates one lattice per Eonjeol of a Yale truth sentence. A null
/// `confusion` selects the sample matrix.
///
/// # Safety
/// `truth` is NUL-terminated, `confusion` NUL-terminated or null,
/// `inventory` live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn skope_simulate(
    inventory: *const SkopeInventory,
    truth: *const c_char,
    confusion: *const c_char,
    target_alternatives: f64,
    max_alternatives: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let inv = handle(inventory, "inventory")?;
        let cm = match optional_text(confusion, "confusion")? {
            Some(t) => ConfusionMatrix::parse(t, "confusion")?,
            None => sample::confusion(),
        };
        cm.validate(&inv.0)?;
        let sentence = read_sentence(arg_str(truth, "truth")?, &inv.0)?;
        let cfg = SimConfig {
            target_alternatives,
            max_alternatives,
            seed,
        };
        let lattices = simulate_sentence(&sentence, &cm, &cfg)?;
        put_string(out, format_lattices(&lattices), !lattices.is_empty())
    })
}

/// Analyzes blank-line-separated lattices. Writes renderings, or the TAB
/// report when `report` is nonzero. `Empty` when some Eonjeol has no
/// analysis.
///
/// # Safety
/// `lattices` is NUL-terminated, handles live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn skope_analyze(
    inventory: *const SkopeInventory,
    dictionary: *const SkopeDictionary,
    lattices: *const c_char,
    report: i32,
    out: *mut *mut c_char,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let inv = handle(inventory, "inventory")?;
        let dict = handle(dictionary, "dictionary")?;
        let lattices = parse_lattices(arg_str(lattices, "lattices")?, "lattices")?;
        for l in &lattices {
            l.validate(&inv.0)?;
        }
        let analyses = analyze_sentence(&lattices, &dict.0);
        let found = !analyses.is_empty() && analyses.iter().all(|a| !a.is_empty());
        let s = if report != 0 {
            morph_report(&lattices, &analyses, &inv.0)
        } else {
            morph_plain(&analyses)
        };
        put_string(out, s, found)
    })
}

fn parse_to_report(
    input: &ParseInput,
    lexicon: &Lexicon,
    params: Option<&str>,
    n_best: usize,
) -> Result<(String, bool), Failure> {
    let params = params_from(params)?;
    let outcome = parse(input, lexicon, &params, ParseOptions::default())?;
    Ok((
        parse_report(input, &outcome, n_best),
        !outcome.trees.is_empty(),
    ))
}

/// Parses space-separated morpheme forms, one position each, and writes
/// the TAB parse report with up to `n_best` trees. A null `params` selects
/// the sample parameters. `Empty` when no full parse is found.
///
/// # Safety
/// `morphemes` is NUL-terminated, `params` NUL-terminated or null,
/// `lexicon` live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn skope_parse(
    lexicon: *const SkopeLexicon,
    morphemes: *const c_char,
    params: *const c_char,
    n_best: usize,
    out: *mut *mut c_char,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let lex = handle(lexicon, "lexicon")?;
        let forms: Vec<&str> = arg_str(morphemes, "morphemes")?
            .split_whitespace()
            .collect();
        let input = ParseInput::sequence(&forms);
        let (s, found) = parse_to_report(&input, &lex.0, optional_text(params, "params")?, n_best)?;
        put_string(out, s, found)
    })
}

/// Parses a morph report as written by [`skope_analyze`].
///
/// # Safety
/// As for [`skope_parse`].
#[no_mangle]
pub unsafe extern "C" fn skope_parse_analyses(
    lexicon: *const SkopeLexicon,
    analyses: *const c_char,
    params: *const c_char,
    n_best: usize,
    out: *mut *mut c_char,
) -> SkopeStatus {
    guard(|| {
        check_out(out)?;
        let lex = handle(lexicon, "lexicon")?;
        let input = join_inputs(&read_morph_report(
            arg_str(analyses, "analyses")?,
            "analyses",
        )?);
        let (s, found) = parse_to_report(&input, &lex.0, optional_text(params, "params")?, n_best)?;
        put_string(out, s, found)
    })
}
