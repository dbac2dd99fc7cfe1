//! C ABI over the holdercrf toolkit: opaque model handles, status codes, and
//! file-level train/tag/evaluate entry points.
//!
//! Conventions: every fallible function returns [`holdercrf_status`]; outputs
//! go through out-pointers that are written only on `OK`. String arguments
//! are NUL-terminated UTF-8 paths; nullable resource paths may be NULL.
//! [`holdercrf_last_error`] returns a thread-local message describing the
//! most recent failure on the calling thread. Handles must be released with
//! [`holdercrf_model_free`].

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use holdercrf::corpus::io::{read_corpus, write_corpus_to_path, ColumnSchema};
use holdercrf::corpus::corpus_gold_spans;
use holdercrf::crf::{self, BioMode, OptimizerKind, TrainConfig};
use holdercrf::eval::exact_match_prf;
use holdercrf::features::FeatureConfig;
use holdercrf::pipeline::{train_crf, CrfPredictor, ResourcePaths, Resources};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum holdercrf_status {
    /// Success.
    HOLDERCRF_OK = 0,
    /// A required pointer argument was NULL.
    HOLDERCRF_NULL_ARGUMENT = 1,
    /// A string argument was not valid UTF-8.
    HOLDERCRF_INVALID_UTF8 = 2,
    /// File could not be read or written.
    HOLDERCRF_IO = 3,
    /// Input data failed to parse or validate.
    HOLDERCRF_PARSE = 4,
    /// Training or decoding failed internally.
    HOLDERCRF_INTERNAL = 5,
}

use holdercrf_status::*;

/// Opaque trained-model handle.
pub struct holdercrf_model {
    inner: crf::CrfModel,
}

/// Exact-match scores as ratios in [0, 1].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct holdercrf_prf {
    pub true_positives: u64,
    pub retrieved: u64,
    pub relevant: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Training knobs; zero-initialize and override, or pass NULL for defaults.
/// A `window` of 0 is replaced by the default radius 3.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct holdercrf_train_options {
    pub window: u32,
    pub sigma2: f64,
    pub max_iters: u32,
    pub tol: f64,
    /// 0 = L-BFGS, nonzero = gradient descent.
    pub use_gradient_descent: u8,
    /// Nonzero decodes with invalid BIO transitions forbidden instead of
    /// repaired.
    pub forbid_invalid_transitions: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").expect("empty cstring"));
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL stripped above");
    });
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn holdercrf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn holdercrf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

fn path_arg(ptr: *const c_char) -> Result<PathBuf, holdercrf_status> {
    if ptr.is_null() {
        set_error("required path argument is NULL");
        return Err(HOLDERCRF_NULL_ARGUMENT);
    }
    let s = unsafe { CStr::from_ptr(ptr) };
    match s.to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error("path argument is not valid UTF-8");
            Err(HOLDERCRF_INVALID_UTF8)
        }
    }
}

fn optional_path(ptr: *const c_char) -> Result<Option<PathBuf>, holdercrf_status> {
    if ptr.is_null() {
        Ok(None)
    } else {
        path_arg(ptr).map(Some)
    }
}

fn status_of<E: std::fmt::Display>(err: &E, status: holdercrf_status) -> holdercrf_status {
    set_error(&err.to_string());
    status
}

/// Classifies pipeline errors into coarse C statuses.
fn pipeline_status(err: &holdercrf::pipeline::PipelineError) -> holdercrf_status {
    use holdercrf::pipeline::PipelineError as E;
    let status = match err {
        E::Io(_) => HOLDERCRF_IO,
        E::Corpus(holdercrf::corpus::CorpusError::Io(_)) => HOLDERCRF_IO,
        E::Lexicon(holdercrf::lexicons::LexiconError::Io(_)) => HOLDERCRF_IO,
        E::Pattern(holdercrf::patterns::PatternError::Io(_)) => HOLDERCRF_IO,
        E::Crf(crf::CrfError::Io(_)) => HOLDERCRF_IO,
        E::Crf(_) => HOLDERCRF_INTERNAL,
        _ => HOLDERCRF_PARSE,
    };
    status_of(err, status)
}

fn corpus_status(err: &holdercrf::corpus::CorpusError) -> holdercrf_status {
    match err {
        holdercrf::corpus::CorpusError::Io(_) => status_of(err, HOLDERCRF_IO),
        _ => status_of(err, HOLDERCRF_PARSE),
    }
}

fn model_io_status(err: &crf::CrfError) -> holdercrf_status {
    match err {
        crf::CrfError::Io(_) => status_of(err, HOLDERCRF_IO),
        _ => status_of(err, HOLDERCRF_PARSE),
    }
}

/// Runs `body`, converting panics into `HOLDERCRF_INTERNAL`.
fn guarded(body: impl FnOnce() -> holdercrf_status) -> holdercrf_status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            HOLDERCRF_INTERNAL
        }
    }
}

/// Loads a model file. On success writes a heap-allocated handle to `out`.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_model_load(
    path: *const c_char,
    out: *mut *mut holdercrf_model,
) -> holdercrf_status {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is NULL");
            return HOLDERCRF_NULL_ARGUMENT;
        }
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match crf::io::load_model(&path) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(holdercrf_model { inner })) };
                HOLDERCRF_OK
            }
            Err(err) => model_io_status(&err),
        }
    })
}

/// Saves a model to `path` in the versioned text format.
///
/// # Safety
/// `model` must be a live handle from this library; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_model_save(
    model: *const holdercrf_model,
    path: *const c_char,
) -> holdercrf_status {
    guarded(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            set_error("model handle is NULL");
            return HOLDERCRF_NULL_ARGUMENT;
        };
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match crf::io::save_model(&model.inner, &path) {
            Ok(()) => HOLDERCRF_OK,
            Err(err) => model_io_status(&err),
        }
    })
}

/// Releases a handle returned by load or train. NULL is a no-op.
///
/// # Safety
/// `model` must originate from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_model_free(model: *mut holdercrf_model) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Number of trained parameters (weights).
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_model_num_parameters(
    model: *const holdercrf_model,
    out: *mut usize,
) -> holdercrf_status {
    guarded(|| {
        let (Some(model), false) = (unsafe { model.as_ref() }, out.is_null()) else {
            set_error("NULL argument");
            return HOLDERCRF_NULL_ARGUMENT;
        };
        unsafe { *out = model.inner.weights().len() };
        HOLDERCRF_OK
    })
}

/// Number of distinct feature strings in the model's index.
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_model_num_features(
    model: *const holdercrf_model,
    out: *mut usize,
) -> holdercrf_status {
    guarded(|| {
        let (Some(model), false) = (unsafe { model.as_ref() }, out.is_null()) else {
            set_error("NULL argument");
            return HOLDERCRF_NULL_ARGUMENT;
        };
        unsafe { *out = model.inner.index().num_feature_strings() };
        HOLDERCRF_OK
    })
}

struct LoadedResources {
    resources: Resources,
    features: FeatureConfig,
    bio_mode: BioMode,
    train: TrainConfig,
}

fn load_resources(
    subj_lexicon: *const c_char,
    sem_lexicon: *const c_char,
    pos_rules: *const c_char,
    patterns: *const c_char,
    options: *const holdercrf_train_options,
) -> Result<LoadedResources, holdercrf_status> {
    let paths = ResourcePaths {
        subjectivity: optional_path(subj_lexicon)?,
        semantic: optional_path(sem_lexicon)?,
        pos_rules: optional_path(pos_rules)?,
        patterns: optional_path(patterns)?,
    };
    let resources = Resources::load(&paths).map_err(|e| pipeline_status(&e))?;
    let mut features = FeatureConfig::default();
    let mut train = TrainConfig::default();
    let mut bio_mode = BioMode::Repair;
    if let Some(opts) = unsafe { options.as_ref() } {
        if opts.window > 0 {
            features.window_radius = opts.window as usize;
        }
        if opts.sigma2 > 0.0 {
            train.sigma2 = opts.sigma2;
        }
        if opts.max_iters > 0 {
            train.max_iters = opts.max_iters as usize;
        }
        if opts.tol > 0.0 {
            train.tol = opts.tol;
        }
        if opts.use_gradient_descent != 0 {
            train.optimizer = OptimizerKind::GradientDescent;
        }
        if opts.forbid_invalid_transitions != 0 {
            bio_mode = BioMode::ForbidInvalid;
        }
    }
    Ok(LoadedResources {
        resources,
        features,
        bio_mode,
        train,
    })
}

fn predictor_for<'a>(
    model: crf::CrfModel,
    loaded: &'a LoadedResources,
) -> CrfPredictor<'a> {
    CrfPredictor::from_parts(
        model,
        loaded.resources.patterns.clone(),
        loaded.features.clone(),
        &loaded.resources,
        loaded.bio_mode,
    )
}

/// Trains a model on a gold column corpus. Resource paths may be NULL; a
/// supplied pattern file is used as-is for the PATTERN feature. On success
/// writes a handle to `out`.
///
/// # Safety
/// All non-NULL strings must be NUL-terminated; `out` must be writable;
/// `options` may be NULL or point to a valid options struct.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_train_file(
    corpus: *const c_char,
    subj_lexicon: *const c_char,
    sem_lexicon: *const c_char,
    pos_rules: *const c_char,
    patterns: *const c_char,
    options: *const holdercrf_train_options,
    out: *mut *mut holdercrf_model,
) -> holdercrf_status {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is NULL");
            return HOLDERCRF_NULL_ARGUMENT;
        }
        let corpus_path = match path_arg(corpus) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let loaded =
            match load_resources(subj_lexicon, sem_lexicon, pos_rules, patterns, options) {
                Ok(l) => l,
                Err(status) => return status,
            };
        let docs = match read_corpus(&corpus_path, ColumnSchema::Gold) {
            Ok(d) => d,
            Err(err) => return corpus_status(&err),
        };
        let predictor = match train_crf(
            &docs,
            loaded.resources.patterns.clone(),
            &loaded.resources,
            &loaded.features,
            &loaded.train,
            loaded.bio_mode,
        ) {
            Ok(p) => p,
            Err(err) => return pipeline_status(&err),
        };
        let inner = predictor.model().clone();
        unsafe { *out = Box::into_raw(Box::new(holdercrf_model { inner })) };
        HOLDERCRF_OK
    })
}

/// Tags a gold column corpus with a trained model and writes the tagged
/// corpus to `out_path`. The resource and feature arguments must match the
/// ones used at training time.
///
/// # Safety
/// `model` must be a live handle; all non-NULL strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_tag_file(
    model: *const holdercrf_model,
    corpus: *const c_char,
    subj_lexicon: *const c_char,
    sem_lexicon: *const c_char,
    pos_rules: *const c_char,
    patterns: *const c_char,
    options: *const holdercrf_train_options,
    out_path: *const c_char,
) -> holdercrf_status {
    guarded(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            set_error("model handle is NULL");
            return HOLDERCRF_NULL_ARGUMENT;
        };
        let corpus_path = match path_arg(corpus) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let out_path = match path_arg(out_path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let loaded =
            match load_resources(subj_lexicon, sem_lexicon, pos_rules, patterns, options) {
                Ok(l) => l,
                Err(status) => return status,
            };
        let docs = match read_corpus(&corpus_path, ColumnSchema::Gold) {
            Ok(d) => d,
            Err(err) => return corpus_status(&err),
        };
        let predictor = predictor_for(model.inner.clone(), &loaded);
        let tagged: Vec<holdercrf::Document> = docs
            .iter()
            .map(|doc| {
                let labels = predictor.tag_document(doc);
                let mut out = doc.clone();
                for (sentence, sentence_labels) in out.sentences.iter_mut().zip(labels) {
                    for (token, label) in sentence.tokens.iter_mut().zip(sentence_labels) {
                        token.gold = label;
                    }
                }
                out
            })
            .collect();
        match write_corpus_to_path(&tagged, &out_path) {
            Ok(()) => HOLDERCRF_OK,
            Err(err) => status_of(&err, HOLDERCRF_IO),
        }
    })
}

/// Exact-match scores of a predicted column corpus against a gold one of the
/// same shape. Writes the result to `out`.
///
/// # Safety
/// `gold` and `pred` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn holdercrf_evaluate_files(
    gold: *const c_char,
    pred: *const c_char,
    out: *mut holdercrf_prf,
) -> holdercrf_status {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is NULL");
            return HOLDERCRF_NULL_ARGUMENT;
        }
        let gold_path = match path_arg(gold) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let pred_path = match path_arg(pred) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let load = |p: &Path| read_corpus(p, ColumnSchema::Gold);
        let gold_docs = match load(&gold_path) {
            Ok(d) => d,
            Err(err) => return corpus_status(&err),
        };
        let pred_docs = match load(&pred_path) {
            Ok(d) => d,
            Err(err) => return corpus_status(&err),
        };
        let report = exact_match_prf(&corpus_gold_spans(&gold_docs), &corpus_gold_spans(&pred_docs));
        unsafe {
            *out = holdercrf_prf {
                true_positives: report.tp as u64,
                retrieved: report.retrieved as u64,
                relevant: report.relevant as u64,
                precision: report.precision,
                recall: report.recall,
                f_measure: report.f_measure,
            };
        }
        HOLDERCRF_OK
    })
}
