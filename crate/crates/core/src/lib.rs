//! Opinion holder extraction toolkit.
//!
//! Extracts opinion holder spans from column-annotated news text with three
//! interchangeable approaches: high-precision extraction patterns gated by
//! rule-based sentence subjectivity, a linear-chain CRF over a configurable
//! window feature set, and the combination where pattern matches feed the
//! CRF as a feature. Ships with an exact-match evaluation harness,
//! cross-validation, and feature ablation.

pub mod cli;
pub mod corpus;
pub mod crf;
pub mod eval;
pub mod features;
pub mod lexicons;
pub mod patterns;
pub mod pipeline;
pub mod rng;
pub mod subjectivity;
pub mod synth;

pub use corpus::{Document, HolderLabel, HolderSpan, Sentence, Subjectivity, Token};
