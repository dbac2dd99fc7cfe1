//! Corpus data model: documents, sentences, tokens, holder spans.
//!
//! Holds the column-format reader/writer ([`io`]), conversion between BIO
//! label sequences and spans, majority-vote merging of annotator layers, and
//! deterministic document-level fold splitting.

pub mod io;

use std::fmt;

use thiserror::Error;

use crate::rng::SplitMix64;

/// Sentinel NE column value for tokens that are not part of a named entity.
pub const NO_ENTITY: &str = "NONE";

/// Per-token holder tag. The ordinal order (B < I < Non) is the decoding
/// tie-break order and must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HolderLabel {
    BHolder,
    IHolder,
    NonHolder,
}

impl HolderLabel {
    pub const COUNT: usize = 3;
    pub const ALL: [HolderLabel; 3] = [
        HolderLabel::BHolder,
        HolderLabel::IHolder,
        HolderLabel::NonHolder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HolderLabel::BHolder => "B-Holder",
            HolderLabel::IHolder => "I-Holder",
            HolderLabel::NonHolder => "Non-Holder",
        }
    }

    pub fn parse(s: &str) -> Option<HolderLabel> {
        match s {
            "B-Holder" => Some(HolderLabel::BHolder),
            "I-Holder" => Some(HolderLabel::IHolder),
            "Non-Holder" => Some(HolderLabel::NonHolder),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> HolderLabel {
        Self::ALL[i]
    }
}

impl fmt::Display for HolderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sentence-level subjectivity decision of the high-precision rule
/// classifiers. `Unlabeled` means neither rule fired; a sentence that has not
/// been classified at all carries `None` instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subjectivity {
    Subjective,
    Objective,
    Unlabeled,
}

impl Subjectivity {
    pub fn as_str(self) -> &'static str {
        match self {
            Subjectivity::Subjective => "Subjective",
            Subjectivity::Objective => "Objective",
            Subjectivity::Unlabeled => "Unlabeled",
        }
    }
}

/// One corpus word with its annotation columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Inflection-neutral form; lexicon lookups and pattern literals key on it.
    pub lemma: String,
    /// Fine-grained tag from the upstream POS tagger.
    pub pos_fine: String,
    /// Base phrase chunk tag (`B-NP`, `I-VP`, `O`, ...).
    pub bpc: String,
    /// NE class name, or [`NO_ENTITY`].
    pub ne: String,
    pub gold: HolderLabel,
}

impl Token {
    pub fn is_entity(&self) -> bool {
        self.ne != NO_ENTITY
    }
}

/// Ordered token sequence plus the subjectivity slot filled later by the
/// rule classifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub subjectivity: Option<Subjectivity>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self {
            tokens,
            subjectivity: None,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn gold_labels(&self) -> Vec<HolderLabel> {
        self.tokens.iter().map(|t| t.gold).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

/// A contiguous token range marking one opinion holder. `start`/`end` are
/// inclusive token ordinals within the sentence. `sentence_index` is
/// document-local unless a corpus-level helper has globalized it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HolderSpan {
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    /// Holder typology class 1/2/3 when known.
    pub holder_type: Option<u8>,
}

impl HolderSpan {
    pub fn new(sentence_index: usize, start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self {
            sentence_index,
            start,
            end,
            holder_type: None,
        }
    }

    pub fn with_type(mut self, holder_type: u8) -> Self {
        self.holder_type = Some(holder_type);
        self
    }

    /// Exact-match identity: holder type does not participate.
    pub fn key(&self) -> (usize, usize, usize) {
        (self.sentence_index, self.start, self.end)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid holder label `{label}`")]
    InvalidLabel { line: usize, label: String },
    #[error("line {line}: I-Holder without a preceding holder label")]
    BioViolation { line: usize },
    #[error("line {line}: document `{id}` has no sentences")]
    EmptyDocument { line: usize, id: String },
    #[error("line {line}: token line before any `#doc` header")]
    MissingDocHeader { line: usize },
    #[error("line {line}: duplicate document id `{id}`")]
    DuplicateDocumentId { line: usize, id: String },
    #[error("line {line}: empty {column} column")]
    EmptyField { line: usize, column: &'static str },
    #[error("expected exactly 3 annotation layers, found {found}")]
    LayerCountMismatch { found: usize },
    #[error("cannot split {docs} documents into {folds} folds")]
    TooFewDocuments { docs: usize, folds: usize },
    #[error("fold count must be at least 2, got {folds}")]
    InvalidFoldCount { folds: usize },
    #[error("span {span:?} is out of bounds or overlaps another span")]
    InvalidSpan { span: (usize, usize, usize) },
    #[error("line {line}: malformed span record: {reason}")]
    BadSpanRecord { line: usize, reason: String },
    #[error("span file references unknown document id `{id}`")]
    UnknownDocumentId { id: String },
}

/// Checks BIO validity; returns the 0-based position of the first violation.
pub fn validate_bio(labels: &[HolderLabel]) -> Result<(), usize> {
    let mut prev = HolderLabel::NonHolder;
    for (i, &label) in labels.iter().enumerate() {
        if label == HolderLabel::IHolder && prev == HolderLabel::NonHolder {
            return Err(i);
        }
        prev = label;
    }
    Ok(())
}

/// Collects each maximal `B (I)*` run of a valid BIO sequence into one span.
pub fn spans_from_labels(sentence: &Sentence, sentence_index: usize) -> Vec<HolderSpan> {
    spans_from_label_seq(&sentence.gold_labels(), sentence_index)
}

/// [`spans_from_labels`] over a bare label sequence.
pub fn spans_from_label_seq(labels: &[HolderLabel], sentence_index: usize) -> Vec<HolderSpan> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &label) in labels.iter().enumerate() {
        match label {
            HolderLabel::BHolder => {
                if let Some(start) = open.take() {
                    spans.push(HolderSpan::new(sentence_index, start, i - 1));
                }
                open = Some(i);
            }
            HolderLabel::IHolder => {}
            HolderLabel::NonHolder => {
                if let Some(start) = open.take() {
                    spans.push(HolderSpan::new(sentence_index, start, i - 1));
                }
            }
        }
    }
    if let Some(start) = open {
        spans.push(HolderSpan::new(sentence_index, start, labels.len() - 1));
    }
    spans
}

/// Inverse of [`spans_from_labels`] for spans belonging to one sentence.
/// Spans must be in bounds and pairwise disjoint.
pub fn labels_from_spans(
    spans: &[HolderSpan],
    sentence_len: usize,
) -> Result<Vec<HolderLabel>, CorpusError> {
    let mut labels = vec![HolderLabel::NonHolder; sentence_len];
    for span in spans {
        if span.start > span.end || span.end >= sentence_len {
            return Err(CorpusError::InvalidSpan { span: span.key() });
        }
        for (i, slot) in labels[span.start..=span.end].iter_mut().enumerate() {
            if *slot != HolderLabel::NonHolder {
                return Err(CorpusError::InvalidSpan { span: span.key() });
            }
            *slot = if i == 0 {
                HolderLabel::BHolder
            } else {
                HolderLabel::IHolder
            };
        }
    }
    Ok(labels)
}

/// Gold spans of a document, sentence indices document-local.
pub fn document_gold_spans(doc: &Document) -> Vec<HolderSpan> {
    doc.sentences
        .iter()
        .enumerate()
        .flat_map(|(i, s)| spans_from_labels(s, i))
        .collect()
}

/// Gold spans of a whole corpus with sentence indices globalized across
/// documents, so spans from different documents never collide.
pub fn corpus_gold_spans(docs: &[Document]) -> Vec<HolderSpan> {
    let mut spans = Vec::new();
    let mut offset = 0;
    for doc in docs {
        for (i, s) in doc.sentences.iter().enumerate() {
            spans.extend(spans_from_labels(s, offset + i));
        }
        offset += doc.sentences.len();
    }
    spans
}

/// Shifts document-local sentence indices to corpus-global ordinals, given
/// the per-document span lists in corpus order.
pub fn globalize_spans(per_doc: &[Vec<HolderSpan>], docs: &[Document]) -> Vec<HolderSpan> {
    debug_assert_eq!(per_doc.len(), docs.len());
    let mut spans = Vec::new();
    let mut offset = 0;
    for (doc, local) in docs.iter().zip(per_doc) {
        spans.extend(local.iter().map(|s| HolderSpan {
            sentence_index: s.sentence_index + offset,
            ..*s
        }));
        offset += doc.sentences.len();
    }
    spans
}

/// Majority-vote merge of exactly three annotator layers for one document.
///
/// A span survives iff at least two layers contain it with identical
/// boundaries. Its holder type is the value asserted by at least two of the
/// layers, absent otherwise. Two surviving spans always share a layer
/// (pigeonhole over three layers), so the output is overlap-free whenever
/// each input layer is.
pub fn merge_annotations(layers: &[Vec<HolderSpan>]) -> Result<Vec<HolderSpan>, CorpusError> {
    if layers.len() != 3 {
        return Err(CorpusError::LayerCountMismatch {
            found: layers.len(),
        });
    }
    let mut merged = Vec::new();
    let mut seen: Vec<(usize, usize, usize)> = Vec::new();
    for (li, layer) in layers.iter().enumerate() {
        for span in layer {
            if seen.contains(&span.key()) {
                continue;
            }
            let votes: Vec<&HolderSpan> = layers
                .iter()
                .skip(li)
                .flat_map(|l| l.iter().filter(|s| s.key() == span.key()))
                .collect();
            if votes.len() >= 2 {
                let mut type_counts = [0usize; 3];
                for v in &votes {
                    if let Some(t @ 1..=3) = v.holder_type {
                        type_counts[t as usize - 1] += 1;
                    }
                }
                let holder_type = (1u8..=3).find(|&t| type_counts[t as usize - 1] >= 2);
                merged.push(HolderSpan {
                    holder_type,
                    ..*span
                });
            }
            seen.push(span.key());
        }
    }
    merged.sort_by_key(|s| s.key());
    Ok(merged)
}

/// Deterministic document-level fold indices: shuffle with a seeded PRNG,
/// then deal round-robin so fold sizes differ by at most one.
pub fn split_fold_indices(
    n_docs: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, CorpusError> {
    if k < 2 {
        return Err(CorpusError::InvalidFoldCount { folds: k });
    }
    if n_docs < k {
        return Err(CorpusError::TooFewDocuments {
            docs: n_docs,
            folds: k,
        });
    }
    let mut order: Vec<usize> = (0..n_docs).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut folds = vec![Vec::new(); k];
    for (i, doc) in order.into_iter().enumerate() {
        folds[i % k].push(doc);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// [`split_fold_indices`] materialized into document lists.
pub fn split_folds(
    docs: &[Document],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<Document>>, CorpusError> {
    let folds = split_fold_indices(docs.len(), k, seed)?;
    Ok(folds
        .into_iter()
        .map(|idxs| idxs.into_iter().map(|i| docs[i].clone()).collect())
        .collect())
}

#[cfg(test)]
pub(crate) fn token(lemma: &str, gold: HolderLabel) -> Token {
    Token {
        surface: lemma.to_string(),
        lemma: lemma.to_string(),
        pos_fine: "X".to_string(),
        bpc: "O".to_string(),
        ne: NO_ENTITY.to_string(),
        gold,
    }
}
