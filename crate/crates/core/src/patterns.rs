//! Holder extraction patterns: a small matching DSL, corpus matching with
//! holder-slot capture, frequency/precision validation of candidate
//! patterns, and the three subjectivity-gated retention rules.
//!
//! Pattern DSL, one pattern per line: whitespace-separated elements where
//! `"lemma"` matches a token by lemma (so all inflections of a verb hit the
//! same literal), `POS:<Tag>` matches by reduced POS, and `HOLDER` marks the
//! single capture slot. The slot captures the maximal contiguous run of
//! holder-capable tokens: reduced POS in {Noun, Definite, Translit} or any
//! named entity.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use crate::corpus::{Document, HolderSpan, Sentence, Subjectivity, Token};
use crate::lexicons::{PosReductionMap, ReducedPos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternElement {
    /// Matches one token whose lemma equals the literal.
    Literal(String),
    /// Matches one token whose reduced POS equals the class.
    PosClass(ReducedPos),
    /// Captures the holder run. Exactly one per pattern.
    HolderSlot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub id: String,
    pub elements: Vec<PatternElement>,
}

impl Pattern {
    fn slot_index(&self) -> usize {
        self.elements
            .iter()
            .position(|e| *e == PatternElement::HolderSlot)
            .expect("pattern invariant: exactly one holder slot")
    }

    /// Renders the pattern back into its DSL line.
    pub fn to_dsl(&self) -> String {
        self.elements
            .iter()
            .map(|e| match e {
                PatternElement::Literal(lemma) => format!("\"{lemma}\""),
                PatternElement::PosClass(pos) => format!("POS:{pos}"),
                PatternElement::HolderSlot => "HOLDER".to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// One pattern hit: the full matched window plus the captured holder span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatch {
    pub pattern_id: String,
    pub sentence_index: usize,
    /// First token of the matched window (inclusive).
    pub start: usize,
    /// Last token of the matched window (inclusive).
    pub end: usize,
    pub holder: HolderSpan,
}

/// Validation counters for one candidate pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternStats {
    pub pattern_id: String,
    /// Match count over the unlabeled corpus.
    pub frequency: usize,
    /// Holder captures on the annotated corpus.
    pub retrieved: usize,
    /// Captures exactly matching a gold span.
    pub true_positives: usize,
    /// `true_positives / retrieved`; 0 when nothing was retrieved (the
    /// pattern is rejected in that case, precision being undefined).
    pub precision: f64,
    pub retained: bool,
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("pattern `{id}` has no HOLDER slot")]
    MissingHolderSlot { id: String },
    #[error("pattern `{id}` has more than one HOLDER slot")]
    MultipleHolderSlots { id: String },
    #[error("pattern `{id}`: unknown POS class `{text}`")]
    UnknownPosClass { id: String, text: String },
    #[error("pattern `{id}`: cannot parse element `{text}`")]
    BadElement { id: String, text: String },
    #[error("pattern `{id}` needs at least 2 elements")]
    TooFewElements { id: String },
    #[error("document `{doc}` has unclassified sentences; run subjectivity labeling first")]
    MissingSubjectivityLabels { doc: String },
}

/// Parses one DSL line into a pattern.
pub fn parse_pattern(id: &str, line: &str) -> Result<Pattern, PatternError> {
    let mut elements = Vec::new();
    let mut slots = 0;
    for raw in line.split_whitespace() {
        if raw == "HOLDER" {
            slots += 1;
            elements.push(PatternElement::HolderSlot);
        } else if let Some(tag) = raw.strip_prefix("POS:") {
            let pos = ReducedPos::parse(tag).ok_or_else(|| PatternError::UnknownPosClass {
                id: id.to_string(),
                text: tag.to_string(),
            })?;
            elements.push(PatternElement::PosClass(pos));
        } else if raw.len() >= 3 && raw.starts_with('"') && raw.ends_with('"') {
            elements.push(PatternElement::Literal(raw[1..raw.len() - 1].to_string()));
        } else {
            return Err(PatternError::BadElement {
                id: id.to_string(),
                text: raw.to_string(),
            });
        }
    }
    if slots == 0 {
        return Err(PatternError::MissingHolderSlot { id: id.to_string() });
    }
    if slots > 1 {
        return Err(PatternError::MultipleHolderSlots { id: id.to_string() });
    }
    if elements.len() < 2 {
        return Err(PatternError::TooFewElements { id: id.to_string() });
    }
    Ok(Pattern {
        id: id.to_string(),
        elements,
    })
}

/// Loads a pattern file: one DSL line per pattern, `#` comments and blank
/// lines skipped. Ids are assigned `p1`, `p2`, ... in file order.
pub fn load_patterns(path: &Path) -> Result<Vec<Pattern>, PatternError> {
    parse_patterns(BufReader::new(File::open(path)?))
}

pub fn parse_patterns<R: Read>(reader: BufReader<R>) -> Result<Vec<Pattern>, PatternError> {
    let mut patterns = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let id = format!("p{}", patterns.len() + 1);
        patterns.push(parse_pattern(&id, line)?);
    }
    Ok(patterns)
}

fn slot_eligible(token: &Token, reduced: ReducedPos) -> bool {
    matches!(
        reduced,
        ReducedPos::Noun | ReducedPos::Definite | ReducedPos::Translit
    ) || token.is_entity()
}

fn element_matches(el: &PatternElement, token: &Token, reduced: ReducedPos) -> bool {
    match el {
        PatternElement::Literal(lemma) => token.lemma == *lemma,
        PatternElement::PosClass(pos) => reduced == *pos,
        PatternElement::HolderSlot => unreachable!("slot handled separately"),
    }
}

fn elements_match_at(
    els: &[PatternElement],
    tokens: &[Token],
    reduced: &[ReducedPos],
    at: usize,
) -> bool {
    if at + els.len() > tokens.len() {
        return false;
    }
    els.iter()
        .zip(at..)
        .all(|(el, i)| element_matches(el, &tokens[i], reduced[i]))
}

fn try_match_at(
    pattern: &Pattern,
    tokens: &[Token],
    reduced: &[ReducedPos],
    anchor: usize,
    sentence_index: usize,
) -> Option<PatternMatch> {
    let slot = pattern.slot_index();
    let prefix = &pattern.elements[..slot];
    let suffix = &pattern.elements[slot + 1..];

    if !elements_match_at(prefix, tokens, reduced, anchor) {
        return None;
    }
    let slot_start = anchor + prefix.len();
    let mut run_end = slot_start;
    while run_end < tokens.len() && slot_eligible(&tokens[run_end], reduced[run_end]) {
        run_end += 1;
    }
    // Longest capture wins; the suffix must still match right after it.
    for len in (1..=run_end.saturating_sub(slot_start)).rev() {
        if elements_match_at(suffix, tokens, reduced, slot_start + len) {
            return Some(PatternMatch {
                pattern_id: pattern.id.clone(),
                sentence_index,
                start: anchor,
                end: slot_start + len + suffix.len() - 1,
                holder: HolderSpan::new(sentence_index, slot_start, slot_start + len - 1),
            });
        }
    }
    None
}

/// All non-overlapping matches of one pattern in one sentence, scanned left
/// to right with the longest holder capture preferred.
pub fn match_pattern(
    pattern: &Pattern,
    sentence: &Sentence,
    sentence_index: usize,
    pos_map: &PosReductionMap,
) -> Vec<PatternMatch> {
    let reduced: Vec<ReducedPos> = sentence
        .tokens
        .iter()
        .map(|t| pos_map.reduce(&t.pos_fine))
        .collect();
    let mut matches = Vec::new();
    let mut anchor = 0;
    while anchor < sentence.len() {
        match try_match_at(pattern, &sentence.tokens, &reduced, anchor, sentence_index) {
            Some(m) => {
                anchor = m.end + 1;
                matches.push(m);
            }
            None => anchor += 1,
        }
    }
    matches
}

/// All matches of all patterns over a document, sentence indices
/// document-local, ordered by (sentence, pattern, position).
pub fn match_document(
    patterns: &[Pattern],
    doc: &Document,
    pos_map: &PosReductionMap,
) -> Vec<PatternMatch> {
    let mut matches = Vec::new();
    for (s_idx, sentence) in doc.sentences.iter().enumerate() {
        for pattern in patterns {
            matches.extend(match_pattern(pattern, sentence, s_idx, pos_map));
        }
    }
    matches
}

/// Frequency and precision validation of candidate patterns.
///
/// Frequency counts matches over the unlabeled corpus; precision is the
/// fraction of a pattern's holder captures on the annotated corpus that
/// exactly match a gold span. Both thresholds are inclusive. A pattern with
/// no captures on the annotated corpus has undefined precision and is
/// rejected.
pub fn validate_patterns(
    candidates: &[Pattern],
    unlabeled: &[Document],
    annotated: &[Document],
    min_frequency: usize,
    min_precision: f64,
    pos_map: &PosReductionMap,
) -> (Vec<Pattern>, Vec<PatternStats>) {
    let gold: Vec<HashSet<(usize, usize, usize)>> = annotated
        .iter()
        .map(|doc| {
            crate::corpus::document_gold_spans(doc)
                .into_iter()
                .map(|s| s.key())
                .collect()
        })
        .collect();

    let mut retained = Vec::new();
    let mut stats = Vec::new();
    for pattern in candidates {
        let frequency: usize = unlabeled
            .iter()
            .map(|doc| match_document(std::slice::from_ref(pattern), doc, pos_map).len())
            .sum();
        let mut retrieved = 0;
        let mut true_positives = 0;
        for (doc, gold_keys) in annotated.iter().zip(&gold) {
            for m in match_document(std::slice::from_ref(pattern), doc, pos_map) {
                retrieved += 1;
                if gold_keys.contains(&m.holder.key()) {
                    true_positives += 1;
                }
            }
        }
        let precision = if retrieved > 0 {
            true_positives as f64 / retrieved as f64
        } else {
            0.0
        };
        let keep = frequency >= min_frequency && retrieved > 0 && precision >= min_precision;
        if keep {
            retained.push(pattern.clone());
        }
        stats.push(PatternStats {
            pattern_id: pattern.id.clone(),
            frequency,
            retrieved,
            true_positives,
            precision,
            retained: keep,
        });
    }
    (retained, stats)
}

/// Applies the three retention rules to all pattern matches in a document:
/// a candidate in an Objective sentence is dropped, in a Subjective sentence
/// kept, and in an Unlabeled sentence kept only when the whole captured run
/// is NE-tagged. Duplicate spans are deduplicated. Sentence indices in the
/// result are document-local.
pub fn extract_holders_by_pattern(
    doc: &Document,
    patterns: &[Pattern],
    pos_map: &PosReductionMap,
) -> Result<Vec<HolderSpan>, PatternError> {
    if doc.sentences.iter().any(|s| s.subjectivity.is_none()) {
        return Err(PatternError::MissingSubjectivityLabels {
            doc: doc.id.clone(),
        });
    }
    let mut holders = Vec::new();
    for m in match_document(patterns, doc, pos_map) {
        let sentence = &doc.sentences[m.sentence_index];
        let keep = match sentence.subjectivity.expect("checked above") {
            Subjectivity::Objective => false,
            Subjectivity::Subjective => true,
            Subjectivity::Unlabeled => sentence.tokens[m.holder.start..=m.holder.end]
                .iter()
                .all(Token::is_entity),
        };
        if keep {
            holders.push(m.holder);
        }
    }
    holders.sort_by_key(|s| s.key());
    holders.dedup_by_key(|s| s.key());
    Ok(holders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{HolderLabel, NO_ENTITY};

    fn tok(lemma: &str, pos: &str, ne: &str, gold: HolderLabel) -> Token {
        Token {
            surface: lemma.to_string(),
            lemma: lemma.to_string(),
            pos_fine: pos.to_string(),
            bpc: "O".to_string(),
            ne: ne.to_string(),
            gold,
        }
    }

    fn pos_map() -> PosReductionMap {
        let mut map = PosReductionMap::new();
        map.push_rule("V*", ReducedPos::Verb);
        map.push_rule("D*", ReducedPos::Definite);
        map.push_rule("N*", ReducedPos::Noun);
        map.push_rule("CONJ", ReducedPos::Na);
        map
    }

    fn sent(tokens: Vec<Token>) -> Sentence {
        Sentence::new(tokens)
    }

    #[test]
    fn parse_minimal_pattern() {
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        assert_eq!(
            p.elements,
            vec![
                PatternElement::Literal("qal".to_string()),
                PatternElement::HolderSlot
            ]
        );
    }

    #[test]
    fn parse_pos_sandwich() {
        let p = parse_pattern("p1", "POS:Verb HOLDER POS:Definite").unwrap();
        assert_eq!(p.elements.len(), 3);
        assert_eq!(p.elements[0], PatternElement::PosClass(ReducedPos::Verb));
    }

    #[test]
    fn parse_rejects_bad_patterns() {
        assert!(matches!(
            parse_pattern("p", "HOLDER POS:Verb HOLDER"),
            Err(PatternError::MultipleHolderSlots { .. })
        ));
        assert!(matches!(
            parse_pattern("p", "\"qal\" \"anna\""),
            Err(PatternError::MissingHolderSlot { .. })
        ));
        assert!(matches!(
            parse_pattern("p", "POS:Adjective HOLDER"),
            Err(PatternError::UnknownPosClass { .. })
        ));
        assert!(matches!(
            parse_pattern("p", "HOLDER"),
            Err(PatternError::TooFewElements { .. })
        ));
        assert!(matches!(
            parse_pattern("p", "qal HOLDER"),
            Err(PatternError::BadElement { .. })
        ));
    }

    #[test]
    fn literal_then_definite_matches() {
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        let s = sent(vec![
            tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
            tok("alraees", "D_SG", NO_ENTITY, HolderLabel::NonHolder),
        ]);
        let matches = match_pattern(&p, &s, 0, &pos_map());
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].holder, HolderSpan::new(0, 1, 1));
        assert_eq!((matches[0].start, matches[0].end), (0, 1));
    }

    #[test]
    fn slot_cannot_start_on_ineligible_token() {
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        let s = sent(vec![
            tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
            tok("wa", "CONJ", NO_ENTITY, HolderLabel::NonHolder),
        ]);
        assert!(match_pattern(&p, &s, 0, &pos_map()).is_empty());
    }

    /// Hand-traced maximal-run rule: two NE tokens follow the cue, then a
    /// verb. The run covers exactly the NE tokens and stops before the verb.
    #[test]
    fn slot_takes_maximal_run_and_stops_before_verb() {
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        let s = sent(vec![
            tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
            tok("si", "X", "Person", HolderLabel::NonHolder),
            tok("shu", "X", "Person", HolderLabel::NonHolder),
            tok("akkad", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
        ]);
        let matches = match_pattern(&p, &s, 0, &pos_map());
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].holder, HolderSpan::new(0, 1, 2));
    }

    #[test]
    fn suffix_bounds_the_capture() {
        let p = parse_pattern("p1", "\"qal\" HOLDER \"anna\"").unwrap();
        let s = sent(vec![
            tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
            tok("wazir", "N_SG", NO_ENTITY, HolderLabel::NonHolder),
            tok("altaleem", "D_SG", NO_ENTITY, HolderLabel::NonHolder),
            tok("anna", "N_PART", NO_ENTITY, HolderLabel::NonHolder),
        ]);
        // "anna" itself reduces to Noun and is slot-eligible, but the suffix
        // needs it: capture must stop at token 2.
        let matches = match_pattern(&p, &s, 0, &pos_map());
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].holder, HolderSpan::new(0, 1, 2));
        assert_eq!(matches[0].end, 3);
    }

    #[test]
    fn matches_do_not_overlap() {
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        let s = sent(vec![
            tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
            tok("ahmad", "N_PROP", "Person", HolderLabel::NonHolder),
            tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
            tok("samir", "N_PROP", "Person", HolderLabel::NonHolder),
        ]);
        let matches = match_pattern(&p, &s, 0, &pos_map());
        assert_eq!(matches.len(), 2);
        assert!(matches[0].end < matches[1].start);
    }

    fn gold_doc(label_runs: &[(&str, bool)]) -> Document {
        // Each entry: one sentence "qal <name>" where bool says whether the
        // name is gold-labeled as a holder.
        let sentences = label_runs
            .iter()
            .map(|(name, is_gold)| {
                sent(vec![
                    tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
                    tok(
                        name,
                        "N_PROP",
                        "Person",
                        if *is_gold {
                            HolderLabel::BHolder
                        } else {
                            HolderLabel::NonHolder
                        },
                    ),
                ])
            })
            .collect();
        Document {
            id: "d".to_string(),
            sentences,
        }
    }

    #[test]
    fn validation_thresholds_are_inclusive() {
        let map = pos_map();
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        // Unlabeled corpus with 5 matches; annotated with 4/5 gold = 0.8.
        let unlabeled = vec![gold_doc(&[("a", false); 5])];
        let annotated = vec![gold_doc(&[
            ("a", true),
            ("b", true),
            ("c", true),
            ("d", true),
            ("e", false),
        ])];
        let (retained, stats) =
            validate_patterns(std::slice::from_ref(&p), &unlabeled, &annotated, 5, 0.8, &map);
        assert_eq!(retained.len(), 1);
        assert_eq!(stats[0].frequency, 5);
        assert!((stats[0].precision - 0.8).abs() < 1e-12);

        // Frequency 4 < 5: rejected even at precision 1.0.
        let unlabeled4 = vec![gold_doc(&[("a", false); 4])];
        let (retained, _) = validate_patterns(std::slice::from_ref(&p), &unlabeled4, &annotated, 5, 0.8, &map);
        assert!(retained.is_empty());

        // Precision below threshold: rejected.
        let (retained, _) = validate_patterns(std::slice::from_ref(&p), &unlabeled, &annotated, 5, 0.81, &map);
        assert!(retained.is_empty());

        // Zero retrieval on the annotated corpus: undefined precision, rejected.
        let empty_annotated = vec![gold_doc(&[])];
        let (retained, stats) =
            validate_patterns(&[p], &unlabeled, &empty_annotated, 5, 0.0, &map);
        assert!(retained.is_empty());
        assert_eq!(stats[0].retrieved, 0);
    }

    #[test]
    fn validation_monotone_in_thresholds() {
        let map = pos_map();
        let patterns = vec![
            parse_pattern("p1", "\"qal\" HOLDER").unwrap(),
            parse_pattern("p2", "\"akkad\" HOLDER").unwrap(),
        ];
        let mut sentences = Vec::new();
        for i in 0..6 {
            sentences.push(sent(vec![
                tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
                tok(
                    &format!("n{i}"),
                    "N_PROP",
                    "Person",
                    if i < 4 {
                        HolderLabel::BHolder
                    } else {
                        HolderLabel::NonHolder
                    },
                ),
            ]));
        }
        for i in 0..3 {
            sentences.push(sent(vec![
                tok("akkad", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
                tok(
                    &format!("m{i}"),
                    "N_PROP",
                    "Person",
                    HolderLabel::BHolder,
                ),
            ]));
        }
        let docs = vec![Document {
            id: "d".to_string(),
            sentences,
        }];
        let grid = [(1usize, 0.0f64), (3, 0.5), (5, 0.8), (6, 0.9), (7, 1.0)];
        let mut prev: Option<Vec<String>> = None;
        for (fmin, pmin) in grid {
            let (retained, _) = validate_patterns(&patterns, &docs, &docs, fmin, pmin, &map);
            let ids: Vec<String> = retained.iter().map(|p| p.id.clone()).collect();
            if let Some(prev_ids) = &prev {
                assert!(ids.iter().all(|id| prev_ids.contains(id)));
            }
            prev = Some(ids);
        }
    }

    #[test]
    fn retention_rules_cover_all_three_cases() {
        let map = pos_map();
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        let mk = |name: &str, ne: &str, subj: Subjectivity| {
            let mut s = sent(vec![
                tok("qal", "V_PAST", NO_ENTITY, HolderLabel::NonHolder),
                tok(name, "N_PROP", ne, HolderLabel::NonHolder),
            ]);
            s.subjectivity = Some(subj);
            s
        };
        let doc = Document {
            id: "d".to_string(),
            sentences: vec![
                mk("a", "Person", Subjectivity::Objective),
                mk("b", NO_ENTITY, Subjectivity::Subjective),
                mk("c", "Person", Subjectivity::Unlabeled),
                mk("d", NO_ENTITY, Subjectivity::Unlabeled),
            ],
        };
        let holders = extract_holders_by_pattern(&doc, &[p], &map).unwrap();
        assert_eq!(
            holders,
            vec![HolderSpan::new(1, 1, 1), HolderSpan::new(2, 1, 1)]
        );
    }

    #[test]
    fn unlabeled_sentences_without_classification_error() {
        let map = pos_map();
        let p = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
        let doc = gold_doc(&[("a", false)]);
        assert!(matches!(
            extract_holders_by_pattern(&doc, &[p], &map),
            Err(PatternError::MissingSubjectivityLabels { .. })
        ));
    }
}
