//! Pluggable lexical resources: the subjectivity clue lexicon, the semantic
//! field lexicon, and the fine-to-reduced POS mapping. All three load from
//! plain TSV files and are immutable after loading.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

/// Reserved field-id emitted for lemmas without a semantic field, so absence
/// itself is a learnable feature value.
pub const NULL_FIELD: &str = "__NULL__";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClueStrength {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClueEntry {
    pub strength: ClueStrength,
    pub polarity: Polarity,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate entry for lemma `{lemma}`")]
    DuplicateEntry { lemma: String },
    #[error("line {line}: bad strength `{value}` (expected strong or weak)")]
    BadStrength { line: usize, value: String },
    #[error("line {line}: bad polarity `{value}` (expected positive, negative, or neutral)")]
    BadPolarity { line: usize, value: String },
    #[error("line {line}: empty field id")]
    EmptyFieldId { line: usize },
    #[error("line {line}: unknown reduced tag `{value}`")]
    UnknownReducedTag { line: usize, value: String },
    #[error("line {line}: empty matcher")]
    EmptyMatcher { line: usize },
}

/// Strong/weak subjectivity clues keyed by lemma.
#[derive(Debug, Clone, Default)]
pub struct SubjectivityLexicon {
    entries: HashMap<String, ClueEntry>,
}

impl SubjectivityLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads a TSV with columns `lemma strength polarity`. Duplicate lemmas
    /// are rejected.
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        Self::parse(BufReader::new(File::open(path)?))
    }

    pub fn parse<R: Read>(reader: BufReader<R>) -> Result<Self, LexiconError> {
        let mut entries = HashMap::new();
        for (line_no, fields) in tsv_rows(reader, 3)? {
            let strength = match fields[1].to_ascii_lowercase().as_str() {
                "strong" | "strongsubj" => ClueStrength::Strong,
                "weak" | "weaksubj" => ClueStrength::Weak,
                other => {
                    return Err(LexiconError::BadStrength {
                        line: line_no,
                        value: other.to_string(),
                    })
                }
            };
            let polarity = match fields[2].to_ascii_lowercase().as_str() {
                "positive" => Polarity::Positive,
                "negative" => Polarity::Negative,
                "neutral" => Polarity::Neutral,
                other => {
                    return Err(LexiconError::BadPolarity {
                        line: line_no,
                        value: other.to_string(),
                    })
                }
            };
            if entries
                .insert(fields[0].clone(), ClueEntry { strength, polarity })
                .is_some()
            {
                return Err(LexiconError::DuplicateEntry {
                    lemma: fields[0].clone(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, lemma: &str, strength: ClueStrength, polarity: Polarity) {
        self.entries
            .insert(lemma.to_string(), ClueEntry { strength, polarity });
    }

    pub fn lookup(&self, lemma: &str) -> Option<ClueEntry> {
        self.entries.get(lemma).copied()
    }

    pub fn strength_of(&self, lemma: &str) -> Option<ClueStrength> {
        self.lookup(lemma).map(|e| e.strength)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in deterministic (lemma-sorted) order.
    pub fn iter_sorted(&self) -> Vec<(&str, ClueEntry)> {
        let mut all: Vec<(&str, ClueEntry)> =
            self.entries.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        all.sort_by_key(|(k, _)| *k);
        all
    }

    /// Writes the lexicon back out in the load format, lemma-sorted.
    pub fn write_tsv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (lemma, entry) in self.iter_sorted() {
            let strength = match entry.strength {
                ClueStrength::Strong => "strong",
                ClueStrength::Weak => "weak",
            };
            let polarity = match entry.polarity {
                Polarity::Positive => "positive",
                Polarity::Negative => "negative",
                Polarity::Neutral => "neutral",
            };
            writeln!(out, "{lemma}\t{strength}\t{polarity}")?;
        }
        Ok(())
    }
}

/// Lemma to semantic-field map. Lemmas in the stop class (e.g. prepositions)
/// and absent lemmas both resolve to [`NULL_FIELD`].
#[derive(Debug, Clone, Default)]
pub struct SemanticFieldLexicon {
    entries: HashMap<String, String>,
    stop_class: std::collections::HashSet<String>,
}

impl SemanticFieldLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads a TSV with columns `lemma field`. A field equal to `__NULL__`
    /// puts the lemma in the stop class.
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        Self::parse(BufReader::new(File::open(path)?))
    }

    pub fn parse<R: Read>(reader: BufReader<R>) -> Result<Self, LexiconError> {
        let mut lex = Self::new();
        for (line_no, fields) in tsv_rows(reader, 2)? {
            if fields[1].is_empty() {
                return Err(LexiconError::EmptyFieldId { line: line_no });
            }
            if fields[1] == NULL_FIELD {
                lex.stop_class.insert(fields[0].clone());
            } else {
                lex.entries.insert(fields[0].clone(), fields[1].clone());
            }
        }
        Ok(lex)
    }

    pub fn insert(&mut self, lemma: &str, field: &str) {
        self.entries.insert(lemma.to_string(), field.to_string());
    }

    pub fn insert_stop(&mut self, lemma: &str) {
        self.stop_class.insert(lemma.to_string());
    }

    /// Field id for a lemma, or [`NULL_FIELD`] when absent or stop-classed.
    pub fn lookup<'a>(&'a self, lemma: &str) -> &'a str {
        if self.stop_class.contains(lemma) {
            return NULL_FIELD;
        }
        self.entries.get(lemma).map_or(NULL_FIELD, String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes the lexicon back out in the load format, lemma-sorted; stop
    /// class entries serialize with the `__NULL__` field.
    pub fn write_tsv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        let mut rows: Vec<(&str, &str)> = self
            .entries
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .chain(self.stop_class.iter().map(|k| (k.as_str(), NULL_FIELD)))
            .collect();
        rows.sort_unstable();
        for (lemma, field) in rows {
            writeln!(out, "{lemma}\t{field}")?;
        }
        Ok(())
    }
}

/// The seven-tag reduced POS set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReducedPos {
    Noun,
    Definite,
    Verb,
    Translit,
    Number,
    Symbol,
    Na,
}

impl ReducedPos {
    pub const ALL: [ReducedPos; 7] = [
        ReducedPos::Noun,
        ReducedPos::Definite,
        ReducedPos::Verb,
        ReducedPos::Translit,
        ReducedPos::Number,
        ReducedPos::Symbol,
        ReducedPos::Na,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReducedPos::Noun => "Noun",
            ReducedPos::Definite => "Definite",
            ReducedPos::Verb => "Verb",
            ReducedPos::Translit => "Translit",
            ReducedPos::Number => "Number",
            ReducedPos::Symbol => "Symbol",
            ReducedPos::Na => "NA",
        }
    }

    pub fn parse(s: &str) -> Option<ReducedPos> {
        match s {
            "Noun" => Some(ReducedPos::Noun),
            "Definite" => Some(ReducedPos::Definite),
            "Verb" => Some(ReducedPos::Verb),
            "Translit" => Some(ReducedPos::Translit),
            "Number" => Some(ReducedPos::Number),
            "Symbol" => Some(ReducedPos::Symbol),
            "NA" => Some(ReducedPos::Na),
            _ => None,
        }
    }
}

impl fmt::Display for ReducedPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
enum Matcher {
    Exact(String),
    Prefix(String),
    Any,
}

impl Matcher {
    fn parse(text: &str) -> Matcher {
        if text == "*" {
            Matcher::Any
        } else if let Some(prefix) = text.strip_suffix('*') {
            Matcher::Prefix(prefix.to_string())
        } else {
            Matcher::Exact(text.to_string())
        }
    }

    fn matches(&self, fine_tag: &str) -> bool {
        match self {
            Matcher::Exact(t) => fine_tag == t,
            Matcher::Prefix(p) => fine_tag.starts_with(p.as_str()),
            Matcher::Any => true,
        }
    }
}

/// Ordered first-match-wins rules mapping fine tagger output onto
/// [`ReducedPos`]. Unmatched tags reduce to `NA`.
#[derive(Debug, Clone, Default)]
pub struct PosReductionMap {
    rules: Vec<(Matcher, ReducedPos)>,
}

impl PosReductionMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads a TSV rule file with columns `matcher reduced_tag`. Matchers are
    /// exact strings, `prefix*`, or the catch-all `*`; order is significant.
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        Self::parse(BufReader::new(File::open(path)?))
    }

    pub fn parse<R: Read>(reader: BufReader<R>) -> Result<Self, LexiconError> {
        let mut rules = Vec::new();
        for (line_no, fields) in tsv_rows(reader, 2)? {
            if fields[0].is_empty() {
                return Err(LexiconError::EmptyMatcher { line: line_no });
            }
            let reduced =
                ReducedPos::parse(&fields[1]).ok_or_else(|| LexiconError::UnknownReducedTag {
                    line: line_no,
                    value: fields[1].clone(),
                })?;
            rules.push((Matcher::parse(&fields[0]), reduced));
        }
        Ok(Self { rules })
    }

    pub fn push_rule(&mut self, matcher: &str, reduced: ReducedPos) {
        self.rules.push((Matcher::parse(matcher), reduced));
    }

    /// Total and deterministic: first matching rule wins, default `NA`.
    pub fn reduce(&self, fine_tag: &str) -> ReducedPos {
        self.rules
            .iter()
            .find(|(m, _)| m.matches(fine_tag))
            .map_or(ReducedPos::Na, |(_, r)| *r)
    }
}

fn tsv_rows<R: Read>(
    reader: BufReader<R>,
    expected: usize,
) -> Result<Vec<(usize, Vec<String>)>, LexiconError> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != expected {
            return Err(LexiconError::ColumnCountMismatch {
                line: line_no,
                expected,
                found: fields.len(),
            });
        }
        rows.push((line_no, fields));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn subj(text: &str) -> Result<SubjectivityLexicon, LexiconError> {
        SubjectivityLexicon::parse(BufReader::new(Cursor::new(text.to_string())))
    }

    #[test]
    fn loads_strong_and_weak_entries() {
        let lex = subj("mustankir\tstrong\tnegative\nmuhtaram\tweak\tpositive\n").unwrap();
        assert_eq!(lex.strength_of("mustankir"), Some(ClueStrength::Strong));
        assert_eq!(lex.strength_of("muhtaram"), Some(ClueStrength::Weak));
        assert_eq!(lex.lookup("muhtaram").unwrap().polarity, Polarity::Positive);
        assert_eq!(lex.strength_of("ghaib"), None);
    }

    #[test]
    fn duplicate_lemma_rejected() {
        let err = subj("x\tstrong\tnegative\nx\tweak\tpositive\n").unwrap_err();
        assert!(matches!(err, LexiconError::DuplicateEntry { .. }));
    }

    #[test]
    fn bad_strength_reports_line() {
        let err = subj("x\tstrong\tnegative\ny\tmedium\tpositive\n").unwrap_err();
        assert!(matches!(err, LexiconError::BadStrength { line: 2, .. }));
    }

    #[test]
    fn semantic_lookup_and_null() {
        let text = "wadah\tcommunication-verbs\nfi\t__NULL__\n";
        let lex = SemanticFieldLexicon::parse(BufReader::new(Cursor::new(text.to_string())))
            .unwrap();
        assert_eq!(lex.lookup("wadah"), "communication-verbs");
        assert_eq!(lex.lookup("ghaib"), NULL_FIELD);
        // Stop-classed preposition resolves to NULL even though listed.
        assert_eq!(lex.lookup("fi"), NULL_FIELD);
    }

    fn pos_rules() -> PosReductionMap {
        let text = "V_*\tVerb\nN_DEF*\tDefinite\nN_*\tNoun\nNUM\tNumber\nLATIN*\tTranslit\nPUNC\tSymbol\n";
        PosReductionMap::parse(BufReader::new(Cursor::new(text.to_string()))).unwrap()
    }

    #[test]
    fn reduce_follows_rule_order() {
        let map = pos_rules();
        assert_eq!(map.reduce("V_PAST_3SM"), ReducedPos::Verb);
        assert_eq!(map.reduce("N_DEF_SG"), ReducedPos::Definite);
        assert_eq!(map.reduce("N_PROP"), ReducedPos::Noun);
        assert_eq!(map.reduce("PRON"), ReducedPos::Na);
    }

    #[test]
    fn unknown_reduced_tag_rejected() {
        let err = PosReductionMap::parse(BufReader::new(Cursor::new("X\tAdj\n".to_string())))
            .unwrap_err();
        assert!(matches!(err, LexiconError::UnknownReducedTag { .. }));
    }

    #[test]
    fn lexicons_roundtrip_through_their_tsv_form() {
        let subj_lex = subj("b\tweak\tneutral\na\tstrong\tnegative\n").unwrap();
        let mut buf = Vec::new();
        subj_lex.write_tsv(&mut buf).unwrap();
        let reloaded =
            SubjectivityLexicon::parse(BufReader::new(Cursor::new(buf.clone()))).unwrap();
        assert_eq!(subj_lex.iter_sorted(), reloaded.iter_sorted());
        assert_eq!(String::from_utf8(buf).unwrap(), "a\tstrong\tnegative\nb\tweak\tneutral\n");

        let sem_text = "wadah\tcommunication-verbs\nfi\t__NULL__\n";
        let sem = SemanticFieldLexicon::parse(BufReader::new(Cursor::new(sem_text.to_string())))
            .unwrap();
        let mut buf = Vec::new();
        sem.write_tsv(&mut buf).unwrap();
        let reloaded =
            SemanticFieldLexicon::parse(BufReader::new(Cursor::new(buf))).unwrap();
        assert_eq!(reloaded.lookup("wadah"), "communication-verbs");
        assert_eq!(reloaded.lookup("fi"), NULL_FIELD);
        assert_eq!(reloaded.len(), sem.len());
    }

    proptest! {
        #[test]
        fn reduce_is_total(tag in "[A-Z_0-9]{0,12}") {
            let map = pos_rules();
            let reduced = map.reduce(&tag);
            prop_assert!(ReducedPos::ALL.contains(&reduced));
            prop_assert_eq!(map.reduce(&tag), reduced);
        }
    }
}
