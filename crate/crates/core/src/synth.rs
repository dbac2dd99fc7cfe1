//! Deterministic synthetic corpora for smoke tests and experiments.
//!
//! Two generators with different learnability profiles:
//!
//! * [`lexical_cue_corpus`] plants holders right after a cue verb and draws
//!   holder names from a small shared vocabulary, so the task is fully
//!   separable from word features alone.
//! * [`ne_cue_corpus`] makes every holder name unique. Word identity cannot
//!   transfer across folds; the NE column carries the boundary signal, some
//!   holders follow verbs no pattern covers, and person-entity distractors
//!   appear outside holder positions.
//!
//! Both also emit matching lexicon, POS-rule, and pattern files so a whole
//! experiment can run off one generated directory.

use std::io::{BufReader, Cursor, Write};
use std::path::{Path, PathBuf};

use crate::corpus::{self, Document, HolderLabel, Sentence, Token, NO_ENTITY};
use crate::lexicons::{PosReductionMap, SemanticFieldLexicon, SubjectivityLexicon};
use crate::patterns::{self, Pattern};
use crate::rng::SplitMix64;

/// A generated corpus plus the resource files it was built against, kept as
/// source text so file-based and in-memory runs stay identical.
pub struct SynthCorpus {
    pub documents: Vec<Document>,
    pub subjectivity_tsv: String,
    pub semantic_tsv: String,
    pub pos_rules_tsv: String,
    pub patterns_text: String,
}

/// Paths written by [`SynthCorpus::write_files`].
pub struct SynthFiles {
    pub corpus: PathBuf,
    pub subjectivity: PathBuf,
    pub semantic: PathBuf,
    pub pos_rules: PathBuf,
    pub patterns: PathBuf,
}

impl SynthCorpus {
    pub fn subjectivity(&self) -> SubjectivityLexicon {
        SubjectivityLexicon::parse(BufReader::new(Cursor::new(self.subjectivity_tsv.clone())))
            .expect("generated lexicon is well-formed")
    }

    pub fn semantic(&self) -> SemanticFieldLexicon {
        SemanticFieldLexicon::parse(BufReader::new(Cursor::new(self.semantic_tsv.clone())))
            .expect("generated lexicon is well-formed")
    }

    pub fn pos_rules(&self) -> PosReductionMap {
        PosReductionMap::parse(BufReader::new(Cursor::new(self.pos_rules_tsv.clone())))
            .expect("generated rules are well-formed")
    }

    pub fn patterns(&self) -> Vec<Pattern> {
        patterns::parse_patterns(BufReader::new(Cursor::new(self.patterns_text.clone())))
            .expect("generated patterns are well-formed")
    }

    pub fn write_files(&self, dir: &Path) -> std::io::Result<SynthFiles> {
        std::fs::create_dir_all(dir)?;
        let corpus_path = dir.join("corpus.col");
        corpus::io::write_corpus_to_path(&self.documents, &corpus_path)?;
        let write = |name: &str, text: &str| -> std::io::Result<PathBuf> {
            let path = dir.join(name);
            let mut f = std::fs::File::create(&path)?;
            f.write_all(text.as_bytes())?;
            Ok(path)
        };
        Ok(SynthFiles {
            corpus: corpus_path,
            subjectivity: write("subjectivity.tsv", &self.subjectivity_tsv)?,
            semantic: write("semantic.tsv", &self.semantic_tsv)?,
            pos_rules: write("pos_rules.tsv", &self.pos_rules_tsv)?,
            patterns: write("patterns.txt", &self.patterns_text)?,
        })
    }
}

const POS_RULES: &str = "\
V_*\tVerb
N_PROP\tNoun
N_DEF*\tDefinite
N_*\tNoun
NUM\tNumber
LATIN*\tTranslit
PUNC\tSymbol
";

const SUBJECTIVITY: &str = "\
mustankir\tstrong\tnegative
raai\tstrong\tpositive
jayyid\tweak\tpositive
gharib\tweak\tneutral
";

fn semantic_tsv(extra_verbs: &[&str]) -> String {
    let mut text = String::new();
    for verb in ["qal", "sarraha", "akkad"].iter().chain(extra_verbs) {
        text.push_str(&format!("{verb}\tcommunication\n"));
    }
    for i in 0..20 {
        text.push_str(&format!("w{i}\tgeneral{}\n", i % 4));
    }
    text.push_str("fi\t__NULL__\nila\t__NULL__\n");
    text
}

fn tok(lemma: &str, pos: &str, bpc: &str, ne: &str, gold: HolderLabel) -> Token {
    Token {
        surface: lemma.to_string(),
        lemma: lemma.to_string(),
        pos_fine: pos.to_string(),
        bpc: bpc.to_string(),
        ne: ne.to_string(),
        gold,
    }
}

/// General filler; word index decides the POS so the corpus has all reduced
/// tags in circulation.
fn filler(rng: &mut SplitMix64) -> Token {
    let i = rng.below(20);
    let pos = match i % 3 {
        0 => "N_SG",
        1 => "PART",
        _ => "ADJ",
    };
    tok(&format!("w{i}"), pos, "O", NO_ENTITY, HolderLabel::NonHolder)
}

/// Filler that can never extend a holder capture: not slot-eligible.
fn safe_filler(rng: &mut SplitMix64) -> Token {
    let options = [("fi", "PART"), ("ila", "PART"), ("qad", "PART"), ("kataba", "V_PAST")];
    let (lemma, pos) = options[rng.below(options.len())];
    tok(lemma, pos, "O", NO_ENTITY, HolderLabel::NonHolder)
}

fn clue_pair(tokens: &mut Vec<Token>) {
    // Two occurrences of one strong clue: fires the subjective rule on the
    // current sentence alone.
    tokens.push(tok("mustankir", "ADJ", "O", NO_ENTITY, HolderLabel::NonHolder));
    tokens.push(tok("mustankir", "ADJ", "O", NO_ENTITY, HolderLabel::NonHolder));
}

/// Small-vocabulary corpus: holders are `first (last)?` name pairs from five
/// shared names each, always right after the cue verb `qal`.
pub fn lexical_cue_corpus(seed: u64, n_docs: usize, sentences_per_doc: usize) -> SynthCorpus {
    let mut rng = SplitMix64::new(seed);
    let mut documents = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let mut sentences = Vec::with_capacity(sentences_per_doc);
        for _ in 0..sentences_per_doc {
            let mut tokens = Vec::new();
            for _ in 0..1 + rng.below(3) {
                tokens.push(filler(&mut rng));
            }
            if rng.next_f64() < 0.45 {
                if rng.next_f64() < 0.55 {
                    clue_pair(&mut tokens);
                }
                tokens.push(tok("qal", "V_PAST", "B-VP", NO_ENTITY, HolderLabel::NonHolder));
                let first = format!("fname{}", rng.below(5));
                tokens.push(tok(&first, "N_PROP", "B-NP", "Person", HolderLabel::BHolder));
                if rng.next_f64() < 0.6 {
                    let last = format!("lname{}", rng.below(5));
                    tokens.push(tok(&last, "N_PROP", "I-NP", "Person", HolderLabel::IHolder));
                }
                tokens.push(safe_filler(&mut rng));
            }
            for _ in 0..1 + rng.below(3) {
                tokens.push(filler(&mut rng));
            }
            sentences.push(Sentence::new(tokens));
        }
        documents.push(Document {
            id: format!("doc{d}"),
            sentences,
        });
    }
    SynthCorpus {
        documents,
        subjectivity_tsv: SUBJECTIVITY.to_string(),
        semantic_tsv: semantic_tsv(&[]),
        pos_rules_tsv: POS_RULES.to_string(),
        patterns_text: "# cue followed by a holder run\n\"qal\" HOLDER\n".to_string(),
    }
}

/// Unique-name corpus: word identity does not transfer across folds and the
/// NE column is the only signal marking holder extents. Names carry a POS
/// tag no reduction rule matches, every holder and distractor run is
/// followed by a fresh out-of-vocabulary non-entity word (so "unseen word"
/// alone cannot stand in for "inside a name"), and person-entity distractors
/// occur away from the introducing verbs. Three verb contexts introduce
/// holders; patterns cover `qal` and the rarer `sarraha` but not `athanna`.
pub fn ne_cue_corpus(seed: u64, n_docs: usize, sentences_per_doc: usize) -> SynthCorpus {
    let mut rng = SplitMix64::new(seed);
    let mut name_counter = 0usize;
    let mut fresh_name = move || {
        name_counter += 1;
        format!("nm{name_counter}")
    };
    let mut oov_counter = 0usize;
    let mut fresh_oov = move || {
        oov_counter += 1;
        format!("uw{oov_counter}")
    };
    // POS "X_UNK" matches no rule and reduces to NA, exactly like the OOV
    // buffer words; only the NE column separates the two.
    let mut documents = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let mut sentences = Vec::with_capacity(sentences_per_doc);
        for _ in 0..sentences_per_doc {
            let mut tokens = Vec::new();
            for _ in 0..1 + rng.below(3) {
                tokens.push(filler(&mut rng));
            }
            let roll = rng.next_f64();
            if roll < 0.55 {
                // Holder sentence: pick the introducing verb.
                let verb = if roll < 0.30 {
                    "qal"
                } else if roll < 0.38 {
                    "sarraha"
                } else {
                    "athanna"
                };
                if rng.next_f64() < 0.55 {
                    clue_pair(&mut tokens);
                }
                tokens.push(tok(verb, "V_PAST", "O", NO_ENTITY, HolderLabel::NonHolder));
                let holder_len = 1 + rng.below(3);
                for i in 0..holder_len {
                    let gold = if i == 0 {
                        HolderLabel::BHolder
                    } else {
                        HolderLabel::IHolder
                    };
                    let name = fresh_name();
                    tokens.push(tok(&name, "X_UNK", "O", "Person", gold));
                }
                // Variable-length OOV tail: the name/buffer split is visible
                // only through the NE column.
                for _ in 0..1 + rng.below(3) {
                    tokens.push(tok(&fresh_oov(), "X_UNK", "O", NO_ENTITY, HolderLabel::NonHolder));
                }
            } else if roll < 0.72 {
                // Distractor: a person entity in a non-holder position.
                tokens.push(safe_filler(&mut rng));
                for _ in 0..1 + rng.below(2) {
                    let name = fresh_name();
                    tokens.push(tok(&name, "X_UNK", "O", "Person", HolderLabel::NonHolder));
                }
                for _ in 0..1 + rng.below(3) {
                    tokens.push(tok(&fresh_oov(), "X_UNK", "O", NO_ENTITY, HolderLabel::NonHolder));
                }
            }
            if rng.next_f64() < 0.3 {
                tokens.push(tok(&fresh_oov(), "X_UNK", "O", NO_ENTITY, HolderLabel::NonHolder));
            }
            for _ in 0..1 + rng.below(3) {
                tokens.push(filler(&mut rng));
            }
            sentences.push(Sentence::new(tokens));
        }
        documents.push(Document {
            id: format!("doc{d}"),
            sentences,
        });
    }
    SynthCorpus {
        documents,
        subjectivity_tsv: SUBJECTIVITY.to_string(),
        semantic_tsv: semantic_tsv(&["athanna"]),
        pos_rules_tsv: POS_RULES.to_string(),
        patterns_text: "\"qal\" HOLDER\n\"sarraha\" HOLDER\n".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::validate_bio;

    #[test]
    fn generated_corpora_are_bio_valid_and_sized() {
        for corpus in [lexical_cue_corpus(1, 12, 18), ne_cue_corpus(1, 12, 18)] {
            assert_eq!(corpus.documents.len(), 12);
            let sentences: usize = corpus.documents.iter().map(|d| d.sentences.len()).sum();
            assert_eq!(sentences, 12 * 18);
            for doc in &corpus.documents {
                for s in &doc.sentences {
                    assert!(!s.is_empty());
                    assert!(validate_bio(&s.gold_labels()).is_ok());
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = lexical_cue_corpus(7, 4, 6);
        let b = lexical_cue_corpus(7, 4, 6);
        assert_eq!(a.documents, b.documents);
        let c = lexical_cue_corpus(8, 4, 6);
        assert_ne!(a.documents, c.documents);
    }

    #[test]
    fn corpora_contain_holders_and_resources_parse() {
        let corpus = ne_cue_corpus(3, 10, 15);
        let holders: usize = corpus
            .documents
            .iter()
            .map(|d| corpus::document_gold_spans(d).len())
            .sum();
        assert!(holders > 50, "only {holders} holders");
        assert!(!corpus.patterns().is_empty());
        assert!(!corpus.subjectivity().is_empty());
        assert!(!corpus.semantic().is_empty());
    }

    #[test]
    fn written_files_reload_identically() {
        let corpus = lexical_cue_corpus(5, 3, 4);
        let dir = tempfile::tempdir().unwrap();
        let files = corpus.write_files(dir.path()).unwrap();
        let reloaded =
            corpus::io::read_corpus(&files.corpus, corpus::io::ColumnSchema::Gold).unwrap();
        assert_eq!(reloaded, corpus.documents);
    }
}
