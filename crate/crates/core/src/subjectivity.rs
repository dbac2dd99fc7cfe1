//! High-precision rule classifiers for sentence subjectivity.
//!
//! Two rules over subjectivity-clue counts: a sentence is Subjective when it
//! alone contains two or more strong clues; it is Objective when the window
//! of current, previous, and next sentence combined contains no strong clue
//! and at most one weak clue. Everything else stays Unlabeled. The two rules
//! cannot both fire: two strong clues in the current sentence already break
//! the objective condition.

use std::ops::Add;

use crate::corpus::{Document, Sentence, Subjectivity};
use crate::lexicons::{ClueStrength, SubjectivityLexicon};

/// Strong/weak clue occurrence counts for one sentence. Repeated occurrences
/// of the same lemma count every time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClueCounts {
    pub strong: usize,
    pub weak: usize,
}

impl Add for ClueCounts {
    type Output = ClueCounts;

    fn add(self, rhs: ClueCounts) -> ClueCounts {
        ClueCounts {
            strong: self.strong + rhs.strong,
            weak: self.weak + rhs.weak,
        }
    }
}

pub fn count_clues(sentence: &Sentence, lex: &SubjectivityLexicon) -> ClueCounts {
    let mut counts = ClueCounts::default();
    for token in &sentence.tokens {
        match lex.strength_of(&token.lemma) {
            Some(ClueStrength::Strong) => counts.strong += 1,
            Some(ClueStrength::Weak) => counts.weak += 1,
            None => {}
        }
    }
    counts
}

/// The decision rules on raw counts. `cur` is the current sentence alone,
/// `window` the three-sentence combination.
pub fn classify_counts(cur: ClueCounts, window: ClueCounts) -> Subjectivity {
    if cur.strong >= 2 {
        Subjectivity::Subjective
    } else if window.strong == 0 && window.weak <= 1 {
        Subjectivity::Objective
    } else {
        Subjectivity::Unlabeled
    }
}

/// Classifies one sentence given its in-document neighbors. Absent neighbors
/// at document boundaries contribute zero counts.
pub fn classify_sentence(
    prev: Option<&Sentence>,
    cur: &Sentence,
    next: Option<&Sentence>,
    lex: &SubjectivityLexicon,
) -> Subjectivity {
    let cur_counts = count_clues(cur, lex);
    let window = prev.map(|s| count_clues(s, lex)).unwrap_or_default()
        + cur_counts
        + next.map(|s| count_clues(s, lex)).unwrap_or_default();
    classify_counts(cur_counts, window)
}

/// Fills the subjectivity slot of every sentence in the document.
pub fn label_document(doc: &mut Document, lex: &SubjectivityLexicon) {
    let labels: Vec<Subjectivity> = (0..doc.sentences.len())
        .map(|i| {
            let prev = i.checked_sub(1).map(|p| &doc.sentences[p]);
            let next = doc.sentences.get(i + 1);
            classify_sentence(prev, &doc.sentences[i], next, lex)
        })
        .collect();
    for (sentence, label) in doc.sentences.iter_mut().zip(labels) {
        sentence.subjectivity = Some(label);
    }
}

pub fn label_corpus(docs: &mut [Document], lex: &SubjectivityLexicon) {
    for doc in docs {
        label_document(doc, lex);
    }
}
