//! Token feature extraction for CRF training and decoding.
//!
//! Each token yields a fixed-size list of feature strings of the form
//! `FAMILY[offset]=value` for windowed families and `FAMILY=value` for the
//! sentence-level ones. Every family can be switched off independently for
//! ablation, and single NE classes can be dropped without disabling the rest
//! of the NE family.

use std::collections::BTreeSet;
use std::io::Write;

use crate::corpus::{Document, Sentence, Subjectivity};
use crate::lexicons::{ClueStrength, PosReductionMap, SemanticFieldLexicon, SubjectivityLexicon};
use crate::patterns::PatternMatch;

/// The ten NE classes recognized by the upstream tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NeClass {
    Person,
    Location,
    Organization,
    Job,
    Device,
    Car,
    CellPhone,
    Currency,
    Date,
    Time,
}

impl NeClass {
    pub const ALL: [NeClass; 10] = [
        NeClass::Person,
        NeClass::Location,
        NeClass::Organization,
        NeClass::Job,
        NeClass::Device,
        NeClass::Car,
        NeClass::CellPhone,
        NeClass::Currency,
        NeClass::Date,
        NeClass::Time,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NeClass::Person => "Person",
            NeClass::Location => "Location",
            NeClass::Organization => "Organization",
            NeClass::Job => "Job",
            NeClass::Device => "Device",
            NeClass::Car => "Car",
            NeClass::CellPhone => "CellPhone",
            NeClass::Currency => "Currency",
            NeClass::Date => "Date",
            NeClass::Time => "Time",
        }
    }
}

/// Feature families, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureFamily {
    Word,
    SemField,
    Pos,
    Bpc,
    Ne,
    MpqaStrong,
    MpqaWeak,
    Pattern,
    SubjCls,
    ObjCls,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 10] = [
        FeatureFamily::Word,
        FeatureFamily::SemField,
        FeatureFamily::Pos,
        FeatureFamily::Bpc,
        FeatureFamily::Ne,
        FeatureFamily::MpqaStrong,
        FeatureFamily::MpqaWeak,
        FeatureFamily::Pattern,
        FeatureFamily::SubjCls,
        FeatureFamily::ObjCls,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureFamily::Word => "WORD",
            FeatureFamily::SemField => "SEMFIELD",
            FeatureFamily::Pos => "POS",
            FeatureFamily::Bpc => "BPC",
            FeatureFamily::Ne => "NE",
            FeatureFamily::MpqaStrong => "MPQA_STRONG",
            FeatureFamily::MpqaWeak => "MPQA_WEAK",
            FeatureFamily::Pattern => "PATTERN",
            FeatureFamily::SubjCls => "SUBJ_CLS",
            FeatureFamily::ObjCls => "OBJ_CLS",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureFamily> {
        FeatureFamily::ALL.iter().copied().find(|f| f.as_str() == s)
    }

    pub fn is_windowed(self) -> bool {
        !matches!(
            self,
            FeatureFamily::Pattern | FeatureFamily::SubjCls | FeatureFamily::ObjCls
        )
    }
}

/// Which families are active and how wide the window is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    /// Window half-width n; offsets run over [-n, +n].
    pub window_radius: usize,
    pub families: BTreeSet<FeatureFamily>,
    /// NE classes excluded from the NE family (single-class ablation).
    pub disabled_ne_classes: BTreeSet<NeClass>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            window_radius: 3,
            families: FeatureFamily::ALL.iter().copied().collect(),
            disabled_ne_classes: BTreeSet::new(),
        }
    }
}

impl FeatureConfig {
    pub fn enabled(&self, family: FeatureFamily) -> bool {
        self.families.contains(&family)
    }

    pub fn disable(&mut self, family: FeatureFamily) -> &mut Self {
        self.families.remove(&family);
        self
    }

    pub fn enable(&mut self, family: FeatureFamily) -> &mut Self {
        self.families.insert(family);
        self
    }

    pub fn active_ne_classes(&self) -> Vec<NeClass> {
        NeClass::ALL
            .iter()
            .copied()
            .filter(|c| !self.disabled_ne_classes.contains(c))
            .collect()
    }

    /// Features emitted per token; fixed for a given config regardless of
    /// token content.
    pub fn features_per_token(&self) -> usize {
        let width = 2 * self.window_radius + 1;
        let mut count = 0;
        for family in [
            FeatureFamily::Word,
            FeatureFamily::SemField,
            FeatureFamily::Pos,
            FeatureFamily::Bpc,
            FeatureFamily::MpqaStrong,
            FeatureFamily::MpqaWeak,
        ] {
            if self.enabled(family) {
                count += width;
            }
        }
        if self.enabled(FeatureFamily::Ne) {
            count += self.active_ne_classes().len() * width;
        }
        for family in [
            FeatureFamily::Pattern,
            FeatureFamily::SubjCls,
            FeatureFamily::ObjCls,
        ] {
            if self.enabled(family) {
                count += 1;
            }
        }
        count
    }
}

/// One ablation row of the feature-contribution experiment: each value names
/// the feature group a single retraining runs without.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationGroup {
    Pattern,
    SubjectivityClassifiers,
    SemanticField,
    SubjectivityClues,
    JobNe,
    PersonNe,
    AllNe,
}

impl AblationGroup {
    pub const ALL: [AblationGroup; 7] = [
        AblationGroup::Pattern,
        AblationGroup::SubjectivityClassifiers,
        AblationGroup::SemanticField,
        AblationGroup::SubjectivityClues,
        AblationGroup::JobNe,
        AblationGroup::PersonNe,
        AblationGroup::AllNe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AblationGroup::Pattern => "Pattern",
            AblationGroup::SubjectivityClassifiers => "SubjectivityClassifiers",
            AblationGroup::SemanticField => "SemanticField",
            AblationGroup::SubjectivityClues => "SubjectivityClues",
            AblationGroup::JobNe => "JobNE",
            AblationGroup::PersonNe => "PersonNE",
            AblationGroup::AllNe => "AllNE",
        }
    }

    pub fn parse(s: &str) -> Option<AblationGroup> {
        AblationGroup::ALL.iter().copied().find(|g| g.as_str() == s)
    }

    /// Removes the group's features from a config.
    pub fn apply(self, cfg: &mut FeatureConfig) {
        match self {
            AblationGroup::Pattern => {
                cfg.disable(FeatureFamily::Pattern);
            }
            AblationGroup::SubjectivityClassifiers => {
                cfg.disable(FeatureFamily::SubjCls);
                cfg.disable(FeatureFamily::ObjCls);
            }
            AblationGroup::SemanticField => {
                cfg.disable(FeatureFamily::SemField);
            }
            AblationGroup::SubjectivityClues => {
                cfg.disable(FeatureFamily::MpqaStrong);
                cfg.disable(FeatureFamily::MpqaWeak);
            }
            AblationGroup::JobNe => {
                cfg.disabled_ne_classes.insert(NeClass::Job);
            }
            AblationGroup::PersonNe => {
                cfg.disabled_ne_classes.insert(NeClass::Person);
            }
            AblationGroup::AllNe => {
                cfg.disable(FeatureFamily::Ne);
            }
        }
    }
}

/// Immutable lexical resources consulted during extraction.
pub struct FeatureResources<'a> {
    pub semantic: &'a SemanticFieldLexicon,
    pub subjectivity: &'a SubjectivityLexicon,
    pub pos_map: &'a PosReductionMap,
}

/// Feature strings for one token position, in deterministic
/// (family, offset) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub position: usize,
    pub features: Vec<String>,
}

/// Per-token flags marking membership in any retained-pattern match extent.
pub fn pattern_coverage(doc: &Document, matches: &[PatternMatch]) -> Vec<Vec<bool>> {
    let mut cover: Vec<Vec<bool>> = doc
        .sentences
        .iter()
        .map(|s| vec![false; s.len()])
        .collect();
    for m in matches {
        for slot in &mut cover[m.sentence_index][m.start..=m.end] {
            *slot = true;
        }
    }
    cover
}

fn windowed_value<'a>(
    sentence: &Sentence,
    t: usize,
    offset: isize,
    value_at: impl Fn(usize) -> String + 'a,
) -> String {
    let pos = t as isize + offset;
    if pos < 0 {
        "BOS".to_string()
    } else if pos as usize >= sentence.len() {
        "EOS".to_string()
    } else {
        value_at(pos as usize)
    }
}

/// Extracts the feature vector of one token.
pub fn extract_features(
    sentence: &Sentence,
    t: usize,
    pattern_cover: &[bool],
    resources: &FeatureResources<'_>,
    cfg: &FeatureConfig,
) -> FeatureVector {
    let n = cfg.window_radius as isize;
    let mut features = Vec::with_capacity(cfg.features_per_token());

    let mut window_family = |name: &str, value_at: &dyn Fn(usize) -> String| {
        for offset in -n..=n {
            let value = windowed_value(sentence, t, offset, value_at);
            features.push(format!("{name}[{offset}]={value}"));
        }
    };

    if cfg.enabled(FeatureFamily::Word) {
        window_family("WORD", &|i| sentence.tokens[i].lemma.clone());
    }
    if cfg.enabled(FeatureFamily::SemField) {
        window_family("SEMFIELD", &|i| {
            resources.semantic.lookup(&sentence.tokens[i].lemma).to_string()
        });
    }
    if cfg.enabled(FeatureFamily::Pos) {
        window_family("POS", &|i| {
            resources
                .pos_map
                .reduce(&sentence.tokens[i].pos_fine)
                .as_str()
                .to_string()
        });
    }
    if cfg.enabled(FeatureFamily::Bpc) {
        window_family("BPC", &|i| sentence.tokens[i].bpc.clone());
    }
    if cfg.enabled(FeatureFamily::Ne) {
        for class in cfg.active_ne_classes() {
            let name = format!("NE_{}", class.as_str());
            window_family(&name, &|i| {
                if sentence.tokens[i].ne == class.as_str() {
                    "1".to_string()
                } else {
                    "0".to_string()
                }
            });
        }
    }
    if cfg.enabled(FeatureFamily::MpqaStrong) {
        window_family("MPQA_STRONG", &|i| {
            match resources.subjectivity.strength_of(&sentence.tokens[i].lemma) {
                Some(ClueStrength::Strong) => "1".to_string(),
                _ => "0".to_string(),
            }
        });
    }
    if cfg.enabled(FeatureFamily::MpqaWeak) {
        window_family("MPQA_WEAK", &|i| {
            match resources.subjectivity.strength_of(&sentence.tokens[i].lemma) {
                Some(ClueStrength::Weak) => "1".to_string(),
                _ => "0".to_string(),
            }
        });
    }
    if cfg.enabled(FeatureFamily::Pattern) {
        let inside = pattern_cover.get(t).copied().unwrap_or(false);
        features.push(format!("PATTERN={}", inside as u8));
    }
    if cfg.enabled(FeatureFamily::SubjCls) {
        let v = (sentence.subjectivity == Some(Subjectivity::Subjective)) as u8;
        features.push(format!("SUBJ_CLS={v}"));
    }
    if cfg.enabled(FeatureFamily::ObjCls) {
        let v = (sentence.subjectivity == Some(Subjectivity::Objective)) as u8;
        features.push(format!("OBJ_CLS={v}"));
    }
    FeatureVector {
        position: t,
        features,
    }
}

/// Feature vectors for every token of a document; `matches` are the
/// document's retained-pattern matches.
pub fn featurize_document(
    doc: &Document,
    matches: &[PatternMatch],
    resources: &FeatureResources<'_>,
    cfg: &FeatureConfig,
) -> Vec<Vec<FeatureVector>> {
    let cover = pattern_coverage(doc, matches);
    doc.sentences
        .iter()
        .zip(&cover)
        .map(|(sentence, cover)| {
            (0..sentence.len())
                .map(|t| extract_features(sentence, t, cover, resources, cfg))
                .collect()
        })
        .collect()
}

/// Per-document, per-sentence, per-token feature vectors for a corpus.
pub fn featurize_corpus(
    docs: &[Document],
    matches_per_doc: &[Vec<PatternMatch>],
    resources: &FeatureResources<'_>,
    cfg: &FeatureConfig,
) -> Vec<Vec<Vec<FeatureVector>>> {
    debug_assert_eq!(docs.len(), matches_per_doc.len());
    docs.iter()
        .zip(matches_per_doc)
        .map(|(doc, matches)| featurize_document(doc, matches, resources, cfg))
        .collect()
}

/// Debug dump: `#doc` headers, one token per line with its feature strings
/// tab-separated, a blank line after each sentence.
pub fn write_feature_dump<W: Write>(
    docs: &[Document],
    featurized: &[Vec<Vec<FeatureVector>>],
    out: &mut W,
) -> std::io::Result<()> {
    for (doc, sentences) in docs.iter().zip(featurized) {
        writeln!(out, "#doc {}", doc.id)?;
        for sentence in sentences {
            for vector in sentence {
                writeln!(out, "{}", vector.features.join("\t"))?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
