//! End-to-end experiment orchestration for the three investigated
//! approaches: patterns only, CRF without the pattern feature, and CRF with
//! it.
//!
//! The patterns-only run labels sentence subjectivity, applies the retention
//! rules, and scores against gold over the whole annotated corpus. The CRF
//! runs cross-validate at document level; when the pattern feature is
//! enabled, candidate patterns are re-validated inside each fold on the
//! training documents only, so no test-fold statistics leak into features.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::{
    corpus_gold_spans, globalize_spans, spans_from_label_seq, CorpusError, Document,
    HolderSpan,
};
use crate::crf::{self, BioMode, CrfError, CrfModel, LabeledSequence, TrainConfig};
use crate::eval::{
    self, ablate, cross_validate, AblationRow, CrossValReport, EvalError, EvalReport,
    HolderPredictor, ReportFormat,
};
use crate::features::{
    featurize_document, AblationGroup, FeatureConfig, FeatureFamily, FeatureResources,
    FeatureVector,
};
use crate::lexicons::{
    LexiconError, PosReductionMap, SemanticFieldLexicon, SubjectivityLexicon,
};
use crate::patterns::{self, Pattern, PatternError};
use crate::subjectivity::label_document;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {reason}")]
    Config { reason: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Crf(#[from] CrfError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The three investigated approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    PatternsOnly,
    CrfNoPattern,
    CrfWithPattern,
}

impl Approach {
    pub fn as_str(self) -> &'static str {
        match self {
            Approach::PatternsOnly => "patterns-only",
            Approach::CrfNoPattern => "crf",
            Approach::CrfWithPattern => "crf+patterns",
        }
    }

    pub fn parse(s: &str) -> Option<Approach> {
        match s {
            "patterns-only" | "patterns" => Some(Approach::PatternsOnly),
            "crf" | "crf-no-pattern" => Some(Approach::CrfNoPattern),
            "crf+patterns" | "crf-with-pattern" | "integration" => Some(Approach::CrfWithPattern),
            _ => None,
        }
    }
}

/// Everything an experiment needs besides the corpus itself.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub approach: Approach,
    pub features: FeatureConfig,
    pub train: TrainConfig,
    pub folds: usize,
    pub seed: u64,
    pub min_pattern_frequency: usize,
    pub min_pattern_precision: f64,
    pub bio_mode: BioMode,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            approach: Approach::CrfWithPattern,
            features: FeatureConfig::default(),
            train: TrainConfig::default(),
            folds: 3,
            seed: 42,
            min_pattern_frequency: 5,
            min_pattern_precision: 0.8,
            bio_mode: BioMode::Repair,
            jobs: 1,
        }
    }
}

/// Loaded lexical resources and candidate patterns.
#[derive(Default)]
pub struct Resources {
    pub subjectivity: SubjectivityLexicon,
    pub semantic: SemanticFieldLexicon,
    pub pos_rules: PosReductionMap,
    pub patterns: Vec<Pattern>,
}

/// Resource file locations; every entry is optional and an absent lexicon
/// behaves as empty.
#[derive(Debug, Clone, Default)]
pub struct ResourcePaths {
    pub subjectivity: Option<PathBuf>,
    pub semantic: Option<PathBuf>,
    pub pos_rules: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
}

impl Resources {
    pub fn load(paths: &ResourcePaths) -> Result<Self, PipelineError> {
        Ok(Self {
            subjectivity: match &paths.subjectivity {
                Some(p) => SubjectivityLexicon::load(p)?,
                None => SubjectivityLexicon::new(),
            },
            semantic: match &paths.semantic {
                Some(p) => SemanticFieldLexicon::load(p)?,
                None => SemanticFieldLexicon::new(),
            },
            pos_rules: match &paths.pos_rules {
                Some(p) => PosReductionMap::load(p)?,
                None => PosReductionMap::new(),
            },
            patterns: match &paths.patterns {
                Some(p) => patterns::load_patterns(p)?,
                None => Vec::new(),
            },
        })
    }

    fn feature_resources(&self) -> FeatureResources<'_> {
        FeatureResources {
            semantic: &self.semantic,
            subjectivity: &self.subjectivity,
            pos_map: &self.pos_rules,
        }
    }
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub enum ExperimentReport {
    /// Whole-corpus pattern evaluation.
    Patterns(EvalReport),
    /// Per-fold cross-validation of a CRF approach.
    CrossValidated(CrossValReport),
}

impl ExperimentReport {
    pub fn render(&self, approach: Approach, format: ReportFormat) -> String {
        let body = match self {
            ExperimentReport::Patterns(report) => report.render(format),
            ExperimentReport::CrossValidated(report) => report.render(format),
        };
        match format {
            ReportFormat::Tsv => format!("approach\t{}\n{body}", approach.as_str()),
            ReportFormat::Table => format!("approach: {}\n{body}", approach.as_str()),
        }
    }

    /// Mean F for cross-validated runs, plain F for pattern runs.
    pub fn headline_f(&self) -> f64 {
        match self {
            ExperimentReport::Patterns(report) => report.f_measure,
            ExperimentReport::CrossValidated(report) => report.mean_f,
        }
    }
}

fn labeled_copy(doc: &Document, lex: &SubjectivityLexicon) -> Document {
    let mut doc = doc.clone();
    label_document(&mut doc, lex);
    doc
}

/// Patterns-only extraction over one document (subjectivity labeling plus
/// the retention rules), returning document-local spans.
fn pattern_predict(
    doc: &Document,
    patterns: &[Pattern],
    resources: &Resources,
) -> Result<Vec<HolderSpan>, PipelineError> {
    let labeled = labeled_copy(doc, &resources.subjectivity);
    Ok(patterns::extract_holders_by_pattern(
        &labeled,
        patterns,
        &resources.pos_rules,
    )?)
}

/// A trained CRF bundled with the per-fold retained patterns and feature
/// configuration it was trained under.
pub struct CrfPredictor<'a> {
    model: CrfModel,
    patterns: Vec<Pattern>,
    features: FeatureConfig,
    resources: &'a Resources,
    bio_mode: BioMode,
}

impl<'a> CrfPredictor<'a> {
    /// Rebuilds a predictor around a loaded model; `patterns` and `features`
    /// must match what the model was trained with for faithful decoding.
    pub fn from_parts(
        model: CrfModel,
        patterns: Vec<Pattern>,
        features: FeatureConfig,
        resources: &'a Resources,
        bio_mode: BioMode,
    ) -> Self {
        Self {
            model,
            patterns,
            features,
            resources,
            bio_mode,
        }
    }

    pub fn model(&self) -> &CrfModel {
        &self.model
    }

    pub fn retained_patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.features
    }

    /// Feature vectors exactly as decoding sees them (subjectivity labeled,
    /// pattern matches applied).
    pub fn featurize(&self, doc: &Document) -> Vec<Vec<FeatureVector>> {
        let labeled = labeled_copy(doc, &self.resources.subjectivity);
        let matches = patterns::match_document(&self.patterns, &labeled, &self.resources.pos_rules);
        featurize_document(
            &labeled,
            &matches,
            &self.resources.feature_resources(),
            &self.features,
        )
    }

    pub fn tag_document(&self, doc: &Document) -> Vec<Vec<crate::corpus::HolderLabel>> {
        self.featurize(doc)
            .iter()
            .map(|sentence| {
                if sentence.is_empty() {
                    Vec::new()
                } else {
                    self.model
                        .decode(sentence, self.bio_mode)
                        .expect("non-empty sentence decodes")
                }
            })
            .collect()
    }
}

impl HolderPredictor for CrfPredictor<'_> {
    fn predict(&self, doc: &Document) -> Vec<HolderSpan> {
        self.tag_document(doc)
            .iter()
            .enumerate()
            .flat_map(|(i, labels)| spans_from_label_seq(labels, i))
            .collect()
    }
}

/// Trains a CRF on `train_docs` with an already-decided pattern set (used
/// as-is for the PATTERN feature, no threshold validation).
pub fn train_crf<'a>(
    train_docs: &[Document],
    retained: Vec<Pattern>,
    resources: &'a Resources,
    features: &FeatureConfig,
    train_cfg: &TrainConfig,
    bio_mode: BioMode,
) -> Result<CrfPredictor<'a>, PipelineError> {
    let labeled: Vec<Document> = train_docs
        .iter()
        .map(|d| labeled_copy(d, &resources.subjectivity))
        .collect();
    let feature_resources = resources.feature_resources();
    let mut sequences = Vec::new();
    for doc in &labeled {
        let matches = patterns::match_document(&retained, doc, &resources.pos_rules);
        let featurized = featurize_document(doc, &matches, &feature_resources, features);
        for (sentence, vectors) in doc.sentences.iter().zip(featurized) {
            if sentence.is_empty() {
                continue;
            }
            sequences.push(LabeledSequence {
                features: vectors,
                labels: sentence.gold_labels(),
            });
        }
    }
    let model = crf::train(&sequences, train_cfg)?;
    Ok(CrfPredictor {
        model,
        patterns: retained,
        features: features.clone(),
        resources,
        bio_mode,
    })
}

/// Trains a CRF predictor on `train_docs`. With `with_patterns`, candidate
/// patterns are validated first: frequency over `unlabeled` when given,
/// otherwise over the training documents themselves; precision always over
/// the training documents, so nothing from a held-out fold leaks in.
pub fn fit_crf<'a>(
    train_docs: &[Document],
    unlabeled: Option<&[Document]>,
    resources: &'a Resources,
    features: &FeatureConfig,
    cfg: &PipelineConfig,
    with_patterns: bool,
) -> Result<CrfPredictor<'a>, PipelineError> {
    let retained = if with_patterns && !resources.patterns.is_empty() {
        let labeled: Vec<Document> = train_docs
            .iter()
            .map(|d| labeled_copy(d, &resources.subjectivity))
            .collect();
        let frequency_corpus = unlabeled.unwrap_or(&labeled);
        let (retained, _) = patterns::validate_patterns(
            &resources.patterns,
            frequency_corpus,
            &labeled,
            cfg.min_pattern_frequency,
            cfg.min_pattern_precision,
            &resources.pos_rules,
        );
        retained
    } else {
        Vec::new()
    };
    train_crf(
        train_docs,
        retained,
        resources,
        features,
        &cfg.train,
        cfg.bio_mode,
    )
}

/// Feature config a given approach actually trains with: the PATTERN family
/// is forced off for [`Approach::CrfNoPattern`] and on for
/// [`Approach::CrfWithPattern`].
pub fn approach_features(approach: Approach, base: &FeatureConfig) -> FeatureConfig {
    let mut cfg = base.clone();
    match approach {
        Approach::CrfNoPattern => {
            cfg.disable(FeatureFamily::Pattern);
        }
        Approach::CrfWithPattern => {
            cfg.enable(FeatureFamily::Pattern);
        }
        Approach::PatternsOnly => {}
    }
    cfg
}

fn check_invariants(cfg: &PipelineConfig, resources: &Resources, has_patterns_path: bool) -> Result<(), PipelineError> {
    let needs_patterns = matches!(
        cfg.approach,
        Approach::PatternsOnly | Approach::CrfWithPattern
    );
    if needs_patterns && !has_patterns_path {
        return Err(PipelineError::Config {
            reason: format!(
                "approach `{}` requires a pattern file",
                cfg.approach.as_str()
            ),
        });
    }
    let _ = resources;
    Ok(())
}

/// Runs one experiment over an annotated corpus. `unlabeled` optionally
/// supplies the larger corpus used for pattern frequency counting;
/// `has_patterns_path` records whether a pattern file was configured (the
/// file itself may legitimately contain zero patterns). With `models_out`,
/// CRF approaches save each fold's model as `fold<k>.crf` in that directory.
pub fn run_experiment(
    cfg: &PipelineConfig,
    docs: &[Document],
    unlabeled: Option<&[Document]>,
    resources: &Resources,
    has_patterns_path: bool,
    models_out: Option<&Path>,
) -> Result<ExperimentReport, PipelineError> {
    check_invariants(cfg, resources, has_patterns_path)?;
    match cfg.approach {
        Approach::PatternsOnly => {
            let mut per_doc = Vec::with_capacity(docs.len());
            for doc in docs {
                per_doc.push(pattern_predict(doc, &resources.patterns, resources)?);
            }
            let pred = globalize_spans(&per_doc, docs);
            let gold = corpus_gold_spans(docs);
            Ok(ExperimentReport::Patterns(eval::exact_match_prf(
                &gold, &pred,
            )))
        }
        Approach::CrfNoPattern | Approach::CrfWithPattern => {
            if let Some(dir) = models_out {
                fs::create_dir_all(dir)?;
            }
            let features = approach_features(cfg.approach, &cfg.features);
            let with_patterns = cfg.approach == Approach::CrfWithPattern;
            let report = cross_validate(
                docs,
                cfg.folds,
                cfg.seed,
                cfg.jobs,
                |fold: usize, train: &[Document]| {
                    let predictor =
                        fit_crf(train, unlabeled, resources, &features, cfg, with_patterns)
                            .map_err(boxed)?;
                    if let Some(dir) = models_out {
                        let path = dir.join(format!("fold{}.crf", fold + 1));
                        crf::io::save_model(predictor.model(), &path).map_err(boxed)?;
                    }
                    Ok(predictor)
                },
            )?;
            Ok(ExperimentReport::CrossValidated(report))
        }
    }
}

fn boxed<E: std::error::Error + Send + Sync + 'static>(
    e: E,
) -> Box<dyn std::error::Error + Send + Sync> {
    Box::new(e)
}

/// Feature-contribution table on one fixed fold: baseline plus one row per
/// disabled group; fold construction matches [`run_experiment`]'s
/// cross-validation for the same seed.
pub fn run_ablation(
    cfg: &PipelineConfig,
    docs: &[Document],
    unlabeled: Option<&[Document]>,
    resources: &Resources,
    fold_index: usize,
    groups: &[AblationGroup],
) -> Result<Vec<AblationRow>, PipelineError> {
    let base = approach_features(cfg.approach, &cfg.features);
    let with_patterns = cfg.approach == Approach::CrfWithPattern;
    Ok(ablate(
        docs,
        cfg.folds,
        cfg.seed,
        fold_index,
        groups,
        &base,
        cfg.jobs,
        |train: &[Document], feature_cfg: &FeatureConfig| {
            fit_crf(train, unlabeled, resources, feature_cfg, cfg, with_patterns)
                .map_err(|e| Box::new(e) as Box<dyn std::error::Error + Send + Sync>)
        },
    )?)
}

/// An experiment definition parsed from a `key = value` config file.
#[derive(Debug, Clone, Default)]
pub struct ExperimentSpec {
    pub corpus: Option<PathBuf>,
    pub unlabeled: Option<PathBuf>,
    pub resources: ResourcePaths,
    pub approach: Option<Approach>,
    pub window: Option<usize>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub sigma2: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub optimizer: Option<crf::OptimizerKind>,
    pub min_pattern_frequency: Option<usize>,
    pub min_pattern_precision: Option<f64>,
    pub disabled_families: Vec<FeatureFamily>,
    pub forbid_invalid_transitions: Option<bool>,
    pub jobs: Option<usize>,
}

impl ExperimentSpec {
    /// Parses a config file. Relative paths resolve against the file's
    /// directory; later keys override earlier ones.
    pub fn from_file(path: &Path) -> Result<ExperimentSpec, PipelineError> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut spec = ExperimentSpec::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PipelineError::Config {
                    reason: format!("line {}: expected `key = value`, got `{raw}`", idx + 1),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| PipelineError::Config {
                reason: format!("line {}: bad {what} `{value}`", idx + 1),
            };
            let path_of = |v: &str| -> PathBuf {
                let p = PathBuf::from(v);
                if p.is_absolute() {
                    p
                } else {
                    base.join(p)
                }
            };
            match key {
                "corpus" => spec.corpus = Some(path_of(value)),
                "unlabeled_corpus" => spec.unlabeled = Some(path_of(value)),
                "patterns" => spec.resources.patterns = Some(path_of(value)),
                "subjectivity_lexicon" => spec.resources.subjectivity = Some(path_of(value)),
                "semantic_lexicon" => spec.resources.semantic = Some(path_of(value)),
                "pos_rules" => spec.resources.pos_rules = Some(path_of(value)),
                "approach" => {
                    spec.approach = Some(Approach::parse(value).ok_or_else(|| bad("approach"))?)
                }
                "window" => spec.window = Some(value.parse().map_err(|_| bad("window"))?),
                "folds" => spec.folds = Some(value.parse().map_err(|_| bad("folds"))?),
                "seed" => spec.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "sigma2" => spec.sigma2 = Some(value.parse().map_err(|_| bad("sigma2"))?),
                "max_iters" => spec.max_iters = Some(value.parse().map_err(|_| bad("max_iters"))?),
                "tol" => spec.tol = Some(value.parse().map_err(|_| bad("tol"))?),
                "optimizer" => {
                    spec.optimizer =
                        Some(crf::OptimizerKind::parse(value).ok_or_else(|| bad("optimizer"))?)
                }
                "pattern_min_freq" => {
                    spec.min_pattern_frequency =
                        Some(value.parse().map_err(|_| bad("pattern_min_freq"))?)
                }
                "pattern_min_precision" => {
                    spec.min_pattern_precision =
                        Some(value.parse().map_err(|_| bad("pattern_min_precision"))?)
                }
                "disable" => {
                    for name in value.split(',').filter(|s| !s.trim().is_empty()) {
                        let family = FeatureFamily::parse(name.trim())
                            .ok_or_else(|| bad("feature family"))?;
                        spec.disabled_families.push(family);
                    }
                }
                "forbid_invalid_transitions" => {
                    spec.forbid_invalid_transitions =
                        Some(value.parse().map_err(|_| bad("boolean"))?)
                }
                "jobs" => spec.jobs = Some(value.parse().map_err(|_| bad("jobs"))?),
                other => {
                    return Err(PipelineError::Config {
                        reason: format!("line {}: unknown key `{other}`", idx + 1),
                    })
                }
            }
        }
        Ok(spec)
    }

    /// Materializes a [`PipelineConfig`] from the spec, leaving defaults
    /// where the file said nothing.
    pub fn to_config(&self) -> PipelineConfig {
        let mut cfg = PipelineConfig::default();
        if let Some(a) = self.approach {
            cfg.approach = a;
        }
        if let Some(w) = self.window {
            cfg.features.window_radius = w;
        }
        for family in &self.disabled_families {
            cfg.features.disable(*family);
        }
        if let Some(k) = self.folds {
            cfg.folds = k;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(v) = self.sigma2 {
            cfg.train.sigma2 = v;
        }
        if let Some(v) = self.max_iters {
            cfg.train.max_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.train.tol = v;
        }
        if let Some(v) = self.optimizer {
            cfg.train.optimizer = v;
        }
        if let Some(v) = self.min_pattern_frequency {
            cfg.min_pattern_frequency = v;
        }
        if let Some(v) = self.min_pattern_precision {
            cfg.min_pattern_precision = v;
        }
        if self.forbid_invalid_transitions.unwrap_or(false) {
            cfg.bio_mode = BioMode::ForbidInvalid;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        cfg
    }
}
