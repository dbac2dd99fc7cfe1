//! Command-line front end. Every pipeline stage is exposed as a subcommand
//! so experiments can be scripted and intermediate artifacts inspected.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error.
//! Diagnostics go to stderr; primary output goes to stdout or `--out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    self,
    io::{
        read_annotator_corpus, read_corpus, read_span_file, resolve_spans, write_corpus,
        write_span_file, ColumnSchema, SpanRecord,
    },
    corpus_gold_spans, document_gold_spans, Document,
};
use crate::crf::{self, BioMode, OptimizerKind, TrainConfig};
use crate::eval::{self, per_type_recall, render_ablation, ReportFormat};
use crate::features::{
    featurize_corpus, write_feature_dump, FeatureConfig, FeatureFamily, NeClass,
};
use crate::lexicons::SubjectivityLexicon;
use crate::patterns::{self, match_document};
use crate::pipeline::{
    self, run_ablation, run_experiment, Approach, CrfPredictor, ExperimentSpec, PipelineConfig,
    PipelineError, ResourcePaths, Resources,
};
use crate::subjectivity::label_corpus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Opinion holder extraction experiments: patterns, CRF, and their combination.
#[derive(Parser)]
#[command(name = "holdercrf", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a column corpus file and print a summary
    ValidateCorpus(ValidateArgs),
    /// Majority-vote three annotator columns into a gold corpus
    MergeAnnotations(MergeArgs),
    /// Classify sentence subjectivity with the high-precision rules
    LabelSubjectivity(LabelArgs),
    /// Validate candidate patterns by frequency and precision
    MinePatterns(MineArgs),
    /// List raw pattern matches over a corpus
    MatchPatterns(MatchArgs),
    /// Dump feature vectors, one token per line
    Featurize(FeaturizeArgs),
    /// Train a CRF tagger and save the model
    Train(TrainArgs),
    /// Tag a corpus with a trained model
    Tag(TagArgs),
    /// Score predicted holders against gold (exact match)
    Evaluate(EvaluateArgs),
    /// k-fold cross-validation of a CRF approach
    CrossValidate(CrossValidateArgs),
    /// Retrain with feature groups disabled one at a time
    Ablate(AblateArgs),
    /// Run a full experiment from a config file
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write primary output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, default_value = "table", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Args)]
struct ResourceArgs {
    /// Subjectivity lexicon TSV (lemma, strength, polarity)
    #[arg(long)]
    subj_lexicon: Option<PathBuf>,
    /// Semantic field lexicon TSV (lemma, field)
    #[arg(long)]
    sem_lexicon: Option<PathBuf>,
    /// POS reduction rule TSV (matcher, reduced tag), first match wins
    #[arg(long)]
    pos_rules: Option<PathBuf>,
    /// Pattern file (DSL, one pattern per line)
    #[arg(long)]
    patterns: Option<PathBuf>,
}

impl ResourceArgs {
    fn paths(&self) -> ResourcePaths {
        ResourcePaths {
            subjectivity: self.subj_lexicon.clone(),
            semantic: self.sem_lexicon.clone(),
            pos_rules: self.pos_rules.clone(),
            patterns: self.patterns.clone(),
        }
    }

    fn load(&self) -> Result<Resources, PipelineError> {
        Resources::load(&self.paths())
    }
}

#[derive(Args)]
struct FeatureArgs {
    /// Window radius n (offsets -n..+n)
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Feature families to disable
    #[arg(long, value_delimiter = ',', value_parser = parse_family)]
    disable: Vec<FeatureFamily>,
    /// Single NE classes to drop from the NE family
    #[arg(long, value_delimiter = ',', value_parser = parse_ne_class)]
    disable_ne: Vec<NeClass>,
}

impl FeatureArgs {
    fn to_config(&self) -> FeatureConfig {
        let mut cfg = FeatureConfig {
            window_radius: self.window,
            ..FeatureConfig::default()
        };
        for family in &self.disable {
            cfg.disable(*family);
        }
        for class in &self.disable_ne {
            cfg.disabled_ne_classes.insert(*class);
        }
        cfg
    }
}

#[derive(Args)]
struct TrainFlagArgs {
    /// L2 regularizer sigma^2 (inf disables)
    #[arg(long, default_value_t = 10.0)]
    sigma2: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value = "lbfgs", value_parser = parse_optimizer)]
    optimizer: OptimizerKind,
    /// Decode with Non->I and START->I transitions pinned to -inf instead of
    /// repairing orphan I labels afterwards
    #[arg(long)]
    forbid_invalid_transitions: bool,
}

impl TrainFlagArgs {
    fn to_config(&self) -> TrainConfig {
        TrainConfig {
            sigma2: self.sigma2,
            max_iters: self.max_iters,
            tol: self.tol,
            optimizer: self.optimizer,
        }
    }

    fn bio_mode(&self) -> BioMode {
        if self.forbid_invalid_transitions {
            BioMode::ForbidInvalid
        } else {
            BioMode::Repair
        }
    }
}

#[derive(Args)]
struct PatternThresholdArgs {
    /// Minimum match count over the frequency corpus (inclusive)
    #[arg(long, default_value_t = 5)]
    pattern_min_freq: usize,
    /// Minimum extraction precision (inclusive)
    #[arg(long, default_value_t = 0.8)]
    pattern_min_precision: f64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Column layout: `gold` (6 columns) or `annotators` (8 columns)
    #[arg(long, default_value = "gold", value_parser = parse_schema)]
    schema: ColumnSchema,
}

#[derive(Args)]
struct MergeArgs {
    /// Annotation-variant corpus (three gold columns)
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the merged spans as a TSV span file
    #[arg(long)]
    spans_out: Option<PathBuf>,
}

#[derive(Args)]
struct LabelArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    subj_lexicon: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    /// Candidate pattern file
    #[arg(long)]
    candidates: PathBuf,
    /// Corpus for frequency counting
    #[arg(long)]
    unlabeled: PathBuf,
    /// Gold-annotated corpus for precision
    #[arg(long)]
    annotated: PathBuf,
    #[arg(long)]
    pos_rules: Option<PathBuf>,
    #[command(flatten)]
    thresholds: PatternThresholdArgs,
    /// Write retained patterns (DSL) here
    #[arg(long)]
    retained_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    patterns: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    pos_rules: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Gold-annotated training corpus
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    train: TrainFlagArgs,
    /// Where to save the model
    #[arg(long)]
    model_out: PathBuf,
}

#[derive(Args)]
struct TagArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    /// BIO handling of the decoded path
    #[arg(long, default_value = "repair", value_parser = parse_bio)]
    bio: BioMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Gold corpus (column format)
    #[arg(long)]
    gold: PathBuf,
    /// Predicted corpus (column format, same shape)
    #[arg(long)]
    pred: PathBuf,
    /// Span file assigning holder types to gold spans; enables the per-type
    /// recall breakdown
    #[arg(long)]
    types: Option<PathBuf>,
    /// Write a per-sentence error listing (false positives and negatives)
    /// to this TSV file
    #[arg(long)]
    errors_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CrossValidateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// `crf` or `crf+patterns`
    #[arg(long, default_value = "crf", value_parser = parse_approach)]
    approach: Approach,
    /// Larger corpus for pattern frequency counting
    #[arg(long)]
    unlabeled: Option<PathBuf>,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    train: TrainFlagArgs,
    #[command(flatten)]
    thresholds: PatternThresholdArgs,
    #[arg(long, default_value_t = 3)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Parallel fold training (1 = sequential reference)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "crf+patterns", value_parser = parse_approach)]
    approach: Approach,
    #[arg(long)]
    unlabeled: Option<PathBuf>,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    train: TrainFlagArgs,
    #[command(flatten)]
    thresholds: PatternThresholdArgs,
    #[arg(long, default_value_t = 3)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Which fold (1-based) to evaluate on
    #[arg(long, default_value_t = 3)]
    fold: usize,
    /// Feature groups to disable one at a time (default: all seven)
    #[arg(long, value_delimiter = ',', value_parser = parse_group)]
    groups: Vec<crate::features::AblationGroup>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Override the config file's approach
    #[arg(long, value_parser = parse_approach)]
    approach: Option<Approach>,
    /// Override the annotated corpus path
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Save per-fold models as fold<k>.crf in this directory
    #[arg(long)]
    models_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    ReportFormat::parse(s).ok_or_else(|| format!("`{s}` (expected tsv or table)"))
}

fn parse_schema(s: &str) -> Result<ColumnSchema, String> {
    match s {
        "gold" => Ok(ColumnSchema::Gold),
        "annotators" => Ok(ColumnSchema::Annotators),
        _ => Err(format!("`{s}` (expected gold or annotators)")),
    }
}

fn parse_family(s: &str) -> Result<FeatureFamily, String> {
    FeatureFamily::parse(s).ok_or_else(|| format!("unknown feature family `{s}`"))
}

fn parse_ne_class(s: &str) -> Result<NeClass, String> {
    NeClass::ALL
        .iter()
        .copied()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| format!("unknown NE class `{s}`"))
}

fn parse_optimizer(s: &str) -> Result<OptimizerKind, String> {
    OptimizerKind::parse(s).ok_or_else(|| format!("`{s}` (expected lbfgs or gd)"))
}

fn parse_bio(s: &str) -> Result<BioMode, String> {
    match s {
        "repair" => Ok(BioMode::Repair),
        "forbid" => Ok(BioMode::ForbidInvalid),
        "raw" => Ok(BioMode::Raw),
        _ => Err(format!("`{s}` (expected repair, forbid, or raw)")),
    }
}

fn parse_approach(s: &str) -> Result<Approach, String> {
    Approach::parse(s).ok_or_else(|| format!("`{s}` (expected patterns-only, crf, or crf+patterns)"))
}

fn parse_group(s: &str) -> Result<crate::features::AblationGroup, String> {
    crate::features::AblationGroup::parse(s).ok_or_else(|| format!("unknown ablation group `{s}`"))
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Lexicon(#[from] crate::lexicons::LexiconError),
    #[error(transparent)]
    Pattern(#[from] crate::patterns::PatternError),
    #[error(transparent)]
    Crf(#[from] crf::CrfError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Data(String),
}

/// Parses `argv` and runs the selected command, returning the process exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_DATA
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::ValidateCorpus(args) => cmd_validate(args),
        Command::MergeAnnotations(args) => cmd_merge(args),
        Command::LabelSubjectivity(args) => cmd_label(args),
        Command::MinePatterns(args) => cmd_mine(args),
        Command::MatchPatterns(args) => cmd_match(args),
        Command::Featurize(args) => cmd_featurize(args),
        Command::Train(args) => cmd_train(args),
        Command::Tag(args) => cmd_tag(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::CrossValidate(args) => cmd_cross_validate(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn load_gold(path: &Path) -> Result<Vec<Document>, CliError> {
    Ok(read_corpus(path, ColumnSchema::Gold)?)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let docs = read_corpus(&args.corpus, args.schema)?;
    let sentences: usize = docs.iter().map(|d| d.sentences.len()).sum();
    let tokens: usize = docs
        .iter()
        .flat_map(|d| d.sentences.iter().map(|s| s.len()))
        .sum();
    let holders: usize = docs.iter().map(|d| document_gold_spans(d).len()).sum();
    println!(
        "ok: {} documents, {sentences} sentences, {tokens} tokens, {holders} gold holders",
        docs.len()
    );
    Ok(())
}

fn cmd_merge(args: MergeArgs) -> Result<(), CliError> {
    let annotated = read_annotator_corpus(&args.corpus)?;
    let docs: Vec<Document> = annotated.iter().map(|a| a.document.clone()).collect();
    let mut buf = Vec::new();
    write_corpus(&docs, &mut buf)?;
    write_output(&args.out, std::str::from_utf8(&buf).expect("utf8 output"))?;
    if let Some(spans_path) = &args.spans_out {
        let mut records = Vec::new();
        for doc in &docs {
            for span in document_gold_spans(doc) {
                records.push(SpanRecord {
                    doc_id: doc.id.clone(),
                    span,
                });
            }
        }
        let mut buf = Vec::new();
        write_span_file(&records, &mut buf)?;
        fs::write(spans_path, buf)?;
    }
    eprintln!("merged {} documents", docs.len());
    Ok(())
}

fn cmd_label(args: LabelArgs) -> Result<(), CliError> {
    let mut docs = load_gold(&args.corpus)?;
    let lex = SubjectivityLexicon::load(&args.subj_lexicon)?;
    label_corpus(&mut docs, &lex);
    let mut out = String::from("doc_id\tsentence\tsubjectivity\n");
    for doc in &docs {
        for (i, sentence) in doc.sentences.iter().enumerate() {
            let label = sentence.subjectivity.expect("labeled above");
            let _ = writeln!(out, "{}\t{}\t{}", doc.id, i, label.as_str());
        }
    }
    write_output(&args.out, &out)
}

fn cmd_mine(args: MineArgs) -> Result<(), CliError> {
    let candidates = patterns::load_patterns(&args.candidates)?;
    let unlabeled = load_gold(&args.unlabeled)?;
    let annotated = load_gold(&args.annotated)?;
    let pos_rules = match &args.pos_rules {
        Some(p) => crate::lexicons::PosReductionMap::load(p)?,
        None => crate::lexicons::PosReductionMap::new(),
    };
    let (retained, stats) = patterns::validate_patterns(
        &candidates,
        &unlabeled,
        &annotated,
        args.thresholds.pattern_min_freq,
        args.thresholds.pattern_min_precision,
        &pos_rules,
    );
    let mut out = String::from("pattern_id\tfrequency\tretrieved\ttrue_positives\tprecision\tretained\n");
    for s in &stats {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.4}\t{}",
            s.pattern_id, s.frequency, s.retrieved, s.true_positives, s.precision, s.retained
        );
    }
    write_output(&args.out, &out)?;
    if let Some(path) = &args.retained_out {
        let mut text = String::new();
        for p in &retained {
            let _ = writeln!(text, "{}", p.to_dsl());
        }
        fs::write(path, text)?;
    }
    eprintln!("retained {}/{} patterns", retained.len(), candidates.len());
    Ok(())
}

fn cmd_match(args: MatchArgs) -> Result<(), CliError> {
    let pats = patterns::load_patterns(&args.patterns)?;
    let docs = load_gold(&args.corpus)?;
    let pos_rules = match &args.pos_rules {
        Some(p) => crate::lexicons::PosReductionMap::load(p)?,
        None => crate::lexicons::PosReductionMap::new(),
    };
    let mut out =
        String::from("doc_id\tsentence\tpattern_id\tstart\tend\tholder_start\tholder_end\n");
    for doc in &docs {
        for m in match_document(&pats, doc, &pos_rules) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                doc.id, m.sentence_index, m.pattern_id, m.start, m.end, m.holder.start, m.holder.end
            );
        }
    }
    write_output(&args.out, &out)
}

fn cmd_featurize(args: FeaturizeArgs) -> Result<(), CliError> {
    let mut docs = load_gold(&args.corpus)?;
    let resources = args.resources.load()?;
    label_corpus(&mut docs, &resources.subjectivity);
    let cfg = args.features.to_config();
    let matches_per_doc: Vec<_> = docs
        .iter()
        .map(|d| match_document(&resources.patterns, d, &resources.pos_rules))
        .collect();
    let feature_resources = crate::features::FeatureResources {
        semantic: &resources.semantic,
        subjectivity: &resources.subjectivity,
        pos_map: &resources.pos_rules,
    };
    let featurized = featurize_corpus(&docs, &matches_per_doc, &feature_resources, &cfg);
    let mut buf = Vec::new();
    write_feature_dump(&docs, &featurized, &mut buf)?;
    write_output(&args.out, std::str::from_utf8(&buf).expect("utf8 output"))
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let docs = load_gold(&args.corpus)?;
    let resources = args.resources.load()?;
    let features = args.features.to_config();
    let predictor = pipeline::train_crf(
        &docs,
        resources.patterns.clone(),
        &resources,
        &features,
        &args.train.to_config(),
        args.train.bio_mode(),
    )?;
    crf::io::save_model(predictor.model(), &args.model_out)?;
    eprintln!(
        "trained: {} feature strings, {} parameters, {} iterations, objective {:.6}",
        predictor.model().index().num_feature_strings(),
        predictor.model().weights().len(),
        predictor.model().meta().iterations,
        predictor.model().meta().objective
    );
    Ok(())
}

fn cmd_tag(args: TagArgs) -> Result<(), CliError> {
    let docs = load_gold(&args.corpus)?;
    let resources = args.resources.load()?;
    let model = crf::io::load_model(&args.model)?;
    let predictor = CrfPredictor::from_parts(
        model,
        resources.patterns.clone(),
        args.features.to_config(),
        &resources,
        args.bio,
    );
    let tagged: Vec<Document> = docs
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
    let mut buf = Vec::new();
    write_corpus(&tagged, &mut buf)?;
    write_output(&args.out, std::str::from_utf8(&buf).expect("utf8 output"))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let gold_docs = load_gold(&args.gold)?;
    let pred_docs = load_gold(&args.pred)?;
    if gold_docs.len() != pred_docs.len() {
        return Err(CliError::Data(format!(
            "gold has {} documents, pred has {}",
            gold_docs.len(),
            pred_docs.len()
        )));
    }
    for (g, p) in gold_docs.iter().zip(&pred_docs) {
        let same_shape = g.id == p.id
            && g.sentences.len() == p.sentences.len()
            && g.sentences
                .iter()
                .zip(&p.sentences)
                .all(|(a, b)| a.len() == b.len());
        if !same_shape {
            return Err(CliError::Data(format!(
                "document `{}` differs in shape between gold and pred",
                g.id
            )));
        }
    }
    let gold = corpus_gold_spans(&gold_docs);
    let pred = corpus_gold_spans(&pred_docs);
    let mut report = eval::exact_match_prf(&gold, &pred);
    if let Some(types_path) = &args.types {
        let records = read_span_file(types_path)?;
        let typed_gold = resolve_spans(&records, &gold_docs)?;
        report.per_type = Some(per_type_recall(&typed_gold, &pred)?);
    }
    if let Some(errors_path) = &args.errors_out {
        fs::write(errors_path, error_listing(&gold_docs, &gold, &pred))?;
    }
    write_output(&args.output.out, &report.render(args.output.format))
}

/// FP/FN spans with document-local coordinates, sorted by position.
fn error_listing(docs: &[Document], gold: &[corpus::HolderSpan], pred: &[corpus::HolderSpan]) -> String {
    let gold_keys: std::collections::HashSet<_> = gold.iter().map(|s| s.key()).collect();
    let pred_keys: std::collections::HashSet<_> = pred.iter().map(|s| s.key()).collect();
    // Map a global sentence ordinal back to (doc id, local index).
    let mut bounds = Vec::new();
    let mut offset = 0;
    for doc in docs {
        bounds.push((offset, doc));
        offset += doc.sentences.len();
    }
    let localize = |global: usize| -> (&str, usize) {
        let (start, doc) = bounds
            .iter()
            .rev()
            .find(|(start, _)| *start <= global)
            .expect("span belongs to a document");
        (doc.id.as_str(), global - start)
    };
    let mut rows: Vec<(String, &'static str)> = Vec::new();
    for span in pred.iter().filter(|s| !gold_keys.contains(&s.key())) {
        let (doc_id, sentence) = localize(span.sentence_index);
        rows.push((
            format!("{doc_id}\t{sentence}\t{}\t{}", span.start, span.end),
            "false_positive",
        ));
    }
    for span in gold.iter().filter(|s| !pred_keys.contains(&s.key())) {
        let (doc_id, sentence) = localize(span.sentence_index);
        rows.push((
            format!("{doc_id}\t{sentence}\t{}\t{}", span.start, span.end),
            "false_negative",
        ));
    }
    rows.sort();
    let mut out = String::from("doc_id\tsentence\tstart\tend\tkind\n");
    for (prefix, kind) in rows {
        let _ = writeln!(out, "{prefix}\t{kind}");
    }
    out
}

fn cmd_cross_validate(args: CrossValidateArgs) -> Result<(), CliError> {
    if args.approach == Approach::PatternsOnly {
        return Err(CliError::Data(
            "cross-validate applies to CRF approaches; use `experiment` for patterns-only".into(),
        ));
    }
    let docs = load_gold(&args.corpus)?;
    let unlabeled = args.unlabeled.as_deref().map(load_gold).transpose()?;
    let resources = args.resources.load()?;
    let cfg = PipelineConfig {
        approach: args.approach,
        features: args.features.to_config(),
        train: args.train.to_config(),
        folds: args.folds,
        seed: args.seed,
        min_pattern_frequency: args.thresholds.pattern_min_freq,
        min_pattern_precision: args.thresholds.pattern_min_precision,
        bio_mode: args.train.bio_mode(),
        jobs: args.jobs,
    };
    let report = run_experiment(
        &cfg,
        &docs,
        unlabeled.as_deref(),
        &resources,
        args.resources.patterns.is_some(),
        None,
    )?;
    write_output(
        &args.output.out,
        &report.render(cfg.approach, args.output.format),
    )
}

fn cmd_ablate(args: AblateArgs) -> Result<(), CliError> {
    let docs = load_gold(&args.corpus)?;
    let unlabeled = args.unlabeled.as_deref().map(load_gold).transpose()?;
    let resources = args.resources.load()?;
    if args.fold == 0 {
        return Err(CliError::Data("--fold is 1-based".into()));
    }
    let groups = if args.groups.is_empty() {
        crate::features::AblationGroup::ALL.to_vec()
    } else {
        args.groups.clone()
    };
    let cfg = PipelineConfig {
        approach: args.approach,
        features: args.features.to_config(),
        train: args.train.to_config(),
        folds: args.folds,
        seed: args.seed,
        min_pattern_frequency: args.thresholds.pattern_min_freq,
        min_pattern_precision: args.thresholds.pattern_min_precision,
        bio_mode: args.train.bio_mode(),
        jobs: args.jobs,
    };
    let rows = run_ablation(
        &cfg,
        &docs,
        unlabeled.as_deref(),
        &resources,
        args.fold - 1,
        &groups,
    )?;
    write_output(&args.output.out, &render_ablation(&rows, args.output.format))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let mut spec = ExperimentSpec::from_file(&args.config)?;
    if let Some(approach) = args.approach {
        spec.approach = Some(approach);
    }
    if let Some(corpus) = &args.corpus {
        spec.corpus = Some(corpus.clone());
    }
    if let Some(seed) = args.seed {
        spec.seed = Some(seed);
    }
    if let Some(folds) = args.folds {
        spec.folds = Some(folds);
    }
    if let Some(jobs) = args.jobs {
        spec.jobs = Some(jobs);
    }
    let cfg = spec.to_config();
    let corpus_path = spec.corpus.as_ref().ok_or_else(|| {
        CliError::Data("experiment config does not name a corpus (key `corpus`)".into())
    })?;
    let docs = load_gold(corpus_path)?;
    let unlabeled = spec.unlabeled.as_deref().map(load_gold).transpose()?;
    let resources = Resources::load(&spec.resources)?;
    eprintln!(
        "experiment: approach={} corpus={} documents={} folds={} seed={}",
        cfg.approach.as_str(),
        corpus_path.display(),
        docs.len(),
        cfg.folds,
        cfg.seed
    );
    let report = run_experiment(
        &cfg,
        &docs,
        unlabeled.as_deref(),
        &resources,
        spec.resources.patterns.is_some(),
        args.models_out.as_deref(),
    )?;
    write_output(
        &args.output.out,
        &report.render(cfg.approach, args.output.format),
    )
}
