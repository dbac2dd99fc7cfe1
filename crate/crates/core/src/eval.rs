//! Exact-match scoring, per-holder-type recall, cross-validation, and the
//! feature-ablation experiment.
//!
//! A predicted span counts only when sentence and both boundaries equal a
//! gold span. Precision is true positives over retrieved spans, recall over
//! relevant spans, F the harmonic mean; ratios are stored in [0, 1] and
//! rendered as percentages with two decimals.

use std::collections::HashSet;
use std::error::Error;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::corpus::{
    corpus_gold_spans, globalize_spans, split_fold_indices, CorpusError, Document,
    HolderSpan,
};
use crate::features::{AblationGroup, FeatureConfig};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold spans are missing holder types")]
    MissingTypeLabels,
    #[error("unknown ablation group `{name}`")]
    UnknownGroup { name: String },
    #[error("fold index {index} out of range for {folds} folds")]
    BadFoldIndex { index: usize, folds: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("predictor construction failed: {0}")]
    Fit(#[source] Box<dyn Error + Send + Sync>),
}

/// Anything that turns a document into holder spans (document-local
/// sentence indices).
pub trait HolderPredictor {
    fn predict(&self, doc: &Document) -> Vec<HolderSpan>;
}

impl<F: Fn(&Document) -> Vec<HolderSpan>> HolderPredictor for F {
    fn predict(&self, doc: &Document) -> Vec<HolderSpan> {
        self(doc)
    }
}

/// Builder of a predictor from training documents; errors are surfaced
/// through [`EvalError::Fit`].
pub type FitResult<P> = Result<P, Box<dyn Error + Send + Sync>>;

/// Eq. 4 at any scale (ratios or percentages); 0 when both inputs are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub tp: usize,
    pub retrieved: usize,
    pub relevant: usize,
    /// Ratios in [0, 1].
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Set when the respective denominator was zero.
    pub undefined_precision: bool,
    pub undefined_recall: bool,
    pub per_type: Option<Vec<TypeRecallRow>>,
}

/// One row of the per-holder-type breakdown; the accumulative columns run
/// over the type prefix {1}, {1,2}, {1,2,3}.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeRecallRow {
    pub holder_type: u8,
    pub relevant: usize,
    /// True positives of this type (detected gold spans, not all predictions).
    pub detected: usize,
    pub recall: f64,
    /// Share of this type among relevant spans.
    pub relevant_share: f64,
    /// Cumulative detected over total detected.
    pub accumulative_detected_ratio: f64,
    /// Cumulative detected over cumulative relevant.
    pub accumulative_recall: f64,
}

fn dedup_keys(spans: &[HolderSpan]) -> HashSet<(usize, usize, usize)> {
    spans.iter().map(HolderSpan::key).collect()
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Exact-match precision/recall/F over span sets. Duplicates on either side
/// are deduplicated before counting.
pub fn exact_match_prf(gold: &[HolderSpan], pred: &[HolderSpan]) -> EvalReport {
    let gold_keys = dedup_keys(gold);
    let pred_keys = dedup_keys(pred);
    let tp = gold_keys.intersection(&pred_keys).count();
    let retrieved = pred_keys.len();
    let relevant = gold_keys.len();
    let precision = ratio(tp, retrieved);
    let recall = ratio(tp, relevant);
    EvalReport {
        tp,
        retrieved,
        relevant,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        undefined_precision: retrieved == 0,
        undefined_recall: relevant == 0,
        per_type: None,
    }
}

/// Recall broken down by holder type with accumulative columns. Every gold
/// span must carry a type.
pub fn per_type_recall(
    gold: &[HolderSpan],
    pred: &[HolderSpan],
) -> Result<Vec<TypeRecallRow>, EvalError> {
    if gold.iter().any(|s| s.holder_type.is_none()) {
        return Err(EvalError::MissingTypeLabels);
    }
    let pred_keys = dedup_keys(pred);
    let mut relevant = [0usize; 3];
    let mut detected = [0usize; 3];
    let mut seen = HashSet::new();
    for span in gold {
        if !seen.insert(span.key()) {
            continue;
        }
        let slot = span.holder_type.expect("checked above") as usize - 1;
        relevant[slot] += 1;
        if pred_keys.contains(&span.key()) {
            detected[slot] += 1;
        }
    }
    let total_relevant: usize = relevant.iter().sum();
    let total_detected: usize = detected.iter().sum();
    let mut rows = Vec::with_capacity(3);
    let mut cum_relevant = 0;
    let mut cum_detected = 0;
    for t in 0..3 {
        cum_relevant += relevant[t];
        cum_detected += detected[t];
        rows.push(TypeRecallRow {
            holder_type: t as u8 + 1,
            relevant: relevant[t],
            detected: detected[t],
            recall: ratio(detected[t], relevant[t]),
            relevant_share: ratio(relevant[t], total_relevant),
            accumulative_detected_ratio: ratio(cum_detected, total_detected),
            accumulative_recall: ratio(cum_detected, cum_relevant),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct CrossValReport {
    pub folds: Vec<EvalReport>,
    /// Unweighted mean of per-fold F ratios.
    pub mean_f: f64,
}

/// Index-parallel map with deterministic result order. `jobs = 1` runs
/// inline and is the determinism reference; outputs are merged by index, so
/// higher job counts produce identical results for pure `f`.
fn run_indexed<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if jobs <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let out = f(i);
                results.lock().expect("poisoned")[i] = Some(out);
            });
        }
    });
    results
        .into_inner()
        .expect("poisoned")
        .into_iter()
        .map(|slot| slot.expect("every index filled"))
        .collect()
}

/// k-fold cross-validation: trains a predictor on k-1 folds via
/// `fit(fold_index, train_docs)` and scores exact-match spans on the
/// held-out fold.
pub fn cross_validate<P, F>(
    docs: &[Document],
    k: usize,
    seed: u64,
    jobs: usize,
    fit: F,
) -> Result<CrossValReport, EvalError>
where
    P: HolderPredictor,
    F: Fn(usize, &[Document]) -> FitResult<P> + Sync,
{
    let folds = split_fold_indices(docs.len(), k, seed)?;
    let outcomes = run_indexed(k, jobs, |fold| {
        evaluate_fold(docs, &folds, fold, &|train: &[Document]| fit(fold, train))
    });
    let mut reports = Vec::with_capacity(k);
    for outcome in outcomes {
        reports.push(outcome?);
    }
    let mean_f = reports.iter().map(|r| r.f_measure).sum::<f64>() / reports.len() as f64;
    Ok(CrossValReport {
        folds: reports,
        mean_f,
    })
}

fn evaluate_fold<P, F>(
    docs: &[Document],
    folds: &[Vec<usize>],
    fold: usize,
    fit: &F,
) -> Result<EvalReport, EvalError>
where
    P: HolderPredictor,
    F: Fn(&[Document]) -> FitResult<P>,
{
    let test_idx = &folds[fold];
    let train_docs: Vec<Document> = folds
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != fold)
        .flat_map(|(_, idxs)| idxs.iter().map(|&d| docs[d].clone()))
        .collect();
    let test_docs: Vec<Document> = test_idx.iter().map(|&d| docs[d].clone()).collect();
    let predictor = fit(&train_docs).map_err(EvalError::Fit)?;
    let per_doc: Vec<Vec<HolderSpan>> = test_docs.iter().map(|d| predictor.predict(d)).collect();
    let pred = globalize_spans(&per_doc, &test_docs);
    let gold = corpus_gold_spans(&test_docs);
    Ok(exact_match_prf(&gold, &pred))
}

/// One ablation row: the disabled group (`None` = baseline) and its report.
#[derive(Debug, Clone)]
pub struct AblationRow {
    pub disabled: Option<AblationGroup>,
    pub report: EvalReport,
}

/// Retrains with one feature group disabled at a time on a fixed fold.
/// Row 0 is the all-features baseline; fold construction matches
/// [`cross_validate`] for the same k and seed, so the baseline row equals
/// that fold's cross-validation report.
#[allow(clippy::too_many_arguments)]
pub fn ablate<P, F>(
    docs: &[Document],
    k: usize,
    seed: u64,
    fold_index: usize,
    groups: &[AblationGroup],
    base_cfg: &FeatureConfig,
    jobs: usize,
    fit: F,
) -> Result<Vec<AblationRow>, EvalError>
where
    P: HolderPredictor,
    F: Fn(&[Document], &FeatureConfig) -> FitResult<P> + Sync,
{
    let folds = split_fold_indices(docs.len(), k, seed)?;
    if fold_index >= folds.len() {
        return Err(EvalError::BadFoldIndex {
            index: fold_index,
            folds: folds.len(),
        });
    }
    let configs: Vec<(Option<AblationGroup>, FeatureConfig)> = std::iter::once((None, base_cfg.clone()))
        .chain(groups.iter().map(|&g| {
            let mut cfg = base_cfg.clone();
            g.apply(&mut cfg);
            (Some(g), cfg)
        }))
        .collect();
    let outcomes = run_indexed(configs.len(), jobs, |row| {
        let (disabled, cfg) = &configs[row];
        let report = evaluate_fold(docs, &folds, fold_index, &|train: &[Document]| {
            fit(train, cfg)
        })?;
        Ok::<AblationRow, EvalError>(AblationRow {
            disabled: *disabled,
            report,
        })
    });
    outcomes.into_iter().collect()
}

/// Parses ablation group names, rejecting unknown ones.
pub fn parse_groups(names: &[String]) -> Result<Vec<AblationGroup>, EvalError> {
    names
        .iter()
        .map(|name| {
            AblationGroup::parse(name).ok_or_else(|| EvalError::UnknownGroup { name: name.clone() })
        })
        .collect()
}

/// Output format for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Tsv,
    #[default]
    Table,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s {
            "tsv" => Some(ReportFormat::Tsv),
            "table" => Some(ReportFormat::Table),
            _ => None,
        }
    }
}

fn pct(ratio: f64) -> String {
    format!("{:.2}", ratio * 100.0)
}

impl EvalReport {
    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Tsv => {
                out.push_str("tp\tretrieved\trelevant\tprecision\trecall\tf_measure\n");
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    self.tp,
                    self.retrieved,
                    self.relevant,
                    pct(self.precision),
                    pct(self.recall),
                    pct(self.f_measure)
                );
                if let Some(rows) = &self.per_type {
                    out.push_str(
                        "type\trelevant\tshare\tdetected\trecall\taccum_detected\taccum_recall\n",
                    );
                    for r in rows {
                        let _ = writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            r.holder_type,
                            r.relevant,
                            pct(r.relevant_share),
                            r.detected,
                            pct(r.recall),
                            pct(r.accumulative_detected_ratio),
                            pct(r.accumulative_recall)
                        );
                    }
                }
            }
            ReportFormat::Table => {
                let _ = writeln!(
                    out,
                    "Precision {:>7}  Recall {:>7}  F-measure {:>7}",
                    pct(self.precision),
                    pct(self.recall),
                    pct(self.f_measure)
                );
                let _ = writeln!(
                    out,
                    "TP {}  retrieved {}  relevant {}",
                    self.tp, self.retrieved, self.relevant
                );
                if self.undefined_precision || self.undefined_recall {
                    let _ = writeln!(out, "(empty denominator reported as 0)");
                }
                if let Some(rows) = &self.per_type {
                    let _ = writeln!(
                        out,
                        "{:<6} {:>9} {:>7} {:>9} {:>7} {:>14} {:>13}",
                        "type", "relevant", "share", "detected", "recall", "accum_detected", "accum_recall"
                    );
                    for r in rows {
                        let _ = writeln!(
                            out,
                            "{:<6} {:>9} {:>7} {:>9} {:>7} {:>14} {:>13}",
                            r.holder_type,
                            r.relevant,
                            pct(r.relevant_share),
                            r.detected,
                            pct(r.recall),
                            pct(r.accumulative_detected_ratio),
                            pct(r.accumulative_recall)
                        );
                    }
                }
            }
        }
        out
    }
}

impl CrossValReport {
    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Tsv => {
                out.push_str("fold\ttp\tretrieved\trelevant\tprecision\trecall\tf_measure\n");
                for (i, r) in self.folds.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        i + 1,
                        r.tp,
                        r.retrieved,
                        r.relevant,
                        pct(r.precision),
                        pct(r.recall),
                        pct(r.f_measure)
                    );
                }
                let _ = writeln!(out, "mean\t-\t-\t-\t-\t-\t{}", pct(self.mean_f));
            }
            ReportFormat::Table => {
                let _ = writeln!(
                    out,
                    "{:<6} {:>9} {:>7} {:>9}",
                    "fold", "precision", "recall", "f_measure"
                );
                for (i, r) in self.folds.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{:<6} {:>9} {:>7} {:>9}",
                        i + 1,
                        pct(r.precision),
                        pct(r.recall),
                        pct(r.f_measure)
                    );
                }
                let _ = writeln!(out, "mean F {}", pct(self.mean_f));
            }
        }
        out
    }
}

/// Renders ablation rows, baseline first.
pub fn render_ablation(rows: &[AblationRow], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str("disabled\tprecision\trecall\tf_measure\n");
            for row in rows {
                let name = row.disabled.map_or("None", |g| g.as_str());
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    name,
                    pct(row.report.precision),
                    pct(row.report.recall),
                    pct(row.report.f_measure)
                );
            }
        }
        ReportFormat::Table => {
            let _ = writeln!(out, "{:<26} {:>9}", "disabled feature", "f_measure");
            for row in rows {
                let name = row.disabled.map_or("None", |g| g.as_str());
                let _ = writeln!(out, "{:<26} {:>9}", name, pct(row.report.f_measure));
            }
        }
    }
    out
}
