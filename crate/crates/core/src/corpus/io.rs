//! Column corpus reader/writer and the span record file.
//!
//! Corpus format: one token per line, tab-separated, fixed column order
//! `surface lemma pos_fine bpc ne gold`, a blank line between sentences and a
//! `#doc <id>` header line starting each document. The annotation variant
//! replaces the single gold column with three columns `gold1 gold2 gold3`,
//! one per annotator.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{
    labels_from_spans, merge_annotations, spans_from_labels, CorpusError, Document, HolderLabel,
    HolderSpan, Sentence, Token,
};

/// Which column layout a file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSchema {
    /// Six columns, single gold label.
    Gold,
    /// Eight columns, three annotator label columns.
    Annotators,
}

impl ColumnSchema {
    pub fn column_count(self) -> usize {
        match self {
            ColumnSchema::Gold => 6,
            ColumnSchema::Annotators => 8,
        }
    }
}

/// A document read from the annotation variant: gold labels already merged by
/// majority vote, with the three raw layers kept for inspection.
#[derive(Debug, Clone)]
pub struct AnnotatedDocument {
    pub document: Document,
    pub layers: [Vec<HolderSpan>; 3],
}

/// Reads a corpus file. For [`ColumnSchema::Annotators`] the returned gold
/// labels are the majority-vote merge of the three annotator columns.
pub fn read_corpus(path: &Path, schema: ColumnSchema) -> Result<Vec<Document>, CorpusError> {
    let file = File::open(path)?;
    parse_corpus(BufReader::new(file), schema)
}

/// [`read_corpus`] over any reader.
pub fn parse_corpus<R: Read>(
    reader: BufReader<R>,
    schema: ColumnSchema,
) -> Result<Vec<Document>, CorpusError> {
    match schema {
        ColumnSchema::Gold => parse_gold(reader),
        ColumnSchema::Annotators => Ok(parse_annotators(reader)?
            .into_iter()
            .map(|a| a.document)
            .collect()),
    }
}

/// Reads the annotation variant keeping the per-annotator span layers.
pub fn read_annotator_corpus(path: &Path) -> Result<Vec<AnnotatedDocument>, CorpusError> {
    let file = File::open(path)?;
    parse_annotators(BufReader::new(file))
}

struct RawSentence {
    rows: Vec<RawRow>,
}

struct RawRow {
    line: usize,
    fields: Vec<String>,
}

/// Shared line-level pass: groups rows into sentences and documents, checks
/// column counts and the surface field. Label parsing is schema-specific.
fn scan_rows<R: Read>(
    reader: BufReader<R>,
    schema: ColumnSchema,
) -> Result<Vec<(String, usize, Vec<RawSentence>)>, CorpusError> {
    let expected = schema.column_count();
    let mut docs: Vec<(String, usize, Vec<RawSentence>)> = Vec::new();
    let mut current: Option<(String, usize, Vec<RawSentence>)> = None;
    let mut rows: Vec<RawRow> = Vec::new();
    let mut seen_ids: Vec<String> = Vec::new();

    let flush_sentence = |current: &mut Option<(String, usize, Vec<RawSentence>)>,
                          rows: &mut Vec<RawRow>| {
        if !rows.is_empty() {
            let sent = RawSentence {
                rows: std::mem::take(rows),
            };
            current
                .as_mut()
                .expect("rows only accumulate inside a document")
                .2
                .push(sent);
        }
    };

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            flush_sentence(&mut current, &mut rows);
            continue;
        }
        if let Some(rest) = line.strip_prefix("#doc") {
            flush_sentence(&mut current, &mut rows);
            if let Some(done) = current.take() {
                if done.2.is_empty() {
                    return Err(CorpusError::EmptyDocument {
                        line: done.1,
                        id: done.0,
                    });
                }
                docs.push(done);
            }
            let id = rest.trim().to_string();
            if seen_ids.contains(&id) {
                return Err(CorpusError::DuplicateDocumentId { line: line_no, id });
            }
            seen_ids.push(id.clone());
            current = Some((id, line_no, Vec::new()));
            continue;
        }
        if line.starts_with('#') {
            // Non-header comment lines are tolerated and skipped.
            continue;
        }
        if current.is_none() {
            return Err(CorpusError::MissingDocHeader { line: line_no });
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != expected {
            return Err(CorpusError::ColumnCountMismatch {
                line: line_no,
                expected,
                found: fields.len(),
            });
        }
        if fields[0].is_empty() {
            return Err(CorpusError::EmptyField {
                line: line_no,
                column: "surface",
            });
        }
        rows.push(RawRow {
            line: line_no,
            fields,
        });
    }
    flush_sentence(&mut current, &mut rows);
    if let Some(done) = current.take() {
        if done.2.is_empty() {
            return Err(CorpusError::EmptyDocument {
                line: done.1,
                id: done.0,
            });
        }
        docs.push(done);
    }
    Ok(docs)
}

fn parse_label(raw: &str, line: usize) -> Result<HolderLabel, CorpusError> {
    HolderLabel::parse(raw).ok_or_else(|| CorpusError::InvalidLabel {
        line,
        label: raw.to_string(),
    })
}

fn token_from_fields(fields: &[String], gold: HolderLabel) -> Token {
    Token {
        surface: fields[0].clone(),
        lemma: fields[1].clone(),
        pos_fine: fields[2].clone(),
        bpc: fields[3].clone(),
        ne: fields[4].clone(),
        gold,
    }
}

fn parse_gold<R: Read>(reader: BufReader<R>) -> Result<Vec<Document>, CorpusError> {
    let mut documents = Vec::new();
    for (id, _, raw_sentences) in scan_rows(reader, ColumnSchema::Gold)? {
        let mut sentences = Vec::new();
        for raw in raw_sentences {
            let mut tokens = Vec::with_capacity(raw.rows.len());
            let mut prev = HolderLabel::NonHolder;
            for row in &raw.rows {
                let gold = parse_label(&row.fields[5], row.line)?;
                if gold == HolderLabel::IHolder && prev == HolderLabel::NonHolder {
                    return Err(CorpusError::BioViolation { line: row.line });
                }
                prev = gold;
                tokens.push(token_from_fields(&row.fields, gold));
            }
            sentences.push(Sentence::new(tokens));
        }
        documents.push(Document { id, sentences });
    }
    Ok(documents)
}

fn parse_annotators<R: Read>(
    reader: BufReader<R>,
) -> Result<Vec<AnnotatedDocument>, CorpusError> {
    let mut documents = Vec::new();
    for (id, _, raw_sentences) in scan_rows(reader, ColumnSchema::Annotators)? {
        let mut sentences = Vec::new();
        let mut layers: [Vec<HolderSpan>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (s_idx, raw) in raw_sentences.iter().enumerate() {
            // Each annotator column must be valid BIO on its own.
            let mut columns: [Vec<HolderLabel>; 3] = Default::default();
            for (layer, column) in columns.iter_mut().enumerate() {
                let mut prev = HolderLabel::NonHolder;
                for row in &raw.rows {
                    let label = parse_label(&row.fields[5 + layer], row.line)?;
                    if label == HolderLabel::IHolder && prev == HolderLabel::NonHolder {
                        return Err(CorpusError::BioViolation { line: row.line });
                    }
                    prev = label;
                    column.push(label);
                }
            }
            for (layer, column) in columns.iter().enumerate() {
                let probe = Sentence::new(
                    raw.rows
                        .iter()
                        .zip(column)
                        .map(|(row, &gold)| token_from_fields(&row.fields, gold))
                        .collect(),
                );
                layers[layer].extend(spans_from_labels(&probe, s_idx));
            }
            // Gold is filled after merging; placeholder labels for now.
            sentences.push(Sentence::new(
                raw.rows
                    .iter()
                    .map(|row| token_from_fields(&row.fields, HolderLabel::NonHolder))
                    .collect(),
            ));
        }
        let merged = merge_annotations(layers.as_ref())?;
        for (s_idx, sentence) in sentences.iter_mut().enumerate() {
            let spans: Vec<HolderSpan> = merged
                .iter()
                .filter(|s| s.sentence_index == s_idx)
                .copied()
                .collect();
            let labels = labels_from_spans(&spans, sentence.len())?;
            for (token, label) in sentence.tokens.iter_mut().zip(labels) {
                token.gold = label;
            }
        }
        documents.push(AnnotatedDocument {
            document: Document { id, sentences },
            layers,
        });
    }
    Ok(documents)
}

/// Writes documents in the canonical single-gold layout: `#doc` header, token
/// lines, one blank line after every sentence.
pub fn write_corpus<W: Write>(docs: &[Document], out: &mut W) -> std::io::Result<()> {
    for doc in docs {
        writeln!(out, "#doc {}", doc.id)?;
        for sentence in &doc.sentences {
            for t in &sentence.tokens {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    t.surface, t.lemma, t.pos_fine, t.bpc, t.ne, t.gold
                )?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_corpus_to_path(docs: &[Document], path: &Path) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_corpus(docs, &mut out)
}

/// One line of a span record file: `doc_id sentence start end type`,
/// tab-separated, `-` for an absent type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanRecord {
    pub doc_id: String,
    pub span: HolderSpan,
}

pub fn read_span_file(path: &Path) -> Result<Vec<SpanRecord>, CorpusError> {
    let file = File::open(path)?;
    parse_span_file(BufReader::new(file))
}

pub fn parse_span_file<R: Read>(reader: BufReader<R>) -> Result<Vec<SpanRecord>, CorpusError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(CorpusError::BadSpanRecord {
                line: line_no,
                reason: format!("expected 5 columns, found {}", fields.len()),
            });
        }
        let bad = |reason: &str| CorpusError::BadSpanRecord {
            line: line_no,
            reason: reason.to_string(),
        };
        let sentence_index: usize = fields[1].parse().map_err(|_| bad("bad sentence index"))?;
        let start: usize = fields[2].parse().map_err(|_| bad("bad start"))?;
        let end: usize = fields[3].parse().map_err(|_| bad("bad end"))?;
        if start > end {
            return Err(bad("start > end"));
        }
        let holder_type = match fields[4] {
            "-" => None,
            t => {
                let t: u8 = t.parse().map_err(|_| bad("bad holder type"))?;
                if !(1..=3).contains(&t) {
                    return Err(bad("holder type must be 1, 2, or 3"));
                }
                Some(t)
            }
        };
        records.push(SpanRecord {
            doc_id: fields[0].to_string(),
            span: HolderSpan {
                sentence_index,
                start,
                end,
                holder_type,
            },
        });
    }
    Ok(records)
}

pub fn write_span_file<W: Write>(records: &[SpanRecord], out: &mut W) -> std::io::Result<()> {
    for r in records {
        let t = r
            .span
            .holder_type
            .map_or_else(|| "-".to_string(), |t| t.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.doc_id, r.span.sentence_index, r.span.start, r.span.end, t
        )?;
    }
    Ok(())
}

/// Maps span records onto a corpus, globalizing sentence indices the same way
/// [`super::corpus_gold_spans`] does.
pub fn resolve_spans(
    records: &[SpanRecord],
    docs: &[Document],
) -> Result<Vec<HolderSpan>, CorpusError> {
    let mut offsets = std::collections::HashMap::new();
    let mut offset = 0;
    for doc in docs {
        offsets.insert(doc.id.as_str(), offset);
        offset += doc.sentences.len();
    }
    records
        .iter()
        .map(|r| {
            let base = offsets
                .get(r.doc_id.as_str())
                .ok_or_else(|| CorpusError::UnknownDocumentId {
                    id: r.doc_id.clone(),
                })?;
            Ok(HolderSpan {
                sentence_index: r.span.sentence_index + base,
                ..r.span
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str, schema: ColumnSchema) -> Result<Vec<Document>, CorpusError> {
        parse_corpus(BufReader::new(Cursor::new(text.to_string())), schema)
    }

    const SAMPLE: &str = "#doc d1\n\
        qal\tqal\tV_PAST\tB-VP\tNONE\tNon-Holder\n\
        alraees\traees\tN_DEF\tB-NP\tPerson\tB-Holder\n\
        alsabiq\tsabiq\tADJ_DEF\tI-NP\tPerson\tI-Holder\n\
        \n\
        hatha\thatha\tPRON\tB-NP\tNONE\tNon-Holder\n\
        jayyid\tjayyid\tADJ\tB-ADJP\tNONE\tNon-Holder\n\
        \n";

    #[test]
    fn empty_file_is_empty_corpus() {
        assert!(parse("", ColumnSchema::Gold).unwrap().is_empty());
    }

    #[test]
    fn reads_documents_and_sentences() {
        let docs = parse(SAMPLE, ColumnSchema::Gold).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].id, "d1");
        assert_eq!(docs[0].sentences.len(), 2);
        assert_eq!(docs[0].sentences[0].len(), 3);
        assert_eq!(docs[0].sentences[1].len(), 2);
        assert_eq!(docs[0].sentences[0].tokens[1].gold, HolderLabel::BHolder);
    }

    #[test]
    fn bio_violation_reports_line() {
        let text = "#doc d1\nw\tw\tX\tO\tNONE\tI-Holder\n";
        match parse(text, ColumnSchema::Gold) {
            Err(CorpusError::BioViolation { line }) => assert_eq!(line, 2),
            other => panic!("expected BioViolation, got {other:?}"),
        }
    }

    #[test]
    fn invalid_label_reports_line() {
        let text = "#doc d1\nw\tw\tX\tO\tNONE\tB-Src\n";
        match parse(text, ColumnSchema::Gold) {
            Err(CorpusError::InvalidLabel { line, label }) => {
                assert_eq!(line, 2);
                assert_eq!(label, "B-Src");
            }
            other => panic!("expected InvalidLabel, got {other:?}"),
        }
    }

    #[test]
    fn column_count_mismatch() {
        let text = "#doc d1\nw\tw\tX\tO\tNONE\n";
        assert!(matches!(
            parse(text, ColumnSchema::Gold),
            Err(CorpusError::ColumnCountMismatch {
                line: 2,
                expected: 6,
                found: 5
            })
        ));
    }

    #[test]
    fn token_before_header_rejected() {
        let text = "w\tw\tX\tO\tNONE\tNon-Holder\n";
        assert!(matches!(
            parse(text, ColumnSchema::Gold),
            Err(CorpusError::MissingDocHeader { line: 1 })
        ));
    }

    #[test]
    fn header_without_sentences_rejected() {
        let text = "#doc d1\n#doc d2\nw\tw\tX\tO\tNONE\tNon-Holder\n";
        assert!(matches!(
            parse(text, ColumnSchema::Gold),
            Err(CorpusError::EmptyDocument { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_document_id_rejected() {
        let text = "#doc d1\nw\tw\tX\tO\tNONE\tNon-Holder\n\n#doc d1\nw\tw\tX\tO\tNONE\tNon-Holder\n";
        assert!(matches!(
            parse(text, ColumnSchema::Gold),
            Err(CorpusError::DuplicateDocumentId { .. })
        ));
    }

    #[test]
    fn write_read_roundtrip_is_byte_identical() {
        let docs = parse(SAMPLE, ColumnSchema::Gold).unwrap();
        let mut buf = Vec::new();
        write_corpus(&docs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), SAMPLE);
    }

    #[test]
    fn annotator_merge_fills_majority_gold() {
        // Annotators 1 and 2 mark token 1, annotator 3 marks nothing.
        let text = "#doc d1\n\
            qal\tqal\tV\tO\tNONE\tNon-Holder\tNon-Holder\tNon-Holder\n\
            raees\traees\tN\tO\tPerson\tB-Holder\tB-Holder\tNon-Holder\n\
            \n";
        let docs = parse(text, ColumnSchema::Annotators).unwrap();
        assert_eq!(docs[0].sentences[0].tokens[1].gold, HolderLabel::BHolder);

        // Single-annotator span is dropped.
        let text = "#doc d1\n\
            qal\tqal\tV\tO\tNONE\tNon-Holder\tNon-Holder\tNon-Holder\n\
            raees\traees\tN\tO\tPerson\tB-Holder\tNon-Holder\tNon-Holder\n\
            \n";
        let docs = parse(text, ColumnSchema::Annotators).unwrap();
        assert_eq!(docs[0].sentences[0].tokens[1].gold, HolderLabel::NonHolder);
    }

    #[test]
    fn annotator_layers_disagreeing_on_boundaries_drop_span() {
        // Same start, different ends: no two layers agree exactly.
        let text = "#doc d1\n\
            a\ta\tN\tO\tNONE\tB-Holder\tB-Holder\tNon-Holder\n\
            b\tb\tN\tO\tNONE\tI-Holder\tNon-Holder\tB-Holder\n\
            \n";
        let docs = parse(text, ColumnSchema::Annotators).unwrap();
        let labels = docs[0].sentences[0].gold_labels();
        assert_eq!(labels, vec![HolderLabel::NonHolder, HolderLabel::NonHolder]);
    }

    #[test]
    fn span_file_roundtrip_and_resolution() {
        let docs = parse(SAMPLE, ColumnSchema::Gold).unwrap();
        let records = vec![SpanRecord {
            doc_id: "d1".to_string(),
            span: HolderSpan::new(0, 1, 2).with_type(1),
        }];
        let mut buf = Vec::new();
        write_span_file(&records, &mut buf).unwrap();
        let parsed = parse_span_file(BufReader::new(Cursor::new(buf))).unwrap();
        assert_eq!(parsed, records);
        let resolved = resolve_spans(&parsed, &docs).unwrap();
        assert_eq!(resolved[0].sentence_index, 0);
        assert_eq!(resolved[0].holder_type, Some(1));
    }
}
