//! Model file format: a versioned text layout that round-trips weights
//! exactly (Rust's shortest-representation float formatting parses back to
//! the identical bits).
//!
//! ```text
//! HOLDERCRF 1
//! labels<TAB>B-Holder<TAB>I-Holder<TAB>Non-Holder
//! sigma2<TAB><f64>
//! iterations<TAB><usize>
//! objective<TAB><f64>
//! features<TAB><F>
//! <feature string>          x F lines, line order = id
//! weights<TAB><K>
//! <f64>                     x K lines
//! end
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{CrfError, CrfModel, FeatureIndex, TrainMeta};
use crate::corpus::HolderLabel;

const MAGIC: &str = "HOLDERCRF";
const VERSION: &str = "1";

pub fn save_model(model: &CrfModel, path: &Path) -> Result<(), CrfError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_model(model, &mut out)
}

pub fn write_model<W: Write>(model: &CrfModel, out: &mut W) -> Result<(), CrfError> {
    writeln!(out, "{MAGIC} {VERSION}")?;
    let labels: Vec<&str> = HolderLabel::ALL.iter().map(|l| l.as_str()).collect();
    writeln!(out, "labels\t{}", labels.join("\t"))?;
    writeln!(out, "sigma2\t{}", model.meta().sigma2)?;
    writeln!(out, "iterations\t{}", model.meta().iterations)?;
    writeln!(out, "objective\t{}", model.meta().objective)?;
    writeln!(out, "features\t{}", model.index().num_feature_strings())?;
    for name in model.index().feature_names() {
        writeln!(out, "{name}")?;
    }
    writeln!(out, "weights\t{}", model.weights().len())?;
    for w in model.weights() {
        writeln!(out, "{w}")?;
    }
    writeln!(out, "end")?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<CrfModel, CrfError> {
    read_model(BufReader::new(File::open(path)?))
}

pub fn read_model<R: Read>(reader: BufReader<R>) -> Result<CrfModel, CrfError> {
    let mut lines = reader.lines();
    let mut next = |what: &str| -> Result<String, CrfError> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| CrfError::CorruptWeights {
                reason: format!("unexpected end of file, expected {what}"),
            })
    };

    let header = next("magic header")?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(CrfError::BadMagic);
    }
    let version = parts.next().unwrap_or("");
    if version != VERSION {
        return Err(CrfError::VersionMismatch {
            found: version.to_string(),
        });
    }

    let label_line = next("label list")?;
    let mut fields = label_line.split('\t');
    if fields.next() != Some("labels") {
        return Err(CrfError::CorruptIndex {
            reason: "missing label list".to_string(),
        });
    }
    let declared: Vec<&str> = fields.collect();
    let expected: Vec<&str> = HolderLabel::ALL.iter().map(|l| l.as_str()).collect();
    if declared != expected {
        let label = declared
            .iter()
            .find(|l| !expected.contains(l))
            .unwrap_or(&"<missing>")
            .to_string();
        return Err(CrfError::UnknownLabel { label });
    }

    let sigma2: f64 = parse_kv(&next("sigma2")?, "sigma2")?;
    let iterations: usize = parse_kv(&next("iterations")?, "iterations")?;
    let objective: f64 = parse_kv(&next("objective")?, "objective")?;

    let n_features: usize = parse_kv(&next("feature count")?, "features")?;
    let mut names = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        names.push(next("feature string")?);
    }
    let index = FeatureIndex::from_names(names)?;

    let n_weights: usize = parse_kv(&next("weight count")?, "weights")?;
    if n_weights != index.num_parameters() {
        return Err(CrfError::CorruptWeights {
            reason: format!(
                "declared {n_weights} weights, index needs {}",
                index.num_parameters()
            ),
        });
    }
    let mut weights = Vec::with_capacity(n_weights);
    for i in 0..n_weights {
        let line = next("weight")?;
        let w: f64 = line.parse().map_err(|_| CrfError::CorruptWeights {
            reason: format!("weight {i} is not a number: `{line}`"),
        })?;
        weights.push(w);
    }
    if next("end marker")? != "end" {
        return Err(CrfError::CorruptWeights {
            reason: "missing end marker".to_string(),
        });
    }

    CrfModel::from_parts(
        index,
        weights,
        TrainMeta {
            sigma2,
            iterations,
            objective,
        },
    )
}

fn parse_kv<T: std::str::FromStr>(line: &str, key: &str) -> Result<T, CrfError> {
    let mut fields = line.split('\t');
    if fields.next() != Some(key) {
        return Err(CrfError::CorruptIndex {
            reason: format!("expected `{key}` line, found `{line}`"),
        });
    }
    fields
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CrfError::CorruptIndex {
            reason: format!("bad value in `{line}`"),
        })
}
