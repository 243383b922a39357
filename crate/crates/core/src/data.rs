//! LibSVM-format text parsing and feature scaling.
//!
//! Line format: `<label> <index>:<value> ...` with 1-based, strictly
//! increasing indices. Blank lines are skipped and `#` starts a comment.

use std::io::BufRead;

use thiserror::Error;

use crate::losses::LabeledDataset;
use crate::problem::OptError;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(#[from] OptError),
}

/// Parses LibSVM text into a dataset. The dimension is the largest feature
/// index seen; an empty input yields the empty dataset (`n = 0`, `d = 0`).
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<LabeledDataset, ParseError> {
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    let mut dim: usize = 0;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let label_tok = match tokens.next() {
            Some(t) => t,
            None => continue, // blank or comment-only line
        };
        let label: f64 = label_tok.parse().map_err(|_| ParseError::Malformed {
            line: lineno,
            message: format!("non-numeric label `{label_tok}`"),
        })?;
        let mut row: Vec<(u32, f64)> = Vec::new();
        let mut prev_idx: Option<u32> = None;
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| ParseError::Malformed {
                line: lineno,
                message: format!("expected `index:value`, got `{tok}`"),
            })?;
            let idx: u32 = idx_str.parse().map_err(|_| ParseError::Malformed {
                line: lineno,
                message: format!("bad feature index `{idx_str}`"),
            })?;
            if idx == 0 {
                return Err(ParseError::Malformed {
                    line: lineno,
                    message: "feature indices are 1-based".into(),
                });
            }
            let val: f64 = val_str.parse().map_err(|_| ParseError::Malformed {
                line: lineno,
                message: format!("bad feature value `{val_str}`"),
            })?;
            let zero_based = idx - 1;
            if let Some(p) = prev_idx {
                if zero_based <= p {
                    return Err(ParseError::Malformed {
                        line: lineno,
                        message: format!(
                            "feature indices must be strictly increasing (saw {} after {})",
                            idx,
                            p + 1
                        ),
                    });
                }
            }
            prev_idx = Some(zero_based);
            dim = dim.max(zero_based as usize + 1);
            row.push((zero_based, val));
        }
        rows.push(row);
        labels.push(label);
    }
    Ok(LabeledDataset::new(rows, labels, dim)?)
}

pub fn parse_libsvm_str(text: &str) -> Result<LabeledDataset, ParseError> {
    parse_libsvm(text.as_bytes())
}

/// Writes the dataset back in LibSVM form (1-based indices). Values use
/// the shortest round-trip float formatting, so `parse(serialize(d)) == d`.
pub fn to_libsvm_string(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for i in 0..data.n_rows() {
        out.push_str(&format!("{}", data.labels()[i]));
        let (idx, val) = data.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            out.push_str(&format!(" {}:{}", j + 1, v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingMode {
    /// Identity; the benchmark default (the experiments assume raw data).
    None,
    /// Scale every row to unit Euclidean norm (zero rows unchanged).
    UnitRow,
    /// Min-max scale each column to `[0, 1]`. Column minima and maxima
    /// include implicit zeros of rows that do not store the column.
    /// Constant columns collapse to zero.
    MinmaxColumn,
}

/// Returns a transformed copy; `ScalingMode::None` is the identity.
pub fn scale_features(data: &LabeledDataset, mode: ScalingMode) -> LabeledDataset {
    match mode {
        ScalingMode::None => data.clone(),
        ScalingMode::UnitRow => {
            let mut rows = data.to_rows();
            for row in &mut rows {
                let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (_, v) in row.iter_mut() {
                        *v /= norm;
                    }
                }
            }
            LabeledDataset::new(rows, data.labels().to_vec(), data.dim())
                .expect("unit-row scaling preserves validity")
        }
        ScalingMode::MinmaxColumn => {
            let d = data.dim();
            let n = data.n_rows();
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            let mut stored = vec![0usize; d];
            for i in 0..n {
                let (idx, val) = data.row(i);
                for (&j, &v) in idx.iter().zip(val) {
                    let j = j as usize;
                    lo[j] = lo[j].min(v);
                    hi[j] = hi[j].max(v);
                    stored[j] += 1;
                }
            }
            for j in 0..d {
                if stored[j] < n {
                    // implicit zeros are part of the column
                    lo[j] = lo[j].min(0.0);
                    hi[j] = hi[j].max(0.0);
                }
                if stored[j] == 0 {
                    lo[j] = 0.0;
                    hi[j] = 0.0;
                }
            }
            let scale_val = |j: usize, v: f64| -> f64 {
                if hi[j] > lo[j] {
                    (v - lo[j]) / (hi[j] - lo[j])
                } else {
                    0.0
                }
            };
            let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n);
            for i in 0..n {
                let (idx, val) = data.row(i);
                let mut row: Vec<(u32, f64)> = Vec::with_capacity(idx.len());
                let mut cursor = 0usize;
                for j in 0..d {
                    let stored_here = cursor < idx.len() && idx[cursor] as usize == j;
                    let raw = if stored_here {
                        let v = val[cursor];
                        cursor += 1;
                        v
                    } else {
                        0.0
                    };
                    let scaled = if stored_here || scale_val(j, 0.0) != 0.0 {
                        scale_val(j, raw)
                    } else {
                        0.0
                    };
                    if scaled != 0.0 || stored_here {
                        row.push((j as u32, scaled));
                    }
                }
                rows.push(row);
            }
            LabeledDataset::new(rows, data.labels().to_vec(), d)
                .expect("minmax scaling preserves validity")
        }
    }
}

/// Normalizes classification labels: `{-1, +1}` pass through, `{0, 1}`
/// map to `{-1, +1}`, anything else is an error.
pub fn map_binary_labels(data: &LabeledDataset) -> Result<LabeledDataset, ParseError> {
    let labels = data.labels();
    if labels.iter().all(|&b| b == -1.0 || b == 1.0) {
        return Ok(data.clone());
    }
    if labels.iter().all(|&b| b == 0.0 || b == 1.0) {
        let mapped: Vec<f64> = labels.iter().map(|&b| if b == 0.0 { -1.0 } else { 1.0 }).collect();
        return Ok(LabeledDataset::new(data.to_rows(), mapped, data.dim())
            .expect("label mapping preserves validity"));
    }
    Err(ParseError::Invalid(OptError::InvalidConfig(
        "classification labels must come from {-1, +1} or {0, 1}".into(),
    )))
}
