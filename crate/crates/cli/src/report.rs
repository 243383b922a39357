//! Joins result CSVs and prints per-cell speedup factors of the proximal
//! gradient baseline over the adaptive method.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone)]
struct Row {
    solver: String,
    dataset: String,
    loss: String,
    regularizer: String,
    eps: String,
    prox_calls: u64,
    status: String,
}

fn parse_rows(path: &Path) -> Result<Vec<Row>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            bail!("{}: line {} has {} fields, expected 9", path.display(), i + 1, fields.len());
        }
        rows.push(Row {
            solver: fields[0].to_string(),
            dataset: fields[1].to_string(),
            loss: fields[2].to_string(),
            regularizer: fields[3].to_string(),
            eps: fields[5].to_string(),
            prox_calls: fields[6].parse().with_context(|| format!("bad prox_calls on line {}", i + 1))?,
            status: fields[8].to_string(),
        });
    }
    Ok(rows)
}

/// Joins rows on (dataset, loss, regularizer, eps) and reports the
/// speedup `pg_calls / adaagc_calls` per cell, two decimals. Groups with
/// a single solver report a factor of 1.0; groups missing one side of an
/// expected pair are noted and skipped from the ratio column.
pub fn compare_report(paths: &[impl AsRef<Path>]) -> Result<String> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(parse_rows(p.as_ref())?);
    }
    let mut groups: BTreeMap<(String, String, String, String), Vec<Row>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.dataset.clone(), row.loss.clone(), row.regularizer.clone(), row.eps.clone()))
            .or_default()
            .push(row);
    }

    let mut out = String::new();
    writeln!(
        out,
        "{:<12} {:<13} {:<13} {:<8} {:>12} {:>12} {:>9}",
        "dataset", "loss", "regularizer", "eps", "pg_calls", "ada_calls", "speedup"
    )?;
    for ((dataset, loss, reg, eps), group) in &groups {
        let baseline = group
            .iter()
            .find(|r| r.solver.starts_with("pg"))
            .or_else(|| group.first());
        let adaptive = group.iter().find(|r| r.solver.starts_with("adaagc"));
        let (b, a) = match (baseline, adaptive) {
            (Some(b), Some(a)) => (b, a),
            (Some(b), None) if group.iter().all(|r| !r.solver.starts_with("adaagc")) => (b, b),
            _ => {
                writeln!(out, "warning: skipping {dataset}/{loss}/{reg}/{eps}: no joinable pair")?;
                continue;
            }
        };
        if b.status == "failed" || a.status == "failed" {
            writeln!(out, "warning: skipping {dataset}/{loss}/{reg}/{eps}: failed cell")?;
            continue;
        }
        let factor = if a.prox_calls == 0 {
            1.0
        } else {
            b.prox_calls as f64 / a.prox_calls as f64
        };
        writeln!(
            out,
            "{:<12} {:<13} {:<13} {:<8} {:>12} {:>12} {:>9.2}",
            dataset, loss, reg, eps, b.prox_calls, a.prox_calls, factor
        )?;
    }
    Ok(out)
}

/// The speedup figure as printed by the report, for one pair of counts.
pub fn speedup(pg_calls: u64, ada_calls: u64) -> f64 {
    if ada_calls == 0 {
        1.0
    } else {
        pg_calls as f64 / ada_calls as f64
    }
}
