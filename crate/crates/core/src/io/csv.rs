//! Convergence history as CSV:
//! `iter,eta,eta_rel,eta_<label>...,mu_<label>...`, one row per iteration
//! starting at `j = 0`. Floats use the shortest exact representation.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::{ConvergenceHistory, HistoryRow};

pub fn format_convergence_csv(history: &ConvergenceHistory) -> String {
    let monitored = history.is_monitored();
    let mut out = String::from("iter,eta,eta_rel");
    if monitored {
        for l in &history.labels {
            let _ = write!(out, ",eta_{l}");
        }
        for l in &history.labels {
            let _ = write!(out, ",mu_{l}");
        }
    }
    out.push('\n');
    for row in &history.rows {
        let _ = write!(out, "{},{:e},{:e}", row.iter, row.eta, row.eta_rel);
        if monitored {
            for v in row.eta_blocks.iter().chain(&row.mu) {
                let _ = write!(out, ",{v:e}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_convergence_csv(history: &ConvergenceHistory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_convergence_csv(history)).map_err(|e| Error::io(path, e))
}

/// Reads a history written by [`write_convergence_csv`]. Only the CSV columns
/// are restored; recurrence scalars and the termination reason are not.
pub fn parse_convergence_csv(text: &str, src: &str) -> Result<ConvergenceHistory> {
    let err = |line: usize, msg: String| Error::Parse {
        path: src.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[..3] != ["iter", "eta", "eta_rel"] {
        return Err(err(1, format!("unexpected header '{header}'")));
    }
    let rest = &cols[3..];
    if !rest.len().is_multiple_of(2) {
        return Err(err(1, "unpaired eta_/mu_ columns".into()));
    }
    let k = rest.len() / 2;
    let mut labels = Vec::with_capacity(k);
    for b in 0..k {
        let eta_l = rest[b].strip_prefix("eta_");
        let mu_l = rest[k + b].strip_prefix("mu_");
        match (eta_l, mu_l) {
            (Some(a), Some(m)) if a == m => labels.push(a.to_string()),
            _ => return Err(err(1, format!("columns '{}' and '{}' do not match", rest[b], rest[k + b]))),
        }
    }

    let mut rows = Vec::new();
    for (line, text) in lines {
        if text.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != cols.len() {
            return Err(err(line, format!("expected {} fields, got {}", cols.len(), fields.len())));
        }
        let iter = fields[0]
            .parse::<usize>()
            .map_err(|_| err(line, format!("bad iteration '{}'", fields[0])))?;
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| err(line, format!("bad number '{f}'"))))
            .collect::<Result<_>>()?;
        rows.push(HistoryRow {
            iter,
            eta_signed: nums[0],
            eta: nums[0],
            eta_rel: nums[1],
            eta_blocks: nums[2..2 + k].to_vec(),
            mu: nums[2 + k..].to_vec(),
            psi: Vec::new(),
            recurrence: None,
        });
    }
    Ok(ConvergenceHistory {
        labels,
        rows,
        termination: None,
        iterates: None,
    })
}

pub fn read_convergence_csv(path: impl AsRef<Path>) -> Result<ConvergenceHistory> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_convergence_csv(&text, &path.display().to_string())
}
