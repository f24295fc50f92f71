//! Data ingestion and synthetic dataset generation.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle::{RngStream, Vector};

/// Load a sparse text file in libsvm format: `label idx:val idx:val ...` with
/// 1-based feature indices. Rows are densified (missing indices become 0) in
/// file order, and every feature column is affinely rescaled to `[0, 1]`.
/// Columns that are constant are left unchanged, since there is no affine map
/// that spreads them.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<(Vec<Vector>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0usize;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label_tok = parts.next().expect("non-empty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad label {label_tok:?}"),
        })?;
        let mut entries = Vec::new();
        for tok in parts {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("expected idx:val, got {tok:?}"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature index {idx_s:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "feature indices are 1-based".into(),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature value {val_s:?}"),
            })?;
            dim = dim.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        sparse_rows.push(entries);
    }

    if sparse_rows.is_empty() {
        return Err(Error::contract("libsvm file contains no data rows"));
    }

    let mut rows: Vec<Vector> = sparse_rows
        .into_iter()
        .map(|entries| {
            let mut row = Vector::zeros(dim);
            for (j, v) in entries {
                row[j] = v;
            }
            row
        })
        .collect();

    normalize_columns_unit_interval(&mut rows);
    Ok((rows, labels))
}

fn normalize_columns_unit_interval(rows: &mut [Vector]) {
    if rows.is_empty() {
        return;
    }
    let d = rows[0].dim();
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in rows.iter() {
            lo = lo.min(row[j]);
            hi = hi.max(row[j]);
        }
        if hi > lo {
            let span = hi - lo;
            for row in rows.iter_mut() {
                row[j] = (row[j] - lo) / span;
            }
        }
    }
}

/// Write rows and labels in libsvm text format. Zero entries are skipped;
/// values print in shortest round-trip form so a reload reproduces them
/// exactly.
pub fn write_libsvm(path: impl AsRef<Path>, rows: &[Vector], labels: &[f64]) -> Result<()> {
    let mut out = String::new();
    for (row, label) in rows.iter().zip(labels) {
        out.push_str(&format!("{label}"));
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Dump a dense dataset as CSV with header `label,x1,...,xd`.
pub fn dump_csv(path: impl AsRef<Path>, rows: &[Vector], labels: &[f64]) -> Result<()> {
    if rows.len() != labels.len() {
        return Err(Error::contract("rows and labels must have equal length"));
    }
    let d = rows.first().map(Vector::dim).unwrap_or(0);
    let mut file = fs::File::create(path)?;
    let header: Vec<String> = std::iter::once("label".to_string())
        .chain((1..=d).map(|j| format!("x{j}")))
        .collect();
    writeln!(file, "{}", header.join(","))?;
    for (row, label) in rows.iter().zip(labels) {
        let mut line = format!("{label}");
        for &v in row.iter() {
            line.push(',');
            line.push_str(&format!("{v}"));
        }
        writeln!(file, "{line}")?;
    }
    Ok(())
}

/// Balanced Gaussian blobs: one unit-variance cluster per class, classes
/// assigned round-robin, fully determined by the seed. Cluster centers sit at
/// pairwise distance `separation` when `classes <= d` (scaled standard basis
/// directions); otherwise directions are random and the separation is
/// approximate.
pub fn make_synthetic_classification_with_separation(
    n: usize,
    d: usize,
    classes: usize,
    separation: f64,
    seed: u64,
) -> Result<(Vec<Vector>, Vec<usize>)> {
    if classes < 2 {
        return Err(Error::contract("need at least two classes"));
    }
    if n < classes {
        return Err(Error::contract(format!(
            "need at least one example per class: n = {n} < classes = {classes}"
        )));
    }
    if d == 0 {
        return Err(Error::contract("need d >= 1"));
    }
    let mut rng = RngStream::new(seed);
    let scale = separation / std::f64::consts::SQRT_2;
    let centers: Vec<Vector> = if classes <= d {
        (0..classes)
            .map(|c| {
                let mut v = Vector::zeros(d);
                v[c] = scale;
                v
            })
            .collect()
    } else {
        (0..classes)
            .map(|_| {
                let mut v = Vector::from_vec((0..d).map(|_| rng.next_gaussian()).collect());
                let norm = v.norm().max(1e-12);
                v.scale(scale / norm);
                v
            })
            .collect()
    };

    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let class = k % classes;
        let mut row = centers[class].clone();
        for j in 0..d {
            row[j] += rng.next_gaussian();
        }
        rows.push(row);
        labels.push(class);
    }
    Ok((rows, labels))
}

/// [`make_synthetic_classification_with_separation`] with the default
/// 6-sigma cluster separation.
pub fn make_synthetic_classification(
    n: usize,
    d: usize,
    classes: usize,
    seed: u64,
) -> Result<(Vec<Vector>, Vec<usize>)> {
    make_synthetic_classification_with_separation(n, d, classes, 6.0, seed)
}
