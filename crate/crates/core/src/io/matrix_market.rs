//! Matrix Market exchange format, real coordinate and array flavours.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    layout: Layout,
    symmetry: Symmetry,
}

fn parse_header(line: &str, src: &str) -> Result<Header> {
    let err = |msg: String| Error::Parse {
        path: src.to_string(),
        line: 1,
        msg,
    };
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(err(format!("expected '%%MatrixMarket matrix <format> <field> <symmetry>', got '{line}'")));
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object '{}' (only 'matrix')", tokens[1])));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(err(format!("unknown format '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(Error::UnsupportedFormat(format!("field '{other}' (only real)"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::UnsupportedFormat(format!("symmetry '{other}'"))),
    };
    Ok(Header { layout, symmetry })
}

/// Parses Matrix Market text. Symmetric files are expanded to full storage;
/// 1-based file indices become 0-based.
pub fn parse_matrix_market(text: &str, src: &str) -> Result<CsrMatrix> {
    let err = |line: usize, msg: String| Error::Parse {
        path: src.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => parse_header(l, src)?,
        None => return Err(err(1, "empty file".into())),
    };
    let mut content = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = content
        .next()
        .ok_or_else(|| err(2, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(size_line, format!("bad size line '{size}': {e}")))?;

    let parse_f64 = |line: usize, tok: &str| {
        tok.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(line, format!("bad value '{tok}'")))
    };

    match header.layout {
        Layout::Coordinate => {
            let &[nrows, ncols, nnz] = dims.as_slice() else {
                return Err(err(size_line, "coordinate size line needs 'rows cols nnz'".into()));
            };
            if header.symmetry == Symmetry::Symmetric && nrows != ncols {
                return Err(err(size_line, "symmetric matrix must be square".into()));
            }
            let mut triplets = Vec::with_capacity(nnz * 2);
            let mut count = 0;
            for (line, entry) in content {
                let tok: Vec<&str> = entry.split_whitespace().collect();
                if tok.len() != 3 {
                    return Err(err(line, format!("expected 'row col value', got '{entry}'")));
                }
                let idx = |t: &str, max: usize| match t.parse::<usize>() {
                    Ok(i) if i >= 1 && i <= max => Ok(i - 1),
                    _ => Err(err(line, format!("index '{t}' outside 1..={max}"))),
                };
                let i = idx(tok[0], nrows)?;
                let j = idx(tok[1], ncols)?;
                let v = parse_f64(line, tok[2])?;
                count += 1;
                if count > nnz {
                    return Err(err(line, format!("more than the declared {nnz} entries")));
                }
                triplets.push((i, j, v));
                if header.symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j, i, v));
                }
            }
            if count != nnz {
                return Err(err(
                    text.lines().count(),
                    format!("declared {nnz} entries but found {count}"),
                ));
            }
            CsrMatrix::from_triplets(nrows, ncols, triplets)
        }
        Layout::Array => {
            let &[nrows, ncols] = dims.as_slice() else {
                return Err(err(size_line, "array size line needs 'rows cols'".into()));
            };
            let mut values = Vec::with_capacity(nrows * ncols);
            for (line, entry) in content {
                for tok in entry.split_whitespace() {
                    values.push(parse_f64(line, tok)?);
                }
            }
            let expected = match header.symmetry {
                Symmetry::General => nrows * ncols,
                Symmetry::Symmetric => nrows * (nrows + 1) / 2,
            };
            if values.len() != expected {
                return Err(err(
                    text.lines().count(),
                    format!("expected {expected} values, found {}", values.len()),
                ));
            }
            let mut triplets = Vec::with_capacity(nrows * ncols);
            let mut it = values.into_iter();
            // column-major; symmetric arrays list the lower triangle
            for j in 0..ncols {
                let start = if header.symmetry == Symmetry::Symmetric { j } else { 0 };
                for i in start..nrows {
                    let v = it.next().expect("length checked");
                    if v != 0.0 {
                        triplets.push((i, j, v));
                        if header.symmetry == Symmetry::Symmetric && i != j {
                            triplets.push((j, i, v));
                        }
                    }
                }
            }
            CsrMatrix::from_triplets(nrows, ncols, triplets)
        }
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, &path.display().to_string())
}

/// Reads a column vector stored as an `n x 1` matrix in either layout.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let m = read_matrix_market(path)?;
    if m.ncols() != 1 {
        return Err(Error::InvalidInput(format!(
            "{}: expected a column vector, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = vec![0.0; m.nrows()];
    for (i, _, v) in m.triplets() {
        out[i] = v;
    }
    Ok(out)
}

/// Coordinate format. With `symmetric` only the lower triangle is written;
/// the caller guarantees the matrix is symmetric.
pub fn format_matrix_market(m: &CsrMatrix, symmetric: bool) -> String {
    let entries: Vec<(usize, usize, f64)> = m.triplets().filter(|&(i, j, _)| !symmetric || i >= j).collect();
    let mut out = format!(
        "%%MatrixMarket matrix coordinate real {}\n{} {} {}\n",
        if symmetric { "symmetric" } else { "general" },
        m.nrows(),
        m.ncols(),
        entries.len()
    );
    for (i, j, v) in entries {
        // `{:e}` prints the shortest representation that parses back exactly.
        let _ = writeln!(out, "{} {} {v:e}", i + 1, j + 1);
    }
    out
}

pub fn write_matrix_market(path: impl AsRef<Path>, m: &CsrMatrix, symmetric: bool) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix_market(m, symmetric)).map_err(|e| Error::io(path, e))
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("%%MatrixMarket matrix array real general\n{} 1\n", v.len());
    for x in v {
        let _ = writeln!(out, "{x:e}");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
