//! Partition text format: one block per line, `<label> <spec>`, where `spec`
//! is a comma-separated list of 0-based indices and half-open ranges `a:b`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::partition::{BlockPartition, IndexSet};

pub fn parse_partition(text: &str, src: &str) -> Result<BlockPartition> {
    let mut blocks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: src.to_string(),
            line: lineno + 1,
            msg,
        };
        let (label, spec) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(format!("expected '<label> <indices>', got '{line}'")))?;
        let mut indices = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let num = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| err(format!("bad index '{t}' in block '{label}'")))
            };
            match item.split_once(':') {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b)?);
                    if b < a {
                        return Err(err(format!("empty range {a}:{b}")));
                    }
                    indices.extend(a..b);
                }
                None => indices.push(num(item)?),
            }
        }
        blocks.push((label.to_string(), indices));
    }
    BlockPartition::new(blocks)
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<BlockPartition> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_partition(&text, &path.display().to_string())
}

pub fn format_partition(part: &BlockPartition) -> String {
    let mut out = String::new();
    for block in part.blocks() {
        let spec = match &block.indices {
            IndexSet::Range(r) => format!("{}:{}", r.start, r.end),
            IndexSet::Sorted(ix) => ix.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
        };
        let _ = writeln!(out, "{} {spec}", block.label);
    }
    out
}

pub fn write_partition(path: impl AsRef<Path>, part: &BlockPartition) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_partition(part)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_blocks() {
        let p = parse_partition("u 0:100\np 100:130\n", "part").unwrap();
        assert_eq!(p.block_sizes(), vec![100, 30]);
        assert_eq!(p.labels(), vec!["u", "p"]);
    }

    #[test]
    fn non_contiguous_block() {
        let p = parse_partition("a 0,2\nb 1\n", "part").unwrap();
        assert_eq!(p.blocks()[0].indices, IndexSet::Sorted(vec![0, 2]));
    }

    #[test]
    fn mixed_spec_and_comments() {
        let p = parse_partition("# blocks\n\na 0:2, 5\nb 2:5,6\n", "part").unwrap();
        assert_eq!(p.gather(0, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), vec![0.0, 1.0, 5.0]);
    }

    #[test]
    fn overlap_names_index() {
        let err = parse_partition("u 0:5\np 4:8\n", "part").unwrap_err().to_string();
        assert!(err.contains("index 4"), "{err}");
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_partition("u\n", "x").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(parse_partition("u 0:2\np x\n", "x").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(parse_partition("u 5:2\n", "x").is_err());
    }

    #[test]
    fn format_round_trip() {
        let text = "a 0,2,3\nb 1:2\nc 4:7\n";
        let p = parse_partition(text, "x").unwrap();
        assert_eq!(format_partition(&p), text);
    }
}
