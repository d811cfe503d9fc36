//! Line-oriented text format for symmetric matrices.
//!
//! ```text
//! # optional comments
//! %%symcoord N NNZ
//! i j v        (NNZ lines, 1-based, i >= j)
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! `f64`. A file listing the complete lower triangle reads back as dense
//! storage, anything else as sparse.

use std::io::{BufRead, Write};

use super::{Entry, MatrixError, Storage, SymMatrix};

const MAGIC: &str = "%%symcoord";

// Bounds the up-front allocation driven by an untrusted header.
const MAX_PREALLOC: usize = 1 << 16;

pub fn write_matrix<W: Write>(m: &SymMatrix, mut sink: W) -> std::io::Result<()> {
    writeln!(sink, "{MAGIC} {} {}", m.dim(), m.stored_len())?;
    let mut result = Ok(());
    m.for_each_lower(|i, j, v| {
        if result.is_ok() {
            result = writeln!(sink, "{} {} {:.16e}", i + 1, j + 1, v);
        }
    });
    result?;
    sink.flush()
}

pub fn read_matrix<R: BufRead>(source: R) -> Result<SymMatrix, MatrixError> {
    let mut lines = Vec::new();
    for line in source.lines() {
        lines.push(line?);
    }
    parse_lines(lines.iter().map(String::as_str))
}

pub fn parse_matrix(text: &str) -> Result<SymMatrix, MatrixError> {
    parse_lines(text.lines())
}

fn parse_lines<'a>(lines: impl Iterator<Item = &'a str>) -> Result<SymMatrix, MatrixError> {
    let mut body = lines
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (_, header) = body
        .next()
        .ok_or_else(|| MatrixError::MalformedHeader("empty input".into()))?;
    let (dim, nnz) = parse_header(header)?;

    let mut entries = Vec::with_capacity(nnz.min(MAX_PREALLOC));
    for (line, text) in body {
        if entries.len() == nnz {
            return Err(MatrixError::MalformedHeader(format!(
                "header declares {nnz} entries but line {line} holds another"
            )));
        }
        entries.push(parse_entry(line, text, dim)?);
    }
    if entries.len() != nnz {
        return Err(MatrixError::MalformedHeader(format!(
            "header declares {nnz} entries but the file holds {}",
            entries.len()
        )));
    }

    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&k| (entries[k].1.row, entries[k].1.col, entries[k].0));
    for w in order.windows(2) {
        let (_, a) = entries[w[0]];
        let (line, b) = entries[w[1]];
        if a.row == b.row && a.col == b.col {
            return Err(MatrixError::DuplicateEntry {
                line,
                row: b.row + 1,
                col: b.col + 1,
            });
        }
    }
    let sorted: Vec<Entry> = order.into_iter().map(|k| entries[k].1).collect();

    let full = dim.checked_add(1).and_then(|d| {
        if dim % 2 == 0 {
            (dim / 2).checked_mul(d)
        } else {
            dim.checked_mul(d / 2)
        }
    });
    if full == Some(nnz) {
        let mut packed = Vec::with_capacity(nnz);
        packed.extend(sorted.iter().map(|e| e.value));
        return SymMatrix::from_packed_lower(dim, packed);
    }
    let sparse: Vec<Entry> = sorted.into_iter().filter(|e| e.value != 0.0).collect();
    let m = SymMatrix::from_sorted_entries(dim, sparse);
    debug_assert!(matches!(m.storage(), Storage::Sparse(_)));
    Ok(m)
}

fn parse_header(header: &str) -> Result<(usize, usize), MatrixError> {
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(MatrixError::MalformedHeader(format!(
            "first line must start with {MAGIC}"
        )));
    }
    let mut number = |what: &str| -> Result<usize, MatrixError> {
        tokens
            .next()
            .ok_or_else(|| MatrixError::MalformedHeader(format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|e| MatrixError::MalformedHeader(format!("bad {what}: {e}")))
    };
    let dim = number("dimension")?;
    let nnz = number("entry count")?;
    if tokens.next().is_some() {
        return Err(MatrixError::MalformedHeader(
            "trailing tokens in header".into(),
        ));
    }
    if dim < 2 {
        return Err(MatrixError::MalformedHeader(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    Ok((dim, nnz))
}

fn parse_entry(line: usize, text: &str, dim: usize) -> Result<(usize, Entry), MatrixError> {
    let malformed = |reason: String| MatrixError::MalformedEntry { line, reason };
    let mut tokens = text.split_whitespace();
    let mut index = |what: &str| -> Result<usize, MatrixError> {
        tokens
            .next()
            .ok_or_else(|| malformed(format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|e| malformed(format!("bad {what}: {e}")))
    };
    let i = index("row")?;
    let j = index("column")?;
    let v = tokens
        .next()
        .ok_or_else(|| malformed("missing value".into()))?
        .parse::<f64>()
        .map_err(|e| malformed(format!("bad value: {e}")))?;
    if tokens.next().is_some() {
        return Err(malformed("trailing tokens".into()));
    }
    if !v.is_finite() {
        return Err(malformed(format!("non-finite value {v}")));
    }
    if i == 0 || j == 0 || i > dim || j > dim || i < j {
        return Err(MatrixError::IndexOutOfRange {
            line,
            row: i,
            col: j,
            dim,
        });
    }
    Ok((
        line,
        Entry {
            row: i - 1,
            col: j - 1,
            value: v,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{generate, EnsembleSpec};
    use proptest::prelude::*;

    fn roundtrip(m: &SymMatrix) -> SymMatrix {
        let mut buf = Vec::new();
        write_matrix(m, &mut buf).unwrap();
        read_matrix(buf.as_slice()).unwrap()
    }

    #[test]
    fn two_by_two_roundtrip() {
        let m = SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "%%symcoord 2 3\n1 1 0.0000000000000000e0\n2 1 -1.0000000000000000e0\n2 2 0.0000000000000000e0\n"
        );
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }

    #[test]
    fn sparse_roundtrip_is_bitwise() {
        let m = generate(&EnsembleSpec::gaussian(100, 17).with_density(0.1)).unwrap();
        assert!(m.is_sparse());
        assert_eq!(roundtrip(&m), m);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# made by hand\n\n%%symcoord 3 2\n# body\n2 1 -1.5\n3 2 -2e0\n";
        let m = parse_matrix(text).unwrap();
        assert!(m.is_sparse());
        assert_eq!(m.get(0, 1), -1.5);
        assert_eq!(m.get(1, 2), -2.0);
        assert_eq!(m.get(2, 2), 0.0);
    }

    #[test]
    fn short_file_is_malformed_header() {
        let text = "%%symcoord 3 3\n2 1 -1\n3 1 -1\n";
        assert!(matches!(
            parse_matrix(text),
            Err(MatrixError::MalformedHeader(_))
        ));
        let long = "%%symcoord 3 1\n2 1 -1\n3 1 -1\n";
        assert!(matches!(
            parse_matrix(long),
            Err(MatrixError::MalformedHeader(_))
        ));
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            parse_matrix(""),
            Err(MatrixError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse_matrix("%%MatrixMarket 2 1\n"),
            Err(MatrixError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 1 0\n"),
            Err(MatrixError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 2 1\n3 1 -1\n"),
            Err(MatrixError::IndexOutOfRange { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 2 1\n1 2 -1\n"),
            Err(MatrixError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 2 1\n0 0 -1\n"),
            Err(MatrixError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 3 2\n2 1 -1\n2 1 -2\n"),
            Err(MatrixError::DuplicateEntry {
                line: 3,
                row: 2,
                col: 1
            })
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 2 1\n2 1 abc\n"),
            Err(MatrixError::MalformedEntry { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix("%%symcoord 2 1\n2 1 inf\n"),
            Err(MatrixError::MalformedEntry { .. })
        ));
    }

    #[test]
    fn huge_header_does_not_allocate() {
        let text = format!("%%symcoord {} {}\n2 1 -1\n", usize::MAX, usize::MAX);
        assert!(matches!(
            parse_matrix(&text),
            Err(MatrixError::MalformedHeader(_))
        ));
    }

    #[test]
    fn huge_dimension_stays_sparse() {
        let text = format!("%%symcoord {} 1\n1 1 1\n", usize::MAX);
        let m = parse_matrix(&text).unwrap();
        assert_eq!(m.dim(), usize::MAX);
        assert!(m.is_sparse());
    }

    proptest! {
        #[test]
        fn roundtrip_preserves_values(
            dim in 2usize..12,
            seed in any::<u64>(),
            density in 0.3f64..=1.0,
        ) {
            let spec = EnsembleSpec::gaussian(dim, seed).with_density(density);
            if let Ok(m) = generate(&spec) {
                prop_assert_eq!(roundtrip(&m), m.clone());
                prop_assert!(roundtrip(&m.to_sparse()).same_values(&m));
            }
        }
    }
}
