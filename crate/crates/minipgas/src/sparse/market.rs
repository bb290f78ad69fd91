//! Matrix Market (coordinate, real) reader.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::coo::{CooMatrix, Entry};

/// Read a square matrix from a Matrix Market file.
///
/// Supported: `matrix coordinate real` with `general` or `symmetric`
/// symmetry. Symmetric off-diagonal entries are expanded to both triangles.
/// Indices in the file are 1-based; malformed content yields a parse error
/// carrying the file name and line number.
pub fn read_matrix_market(path: &Path) -> Result<CooMatrix> {
    let display = path.display().to_string();
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let parse_err = |line: usize, message: String| Error::Parse {
        path: display.clone(),
        line,
        message,
    };

    // Header: %%MatrixMarket matrix coordinate real general|symmetric
    let (header_no, header) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (i + 1, line);
                }
            }
            None => return Err(parse_err(1, "empty file".into())),
        }
    };
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(parse_err(header_no, format!("bad header line: {header:?}")));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(
            header_no,
            format!("unsupported object/format: {} {}", fields[1], fields[2]),
        ));
    }
    if fields[3] != "real" {
        return Err(parse_err(
            header_no,
            format!("unsupported field type {:?} (only real)", fields[3]),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                header_no,
                format!("unsupported symmetry {other:?} (only general or symmetric)"),
            ))
        }
    };

    // Size line: rows cols nnz (comments may precede it).
    let (size_no, size_line) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                let t = line.trim();
                if !t.is_empty() && !t.starts_with('%') {
                    break (i + 1, line);
                }
            }
            None => return Err(parse_err(header_no, "missing size line".into())),
        }
    };
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(parse_err(size_no, format!("bad size line: {size_line:?}")));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| parse_err(size_no, format!("bad row count {:?}", dims[0])))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| parse_err(size_no, format!("bad column count {:?}", dims[1])))?;
    let nnz: usize = dims[2]
        .parse()
        .map_err(|_| parse_err(size_no, format!("bad entry count {:?}", dims[2])))?;
    if rows != cols {
        return Err(Error::MatrixStructure(format!(
            "matrix is {rows}x{cols}, expected square"
        )));
    }

    let mut entries = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    let mut seen = 0usize;
    let mut last_no = size_no;
    for (i, line) in lines {
        let line = line?;
        let no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        last_no = no;
        if seen == nnz {
            return Err(parse_err(no, format!("more than {nnz} entries")));
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(no, format!("expected 'row col value', got {t:?}")));
        }
        let r: usize = parts[0]
            .parse()
            .map_err(|_| parse_err(no, format!("bad row index {:?}", parts[0])))?;
        let c: usize = parts[1]
            .parse()
            .map_err(|_| parse_err(no, format!("bad column index {:?}", parts[1])))?;
        let v: f64 = parts[2]
            .parse()
            .map_err(|_| parse_err(no, format!("bad value {:?}", parts[2])))?;
        if r == 0 || c == 0 {
            return Err(parse_err(no, "indices are 1-based".into()));
        }
        entries.push(Entry {
            row: r - 1,
            col: c - 1,
            value: v,
        });
        if symmetric && r != c {
            entries.push(Entry {
                row: c - 1,
                col: r - 1,
                value: v,
            });
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_err(
            last_no,
            format!("expected {nnz} entries, found {seen}"),
        ));
    }
    CooMatrix::new(rows, entries)
}
