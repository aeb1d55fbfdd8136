//! Matrix Market reader and writer.
//!
//! Matrices are written as `array complex general` with one `re im` pair per
//! line in column-major order, 17 significant digits each, so a write/read
//! cycle reproduces every entry bit for bit. The reader also accepts
//! `coordinate` storage, `real`/`integer` fields and the symmetric,
//! skew-symmetric and Hermitian qualifiers.

use std::fmt::Write as _;
use std::path::Path;

use structdiag_core::{Complex64, ComplexMatrix};

pub const HEADER: &str = "%%MatrixMarket matrix array complex general";

#[derive(Debug, thiserror::Error)]
pub enum MtxError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{message} (line {line})")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> MtxError {
    MtxError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Storage {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

impl Symmetry {
    /// Entry implied at `(j, i)` by a stored `(i, j)`.
    fn mirror(self, z: Complex64) -> Option<Complex64> {
        match self {
            Symmetry::General => None,
            Symmetry::Symmetric => Some(z),
            Symmetry::SkewSymmetric => Some(-z),
            Symmetry::Hermitian => Some(z.conj()),
        }
    }
}

fn parse_header(line: &str) -> Result<(Storage, Field, Symmetry), MtxError> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix <storage> <field> <symmetry>'"));
    }
    let storage = match words[2].as_str() {
        "array" => Storage::Array,
        "coordinate" => Storage::Coordinate,
        other => return Err(parse_err(1, format!("unsupported storage '{other}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(parse_err(1, "hermitian symmetry needs a complex field"));
    }
    Ok((storage, field, symmetry))
}

fn parse_number<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, MtxError> {
    token.parse().map_err(|_| parse_err(line, format!("cannot parse '{token}'")))
}

fn parse_value(tokens: &[&str], field: Field, line: usize) -> Result<Complex64, MtxError> {
    let z = match (field, tokens) {
        (Field::Real, [re]) => Complex64::new(parse_number(re, line)?, 0.0),
        (Field::Complex, [re, im]) => Complex64::new(parse_number(re, line)?, parse_number(im, line)?),
        _ => return Err(parse_err(line, format!("wrong number of values: {}", tokens.join(" ")))),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(parse_err(line, "entries must be finite"));
    }
    Ok(z)
}

/// Parses Matrix Market text.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, MtxError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (storage, field, symmetry) = parse_header(header)?;
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let (size_line, size) = body.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| parse_number(t, size_line))
        .collect::<Result<_, _>>()?;
    let (rows, cols, stored) = match (storage, dims.as_slice()) {
        (Storage::Array, [r, c]) => (*r, *c, None),
        (Storage::Coordinate, [r, c, nnz]) => (*r, *c, Some(*nnz)),
        _ => return Err(parse_err(size_line, "malformed size line")),
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(size_line, "symmetric storage needs a square matrix"));
    }

    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut put = |i: usize, j: usize, z: Complex64| {
        m[(i, j)] = z;
        if i != j {
            if let Some(w) = symmetry.mirror(z) {
                m[(j, i)] = w;
            }
        }
    };

    let mut count = 0;
    match stored {
        None => {
            // column-major, lower triangle only for the symmetric variants
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .filter(|&(i, j)| match symmetry {
                    Symmetry::General => true,
                    Symmetry::SkewSymmetric => i > j,
                    _ => i >= j,
                })
                .collect();
            for (line, content) in body.by_ref() {
                let tokens: Vec<&str> = content.split_whitespace().collect();
                let &(i, j) = positions
                    .get(count)
                    .ok_or_else(|| parse_err(line, "more values than the size line declares"))?;
                put(i, j, parse_value(&tokens, field, line)?);
                count += 1;
            }
            if count != positions.len() {
                return Err(parse_err(size_line, format!("expected {} values, found {count}", positions.len())));
            }
        }
        Some(nnz) => {
            for (line, content) in body.by_ref() {
                let tokens: Vec<&str> = content.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(parse_err(line, "missing indices"));
                }
                let i: usize = parse_number(tokens[0], line)?;
                let j: usize = parse_number(tokens[1], line)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(line, format!("index ({i}, {j}) out of range")));
                }
                put(i - 1, j - 1, parse_value(&tokens[2..], field, line)?);
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(size_line, format!("expected {nnz} entries, found {count}")));
            }
        }
    }
    Ok(m)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, MtxError> {
    let text = std::fs::read_to_string(path).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(&text)
}

/// Formats `m` as `array complex general`.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::with_capacity(48 * m.nrows() * m.ncols() + 64);
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
        }
    }
    out
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<(), MtxError> {
    std::fs::write(path, format_matrix(m)).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })
}
