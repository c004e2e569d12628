//! Plain-text operator and instance files.
//!
//! Operator file:
//!
//! ```text
//! n rank_tol          # rank_tol may be `auto`
//! a11 a12 ... a1n
//! ...
//! an1 an2 ... ann
//! ```
//!
//! MatrixMarket `array` and `coordinate` files with `real` entries and
//! `symmetric` (or `general`) symmetry are accepted wherever an operator
//! file is.
//!
//! Instance file: either an inline operator block or a line
//! `operator: <path>` (relative to the instance file), followed by a line
//! `b: b1 b2 ... bn`. Lines starting with `#` and blank lines are ignored
//! outside the matrix block.
//!
//! Reals are written with 17 significant digits so that a save/load round
//! trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::lcp::{LcpError, LcpInstance};
use crate::operator::{OperatorError, SymOperator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Lcp(#[from] LcpError),
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Space-separated [`fmt_real`] values.
pub fn fmt_vector(v: &DVector<f64>) -> String {
    v.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(" ")
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

fn parse_real(tok: &Token, line: usize) -> Result<f64, ParseError> {
    tok.text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
        ParseError::new(
            line,
            tok.column,
            format!("expected a finite real, found `{}`", tok.text),
        )
    })
}

fn parse_usize(tok: &Token, line: usize) -> Result<usize, ParseError> {
    tok.text.parse::<usize>().map_err(|_| {
        ParseError::new(
            line,
            tok.column,
            format!("expected a nonnegative integer, found `{}`", tok.text),
        )
    })
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Line cursor with 1-based line numbers.
struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let l = self.lines[self.pos];
            self.pos += 1;
            if !is_skippable(l) {
                return Some((self.pos, l));
            }
        }
        None
    }

    fn next_raw(&mut self) -> Option<(usize, &'a str)> {
        let l = *self.lines.get(self.pos)?;
        self.pos += 1;
        Some((self.pos, l))
    }

    fn last_line(&self) -> usize {
        self.lines.len().max(1)
    }
}

fn parse_native_block(lines: &mut Lines) -> Result<(DMatrix<f64>, Option<f64>), ParseError> {
    let (ln, header) = lines
        .next_content()
        .ok_or_else(|| ParseError::new(1, 1, "missing header `n rank_tol`"))?;
    let toks = tokens(header);
    if toks.len() != 2 {
        return Err(ParseError::new(ln, 1, "header must be `n rank_tol`"));
    }
    let n = parse_usize(&toks[0], ln)?;
    if n == 0 {
        return Err(ParseError::new(ln, toks[0].column, "dimension must be positive"));
    }
    let rank_tol = match toks[1].text {
        "auto" => None,
        _ => {
            let v = parse_real(&toks[1], ln)?;
            if v < 0.0 {
                return Err(ParseError::new(ln, toks[1].column, "rank_tol must be nonnegative"));
            }
            Some(v)
        }
    };
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let (ln, row) = lines
            .next_raw()
            .ok_or_else(|| ParseError::new(lines.last_line(), 1, format!("expected {n} matrix rows, found {i}")))?;
        let toks = tokens(row);
        if toks.len() != n {
            return Err(ParseError::new(
                ln,
                1,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for (j, tok) in toks.iter().enumerate() {
            m[(i, j)] = parse_real(tok, ln)?;
        }
    }
    Ok((m, rank_tol))
}

/// Parses a MatrixMarket `array` or `coordinate` real matrix.
pub fn parse_matrix_market(text: &str) -> Result<DMatrix<f64>, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, 1, "empty MatrixMarket file"))?;
    let fields: Vec<String> = banner.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(ParseError::new(
            1,
            1,
            "expected `%%MatrixMarket matrix <format> real <symmetry>`",
        ));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(ParseError::new(1, 1, format!("unsupported format `{other}`"))),
    };
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(ParseError::new(1, 1, format!("unsupported field `{}`", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(ParseError::new(1, 1, format!("unsupported symmetry `{other}`"))),
    };
    let mut content = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (ln, size) = content
        .next()
        .ok_or_else(|| ParseError::new(2, 1, "missing size line"))?;
    let toks = tokens(size);
    let expected = if coordinate { 3 } else { 2 };
    if toks.len() != expected {
        return Err(ParseError::new(
            ln,
            1,
            format!("size line must have {expected} integers"),
        ));
    }
    let rows = parse_usize(&toks[0], ln)?;
    let cols = parse_usize(&toks[1], ln)?;
    if rows != cols || rows == 0 {
        return Err(ParseError::new(
            ln,
            1,
            format!("matrix must be square and nonempty, got {rows}x{cols}"),
        ));
    }
    let n = rows;
    let mut m = DMatrix::zeros(n, n);
    if coordinate {
        let nnz = parse_usize(&toks[2], ln)?;
        for k in 0..nnz {
            let (ln, entry) = content
                .next()
                .ok_or_else(|| ParseError::new(ln, 1, format!("expected {nnz} entries, found {k}")))?;
            let toks = tokens(entry);
            if toks.len() != 3 {
                return Err(ParseError::new(ln, 1, "entry must be `i j value`"));
            }
            let i = parse_usize(&toks[0], ln)?;
            let j = parse_usize(&toks[1], ln)?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(ParseError::new(
                    ln,
                    toks[0].column,
                    format!("index ({i}, {j}) out of range"),
                ));
            }
            let v = parse_real(&toks[2], ln)?;
            m[(i - 1, j - 1)] = v;
            if symmetric {
                m[(j - 1, i - 1)] = v;
            }
        }
    } else {
        // column-major; lower triangle only when symmetric
        let mut slots = Vec::new();
        for j in 0..n {
            let start = if symmetric { j } else { 0 };
            for i in start..n {
                slots.push((i, j));
            }
        }
        let mut values = Vec::with_capacity(slots.len());
        let mut last = ln;
        while values.len() < slots.len() {
            let Some((ln, entry)) = content.next() else {
                return Err(ParseError::new(
                    last,
                    1,
                    format!("expected {} values, found {}", slots.len(), values.len()),
                ));
            };
            last = ln;
            for tok in tokens(entry) {
                values.push(parse_real(&tok, ln)?);
            }
        }
        for (&(i, j), v) in slots.iter().zip(values) {
            m[(i, j)] = v;
            if symmetric {
                m[(j, i)] = v;
            }
        }
    }
    Ok(m)
}

fn is_matrix_market(text: &str) -> bool {
    text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket")
}

/// Parses an operator in the native format or MatrixMarket.
pub fn parse_operator(text: &str) -> Result<SymOperator, IoError> {
    let (m, tol) = if is_matrix_market(text) {
        (parse_matrix_market(text)?, None)
    } else {
        parse_native_block(&mut Lines::new(text))?
    };
    Ok(SymOperator::new(m, tol)?)
}

pub fn write_operator(op: &SymOperator) -> String {
    let n = op.dim();
    let mut out = format!("{n} {}\n", fmt_real(op.rank_tol()));
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_real(op.matrix()[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses an instance; `base_dir` resolves `operator:` references.
pub fn parse_instance(text: &str, base_dir: Option<&Path>) -> Result<LcpInstance, IoError> {
    let mut lines = Lines::new(text);
    let save = lines.pos;
    let op = match lines.next_content() {
        Some((_, l)) if l.trim_start().starts_with("operator:") => {
            let rel = l.trim_start()["operator:".len()..].trim();
            let path = match base_dir {
                Some(d) => d.join(rel),
                None => PathBuf::from(rel),
            };
            load_operator(&path)?
        }
        _ => {
            lines.pos = save;
            let (m, tol) = parse_native_block(&mut lines)?;
            SymOperator::new(m, tol)?
        }
    };
    let (ln, bline) = lines
        .next_content()
        .ok_or_else(|| ParseError::new(lines.last_line(), 1, "missing `b:` line"))?;
    let trimmed = bline.trim_start();
    let offset = bline.len() - trimmed.len();
    let Some(rest) = trimmed.strip_prefix("b:") else {
        return Err(ParseError::new(ln, offset + 1, "expected `b:` line").into());
    };
    let shift = offset + 2;
    let mut b = Vec::new();
    for tok in tokens(rest) {
        let tok = Token {
            text: tok.text,
            column: tok.column + shift,
        };
        b.push(parse_real(&tok, ln)?);
    }
    if b.len() != op.dim() {
        return Err(LcpError::DimensionMismatch {
            dim: op.dim(),
            b_len: b.len(),
        }
        .into());
    }
    Ok(LcpInstance::new(op, DVector::from_vec(b))?)
}

pub fn write_instance(inst: &LcpInstance) -> String {
    let mut out = write_operator(inst.operator());
    let _ = writeln!(out, "b: {}", fmt_vector(inst.b()));
    out
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn attach_path(path: &Path, err: IoError) -> IoError {
    match err {
        IoError::Syntax(source) => IoError::Parse {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    }
}

pub fn load_operator(path: &Path) -> Result<SymOperator, IoError> {
    parse_operator(&read(path)?).map_err(|e| attach_path(path, e))
}

pub fn save_operator(path: &Path, op: &SymOperator) -> Result<(), IoError> {
    write(path, &write_operator(op))
}

pub fn load_instance(path: &Path) -> Result<LcpInstance, IoError> {
    let text = read(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    parse_instance(&text, path.parent())
        .map(|i| i.with_label(label))
        .map_err(|e| attach_path(path, e))
}

pub fn save_instance(path: &Path, inst: &LcpInstance) -> Result<(), IoError> {
    write(path, &write_instance(inst))
}

/// Writes any text report (certificate, solution, summary) to `path`.
pub fn save_report(path: &Path, report: &impl crate::report::TextReport) -> Result<(), IoError> {
    write(path, &report.to_text())
}
