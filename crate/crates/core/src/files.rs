//! Plain-text formats for maps and matrices.
//!
//! Map file: a `vars x1 ... xn` header, then one `Fi = <polynomial>` line per
//! component. Matrix file: `n`, an optional exponent line `d1 ... dn`, then
//! `n` rows of rationals. Rectangular matrix file: `rows cols` header, then
//! the rows. Blank lines and `#` comments are ignored everywhere.

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::poly::Parser;
use crate::polymap::PolyMap;
use crate::power_linear::PowerLinearData;
use crate::scalar::Scalar;

/// A parsed map together with its variable names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapFile {
    pub vars: Vec<String>,
    pub map: PolyMap,
}

/// A square matrix, with exponents when the file carried them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub matrix: RatMatrix,
    pub degrees: Option<Vec<u32>>,
}

impl MatrixFile {
    pub fn power_linear(&self) -> Result<PowerLinearData> {
        let degrees = self
            .degrees
            .clone()
            .ok_or_else(|| Error::InvalidInput("matrix file has no exponent line".into()))?;
        PowerLinearData::new(self.matrix.clone(), degrees)
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Non-blank lines with comments stripped, as `(1-based line, text)`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        (!line.trim().is_empty()).then_some((i + 1, line))
    })
}

fn column_of(line: &str, part: &str) -> usize {
    part.as_ptr() as usize - line.as_ptr() as usize + 1
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_map_file(text: &str) -> Result<MapFile> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, 1, "empty map file"))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("vars") {
        return Err(syntax(hline, column_of(header, header.trim_start()), "expected `vars` header"));
    }
    let vars: Vec<String> = words.map(str::to_string).collect();
    if vars.is_empty() {
        return Err(syntax(hline, header.len() + 1, "no variables declared"));
    }
    for (k, v) in vars.iter().enumerate() {
        if !is_identifier(v) {
            return Err(syntax(hline, 1, format!("`{v}` is not a variable name")));
        }
        if vars[..k].contains(v) {
            return Err(syntax(hline, 1, format!("variable `{v}` declared twice")));
        }
    }
    let n = vars.len();
    let mut comps = vec![None; n];
    for (ln, line) in lines {
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| syntax(ln, 1, "expected `Fi = <polynomial>`"))?;
        let name = lhs.trim();
        let index = name
            .strip_prefix('F')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| (1..=n).contains(&i))
            .ok_or_else(|| syntax(ln, column_of(line, lhs.trim_start()), format!("expected F1..F{n}, found `{name}`")))?;
        if comps[index - 1].is_some() {
            return Err(syntax(ln, 1, format!("component {name} given twice")));
        }
        let poly = Parser::new(rhs, &vars).with_origin(ln, column_of(line, rhs)).parse()?;
        comps[index - 1] = Some(poly);
    }
    let comps = comps
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::InvalidInput(format!("component F{} is missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(MapFile {
        vars,
        map: PolyMap::new(comps)?,
    })
}

pub fn render_map_file(vars: &[String], map: &PolyMap) -> String {
    let mut out = format!("vars {}\n", vars.join(" "));
    for (i, p) in map.render(vars).iter().enumerate() {
        out.push_str(&format!("F{} = {}\n", i + 1, p));
    }
    out
}

fn parse_row(ln: usize, line: &str, width: usize) -> Result<Vec<Scalar>> {
    let row = line
        .split_whitespace()
        .map(|w| w.parse::<Scalar>().map_err(|e| syntax(ln, column_of(line, w), e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != width {
        return Err(syntax(ln, 1, format!("expected {width} entries, found {}", row.len())));
    }
    Ok(row)
}

fn parse_counts(ln: usize, line: &str, count: usize) -> Result<Vec<usize>> {
    let values = line
        .split_whitespace()
        .map(|w| w.parse::<usize>().map_err(|_| syntax(ln, column_of(line, w), format!("`{w}` is not a size"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != count {
        return Err(syntax(ln, 1, format!("expected {count} size(s)")));
    }
    Ok(values)
}

/// Square matrix file; the exponent line is present exactly when the file
/// has `n + 2` content lines.
pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let (hl, header) = *lines.first().ok_or_else(|| syntax(1, 1, "empty matrix file"))?;
    let n = parse_counts(hl, header, 1)?[0];
    if n == 0 {
        return Err(syntax(hl, 1, "dimension must be positive"));
    }
    let body = &lines[1..];
    let (degrees, rows) = if body.len() == n + 1 {
        let (dl, dline) = body[0];
        let degrees = dline
            .split_whitespace()
            .map(|w| w.parse::<u32>().map_err(|_| syntax(dl, column_of(dline, w), format!("`{w}` is not an exponent"))))
            .collect::<Result<Vec<_>>>()?;
        if degrees.len() != n {
            return Err(syntax(dl, 1, format!("expected {n} exponents, found {}", degrees.len())));
        }
        (Some(degrees), &body[1..])
    } else if body.len() == n {
        (None, body)
    } else {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} rows (plus an optional exponent line), found {} lines",
            body.len()
        )));
    };
    let rows = rows
        .iter()
        .map(|&(ln, line)| parse_row(ln, line, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixFile {
        matrix: RatMatrix::from_rows(rows)?,
        degrees,
    })
}

/// Rectangular matrix with a `rows cols` header.
pub fn parse_rect_matrix(text: &str) -> Result<RatMatrix> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let (hl, header) = *lines.first().ok_or_else(|| syntax(1, 1, "empty matrix file"))?;
    let dims = parse_counts(hl, header, 2)?;
    let (r, c) = (dims[0], dims[1]);
    if lines.len() - 1 != r {
        return Err(Error::DimensionMismatch(format!(
            "expected {r} rows, found {}",
            lines.len() - 1
        )));
    }
    let rows = lines[1..]
        .iter()
        .map(|&(ln, line)| parse_row(ln, line, c))
        .collect::<Result<Vec<_>>>()?;
    if r == 0 {
        return Ok(RatMatrix::zeros(0, c));
    }
    RatMatrix::from_rows(rows)
}

pub fn render_rect_matrix(m: &RatMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for row in m.to_strings() {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
