//! Instance text formats.
//!
//! NATIVE (`.btsp`):
//!
//! ```text
//! BTSP 1
//! NAME fixture-b
//! N 3
//! BETA 3/2
//! 1
//! 3 1
//! ```
//!
//! After the header come `n - 1` rows of the strictly lower triangle; row `i`
//! holds `w(i,0) .. w(i,i-1)`. `#` starts a comment. The writer always emits
//! reduced rationals so that `parse ∘ write` is the identity.
//!
//! TSPLIB: the `EXPLICIT` weight type with `FULL_MATRIX` or `LOWER_DIAG_ROW`,
//! and `EUC_2D` (distances rounded to the nearest integer).

use std::fmt::Write as _;

use num_traits::Zero;

use super::Instance;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Native,
    Tsplib,
}

impl Format {
    /// Guesses the format from a file extension (`.tsp` is TSPLIB, anything
    /// else NATIVE).
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsp") => Format::Tsplib,
            _ => Format::Native,
        }
    }
}

pub fn parse_instance(text: &[u8], format: Format) -> Result<Instance> {
    let text = std::str::from_utf8(text).map_err(|e| {
        Error::parse(1, 1, format!("input is not valid UTF-8: {e}"))
    })?;
    match format {
        Format::Native => parse_native(text),
        Format::Tsplib => parse_tsplib(text),
    }
}

pub fn write_native(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("BTSP 1\n");
    let _ = writeln!(out, "NAME {}", inst.name());
    let _ = writeln!(out, "N {}", inst.n());
    if let Some(b) = inst.declared_beta() {
        let _ = writeln!(out, "BETA {}", format_rational(b));
    }
    for i in 1..inst.n() {
        let row: Vec<String> = (0..i).map(|j| format_rational(inst.weight(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// A whitespace-separated token with its 1-based line and column.
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens_of_line(line: &str, lineno: usize) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &content[s..i],
                    line: lineno,
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &content[s..],
            line: lineno,
            column: s + 1,
        });
    }
    out
}

fn parse_native(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| tokens_of_line(l, i + 1))
        .filter(|t| !t.is_empty());
    let last_line = text.lines().count().max(1);

    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, 1, "missing header line `BTSP 1`"))?;
    if header.len() != 2 || header[0].text != "BTSP" || header[1].text != "1" {
        return Err(Error::parse(header[0].line, header[0].column, "expected header `BTSP 1`"));
    }

    let mut name: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut beta: Option<Rational> = None;
    let mut rows: Vec<Vec<Rational>> = Vec::new();

    for toks in lines.by_ref() {
        let key = &toks[0];
        match key.text {
            "NAME" if rows.is_empty() => {
                if toks.len() < 2 {
                    return Err(Error::parse(key.line, key.column, "NAME needs a value"));
                }
                let rest: Vec<&str> = toks[1..].iter().map(|t| t.text).collect();
                name = Some(rest.join(" "));
            }
            "N" if rows.is_empty() => {
                let v = toks.get(1).ok_or_else(|| Error::parse(key.line, key.column, "N needs a value"))?;
                let parsed: usize = v
                    .text
                    .parse()
                    .map_err(|_| Error::parse(v.line, v.column, format!("invalid vertex count `{}`", v.text)))?;
                if parsed < 3 {
                    return Err(Error::parse(v.line, v.column, format!("vertex count must be >= 3, got {parsed}")));
                }
                n = Some(parsed);
            }
            "BETA" if rows.is_empty() => {
                let v = toks.get(1).ok_or_else(|| Error::parse(key.line, key.column, "BETA needs a value"))?;
                beta = Some(
                    parse_rational(v.text)
                        .ok_or_else(|| Error::parse(v.line, v.column, format!("invalid rational `{}`", v.text)))?,
                );
            }
            _ => {
                let n = n.ok_or_else(|| Error::parse(key.line, key.column, "weight rows before the `N` line"))?;
                let expected = rows.len() + 1;
                if expected >= n {
                    return Err(Error::parse(key.line, key.column, format!("unexpected extra row; all {} weight rows already read", n - 1)));
                }
                if toks.len() != expected {
                    let at = toks.get(expected).unwrap_or(&toks[toks.len() - 1]);
                    return Err(Error::parse(
                        at.line,
                        at.column,
                        format!("weight row {expected} must have {expected} entries, found {}", toks.len()),
                    ));
                }
                let mut row = Vec::with_capacity(expected);
                for t in &toks {
                    row.push(
                        parse_rational(t.text)
                            .ok_or_else(|| Error::parse(t.line, t.column, format!("invalid rational `{}`", t.text)))?,
                    );
                }
                rows.push(row);
            }
        }
    }

    let name = name.ok_or_else(|| Error::parse(last_line, 1, "missing NAME line"))?;
    let n = n.ok_or_else(|| Error::parse(last_line, 1, "missing N line"))?;
    if rows.len() + 1 < n {
        return Err(Error::parse(
            last_line + 1,
            1,
            format!("truncated weight section: missing weight row {} of {}", rows.len() + 1, n - 1),
        ));
    }
    let inst = Instance::from_fn(name, n, |u, v| rows[v - 1][u].clone())?;
    match beta {
        Some(b) => inst.with_declared_beta(b),
        None => Ok(inst),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WeightKind {
    FullMatrix,
    LowerDiagRow,
    Euc2d,
}

fn parse_tsplib(text: &str) -> Result<Instance> {
    let mut name = String::from("tsplib");
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut weight_format: Option<String> = None;
    let mut weight_tokens: Option<Vec<Token<'_>>> = None;
    let mut coord_tokens: Option<Vec<Token<'_>>> = None;
    let last_line = text.lines().count().max(1);

    let mut lines = text.lines().enumerate().peekable();
    while let Some((i, raw)) = lines.next() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let section = match line {
            "EDGE_WEIGHT_SECTION" => Some(true),
            "NODE_COORD_SECTION" => Some(false),
            "DISPLAY_DATA_SECTION" => None,
            _ => {
                let (key, value) = match line.split_once(':') {
                    Some((k, v)) => (k.trim(), v.trim()),
                    None => {
                        let mut it = line.splitn(2, char::is_whitespace);
                        (it.next().unwrap_or("").trim(), it.next().unwrap_or("").trim())
                    }
                };
                match key {
                    "NAME" => name = value.to_string(),
                    "TYPE" => {
                        if value != "TSP" {
                            return Err(Error::parse(lineno, 1, format!("unsupported TYPE `{value}` (only TSP)")));
                        }
                    }
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| {
                            Error::parse(lineno, raw.find(value).unwrap_or(0) + 1, format!("invalid DIMENSION `{value}`"))
                        })?)
                    }
                    "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_string()),
                    "EDGE_WEIGHT_FORMAT" => weight_format = Some(value.to_string()),
                    "COMMENT" | "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
                    _ => {
                        return Err(Error::parse(lineno, 1, format!("unknown keyword `{key}`")));
                    }
                }
                continue;
            }
        };
        // Section body: numeric lines until the next keyword or EOF.
        let mut body = Vec::new();
        while let Some((j, next)) = lines.peek() {
            let t = next.trim();
            let starts_numeric = t
                .chars()
                .next()
                .map(|c| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
                .unwrap_or(true);
            if !starts_numeric {
                break;
            }
            body.extend(tokens_of_line(next, j + 1));
            lines.next();
        }
        match section {
            Some(true) => weight_tokens = Some(body),
            Some(false) => coord_tokens = Some(body),
            None => {}
        }
    }

    let n = dimension.ok_or_else(|| Error::parse(last_line, 1, "missing DIMENSION"))?;
    if n < 3 {
        return Err(Error::parse(last_line, 1, format!("DIMENSION must be >= 3, got {n}")));
    }
    let kind = match weight_type.as_deref() {
        Some("EXPLICIT") => match weight_format.as_deref() {
            Some("FULL_MATRIX") => WeightKind::FullMatrix,
            Some("LOWER_DIAG_ROW") => WeightKind::LowerDiagRow,
            Some(other) => {
                return Err(Error::parse(last_line, 1, format!("unsupported EDGE_WEIGHT_FORMAT `{other}`")))
            }
            None => return Err(Error::parse(last_line, 1, "missing EDGE_WEIGHT_FORMAT")),
        },
        Some("EUC_2D") => WeightKind::Euc2d,
        Some(other) => {
            return Err(Error::parse(last_line, 1, format!("unsupported EDGE_WEIGHT_TYPE `{other}`")))
        }
        None => return Err(Error::parse(last_line, 1, "missing EDGE_WEIGHT_TYPE")),
    };

    let inst = match kind {
        WeightKind::FullMatrix | WeightKind::LowerDiagRow => {
            let toks = weight_tokens
                .ok_or_else(|| Error::parse(last_line, 1, "missing EDGE_WEIGHT_SECTION"))?;
            let expected = if kind == WeightKind::FullMatrix { n * n } else { n * (n + 1) / 2 };
            if toks.len() < expected {
                return Err(Error::parse(
                    last_line + 1,
                    1,
                    format!("truncated EDGE_WEIGHT_SECTION: {} of {expected} values", toks.len()),
                ));
            }
            if toks.len() > expected {
                let t = &toks[expected];
                return Err(Error::parse(t.line, t.column, format!("EDGE_WEIGHT_SECTION has more than {expected} values")));
            }
            let mut values = Vec::with_capacity(expected);
            for t in &toks {
                values.push(
                    parse_rational(t.text)
                        .ok_or_else(|| Error::parse(t.line, t.column, format!("invalid number `{}`", t.text)))?,
                );
            }
            let mut matrix = vec![vec![Rational::zero(); n]; n];
            if kind == WeightKind::FullMatrix {
                for u in 0..n {
                    for v in 0..n {
                        if u != v {
                            matrix[u][v] = values[u * n + v].clone();
                        }
                    }
                }
                for u in 0..n {
                    for v in (u + 1)..n {
                        if matrix[u][v] != matrix[v][u] {
                            let t = &toks[v * n + u];
                            return Err(Error::parse(
                                t.line,
                                t.column,
                                format!("asymmetric matrix: entry ({v},{u}) differs from ({u},{v})"),
                            ));
                        }
                    }
                }
            } else {
                let mut k = 0;
                for u in 0..n {
                    for v in 0..=u {
                        if u != v {
                            matrix[u][v] = values[k].clone();
                            matrix[v][u] = values[k].clone();
                        }
                        k += 1;
                    }
                }
            }
            Instance::from_matrix(name, matrix)?
        }
        WeightKind::Euc2d => {
            let toks = coord_tokens
                .ok_or_else(|| Error::parse(last_line, 1, "missing NODE_COORD_SECTION"))?;
            if toks.len() < 3 * n {
                return Err(Error::parse(
                    last_line + 1,
                    1,
                    format!("truncated NODE_COORD_SECTION: {} of {} coordinate lines", toks.len() / 3, n),
                ));
            }
            let mut coords = Vec::with_capacity(n);
            for chunk in toks.chunks(3).take(n) {
                let parse = |t: &Token<'_>| -> Result<f64> {
                    t.text
                        .parse::<f64>()
                        .map_err(|_| Error::parse(t.line, t.column, format!("invalid coordinate `{}`", t.text)))
                };
                coords.push((parse(&chunk[1])?, parse(&chunk[2])?));
            }
            Instance::from_fn(name, n, |u, v| {
                let dx = coords[u].0 - coords[v].0;
                let dy = coords[u].1 - coords[v].1;
                // TSPLIB nint
                int(((dx * dx + dy * dy).sqrt() + 0.5).floor() as i64)
            })?
        }
    };
    Ok(inst)
}
