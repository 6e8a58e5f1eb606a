//! CSV output and input for the experiment runner.
//!
//! Every file starts with a `schema_version,<n>` row, then the header.

use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros removed,
/// scientific notation outside [1e-4, 1e9).
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa.to_string()), exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Row-oriented writer; values are written verbatim.
pub struct CsvWriter {
    out: String,
    width: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut out = format!("schema_version,{SCHEMA_VERSION}\n");
        out.push_str(&header.join(","));
        out.push('\n');
        CsvWriter {
            out,
            width: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "row width does not match header");
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Parsed CSV with 1-based source line numbers kept per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let (n, first) = lines.next().ok_or_else(|| csv_err(1, "empty input"))?;
        match first.split_once(',') {
            Some(("schema_version", v)) if v.trim() == SCHEMA_VERSION.to_string() => {}
            Some(("schema_version", v)) => return Err(csv_err(n, format!("unsupported schema_version {v}"))),
            _ => return Err(csv_err(n, "first row must be schema_version")),
        }
        let (_, head) = lines.next().ok_or_else(|| csv_err(2, "missing header row"))?;
        let header: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if fields.len() != header.len() {
                return Err(csv_err(n, format!("expected {} fields, found {}", header.len(), fields.len())));
            }
            rows.push((n, fields));
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| csv_err(2, format!("missing column '{name}'")))
    }
}

pub(crate) fn csv_err(line: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        line,
        message: message.into(),
    }
}
