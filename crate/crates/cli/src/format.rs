//! CSV output: a schema comment line, a fixed header, `%.12g`-style floats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::CliResult;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with 12 significant digits, fixed or scientific like C's `%.12g`.
pub fn fmt_float(x: f64) -> String {
    fmt_sig(x, SIGNIFICANT_DIGITS)
}

/// `%.{digits}g`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// A table written as `# schema: kcore-lab.<name>.v1`, a header, then rows.
#[derive(Debug, Clone)]
pub struct Table {
    schema: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self {
            schema: format!("kcore-lab.{name}.v1"),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> CliResult<()> {
        writeln!(out, "# schema: {}", self.schema)?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_string(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_file(&self, path: &Path) -> CliResult<()> {
        let f = File::create(path)
            .map_err(|e| crate::CliError::Io(format!("{}: {e}", path.display())))?;
        let mut out = BufWriter::new(f);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }
}
