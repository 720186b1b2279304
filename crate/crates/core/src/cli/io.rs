//! Sample files and CSV output.
//!
//! Sample files are UTF-8 CSV with one observation per row and `d` numeric
//! columns. A first row that does not parse as numbers is taken as a header.
//! Output reals use 17 significant digits and LF line endings.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::{Mode, Sample};

fn read_rows(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    reader
        .records()
        .map(|r| r.map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display()))))
        .collect()
}

fn parse_row<T: std::str::FromStr>(row: &csv::StringRecord) -> Option<Vec<T>> {
    row.iter().map(|c| c.parse().ok()).collect()
}

/// Reads a sample file in the given mode. Discrete mode requires integer cells.
pub fn read_sample(path: &Path, mode: Mode) -> Result<Sample> {
    let rows = read_rows(path)?;
    let bad = |line: usize, what: &str| {
        Error::InvalidArgument(format!("{}: line {line}: {what}", path.display()))
    };
    let skip = match rows.first() {
        Some(first) if parse_row::<f64>(first).is_none() => 1,
        _ => 0,
    };
    let body = &rows[skip..];
    if body.is_empty() {
        return Err(Error::EmptyInput(format!("{}: no observations", path.display())));
    }
    match mode {
        Mode::Continuous => {
            let parsed = body
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let v: Vec<f64> = parse_row(r).ok_or_else(|| bad(i + skip + 1, "non-numeric cell"))?;
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(bad(i + skip + 1, "non-finite value"));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            Sample::from_rows(&parsed)
        }
        Mode::Discrete => {
            let parsed = body
                .iter()
                .enumerate()
                .map(|(i, r)| parse_row(r).ok_or_else(|| bad(i + skip + 1, "discrete mode needs integer cells")))
                .collect::<Result<Vec<Vec<i64>>>>()?;
            Sample::from_int_rows(&parsed)
        }
    }
}

/// Writes a sample with one observation per row and no header.
pub fn sample_to_csv(sample: &Sample) -> String {
    let mut out = String::new();
    for i in 0..sample.len() {
        let cells: Vec<String> = match sample.mode() {
            Mode::Continuous => sample.real_point(i).unwrap_or(&[]).iter().map(|v| real(*v)).collect(),
            Mode::Discrete => sample.lattice_point(i).unwrap_or(&[]).iter().map(i64::to_string).collect(),
        };
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// A real with 17 significant digits; round-trips exactly.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// `v` with 12 significant digits in plain notation where that is readable.
pub fn significant12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.11}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let rendered = format!("{:.*}", (11 - exp).max(0) as usize, v);
        // rounding can carry into a new leading digit
        let digits = rendered.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
        if digits > 12 && exp < 11 {
            return format!("{:.*}", (10 - exp).max(0) as usize, v);
        }
        rendered
    } else {
        format!("{v:.11e}")
    }
}
