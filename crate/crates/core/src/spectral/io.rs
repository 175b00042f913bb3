//! Text field files:
//!
//! ```text
//! # akns-field v1
//! n=<int> L=<value> t=<value>
//! <index> <re> <im>        (n lines)
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips binary64.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use super::{Field, Grid, SpectralError};

pub const FIELD_HEADER: &str = "# akns-field v1";

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] SpectralError),
}

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_field(f: &Field) -> String {
    let g = f.grid();
    let mut s = String::with_capacity(64 * g.n());
    s.push_str(FIELD_HEADER);
    s.push('\n');
    let _ = writeln!(s, "n={} L={} t={}", g.n(), fmt17(g.length()), fmt17(f.time()));
    for (j, v) in f.values().iter().enumerate() {
        let _ = writeln!(s, "{j} {} {}", fmt17(v.re), fmt17(v.im));
    }
    s
}

fn perr(line: usize, msg: impl Into<String>) -> FieldIoError {
    FieldIoError::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, FieldIoError> {
    tok.parse::<f64>()
        .map_err(|_| perr(line, format!("bad number '{tok}'")))
}

pub fn read_field(text: &str) -> Result<Field, FieldIoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim_end() == FIELD_HEADER => {}
        _ => return Err(perr(1, format!("expected '{FIELD_HEADER}'"))),
    }
    let (ln, meta) = lines.next().ok_or_else(|| perr(2, "missing metadata line"))?;
    let mut n = None;
    let mut length = None;
    let mut time = None;
    for tok in meta.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| perr(ln, format!("expected key=value, got '{tok}'")))?;
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|_| perr(ln, format!("bad n '{v}'")))?),
            "L" => length = Some(parse_f64(v, ln)?),
            "t" => time = Some(parse_f64(v, ln)?),
            other => return Err(perr(ln, format!("unknown key '{other}'"))),
        }
    }
    let (n, length, time) = match (n, length, time) {
        (Some(n), Some(l), Some(t)) => (n, l, t),
        _ => return Err(perr(ln, "metadata needs n, L and t")),
    };
    let grid = Grid::new(n, length)?;
    let mut values = Vec::with_capacity(n);
    for (ln, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(perr(ln, "expected '<index> <re> <im>'"));
        }
        let idx: usize = toks[0].parse().map_err(|_| perr(ln, "bad index"))?;
        if idx != values.len() {
            return Err(perr(ln, format!("expected index {}, got {idx}", values.len())));
        }
        if idx >= n {
            return Err(perr(ln, format!("more than n={n} samples")));
        }
        values.push(Complex64::new(parse_f64(toks[1], ln)?, parse_f64(toks[2], ln)?));
    }
    if values.len() != n {
        return Err(SpectralError::LengthMismatch {
            expected: n,
            got: values.len(),
        }
        .into());
    }
    Ok(Field::new(grid, values, time)?)
}

pub fn write_field_file(path: &Path, f: &Field) -> Result<(), FieldIoError> {
    std::fs::write(path, write_field(f))?;
    Ok(())
}

pub fn read_field_file(path: &Path) -> Result<Field, FieldIoError> {
    read_field(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Field {
        let g = Grid::new(16, 40.0).unwrap();
        Field::from_fn(g, 0.1, |x| Complex64::new((x / 3.0).sin(), 1.0 / 3.0 + x)).unwrap()
    }

    #[test]
    fn format_layout() {
        let s = write_field(&sample());
        let mut l = s.lines();
        assert_eq!(l.next(), Some("# akns-field v1"));
        assert_eq!(l.next(), Some("n=16 L=4.0000000000000000e1 t=1.0000000000000001e-1"));
        assert_eq!(s.lines().count(), 18);
    }

    #[test]
    fn lossless_round_trip() {
        let f = sample();
        let g = read_field(&write_field(&f)).unwrap();
        assert_eq!(f, g);
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_mismatched_n() {
        let s = write_field(&sample());
        let truncated: String = s.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(read_field(&truncated).is_err());
        let relabeled = s.replacen("n=16", "n=32", 1);
        assert!(read_field(&relabeled).is_err());
        let extra = format!("{s}16 0 0\n");
        assert!(read_field(&extra).is_err());
    }

    #[test]
    fn rejects_bad_header() {
        assert!(read_field("# other\n").is_err());
        let s = write_field(&sample()).replacen(" t=", " q=", 1);
        assert!(read_field(&s).is_err());
    }
}
