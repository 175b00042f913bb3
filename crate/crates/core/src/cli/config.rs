//! Run configuration files.
//!
//! ```text
//! # comment
//! [grid]
//! n = 256
//! L = 40
//! [flows]
//! flow1 = linear(0.9, 0)
//! flow2 = -0.2            # same as linear(-0.2, 0)
//! [run]
//! t_end = 1
//! dt = 1e-3
//! observe = [0.25, 0.5]
//! [initial]
//! solution = soliton
//! a = 1
//! ```
//!
//! Unknown sections and keys are errors, as are duplicate keys.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::evolve::{FlowSpec, Method, Schedule};
use crate::hierarchy::STANDARD_ORDER;
use crate::spectral::Grid;

use super::preset::{preset, PresetError};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key '{key}' in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: duplicate key '{key}' (first set on line {first})")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}, column {col}: bad schedule literal: {msg}")]
    BadScheduleLiteral { line: usize, col: usize, msg: String },
    #[error("line {line}: {key}: {msg}")]
    BadValue { line: usize, key: String, msg: String },
    #[error("missing [{section}] {key}")]
    Missing { section: String, key: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    List(Vec<f64>),
    Schedule(Schedule),
    /// `name(args)` that is not a schedule literal, e.g. a preset.
    Call(String, Vec<f64>),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::List(v) => write!(f, "[{}]", join(v)),
            Value::Schedule(s) => write!(f, "{s}"),
            Value::Call(n, a) => write!(f, "{n}({})", join(a)),
            Value::Str(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: Value,
    pub line: usize,
    pub col: usize,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["n", "L"]),
    ("flows", &["preset", "flow1", "flow2", "flow3", "flow4", "flow5", "flow6"]),
    ("run", &["t_start", "t_end", "dt", "method", "dealias", "every", "observe"]),
    ("initial", &["solution", "a", "q", "riemann", "times", "file"]),
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    /// Column of `s[0]` (1-based).
    base: usize,
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.base + self.pos
    }

    fn err(&self, msg: impl Into<String>) -> ConfigError {
        ConfigError::Parse {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64, ConfigError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || matches!(c, b'.' | b'-' | b'+' | b'_') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let tok = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                Err(self.err(format!("expected a number, found '{tok}'")))
            }
        }
    }

    /// Comma-separated numbers up to `close`.
    fn numbers(&mut self, close: u8) -> Result<Vec<f64>, ConfigError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat(close) {
                return Ok(out);
            }
            if !self.eat(b',') {
                return Err(self.err(format!("expected ',' or '{}'", close as char)));
            }
        }
    }
}

fn schedule_literal(name: &str, args: &[f64]) -> Option<Result<Schedule, String>> {
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{name} takes {n} arguments, got {}", args.len()))
        }
    };
    let s = match name {
        "linear" => want(2).map(|_| Schedule::linear(args[0], args[1])),
        "poly" => {
            if args.is_empty() {
                Err("poly needs at least one coefficient".into())
            } else {
                Ok(Schedule::Poly(args.to_vec()))
            }
        }
        "sin" => want(3).map(|_| Schedule::sinusoid(args[0], args[1], args[2])),
        "bump" => want(3).map(|_| Schedule::bump(args[0], args[1], args[2])),
        _ => return None,
    };
    Some(s.and_then(|s| s.validate().map(|_| s).map_err(|e| e.to_string())))
}

fn parse_value(raw: &str, line: usize, base: usize) -> Result<Value, ConfigError> {
    let mut c = Cursor {
        s: raw.as_bytes(),
        pos: 0,
        line,
        base,
    };
    c.skip_ws();
    let start = c.pos;
    let value = match c.peek() {
        None => return Err(c.err("missing value")),
        Some(b'[') => {
            c.pos += 1;
            Value::List(c.numbers(b']')?)
        }
        Some(b'"') => {
            c.pos += 1;
            let rest = &raw[c.pos..];
            let end = rest.find('"').ok_or_else(|| c.err("unterminated string"))?;
            c.pos += end + 1;
            Value::Str(rest[..end].to_string())
        }
        Some(ch) if ch.is_ascii_digit() || matches!(ch, b'-' | b'+' | b'.') => Value::Number(c.number()?),
        Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => {
            while let Some(ch) = c.peek() {
                if ch.is_ascii_whitespace() || matches!(ch, b'(' | b',' | b'[' | b']' | b')') {
                    break;
                }
                c.pos += 1;
            }
            let name = raw[start..c.pos].to_string();
            if c.eat(b'(') {
                let args = match c.numbers(b')') {
                    Ok(a) => a,
                    Err(ConfigError::Parse { line, col, msg }) if schedule_literal(&name, &[]).is_some() => {
                        return Err(ConfigError::BadScheduleLiteral { line, col, msg });
                    }
                    Err(e) => return Err(e),
                };
                match schedule_literal(&name, &args) {
                    Some(Ok(s)) => Value::Schedule(s),
                    Some(Err(msg)) => {
                        return Err(ConfigError::BadScheduleLiteral {
                            line,
                            col: base + start,
                            msg,
                        })
                    }
                    None => Value::Call(name, args),
                }
            } else {
                Value::Str(name)
            }
        }
        Some(_) => {
            // Paths and other bare tokens.
            while c.peek().is_some_and(|ch| !ch.is_ascii_whitespace()) {
                c.pos += 1;
            }
            Value::Str(raw[start..c.pos].to_string())
        }
    };
    c.skip_ws();
    if c.pos != c.s.len() {
        return Err(c.err("unexpected trailing input"));
    }
    Ok(value)
}

/// Strips a `#` comment that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut cfg = Config::default();
    let mut current: Option<String> = None;
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(full);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(ConfigError::Parse {
                line,
                col: indent + trimmed.len() + 1,
                msg: "expected ']'".into(),
            })?;
            let name = name.trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::UnknownSection {
                    line,
                    name: name.to_string(),
                });
            }
            if cfg.sections.contains_key(name) {
                return Err(ConfigError::Parse {
                    line,
                    col: indent + 1,
                    msg: format!("section [{name}] appears twice"),
                });
            }
            cfg.sections.insert(name.to_string(), BTreeMap::new());
            current = Some(name.to_string());
            continue;
        }
        let eq = body.find('=').ok_or(ConfigError::Parse {
            line,
            col: indent + 1,
            msg: "expected 'key = value' or '[section]'".into(),
        })?;
        let key = body[..eq].trim();
        let section = current.as_ref().ok_or(ConfigError::Parse {
            line,
            col: indent + 1,
            msg: "key outside of any section".into(),
        })?;
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line,
                col: indent + 1,
                msg: "empty key".into(),
            });
        }
        let allowed = SECTIONS.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                section: section.clone(),
                key: key.to_string(),
            });
        }
        let value = parse_value(&body[eq + 1..], line, eq + 2)?;
        let map = cfg.sections.get_mut(section).expect("inserted on header");
        if let Some(prev) = map.get(key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
                first: prev.line,
            });
        }
        map.insert(
            key.to_string(),
            Entry {
                value,
                line,
                col: eq + 2,
            },
        );
    }
    Ok(cfg)
}

/// Settings from `[run]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub method: Option<Method>,
    pub dealias: bool,
    pub every: Option<usize>,
    pub observe: Vec<f64>,
}

/// Starting field from `[initial]`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Solution { name: String, param: Option<f64>, riemann: Option<String>, times: Vec<f64> },
    File(String),
}

impl Config {
    pub fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section)?.get(key)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn bad(e: &Entry, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::BadValue {
            line: e.line,
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => match &e.value {
                Value::Number(x) => Ok(Some(*x)),
                other => Err(Self::bad(e, key, format!("expected a number, got {other}"))),
            },
        }
    }

    fn required(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.number(section, key)?.ok_or(ConfigError::Missing {
            section: section.into(),
            key: key.into(),
        })
    }

    fn count(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.number(section, key)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e15 => Ok(Some(x as usize)),
            Some(x) => Err(Self::bad(self.entry(section, key).unwrap(), key, format!("expected a count, got {x}"))),
        }
    }

    fn string(&self, section: &str, key: &str) -> Result<Option<String>, ConfigError> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => match &e.value {
                Value::Str(s) => Ok(Some(s.clone())),
                other => Err(Self::bad(e, key, format!("expected a name, got {other}"))),
            },
        }
    }

    fn list(&self, section: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.entry(section, key) {
            None => Ok(Vec::new()),
            Some(e) => match &e.value {
                Value::List(v) => Ok(v.clone()),
                Value::Number(x) => Ok(vec![*x]),
                other => Err(Self::bad(e, key, format!("expected a list, got {other}"))),
            },
        }
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        let n = self.count("grid", "n")?.ok_or(ConfigError::Missing {
            section: "grid".into(),
            key: "n".into(),
        })?;
        let l = self.required("grid", "L")?;
        Grid::new(n, l).map_err(|e| Self::bad(self.entry("grid", "n").unwrap(), "n", e.to_string()))
    }

    /// Preset first, then explicit `flowK` keys, which replace the preset's
    /// entry for the same order.
    pub fn flow_spec(&self) -> Result<FlowSpec, ConfigError> {
        let mut entries: BTreeMap<usize, Schedule> = BTreeMap::new();
        if let Some(e) = self.entry("flows", "preset") {
            let spec = match &e.value {
                Value::Str(name) => preset(name, &[]),
                Value::Call(name, args) => preset(name, args),
                other => Err(PresetError::Unknown(other.to_string())),
            }
            .map_err(|err| Self::bad(e, "preset", err.to_string()))?;
            for (k, s) in spec.entries() {
                entries.insert(*k, s.clone());
            }
        }
        for k in 1..=STANDARD_ORDER {
            let key = format!("flow{k}");
            if let Some(e) = self.entry("flows", &key) {
                let s = match &e.value {
                    Value::Schedule(s) => s.clone(),
                    Value::Number(b) => Schedule::linear(*b, 0.0),
                    other => {
                        return Err(ConfigError::BadScheduleLiteral {
                            line: e.line,
                            col: e.col,
                            msg: format!("expected a schedule, got {other}"),
                        })
                    }
                };
                entries.insert(k, s);
            }
        }
        FlowSpec::new(entries.into_iter().collect()).map_err(|err| ConfigError::BadValue {
            line: 0,
            key: "flows".into(),
            msg: err.to_string(),
        })
    }

    pub fn run(&self) -> Result<RunSettings, ConfigError> {
        let method = match self.string("run", "method")? {
            None => None,
            Some(m) => Some(
                m.parse::<Method>()
                    .map_err(|msg| Self::bad(self.entry("run", "method").unwrap(), "method", msg))?,
            ),
        };
        let dealias = match self.string("run", "dealias")?.as_deref() {
            None | Some("false") => false,
            Some("true") => true,
            Some(other) => {
                return Err(Self::bad(
                    self.entry("run", "dealias").unwrap(),
                    "dealias",
                    format!("expected true or false, got {other}"),
                ))
            }
        };
        Ok(RunSettings {
            t_start: self.number("run", "t_start")?.unwrap_or(0.0),
            t_end: self.required("run", "t_end")?,
            dt: self.required("run", "dt")?,
            method,
            dealias,
            every: self.count("run", "every")?,
            observe: self.list("run", "observe")?,
        })
    }

    pub fn initial(&self) -> Result<Option<InitialSpec>, ConfigError> {
        if !self.has_section("initial") {
            return Ok(None);
        }
        if let Some(path) = self.string("initial", "file")? {
            return Ok(Some(InitialSpec::File(path)));
        }
        let name = self.string("initial", "solution")?.ok_or(ConfigError::Missing {
            section: "initial".into(),
            key: "solution".into(),
        })?;
        let param = match self.number("initial", "a")? {
            Some(a) => Some(a),
            None => self.number("initial", "q")?,
        };
        Ok(Some(InitialSpec::Solution {
            name,
            param,
            riemann: self.string("initial", "riemann")?,
            times: self.list("initial", "times")?,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_nls() {
        let c = parse_config("[flows]\nflow1 = linear(1,0)\n").unwrap();
        assert_eq!(c.flow_spec().unwrap(), FlowSpec::single(1).unwrap());
    }

    #[test]
    fn hirota_coefficients() {
        let c = parse_config("[flows]\nflow1 = linear(0.9,0)\nflow2 = linear(-0.2,0)").unwrap();
        let s = c.flow_spec().unwrap();
        assert_eq!(s, FlowSpec::mixed(&[(1, 0.9), (2, -0.2)]).unwrap());
        let p = parse_config("[flows]\npreset = hirota(0.9, 0.2)").unwrap();
        assert_eq!(p.flow_spec().unwrap(), s);
    }

    #[test]
    fn deformed_schedule() {
        let c = parse_config("[flows]\nflow1 = sin(1,1,0)  # deformed NLS").unwrap();
        let s = c.flow_spec().unwrap();
        assert_eq!(s.entries()[0].1, Schedule::sinusoid(1.0, 1.0, 0.0));
    }

    #[test]
    fn full_file() {
        let text = "\
# a run
[grid]
n = 256
L = 40
[flows]
flow1 = 1
[run]
t_end = 1
dt = 1e-3
method = ifrk4
observe = [0.25, 0.5]
[initial]
solution = soliton
a = 1.5
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.grid().unwrap(), Grid::new(256, 40.0).unwrap());
        let r = c.run().unwrap();
        assert_eq!(r.method, Some(Method::IfRk4));
        assert_eq!(r.observe, vec![0.25, 0.5]);
        assert_eq!(
            c.initial().unwrap(),
            Some(InitialSpec::Solution {
                name: "soliton".into(),
                param: Some(1.5),
                riemann: None,
                times: vec![]
            })
        );
    }

    #[test]
    fn fail_closed() {
        assert!(matches!(
            parse_config("[grid]\nsize = 3"),
            Err(ConfigError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(parse_config("[mesh]\n"), Err(ConfigError::UnknownSection { line: 1, .. })));
        assert!(matches!(
            parse_config("[grid]\nn = 16\nn = 32"),
            Err(ConfigError::DuplicateKey { line: 3, first: 2, .. })
        ));
        assert!(matches!(parse_config("n = 16"), Err(ConfigError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_config("[grid]\nn 16"),
            Err(ConfigError::Parse { line: 2, col: 1, .. })
        ));
    }

    #[test]
    fn schedule_literal_errors_carry_location() {
        match parse_config("[flows]\nflow1 = linear(1)") {
            Err(ConfigError::BadScheduleLiteral { line: 2, col: 9, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_config("[flows]\nflow1 = sin(1, x, 0)") {
            Err(ConfigError::BadScheduleLiteral { line: 2, col: 16, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config("[flows]\nflow1 = bump(1, 0, 1)"),
            Err(ConfigError::BadScheduleLiteral { .. })
        ));
        let c = parse_config("[flows]\nflow1 = soliton").unwrap();
        assert!(matches!(c.flow_spec(), Err(ConfigError::BadScheduleLiteral { .. })));
    }

    #[test]
    fn numbers_and_trailing_input() {
        assert!(matches!(parse_config("[grid]\nL = 4 0"), Err(ConfigError::Parse { line: 2, .. })));
        let c = parse_config("[run]\nobserve = [1, 2.5e-1]\nt_end = 1\ndt = 0.1").unwrap();
        assert_eq!(c.run().unwrap().observe, vec![1.0, 0.25]);
    }
}
