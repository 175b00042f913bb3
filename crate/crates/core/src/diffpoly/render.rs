//! Text, LaTeX and JSON renderings of [`DiffPoly`].
//!
//! JSON schema: an array of terms, each
//! `{"coeff": [re_num, re_den, im_num, im_den], "factors": [[symbol, order, exponent], ...]}`
//! with symbols spelled `psi`, `phi`, `psibar`, `phibar`. Integers that do not
//! fit in an `i64` are written as decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use super::{DiffPoly, Factors, Jet, Symbol};
use crate::rational::{big_to_i64, GaussianRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected text|latex|json)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum JsonSchemaError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
}

pub(super) fn render(p: &DiffPoly, format: Format) -> String {
    match format {
        Format::Json => to_json_value(p).to_string(),
        Format::Text | Format::Latex => render_sum(p, format),
    }
}

fn render_sum(p: &DiffPoly, format: Format) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, m) in p.terms().iter().enumerate() {
        let (negative, mag) = coefficient(&m.coeff, !m.factors.as_slice().is_empty(), format);
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let body = factors(&m.factors, format);
        let sep = if format == Format::Text { "*" } else { " " };
        match (mag.is_empty(), body.is_empty()) {
            (true, _) => out.push_str(&body),
            (false, true) => out.push_str(&mag),
            (false, false) => {
                out.push_str(&mag);
                out.push_str(sep);
                out.push_str(&body);
            }
        }
    }
    out
}

fn ratio(r: &BigRational, format: Format) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else if format == Format::Latex {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Returns (sign, magnitude) where the magnitude is empty for a unit real
/// coefficient in front of a nonempty product.
fn coefficient(c: &GaussianRational, has_factors: bool, format: Format) -> (bool, String) {
    let (re, im) = (c.re(), c.im());
    if im.is_zero() {
        let mag = re.abs();
        let s = if has_factors && mag.is_one() { String::new() } else { ratio(&mag, format) };
        return (re.is_negative(), s);
    }
    if re.is_zero() {
        let mag = im.abs();
        let s = if mag.is_one() {
            "i".to_string()
        } else if mag.denom().is_one() || format == Format::Latex {
            format!("{}i", ratio(&mag, format))
        } else {
            format!("({})i", ratio(&mag, format))
        };
        return (im.is_negative(), s);
    }
    let sign = if im.is_negative() { "-" } else { "+" };
    let inner = format!("{}{}{}i", ratio(re, format), sign, ratio(&im.abs(), format));
    let s = if format == Format::Latex {
        format!("\\left({inner}\\right)")
    } else {
        format!("({inner})")
    };
    (false, s)
}

fn factors(f: &Factors, format: Format) -> String {
    let parts: Vec<String> = f
        .as_slice()
        .iter()
        .map(|&(jet, e)| match format {
            Format::Latex => latex_factor(jet, e),
            _ => {
                if e > 1 {
                    format!("{jet}^{e}")
                } else {
                    jet.to_string()
                }
            }
        })
        .collect();
    let sep = if format == Format::Text { "*" } else { " " };
    parts.join(sep)
}

fn latex_factor(jet: Jet, e: u32) -> String {
    let base = match jet.symbol {
        Symbol::Psi | Symbol::PsiBar => "\\psi",
        Symbol::Phi | Symbol::PhiBar => "\\phi",
    };
    let mut s = base.to_string();
    if jet.symbol.is_conjugate() {
        s.push_str("^{\\ast}");
    }
    if jet.order > 0 {
        s.push_str(&format!("_{{{}}}", "x".repeat(jet.order as usize)));
    }
    if e > 1 {
        if jet.symbol.is_conjugate() {
            s = format!("({s})^{{{e}}}");
        } else {
            s.push_str(&format!("^{{{e}}}"));
        }
    }
    s
}

fn int_value(b: &BigInt) -> Value {
    match big_to_i64(b) {
        Some(n) => json!(n),
        None => json!(b.to_string()),
    }
}

pub(super) fn to_json_value(p: &DiffPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|m| {
            let (re, im) = (m.coeff.re(), m.coeff.im());
            let factors: Vec<Value> = m
                .factors
                .as_slice()
                .iter()
                .map(|(j, e)| json!([j.symbol.name(), j.order, e]))
                .collect();
            json!({
                "coeff": [int_value(re.numer()), int_value(re.denom()),
                          int_value(im.numer()), int_value(im.denom())],
                "factors": factors,
            })
        })
        .collect();
    Value::Array(terms)
}

fn parse_int(v: &Value) -> Result<BigInt, JsonSchemaError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| JsonSchemaError::Schema(format!("non-integer number {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| JsonSchemaError::Schema(format!("bad integer string '{s}'"))),
        other => Err(JsonSchemaError::Schema(format!("expected integer, got {other}"))),
    }
}

fn parse_u32(v: &Value, what: &str) -> Result<u32, JsonSchemaError> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| JsonSchemaError::Schema(format!("{what} must be a nonnegative integer")))
}

pub(super) fn from_json_str(s: &str) -> Result<DiffPoly, JsonSchemaError> {
    let v: Value = serde_json::from_str(s)?;
    from_json_value(&v)
}

pub(super) fn from_json_value(v: &Value) -> Result<DiffPoly, JsonSchemaError> {
    let arr = v
        .as_array()
        .ok_or_else(|| JsonSchemaError::Schema("top level must be an array".into()))?;
    let mut terms = Vec::with_capacity(arr.len());
    for t in arr {
        let obj = t
            .as_object()
            .ok_or_else(|| JsonSchemaError::Schema("term must be an object".into()))?;
        if let Some(k) = obj.keys().find(|k| *k != "coeff" && *k != "factors") {
            return Err(JsonSchemaError::Schema(format!("unknown term key '{k}'")));
        }
        let c = obj
            .get("coeff")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 4)
            .ok_or_else(|| JsonSchemaError::Schema("coeff must be a 4-element array".into()))?;
        let nums = c.iter().map(parse_int).collect::<Result<Vec<_>, _>>()?;
        if nums[1].is_zero() || nums[3].is_zero() {
            return Err(JsonSchemaError::Schema("zero denominator".into()));
        }
        let coeff = GaussianRational::new(
            BigRational::new(nums[0].clone(), nums[1].clone()),
            BigRational::new(nums[2].clone(), nums[3].clone()),
        );
        let fs = obj
            .get("factors")
            .and_then(Value::as_array)
            .ok_or_else(|| JsonSchemaError::Schema("factors must be an array".into()))?;
        let mut pairs = Vec::with_capacity(fs.len());
        for f in fs {
            let triple = f
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| JsonSchemaError::Schema("factor must be [symbol, order, exponent]".into()))?;
            let sym = triple[0]
                .as_str()
                .and_then(Symbol::from_name)
                .ok_or_else(|| JsonSchemaError::Schema(format!("bad symbol {}", triple[0])))?;
            let order = parse_u32(&triple[1], "order")?;
            let exp = parse_u32(&triple[2], "exponent")?;
            if exp == 0 {
                return Err(JsonSchemaError::Schema("exponent must be positive".into()));
            }
            pairs.push((Jet::new(sym, order), exp));
        }
        terms.push((coeff, Factors::from_pairs(pairs)));
    }
    Ok(DiffPoly::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::super::{imag, int};
    use super::*;

    fn h1() -> DiffPoly {
        DiffPoly::psi(2) + int(2) * DiffPoly::psi(0).pow(2) * DiffPoly::psibar(0)
    }

    #[test]
    fn text_rendering() {
        assert_eq!(h1().render(Format::Text), "psi_xx + 2*psi^2*psibar");
        assert_eq!(DiffPoly::zero().render(Format::Text), "0");
        let v = imag(-1) * DiffPoly::psi(0) * DiffPoly::phi(0);
        assert_eq!(v.render(Format::Text), "-i*psi*phi");
        let w = DiffPoly::constant(GaussianRational::from_parts(1, 2, 0, 1)) * DiffPoly::psi(1)
            - imag(3) * DiffPoly::psi(0);
        assert_eq!(w.render(Format::Text), "-3i*psi + 1/2*psi_x");
    }

    #[test]
    fn latex_rendering() {
        let p = int(2) * DiffPoly::psi(0).pow(2) * DiffPoly::psibar(2)
            + int(4) * DiffPoly::psi(0) * DiffPoly::psi(1) * DiffPoly::psibar(1);
        assert_eq!(
            p.render(Format::Latex),
            "4 \\psi \\psi_{x} \\psi^{\\ast}_{x} + 2 \\psi^{2} \\psi^{\\ast}_{xx}"
        );
        let q = DiffPoly::psibar(1).pow(2);
        assert_eq!(q.render(Format::Latex), "(\\psi^{\\ast}_{x})^{2}");
    }

    #[test]
    fn json_round_trip_and_schema() {
        let p = h1() + DiffPoly::constant(GaussianRational::from_parts(-3, 7, 5, 2)) * DiffPoly::phibar(4);
        let s = p.render(Format::Json);
        assert_eq!(DiffPoly::from_json_str(&s).unwrap(), p);
        let one = DiffPoly::psi(0).render(Format::Json);
        assert_eq!(one, r#"[{"coeff":[1,1,0,1],"factors":[["psi",0,1]]}]"#);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(DiffPoly::from_json_str("{}").is_err());
        assert!(DiffPoly::from_json_str(r#"[{"coeff":[1,0,0,1],"factors":[]}]"#).is_err());
        assert!(DiffPoly::from_json_str(r#"[{"coeff":[1,1,0,1],"factors":[["chi",0,1]]}]"#).is_err());
        assert!(DiffPoly::from_json_str(r#"[{"coeff":[1,1,0,1],"factors":[],"x":1}]"#).is_err());
    }

    #[test]
    fn big_coefficients_survive_json() {
        let big = BigInt::from(i64::MAX) * BigInt::from(10);
        let c = GaussianRational::new(BigRational::from_integer(big), BigRational::zero());
        let p = DiffPoly::constant(c) * DiffPoly::psi(0);
        assert_eq!(DiffPoly::from_json_str(&p.render(Format::Json)).unwrap(), p);
    }
}
