//! Named equations as flow mixes `ψ_t = Σ i^k b_k H_k`.
//!
//! A member written as `iψ_t + αH_1 − iβH_2 + γ_1H_3 − iγ_2H_4 + γ_3H_5 = 0`
//! is solved by `Ψ(x, αt, −βt, −γ_1t, γ_2t, γ_3t)`, which fixes the signs
//! below.

use thiserror::Error;

use crate::evolve::FlowSpec;

#[derive(Debug, Error, PartialEq)]
pub enum PresetError {
    #[error("unknown preset '{0}' (expected nls, mkdv, lpd, hirota, gnls, hnls4 or hnls5)")]
    Unknown(String),
    #[error("preset {name} takes {want} parameters, got {got}")]
    Arity { name: String, want: usize, got: usize },
    #[error("preset {0}: {1}")]
    Flow(String, String),
}

/// Coefficients `(k, b_k)` of a preset.
pub fn preset_coefficients(name: &str, args: &[f64]) -> Result<Vec<(usize, f64)>, PresetError> {
    let want = match name {
        "nls" | "mkdv" | "lpd" => 0,
        "hirota" => 2,
        "gnls" => 3,
        "hnls4" => 4,
        "hnls5" => 5,
        other => return Err(PresetError::Unknown(other.to_string())),
    };
    if args.len() != want {
        return Err(PresetError::Arity {
            name: name.to_string(),
            want,
            got: args.len(),
        });
    }
    Ok(match name {
        "nls" => vec![(1, 1.0)],
        "mkdv" => vec![(2, 1.0)],
        "lpd" => vec![(3, -1.0)],
        _ => {
            let signs = [1.0, -1.0, -1.0, 1.0, 1.0];
            args.iter().zip(signs).enumerate().map(|(i, (a, s))| (i + 1, s * a)).collect()
        }
    })
}

pub fn preset(name: &str, args: &[f64]) -> Result<FlowSpec, PresetError> {
    let coeffs = preset_coefficients(name, args)?;
    FlowSpec::mixed(&coeffs).map_err(|e| PresetError::Flow(name.to_string(), e.to_string()))
}

/// Parses `name` or `name(a, b, ...)`.
pub fn parse_preset(text: &str) -> Result<FlowSpec, PresetError> {
    let text = text.trim();
    let (name, args) = match text.split_once('(') {
        None => (text, Vec::new()),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| PresetError::Unknown(text.to_string()))?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| PresetError::Unknown(text.to_string())))
                    .collect::<Result<_, _>>()?
            };
            (name.trim(), args)
        }
    };
    preset(name, &args)
}
