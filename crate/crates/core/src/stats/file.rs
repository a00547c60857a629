//! Function description files: one term per line in subset form,
//! `i j ... coeff` — variable indices followed by the coefficient. A line
//! holding a single number is the constant term. `#` starts a comment.

use super::MultilinearFunction;
use crate::error::{Error, Result};
use std::path::Path;

pub fn load_function(path: &Path) -> Result<MultilinearFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_function(&text)
}

pub fn parse_function(text: &str) -> Result<MultilinearFunction> {
    let mut terms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (index_tokens, coeff_token) = tokens.split_at(tokens.len() - 1);
        let coeff: f64 = coeff_token[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("expected a coefficient, got `{}`", coeff_token[0]),
        })?;
        let mut subset = Vec::with_capacity(index_tokens.len());
        for tok in index_tokens {
            let idx: usize = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("expected a variable index, got `{tok}`"),
            })?;
            subset.push(idx);
        }
        terms.push((subset, coeff));
    }
    MultilinearFunction::new(terms).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

/// Canonical text form; `parse_function(write_function(f))` round-trips.
pub fn write_function(f: &MultilinearFunction) -> String {
    let mut out = String::new();
    for (subset, coeff) in f.terms() {
        for idx in subset {
            out.push_str(&idx.to_string());
            out.push(' ');
        }
        out.push_str(&format!("{coeff}\n"));
    }
    out
}
