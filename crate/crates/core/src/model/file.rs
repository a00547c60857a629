//! Model description files.
//!
//! Structured text, one statement per line:
//!
//! ```text
//! # Curie-Weiss
//! type = curie_weiss
//! n = 100
//! alpha = 0.5
//! ```
//!
//! ```text
//! type = torus_grid
//! k = 10
//! alpha = 0.5
//! ```
//!
//! ```text
//! type = explicit
//! n = 3
//! 0 1 0.25
//! 1 2 -0.5
//! ```
//!
//! `explicit` models list one `u v weight` edge per line and are always
//! zero-field. Blank lines and `#` comments are ignored. Errors carry the
//! offending line number.

use super::IsingModel;
use crate::error::{Error, Result};
use crate::model::Graph;
use std::path::Path;

pub fn load_model(path: &Path) -> Result<IsingModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<IsingModel> {
    let mut kind: Option<(String, usize)> = None;
    let mut n: Option<(usize, usize)> = None;
    let mut k: Option<(usize, usize)> = None;
    let mut alpha: Option<(f64, usize)> = None;
    let mut edges: Vec<(usize, usize, f64, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let key = key.trim();
            let value = value.trim();
            match key {
                "type" => kind = Some((value.to_string(), lineno)),
                "n" => n = Some((parse_num(value, lineno)?, lineno)),
                "k" => k = Some((parse_num(value, lineno)?, lineno)),
                "alpha" => alpha = Some((parse_float(value, lineno)?, lineno)),
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("unknown field `{other}`"),
                    })
                }
            }
            continue;
        }
        // Bare triple: an explicit edge.
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `key = value` or `u v weight`, got `{line}`"),
            });
        }
        let u = parse_num(tokens[0], lineno)?;
        let v = parse_num(tokens[1], lineno)?;
        let w = parse_float(tokens[2], lineno)?;
        edges.push((u, v, w, lineno));
    }

    let (kind, kind_line) = kind.ok_or(Error::Parse {
        line: 0,
        message: "missing `type` field".into(),
    })?;
    match kind.as_str() {
        "curie_weiss" => {
            let (n, _) = require(n, "n", kind_line)?;
            let (alpha, _) = require(alpha, "alpha", kind_line)?;
            reject_edges(&edges, "curie_weiss")?;
            IsingModel::curie_weiss(n, alpha)
        }
        "torus_grid" => {
            let (k, _) = require(k, "k", kind_line)?;
            let (alpha, _) = require(alpha, "alpha", kind_line)?;
            reject_edges(&edges, "torus_grid")?;
            IsingModel::torus_grid(k, alpha)
        }
        "explicit" => {
            let (n, n_line) = require(n, "n", kind_line)?;
            let mut pairs = Vec::with_capacity(edges.len());
            let mut weights = Vec::with_capacity(edges.len());
            for &(u, v, w, lineno) in &edges {
                if u >= n || v >= n {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("edge ({u},{v}) out of range for n={n}"),
                    });
                }
                if u == v {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("self-loop at node {u}"),
                    });
                }
                pairs.push((u, v));
                weights.push(w);
            }
            let graph = Graph::new(n, pairs).map_err(|e| Error::Parse {
                line: n_line,
                message: e.to_string(),
            })?;
            IsingModel::zero_field(graph, weights)
        }
        other => Err(Error::Parse {
            line: kind_line,
            message: format!("unknown model type `{other}`"),
        }),
    }
}

fn require<T>(value: Option<(T, usize)>, field: &str, type_line: usize) -> Result<(T, usize)> {
    value.ok_or_else(|| Error::Parse {
        line: type_line,
        message: format!("missing `{field}` field"),
    })
}

fn reject_edges(edges: &[(usize, usize, f64, usize)], kind: &str) -> Result<()> {
    if let Some(&(_, _, _, lineno)) = edges.first() {
        return Err(Error::Parse {
            line: lineno,
            message: format!("explicit edges not allowed for type `{kind}`"),
        });
    }
    Ok(())
}

fn parse_num(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a nonnegative integer, got `{s}`"),
    })
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, got `{s}`"),
    })
}
