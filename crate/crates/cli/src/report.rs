//! Experiment reports: tabular rows, pass/fail flags that cite their
//! formula and tolerance machine-readably, and run metadata.

use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub struct FlagCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// How `value` must relate to `threshold` to pass.
    pub relation: &'static str,
    /// The bound formula the threshold came from.
    pub formula: String,
    pub pass: bool,
}

impl FlagCheck {
    pub fn le(name: impl Into<String>, value: f64, threshold: f64, formula: impl Into<String>) -> Self {
        FlagCheck {
            name: name.into(),
            value,
            threshold,
            relation: "<=",
            formula: formula.into(),
            pass: value <= threshold,
        }
    }

    pub fn ge(name: impl Into<String>, value: f64, threshold: f64, formula: impl Into<String>) -> Self {
        FlagCheck {
            name: name.into(),
            value,
            threshold,
            relation: ">=",
            formula: formula.into(),
            pass: value >= threshold,
        }
    }

    pub fn lt(name: impl Into<String>, value: f64, threshold: f64, formula: impl Into<String>) -> Self {
        FlagCheck {
            name: name.into(),
            value,
            threshold,
            relation: "<",
            formula: formula.into(),
            pass: value < threshold,
        }
    }
}

/// One table of results destined for a CSV file.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Complete result of one experiment run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub kind: String,
    /// False for hardware experiments, whose results depend on scheduling.
    pub deterministic: bool,
    pub seed: u64,
    pub scale: u64,
    /// Full parameter tuple; every emitted row implicitly carries these.
    pub params: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub flags: Vec<FlagCheck>,
    /// Extra summary values (fitted slopes, bounds, moments).
    pub summary: Value,
    pub wall_ms: u128,
}

impl RunReport {
    pub fn passing(&self) -> bool {
        self.flags.iter().all(|f| f.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "deterministic": self.deterministic,
            "seed": self.seed,
            "scale": self.scale,
            "params": self.params.iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect::<serde_json::Map<String, Value>>(),
            "flags": self.flags.iter().map(|f| json!({
                "name": f.name,
                "value": f.value,
                "threshold": f.threshold,
                "relation": f.relation,
                "formula": f.formula,
                "pass": f.pass,
            })).collect::<Vec<_>>(),
            "summary": self.summary,
            "pass": self.passing(),
            "wall_ms": self.wall_ms,
        })
    }
}
