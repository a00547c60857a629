//! Plot-data emission: one CSV per table plus a JSON summary. CSVs are
//! byte-identical across runs of the same deterministic config.

use crate::report::RunReport;
use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub fn render_csv(columns: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", columns.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Write every table of the report as `<out>/<table>.csv` and the summary
/// as `<out>/report.json`. An empty table still produces its header row.
pub fn emit_plotdata(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut written = Vec::new();
    for table in &report.tables {
        let path = out_dir.join(format!("{}.csv", table.name));
        std::fs::write(&path, render_csv(&table.columns, &table.rows))
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    let json_path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&report.to_json())?;
    text.push('\n');
    std::fs::write(&json_path, text)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    written.push(json_path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Table;

    #[test]
    fn empty_table_renders_header_only() {
        let t = Table::new("x", &["a", "b"]);
        assert_eq!(render_csv(&t.columns, &t.rows), "a,b\n");
    }
}
