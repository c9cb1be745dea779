//! Two-column CSV extraction from a report's `series` table.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde_json::Value;

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn series_csv(report: &Value, name: &str) -> Result<String> {
    let Some(series) = report["series"].get(name) else {
        let known: Vec<&str> = report["series"]
            .as_object()
            .map(|m| m.keys().map(String::as_str).collect())
            .unwrap_or_default();
        bail!("missing series `{name}`; report has: [{}]", known.join(", "));
    };
    let columns = series["columns"].as_array().map(Vec::as_slice).unwrap_or_default();
    let [x, y] = columns else {
        bail!("series `{name}` is malformed");
    };
    let mut out = format!("{},{}\n", cell(x), cell(y));
    for row in series["rows"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "{},{}", cell(&row[0]), cell(&row[1]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn extracts_and_reports_missing() {
        let r = json!({ "series": { "log_sep": { "columns": ["k", "log_sep"], "rows": [[1, 0.5], [2, 1.0]] } } });
        assert_eq!(series_csv(&r, "log_sep").unwrap(), "k,log_sep\n1,0.5\n2,1.0\n");
        assert!(series_csv(&r, "L_d").unwrap_err().to_string().contains("log_sep"));
    }
}
