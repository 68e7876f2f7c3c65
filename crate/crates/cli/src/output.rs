//! Tabular results and their CSV / JSON serialization.
//!
//! CSV: `#`-prefixed metadata lines, a header row whose numeric columns end
//! in a `[unit]` suffix, the data rows, then `# summary,...` lines if the
//! command produces a summary. Floats are written with 17 significant
//! digits so files round-trip exactly.

use std::fmt::Write as _;

use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // non-finite values become null
            Cell::Num(v) => Value::from(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub command: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary_columns: Vec<String>,
    pub summary: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Table {
        Table { command: command.into(), columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# casimir-mag {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s += &self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            s += &row.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
            s.push('\n');
        }
        if !self.summary.is_empty() {
            let _ = writeln!(s, "# summary,{}", self.summary_columns.join(","));
            for row in &self.summary {
                let _ = writeln!(s, "# summary,{}", row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            }
        }
        s
    }

    pub fn to_json(&self, config: Value) -> String {
        let rows = |rows: &[Vec<Cell>]| -> Vec<Value> {
            rows.iter().map(|r| Value::from(r.iter().map(Cell::json).collect::<Vec<_>>())).collect()
        };
        let metadata: serde_json::Map<String, Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let mut v = json!({
            "tool": "casimir-mag",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "metadata": metadata,
            "config": config,
            "columns": self.columns,
            "rows": rows(&self.rows),
        });
        if !self.summary.is_empty() {
            v["summary"] = json!({ "columns": self.summary_columns, "rows": rows(&self.summary) });
        }
        let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("energy", &["D[m]", "E[J/m^2]", "converged"]);
        t.meta("units", "SI");
        t.push(vec![1e-7.into(), (-1.0 / 3.0).into(), true.into()]);
        t.push(vec![2e-7.into(), f64::NAN.into(), false.into()]);
        t
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# casimir-mag "));
        assert_eq!(lines[1], "# units = SI");
        assert_eq!(lines[2], "D[m],E[J/m^2],converged");
        let v: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, -1.0 / 3.0);
        assert!(lines[4].contains("NaN"));
    }

    #[test]
    fn json_embeds_config_and_nulls_nan() {
        let j: Value = serde_json::from_str(&sample().to_json(json!({ "k": 1 }))).unwrap();
        assert_eq!(j["config"]["k"], 1);
        assert_eq!(j["rows"][0][1], -1.0 / 3.0);
        assert!(j["rows"][1][1].is_null());
        assert!(j.get("summary").is_none());
    }

    #[test]
    fn summary_lines_follow_data() {
        let mut t = sample();
        t.summary_columns = vec!["regime".into(), "slope[1]".into()];
        t.summary.push(vec!["long".into(), (-5.0).into()]);
        let csv = t.to_csv();
        assert!(csv.ends_with("# summary,regime,slope[1]\n# summary,long,-5.0000000000000000e0\n"));
    }
}
