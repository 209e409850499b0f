use serde_json::{json, Map, Value};

pub const CSV_HEADER: &str = "# latmoment-csv v1";
pub const SCHEMA: u32 = 1;

/// Relative error attached to closed-form floating-point results.
pub const ROUNDING: f64 = 1e-12;

/// A table with a fixed column list. Approximate numbers always sit next to a
/// `*_pm` column holding their absolute error.
#[derive(Debug)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&str]) -> Self {
        Table { command, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// quantity,value,plus_minus layout for single-result commands.
    pub fn long(command: &'static str) -> Self {
        Table::new(command, &["quantity", "value", "plus_minus"])
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn exact(&mut self, name: &str, value: impl ToString) {
        self.push(vec![name.into(), Value::String(value.to_string()), 0.into()]);
    }

    pub fn approx(&mut self, name: &str, value: f64, pm: f64) {
        self.push(vec![name.into(), num(value), num(pm)]);
    }

    pub fn rounded(&mut self, name: &str, value: f64) {
        self.approx(name, value, value.abs() * ROUNDING);
    }

    pub fn text(&mut self, name: &str, value: impl ToString) {
        self.push(vec![name.into(), Value::String(value.to_string()), Value::String(String::new())]);
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        let body = String::from_utf8(w.into_inner()?)?;
        Ok(format!("{CSV_HEADER}\n# command: {}\n{body}", self.command))
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
            .collect();
        let doc = json!({ "schema": SCHEMA, "command": self.command, "rows": rows });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }
}

/// Non-finite values become strings ("inf", "NaN") since JSON has no literal for them.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
