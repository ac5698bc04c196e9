//! Report documents and their JSON/CSV rendering.
//!
//! Every numeric field carries the exact rational string plus a decimal
//! rendering to 12 significant digits; the decimal is presentation only.

use dsplab_core::{format_rational, to_decimal_string, RatioBound, Rational};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Num {
    pub exact: String,
    pub decimal: String,
}

impl Num {
    pub fn new(r: &Rational) -> Self {
        Num {
            exact: format_rational(r),
            decimal: to_decimal_string(r, 12),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum BoundDoc {
    Infinite(String),
    Finite(Num),
}

impl BoundDoc {
    pub fn new(b: &RatioBound) -> Self {
        match b {
            RatioBound::Finite(r) => BoundDoc::Finite(Num::new(r)),
            RatioBound::Infinite => BoundDoc::Infinite("infinite".to_string()),
        }
    }
}

/// `elapsed_ms` is omitted under `--deterministic` so identical runs emit
/// identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct StatsDoc {
    pub profiles_examined: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumDoc {
    pub profile: Vec<String>,
    pub value: Num,
    pub payments: Vec<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepDoc {
    pub player: usize,
    pub from: String,
    pub to: String,
    pub potential_before: Num,
    pub potential_after: Num,
}

/// The one report shape every subcommand fills a slice of. Unused fields
/// are omitted from the output.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revenue: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payments: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_payment: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibrium_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<Vec<EquilibriumDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poa: Option<BoundDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pos: Option<BoundDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independent_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsDoc>,
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => render_csv(report),
    }
}

/// CSV form: one `field,value` row per leaf, keys dotted and array
/// entries indexed.
fn render_csv(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                flatten(&join(prefix, k), val, rows);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(&join(prefix, &i.to_string()), val, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dsplab_core::rational::ratio;

    #[test]
    fn numbers_carry_exact_and_decimal_forms() {
        let n = Num::new(&ratio(1, 3));
        assert_eq!(n.exact, "1/3");
        assert_eq!(n.decimal, "0.333333333333");
        let n = Num::new(&ratio(-5, 2));
        assert_eq!(n.exact, "-5/2");
        assert_eq!(n.decimal, "-2.5");
    }

    #[test]
    fn csv_flattens_to_dotted_keys() {
        let report = Report {
            method: "exact".to_string(),
            revenue: Some(Num::new(&ratio(1, 2))),
            payments: Some(vec![Num::new(&ratio(1, 4)), Num::new(&ratio(0, 1))]),
            converged: Some(true),
            ..Report::default()
        };
        let csv = render(&report, OutputFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "field,value");
        assert!(lines.contains(&"method,exact"));
        assert!(lines.contains(&"revenue.exact,1/2"));
        assert!(lines.contains(&"payments.0.exact,1/4"));
        assert!(lines.contains(&"converged,true"));
    }

    #[test]
    fn infinite_bounds_serialize_as_a_bare_string() {
        let report = Report {
            method: "equilibria".to_string(),
            poa: Some(BoundDoc::new(&RatioBound::Infinite)),
            pos: Some(BoundDoc::new(&RatioBound::Finite(ratio(3, 2)))),
            ..Report::default()
        };
        let json = render(&report, OutputFormat::Json);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["poa"], "infinite");
        assert_eq!(v["pos"]["exact"], "3/2");
    }
}
