//! Evaluation reports: `node,method,metric,value` CSV.
//!
//! Per-node rows come first, in the order given; then one `mean` row per
//! (method, metric) pair in first-appearance order.

use std::io::{self, Write};

pub const EVAL_HEADER: &str = "node,method,metric,value";

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub node: String,
    pub method: String,
    pub metric: String,
    pub value: f64,
}

/// Mean value per (method, metric).
pub fn summarize(rows: &[EvalRow]) -> Vec<EvalRow> {
    let mut groups: Vec<(String, String, f64, usize)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|g| g.0 == r.method && g.1 == r.metric) {
            Some(g) => {
                g.2 += r.value;
                g.3 += 1;
            }
            None => groups.push((r.method.clone(), r.metric.clone(), r.value, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(method, metric, sum, n)| EvalRow { node: "mean".into(), method, metric, value: sum / n as f64 })
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_eval_csv(rows: &[EvalRow], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{EVAL_HEADER}")?;
    for r in rows.iter().chain(&summarize(rows)) {
        writeln!(w, "{},{},{},{}", csv_field(&r.node), csv_field(&r.method), csv_field(&r.metric), r.value)?;
    }
    Ok(())
}
