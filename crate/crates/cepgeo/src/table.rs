//! Plain-text rendering of a JSON report.

use std::fmt::Write;

use serde_json::{Map, Value};

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn complex(v: &Value) -> Option<(f64, f64)> {
    let o = v.as_object()?;
    if o.len() != 2 {
        return None;
    }
    let part = |k: &str| o.get(k).map(|x| x.as_f64().unwrap_or(f64::NAN));
    Some((part("re")?, part("im")?))
}

fn cell((re, im): (f64, f64)) -> String {
    format!("{re:+.6e}{im:+.6e}i")
}

fn is_tensor(o: &Map<String, Value>) -> bool {
    o.contains_key("entries") && o.contains_key("labels") && o.contains_key("name")
}

fn index_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn tensor(o: &Map<String, Value>, out: &mut String) {
    let name = o["name"].as_str().unwrap_or("");
    let labels: Vec<&str> = o["labels"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    let alpha = match &o["alpha"] {
        Value::Null => String::new(),
        a => format!(" (alpha = {})", scalar(a)),
    };
    let _ = writeln!(out, "{name}{alpha}  [{}]", labels.join(", "));
    let entries = o["entries"].as_array().cloned().unwrap_or_default();
    let n = labels.len().max(1);
    for chunk in entries.chunks(n) {
        let idx: Vec<String> = chunk[0]["idx"]
            .as_array()
            .map(|a| a[..a.len() - 1].iter().map(index_label).collect())
            .unwrap_or_default();
        let cells: Vec<String> = chunk
            .iter()
            .map(|e| {
                let re = e["re"].as_f64().unwrap_or(f64::NAN);
                let im = e["im"].as_f64().unwrap_or(f64::NAN);
                format!("{:>28}", cell((re, im)))
            })
            .collect();
        let _ = writeln!(out, "  {:<8}{}", format!("[{}]", idx.join(",")), cells.join(""));
    }
}

fn value(key: &str, v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) if is_tensor(o) => tensor(o, out),
        Value::Object(o) => match complex(v) {
            Some(z) => {
                let _ = writeln!(out, "{pad}{key}: {}", cell(z));
            }
            None => {
                let _ = writeln!(out, "{pad}{key}:");
                for (k, x) in o {
                    value(k, x, depth + 1, out);
                }
            }
        },
        Value::Array(a) if a.is_empty() => {
            let _ = writeln!(out, "{pad}{key}: []");
        }
        Value::Array(a) if a.iter().all(|x| complex(x).is_some()) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, x) in a.iter().enumerate() {
                let _ = writeln!(out, "{pad}  {:>4}  {}", i + 1, cell(complex(x).unwrap()));
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            let _ = writeln!(out, "{pad}{key}: {}", items.join(", "));
        }
        Value::Array(a) => {
            let _ = writeln!(out, "{pad}{key}:");
            for x in a {
                match x {
                    Value::Object(o) if is_tensor(o) => tensor(o, out),
                    _ => value("-", x, depth + 1, out),
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar(other));
        }
    }
}

/// One line per scalar field; matrices and 3-tensors as grids whose rows are
/// indexed by all but the last slot.
pub fn render(report: &Value) -> String {
    let mut out = String::new();
    match report {
        Value::Object(o) => {
            for (k, v) in o {
                value(k, v, 0, &mut out);
            }
        }
        other => value("value", other, 0, &mut out),
    }
    out
}
