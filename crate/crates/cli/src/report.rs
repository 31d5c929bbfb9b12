//! JSON report assembly. Reports print with sorted keys and contain no
//! wall-clock data, so equal configurations yield byte-identical output.

use chevring::{Mat, Ring};
use serde_json::Value;
use std::path::Path;

pub fn mat_value(ring: &Ring, m: &Mat) -> Value {
    Value::Array(
        (0..m.n)
            .map(|r| {
                Value::Array(
                    (0..m.n).map(|c| Value::String(ring.fmt_elem(m.get(r, c)))).collect(),
                )
            })
            .collect(),
    )
}

pub fn int_mat_value(n: usize, entries: impl Iterator<Item = (usize, usize, i64)>) -> Value {
    let mut rows = vec![vec![0i64; n]; n];
    for (r, c, v) in entries {
        rows[r][c] = v;
    }
    Value::Array(
        rows.into_iter()
            .map(|row| Value::Array(row.into_iter().map(|v| Value::Number(v.into())).collect()))
            .collect(),
    )
}

pub fn emit(out: Option<&Path>, value: &Value) -> std::io::Result<()> {
    let text = format!("{value:#}\n");
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
