use std::fs;
use std::path::{Path, PathBuf};

use bandflow_core::poly::{RealPolynomial, RootList};
use serde_json::{json, Value};

use crate::CliError;

fn out_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output { path: path.display().to_string(), message: e.to_string() }
}

pub fn prepare(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    Ok(dir.join(name))
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    let path = prepare(dir, name)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| out_err(&path, e))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| out_err(&path, e))?;
    Ok(path)
}

pub fn write_csv(dir: &Path, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<PathBuf, CliError> {
    let path = prepare(dir, name)?;
    let mut w = csv::Writer::from_path(&path).map_err(|e| out_err(&path, e))?;
    w.write_record(header).map_err(|e| out_err(&path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(|e| out_err(&path, e))?;
    }
    w.flush().map_err(|e| out_err(&path, e))?;
    Ok(path)
}

/// Descending coefficients.
pub fn poly_json(p: &RealPolynomial) -> Value {
    json!(p.coeffs())
}

pub fn roots_json(r: &RootList) -> Value {
    json!({
        "real": r.roots.iter().map(|x| json!({ "value": x.value, "multiplicity": x.multiplicity })).collect::<Vec<_>>(),
        "nonreal_count": r.nonreal,
    })
}

/// `null` for non-finite values.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}
