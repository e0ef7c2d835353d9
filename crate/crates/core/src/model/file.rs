//! JSON model documents.

use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use super::potential::{q_complex, PotentialExpr, QComplex, Term};
use super::FrobeniusModel;
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational};

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn field<'a>(doc: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    doc.get(key).ok_or_else(|| schema(format!("missing key '{key}'")))
}

/// A rational from a JSON number (parsed through its decimal text) or a "p/q" string.
fn rational(value: &Value, what: &str) -> Result<BigRational> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(schema(format!("{what}: expected a number or \"p/q\" string"))),
    };
    parse_rational(&text).ok_or_else(|| schema(format!("{what}: cannot parse '{text}' as a rational")))
}

fn complex(value: &Value, what: &str) -> Result<QComplex> {
    match value {
        Value::Array(parts) if parts.len() == 2 => Ok(q_complex(
            rational(&parts[0], what)?,
            rational(&parts[1], what)?,
        )),
        Value::Array(_) => Err(schema(format!("{what}: complex pair must have two entries"))),
        other => Ok(q_complex(rational(other, what)?, BigRational::zero())),
    }
}

fn array<'a>(value: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| schema(format!("{what}: expected an array")))
}

/// Accepts either a flat row-major array of `dim²` entries or an array of rows.
fn square<T>(
    value: &Value,
    dim: usize,
    what: &str,
    parse: impl Fn(&Value, &str) -> Result<T>,
) -> Result<Vec<Vec<T>>> {
    let items = array(value, what)?;
    let nested = items.len() == dim
        && items.iter().all(|row| matches!(row, Value::Array(r) if r.len() == dim));
    let flat: Vec<&Value> = if nested {
        items.iter().flat_map(|row| row.as_array().unwrap()).collect()
    } else {
        items.iter().collect()
    };
    if flat.len() != dim * dim {
        return Err(schema(format!(
            "{what}: expected {} entries, got {}",
            dim * dim,
            flat.len()
        )));
    }
    let mut out = Vec::with_capacity(dim);
    for r in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for c in 0..dim {
            row.push(parse(flat[r * dim + c], &format!("{what}[{r}][{c}]"))?);
        }
        out.push(row);
    }
    Ok(out)
}

pub fn load_model(document: &str) -> Result<FrobeniusModel> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    model_from_value(&value)
}

pub fn load_model_file(path: &Path) -> Result<FrobeniusModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema(format!("cannot read {}: {e}", path.display())))?;
    load_model(&text)
}

pub fn model_from_value(value: &Value) -> Result<FrobeniusModel> {
    let doc = value
        .as_object()
        .ok_or_else(|| schema("document must be a JSON object"))?;
    let name = field(doc, "name")?
        .as_str()
        .ok_or_else(|| schema("name must be a string"))?;
    let dim = field(doc, "dim")?
        .as_u64()
        .ok_or_else(|| schema("dim must be a non-negative integer"))? as usize;
    if dim < 2 {
        return Err(schema(format!("dim must be at least 2, got {dim}")));
    }
    let eta = square(field(doc, "eta")?, dim, "eta", complex)?;
    let b = array(field(doc, "b")?, "b")?
        .iter()
        .enumerate()
        .map(|(k, v)| rational(v, &format!("b[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let c_matrix = square(field(doc, "c_matrix")?, dim, "c_matrix", rational)?;
    let truncation = field(doc, "truncation_degree")?
        .as_u64()
        .ok_or_else(|| schema("truncation_degree must be a non-negative integer"))?
        as usize;

    let mut terms = Vec::new();
    for (k, entry) in array(field(doc, "terms")?, "terms")?.iter().enumerate() {
        let what = format!("terms[{k}]");
        let obj = entry
            .as_object()
            .ok_or_else(|| schema(format!("{what}: expected an object")))?;
        let coeff = complex(field(obj, "coeff")?, &format!("{what}.coeff"))?;
        let exponents = array(field(obj, "exponents")?, &what)?
            .iter()
            .map(|v| {
                v.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| schema(format!("{what}.exponents: expected non-negative integers")))
            })
            .collect::<Result<Vec<_>>>()?;
        let exp_form = array(field(obj, "exp_form")?, &what)?
            .iter()
            .map(|v| rational(v, &format!("{what}.exp_form")))
            .collect::<Result<Vec<_>>>()?;
        terms.push(Term::new(coeff, exponents, exp_form));
    }
    let potential = PotentialExpr::new(dim, terms)?;
    FrobeniusModel::new(name, eta, b, c_matrix, potential, truncation)
}

fn rational_value(q: &BigRational) -> Value {
    if q.is_integer() {
        if let Ok(n) = i64::try_from(q.to_integer()) {
            return json!(n);
        }
    }
    Value::String(format_rational(q))
}

fn complex_value(z: &QComplex) -> Value {
    json!([rational_value(&z.re), rational_value(&z.im)])
}

/// Serializes a model to the document format read by [`load_model`].
pub fn emit_model(model: &FrobeniusModel) -> Value {
    let dim = model.dim();
    let eta: Vec<Value> = model
        .eta_exact()
        .iter()
        .flatten()
        .map(|z| {
            if z.im.is_zero() {
                rational_value(&z.re)
            } else {
                complex_value(z)
            }
        })
        .collect();
    let b: Vec<Value> = model
        .b()
        .iter()
        .map(|q| Value::String(format_rational(q)))
        .collect();
    let c_matrix: Vec<Value> = model.c_matrix().iter().flatten().map(rational_value).collect();
    let terms: Vec<Value> = model
        .potential()
        .canonical()
        .terms()
        .iter()
        .map(|t| {
            json!({
                "coeff": complex_value(&t.coeff),
                "exponents": t.exponents,
                "exp_form": t.exp_form.iter().map(rational_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "name": model.name(),
        "dim": dim,
        "eta": eta,
        "b": b,
        "c_matrix": c_matrix,
        "terms": terms,
        "truncation_degree": model.truncation_degree(),
    })
}
