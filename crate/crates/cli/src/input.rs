//! Matrix-set files: `{"dim": d, "matrices": [{"rows": [[{"re": x, "im": y}, ...], ...]}, ...]}`.

use std::path::Path;

use jsrlab_core::norms::NormSpec;
use jsrlab_core::{CMatrix, MatrixSet, C64};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub fn load_matrix_set(path: &Path) -> Result<MatrixSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(path.display().to_string(), e.to_string()))?;
    parse_matrix_set(&text)
}

pub fn parse_matrix_set(text: &str) -> Result<MatrixSet> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::input("$", format!("malformed JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| CliError::input("$", "expected an object"))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::input("dim", "expected a positive integer"))? as usize;
    if dim == 0 {
        return Err(CliError::input("dim", "expected a positive integer"));
    }
    let matrices = obj
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input("matrices", "expected an array"))?;
    if matrices.is_empty() {
        return Err(CliError::input("matrices", "at least one matrix is required"));
    }
    let members = matrices
        .iter()
        .enumerate()
        .map(|(i, m)| parse_matrix(m, dim, &format!("matrices[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixSet::new(members)?)
}

fn parse_matrix(m: &Value, dim: usize, path: &str) -> Result<CMatrix> {
    let rows = m
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input(format!("{path}.rows"), "expected an array"))?;
    if rows.len() != dim {
        return Err(CliError::input(
            format!("{path}.rows"),
            format!("expected {dim} rows, found {}", rows.len()),
        ));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (r, row) in rows.iter().enumerate() {
        let rpath = format!("{path}.rows[{r}]");
        let row = row.as_array().ok_or_else(|| CliError::input(&rpath, "expected an array"))?;
        if row.len() != dim {
            return Err(CliError::input(&rpath, format!("expected {dim} entries, found {}", row.len())));
        }
        for (c, entry) in row.iter().enumerate() {
            data.push(parse_complex(entry, &format!("{rpath}[{c}]"))?);
        }
    }
    Ok(CMatrix::new(dim, data)?)
}

fn parse_complex(v: &Value, path: &str) -> Result<C64> {
    let part = |key: &str| -> Result<f64> {
        let x = v
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| CliError::input(format!("{path}.{key}"), "expected a number"))?;
        if !x.is_finite() {
            return Err(CliError::input(format!("{path}.{key}"), "non-finite entry"));
        }
        Ok(x)
    };
    if !v.is_object() {
        return Err(CliError::input(path, "expected {\"re\": number, \"im\": number}"));
    }
    Ok(C64::new(part("re")?, part("im")?))
}

/// Serializes a set in the input schema.
pub fn matrix_set_json(set: &MatrixSet) -> Value {
    let matrices: Vec<Value> = set
        .iter()
        .map(|m| {
            let rows: Vec<Vec<Value>> = m
                .rows()
                .iter()
                .map(|row| row.iter().map(|z| json!({"re": z.re, "im": z.im})).collect())
                .collect();
            json!({ "rows": rows })
        })
        .collect();
    json!({ "dim": set.dim(), "matrices": matrices })
}

/// `euclidean`, `sup`, `entry-sup` or `ellipsoidal:<file>`, where the file
/// holds a single matrix `W` in the matrix-set schema.
pub fn parse_norm(arg: &str) -> Result<NormSpec> {
    match arg {
        "euclidean" => Ok(NormSpec::Euclidean),
        "sup" => Ok(NormSpec::VectorSup),
        "entry-sup" => Ok(NormSpec::EntrySup),
        _ => {
            let file = arg
                .strip_prefix("ellipsoidal:")
                .ok_or_else(|| CliError::usage(format!("unknown norm '{arg}'")))?;
            let set = load_matrix_set(Path::new(file))?;
            if set.len() != 1 {
                return Err(CliError::input("matrices", "an ellipsoidal norm file holds exactly one matrix"));
            }
            Ok(NormSpec::ellipsoidal(set.get(0).clone())?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(err: CliError) -> String {
        match err {
            CliError::Input { path, .. } => path,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn singleton() {
        let s = parse_matrix_set(r#"{"dim": 1, "matrices": [{"rows": [[{"re": 2, "im": 0}]]}]}"#).unwrap();
        assert_eq!((s.len(), s.dim()), (1, 1));
        assert_eq!(s.get(0).as_slice()[0], C64::new(2.0, 0.0));
    }

    #[test]
    fn round_trips_gripenberg() {
        let g = MatrixSet::gripenberg();
        let back = parse_matrix_set(&matrix_set_json(&g).to_string()).unwrap();
        assert!(back.get(0).approx_eq(g.get(0), 0.0) && back.get(1).approx_eq(g.get(1), 0.0));
    }

    #[test]
    fn errors_name_the_index_path() {
        let ragged = r#"{"dim": 2, "matrices": [{"rows": [
            [{"re": 1, "im": 0}, {"re": 0, "im": 0}],
            [{"re": 1, "im": 0}, {"re": 0, "im": 0}, {"re": 0, "im": 0}]]}]}"#;
        assert_eq!(path_of(parse_matrix_set(ragged).unwrap_err()), "matrices[0].rows[1]");
        let missing = r#"{"dim": 1, "matrices": [{"rows": [[{"re": 1}]]}]}"#;
        assert_eq!(path_of(parse_matrix_set(missing).unwrap_err()), "matrices[0].rows[0][0].im");
        assert_eq!(path_of(parse_matrix_set("{\"dim\": 1").unwrap_err()), "$");
        assert_eq!(path_of(parse_matrix_set(r#"{"dim": 0, "matrices": []}"#).unwrap_err()), "dim");
        assert_eq!(path_of(parse_matrix_set(r#"{"dim": 1, "matrices": []}"#).unwrap_err()), "matrices");
    }

    #[test]
    fn norms() {
        assert!(matches!(parse_norm("sup").unwrap(), NormSpec::VectorSup));
        assert!(matches!(parse_norm("frobenius"), Err(CliError::Usage(_))));
    }
}
