//! Matrix, factorization and grid-function file formats.
//!
//! Matrix CSV: one row per line. Integer and `p/q` literals load as exact
//! rationals; a single decimal literal (`.` or exponent) makes the whole
//! matrix float. Matrix JSON: `{"rows", "cols", "entries", "scalar"}` with
//! rational entries as strings and float entries as numbers.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use nnrank_core::matcore::{AnyMatrix, ExactMatrix, FloatMatrix, Rational};
use nnrank_core::nnfactor::{AnyFactorization, NonnegFactorization};
use nnrank_core::sconelab::{GridFunction, GrowthRow};
use serde_json::{json, Value};

use crate::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a matrix file; JSON when the content starts with `{`, else CSV.
pub fn read_matrix(path: &Path) -> Result<AnyMatrix, CliError> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Format(e.to_string()))?;
        matrix_from_json(&v)
    } else {
        parse_csv_matrix(&text)
    }
}

enum Cell {
    Exact(Rational),
    Float(f64),
}

fn parse_cell(s: &str, row: usize, col: usize) -> Result<Cell, CliError> {
    let s = s.trim();
    let bad = || CliError::Format(format!("cannot parse entry {s:?} at row {row}, column {col}"));
    if s.contains(['.', 'e', 'E']) || s.eq_ignore_ascii_case("nan") || s.to_ascii_lowercase().contains("inf") {
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(CliError::Format(format!("non-finite entry at row {row}, column {col}")));
        }
        return Ok(Cell::Float(x));
    }
    let q = Rational::from_str(s).map_err(|_| bad())?;
    Ok(Cell::Exact(q))
}

pub fn parse_csv_matrix(text: &str) -> Result<AnyMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut cells: Vec<Cell> = Vec::new();
    let (mut rows, mut cols) = (0usize, 0usize);
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                CliError::Format(format!("ragged rows: expected {expected_len} entries, found {len}"))
            }
            _ => CliError::Format(e.to_string()),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        cols = record.len();
        for (j, field) in record.iter().enumerate() {
            cells.push(parse_cell(field, rows, j)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::Format("empty matrix file".into()));
    }
    build_matrix(rows, cols, cells)
}

fn build_matrix(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<AnyMatrix, CliError> {
    let all_exact = cells.iter().all(|c| matches!(c, Cell::Exact(_)));
    let m = if all_exact {
        let data = cells
            .into_iter()
            .map(|c| match c {
                Cell::Exact(q) => q,
                Cell::Float(_) => unreachable!(),
            })
            .collect();
        AnyMatrix::Exact(ExactMatrix::new(rows, cols, data).map_err(format_error)?)
    } else {
        let data = cells
            .into_iter()
            .map(|c| match c {
                Cell::Exact(q) => nnrank_core::matcore::Scalar::to_f64(&q),
                Cell::Float(x) => x,
            })
            .collect();
        AnyMatrix::Float(FloatMatrix::new(rows, cols, data).map_err(format_error)?)
    };
    Ok(m)
}

fn format_error(e: nnrank_core::Error) -> CliError {
    CliError::Format(e.to_string())
}

pub fn matrix_to_csv(m: &AnyMatrix) -> String {
    let mut out = String::new();
    match m {
        AnyMatrix::Exact(m) => {
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|q| q.to_string()).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        AnyMatrix::Float(m) => {
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|x| format_float(*x)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
    }
    out
}

/// Shortest round-trip decimal, always with a decimal point so it reloads
/// as a float.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn matrix_to_json(m: &AnyMatrix) -> Value {
    match m {
        AnyMatrix::Exact(m) => json!({
            "rows": m.rows(),
            "cols": m.cols(),
            "scalar": "rational",
            "entries": m.entries().iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        }),
        AnyMatrix::Float(m) => json!({
            "rows": m.rows(),
            "cols": m.cols(),
            "scalar": "float",
            "entries": m.entries(),
        }),
    }
}

pub fn matrix_from_json(v: &Value) -> Result<AnyMatrix, CliError> {
    let field = |name: &str| v.get(name).ok_or_else(|| CliError::Format(format!("matrix JSON lacks {name:?}")));
    let dim = |name: &str| -> Result<usize, CliError> {
        field(name)?
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| CliError::Format(format!("{name:?} must be a nonnegative integer")))
    };
    let (rows, cols) = (dim("rows")?, dim("cols")?);
    let scalar = field("scalar")?.as_str().unwrap_or_default();
    let entries = field("entries")?
        .as_array()
        .ok_or_else(|| CliError::Format("\"entries\" must be an array".into()))?;
    let cells = entries
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let (row, col) = if cols == 0 { (0, 0) } else { (idx / cols, idx % cols) };
            match (scalar, e) {
                ("rational", Value::String(s)) => Rational::from_str(s.trim())
                    .map(Cell::Exact)
                    .map_err(|_| CliError::Format(format!("cannot parse rational {s:?}"))),
                ("rational", Value::Number(n)) => match n.as_i64() {
                    Some(i) => Ok(Cell::Exact(Rational::from_integer(i.into()))),
                    None => Err(CliError::Format(format!("rational entry {n} must be an integer or a \"p/q\" string"))),
                },
                ("float", Value::Number(n)) => Ok(Cell::Float(n.as_f64().unwrap_or(f64::NAN))),
                ("float", Value::String(s)) => match parse_cell(s, row, col)? {
                    Cell::Float(x) => Ok(Cell::Float(x)),
                    Cell::Exact(q) => Ok(Cell::Float(nnrank_core::matcore::Scalar::to_f64(&q))),
                },
                ("rational" | "float", _) => Err(CliError::Format(format!("bad entry at row {row}, column {col}"))),
                (other, _) => Err(CliError::Format(format!("unknown scalar kind {other:?}"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if scalar == "float" {
        let data = cells
            .into_iter()
            .map(|c| match c {
                Cell::Float(x) => x,
                Cell::Exact(_) => unreachable!(),
            })
            .collect();
        return FloatMatrix::new(rows, cols, data).map(AnyMatrix::Float).map_err(format_error);
    }
    build_matrix(rows, cols, cells).and_then(|m| match m {
        AnyMatrix::Exact(_) => Ok(m),
        AnyMatrix::Float(_) => Err(CliError::Format("rational matrix has float entries".into())),
    })
}

pub fn factorization_to_json(f: &AnyFactorization) -> Value {
    let (l, r) = match f {
        AnyFactorization::Exact(f) => (AnyMatrix::Exact(f.left().clone()), AnyMatrix::Exact(f.right().clone())),
        AnyFactorization::Float(f) => (AnyMatrix::Float(f.left().clone()), AnyMatrix::Float(f.right().clone())),
    };
    json!({ "k": f.k(), "L": matrix_to_json(&l), "R": matrix_to_json(&r) })
}

pub fn factorization_from_json(v: &Value) -> Result<AnyFactorization, CliError> {
    let part = |name: &str| {
        v.get(name)
            .ok_or_else(|| CliError::Format(format!("factorization JSON lacks {name:?}")))
            .and_then(matrix_from_json)
    };
    let (l, r) = (part("L")?, part("R")?);
    let f = match (l, r) {
        (AnyMatrix::Exact(l), AnyMatrix::Exact(r)) => AnyFactorization::Exact(NonnegFactorization::new(l, r).map_err(format_error)?),
        (l, r) => AnyFactorization::Float(NonnegFactorization::new(l.to_float(), r.to_float()).map_err(format_error)?),
    };
    if let Some(k) = v.get("k").and_then(Value::as_u64) {
        if k as usize != f.k() {
            return Err(CliError::Format(format!("declared k = {k} but factors have inner dimension {}", f.k())));
        }
    }
    Ok(f)
}

pub fn read_factorization(path: &Path) -> Result<AnyFactorization, CliError> {
    let v: Value = serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Format(e.to_string()))?;
    factorization_from_json(&v)
}

/// Two columns `t,value` with a header.
pub fn grid_function_csv(f: &GridFunction) -> String {
    let mut out = String::from("t,value\n");
    for (i, v) in f.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", format_float(f.grid().point(i)), format_float(*v)));
    }
    out
}

/// Residuals are written with 12 significant digits.
pub fn format_residual(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from("n,rank_float,k_exact3,k_nmf,residual_at_k_minus_1\n");
    let opt = |x: Option<usize>| x.map(|k| k.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            r.rank_float,
            opt(r.k_exact3),
            opt(r.k_nmf),
            r.residual_at_k_minus_1.map(format_residual).unwrap_or_default()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rational_and_float() {
        let m = parse_csv_matrix("1,1/2\n0, 3\n").unwrap();
        assert!(matches!(m, AnyMatrix::Exact(_)));
        assert_eq!(m.rank(), 2);
        let f = parse_csv_matrix("1.5,0\n0,2\n").unwrap();
        assert!(matches!(f, AnyMatrix::Float(_)));
    }

    #[test]
    fn csv_rejections() {
        assert!(matches!(parse_csv_matrix("1,2\n3\n"), Err(CliError::Format(m)) if m.contains("ragged")));
        assert!(matches!(parse_csv_matrix("1,nan\n"), Err(CliError::Format(_))));
        assert!(matches!(parse_csv_matrix("1,inf\n"), Err(CliError::Format(_))));
        assert!(matches!(parse_csv_matrix("1,x\n"), Err(CliError::Format(_))));
        assert!(matches!(parse_csv_matrix(""), Err(CliError::Format(_))));
    }

    #[test]
    fn json_round_trips() {
        for text in ["1,1/2\n0,3\n", "0.25,1e-3\n2.0,0.0\n"] {
            let m = parse_csv_matrix(text).unwrap();
            let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
            assert_eq!(back, m);
            assert_eq!(parse_csv_matrix(&matrix_to_csv(&m)).unwrap(), m);
        }
    }

    #[test]
    fn factorization_round_trip() {
        let t = ExactMatrix::robbins();
        let f = AnyFactorization::Exact(nnrank_core::nnfactor::trivial_witness(&t).unwrap());
        let v = factorization_to_json(&f);
        assert_eq!(v["k"], 4);
        let back = factorization_from_json(&v).unwrap();
        assert_eq!(back.k(), 4);
        assert!(back.verify(&AnyMatrix::Exact(t), 0.0).unwrap());
        let mut bad = v.clone();
        bad["k"] = json!(3);
        assert!(factorization_from_json(&bad).is_err());
    }

    #[test]
    fn float_format_reloads_as_float() {
        assert_eq!(format_float(2.0), "2.0");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_residual(0.0), "0.00000000000e0");
    }
}
