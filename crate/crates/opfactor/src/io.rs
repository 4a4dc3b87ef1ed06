//! Matrix serialization: CSV with complex cells and a JSON schema.
//!
//! CSV: one matrix row per line, cells comma-separated.  A cell is either a
//! plain real (`1.5`, `-3e-2`) or a complex `a+bi` / `a-bi` with an optional
//! bare imaginary part (`2i`, `-i`).  Writing uses the shortest decimal
//! representation that round-trips the underlying `f64`, so write→parse is
//! bit-exact.
//!
//! JSON: `{"rows": R, "cols": C, "data": [[re, im], …]}` with `data` in
//! row-major order.  [`read_matrix_file`]/[`write_matrix_file`] dispatch on
//! the `.json` extension and fall back to CSV for everything else.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpfactorError, Result};
use crate::matrix::ComplexMatrix;

/// Formats one complex cell the way the CSV reader expects it.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{}", z.re)
    } else if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_coefficient(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s
            .parse::<f64>()
            .map_err(|_| OpfactorError::Parse(format!("invalid numeric literal '{s}'"))),
    }
}

/// Parses one CSV cell into a complex number.
pub fn parse_complex(cell: &str) -> Result<Complex64> {
    let s = cell.trim();
    if s.is_empty() {
        return Err(OpfactorError::Parse("empty cell".to_string()));
    }
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // Split at the last sign that starts the imaginary part: not the
        // leading sign, and not an exponent sign as in `1e-3`.
        let mut split = None;
        let chars: Vec<char> = body.chars().collect();
        for (idx, &ch) in chars.iter().enumerate().skip(1) {
            if (ch == '+' || ch == '-') && !matches!(chars[idx - 1], 'e' | 'E') {
                split = Some(idx);
            }
        }
        match split {
            None => Ok(Complex64::new(0.0, parse_coefficient(body)?)),
            Some(k) => {
                let re: f64 = body[..k]
                    .parse()
                    .map_err(|_| OpfactorError::Parse(format!("invalid real part in '{s}'")))?;
                let im = parse_coefficient(&body[k..])?;
                Ok(Complex64::new(re, im))
            }
        }
    } else {
        let re: f64 = s
            .parse()
            .map_err(|_| OpfactorError::Parse(format!("invalid numeric literal '{s}'")))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Renders a matrix as CSV text with a trailing newline.
pub fn matrix_to_csv(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format_complex(m.get(r, c)));
        }
        out.push('\n');
    }
    out
}

/// Parses CSV text into a matrix; rows must all have the same width.
pub fn matrix_from_csv(text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<Complex64> = line
            .split(',')
            .map(parse_complex)
            .collect::<Result<_>>()
            .map_err(|e| OpfactorError::Parse(format!("line {}: {e}", line_no + 1)))?;
        if let Some(first) = rows.first() {
            if cells.len() != first.len() {
                return Err(OpfactorError::Parse(format!(
                    "line {}: expected {} cells, found {}",
                    line_no + 1,
                    first.len(),
                    cells.len()
                )));
            }
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(OpfactorError::Parse("no matrix rows found".to_string()));
    }
    let r = rows.len();
    let c = rows[0].len();
    ComplexMatrix::from_vec(r, c, rows.into_iter().flatten().collect())
}

/// JSON matrix form: row-major `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let data = m.to_vec().into_iter().map(|z| [z.re, z.im]).collect();
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(OpfactorError::Schema(format!(
                "matrix data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        ComplexMatrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

/// Reads a matrix from a file, JSON if the extension is `.json`, CSV
/// otherwise.
pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let mj: MatrixJson = serde_json::from_str(&text)
            .map_err(|e| OpfactorError::Schema(format!("{}: {e}", path.display())))?;
        mj.to_matrix()
    } else {
        matrix_from_csv(&text)
            .map_err(|e| OpfactorError::Parse(format!("{}: {e}", path.display())))
    }
}

/// Writes a matrix to a file in the format implied by the extension.
pub fn write_matrix_file(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let mj = MatrixJson::from(m);
        let mut s = serde_json::to_string_pretty(&mj)
            .map_err(|e| OpfactorError::Schema(e.to_string()))?;
        s.push('\n');
        s
    } else {
        matrix_to_csv(m)
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_the_documented_cell_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-3e-2").unwrap(), Complex64::new(-0.03, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("+i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("1+i").unwrap(), Complex64::new(1.0, 1.0));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex(" 3 + 0.5i ".replace(' ', "").as_str()).unwrap(),
            Complex64::new(3.0, 0.5));
        assert_eq!(parse_complex("1e+5i").unwrap(), Complex64::new(0.0, 1e5));
        assert_eq!(parse_complex("1-2e-3i").unwrap(), Complex64::new(1.0, -2e-3));
        assert_eq!(parse_complex("-1.5e2+0.25i").unwrap(), Complex64::new(-150.0, 0.25));
    }

    #[test]
    fn parse_rejects_malformed_cells() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("1++2i").is_err());
        assert!(parse_complex("2ii").is_err());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(1.0 / 3.0, -2.0 / 7.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1e-17, 0.0),
                Complex64::new(std::f64::consts::PI, -std::f64::consts::E),
            ],
        )
        .unwrap();
        let text = matrix_to_csv(&m);
        let back = matrix_from_csv(&text).unwrap();
        assert!(back == m);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(matches!(
            matrix_from_csv("1,2\n3\n"),
            Err(OpfactorError::Parse(_))
        ));
        assert!(matches!(matrix_from_csv("\n\n"), Err(OpfactorError::Parse(_))));
    }

    #[test]
    fn csv_rejects_non_finite_cells() {
        assert!(matrix_from_csv("inf,0\n0,1\n").is_err());
        assert!(matrix_from_csv("NaN\n").is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = ComplexMatrix::from_vec(
            1,
            3,
            vec![
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.0, 3.0),
                Complex64::new(1e300, -1e-300),
            ],
        )
        .unwrap();
        let mj = MatrixJson::from(&m);
        let text = serde_json::to_string(&mj).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert!(back.to_matrix().unwrap() == m);
    }

    #[test]
    fn json_schema_is_strict() {
        let bad: std::result::Result<MatrixJson, _> =
            serde_json::from_str(r#"{"rows":1,"cols":1,"data":[[0,0]],"extra":1}"#);
        assert!(bad.is_err());
        let short = MatrixJson {
            rows: 2,
            cols: 2,
            data: vec![[0.0, 0.0]],
        };
        assert!(matches!(short.to_matrix(), Err(OpfactorError::Schema(_))));
    }

    #[test]
    fn file_dispatch_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let m = ComplexMatrix::from_real_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();

        let csv_path = dir.path().join("m.csv");
        write_matrix_file(&csv_path, &m).unwrap();
        assert!(std::fs::read_to_string(&csv_path).unwrap().starts_with("1,2"));
        assert!(read_matrix_file(&csv_path).unwrap() == m);

        let json_path = dir.path().join("m.json");
        write_matrix_file(&json_path, &m).unwrap();
        assert!(std::fs::read_to_string(&json_path).unwrap().contains("\"rows\""));
        assert!(read_matrix_file(&json_path).unwrap() == m);
    }

    #[test]
    fn negative_zero_imaginary_part_is_preserved() {
        let z = Complex64::new(1.0, -0.0);
        let s = format_complex(z);
        let back = parse_complex(&s).unwrap();
        assert_eq!(back.im.to_bits(), (-0.0f64).to_bits());
    }
}
