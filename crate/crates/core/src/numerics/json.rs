//! Matrix JSON: `{"dim": m, "entries": [[re, im], ...]}`, row-major.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, NumericsError};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = NumericsError;

    fn try_from(value: MatrixJson) -> Result<Self, Self::Error> {
        if value.dim == 0 {
            return Err(NumericsError::Empty);
        }
        let data: Vec<C64> = value.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let m = ComplexMatrix::from_row_major(value.dim, value.dim, data)?;
        if !m.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        Ok(m)
    }
}

impl TryFrom<&ComplexMatrix> for MatrixJson {
    type Error = NumericsError;

    fn try_from(m: &ComplexMatrix) -> Result<Self, Self::Error> {
        let dim = m.dim()?;
        Ok(MatrixJson { dim, entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect() })
    }
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix, NumericsError> {
    let raw: MatrixJson = serde_json::from_str(text).map_err(|e| NumericsError::Parse(e.to_string()))?;
    raw.try_into()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Result<String, NumericsError> {
    let raw = MatrixJson::try_from(m)?;
    serde_json::to_string(&raw).map_err(|e| NumericsError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_row_major() {
        let m = matrix_from_json(r#"{"dim": 2, "entries": [[1,0],[2,0.5],[3,0],[4,-1]]}"#).unwrap();
        assert_eq!(m[(0, 1)], C64::new(2.0, 0.5));
        assert_eq!(m[(1, 1)], C64::new(4.0, -1.0));
        let back = matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matrix_from_json(r#"{"dim": 2, "entries": [[1,0]]}"#).is_err());
        assert!(matrix_from_json(r#"{"dim": 0, "entries": []}"#).is_err());
        assert!(matrix_from_json(r#"{"dim": 1}"#).is_err());
        assert!(matrix_from_json("not json").is_err());
    }
}
