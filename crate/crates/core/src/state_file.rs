//! JSON state documents: `{"dims": [2, 2], "matrix": [[[re, im], …], …]}`.

use serde::{Deserialize, Serialize};

use crate::basis::CMatrix;
use crate::error::{QcorrError, Result};
use crate::state::DensityMatrix;
use crate::Complex64;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDocument {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Parses and validates a state document. Syntax and shape problems are
/// [`QcorrError::Parse`]; physical problems keep their validation error.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let doc: StateDocument = serde_json::from_str(text).map_err(|e| {
        QcorrError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    if doc.dims.is_empty() {
        return Err(QcorrError::Parse("field 'dims' is empty".into()));
    }
    let total: usize = doc.dims.iter().product();
    if doc.matrix.len() != total {
        return Err(QcorrError::Parse(format!(
            "field 'matrix' has {} rows, dims {:?} need {total}",
            doc.matrix.len(),
            doc.dims
        )));
    }
    let mut m = CMatrix::zeros(total, total);
    for (r, row) in doc.matrix.iter().enumerate() {
        if row.len() != total {
            return Err(QcorrError::Parse(format!(
                "field 'matrix' row {r} has {} entries, expected {total}",
                row.len()
            )));
        }
        for (c, v) in row.iter().enumerate() {
            m[(r, c)] = Complex64::new(v[0], v[1]);
        }
    }
    DensityMatrix::new(doc.dims, m)
}

pub fn format_state(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    let doc = StateDocument {
        dims: rho.dims().to_vec(),
        matrix: (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect(),
    };
    serde_json::to_string(&doc).expect("state document serializes")
}
