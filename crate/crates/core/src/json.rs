//! JSON documents for bases, plant models, systems and reports.
//!
//! Complex numbers are `[re, im]` pairs. Generator and tensor indices are
//! 1-based, so `[1, 2, 3, 1.0]` in `"f"` is `f₁₂₃ = 1`.

use ndarray::{Array1, Array2};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{GellMannBasis, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::realization::{PlantModel, QsdeSystem, RealizabilityReport};

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub n: usize,
    pub s: usize,
    /// `lambdas[k][row][col]`.
    pub lambdas: Vec<Vec<Vec<Complex>>>,
    /// Canonical entries `i < j < k`.
    pub f: Vec<(usize, usize, usize, f64)>,
    /// Canonical entries `i ≤ j ≤ k`.
    pub d: Vec<(usize, usize, usize, f64)>,
}

impl BasisDoc {
    pub fn new(basis: &GellMannBasis, sc: &StructureConstants) -> Self {
        let lambdas = basis
            .lambdas()
            .iter()
            .map(|m| {
                m.rows()
                    .into_iter()
                    .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            })
            .collect();
        let one_based = |e: &crate::algebra::TensorEntry| (e.i + 1, e.j + 1, e.k + 1, e.value);
        BasisDoc {
            n: basis.n(),
            s: basis.s(),
            lambdas,
            f: sc.f_canonical().iter().map(one_based).collect(),
            d: sc.d_canonical().iter().map(one_based).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantModelDoc {
    pub n: usize,
    pub n_w: usize,
    pub alpha: Vec<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Vec<Complex>>,
}

impl From<&PlantModel> for PlantModelDoc {
    fn from(m: &PlantModel) -> Self {
        PlantModelDoc {
            n: m.n(),
            n_w: m.n_w(),
            alpha: m.alpha().to_vec(),
            lambda: m
                .lambda()
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<PlantModelDoc> for PlantModel {
    type Error = Error;

    fn try_from(doc: PlantModelDoc) -> Result<Self> {
        let s = expected_s(doc.n)?;
        if doc.lambda.len() != doc.n_w {
            return Err(Error::dims("rows of Lambda", doc.n_w, doc.lambda.len()));
        }
        let mut lambda = CMatrix::zeros((doc.n_w, s));
        for (k, row) in doc.lambda.iter().enumerate() {
            if row.len() != s {
                return Err(Error::dims(format!("Lambda row {}", k + 1), s, row.len()));
            }
            for (j, z) in row.iter().enumerate() {
                lambda[[k, j]] = c(z[0], z[1]);
            }
        }
        PlantModel::new(doc.n, Array1::from(doc.alpha), lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QsdeSystemDoc {
    pub n: usize,
    pub n_w: usize,
    #[serde(rename = "A0")]
    pub a0: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B1")]
    pub b1: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "B2")]
    pub b2: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "C1")]
    pub c1: Vec<Vec<f64>>,
    #[serde(rename = "C2")]
    pub c2: Vec<Vec<f64>>,
}

fn rows_of(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn matrix(what: &str, rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<Array2<f64>> {
    if rows.len() != nrows {
        return Err(Error::dims(format!("rows of {what}"), nrows, rows.len()));
    }
    let mut out = Array2::zeros((nrows, ncols));
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::dims(format!("{what} row {}", i + 1), ncols, r.len()));
        }
        out.row_mut(i)
            .assign(&ndarray::ArrayView1::from(r.as_slice()));
    }
    Ok(out)
}

fn expected_s(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::DegenerateAlgebra { n });
    }
    Ok(n * n - 1)
}

impl From<&QsdeSystem> for QsdeSystemDoc {
    fn from(sys: &QsdeSystem) -> Self {
        QsdeSystemDoc {
            n: sys.n,
            n_w: sys.n_w(),
            a0: sys.a0.to_vec(),
            a: rows_of(&sys.a),
            b1: sys.b1.iter().map(rows_of).collect(),
            b2: sys.b2.iter().map(rows_of).collect(),
            c1: rows_of(&sys.c1),
            c2: rows_of(&sys.c2),
        }
    }
}

impl TryFrom<QsdeSystemDoc> for QsdeSystem {
    type Error = Error;

    fn try_from(doc: QsdeSystemDoc) -> Result<Self> {
        let s = expected_s(doc.n)?;
        let n_w = doc.n_w;
        if doc.a0.len() != s {
            return Err(Error::dims("A0", s, doc.a0.len()));
        }
        for (what, blocks) in [("B1", &doc.b1), ("B2", &doc.b2)] {
            if blocks.len() != n_w {
                return Err(Error::dims(
                    format!("number of {what} blocks"),
                    n_w,
                    blocks.len(),
                ));
            }
        }
        let blocks = |what: &str, bs: &[Vec<Vec<f64>>]| -> Result<Vec<Array2<f64>>> {
            bs.iter()
                .enumerate()
                .map(|(k, b)| matrix(&format!("{what}[{}]", k + 1), b, s, s))
                .collect()
        };
        let sys = QsdeSystem {
            n: doc.n,
            a0: Array1::from(doc.a0),
            a: matrix("A", &doc.a, s, s)?,
            b1: blocks("B1", &doc.b1)?,
            b2: blocks("B2", &doc.b2)?,
            c1: matrix("C1", &doc.c1, n_w, s)?,
            c2: matrix("C2", &doc.c2, n_w, s)?,
        };
        sys.validate()?;
        Ok(sys)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDoc {
    /// Roman numeral label, `"i"` to `"v"`.
    pub condition: String,
    pub name: crate::realization::Condition,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub pass: bool,
    pub tolerance: f64,
    pub conditions: Vec<ConditionDoc>,
    pub swapped_pairing_norm: f64,
    pub drift_offset_abs_residual: f64,
    pub recovered: Option<PlantModelDoc>,
}

impl From<&RealizabilityReport> for ReportDoc {
    fn from(r: &RealizabilityReport) -> Self {
        ReportDoc {
            pass: r.pass,
            tolerance: r.tolerance,
            conditions: r
                .conditions
                .iter()
                .map(|c| ConditionDoc {
                    condition: c.condition.label().to_string(),
                    name: c.condition,
                    residual: c.residual,
                    pass: c.pass,
                })
                .collect(),
            swapped_pairing_norm: r.swapped_pairing_norm,
            drift_offset_abs_residual: r.drift_offset_abs_residual,
            recovered: r.recovered.as_ref().map(PlantModelDoc::from),
        }
    }
}

/// Parses a document, reporting syntax and type errors as
/// [`Error::Malformed`].
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn parse_model(text: &str) -> Result<PlantModel> {
    parse::<PlantModelDoc>(text)?.try_into()
}

pub fn parse_system(text: &str) -> Result<QsdeSystem> {
    parse::<QsdeSystemDoc>(text)?.try_into()
}

/// Compact JSON followed by a newline.
pub fn to_string<T: Serialize>(doc: &T) -> String {
    let mut text =
        serde_json::to_string(doc).expect("documents contain only strings, numbers and arrays");
    text.push('\n');
    text
}
