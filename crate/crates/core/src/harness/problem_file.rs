//! JSON problem files.
//!
//! ```json
//! {"kind": "lp",   "n": 3, "l": 1, "G": [1, 1, 1], "h": [1], "d": [1, 2, 3]}
//! {"kind": "socp", "n": 3, "l": 1, "G": [...], "h": [...], "d": [...]}
//! {"kind": "cs",   "p": 4, "q": 2, "H": [...], "h": [...], "xi": 0.001}
//! ```
//!
//! Matrices are row-major. `"qp"` is accepted for `"socp"`. Generated instances
//! may also carry `seed` and, for cs, `z_star`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cs::{CsProblem, SparseSignal};
use crate::error::{Error, Result};
use crate::mathprog::{LpProblem, SocpProblem};
use crate::numerics::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeProblemFile {
    pub n: usize,
    pub l: usize,
    #[serde(rename = "G")]
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsProblemFile {
    pub p: usize,
    pub q: usize,
    #[serde(rename = "H")]
    pub sensing: Vec<f64>,
    pub h: Vec<f64>,
    pub xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemFile {
    Lp(ConeProblemFile),
    #[serde(alias = "qp")]
    Socp(ConeProblemFile),
    Cs(CsProblemFile),
}

fn matrix(rows: usize, cols: usize, data: &[f64], name: &str) -> Result<Matrix<f64>> {
    Matrix::from_row_major(rows, cols, data.to_vec()).map_err(|_| Error::Parse {
        line: 0,
        message: format!("`{name}` has {} entries, expected {rows}x{cols}", data.len()),
    })
}

impl ConeProblemFile {
    pub fn parts(&self) -> Result<(Vec<f64>, Matrix<f64>, Vec<f64>)> {
        Ok((self.d.clone(), matrix(self.l, self.n, &self.g, "G")?, self.h.clone()))
    }

    pub fn from_parts(cost: &[f64], g: &Matrix<f64>, h: &[f64], seed: Option<u64>) -> Self {
        Self { n: g.cols(), l: g.rows(), g: g.as_slice().to_vec(), h: h.to_vec(), d: cost.to_vec(), seed }
    }

    pub fn to_lp(&self) -> Result<LpProblem<f64>> {
        let (d, g, h) = self.parts()?;
        LpProblem::new(d, g, h)
    }

    pub fn to_socp(&self) -> Result<SocpProblem<f64>> {
        let (d, g, h) = self.parts()?;
        SocpProblem::new(d, g, h)
    }
}

impl CsProblemFile {
    pub fn to_problem(&self) -> Result<CsProblem<f64>> {
        CsProblem::new(matrix(self.q, self.p, &self.sensing, "H")?, self.h.clone(), self.xi)
    }

    pub fn truth(&self) -> Option<SparseSignal<f64>> {
        self.z_star.clone().map(SparseSignal::new)
    }

    pub fn from_problem(p: &CsProblem<f64>, z_star: Option<&SparseSignal<f64>>, seed: Option<u64>) -> Self {
        Self {
            p: p.signal_dim(),
            q: p.measurement_dim(),
            sensing: p.sensing.as_slice().to_vec(),
            h: p.measurements.clone(),
            xi: p.noise_bound,
            z_star: z_star.map(|z| z.values.clone()),
            seed,
        }
    }
}

impl ProblemFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemFile::Lp(_) => "lp",
            ProblemFile::Socp(_) => "socp",
            ProblemFile::Cs(_) => "cs",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    ProblemFile::parse(&std::fs::read_to_string(path)?)
}

pub fn write_problem(path: impl AsRef<Path>, problem: &ProblemFile) -> Result<()> {
    std::fs::write(path, problem.to_json()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lp() {
        let f = ProblemFile::parse(r#"{"kind":"lp","n":3,"l":1,"G":[1,1,1],"h":[1],"d":[1,2,3]}"#).unwrap();
        let ProblemFile::Lp(lp) = &f else { panic!("expected lp") };
        let p = lp.to_lp().unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.eq_matrix.row(0), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn qp_alias_and_round_trip() {
        let f = ProblemFile::parse(r#"{"kind":"qp","n":2,"l":1,"G":[1,0],"h":[1],"d":[0,1],"seed":7}"#).unwrap();
        assert_eq!(f.kind(), "socp");
        assert_eq!(ProblemFile::parse(&f.to_json().unwrap()).unwrap(), f);
    }

    #[test]
    fn cs_round_trip() {
        let p = CsProblem::new(Matrix::from_rows(&[vec![1.0, 0.0, 2.0]]).unwrap(), vec![1.0], 0.01).unwrap();
        let z = SparseSignal::new(vec![1.0, 0.0, 0.0]);
        let f = ProblemFile::Cs(CsProblemFile::from_problem(&p, Some(&z), Some(3)));
        let back = ProblemFile::parse(&f.to_json().unwrap()).unwrap();
        let ProblemFile::Cs(cs) = back else { panic!("expected cs") };
        assert_eq!(cs.to_problem().unwrap(), p);
        assert_eq!(cs.truth().unwrap(), z);
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        assert!(matches!(ProblemFile::parse("{\"kind\":\"lp\",\n\"n\":"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ProblemFile::parse(r#"{"kind":"svm"}"#), Err(Error::Parse { .. })));
        let bad = ProblemFile::parse(r#"{"kind":"lp","n":3,"l":1,"G":[1,1],"h":[1],"d":[1,2,3]}"#).unwrap();
        let ProblemFile::Lp(lp) = bad else { panic!() };
        assert!(matches!(lp.to_lp(), Err(Error::Parse { .. })));
    }
}
