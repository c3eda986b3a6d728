//! Principal component analysis on top of the crossbar eigensolver.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::crossbar::CrossbarConfig;
use crate::crossbar::Programmer;
use crate::eigen::{top_k_eigen_with, PiConfig};
use crate::error::{Error, Result};
use crate::numerics::vector::canonicalize_sign;
use crate::numerics::{sym_eig_oracle, Matrix, SeededRng};
use crate::scalar::Real;

pub const IRIS_SAMPLES: usize = 150;
pub const IRIS_FEATURES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    /// `m × f` sample matrix.
    pub values: Matrix<T>,
    pub labels: Option<Vec<String>>,
}

impl<T: Real> Dataset<T> {
    pub fn new(values: Matrix<T>, labels: Option<Vec<String>>) -> Result<Self> {
        if !values.all_finite() {
            return Err(Error::InvalidConfig("dataset contains non-finite values".into()));
        }
        if let Some(l) = &labels {
            if l.len() != values.rows() {
                return Err(Error::DimensionMismatch { expected: values.rows(), found: l.len() });
            }
        }
        Ok(Self { values, labels })
    }

    pub fn samples(&self) -> usize {
        self.values.rows()
    }

    pub fn features(&self) -> usize {
        self.values.cols()
    }

    /// Per-label sample counts.
    pub fn label_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for l in self.labels.iter().flatten() {
            *counts.entry(l.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn column_means(&self) -> Vec<T> {
        let m = T::from_count(self.samples());
        (0..self.features()).map(|j| (0..self.samples()).map(|i| self.values[(i, j)]).sum::<T>() / m).collect()
    }

    pub fn centered(&self) -> Matrix<T> {
        let means = self.column_means();
        Matrix::from_fn(self.samples(), self.features(), |i, j| self.values[(i, j)] - means[j])
    }

    /// Columns centered and scaled to unit sample standard deviation; constant
    /// columns are left at zero.
    pub fn standardized(&self) -> Matrix<T> {
        let c = self.centered();
        let denom = T::from_count(self.samples().saturating_sub(1).max(1));
        let sd: Vec<T> = (0..self.features())
            .map(|j| ((0..self.samples()).map(|i| c[(i, j)] * c[(i, j)]).sum::<T>() / denom).sqrt())
            .collect();
        Matrix::from_fn(c.rows(), c.cols(), |i, j| if sd[j] > T::zero() { c[(i, j)] / sd[j] } else { T::zero() })
    }
}

/// Sample covariance `XᵀX / (m − 1)` of the column-centered data.
pub fn covariance<T: Real>(data: &Dataset<T>) -> Result<Matrix<T>> {
    if data.samples() < 2 {
        return Err(Error::TooFewSamples { samples: data.samples() });
    }
    Ok(scatter(&data.centered()))
}

fn scatter<T: Real>(centered: &Matrix<T>) -> Matrix<T> {
    let denom = T::from_count(centered.rows() - 1);
    let mut c = centered.gram().scale(T::one() / denom);
    // Exact symmetry for the downstream symmetry check.
    for i in 0..c.rows() {
        for j in 0..i {
            c[(i, j)] = c[(j, i)];
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PcaOptions {
    /// Use the correlation matrix instead of the raw covariance.
    pub standardize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult<T> {
    pub components: Vec<Vec<T>>,
    pub variances: Vec<T>,
    /// `m × k` scores: centered (or standardized) data times components.
    pub projected: Matrix<T>,
    pub programs: usize,
}

impl<T: Real> PcaResult<T> {
    pub fn k(&self) -> usize {
        self.components.len()
    }
}

fn prepared<T: Real>(data: &Dataset<T>, k: usize, options: PcaOptions) -> Result<Matrix<T>> {
    if data.samples() < 2 {
        return Err(Error::TooFewSamples { samples: data.samples() });
    }
    if k > data.features() {
        return Err(Error::InvalidConfig(format!("k = {k} exceeds {} features", data.features())));
    }
    Ok(if options.standardize { data.standardized() } else { data.centered() })
}

fn project<T: Real>(x: &Matrix<T>, components: &[Vec<T>]) -> Result<Matrix<T>> {
    if components.is_empty() {
        return Ok(Matrix::zeros(x.rows(), 0));
    }
    x.matmul(&Matrix::from_columns(components)?)
}

pub fn pca_with<T: Real>(
    data: &Dataset<T>,
    k: usize,
    cfg: &PiConfig<T>,
    options: PcaOptions,
    programmer: &mut Programmer<T>,
) -> Result<PcaResult<T>> {
    let x = prepared(data, k, options)?;
    let decomposition = top_k_eigen_with(&scatter(&x), k, cfg, programmer)?;
    let variances = decomposition.pairs.iter().map(|(l, _)| l.max(T::zero())).collect();
    let components: Vec<Vec<T>> = decomposition.pairs.into_iter().map(|(_, u)| u).collect();
    let projected = project(&x, &components)?;
    Ok(PcaResult { components, variances, projected, programs: decomposition.programs })
}

pub fn pca<T: Real>(
    data: &Dataset<T>,
    k: usize,
    cfg: &PiConfig<T>,
    options: PcaOptions,
    variation: T,
    rng: SeededRng,
) -> Result<PcaResult<T>> {
    let mut programmer = Programmer::new(CrossbarConfig::default(), variation, rng);
    pca_with(data, k, cfg, options, &mut programmer)
}

/// Reference PCA from the Jacobi eigensolver, with the same sign convention.
pub fn oracle_pca<T: Real>(data: &Dataset<T>, k: usize, options: PcaOptions) -> Result<PcaResult<T>> {
    let x = prepared(data, k, options)?;
    let pairs = sym_eig_oracle(&scatter(&x))?;
    let mut components = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for p in pairs.into_iter().take(k) {
        let mut v = p.vector;
        canonicalize_sign(&mut v);
        components.push(v);
        variances.push(p.value.max(T::zero()));
    }
    let projected = project(&x, &components)?;
    Ok(PcaResult { components, variances, projected, programs: 0 })
}

/// `‖X − scores · componentsᵀ‖_F` for the prepared data matrix `X`.
pub fn reconstruction_error<T: Real>(data: &Dataset<T>, result: &PcaResult<T>, options: PcaOptions) -> Result<T> {
    let x = prepared(data, result.k(), options)?;
    let mut err = T::zero();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let approx: T = (0..result.k()).map(|c| result.projected[(i, c)] * result.components[c][j]).sum();
            let d = x[(i, j)] - approx;
            err = err + d * d;
        }
    }
    Ok(err.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShapePolicy {
    /// Log a warning when the shape differs from 150 × 4.
    #[default]
    Warn,
    Strict,
}

/// Path of the Iris CSV shipped with this crate.
pub fn bundled_iris_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("iris.csv")
}

/// Reads numeric columns plus an optional trailing label column. A first row
/// with a non-numeric leading field is taken as a header.
pub fn load_csv_dataset<T: Real>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_path(path.as_ref())?;
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut width: Option<(usize, bool)> = None;
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(index + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let first_numeric = record.get(0).is_some_and(|f| f.parse::<f64>().is_ok());
        if rows.is_empty() && width.is_none() && !first_numeric {
            width = Some((0, false));
            continue;
        }
        let fields: Vec<&str> = record.iter().collect();
        let labelled = fields.last().is_some_and(|f| f.parse::<f64>().is_err());
        let numeric = if labelled { &fields[..fields.len() - 1] } else { &fields[..] };
        let mut row = Vec::with_capacity(numeric.len());
        for f in numeric {
            let v: f64 = f.parse().map_err(|_| Error::Parse { line, message: format!("`{f}` is not a number") })?;
            row.push(T::lit(v));
        }
        match width {
            Some((w, l)) if w > 0 && (w != row.len() || l != labelled) => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} numeric fields, found {}", row.len()),
                });
            }
            _ => width = Some((row.len(), labelled)),
        }
        if labelled {
            labels.push(fields[fields.len() - 1].to_string());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, message: "no data rows".into() });
    }
    let labels = (!labels.is_empty()).then_some(labels);
    Dataset::new(Matrix::from_rows(&rows)?, labels)
}

pub fn load_iris<T: Real>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    load_iris_with(path, ShapePolicy::Warn)
}

pub fn load_iris_with<T: Real>(path: impl AsRef<Path>, policy: ShapePolicy) -> Result<Dataset<T>> {
    let data = load_csv_dataset(path)?;
    if data.samples() != IRIS_SAMPLES || data.features() != IRIS_FEATURES {
        let found = format!("{}x{}", data.samples(), data.features());
        match policy {
            ShapePolicy::Strict => {
                return Err(Error::WrongShape { expected: format!("{IRIS_SAMPLES}x{IRIS_FEATURES}"), found })
            }
            ShapePolicy::Warn => log::warn!("iris data has shape {found}, expected {IRIS_SAMPLES}x{IRIS_FEATURES}"),
        }
    }
    Ok(data)
}

/// Writes scores as `pc1,...,pck[,label]`.
pub fn write_scores<T: Real>(path: impl AsRef<Path>, result: &PcaResult<T>, labels: Option<&[String]>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let mut header: Vec<String> = (1..=result.k()).map(|c| format!("pc{c}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for i in 0..result.projected.rows() {
        let mut fields: Vec<String> = result.projected.row(i).iter().map(|v| format!("{v}")).collect();
        if let Some(l) = labels {
            fields.push(l[i].clone());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}
