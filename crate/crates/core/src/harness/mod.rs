//! Experiment harness: parameter sweeps, CSV output, plots and problem files.

pub mod generate;
pub mod plot;
pub mod problem_file;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admm::AdmmConfig;
use crate::crossbar::{CrossbarConfig, Programmer};
use crate::cs::{omp_baseline, solve_cs, support_error, CsProblem, SparseSignal, DEFAULT_SUPPORT_THRESHOLD};
use crate::eigen::{dominant_eigenspace, PiConfig};
use crate::error::{Error, Result};
use crate::mathprog::{solve_lp, solve_socp};
use crate::numerics::vector::{dist2, dot, relative_error};
use crate::numerics::{mix_seed, sym_eigenvalues, Matrix, SeededRng};
use crate::pca::{bundled_iris_path, load_iris, oracle_pca, pca, Dataset, PcaOptions, PcaResult};

use generate::{
    generate_cs, generate_lp_with_reference, generate_socp_with_reference, generate_sym_with_multiplicity,
    DEFAULT_DOMINANT_EIGENVALUE, DEFAULT_GAP_FRACTION, DEFAULT_NOISE_BOUND, DEFAULT_NOISE_STD,
};

pub const TRIALS_HEADER: &str = "# memxbar trials v1";
pub const SUMMARY_HEADER: &str =
    "# memxbar summary v1: trial=trial count, seed=base seed, value=mean, iters=median, converged=converged count";
pub const MAX_VARIATION: f64 = 0.5;
/// `ρ` of the variation-free reference solves.
pub const REFERENCE_RHO: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lp,
    Qp,
    Cs,
    Eig,
    Pca,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Lp, Kind::Qp, Kind::Cs, Kind::Eig, Kind::Pca];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Lp => "lp",
            Kind::Qp => "qp",
            Kind::Cs => "cs",
            Kind::Eig => "eig",
            Kind::Pca => "pca",
        }
    }

    fn id(self) -> u64 {
        self as u64 + 1
    }

    /// Metric plotted against variation.
    pub fn primary_metric(self) -> &'static str {
        match self {
            Kind::Lp | Kind::Qp => "rel_error",
            Kind::Cs => "support_error",
            Kind::Eig => "eigenvalue_error",
            Kind::Pca => "variance_rel_error",
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment kind `{s}`")))
    }
}

/// One sweep. `sizes` is the problem dimension `n` for lp/qp, the sparsity `s`
/// for cs, the planted multiplicity for eig and the component count for pca.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub sizes: Vec<usize>,
    pub variation_levels: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub output_dir: Option<PathBuf>,
    pub cs_signal_dim: usize,
    pub cs_measurements: usize,
    pub eig_dim: usize,
    pub dataset: Option<PathBuf>,
    /// Record wall-clock times; off by default so outputs are reproducible.
    pub record_timing: bool,
}

impl ExperimentSpec {
    pub fn desk(kind: Kind) -> Self {
        let mut spec = Self {
            kind,
            sizes: vec![50, 100, 200],
            variation_levels: vec![0.0, 0.02, 0.05, 0.10],
            rho_values: vec![1.0],
            trials: 20,
            base_seed: 2024,
            epsilon: 1e-3,
            max_iterations: crate::admm::DEFAULT_MAX_ITERATIONS,
            output_dir: None,
            cs_signal_dim: 256,
            cs_measurements: 128,
            eig_dim: 50,
            dataset: None,
            record_timing: false,
        };
        match kind {
            Kind::Lp | Kind::Qp => {}
            Kind::Cs => {
                spec.sizes = vec![3, 12, 25, 37, 50];
                spec.rho_values = vec![crate::cs::DEFAULT_RHO];
            }
            Kind::Eig => {
                spec.sizes = (1..=10).collect();
                spec.variation_levels = vec![0.0];
                spec.trials = 50;
            }
            Kind::Pca => {
                spec.sizes = vec![2];
                spec.variation_levels = vec![0.0];
                spec.trials = 5;
            }
        }
        spec
    }

    pub fn full_scale(kind: Kind) -> Self {
        let mut spec = Self::desk(kind);
        spec.trials = 50;
        match kind {
            Kind::Lp | Kind::Qp => {
                spec.sizes = vec![100, 600, 1000];
                spec.rho_values = vec![0.1, 1.0, 10.0, 100.0];
            }
            Kind::Cs => {
                spec.cs_signal_dim = 1024;
                spec.cs_measurements = 500;
                spec.sizes = vec![10, 50, 100, 150, 200];
            }
            Kind::Eig | Kind::Pca => {}
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sizes must be a nonempty list of positive integers".into());
        }
        if self.variation_levels.is_empty() || self.variation_levels.iter().any(|v| !(0.0..=MAX_VARIATION).contains(v))
        {
            return bad(format!("variation levels must lie in [0, {MAX_VARIATION}]"));
        }
        if self.rho_values.is_empty() || self.rho_values.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return bad("rho values must be positive".into());
        }
        if !(self.epsilon > 0.0) || self.max_iterations == 0 {
            return bad("epsilon and max_iterations must be positive".into());
        }
        match self.kind {
            Kind::Lp | Kind::Qp if self.sizes.iter().any(|&n| n < 2) => bad("lp/qp sizes must be at least 2".into()),
            Kind::Cs if self.cs_measurements >= self.cs_signal_dim => bad("cs needs q < p".into()),
            Kind::Cs if self.sizes.iter().any(|&s| s > self.cs_signal_dim) => bad("sparsity exceeds p".into()),
            Kind::Eig if self.sizes.iter().any(|&m| m > self.eig_dim) => bad("multiplicity exceeds eig_dim".into()),
            _ => Ok(()),
        }
    }

    fn trial_seed(&self, size: usize, variation: f64, rho: f64, trial: usize) -> u64 {
        mix_seed(&[self.base_seed, self.kind.id(), size as u64, variation.to_bits(), rho.to_bits(), trial as u64])
    }

    fn problem_seed(&self, size: usize, trial: usize) -> u64 {
        mix_seed(&[self.base_seed, self.kind.id(), size as u64, trial as u64])
    }

    pub fn grid_cells(&self) -> usize {
        self.sizes.len() * self.variation_levels.len() * self.rho_values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub kind: Kind,
    pub size: usize,
    pub variation: f64,
    pub rho: f64,
    pub trial: usize,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub iters: usize,
    pub converged: bool,
    pub wall_ms: f64,
}

/// Aggregate over the trials of one grid cell. `rho` is a number, or
/// `best:<ρ>` for the best-ρ rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub kind: Kind,
    pub size: usize,
    pub variation: f64,
    pub rho: String,
    pub trial: usize,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub iters: f64,
    pub converged: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRecord>,
}

impl ExperimentResult {
    /// Records of one metric in one cell, in trial order.
    pub fn cell(&self, size: usize, variation: f64, rho: f64, metric: &str) -> Vec<&TrialRecord> {
        self.records
            .iter()
            .filter(|r| r.size == size && r.variation == variation && r.rho == rho && r.metric == metric)
            .collect()
    }
}

struct Cell {
    variation: f64,
    rho: f64,
    seed: u64,
}

struct Measurement {
    metric: &'static str,
    value: f64,
    iters: usize,
    converged: bool,
}

impl Measurement {
    fn failed(metric: &'static str) -> Self {
        Self { metric, value: f64::NAN, iters: 0, converged: false }
    }
}

fn metrics_for(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Lp | Kind::Qp => &["rel_error", "eq_residual"],
        Kind::Cs => &["support_error", "rel_error", "abs_error", "omp_support_error", "omp_rel_error"],
        Kind::Eig => &["multiplicity_error", "eigenvalue_error"],
        Kind::Pca => &["variance_rel_error", "score_error"],
    }
}

/// Runs the full sweep grid. Problems depend only on `(size, trial)`, so every
/// variation and ρ cell of a trial shares one instance and one reference.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let iris = match spec.kind {
        Kind::Pca => {
            let path = spec.dataset.clone().unwrap_or_else(bundled_iris_path);
            let data: Dataset<f64> = load_iris(path)?;
            Some(data)
        }
        _ => None,
    };
    let units: Vec<(usize, usize)> = spec.sizes.iter().flat_map(|&s| (0..spec.trials).map(move |t| (s, t))).collect();
    let per_unit: Vec<Vec<TrialRecord>> =
        units.par_iter().map(|&(size, trial)| run_unit(spec, size, trial, iris.as_ref())).collect();
    let mut records: Vec<TrialRecord> = per_unit.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.size, a.variation.to_bits(), a.rho.to_bits(), a.trial).cmp(&(
            b.size,
            b.variation.to_bits(),
            b.rho.to_bits(),
            b.trial,
        ))
    });
    let summary = summarize(spec, &records);
    if let Some(dir) = &spec.output_dir {
        std::fs::create_dir_all(dir)?;
        write_trials_csv(dir.join("trials.csv"), &records)?;
        write_summary_csv(dir.join("summary.csv"), &summary)?;
    }
    Ok(ExperimentResult { records, summary })
}

fn run_unit(spec: &ExperimentSpec, size: usize, trial: usize, iris: Option<&Dataset<f64>>) -> Vec<TrialRecord> {
    let cells: Vec<Cell> = spec
        .variation_levels
        .iter()
        .flat_map(|&variation| {
            spec.rho_values.iter().map(move |&rho| Cell {
                variation,
                rho,
                seed: spec.trial_seed(size, variation, rho, trial),
            })
        })
        .collect();
    let mut problem_rng = SeededRng::new(spec.problem_seed(size, trial));
    let mut out = Vec::new();
    let mut emit = |cell: &Cell, ms: Vec<Measurement>, wall_ms: f64| {
        for m in ms {
            out.push(TrialRecord {
                kind: spec.kind,
                size,
                variation: cell.variation,
                rho: cell.rho,
                trial,
                seed: cell.seed,
                metric: m.metric.to_string(),
                value: m.value,
                iters: m.iters,
                converged: m.converged,
                wall_ms: if spec.record_timing { wall_ms } else { 0.0 },
            });
        }
    };
    let failed_all = || metrics_for(spec.kind).iter().map(|m| Measurement::failed(m)).collect::<Vec<_>>();

    match spec.kind {
        Kind::Lp | Kind::Qp => {
            let l = size / 2;
            let problem = if spec.kind == Kind::Lp {
                generate_lp_with_reference::<f64>(size, l, &mut problem_rng, REFERENCE_RHO)
                    .map(|(g, x)| (g.problem.cost, g.problem.eq_matrix, g.problem.eq_rhs, x))
            } else {
                generate_socp_with_reference::<f64>(size, l, &mut problem_rng, REFERENCE_RHO)
                    .map(|(g, x)| (g.problem.cost, g.problem.eq_matrix, g.problem.eq_rhs, x))
            };
            for cell in &cells {
                let start = Instant::now();
                let ms = match &problem {
                    Ok((d, g, h, x_ref)) => cone_trial(spec, cell, d, g, h, x_ref),
                    Err(e) => {
                        log::warn!("{} size {size} trial {trial}: generation failed: {e}", spec.kind);
                        failed_all()
                    }
                };
                emit(cell, ms, elapsed_ms(start));
            }
        }
        Kind::Cs => {
            let generated = generate_cs::<f64>(
                spec.cs_signal_dim,
                spec.cs_measurements,
                size,
                DEFAULT_NOISE_STD,
                DEFAULT_NOISE_BOUND,
                &mut problem_rng,
            );
            let omp = generated.as_ref().ok().map(|(p, z)| omp_baseline(&p.sensing, &p.measurements, z.sparsity()));
            for cell in &cells {
                let start = Instant::now();
                let ms = match (&generated, &omp) {
                    (Ok((p, z)), Some(omp)) => cs_trial(spec, cell, p, z, omp.as_ref().ok()),
                    _ => failed_all(),
                };
                emit(cell, ms, elapsed_ms(start));
            }
        }
        Kind::Eig => {
            let n = spec.eig_dim;
            let a = generate_sym_with_multiplicity::<f64>(
                n,
                size,
                DEFAULT_DOMINANT_EIGENVALUE,
                DEFAULT_GAP_FRACTION * DEFAULT_DOMINANT_EIGENVALUE,
                &mut problem_rng,
            );
            let oracle = a.as_ref().ok().and_then(|a| sym_eigenvalues(a).ok()).and_then(|e| dominant_value(&e));
            for cell in &cells {
                let start = Instant::now();
                let ms = match (&a, oracle) {
                    (Ok(a), Some(lambda)) => eig_trial(cell, a, size, lambda),
                    _ => failed_all(),
                };
                emit(cell, ms, elapsed_ms(start));
            }
        }
        Kind::Pca => {
            let data = iris.expect("dataset loaded for pca");
            let reference = oracle_pca(data, size, PcaOptions::default());
            for cell in &cells {
                let start = Instant::now();
                let ms = match &reference {
                    Ok(reference) => pca_trial(cell, data, size, reference),
                    Err(_) => failed_all(),
                };
                emit(cell, ms, elapsed_ms(start));
            }
        }
    }
    out
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn dominant_value(eigs: &[f64]) -> Option<f64> {
    eigs.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs()))
}

fn cone_trial(
    spec: &ExperimentSpec,
    cell: &Cell,
    d: &[f64],
    g: &Matrix<f64>,
    h: &[f64],
    x_ref: &[f64],
) -> Vec<Measurement> {
    let cfg = AdmmConfig::new(cell.rho, spec.epsilon, spec.max_iterations);
    let rng = SeededRng::new(cell.seed);
    let report = if spec.kind == Kind::Lp {
        crate::mathprog::LpProblem::new(d.to_vec(), g.clone(), h.to_vec())
            .and_then(|p| solve_lp(&p, &cfg, cell.variation, rng))
    } else {
        crate::mathprog::SocpProblem::new(d.to_vec(), g.clone(), h.to_vec())
            .and_then(|p| solve_socp(&p, &cfg, cell.variation, rng))
    };
    match report {
        Ok(r) => {
            let iters = r.outcome.iterations_used;
            let conv = r.outcome.converged;
            let eq = g.mul_vec(&r.x).map(|gx| dist2(&gx, h)).unwrap_or(f64::NAN);
            vec![
                Measurement { metric: "rel_error", value: relative_error(&r.x, x_ref), iters, converged: conv },
                Measurement { metric: "eq_residual", value: eq, iters, converged: conv },
            ]
        }
        Err(e) => {
            log::warn!("{} solve failed: {e}", spec.kind);
            metrics_for(spec.kind).iter().map(|m| Measurement::failed(m)).collect()
        }
    }
}

fn cs_trial(
    spec: &ExperimentSpec,
    cell: &Cell,
    prob: &CsProblem<f64>,
    truth: &SparseSignal<f64>,
    omp: Option<&Vec<f64>>,
) -> Vec<Measurement> {
    let cfg = AdmmConfig::new(cell.rho, spec.epsilon, spec.max_iterations);
    let threshold = DEFAULT_SUPPORT_THRESHOLD;
    let mut ms = match solve_cs(prob, &cfg, cell.variation, SeededRng::new(cell.seed)) {
        Ok(r) => {
            let (iters, conv) = (r.outcome.iterations_used, r.outcome.converged);
            vec![
                Measurement {
                    metric: "support_error",
                    value: support_error(&r.signal, truth, threshold),
                    iters,
                    converged: conv,
                },
                Measurement {
                    metric: "rel_error",
                    value: relative_error(&r.signal, &truth.values),
                    iters,
                    converged: conv,
                },
                Measurement { metric: "abs_error", value: dist2(&r.signal, &truth.values), iters, converged: conv },
            ]
        }
        Err(e) => {
            log::warn!("cs solve failed: {e}");
            vec![
                Measurement::failed("support_error"),
                Measurement::failed("rel_error"),
                Measurement::failed("abs_error"),
            ]
        }
    };
    match omp {
        Some(z) => {
            ms.push(Measurement {
                metric: "omp_support_error",
                value: support_error(z, truth, threshold),
                iters: 0,
                converged: true,
            });
            ms.push(Measurement {
                metric: "omp_rel_error",
                value: relative_error(z, &truth.values),
                iters: 0,
                converged: true,
            });
        }
        None => {
            ms.push(Measurement::failed("omp_support_error"));
            ms.push(Measurement::failed("omp_rel_error"));
        }
    }
    ms
}

fn eig_trial(cell: &Cell, a: &Matrix<f64>, planted: usize, oracle: f64) -> Vec<Measurement> {
    let cfg = PiConfig::<f64>::default();
    let mut programmer = Programmer::new(CrossbarConfig::default(), cell.variation, SeededRng::new(cell.seed));
    let result = programmer.program(a).and_then(|xb| {
        let mut rng = programmer.rng_mut().fork(1);
        dominant_eigenspace(&xb, &cfg, &mut rng)
    });
    match result {
        Ok(space) => {
            let iters = space.max_run_iterations;
            vec![
                Measurement {
                    metric: "multiplicity_error",
                    value: (space.multiplicity as f64 - planted as f64).abs(),
                    iters,
                    converged: true,
                },
                Measurement {
                    metric: "eigenvalue_error",
                    value: (space.eigenvalue - oracle).abs(),
                    iters,
                    converged: true,
                },
            ]
        }
        Err(e) => {
            log::warn!("eig trial failed: {e}");
            vec![Measurement::failed("multiplicity_error"), Measurement::failed("eigenvalue_error")]
        }
    }
}

/// Largest entrywise score difference after aligning each component's sign.
pub fn score_difference(a: &PcaResult<f64>, b: &PcaResult<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..a.k().min(b.k()) {
        let sa = a.projected.column(c);
        let sb = b.projected.column(c);
        let sign = if dot(&sa, &sb) < 0.0 { -1.0 } else { 1.0 };
        for (x, y) in sa.iter().zip(&sb) {
            worst = worst.max((x - sign * y).abs());
        }
    }
    worst
}

/// Largest relative variance difference.
pub fn variance_difference(a: &PcaResult<f64>, reference: &PcaResult<f64>) -> f64 {
    a.variances
        .iter()
        .zip(&reference.variances)
        .map(|(v, r)| if *r == 0.0 { v.abs() } else { (v - r).abs() / r.abs() })
        .fold(0.0, f64::max)
}

fn pca_trial(cell: &Cell, data: &Dataset<f64>, k: usize, reference: &PcaResult<f64>) -> Vec<Measurement> {
    match pca(data, k, &PiConfig::default(), PcaOptions::default(), cell.variation, SeededRng::new(cell.seed)) {
        Ok(r) => {
            let iters = r.programs;
            vec![
                Measurement {
                    metric: "variance_rel_error",
                    value: variance_difference(&r, reference),
                    iters,
                    converged: true,
                },
                Measurement { metric: "score_error", value: score_difference(&r, reference), iters, converged: true },
            ]
        }
        Err(e) => {
            log::warn!("pca trial failed: {e}");
            vec![Measurement::failed("variance_rel_error"), Measurement::failed("score_error")]
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Mean value, median iterations and converged count per grid cell, followed by
/// best-ρ rows when more than one ρ was swept.
pub fn summarize(spec: &ExperimentSpec, records: &[TrialRecord]) -> Vec<SummaryRecord> {
    type Key = (usize, u64, u64, String);
    let mut groups: BTreeMap<Key, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.size, r.variation.to_bits(), r.rho.to_bits(), r.metric.clone())).or_default().push(r);
    }
    let mut rows = Vec::new();
    let mut best: BTreeMap<(usize, u64, String), (f64, SummaryRecord)> = BTreeMap::new();
    for ((size, var_bits, rho_bits, metric), group) in groups {
        let n = group.len() as f64;
        let mut iters: Vec<f64> = group.iter().map(|r| r.iters as f64).collect();
        let rho = f64::from_bits(rho_bits);
        let row = SummaryRecord {
            kind: spec.kind,
            size,
            variation: f64::from_bits(var_bits),
            rho: format!("{rho}"),
            trial: group.len(),
            seed: spec.base_seed,
            metric: metric.clone(),
            value: group.iter().map(|r| r.value).sum::<f64>() / n,
            iters: median(&mut iters),
            converged: group.iter().filter(|r| r.converged).count(),
            wall_ms: group.iter().map(|r| r.wall_ms).sum::<f64>() / n,
        };
        if spec.rho_values.len() > 1 {
            let entry = best.entry((size, var_bits, metric)).or_insert((rho, row.clone()));
            if row.value < entry.1.value {
                *entry = (rho, row.clone());
            }
        }
        rows.push(row);
    }
    for (_, (rho, mut row)) in best {
        row.rho = format!("best:{rho}");
        rows.push(row);
    }
    rows
}

fn write_csv<S: Serialize>(path: &Path, header: &str, rows: &[S], columns: &[&str]) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "{header}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_COLUMNS: [&str; 11] =
    ["kind", "size", "variation", "rho", "trial", "seed", "metric", "value", "iters", "converged", "wall_ms"];

pub fn write_trials_csv(path: impl AsRef<Path>, records: &[TrialRecord]) -> Result<()> {
    write_csv(path.as_ref(), TRIALS_HEADER, records, &CSV_COLUMNS)
}

pub fn write_summary_csv(path: impl AsRef<Path>, rows: &[SummaryRecord]) -> Result<()> {
    write_csv(path.as_ref(), SUMMARY_HEADER, rows, &CSV_COLUMNS)
}

pub fn read_trials_csv(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: Kind) -> ExperimentSpec {
        let mut s = ExperimentSpec::desk(kind);
        s.trials = 2;
        s
    }

    #[test]
    fn validation() {
        let mut s = small(Kind::Lp);
        assert!(s.validate().is_ok());
        s.variation_levels = vec![0.6];
        assert!(s.validate().is_err());
        let mut s = small(Kind::Lp);
        s.trials = 0;
        assert!(s.validate().is_err());
        let mut s = small(Kind::Cs);
        s.cs_measurements = s.cs_signal_dim;
        assert!(s.validate().is_err());
    }

    #[test]
    fn kind_round_trip() {
        for k in Kind::ALL {
            assert_eq!(k.as_str().parse::<Kind>().unwrap(), k);
        }
        assert!("svm".parse::<Kind>().is_err());
    }

    #[test]
    fn lp_row_count_and_accuracy() {
        let mut s = small(Kind::Lp);
        s.sizes = vec![8];
        s.variation_levels = vec![0.0, 0.05, 0.10];
        s.trials = 5;
        let r = run_experiment(&s).unwrap();
        assert_eq!(r.records.len(), 3 * 5 * 2);
        for rec in r.cell(8, 0.0, 1.0, "rel_error") {
            assert!(rec.value <= 1e-2, "{rec:?}");
        }
    }

    #[test]
    fn seeds_are_cell_specific() {
        let s = small(Kind::Lp);
        assert_ne!(s.trial_seed(50, 0.0, 1.0, 0), s.trial_seed(50, 0.1, 1.0, 0));
        assert_ne!(s.trial_seed(50, 0.0, 1.0, 0), s.trial_seed(50, 0.0, 1.0, 1));
        assert_eq!(s.problem_seed(50, 3), s.problem_seed(50, 3));
    }

    #[test]
    fn summary_has_best_rho_rows() {
        let mut s = small(Kind::Lp);
        s.sizes = vec![6];
        s.variation_levels = vec![0.0];
        s.rho_values = vec![1.0, 10.0];
        let r = run_experiment(&s).unwrap();
        assert_eq!(r.summary.iter().filter(|row| row.rho.starts_with("best:")).count(), 2);
        assert!(r.summary.iter().all(|row| row.trial == 2));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
