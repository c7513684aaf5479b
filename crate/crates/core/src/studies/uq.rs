use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mc::{evaluate_samples, run_ensemble, SampleFailure, Scenario};
use crate::pce::{derive_seed, draw_samples, fit_surrogate, EmpiricalDistribution, PceSurrogate, UncertainInput};
use crate::scalar::Real;
use crate::studies::config::{ModelKind, StudyConfig};
use crate::studies::{pin_degenerate, simulate_outputs};

/// Seed tags for surrogate resampling streams.
const TAG_SERIES: u64 = 1;
const TAG_FINAL: u64 = 2;

/// Mean and equal-tail band of one output over the time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band<T> {
    pub mean: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome<T> {
    /// One band per output.
    pub bands: Vec<Band<T>>,
    /// Final-time distribution per output.
    pub finals: Vec<EmpiricalDistribution<T>>,
    pub simulations: usize,
    pub failures: Vec<SampleFailure>,
    pub wall_seconds: f64,
    pub surrogate: Option<PceSurrogate<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UqResult<T> {
    pub model: ModelKind,
    pub output_names: [&'static str; 2],
    pub times: Vec<T>,
    pub active_inputs: Vec<String>,
    pub pinned_inputs: Vec<(String, T)>,
    pub pce: Option<MethodOutcome<T>>,
    pub mc: Option<MethodOutcome<T>>,
    /// PCE-vs-MC KS distance of the final-time distributions, per output.
    pub ks_final: Option<Vec<T>>,
}

pub(crate) fn output_names(model: ModelKind) -> [&'static str; 2] {
    match model {
        ModelKind::Primary => ["product_temperature", "front_position"],
        ModelKind::Secondary => ["product_temperature", "mean_bound_water"],
    }
}

/// Bands from a sample matrix whose columns are `[output × time]`.
fn bands_from_columns<T: Real>(
    values: &Matrix<T>,
    nodes: usize,
    level: T,
    means: Option<&[T]>,
) -> Result<Vec<Band<T>>> {
    let outputs = values.cols() / nodes;
    (0..outputs)
        .map(|o| {
            let mut band = Band { mean: Vec::with_capacity(nodes), lower: Vec::new(), upper: Vec::new() };
            for k in 0..nodes {
                let col = o * nodes + k;
                let dist = EmpiricalDistribution::new(values.column(col))?;
                let (lo, hi) = dist.confidence_interval(level)?;
                band.mean.push(means.map_or_else(|| dist.mean(), |m| m[col]));
                band.lower.push(lo);
                band.upper.push(hi);
            }
            Ok(band)
        })
        .collect()
}

fn finals_from_columns<T: Real>(values: &Matrix<T>, nodes: usize) -> Result<Vec<EmpiricalDistribution<T>>> {
    (0..values.cols() / nodes)
        .map(|o| EmpiricalDistribution::new(values.column(o * nodes + nodes - 1)))
        .collect()
}

fn select_columns<T: Real>(m: &Matrix<T>, cols: &[usize]) -> Matrix<T> {
    let mut data = Vec::with_capacity(m.rows() * cols.len());
    for r in 0..m.rows() {
        let row = m.row(r);
        data.extend(cols.iter().map(|&c| row[c]));
    }
    Matrix::from_rows(m.rows(), cols.len(), data)
}

fn run_pce<T: Real>(
    cfg: &StudyConfig<T>,
    scenario: &Scenario<T>,
    active: &[UncertainInput<T>],
    grid: &[T],
) -> Result<MethodOutcome<T>> {
    let start = Instant::now();
    let nodes = grid.len();
    let model = |s: &Scenario<T>| simulate_outputs(cfg, s, grid);

    if active.is_empty() {
        let y = model(scenario)?;
        let values = Matrix::from_rows(1, y.len(), y);
        return Ok(MethodOutcome {
            bands: bands_from_columns(&values, nodes, cfg.level, None)?,
            finals: finals_from_columns(&values, nodes)?,
            simulations: 1,
            failures: Vec::new(),
            wall_seconds: start.elapsed().as_secs_f64(),
            surrogate: None,
        });
    }

    // Same stream as the Monte Carlo path: the fit uses its first rows.
    let samples = draw_samples(active, cfg.pce_samples, cfg.seed);
    let (responses, kept, failures) = evaluate_samples(&model, scenario, active, &samples)?;
    let samples = select_rows(&samples, &kept);
    let surrogate = fit_surrogate(active, &samples, &responses, cfg.order)?;

    let series = surrogate.resample(cfg.series_resamples, derive_seed(cfg.seed, TAG_SERIES))?;
    let means: Vec<T> = surrogate.moments().into_iter().map(|(m, _)| m).collect();
    let bands = bands_from_columns(&series, nodes, cfg.level, Some(&means))?;

    let final_cols: Vec<usize> = (0..surrogate.outputs() / nodes).map(|o| o * nodes + nodes - 1).collect();
    let final_surrogate = PceSurrogate::from_coefficients(
        active.to_vec(),
        cfg.order,
        select_columns(surrogate.coefficients(), &final_cols),
    )?;
    let finals_values = final_surrogate.resample(cfg.final_resamples, derive_seed(cfg.seed, TAG_FINAL))?;
    let finals = (0..finals_values.cols())
        .map(|k| EmpiricalDistribution::new(finals_values.column(k)))
        .collect::<Result<Vec<_>>>()?;

    Ok(MethodOutcome {
        bands,
        finals,
        simulations: samples.rows(),
        failures,
        wall_seconds: start.elapsed().as_secs_f64(),
        surrogate: Some(surrogate),
    })
}

pub(crate) fn select_rows<T: Real>(m: &Matrix<T>, rows: &[usize]) -> Matrix<T> {
    if rows.len() == m.rows() {
        return m.clone();
    }
    let data = rows.iter().flat_map(|&r| m.row(r).to_vec()).collect();
    Matrix::from_rows(rows.len(), m.cols(), data)
}

fn run_mc<T: Real>(
    cfg: &StudyConfig<T>,
    scenario: &Scenario<T>,
    active: &[UncertainInput<T>],
    grid: &[T],
) -> Result<MethodOutcome<T>> {
    let start = Instant::now();
    let nodes = grid.len();
    let model = |s: &Scenario<T>| simulate_outputs(cfg, s, grid);
    let ens = run_ensemble(&model, scenario, active, cfg.mc_samples, cfg.seed)?;
    Ok(MethodOutcome {
        bands: bands_from_columns(&ens.outputs, nodes, cfg.level, None)?,
        finals: finals_from_columns(&ens.outputs, nodes)?,
        simulations: ens.outputs.rows(),
        failures: ens.failures,
        wall_seconds: start.elapsed().as_secs_f64(),
        surrogate: None,
    })
}

/// Time-resolved mean, band and final-time distributions of the two model
/// outputs under the configured input uncertainty.
pub fn run_uq_study<T: Real>(cfg: &StudyConfig<T>, scenario: &Scenario<T>) -> Result<UqResult<T>> {
    cfg.validate()?;
    let (scenario, active, pinned) = pin_degenerate(scenario, &cfg.inputs)?;
    let grid = cfg.output_grid(scenario.conditions.t_start);

    let pce = if cfg.method.uses_pce() { Some(run_pce(cfg, &scenario, &active, &grid)?) } else { None };
    let mc = if cfg.method.uses_mc() { Some(run_mc(cfg, &scenario, &active, &grid)?) } else { None };
    let ks_final = match (&pce, &mc) {
        (Some(p), Some(m)) => Some(p.finals.iter().zip(&m.finals).map(|(a, b)| a.ks_distance(b)).collect()),
        _ => None,
    };
    Ok(UqResult {
        model: cfg.model,
        output_names: output_names(cfg.model),
        times: grid,
        active_inputs: active.iter().map(|i| i.name.clone()).collect(),
        pinned_inputs: pinned,
        pce,
        mc,
        ks_final,
    })
}

/// Same as [`run_uq_study`] with every input except `which` pinned at its
/// mean (midpoint for uniform inputs).
pub fn one_at_a_time_study<T: Real>(cfg: &StudyConfig<T>, scenario: &Scenario<T>, which: &str) -> Result<UqResult<T>> {
    if !cfg.inputs.iter().any(|i| i.name == which) {
        let known: Vec<&str> = cfg.inputs.iter().map(|i| i.name.as_str()).collect();
        return Err(Error::Config(format!("`{which}` is not one of the study inputs {known:?}")));
    }
    let mut single = cfg.clone();
    single.inputs = cfg
        .inputs
        .iter()
        .map(|i| {
            if i.name == which {
                i.clone()
            } else {
                let m = i.distribution.mean();
                UncertainInput { name: i.name.clone(), distribution: crate::pce::Distribution::Uniform { a: m, b: m } }
            }
        })
        .collect();
    run_uq_study(&single, scenario)
}
