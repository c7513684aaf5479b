//! Chance-constrained design on the shelf temperature.
//!
//! Both searches rely on monotone maps (more heat or more time means less
//! bound water) and solve `P(c̄_w ≤ target) = P*` by bisection rather than by
//! a general optimizer. Monotonicity is checked on a coarse scan first.
//! Every probability evaluation reuses the same input samples and resamples
//! (common random numbers), so the maps are smooth in the decision variable.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::linalg::Matrix;
use crate::mc::{evaluate_samples, Scenario};
use crate::pce::{derive_seed, draw_samples, fit_surrogate, EmpiricalDistribution, PceSurrogate, UncertainInput};
use crate::scalar::Real;
use crate::studies::config::{Method, ModelKind, StudyConfig};
use crate::studies::uq::select_rows;
use crate::studies::{pin_degenerate, simulate_bound_water};

const TAG_DESIGN: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChanceResult<T> {
    /// `P(c̄_w ≤ target)` at the decision.
    pub probability: T,
    /// Distribution of `c̄_w` at the decision (its CDF is the constraint curve).
    pub distribution: EmpiricalDistribution<T>,
    pub method: Method,
    pub shelf_temperature: T,
    /// Time at which the constraint is evaluated, measured from the start (s).
    pub drying_time: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint<T> {
    pub shelf_temperature: T,
    /// Probability (minimum shelf temperature) or `None` when infeasible.
    pub probability: Option<T>,
    /// Drying time (drying-time minimization), `None` when not reached.
    pub drying_time: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignResult<T> {
    pub shelf_temperature: T,
    pub chance: ChanceResult<T>,
    pub scan: Vec<ScanPoint<T>>,
    pub evaluations: usize,
    pub simulations: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DryingTimeResult<T> {
    pub drying_time: T,
    pub shelf_temperature: T,
    pub chance: ChanceResult<T>,
    pub scan: Vec<ScanPoint<T>>,
    /// `(time from start, probability)` at the chosen shelf temperature.
    pub probability_curve: Vec<(T, T)>,
    pub simulations: usize,
    pub wall_seconds: f64,
}

fn single_method<T: Real>(cfg: &StudyConfig<T>) -> Result<Method> {
    if cfg.model != ModelKind::Secondary {
        return Err(Error::Config("shelf-temperature design applies to secondary drying".into()));
    }
    match cfg.method {
        Method::Both => Err(Error::Config("design studies run one method at a time (pce or mc)".into())),
        m => Ok(m),
    }
}

/// Fixed random inputs shared by every evaluation of a design search.
struct Evaluator<'a, T: Real> {
    cfg: &'a StudyConfig<T>,
    method: Method,
    base: Scenario<T>,
    active: Vec<UncertainInput<T>>,
    samples: Matrix<T>,
    /// Basis values at the resample points (PCE only), `n_res × L`.
    psi: Option<Matrix<T>>,
    simulations: usize,
}

/// Bound-water values at fixed random inputs along a time grid.
enum Series<T: Real> {
    /// Surrogate coefficients per grid node (`L × G`) and the shared basis matrix.
    Pce { coefficients: Matrix<T> },
    /// One row per Monte Carlo sample (`n × G`).
    Mc { values: Matrix<T> },
    Fixed { values: Vec<T> },
}

impl<'a, T: Real> Evaluator<'a, T> {
    fn new(cfg: &'a StudyConfig<T>, scenario: &Scenario<T>) -> Result<Self> {
        cfg.validate()?;
        let method = single_method(cfg)?;
        let (base, active, _) = pin_degenerate(scenario, &cfg.inputs)?;
        let n = if method == Method::Pce { cfg.pce_samples } else { cfg.mc_samples };
        let samples = draw_samples(&active, n, cfg.seed);
        let psi = if method == Method::Pce && !active.is_empty() {
            let l = crate::pce::multi_index::cardinality(active.len(), cfg.order);
            let identity = PceSurrogate::from_coefficients(active.clone(), cfg.order, Matrix::identity(l))?;
            Some(identity.resample(cfg.design.resamples, derive_seed(cfg.seed, TAG_DESIGN))?)
        } else {
            None
        };
        Ok(Self { cfg, method, base, active, samples, psi, simulations: 0 })
    }

    fn scenario_at(&self, shelf: T) -> Scenario<T> {
        let mut s = self.base;
        s.conditions.t_b = shelf;
        s
    }

    fn series(&mut self, shelf: T, grid: &[T]) -> Result<Series<T>> {
        let scenario = self.scenario_at(shelf);
        let model = |s: &Scenario<T>| simulate_bound_water(self.cfg, s, grid);
        if self.active.is_empty() {
            self.simulations += 1;
            return Ok(Series::Fixed { values: model(&scenario)? });
        }
        let (values, kept, _) = evaluate_samples(&model, &scenario, &self.active, &self.samples)?;
        self.simulations += kept.len();
        match self.method {
            Method::Pce => {
                let x = select_rows(&self.samples, &kept);
                let s = fit_surrogate(&self.active, &x, &values, self.cfg.order)?;
                Ok(Series::Pce { coefficients: s.coefficients().clone() })
            }
            _ => Ok(Series::Mc { values }),
        }
    }

    /// Distribution of bound water at grid position `k + w` (linear in time).
    fn values_at(&self, series: &Series<T>, k: usize, w: T) -> Vec<T> {
        let lerp = |a: T, b: T| a + w * (b - a);
        match series {
            Series::Fixed { values } => {
                let k1 = (k + 1).min(values.len() - 1);
                vec![lerp(values[k], values[k1])]
            }
            Series::Mc { values } => {
                let k1 = (k + 1).min(values.cols() - 1);
                (0..values.rows()).map(|r| lerp(values[(r, k)], values[(r, k1)])).collect()
            }
            Series::Pce { coefficients } => {
                // Least squares is linear in the responses, so interpolating the
                // responses in time interpolates the coefficients.
                let k1 = (k + 1).min(coefficients.cols() - 1);
                let c: Vec<T> =
                    (0..coefficients.rows()).map(|i| lerp(coefficients[(i, k)], coefficients[(i, k1)])).collect();
                let psi = self.psi.as_ref().expect("basis matrix for pce");
                let mut out = vec![T::zero(); psi.rows()];
                psi.mul_vec(&c, &mut out);
                out
            }
        }
    }

    fn probability(&self, values: &[T]) -> T {
        let target = self.cfg.design.concentration;
        T::from_usize_lossy(values.iter().filter(|&&v| v <= target).count()) / T::from_usize_lossy(values.len())
    }

    /// Allowed decrease of a monotone probability map due to sampling noise.
    fn noise(&self) -> T {
        let n = match (self.method, self.active.is_empty()) {
            (_, true) => return T::zero(),
            (Method::Pce, _) => self.cfg.design.resamples,
            _ => self.cfg.mc_samples,
        };
        T::one() / T::from_usize_lossy(n).sqrt()
    }

    fn chance(&self, values: Vec<T>, shelf: T, drying_time: T) -> Result<ChanceResult<T>> {
        let probability = self.probability(&values);
        Ok(ChanceResult {
            probability,
            distribution: EmpiricalDistribution::new(values)?,
            method: self.method,
            shelf_temperature: shelf,
            drying_time,
        })
    }
}

/// Smallest shelf temperature in the bounds for which
/// `P(c̄_w(target_time) ≤ concentration) ≥ probability`.
pub fn design_min_shelf_temperature<T: Real>(cfg: &StudyConfig<T>, scenario: &Scenario<T>) -> Result<DesignResult<T>> {
    let start = Instant::now();
    let mut ev = Evaluator::new(cfg, scenario)?;
    let d = cfg.design;
    let t0 = ev.base.conditions.t_start;
    let grid = [t0, t0 + d.target_time];
    let mut evaluations = 0usize;

    let mut eval = |ev: &mut Evaluator<T>, shelf: T| -> Result<(T, Vec<T>)> {
        evaluations += 1;
        let series = ev.series(shelf, &grid)?;
        let values = ev.values_at(&series, 1, T::zero());
        Ok((ev.probability(&values), values))
    };

    if d.probability <= T::zero() {
        let (_, values) = eval(&mut ev, d.tb_lower)?;
        let chance = ev.chance(values, d.tb_lower, d.target_time)?;
        return Ok(DesignResult {
            shelf_temperature: d.tb_lower,
            chance,
            scan: Vec::new(),
            evaluations,
            simulations: ev.simulations,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }

    let shelves = linspace(d.tb_lower, d.tb_upper, d.scan_points);
    let mut scan = Vec::with_capacity(shelves.len());
    let mut scan_values = Vec::with_capacity(shelves.len());
    for &tb in &shelves {
        let (p, v) = eval(&mut ev, tb)?;
        scan.push(ScanPoint { shelf_temperature: tb, probability: Some(p), drying_time: Some(d.target_time) });
        scan_values.push(v);
    }
    let noise = ev.noise();
    for w in scan.windows(2) {
        let (a, b) = (w[0].probability.unwrap(), w[1].probability.unwrap());
        if b < a - noise {
            return Err(Error::Simulation(format!(
                "probability is not monotone in the shelf temperature: P({}) = {a} > P({}) = {b}",
                w[0].shelf_temperature, w[1].shelf_temperature
            )));
        }
    }

    let first_ok = scan.iter().position(|s| s.probability.unwrap() >= d.probability);
    let Some(idx) = first_ok else {
        return Err(Error::Infeasible(format!(
            "P = {} is not reached within T_b in [{}, {}] K: P({}) = {}, P({}) = {}",
            d.probability,
            d.tb_lower,
            d.tb_upper,
            d.tb_lower,
            scan[0].probability.unwrap(),
            d.tb_upper,
            scan[scan.len() - 1].probability.unwrap()
        )));
    };
    let (mut hi, mut hi_values) = (shelves[idx], scan_values[idx].clone());
    if idx > 0 {
        let mut lo = shelves[idx - 1];
        while hi - lo > d.temperature_tolerance {
            let mid = T::half() * (lo + hi);
            let (p, v) = eval(&mut ev, mid)?;
            if p >= d.probability {
                hi = mid;
                hi_values = v;
            } else {
                lo = mid;
            }
        }
    }
    let chance = ev.chance(hi_values, hi, d.target_time)?;
    Ok(DesignResult {
        shelf_temperature: hi,
        chance,
        scan,
        evaluations,
        simulations: ev.simulations,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Time grid for drying-time searches: spacing no coarser than the tolerance.
fn time_grid<T: Real>(t0: T, horizon: T, tol: T) -> Vec<T> {
    let steps = (horizon / tol).ceil().to_usize().unwrap_or(1).max(1);
    linspace(t0, t0 + horizon, steps + 1)
}

/// First time (from the start) at which the probability reaches the target,
/// by bisection on the interpolated series. `None` if the horizon is too short.
fn earliest_time<T: Real>(ev: &Evaluator<T>, series: &Series<T>, grid: &[T]) -> Option<(T, Vec<T>)> {
    let d = ev.cfg.design;
    let t0 = grid[0];
    let dt = grid[1] - grid[0];
    let at = |t: T| {
        let pos = ((t - t0) / dt).max(T::zero());
        let k = pos.floor().to_usize().unwrap_or(0).min(grid.len() - 2);
        let w = (pos - T::from_usize_lossy(k)).min(T::one());
        ev.values_at(series, k, w)
    };
    let first = at(t0);
    if ev.probability(&first) >= d.probability {
        return Some((T::zero(), first));
    }
    let t_last = grid[grid.len() - 1];
    let last = at(t_last);
    if ev.probability(&last) < d.probability {
        return None;
    }
    let (mut lo, mut hi, mut hi_values) = (t0, t_last, last);
    while hi - lo > d.time_tolerance {
        let mid = T::half() * (lo + hi);
        let v = at(mid);
        if ev.probability(&v) >= d.probability {
            hi = mid;
            hi_values = v;
        } else {
            lo = mid;
        }
    }
    Some((hi - t0, hi_values))
}

/// Minimum drying time subject to `P(c̄_w(t_f) ≤ concentration) = probability`
/// with a constant shelf temperature inside the bounds.
pub fn minimize_drying_time<T: Real>(cfg: &StudyConfig<T>, scenario: &Scenario<T>) -> Result<DryingTimeResult<T>> {
    let start = Instant::now();
    let mut ev = Evaluator::new(cfg, scenario)?;
    let d = cfg.design;
    let t0 = ev.base.conditions.t_start;
    let grid = time_grid(t0, d.horizon, d.time_tolerance);

    let shelves = if d.tb_upper > d.tb_lower { linspace(d.tb_lower, d.tb_upper, d.scan_points) } else { vec![d.tb_upper] };
    let mut scan = Vec::with_capacity(shelves.len());
    let mut best: Option<(usize, T, Vec<T>, Series<T>)> = None;
    let mut end_probabilities = Vec::new();
    for (i, &tb) in shelves.iter().enumerate() {
        let series = ev.series(tb, &grid)?;
        let found = earliest_time(&ev, &series, &grid);
        end_probabilities.push(ev.probability(&ev.values_at(&series, grid.len() - 2, T::one())));
        scan.push(ScanPoint { shelf_temperature: tb, probability: None, drying_time: found.as_ref().map(|f| f.0) });
        if let Some((tf, values)) = found {
            // Ties go to the hotter shelf, which the scan visits later.
            if best.as_ref().is_none_or(|b| tf <= b.1) {
                best = Some((i, tf, values, series));
            }
        }
    }

    let slack = T::two() * d.time_tolerance;
    let mut seen_feasible: Option<T> = None;
    for p in &scan {
        match (p.drying_time, seen_feasible) {
            (None, Some(_)) => {
                return Err(Error::Simulation(format!(
                    "drying time is not monotone in the shelf temperature: infeasible at {} K after a feasible point",
                    p.shelf_temperature
                )))
            }
            (Some(t), Some(prev)) if t > prev + slack => {
                return Err(Error::Simulation(format!(
                    "drying time is not monotone in the shelf temperature: {t} s at {} K after {prev} s",
                    p.shelf_temperature
                )))
            }
            (Some(t), _) => seen_feasible = Some(t),
            _ => {}
        }
    }

    let Some((i, tf, values, series)) = best else {
        return Err(Error::Infeasible(format!(
            "P = {} is not reached within {} s for T_b in [{}, {}] K; P at the horizon: {} (T_b = {}), {} (T_b = {})",
            d.probability,
            d.horizon,
            d.tb_lower,
            d.tb_upper,
            end_probabilities[0],
            d.tb_lower,
            end_probabilities[end_probabilities.len() - 1],
            d.tb_upper
        )));
    };
    let shelf = shelves[i];
    let stride = (grid.len() / 150).max(1);
    let probability_curve = (0..grid.len())
        .step_by(stride)
        .map(|k| {
            let w = if k + 1 == grid.len() { T::one() } else { T::zero() };
            let kk = k.min(grid.len() - 2);
            (grid[k] - t0, ev.probability(&ev.values_at(&series, kk, w)))
        })
        .collect();
    let chance = ev.chance(values, shelf, tf)?;
    Ok(DryingTimeResult {
        drying_time: tf,
        shelf_temperature: shelf,
        chance,
        scan,
        probability_curve,
        simulations: ev.simulations,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
