//! Case studies: time-resolved uncertainty quantification, one-at-a-time
//! sensitivity, minimum shelf temperature under a chance constraint, and
//! minimum drying time under the same constraint.

mod benchmark;
mod config;
mod design;
mod uq;

pub use benchmark::{benchmark_methods, BenchmarkCase, BenchmarkRow, DEFAULT_REPETITIONS};
pub use config::{DesignTargets, Method, ModelKind, StudyConfig};
pub use design::{
    design_min_shelf_temperature, minimize_drying_time, ChanceResult, DesignResult, DryingTimeResult, ScanPoint,
};
pub use uq::{one_at_a_time_study, run_uq_study, Band, MethodOutcome, UqResult};

use crate::error::Result;
use crate::integrator::IntegratorOptions;
use crate::mc::Scenario;
use crate::pce::UncertainInput;
use crate::primary::simulate_primary;
use crate::scalar::Real;
use crate::secondary::simulate_secondary;

/// Splits inputs into those that carry uncertainty and point masses, and
/// writes the point masses into the scenario.
pub(crate) fn pin_degenerate<T: Real>(
    scenario: &Scenario<T>,
    inputs: &[UncertainInput<T>],
) -> Result<(Scenario<T>, Vec<UncertainInput<T>>, Vec<(String, T)>)> {
    let mut pinned = Vec::new();
    let mut active = Vec::new();
    let mut names = Vec::new();
    let mut values = Vec::new();
    for input in inputs {
        if input.distribution.is_degenerate() {
            names.push(input.clone());
            values.push(input.distribution.mean());
            pinned.push((input.name.clone(), input.distribution.mean()));
        } else {
            active.push(input.clone());
        }
    }
    Ok((scenario.patched(&names, &values)?, active, pinned))
}

fn options<T: Real>(cfg: &StudyConfig<T>) -> IntegratorOptions<T> {
    IntegratorOptions { rtol: cfg.rtol, atol: cfg.atol, ..IntegratorOptions::default() }
}

/// Index of the trajectory row to report for each grid time: the matching
/// row while the run lasted, the final row (held state) afterwards.
fn held_rows<T: Real>(traj_times: &[T], grid: &[T]) -> Vec<usize> {
    let last = traj_times.len() - 1;
    grid.iter()
        .enumerate()
        .map(|(k, &g)| if k < traj_times.len() && traj_times[k] == g { k } else { last })
        .collect()
}

/// Time-resolved outputs of one run on `grid` (which must start at the
/// initial time), flattened output-major: `[y0(t_0..t_G), y1(t_0..t_G)]`.
///
/// Primary: mean frozen-layer temperature and front position. Secondary:
/// mean cake temperature and mean bound water. A primary run that finishes
/// sublimation early holds its final state for the remaining nodes.
pub fn simulate_outputs<T: Real>(cfg: &StudyConfig<T>, scenario: &Scenario<T>, grid: &[T]) -> Result<Vec<T>> {
    let t_end = *grid.last().expect("non-empty grid");
    let opts = options(cfg);
    let (first, second, times) = match cfg.model {
        ModelKind::Primary => {
            let tr = simulate_primary(&scenario.params, &scenario.conditions, cfg.space_nodes, t_end, Some(grid), &opts)?;
            (tr.product_temperature, tr.front, tr.times)
        }
        ModelKind::Secondary => {
            let tr =
                simulate_secondary(&scenario.params, &scenario.conditions, cfg.space_nodes, t_end, Some(grid), &opts)?;
            (tr.product_temperature, tr.average_concentration, tr.times)
        }
    };
    let rows = held_rows(&times, grid);
    Ok(rows.iter().map(|&r| first[r]).chain(rows.iter().map(|&r| second[r])).collect())
}

/// Spatially averaged bound water on `grid` (secondary drying only).
pub fn simulate_bound_water<T: Real>(cfg: &StudyConfig<T>, scenario: &Scenario<T>, grid: &[T]) -> Result<Vec<T>> {
    let t_end = *grid.last().expect("non-empty grid");
    let tr = simulate_secondary(&scenario.params, &scenario.conditions, cfg.space_nodes, t_end, Some(grid), &options(cfg))?;
    Ok(tr.average_concentration)
}
