//! Monte Carlo propagation: run the model at every sampled parameter set.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pce::{draw_samples, EmpiricalDistribution, UncertainInput};
use crate::physics::{resolve_field_mut, ModelParameters, ProcessConditions};
use crate::scalar::Real;

/// Largest tolerated fraction of failed samples.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

/// Base parameters and conditions that sampled inputs are written into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T> {
    pub params: ModelParameters<T>,
    pub conditions: ProcessConditions<T>,
}

impl<T: Real> Scenario<T> {
    pub fn new(params: ModelParameters<T>, conditions: ProcessConditions<T>) -> Self {
        Self { params, conditions }
    }

    /// Copy with each named input set to the matching entry of `theta`.
    pub fn patched(&self, inputs: &[UncertainInput<T>], theta: &[T]) -> Result<Self> {
        let mut out = *self;
        for (input, &value) in inputs.iter().zip(theta) {
            *resolve_field_mut(&mut out.params, &mut out.conditions, &input.name)? = value;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleFailure {
    pub index: usize,
    pub message: String,
}

/// Model outputs at sampled inputs. Rows of `samples` and `outputs` match;
/// failed samples are dropped from both and listed in `failures`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    pub samples: Matrix<T>,
    pub outputs: Matrix<T>,
    /// Stream index of each kept row.
    pub indices: Vec<usize>,
    pub failures: Vec<SampleFailure>,
    pub seed: u64,
    pub wall_seconds: f64,
}

/// Runs `model` on every row of `samples`, in parallel, in row order.
///
/// Fails if more than [`MAX_FAILURE_FRACTION`] of the rows fail or if the
/// output lengths disagree.
pub fn evaluate_samples<T, F>(
    model: &F,
    scenario: &Scenario<T>,
    inputs: &[UncertainInput<T>],
    samples: &Matrix<T>,
) -> Result<(Matrix<T>, Vec<usize>, Vec<SampleFailure>)>
where
    T: Real,
    F: Fn(&Scenario<T>) -> Result<Vec<T>> + Sync,
{
    let n = samples.rows();
    let results: Vec<Result<Vec<T>>> = (0..n)
        .into_par_iter()
        .map(|k| model(&scenario.patched(inputs, samples.row(k))?))
        .collect();

    let mut kept = Vec::with_capacity(n);
    let mut failures = Vec::new();
    let mut width = None;
    let mut data = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => {
                match width {
                    None => width = Some(v.len()),
                    Some(w) if w != v.len() => {
                        return Err(Error::Simulation(format!(
                            "sample {k} produced {} outputs, expected {w}",
                            v.len()
                        )))
                    }
                    _ => {}
                }
                data.extend(v);
                kept.push(k);
            }
            Err(e) => failures.push(SampleFailure { index: k, message: e.to_string() }),
        }
    }
    let allowed = (MAX_FAILURE_FRACTION * n as f64).floor() as usize;
    if failures.len() > allowed {
        let first = &failures[0];
        return Err(Error::Simulation(format!(
            "{} of {n} samples failed (limit {allowed}); first: sample {}: {}",
            failures.len(),
            first.index,
            first.message
        )));
    }
    let m = width.unwrap_or(0);
    Ok((Matrix::from_rows(kept.len(), m, data), kept, failures))
}

/// Draws `n` samples from `seed` and runs the model on each.
pub fn run_ensemble<T, F>(
    model: &F,
    scenario: &Scenario<T>,
    inputs: &[UncertainInput<T>],
    n: usize,
    seed: u64,
) -> Result<Ensemble<T>>
where
    T: Real,
    F: Fn(&Scenario<T>) -> Result<Vec<T>> + Sync,
{
    if n == 0 {
        return Err(Error::Domain("ensemble needs at least one sample".into()));
    }
    let start = Instant::now();
    let all = draw_samples(inputs, n, seed);
    let (outputs, indices, failures) = evaluate_samples(model, scenario, inputs, &all)?;
    let samples = if failures.is_empty() {
        all
    } else {
        let d = inputs.len();
        Matrix::from_rows(indices.len(), d, indices.iter().flat_map(|&k| all.row(k).to_vec()).collect())
    };
    Ok(Ensemble { samples, outputs, indices, failures, seed, wall_seconds: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputStatistics<T> {
    pub mean: T,
    pub variance: T,
    pub distribution: EmpiricalDistribution<T>,
}

/// Column-wise statistics of an output matrix. Uses the same empirical
/// distribution type as the surrogate path, so both are post-processed by
/// identical code.
pub fn column_statistics<T: Real>(outputs: &Matrix<T>) -> Result<Vec<OutputStatistics<T>>> {
    (0..outputs.cols())
        .map(|k| {
            let distribution = EmpiricalDistribution::new(outputs.column(k))?;
            Ok(OutputStatistics { mean: distribution.mean(), variance: distribution.variance(), distribution })
        })
        .collect()
}

pub fn ensemble_statistics<T: Real>(ensemble: &Ensemble<T>) -> Result<Vec<OutputStatistics<T>>> {
    if ensemble.outputs.rows() == 0 {
        return Err(Error::Domain("empty ensemble".into()));
    }
    column_statistics(&ensemble.outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::Distribution;

    fn scenario() -> Scenario<f64> {
        Scenario::new(ModelParameters::default_set(), ProcessConditions::default_secondary())
    }

    fn identity(s: &Scenario<f64>) -> Result<Vec<f64>> {
        Ok(vec![s.params.f_a, s.conditions.cw_0])
    }

    fn inputs() -> Vec<UncertainInput<f64>> {
        vec![
            UncertainInput::new("f_a", Distribution::Uniform { a: 0.3, b: 0.5 }).unwrap(),
            UncertainInput::new("cw_0", Distribution::Gaussian { mu: 0.088, sigma: 0.018 }).unwrap(),
        ]
    }

    #[test]
    fn identity_model_reproduces_input_moments() {
        let e = run_ensemble(&identity, &scenario(), &inputs(), 20_000, 11).unwrap();
        let st = ensemble_statistics(&e).unwrap();
        assert!((st[0].mean - 0.4).abs() < 4.0 * (0.04f64 / 12.0 / 20_000.0).sqrt());
        assert!((st[1].variance.sqrt() / 0.018 - 1.0).abs() < 0.03);
    }

    #[test]
    fn same_seed_same_ensemble() {
        let a = run_ensemble(&identity, &scenario(), &inputs(), 50, 5).unwrap();
        let b = run_ensemble(&identity, &scenario(), &inputs(), 50, 5).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.outputs, b.outputs);
    }

    #[test]
    fn failures_are_tolerated_up_to_one_percent() {
        let flaky = |s: &Scenario<f64>| -> Result<Vec<f64>> {
            if s.params.f_a > 0.499 {
                Err(Error::Simulation("synthetic".into()))
            } else {
                Ok(vec![1.0])
            }
        };
        let e = run_ensemble(&flaky, &scenario(), &inputs(), 2000, 1).unwrap();
        assert!(!e.failures.is_empty());
        assert_eq!(e.samples.rows(), e.outputs.rows());
        let always = |_: &Scenario<f64>| -> Result<Vec<f64>> { Err(Error::Simulation("no".into())) };
        assert!(run_ensemble(&always, &scenario(), &inputs(), 100, 1).is_err());
    }

    #[test]
    fn unknown_name_fails_patch() {
        let bad = vec![UncertainInput { name: "zz".into(), distribution: Distribution::Uniform { a: 0.0, b: 1.0 } }];
        assert!(scenario().patched(&bad, &[0.5]).is_err());
    }
}
