//! Wall-clock comparison of the surrogate and Monte Carlo paths.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::Scenario;
use crate::scalar::Real;
use crate::studies::config::{Method, StudyConfig};
use crate::studies::design::{design_min_shelf_temperature, minimize_drying_time};
use crate::studies::uq::run_uq_study;

/// Repetitions per case and method unless told otherwise.
pub const DEFAULT_REPETITIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BenchmarkCase {
    A1,
    A2,
    B1,
    B2,
}

impl BenchmarkCase {
    pub const ALL: [BenchmarkCase; 4] = [BenchmarkCase::A1, BenchmarkCase::A2, BenchmarkCase::B1, BenchmarkCase::B2];

    pub fn preset<T: Real>(self) -> StudyConfig<T> {
        match self {
            BenchmarkCase::A1 => StudyConfig::case_a1(),
            BenchmarkCase::A2 => StudyConfig::case_a2(),
            BenchmarkCase::B1 => StudyConfig::case_b1(),
            BenchmarkCase::B2 => StudyConfig::case_b2(),
        }
    }

    fn run<T: Real>(self, cfg: &StudyConfig<T>, scenario: &Scenario<T>) -> Result<()> {
        match self {
            BenchmarkCase::A1 | BenchmarkCase::A2 => run_uq_study(cfg, scenario).map(drop),
            BenchmarkCase::B1 => design_min_shelf_temperature(cfg, scenario).map(drop),
            BenchmarkCase::B2 => minimize_drying_time(cfg, scenario).map(drop),
        }
    }
}

impl fmt::Display for BenchmarkCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BenchmarkCase::A1 => "A1",
            BenchmarkCase::A2 => "A2",
            BenchmarkCase::B1 => "B1",
            BenchmarkCase::B2 => "B2",
        };
        f.write_str(s)
    }
}

impl FromStr for BenchmarkCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(BenchmarkCase::A1),
            "A2" => Ok(BenchmarkCase::A2),
            "B1" => Ok(BenchmarkCase::B1),
            "B2" => Ok(BenchmarkCase::B2),
            _ => Err(Error::Config(format!("unknown benchmark case `{s}` (expected A1, A2, B1 or B2)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub case: BenchmarkCase,
    pub method: Method,
    pub samples: usize,
    pub runs: usize,
    pub mean_seconds: f64,
    /// Sample standard deviation over the runs (0 for a single run).
    pub sd_seconds: f64,
}

/// Times `reps` complete runs of `case` with each method. Returns one row
/// for PCE and one for MC, in that order.
pub fn benchmark_methods<T: Real>(
    case: BenchmarkCase,
    cfg: &StudyConfig<T>,
    scenario: &Scenario<T>,
    reps: usize,
) -> Result<Vec<BenchmarkRow>> {
    if reps == 0 {
        return Err(Error::Config("benchmark needs at least one repetition".into()));
    }
    [Method::Pce, Method::Mc]
        .into_iter()
        .map(|method| {
            let mut c = cfg.clone();
            c.method = method;
            let times = (0..reps)
                .map(|_| {
                    let start = Instant::now();
                    case.run(&c, scenario)?;
                    Ok(start.elapsed().as_secs_f64())
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = times.iter().sum::<f64>() / reps as f64;
            let sd = if reps > 1 {
                (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
            } else {
                0.0
            };
            let samples = if method == Method::Pce { c.pce_samples } else { c.mc_samples };
            Ok(BenchmarkRow { case, method, samples, runs: reps, mean_seconds: mean, sd_seconds: sd })
        })
        .collect()
}
