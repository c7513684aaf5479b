use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::mc::Scenario;
use crate::pce::{Distribution, UncertainInput};
use crate::physics::{ModelParameters, ProcessConditions};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pce,
    Mc,
    Both,
}

impl Method {
    pub fn uses_pce(self) -> bool {
        matches!(self, Method::Pce | Method::Both)
    }

    pub fn uses_mc(self) -> bool {
        matches!(self, Method::Mc | Method::Both)
    }
}

/// Targets and search settings for the shelf-temperature design and the
/// drying-time minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct DesignTargets<T> {
    /// Drying time the design must meet (s).
    pub target_time: T,
    /// Required `P(c̄_w ≤ concentration)`.
    pub probability: T,
    /// Bound-water target (wt/wt).
    pub concentration: T,
    pub tb_lower: T,
    pub tb_upper: T,
    /// Last time considered when minimizing the drying time (s).
    pub horizon: T,
    /// Bisection tolerance on the shelf temperature (K).
    pub temperature_tolerance: T,
    /// Bisection tolerance and output spacing for the drying time (s).
    pub time_tolerance: T,
    pub scan_points: usize,
    /// Surrogate resamples per probability evaluation.
    pub resamples: usize,
}

impl<T: Real> Default for DesignTargets<T> {
    fn default() -> Self {
        Self {
            target_time: T::lit(7.0 * 3600.0),
            probability: T::lit(0.95),
            concentration: T::lit(0.01),
            tb_lower: T::lit(273.0),
            tb_upper: T::lit(295.0),
            horizon: T::lit(15.0 * 3600.0),
            temperature_tolerance: T::lit(0.1),
            time_tolerance: T::lit(36.0),
            scan_points: 5,
            resamples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct StudyConfig<T> {
    pub model: ModelKind,
    pub inputs: Vec<UncertainInput<T>>,
    pub method: Method,
    /// Model runs used to fit the surrogate.
    pub pce_samples: usize,
    pub mc_samples: usize,
    /// Total polynomial order `N_P`.
    pub order: usize,
    /// Output time nodes (including both ends).
    pub time_nodes: usize,
    /// End of the simulated span (s), measured from the initial time.
    pub duration: T,
    /// Spatial nodes of the method-of-lines grid.
    pub space_nodes: usize,
    pub seed: u64,
    /// Surrogate resamples for the time-resolved bands.
    pub series_resamples: usize,
    /// Surrogate resamples for final-time distributions.
    pub final_resamples: usize,
    /// Coverage of the reported bands.
    pub level: T,
    pub rtol: T,
    pub atol: T,
    pub design: DesignTargets<T>,
}

impl<T: Real> Default for StudyConfig<T> {
    fn default() -> Self {
        Self {
            model: ModelKind::Secondary,
            inputs: Vec::new(),
            method: Method::Pce,
            pce_samples: 50,
            mc_samples: 2000,
            order: 2,
            time_nodes: 200,
            duration: T::lit(10.0 * 3600.0),
            space_nodes: 40,
            seed: 20240501,
            series_resamples: 10_000,
            final_resamples: 100_000,
            level: T::lit(0.95),
            rtol: T::lit(1e-6),
            atol: T::lit(1e-8),
            design: DesignTargets::default(),
        }
    }
}

fn input<T: Real>(name: &str, d: Distribution<T>) -> UncertainInput<T> {
    UncertainInput::new(name, d).expect("built-in input is valid")
}

/// Heat-transfer coefficient uncertainty shared by both drying steps.
fn h_input<T: Real>() -> UncertainInput<T> {
    input("h", Distribution::Gaussian { mu: T::lit(15.0), sigma: T::lit(3.0) })
}

impl<T: Real> StudyConfig<T> {
    /// Primary drying with uncertain `h`, `R0`, `R1`.
    pub fn case_a1() -> Self {
        Self {
            model: ModelKind::Primary,
            inputs: vec![
                h_input(),
                input("R0", Distribution::Uniform { a: T::lit(1e4), b: T::lit(2e4) }),
                input("R1", Distribution::Uniform { a: T::lit(1e7), b: T::lit(3e7) }),
            ],
            duration: T::lit(2.0 * 3600.0),
            ..Self::default()
        }
    }

    /// Secondary drying with uncertain `cw_0`, `f_a`, `h`.
    pub fn case_a2() -> Self {
        Self {
            model: ModelKind::Secondary,
            inputs: vec![
                input("cw_0", Distribution::Gaussian { mu: T::lit(0.088), sigma: T::lit(0.018) }),
                input("f_a", Distribution::Uniform { a: T::lit(0.3), b: T::lit(0.5) }),
                h_input(),
            ],
            duration: T::lit(10.0 * 3600.0),
            ..Self::default()
        }
    }

    /// Minimum shelf temperature for a 7 h drying time at P = 0.95.
    pub fn case_b1() -> Self {
        let mut c = Self::case_a2();
        c.design.tb_lower = T::lit(295.0);
        c.design.tb_upper = T::lit(320.0);
        c
    }

    /// Minimum drying time for shelf temperatures in [273, 295] K at P = 0.95.
    pub fn case_b2() -> Self {
        let mut c = Self::case_a2();
        c.design.tb_lower = T::lit(273.0);
        c.design.tb_upper = T::lit(295.0);
        c
    }

    /// Default parameters with the conditions file matching the model.
    pub fn default_scenario(&self) -> Scenario<T> {
        let conditions = match self.model {
            ModelKind::Primary => ProcessConditions::default_primary(),
            ModelKind::Secondary => ProcessConditions::default_secondary(),
        };
        Scenario::new(ModelParameters::default_set().cast(), conditions.cast())
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut names = std::collections::BTreeSet::new();
        for i in &self.inputs {
            if !crate::physics::is_known_field(&i.name) {
                problems.push(format!("unknown input `{}`", i.name));
            }
            let bare = i.name.split_once('.').map_or(i.name.as_str(), |(_, n)| n);
            if !names.insert(bare.to_string()) {
                problems.push(format!("input `{}` listed twice", i.name));
            }
            if let Err(e) = i.distribution.validate() {
                problems.push(format!("input `{}`: {e}", i.name));
            }
        }
        if self.pce_samples == 0 || self.mc_samples == 0 {
            problems.push("sample counts must be positive".into());
        }
        if self.time_nodes < 2 {
            problems.push("time_nodes must be at least 2".into());
        }
        if self.space_nodes < 3 {
            problems.push("space_nodes must be at least 3".into());
        }
        if !(self.duration > T::zero()) {
            problems.push("duration must be positive".into());
        }
        if !(self.level > T::zero() && self.level < T::one()) {
            problems.push("level must lie in (0, 1)".into());
        }
        if !(self.rtol > T::zero() && self.atol > T::zero()) {
            problems.push("tolerances must be positive".into());
        }
        let d = &self.design;
        if !(d.probability >= T::zero() && d.probability <= T::one()) {
            problems.push("design.probability must lie in [0, 1]".into());
        }
        if !(d.tb_lower <= d.tb_upper) || !(d.tb_lower > T::zero()) {
            problems.push("design shelf-temperature bounds must be positive and ordered".into());
        }
        if !(d.target_time > T::zero()) || !(d.horizon > T::zero()) {
            problems.push("design target time and horizon must be positive".into());
        }
        if !(d.concentration > T::zero()) {
            problems.push("design.concentration must be positive".into());
        }
        if !(d.temperature_tolerance > T::zero() && d.time_tolerance > T::zero()) {
            problems.push("design tolerances must be positive".into());
        }
        if d.scan_points < 2 {
            problems.push("design.scan_points must be at least 2".into());
        }
        if d.resamples < crate::pce::surrogate::MIN_RESAMPLE
            || self.series_resamples < crate::pce::surrogate::MIN_RESAMPLE
            || self.final_resamples < crate::pce::surrogate::MIN_RESAMPLE
        {
            problems.push(format!(
                "resample counts must be at least {}",
                crate::pce::surrogate::MIN_RESAMPLE
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// Shared output grid from the scenario's initial time.
    pub fn output_grid(&self, t0: T) -> Vec<T> {
        linspace(t0, t0 + self.duration, self.time_nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for c in [
            StudyConfig::<f64>::case_a1(),
            StudyConfig::case_a2(),
            StudyConfig::case_b1(),
            StudyConfig::case_b2(),
        ] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn validation_collects_problems() {
        let mut c = StudyConfig::<f64>::case_a2();
        c.level = 1.5;
        c.design.tb_lower = 300.0;
        c.design.tb_upper = 290.0;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("level") && msg.contains("bounds"), "{msg}");
    }

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let c = StudyConfig::<f64>::case_a1();
        let text = toml::to_string(&c).unwrap();
        let back: StudyConfig<f64> = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(toml::from_str::<StudyConfig<f64>>("modle = \"primary\"").is_err());
    }
}
