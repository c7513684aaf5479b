//! Material/geometry parameters, operating conditions and the pointwise
//! constitutive closures shared by the primary and secondary drying models.
//!
//! Everything is SI. Bound water is in kg water per kg dry solid (wt/wt).
//!
//! Cake resistance convention: `R0` is in m/s (equivalently
//! Pa·m²·s/kg), `R1` is the initial growth rate of the resistance per metre
//! of dried layer in 1/s, and `R2` is a length in m. The closure
//! [`cake_resistance`] evaluates `R0 + A·S/(R2 + S)` for a numerator
//! constant `A` in m/s; the simulators pass `A = R1·R2`, which gives
//! `R_p = R0 + R1·S/(1 + S/R2)` and keeps `N_w = Δp/R_p` in kg/(m²·s) with
//! pressures in Pa.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::scalar::Real;

/// Coefficients of the ice vapour-pressure correlation `exp(-a/T + b)`.
const SAT_A: f64 = 6139.9;
const SAT_B: f64 = 28.8912;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParameters<T> {
    /// Product height (m).
    #[serde(rename = "H")]
    pub height: T,
    /// Vial inner diameter (m).
    #[serde(rename = "d")]
    pub diameter: T,
    pub rho_f: T,
    pub cp_f: T,
    pub k_f: T,
    pub rho_e: T,
    pub cp_e: T,
    pub k_e: T,
    /// Dry-solid density of the dried region (solid + vacuum), kg/m³.
    pub rho_d: T,
    #[serde(rename = "dH_sub")]
    pub dh_sub: T,
    #[serde(rename = "dH_des")]
    pub dh_des: T,
    /// Sidewall radiation transfer factor.
    #[serde(rename = "F1")]
    pub f1: T,
    /// Top radiation transfer factor.
    #[serde(rename = "F2")]
    pub f2: T,
    /// Bottom overall heat-transfer coefficient, W/(m²·K).
    pub h: T,
    #[serde(rename = "R0")]
    pub r0: T,
    #[serde(rename = "R1")]
    pub r1: T,
    #[serde(rename = "R2")]
    pub r2: T,
    /// Desorption frequency factor, 1/s.
    pub f_a: T,
    /// Desorption activation energy, J/mol.
    #[serde(rename = "E_a")]
    pub e_a: T,
    pub sigma_sb: T,
    #[serde(rename = "R_gas")]
    pub r_gas: T,
    /// Equilibrium bound-water concentration (wt/wt).
    #[serde(default)]
    pub cw_eq: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConditions<T> {
    /// Bottom shelf temperature (K).
    #[serde(rename = "T_b")]
    pub t_b: T,
    /// Upper plate temperature (K).
    #[serde(rename = "T_u")]
    pub t_u: T,
    /// Chamber wall temperature (K).
    #[serde(rename = "T_c")]
    pub t_c: T,
    /// Chamber water partial pressure (Pa).
    pub p_wc: T,
    /// Initial product temperature (K).
    #[serde(rename = "T_0")]
    pub t_0: T,
    /// Initial bound water (wt/wt), secondary drying only.
    #[serde(default)]
    pub cw_0: T,
    /// Initial time (s).
    #[serde(rename = "t_0", default)]
    pub t_start: T,
}

/// Parameters and conditions that passed [`validate_parameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckedBundle<T> {
    params: ModelParameters<T>,
    conditions: ProcessConditions<T>,
}

impl<T: Real> CheckedBundle<T> {
    pub fn params(&self) -> &ModelParameters<T> {
        &self.params
    }

    pub fn conditions(&self) -> &ProcessConditions<T> {
        &self.conditions
    }

    pub fn into_parts(self) -> (ModelParameters<T>, ProcessConditions<T>) {
        (self.params, self.conditions)
    }
}

/// Ice saturation vapour pressure (Pa).
pub fn saturation_pressure<T: Real>(temperature: T) -> Result<T> {
    if !temperature.is_finite() || temperature <= T::zero() {
        return Err(Error::Domain(format!(
            "saturation pressure needs a positive finite temperature, got {temperature}"
        )));
    }
    Ok(saturation_pressure_unchecked(temperature))
}

#[inline]
pub(crate) fn saturation_pressure_unchecked<T: Real>(temperature: T) -> T {
    (T::lit(SAT_B) - T::lit(SAT_A) / temperature).exp()
}

/// Dried-layer mass-transfer resistance `R0 + R1·S/(R2 + S)`.
pub fn cake_resistance<T: Real>(front: T, r0: T, r1: T, r2: T) -> Result<T> {
    if front.is_nan() || front < T::zero() {
        return Err(Error::Domain(format!("front position must be >= 0, got {front}")));
    }
    if r2 <= T::zero() {
        return Err(Error::Domain(format!("R2 must be positive, got {r2}")));
    }
    Ok(cake_resistance_unchecked(front, r0, r1, r2))
}

#[inline]
pub(crate) fn cake_resistance_unchecked<T: Real>(front: T, r0: T, r1: T, r2: T) -> T {
    r0 + r1 * front / (r2 + front)
}

/// Signed sublimation mass flux (kg/(m²·s)); negative when the chamber
/// partial pressure exceeds saturation. Simulators clamp at zero.
pub fn sublimation_flux<T: Real>(interface_temperature: T, p_wc: T, resistance: T) -> Result<T> {
    if !(resistance > T::zero()) {
        return Err(Error::Domain(format!("resistance must be positive, got {resistance}")));
    }
    Ok((saturation_pressure(interface_temperature)? - p_wc) / resistance)
}

/// Net radiative power from the chamber wall through a side area (W).
pub fn radiative_sidewall_heat<T: Real>(
    temperature: T,
    wall_temperature: T,
    f1: T,
    area: T,
    sigma_sb: T,
) -> Result<T> {
    if !(temperature > T::zero()) || !(wall_temperature > T::zero()) {
        return Err(Error::Domain("radiating temperatures must be positive".into()));
    }
    if !(area > T::zero()) {
        return Err(Error::Domain(format!("area must be positive, got {area}")));
    }
    Ok(sigma_sb * area * f1 * (wall_temperature.powi(4) - temperature.powi(4)))
}

/// Arrhenius desorption rate constant (1/s).
pub fn desorption_rate_constant<T: Real>(temperature: T, f_a: T, e_a: T, r_gas: T) -> Result<T> {
    if !(temperature > T::zero()) {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    Ok(desorption_rate_unchecked(temperature, f_a, e_a, r_gas))
}

#[inline]
pub(crate) fn desorption_rate_unchecked<T: Real>(temperature: T, f_a: T, e_a: T, r_gas: T) -> T {
    if e_a == T::zero() {
        f_a
    } else {
        f_a * (-e_a / (r_gas * temperature)).exp()
    }
}

fn check(ok: bool, field: &'static str, msg: &str, out: &mut Vec<Violation>) {
    if !ok {
        out.push(Violation { field, message: msg.to_string() });
    }
}

/// Checks every parameter/condition invariant and returns all violations at once.
pub fn validate_parameters<T: Real>(
    params: &ModelParameters<T>,
    conditions: &ProcessConditions<T>,
) -> Result<CheckedBundle<T>> {
    let p = params;
    let z = T::zero();
    let pos = |v: T| v.is_finite() && v > z;
    let nonneg = |v: T| v.is_finite() && v >= z;
    let mut v = Vec::new();
    check(pos(p.height), "H", "must be > 0", &mut v);
    check(pos(p.diameter), "d", "must be > 0", &mut v);
    check(pos(p.rho_f), "rho_f", "must be > 0", &mut v);
    check(pos(p.cp_f), "cp_f", "must be > 0", &mut v);
    check(pos(p.k_f), "k_f", "must be > 0", &mut v);
    check(pos(p.rho_e), "rho_e", "must be > 0", &mut v);
    check(pos(p.cp_e), "cp_e", "must be > 0", &mut v);
    check(pos(p.k_e), "k_e", "must be > 0", &mut v);
    check(pos(p.rho_d), "rho_d", "must be > 0", &mut v);
    check(
        p.rho_f > p.rho_e,
        "rho_f",
        "front-speed denominator rho_f - rho_e must be positive (rho_f > rho_e)",
        &mut v,
    );
    check(nonneg(p.dh_sub), "dH_sub", "must be >= 0", &mut v);
    check(nonneg(p.dh_des), "dH_des", "must be >= 0", &mut v);
    check(p.f1.is_finite() && p.f1 >= z && p.f1 <= T::one(), "F1", "must lie in [0, 1]", &mut v);
    check(p.f2.is_finite() && p.f2 >= z && p.f2 <= T::one(), "F2", "must lie in [0, 1]", &mut v);
    check(nonneg(p.h), "h", "must be >= 0", &mut v);
    check(nonneg(p.r0), "R0", "cake-resistance constant must be >= 0", &mut v);
    check(nonneg(p.r1), "R1", "cake-resistance constant must be >= 0", &mut v);
    check(pos(p.r2), "R2", "cake-resistance constant must be > 0", &mut v);
    check(nonneg(p.f_a), "f_a", "must be >= 0", &mut v);
    check(nonneg(p.e_a), "E_a", "must be >= 0", &mut v);
    check(pos(p.sigma_sb), "sigma_sb", "must be > 0", &mut v);
    check(pos(p.r_gas), "R_gas", "must be > 0", &mut v);
    check(nonneg(p.cw_eq), "cw_eq", "must be >= 0", &mut v);

    let c = conditions;
    check(pos(c.t_b), "T_b", "must be > 0 K", &mut v);
    check(pos(c.t_u), "T_u", "must be > 0 K", &mut v);
    check(pos(c.t_c), "T_c", "must be > 0 K", &mut v);
    check(pos(c.t_0), "T_0", "must be > 0 K", &mut v);
    check(nonneg(c.p_wc), "p_wc", "must be >= 0", &mut v);
    check(nonneg(c.cw_0), "cw_0", "must be >= 0", &mut v);
    check(c.t_start.is_finite(), "t_0", "must be finite", &mut v);

    if v.is_empty() {
        Ok(CheckedBundle { params: *params, conditions: *conditions })
    } else {
        Err(Error::InvalidParameters(v))
    }
}

/// Field names addressable by uncertain inputs and overrides.
pub const PARAMETER_NAMES: &[&str] = &[
    "H", "d", "rho_f", "cp_f", "k_f", "rho_e", "cp_e", "k_e", "rho_d", "dH_sub", "dH_des", "F1",
    "F2", "h", "R0", "R1", "R2", "f_a", "E_a", "sigma_sb", "R_gas", "cw_eq",
];

pub const CONDITION_NAMES: &[&str] = &["T_b", "T_u", "T_c", "p_wc", "T_0", "cw_0", "t_0"];

impl<T: Real> ModelParameters<T> {
    pub fn field_mut(&mut self, name: &str) -> Option<&mut T> {
        Some(match name {
            "H" => &mut self.height,
            "d" => &mut self.diameter,
            "rho_f" => &mut self.rho_f,
            "cp_f" => &mut self.cp_f,
            "k_f" => &mut self.k_f,
            "rho_e" => &mut self.rho_e,
            "cp_e" => &mut self.cp_e,
            "k_e" => &mut self.k_e,
            "rho_d" => &mut self.rho_d,
            "dH_sub" => &mut self.dh_sub,
            "dH_des" => &mut self.dh_des,
            "F1" => &mut self.f1,
            "F2" => &mut self.f2,
            "h" => &mut self.h,
            "R0" => &mut self.r0,
            "R1" => &mut self.r1,
            "R2" => &mut self.r2,
            "f_a" => &mut self.f_a,
            "E_a" => &mut self.e_a,
            "sigma_sb" => &mut self.sigma_sb,
            "R_gas" => &mut self.r_gas,
            "cw_eq" => &mut self.cw_eq,
            _ => return None,
        })
    }

    /// Side area of the product, `π d H` (m²).
    pub fn side_area(&self) -> T {
        T::PI() * self.diameter * self.height
    }

    /// Lossless conversion to another scalar type via f64.
    pub fn cast<U: Real>(&self) -> ModelParameters<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        ModelParameters {
            height: c(self.height),
            diameter: c(self.diameter),
            rho_f: c(self.rho_f),
            cp_f: c(self.cp_f),
            k_f: c(self.k_f),
            rho_e: c(self.rho_e),
            cp_e: c(self.cp_e),
            k_e: c(self.k_e),
            rho_d: c(self.rho_d),
            dh_sub: c(self.dh_sub),
            dh_des: c(self.dh_des),
            f1: c(self.f1),
            f2: c(self.f2),
            h: c(self.h),
            r0: c(self.r0),
            r1: c(self.r1),
            r2: c(self.r2),
            f_a: c(self.f_a),
            e_a: c(self.e_a),
            sigma_sb: c(self.sigma_sb),
            r_gas: c(self.r_gas),
            cw_eq: c(self.cw_eq),
        }
    }
}

impl<T: Real> ProcessConditions<T> {
    pub fn field_mut(&mut self, name: &str) -> Option<&mut T> {
        Some(match name {
            "T_b" => &mut self.t_b,
            "T_u" => &mut self.t_u,
            "T_c" => &mut self.t_c,
            "p_wc" => &mut self.p_wc,
            "T_0" => &mut self.t_0,
            "cw_0" => &mut self.cw_0,
            "t_0" => &mut self.t_start,
            _ => return None,
        })
    }

    pub fn cast<U: Real>(&self) -> ProcessConditions<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        ProcessConditions {
            t_b: c(self.t_b),
            t_u: c(self.t_u),
            t_c: c(self.t_c),
            p_wc: c(self.p_wc),
            t_0: c(self.t_0),
            cw_0: c(self.cw_0),
            t_start: c(self.t_start),
        }
    }
}

/// Resolves a parameter path (`h`, `params.h`, `conditions.cw_0`, ...) to a
/// mutable field of the pair. Bare names are unique across both structs.
pub fn resolve_field_mut<'a, T: Real>(
    params: &'a mut ModelParameters<T>,
    conditions: &'a mut ProcessConditions<T>,
    path: &str,
) -> Result<&'a mut T> {
    let (scope, name) = match path.split_once('.') {
        Some((s, n)) => (Some(s), n),
        None => (None, path),
    };
    let found = match scope {
        Some("params") | Some("parameters") => params.field_mut(name),
        Some("conditions") => conditions.field_mut(name),
        Some(other) => {
            return Err(Error::Config(format!("unknown parameter scope `{other}` in `{path}`")))
        }
        None => match params.field_mut(name) {
            Some(f) => Some(f),
            None => conditions.field_mut(name),
        },
    };
    found.ok_or_else(|| Error::Config(format!("unknown parameter `{path}`")))
}

/// True when `path` names exactly one numeric field.
pub fn is_known_field(path: &str) -> bool {
    let name = path.split_once('.').map_or(path, |(_, n)| n);
    PARAMETER_NAMES.contains(&name) || CONDITION_NAMES.contains(&name)
}

const DEFAULT_PARAMETERS: &str = include_str!("../data/parameters.toml");
const DEFAULT_PRIMARY_CONDITIONS: &str = include_str!("../data/primary_conditions.toml");
const DEFAULT_SECONDARY_CONDITIONS: &str = include_str!("../data/secondary_conditions.toml");

/// Schema version accepted by the parameter-file loaders.
pub const PARAMETER_FILE_VERSION: i64 = 1;

fn parse_versioned<D: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<D> {
    let mut table: toml::Table =
        toml::from_str(text).map_err(|e| Error::Config(format!("{what}: {e}")))?;
    match table.remove("version") {
        Some(toml::Value::Integer(v)) if v == PARAMETER_FILE_VERSION => {}
        Some(other) => {
            return Err(Error::Config(format!("{what}: unsupported version {other}")));
        }
        None => return Err(Error::Config(format!("{what}: missing `version` key"))),
    }
    table.try_into().map_err(|e: toml::de::Error| Error::Config(format!("{what}: {e}")))
}

impl ModelParameters<f64> {
    /// Parses a flat TOML parameter document (keys as in [`PARAMETER_NAMES`]).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        parse_versioned(text, "parameter file")
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The shipped calibrated parameter set.
    pub fn default_set() -> Self {
        Self::from_toml_str(DEFAULT_PARAMETERS).expect("bundled parameter file parses")
    }
}

impl ProcessConditions<f64> {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        parse_versioned(text, "conditions file")
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn default_primary() -> Self {
        Self::from_toml_str(DEFAULT_PRIMARY_CONDITIONS).expect("bundled conditions parse")
    }

    pub fn default_secondary() -> Self {
        Self::from_toml_str(DEFAULT_SECONDARY_CONDITIONS).expect("bundled conditions parse")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> (ModelParameters<f64>, ProcessConditions<f64>) {
        (ModelParameters::default_set(), ProcessConditions::default_primary())
    }

    #[test]
    fn saturation_pressure_reference_points() {
        // exp(-6139.9/273.16 + 28.8912) and exp(-6139.9/240 + 28.8912)
        let triple: f64 = saturation_pressure(273.16).unwrap();
        assert!((triple - 610.3).abs() < 0.5, "{triple}");
        let cold = saturation_pressure(240.0_f64).unwrap();
        assert!((cold - 27.3).abs() < 0.05, "{cold}");
        assert!(saturation_pressure(250.0_f64).unwrap() > cold);
    }

    #[test]
    fn saturation_pressure_rejects_bad_temperature() {
        assert!(saturation_pressure(0.0_f64).is_err());
        assert!(saturation_pressure(-3.0_f64).is_err());
        assert!(saturation_pressure(f64::NAN).is_err());
        assert!(saturation_pressure(f64::INFINITY).is_err());
    }

    #[test]
    fn saturation_pressure_is_increasing_on_working_range() {
        let mut t: f64 = 200.0;
        while t < 320.0 {
            let slope = saturation_pressure(t + 1.0).unwrap() - saturation_pressure(t).unwrap();
            assert!(slope > 0.0);
            t += 1.0;
        }
    }

    #[test]
    fn cake_resistance_limits() {
        let (r0, r1, r2): (f64, f64, f64) = (1.5e4, 2.0e5, 3e-3);
        assert_eq!(cake_resistance(0.0, r0, r1, r2).unwrap(), r0);
        assert!((cake_resistance(r2, r0, r1, r2).unwrap() - (r0 + r1 / 2.0)).abs() < 1e-9);
        let far = cake_resistance(1e6, r0, r1, r2).unwrap();
        assert!(far < r0 + r1 && (r0 + r1 - far) / r1 < 1e-8);
        assert!(cake_resistance(-1e-6, r0, r1, r2).is_err());
        assert!(cake_resistance(0.0, r0, r1, 0.0).is_err());
    }

    #[test]
    fn sublimation_flux_cases() {
        let psat: f64 = saturation_pressure(235.0).unwrap();
        assert_eq!(sublimation_flux(235.0, psat, 2e4).unwrap(), 0.0);
        let a: f64 = sublimation_flux(235.0, 1.0, 2e4).unwrap();
        let b = sublimation_flux(235.0, 1.0, 4e4).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        let f: f64 = sublimation_flux(240.0, 0.0, 1e4).unwrap();
        assert!((f - 2.73e-3).abs() < 1e-5, "{f}");
        assert!(sublimation_flux(240.0, 100.0, 1e4).unwrap() < 0.0);
        assert!(sublimation_flux(240.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sidewall_radiation_properties() {
        let s: f64 = 5.670374419e-8;
        assert_eq!(radiative_sidewall_heat(250.0, 250.0, 0.8, 1e-3, s).unwrap(), 0.0);
        let a: f64 = radiative_sidewall_heat(240.0, 290.0, 0.8, 1e-3, s).unwrap();
        let b = radiative_sidewall_heat(290.0, 240.0, 0.8, 1e-3, s).unwrap();
        assert!(a > 0.0 && (a + b).abs() < 1e-15);
        assert_eq!(radiative_sidewall_heat(240.0, 290.0, 0.0, 1e-3, s).unwrap(), 0.0);
    }

    #[test]
    fn desorption_rate_properties() {
        assert_eq!(desorption_rate_constant(300.0_f64, 0.4, 0.0, 8.314).unwrap(), 0.4);
        assert_eq!(desorption_rate_constant(123.0_f64, 0.4, 0.0, 8.314).unwrap(), 0.4);
        let lo = desorption_rate_constant(295.0_f64, 0.4, 2e4, 8.314).unwrap();
        let hi = desorption_rate_constant(310.0, 0.4, 2e4, 8.314).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn default_bundle_validates() {
        let (p, c) = bundle();
        assert!(validate_parameters(&p, &c).is_ok());
        let s = ProcessConditions::default_secondary();
        assert!(validate_parameters(&p, &s).is_ok());
    }

    #[test]
    fn equal_densities_name_front_denominator() {
        let (mut p, c) = bundle();
        p.rho_e = p.rho_f;
        match validate_parameters(&p, &c) {
            Err(Error::InvalidParameters(v)) => {
                assert!(v.iter().any(|x| x.field == "rho_f" && x.message.contains("rho_f - rho_e")))
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn zero_r2_is_rejected() {
        let (mut p, c) = bundle();
        p.r2 = 0.0;
        let err = validate_parameters(&p, &c).unwrap_err();
        assert!(matches!(err, Error::InvalidParameters(ref v) if v.iter().any(|x| x.field == "R2")));
    }

    #[test]
    fn violations_are_collected_not_short_circuited() {
        let (mut p, mut c) = bundle();
        p.height = -1.0;
        p.f1 = 1.5;
        c.p_wc = -2.0;
        let Err(Error::InvalidParameters(v)) = validate_parameters(&p, &c) else {
            panic!("expected violations");
        };
        let fields: Vec<_> = v.iter().map(|x| x.field).collect();
        assert_eq!(fields, vec!["H", "F1", "p_wc"]);
    }

    #[test]
    fn field_paths_resolve() {
        let (mut p, mut c) = bundle();
        *resolve_field_mut(&mut p, &mut c, "h").unwrap() = 21.0;
        *resolve_field_mut(&mut p, &mut c, "conditions.cw_0").unwrap() = 0.5;
        assert_eq!(p.h, 21.0);
        assert_eq!(c.cw_0, 0.5);
        assert!(resolve_field_mut(&mut p, &mut c, "hh").is_err());
        assert!(resolve_field_mut(&mut p, &mut c, "bogus.h").is_err());
        for name in PARAMETER_NAMES.iter().chain(CONDITION_NAMES) {
            assert!(resolve_field_mut(&mut p, &mut c, name).is_ok(), "{name}");
        }
    }

    #[test]
    fn parameter_file_rejects_unknown_key_and_bad_version() {
        let mut text = DEFAULT_PARAMETERS.to_string();
        text.push_str("\nrho_ff = 3.0\n");
        assert!(ModelParameters::from_toml_str(&text).is_err());
        let bumped = DEFAULT_PARAMETERS.replace("version = 1", "version = 9");
        assert!(ModelParameters::from_toml_str(&bumped).is_err());
    }

    #[test]
    fn closures_are_bit_reproducible() {
        let a = saturation_pressure(233.3_f64).unwrap();
        let b = saturation_pressure(233.3_f64).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn generic_in_f32() {
        let p = saturation_pressure(240.0_f32).unwrap();
        assert!((p - 27.3).abs() < 0.1);
    }
}
