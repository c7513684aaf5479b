//! Secondary drying: heat conduction through the dried cake coupled to
//! local linear-driving-force desorption of bound water.
//!
//! `z = 0` is the top surface (radiation from the upper plate) and `z = H`
//! the bottom (convective/radiative exchange with the shelf). Temperature and
//! bound water are co-located and interleaved in the state as
//! `[T_0, c_0, T_1, c_1, …]`, which makes the Jacobian pentadiagonal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{trapezoid_mean, Completion};
use crate::integrator::{integrate, IntegratorOptions, JacobianStructure, OdeSystem};
use crate::physics::{desorption_rate_unchecked, validate_parameters, ModelParameters, ProcessConditions};
use crate::scalar::Real;

pub const DEFAULT_NODES: usize = 40;

/// Bound-water target commonly used to call a product dry (wt/wt).
pub const DEFAULT_TARGET: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct SecondarySystem<T> {
    params: ModelParameters<T>,
    conditions: ProcessConditions<T>,
    nodes: usize,
    dz: T,
    heat_capacity: T,
    side_coeff: T,
    tc4: T,
    tu4: T,
}

impl<T: Real> SecondarySystem<T> {
    pub fn new(params: &ModelParameters<T>, conditions: &ProcessConditions<T>, nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::Domain(format!("secondary drying needs at least 3 nodes, got {nodes}")));
        }
        let (p, c) = validate_parameters(params, conditions)?.into_parts();
        Ok(Self {
            dz: p.height / T::from_usize_lossy(nodes - 1),
            heat_capacity: p.rho_e * p.cp_e,
            // Q_rad / (π d² H) with A_r = π d H.
            side_coeff: p.sigma_sb * p.f1 / p.diameter,
            tc4: c.t_c.powi(4),
            tu4: c.t_u.powi(4),
            params: p,
            conditions: c,
            nodes,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn initial_state(&self) -> Vec<T> {
        let mut y = Vec::with_capacity(2 * self.nodes);
        for _ in 0..self.nodes {
            y.push(self.conditions.t_0);
            y.push(self.conditions.cw_0);
        }
        y
    }

    #[inline]
    fn desorption(&self, temperature: T, c: T) -> T {
        let p = &self.params;
        desorption_rate_unchecked(temperature, p.f_a, p.e_a, p.r_gas) * (p.cw_eq - c)
    }
}

impl<T: Real> OdeSystem<T> for SecondarySystem<T> {
    fn dimension(&self) -> usize {
        2 * self.nodes
    }

    fn rhs(&self, _t: T, y: &[T], dydt: &mut [T]) {
        let n = self.nodes;
        let p = &self.params;
        let two = T::two();
        let temp = |i: usize| y[2 * i];

        let grad_top = -p.sigma_sb * p.f2 * (self.tu4 - temp(0).powi(4)) / p.k_e;
        let grad_bottom = -p.h * (temp(n - 1) - self.conditions.t_b) / p.k_e;
        let cond = p.k_e / (self.dz * self.dz);
        let latent = p.rho_d * p.dh_des;

        for i in 0..n {
            let ti = temp(i);
            let left = if i == 0 { temp(1) - two * self.dz * grad_top } else { temp(i - 1) };
            let right = if i == n - 1 { temp(n - 2) + two * self.dz * grad_bottom } else { temp(i + 1) };
            let dc = self.desorption(ti, y[2 * i + 1]);
            let source = cond * (left - two * ti + right)
                + latent * dc
                + self.side_coeff * (self.tc4 - ti.powi(4));
            dydt[2 * i] = source / self.heat_capacity;
            dydt[2 * i + 1] = dc;
        }
    }

    fn jacobian_structure(&self) -> JacobianStructure {
        JacobianStructure::Banded { lower: 2, upper: 2 }
    }

    fn is_autonomous(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondaryTrajectory<T> {
    pub times: Vec<T>,
    /// Nodal temperatures on `z ∈ [0, H]`, one row per time.
    pub temperatures: Vec<Vec<T>>,
    /// Nodal bound water (wt/wt), one row per time.
    pub concentrations: Vec<Vec<T>>,
    pub average_concentration: Vec<T>,
    /// Spatial mean temperature.
    pub product_temperature: Vec<T>,
    pub top_temperature: Vec<T>,
    pub bottom_temperature: Vec<T>,
}

impl<T: Real> SecondaryTrajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Trapezoidal mean of a nodal bound-water field on a uniform grid.
pub fn average_bound_water<T: Real>(concentrations: &[T]) -> T {
    trapezoid_mean(concentrations)
}

/// First time the spatially averaged bound water drops to `target`,
/// linearly interpolated between output nodes.
pub fn secondary_drying_time<T: Real>(trajectory: &SecondaryTrajectory<T>, target: T) -> Completion<T> {
    crossing_time(&trajectory.times, &trajectory.average_concentration, target)
}

pub(crate) fn crossing_time<T: Real>(times: &[T], values: &[T], target: T) -> Completion<T> {
    match values.first() {
        None => return Completion::NotReached,
        Some(&v) if v <= target => return Completion::Reached(times[0]),
        _ => {}
    }
    for k in 1..values.len() {
        let (a, b) = (values[k - 1], values[k]);
        if b <= target {
            let frac = if a == b { T::one() } else { (a - target) / (a - b) };
            return Completion::Reached(times[k - 1] + frac * (times[k] - times[k - 1]));
        }
    }
    Completion::NotReached
}

pub fn simulate_secondary<T: Real>(
    params: &ModelParameters<T>,
    conditions: &ProcessConditions<T>,
    nodes: usize,
    t_end: T,
    output_grid: Option<&[T]>,
    options: &IntegratorOptions<T>,
) -> Result<SecondaryTrajectory<T>> {
    let system = SecondarySystem::new(params, conditions, nodes)?;
    let t0 = conditions.t_start;
    if !(t_end > t0) {
        return Err(Error::Domain(format!("t_end ({t_end}) must exceed t_0 ({t0})")));
    }
    let result = integrate(&system, &system.initial_state(), (t0, t_end), options, output_grid).map_err(|e| {
        let context = if e.state.len() == 2 * nodes {
            let temps = e.state.iter().step_by(2);
            let lo = temps.clone().copied().fold(f64::INFINITY, f64::min);
            let hi = temps.copied().fold(f64::NEG_INFINITY, f64::max);
            format!("; T in [{lo}, {hi}] K")
        } else {
            String::new()
        };
        Error::Simulation(format!("secondary drying: {e}{context}"))
    })?;

    let count = result.times.len();
    let mut traj = SecondaryTrajectory {
        times: result.times,
        temperatures: Vec::with_capacity(count),
        concentrations: Vec::with_capacity(count),
        average_concentration: Vec::with_capacity(count),
        product_temperature: Vec::with_capacity(count),
        top_temperature: Vec::with_capacity(count),
        bottom_temperature: Vec::with_capacity(count),
    };
    for state in result.states {
        let temps: Vec<T> = state.iter().step_by(2).copied().collect();
        let conc: Vec<T> = state.iter().skip(1).step_by(2).copied().collect();
        traj.average_concentration.push(average_bound_water(&conc));
        traj.product_temperature.push(trapezoid_mean(&temps));
        traj.top_temperature.push(temps[0]);
        traj.bottom_temperature.push(temps[nodes - 1]);
        traj.temperatures.push(temps);
        traj.concentrations.push(conc);
    }
    Ok(traj)
}
