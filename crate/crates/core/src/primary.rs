//! Primary drying: the frozen layer below a receding sublimation front.
//!
//! The frozen region `S < z < H` is mapped onto `ξ = (z - S)/(H - S) ∈ [0, 1]`
//! so the grid stays fixed while the front moves. On the fixed grid the
//! heat equation picks up a convective term from the moving mesh:
//!
//! ```text
//! θ_t = α θ_ξξ / L² + q_side / (ρ_f c_f) + (1 - ξ) Ṡ θ_ξ / L,   L = H - S
//! ```
//!
//! Boundary fluxes enter through ghost nodes. The state vector is
//! `[θ_0, …, θ_{N-1}, S]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{trapezoid_mean, Completion};
use crate::integrator::{integrate, IntegratorOptions, JacobianStructure, OdeSystem, Termination};
use crate::physics::{
    cake_resistance_unchecked, saturation_pressure_unchecked, validate_parameters, ModelParameters,
    ProcessConditions,
};
use crate::scalar::Real;

pub const DEFAULT_NODES: usize = 40;

/// Fraction of `H` left frozen when sublimation is declared complete.
pub const FRONT_END_FRACTION: f64 = 1e-3;

/// Method-of-lines system for the frozen layer.
#[derive(Debug, Clone)]
pub struct PrimarySystem<T> {
    params: ModelParameters<T>,
    conditions: ProcessConditions<T>,
    nodes: usize,
    dxi: T,
    // Precomputed groupings.
    diffusivity: T,
    side_coeff: T,
    tc4: T,
    tu4: T,
    resistance_a: T,
}

impl<T: Real> PrimarySystem<T> {
    pub fn new(params: &ModelParameters<T>, conditions: &ProcessConditions<T>, nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::Domain(format!("primary drying needs at least 3 nodes, got {nodes}")));
        }
        let bundle = validate_parameters(params, conditions)?;
        let (p, c) = bundle.into_parts();
        let dxi = T::one() / T::from_usize_lossy(nodes - 1);
        // Q_rad / (π d² L) with A_r = π d H reduces to σ F1 H (Tc⁴ - T⁴) / (d L).
        let side_coeff = p.sigma_sb * p.f1 * p.height / p.diameter / (p.rho_f * p.cp_f);
        Ok(Self {
            diffusivity: p.k_f / (p.rho_f * p.cp_f),
            side_coeff,
            tc4: c.t_c.powi(4),
            tu4: c.t_u.powi(4),
            resistance_a: p.r1 * p.r2,
            params: p,
            conditions: c,
            nodes,
            dxi,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn initial_state(&self) -> Vec<T> {
        let mut y = vec![self.conditions.t_0; self.nodes + 1];
        y[self.nodes] = T::zero();
        y
    }

    /// Clamped sublimation flux (kg/(m²·s)) for an interface temperature and front position.
    pub fn flux(&self, interface_temperature: T, front: T) -> T {
        let p = &self.params;
        let rp = cake_resistance_unchecked(front.max(T::zero()), p.r0, self.resistance_a, p.r2);
        let drive = saturation_pressure_unchecked(interface_temperature) - self.conditions.p_wc;
        (drive / rp).max(T::zero())
    }

    pub fn front_speed(&self, interface_temperature: T, front: T) -> T {
        self.flux(interface_temperature, front) / (self.params.rho_f - self.params.rho_e)
    }
}

impl<T: Real> OdeSystem<T> for PrimarySystem<T> {
    fn dimension(&self) -> usize {
        self.nodes + 1
    }

    fn rhs(&self, _t: T, y: &[T], dydt: &mut [T]) {
        let n = self.nodes;
        let p = &self.params;
        let theta = &y[..n];
        let s = y[n];
        let len = p.height - s;
        let dxi = self.dxi;
        let two = T::two();

        let nw = self.flux(theta[0], s);
        let sdot = nw / (p.rho_f - p.rho_e);

        let top_rad = p.sigma_sb * p.f2 * (self.tu4 - theta[0].powi(4));
        let grad_top = len * (nw * p.dh_sub - top_rad) / p.k_f;
        let grad_bottom = -len * p.h * (theta[n - 1] - self.conditions.t_b) / p.k_f;

        let lap_scale = self.diffusivity / (len * len * dxi * dxi);
        let conv_scale = sdot / len;
        let side_scale = self.side_coeff / len;

        for i in 0..n {
            let (lap, grad) = if i == 0 {
                let ghost = theta[1] - two * dxi * grad_top;
                (theta[1] - two * theta[0] + ghost, grad_top)
            } else if i == n - 1 {
                let ghost = theta[n - 2] + two * dxi * grad_bottom;
                (ghost - two * theta[i] + theta[n - 2], grad_bottom)
            } else {
                (
                    theta[i + 1] - two * theta[i] + theta[i - 1],
                    (theta[i + 1] - theta[i - 1]) / (two * dxi),
                )
            };
            let xi = T::from_usize_lossy(i) * dxi;
            dydt[i] = lap_scale * lap
                + side_scale * (self.tc4 - theta[i].powi(4))
                + (T::one() - xi) * conv_scale * grad;
        }
        dydt[n] = sdot;
    }

    fn event(&self, _t: T, y: &[T]) -> Option<T> {
        let h = self.params.height;
        Some(y[self.nodes] - (T::one() - T::lit(FRONT_END_FRACTION)) * h)
    }

    fn jacobian_structure(&self) -> JacobianStructure {
        let n = self.nodes;
        let mut rows: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut r = vec![0, n];
                r.extend(i.saturating_sub(1)..=(i + 1).min(n - 1));
                r.sort_unstable();
                r.dedup();
                r
            })
            .collect();
        rows.push(vec![0, n]);
        JacobianStructure::Pattern(rows)
    }

    fn is_autonomous(&self) -> bool {
        true
    }
}

/// Primary-drying solution sampled on the output times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimaryTrajectory<T> {
    pub times: Vec<T>,
    /// Frozen-layer temperatures, one row per time, `N` columns on the ξ grid.
    pub temperatures: Vec<Vec<T>>,
    pub front: Vec<T>,
    pub interface_temperature: Vec<T>,
    pub bottom_temperature: Vec<T>,
    /// Spatial mean of the frozen-layer temperature.
    pub product_temperature: Vec<T>,
    /// Clamped sublimation flux, kg/(m²·s).
    pub flux: Vec<T>,
    pub end: Completion<T>,
}

impl<T: Real> PrimaryTrajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Event time if sublimation finished, otherwise `NotReached`.
pub fn primary_drying_time<T: Real>(trajectory: &PrimaryTrajectory<T>) -> Completion<T> {
    trajectory.end
}

pub fn simulate_primary<T: Real>(
    params: &ModelParameters<T>,
    conditions: &ProcessConditions<T>,
    nodes: usize,
    t_end: T,
    output_grid: Option<&[T]>,
    options: &IntegratorOptions<T>,
) -> Result<PrimaryTrajectory<T>> {
    let system = PrimarySystem::new(params, conditions, nodes)?;
    let t0 = conditions.t_start;
    if !(t_end > t0) {
        return Err(Error::Domain(format!("t_end ({t_end}) must exceed t_0 ({t0})")));
    }
    let result = integrate(&system, &system.initial_state(), (t0, t_end), options, output_grid).map_err(|e| {
        let context = if e.state.len() == nodes + 1 {
            let temps = &e.state[..nodes];
            let lo = temps.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = temps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            format!("; S = {} m, T in [{lo}, {hi}] K", e.state[nodes])
        } else {
            String::new()
        };
        Error::Simulation(format!("primary drying: {e}{context}"))
    })?;

    let count = result.times.len();
    let mut traj = PrimaryTrajectory {
        times: result.times,
        temperatures: Vec::with_capacity(count),
        front: Vec::with_capacity(count),
        interface_temperature: Vec::with_capacity(count),
        bottom_temperature: Vec::with_capacity(count),
        product_temperature: Vec::with_capacity(count),
        flux: Vec::with_capacity(count),
        end: match result.termination {
            Termination::Event { time } => Completion::Reached(time),
            Termination::EndOfSpan => Completion::NotReached,
        },
    };
    for state in result.states {
        let theta = &state[..nodes];
        let s = state[nodes];
        traj.front.push(s);
        traj.interface_temperature.push(theta[0]);
        traj.bottom_temperature.push(theta[nodes - 1]);
        traj.product_temperature.push(trapezoid_mean(theta));
        traj.flux.push(system.flux(theta[0], s));
        traj.temperatures.push(theta.to_vec());
    }
    Ok(traj)
}
