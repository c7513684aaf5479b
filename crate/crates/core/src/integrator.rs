//! Adaptive linearly-implicit time integration for stiff method-of-lines systems.
//!
//! The stepper is the four-stage, stiffly accurate, L-stable Rosenbrock
//! method RODAS3 (order 3 with an embedded order-2 solution). Jacobians come
//! from forward finite differences, grouped by column colouring when the
//! system declares a banded or sparse structure. Dense output between steps
//! is the quadratic through the last three accepted points, which is also
//! what the event locator bisects on.

use std::fmt;

use crate::linalg::{Band, Lu, Matrix};
use crate::scalar::Real;

/// Sparsity of `∂f/∂y`, used to cut finite-difference work and LU fill.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JacobianStructure {
    Dense,
    /// Entries only within `lower` sub- and `upper` super-diagonals.
    Banded { lower: usize, upper: usize },
    /// For each row, the columns it depends on.
    Pattern(Vec<Vec<usize>>),
}

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem<T: Real> {
    fn dimension(&self) -> usize;

    fn rhs(&self, t: T, y: &[T], dydt: &mut [T]);

    /// Terminal event: integration stops at the first time this function
    /// goes from negative to non-negative.
    fn event(&self, _t: T, _y: &[T]) -> Option<T> {
        None
    }

    fn jacobian_structure(&self) -> JacobianStructure {
        JacobianStructure::Dense
    }

    /// Autonomous systems skip the `∂f/∂t` evaluation.
    fn is_autonomous(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    pub initial_step: Option<T>,
    pub max_step: Option<T>,
    /// Width of the final bisection bracket around an event (s).
    pub event_time_tol: T,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-6),
            atol: T::lit(1e-8),
            max_steps: 200_000,
            initial_step: None,
            max_step: None,
            event_time_tol: T::lit(1e-6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination<T> {
    EndOfSpan,
    Event { time: T },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub jacobians: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult<T> {
    pub times: Vec<T>,
    /// One row per entry of `times`.
    pub states: Vec<Vec<T>>,
    pub termination: Termination<T>,
    pub stats: IntegrationStats,
}

impl<T: Real> IntegrationResult<T> {
    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("result holds at least the initial state")
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("result holds at least the initial time")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    InvalidInput,
    StepUnderflow,
    NonFiniteRhs,
    MaxStepsExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationError {
    pub kind: FailureKind,
    /// Time at which the failure was detected (s).
    pub time: f64,
    pub detail: String,
    /// Last accepted state before the failure (empty for input errors).
    pub state: Vec<f64>,
}

impl fmt::Display for IntegrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at t = {}: {}", self.kind, self.time, self.detail)
    }
}

impl std::error::Error for IntegrationError {}

impl From<IntegrationError> for crate::Error {
    fn from(e: IntegrationError) -> Self {
        crate::Error::Integration(e.to_string())
    }
}

// RODAS3 in the (alpha, gamma) form:
// (I - h γ J) k_i = h f(t + a_i h, y + Σ α_ij k_j) + h J Σ γ_ij k_j + g_i h² f_t
const GAMMA: f64 = 0.5;
const ALPHA: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.75, -0.25, 0.5],
];
const GAMMA_OFF: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [-0.25, -0.25, 0.0],
    [1.0 / 12.0, 1.0 / 12.0, -2.0 / 3.0],
];
/// Retakes of a step that overshoots a terminal event.
const MAX_EVENT_RETAKES: usize = 3;

const STAGE_TIME: [f64; 4] = [0.0, 0.0, 1.0, 1.0];
const STAGE_GAMMA_SUM: [f64; 4] = [0.5, 1.5, 0.0, 0.0];
const WEIGHTS: [f64; 4] = [5.0 / 6.0, -1.0 / 6.0, -1.0 / 6.0, 0.5];
const WEIGHTS_EMBEDDED: [f64; 4] = [0.75, -0.25, 0.5, 0.0];

struct FdPlan {
    groups: Vec<Vec<usize>>,
    col_rows: Vec<Vec<usize>>,
    band: Option<Band>,
}

impl FdPlan {
    fn new(n: usize, structure: &JacobianStructure) -> Self {
        match structure {
            JacobianStructure::Dense => Self {
                groups: (0..n).map(|j| vec![j]).collect(),
                col_rows: (0..n).map(|_| (0..n).collect()).collect(),
                band: None,
            },
            JacobianStructure::Banded { lower, upper } => {
                let width = lower + upper + 1;
                let groups = (0..width.min(n))
                    .map(|g| (g..n).step_by(width).collect())
                    .collect();
                let col_rows = (0..n)
                    .map(|j| (j.saturating_sub(*upper)..(j + lower + 1).min(n)).collect())
                    .collect();
                Self { groups, col_rows, band: Some(Band { lower: *lower, upper: *upper }) }
            }
            JacobianStructure::Pattern(rows) => {
                let mut col_rows = vec![Vec::new(); n];
                for (i, cols) in rows.iter().enumerate() {
                    for &j in cols {
                        if !col_rows[j].contains(&i) {
                            col_rows[j].push(i);
                        }
                    }
                }
                for r in &mut col_rows {
                    r.sort_unstable();
                }
                // Greedy colouring: columns sharing a group touch disjoint rows.
                let mut groups: Vec<Vec<usize>> = Vec::new();
                let mut used: Vec<Vec<bool>> = Vec::new();
                for j in 0..n {
                    let slot = used
                        .iter()
                        .position(|u| col_rows[j].iter().all(|&i| !u[i]));
                    let g = match slot {
                        Some(g) => g,
                        None => {
                            groups.push(Vec::new());
                            used.push(vec![false; n]);
                            groups.len() - 1
                        }
                    };
                    groups[g].push(j);
                    for &i in &col_rows[j] {
                        used[g][i] = true;
                    }
                }
                Self { groups, col_rows, band: None }
            }
        }
    }
}

struct Workspace<T> {
    n: usize,
    k: [Vec<T>; 4],
    stage_y: Vec<T>,
    stage_f: Vec<T>,
    tmp: Vec<T>,
    jv: Vec<T>,
    y_new: Vec<T>,
    f_new: Vec<T>,
    pert: Vec<T>,
    fpert: Vec<T>,
    ft: Vec<T>,
}

impl<T: Real> Workspace<T> {
    fn new(n: usize) -> Self {
        let z = || vec![T::zero(); n];
        Self {
            n,
            k: [z(), z(), z(), z()],
            stage_y: z(),
            stage_f: z(),
            tmp: z(),
            jv: z(),
            y_new: z(),
            f_new: z(),
            pert: z(),
            fpert: z(),
            ft: z(),
        }
    }
}

fn all_finite<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Interpolant over one accepted step `[t0, t1]`: the quadratic through the
/// previous accepted point and both step ends, or the chord on the first step.
///
/// Only solution values are used. Stiff components can have large slopes
/// `f` even when the state itself is accurate, and derivative-based (Hermite)
/// interpolation then overshoots by orders of magnitude.
struct StepInterpolant<'a, T> {
    prev: Option<(T, &'a [T])>,
    t0: T,
    y0: &'a [T],
    t1: T,
    y1: &'a [T],
}

impl<T: Real> StepInterpolant<'_, T> {
    fn eval(&self, t: T, out: &mut [T]) {
        let (t0, t1) = (self.t0, self.t1);
        if t1 == t0 {
            out.copy_from_slice(self.y1);
            return;
        }
        // Lagrange weights; written relative to y0 so constants stay bit-exact.
        match self.prev {
            Some((tp, yp)) if tp < t0 => {
                let w1 = (t - tp) * (t - t0) / ((t1 - tp) * (t1 - t0));
                let wp = (t - t0) * (t - t1) / ((tp - t0) * (tp - t1));
                for i in 0..out.len() {
                    out[i] = self.y0[i] + w1 * (self.y1[i] - self.y0[i]) + wp * (yp[i] - self.y0[i]);
                }
            }
            _ => {
                let w1 = (t - t0) / (t1 - t0);
                for i in 0..out.len() {
                    out[i] = self.y0[i] + w1 * (self.y1[i] - self.y0[i]);
                }
            }
        }
    }
}

fn fail(kind: FailureKind, t: impl Real, detail: impl Into<String>) -> IntegrationError {
    IntegrationError { kind, time: t.to_f64_lossy(), detail: detail.into(), state: Vec::new() }
}

fn fail_at<T: Real>(kind: FailureKind, t: T, y: &[T], detail: impl Into<String>) -> IntegrationError {
    IntegrationError { state: y.iter().map(|v| v.to_f64_lossy()).collect(), ..fail(kind, t, detail) }
}

/// Integrates `system` from `y0` over `t_span`.
///
/// With `output_grid`, the solution is reported at those times (clipped to
/// the span; the span start and end, or the event time, are always
/// included). Without it, every accepted step is reported.
pub fn integrate<T: Real, S: OdeSystem<T> + ?Sized>(
    system: &S,
    y0: &[T],
    t_span: (T, T),
    options: &IntegratorOptions<T>,
    output_grid: Option<&[T]>,
) -> Result<IntegrationResult<T>, IntegrationError> {
    let n = system.dimension();
    let (t_start, t_end) = t_span;
    if y0.len() != n {
        return Err(fail(
            FailureKind::InvalidInput,
            t_start,
            format!("initial state has length {}, system dimension is {n}", y0.len()),
        ));
    }
    if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(fail(FailureKind::InvalidInput, t_start, "time span must be increasing"));
    }
    if !(options.rtol > T::zero()) || !(options.atol > T::zero()) {
        return Err(fail(FailureKind::InvalidInput, t_start, "tolerances must be positive"));
    }
    if !all_finite(y0) {
        return Err(fail(FailureKind::InvalidInput, t_start, "initial state is not finite"));
    }

    let grid: Vec<T> = {
        let mut g: Vec<T> = output_grid
            .map(|g| g.iter().copied().filter(|&t| t > t_start && t < t_end).collect())
            .unwrap_or_default();
        g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        g.dedup();
        g
    };
    let dense_output = output_grid.is_some();
    let mut grid_pos = 0usize;

    let plan = FdPlan::new(n, &system.jacobian_structure());
    let mut ws = Workspace::new(n);
    let mut stats = IntegrationStats::default();
    let mut jac = Matrix::zeros(n, n);

    let mut t = t_start;
    let mut y = y0.to_vec();
    let mut f = vec![T::zero(); n];
    system.rhs(t, &y, &mut f);
    stats.rhs_evals += 1;
    if !all_finite(&f) {
        return Err(fail(FailureKind::NonFiniteRhs, t, "right-hand side not finite at the initial state"));
    }

    let mut times = vec![t];
    let mut states = vec![y.clone()];

    let mut g_prev = system.event(t, &y);
    if let Some(g) = g_prev {
        if g >= T::zero() {
            return Ok(IntegrationResult {
                times,
                states,
                termination: Termination::Event { time: t },
                stats,
            });
        }
    }

    let span = t_end - t_start;
    let max_step = options.max_step.unwrap_or(span);
    let mut h = match options.initial_step {
        Some(h0) => h0,
        None => initial_step(&y, &f, options, span),
    }
    .min(max_step);
    let h_min = T::lit(16.0) * T::epsilon() * t_start.abs().max(t_end.abs()).max(T::one());
    let mut last_rejected = false;
    let mut prev: Option<(T, Vec<T>)> = None;
    let mut event_retakes = 0usize;

    loop {
        if stats.accepted + stats.rejected >= options.max_steps {
            return Err(fail_at(
                FailureKind::MaxStepsExceeded,
                t,
                &y,
                format!("{} step attempts", options.max_steps),
            ));
        }
        if t + h >= t_end || t_end - (t + h) < h_min {
            h = t_end - t;
        }

        // Jacobian at the current point, shared by retries of this step.
        if !last_rejected {
            finite_difference_jacobian(system, t, &y, &f, &plan, options, &mut ws, &mut jac);
            stats.rhs_evals += plan.groups.len();
            stats.jacobians += 1;
            if !system.is_autonomous() {
                let dt = T::epsilon().sqrt() * t.abs().max(T::one());
                system.rhs(t + dt, &y, &mut ws.ft);
                stats.rhs_evals += 1;
                for i in 0..n {
                    ws.ft[i] = (ws.ft[i] - f[i]) / dt;
                }
            }
        }

        let step = rodas_step(system, t, &y, &f, h, &jac, &plan, options, &mut ws, &mut stats);
        let err = match step {
            Ok(err) => err,
            Err(StepFailure::Singular) | Err(StepFailure::NonFinite) => T::infinity(),
        };

        if err <= T::one() {
            let t_new = t + h;
            system.rhs(t_new, &ws.y_new, &mut ws.f_new);
            stats.rhs_evals += 1;
            if !all_finite(&ws.f_new) {
                // Accepting would poison the next step; retry smaller.
                h = h * T::lit(0.25);
                last_rejected = true;
                stats.rejected += 1;
                if h < h_min {
                    return Err(fail_at(FailureKind::NonFiniteRhs, t, &y, "right-hand side not finite after step"));
                }
                continue;
            }
            // Terminal event check on the accepted step.
            let g_new = system.event(t_new, &ws.y_new);
            let interp = StepInterpolant {
                prev: prev.as_ref().map(|(tp, yp)| (*tp, yp.as_slice())),
                t0: t,
                y0: &y,
                t1: t_new,
                y1: &ws.y_new,
            };
            if let (Some(gp), Some(gn)) = (g_prev, g_new) {
                if gp < T::zero() && gn >= T::zero() {
                    let (te, ye) = locate_event(system, &interp, options.event_time_tol);
                    // A long step past the event may leave the model's valid
                    // region; retake it so it ends just after the event.
                    let landing = te + T::lit(1e-3) * (te - t);
                    if event_retakes < MAX_EVENT_RETAKES && t_new - landing > T::lit(1e-3) * h && landing > t {
                        event_retakes += 1;
                        h = landing - t;
                        last_rejected = true;
                        stats.rejected += 1;
                        continue;
                    }
                    stats.accepted += 1;
                    if dense_output {
                        let mut out = vec![T::zero(); n];
                        while grid_pos < grid.len() && grid[grid_pos] < te {
                            interp.eval(grid[grid_pos], &mut out);
                            times.push(grid[grid_pos]);
                            states.push(out.clone());
                            grid_pos += 1;
                        }
                    }
                    times.push(te);
                    states.push(ye);
                    return Ok(IntegrationResult {
                        times,
                        states,
                        termination: Termination::Event { time: te },
                        stats,
                    });
                }
            }
            stats.accepted += 1;
            g_prev = g_new;

            if dense_output {
                let mut out = vec![T::zero(); n];
                while grid_pos < grid.len() && grid[grid_pos] <= t_new {
                    interp.eval(grid[grid_pos], &mut out);
                    times.push(grid[grid_pos]);
                    states.push(out.clone());
                    grid_pos += 1;
                }
            }

            match prev.as_mut() {
                Some((tp, yp)) => {
                    *tp = t;
                    yp.copy_from_slice(&y);
                }
                None => prev = Some((t, y.clone())),
            }
            t = t_new;
            y.copy_from_slice(&ws.y_new);
            f.copy_from_slice(&ws.f_new);

            if t >= t_end {
                if times.last() != Some(&t_end) {
                    times.push(t_end);
                    states.push(y.clone());
                }
                return Ok(IntegrationResult { times, states, termination: Termination::EndOfSpan, stats });
            }
            if !dense_output {
                times.push(t);
                states.push(y.clone());
            }

            let mut fac = if err == T::zero() {
                T::lit(6.0)
            } else {
                T::lit(0.9) * err.powf(T::lit(-1.0 / 3.0))
            };
            fac = fac.max(T::lit(0.2)).min(T::lit(6.0));
            if last_rejected {
                fac = fac.min(T::one());
            }
            h = (h * fac).min(max_step);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() {
                (T::lit(0.9) * err.powf(T::lit(-1.0 / 3.0))).max(T::lit(0.1))
            } else {
                T::lit(0.25)
            };
            h = h * fac.min(T::lit(0.9));
            last_rejected = true;
            if h < h_min {
                return Err(fail_at(
                    FailureKind::StepUnderflow,
                    t,
                    &y,
                    format!("step size {} below minimum {}", h, h_min),
                ));
            }
        }
    }
}

fn initial_step<T: Real>(y: &[T], f: &[T], options: &IntegratorOptions<T>, span: T) -> T {
    let n = T::from_usize_lossy(y.len().max(1));
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..y.len() {
        let sc = options.atol + options.rtol * y[i].abs();
        d0 = d0 + (y[i] / sc).powi(2);
        d1 = d1 + (f[i] / sc).powi(2);
    }
    let d0 = (d0 / n).sqrt();
    let d1 = (d1 / n).sqrt();
    let h = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h.min(span).max(T::lit(1e-10) * span)
}

#[allow(clippy::too_many_arguments)]
fn finite_difference_jacobian<T: Real, S: OdeSystem<T> + ?Sized>(
    system: &S,
    t: T,
    y: &[T],
    f: &[T],
    plan: &FdPlan,
    options: &IntegratorOptions<T>,
    ws: &mut Workspace<T>,
    jac: &mut Matrix<T>,
) {
    let sqrt_eps = T::epsilon().sqrt();
    let floor = options.atol / options.rtol;
    jac.fill(T::zero());
    for group in &plan.groups {
        ws.pert.copy_from_slice(y);
        for &j in group {
            let delta = sqrt_eps * y[j].abs().max(floor);
            ws.pert[j] = y[j] + delta;
        }
        system.rhs(t, &ws.pert, &mut ws.fpert);
        for &j in group {
            let delta = ws.pert[j] - y[j];
            for &i in &plan.col_rows[j] {
                jac[(i, j)] = (ws.fpert[i] - f[i]) / delta;
            }
        }
    }
}

enum StepFailure {
    Singular,
    NonFinite,
}

#[allow(clippy::too_many_arguments)]
fn rodas_step<T: Real, S: OdeSystem<T> + ?Sized>(
    system: &S,
    t: T,
    y: &[T],
    f0: &[T],
    h: T,
    jac: &Matrix<T>,
    plan: &FdPlan,
    options: &IntegratorOptions<T>,
    ws: &mut Workspace<T>,
    stats: &mut IntegrationStats,
) -> Result<T, StepFailure> {
    let n = ws.n;
    let hg = h * T::lit(GAMMA);
    let mut m = Matrix::zeros(n, n);
    match plan.band {
        Some(b) => {
            for i in 0..n {
                for j in i.saturating_sub(b.lower)..(i + b.upper + 1).min(n) {
                    m[(i, j)] = -hg * jac[(i, j)];
                }
                m[(i, i)] = m[(i, i)] + T::one();
            }
        }
        None => {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = -hg * jac[(i, j)];
                }
                m[(i, i)] = m[(i, i)] + T::one();
            }
        }
    }
    let lu = Lu::factor(m, plan.band).map_err(|_| StepFailure::Singular)?;
    let autonomous = system.is_autonomous();

    for s in 0..4 {
        // stage argument
        ws.stage_y.copy_from_slice(y);
        let mut any_alpha = false;
        for j in 0..s {
            let a = ALPHA[s][j];
            if a != 0.0 {
                any_alpha = true;
                let a = T::lit(a);
                for i in 0..n {
                    ws.stage_y[i] = ws.stage_y[i] + a * ws.k[j][i];
                }
            }
        }
        let ts = t + T::lit(STAGE_TIME[s]) * h;
        if any_alpha || STAGE_TIME[s] != 0.0 {
            system.rhs(ts, &ws.stage_y, &mut ws.stage_f);
            stats.rhs_evals += 1;
            if !all_finite(&ws.stage_f) {
                return Err(StepFailure::NonFinite);
            }
        } else {
            ws.stage_f.copy_from_slice(f0);
        }
        // rhs = h f + h J Σ γ_ij k_j + g_i h² f_t
        ws.tmp.iter_mut().for_each(|x| *x = T::zero());
        let mut any_gamma = false;
        for j in 0..s {
            let g = GAMMA_OFF[s][j];
            if g != 0.0 {
                any_gamma = true;
                let g = T::lit(g);
                for i in 0..n {
                    ws.tmp[i] = ws.tmp[i] + g * ws.k[j][i];
                }
            }
        }
        let mut rhs = std::mem::take(&mut ws.k[s]);
        if any_gamma {
            banded_mul(jac, plan.band, &ws.tmp, &mut ws.jv);
            for i in 0..n {
                rhs[i] = h * (ws.stage_f[i] + ws.jv[i]);
            }
        } else {
            for i in 0..n {
                rhs[i] = h * ws.stage_f[i];
            }
        }
        if !autonomous && STAGE_GAMMA_SUM[s] != 0.0 {
            let c = T::lit(STAGE_GAMMA_SUM[s]) * h * h;
            for i in 0..n {
                rhs[i] = rhs[i] + c * ws.ft[i];
            }
        }
        lu.solve_in_place(&mut rhs);
        if !all_finite(&rhs) {
            ws.k[s] = rhs;
            return Err(StepFailure::NonFinite);
        }
        ws.k[s] = rhs;
    }

    let mut err_sum = T::zero();
    for i in 0..n {
        let mut yn = y[i];
        let mut e = T::zero();
        for s in 0..4 {
            yn = yn + T::lit(WEIGHTS[s]) * ws.k[s][i];
            e = e + T::lit(WEIGHTS[s] - WEIGHTS_EMBEDDED[s]) * ws.k[s][i];
        }
        ws.y_new[i] = yn;
        let sc = options.atol + options.rtol * y[i].abs().max(yn.abs());
        err_sum = err_sum + (e / sc).powi(2);
    }
    if !all_finite(&ws.y_new) {
        return Err(StepFailure::NonFinite);
    }
    Ok((err_sum / T::from_usize_lossy(n)).sqrt())
}

fn banded_mul<T: Real>(a: &Matrix<T>, band: Option<Band>, x: &[T], out: &mut [T]) {
    let n = a.rows();
    match band {
        Some(b) => {
            for i in 0..n {
                let row = a.row(i);
                let mut s = T::zero();
                for j in i.saturating_sub(b.lower)..(i + b.upper + 1).min(n) {
                    s = s + row[j] * x[j];
                }
                out[i] = s;
            }
        }
        None => a.mul_vec(x, out),
    }
}

#[allow(clippy::too_many_arguments)]
fn locate_event<T: Real, S: OdeSystem<T> + ?Sized>(system: &S, interp: &StepInterpolant<T>, tol: T) -> (T, Vec<T>) {
    let mut lo = interp.t0;
    let mut hi = interp.t1;
    let mut buf = vec![T::zero(); interp.y0.len()];
    while hi - lo > tol {
        let mid = T::half() * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        interp.eval(mid, &mut buf);
        match system.event(mid, &buf) {
            Some(g) if g >= T::zero() => hi = mid,
            _ => lo = mid,
        }
    }
    if hi == interp.t1 {
        return (hi, interp.y1.to_vec());
    }
    interp.eval(hi, &mut buf);
    (hi, buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem<f64> for Decay {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) {
            d[0] = -y[0];
        }
        fn is_autonomous(&self) -> bool {
            true
        }
    }

    struct Still;
    impl OdeSystem<f64> for Still {
        fn dimension(&self) -> usize {
            3
        }
        fn rhs(&self, _t: f64, _y: &[f64], d: &mut [f64]) {
            d.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    /// y' = -1000 (y - cos t), y(0) = 0.
    struct StiffCos;
    impl OdeSystem<f64> for StiffCos {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, t: f64, y: &[f64], d: &mut [f64]) {
            d[0] = -1000.0 * (y[0] - t.cos());
        }
    }

    fn stiff_cos_exact(t: f64) -> f64 {
        // Closed form: particular solution plus decaying transient.
        let l: f64 = 1000.0;
        let a = l * l / (l * l + 1.0);
        let b = l / (l * l + 1.0);
        a * t.cos() + b * t.sin() - a * (-l * t).exp()
    }

    /// Rises linearly; event when y reaches 1.
    struct Ramp;
    impl OdeSystem<f64> for Ramp {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, _y: &[f64], d: &mut [f64]) {
            d[0] = 0.25;
        }
        fn event(&self, _t: f64, y: &[f64]) -> Option<f64> {
            Some(y[0] - 1.0)
        }
    }

    #[test]
    fn rodas3_order_conditions() {
        let beta = |i: usize, j: usize| ALPHA[i][j] + GAMMA_OFF[i][j];
        let b = WEIGHTS;
        let bp: Vec<f64> = (0..4).map(|i| (0..i).map(|j| beta(i, j)).sum()).collect();
        let a: Vec<f64> = (0..4).map(|i| ALPHA[i][..i].iter().sum()).collect();
        let g = GAMMA;
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let o2: f64 = (0..4).map(|i| b[i] * bp[i]).sum();
        assert!((o2 - (0.5 - g)).abs() < 1e-15);
        let o3a: f64 = (0..4).map(|i| b[i] * a[i] * a[i]).sum();
        assert!((o3a - 1.0 / 3.0).abs() < 1e-15);
        let o3b: f64 = (0..4).map(|i| b[i] * (0..i).map(|j| beta(i, j) * bp[j]).sum::<f64>()).sum();
        assert!((o3b - (1.0 / 6.0 - g + g * g)).abs() < 1e-15);
        for i in 0..4 {
            assert_eq!(a[i], STAGE_TIME[i]);
            let gs: f64 = GAMMA_OFF[i][..i].iter().sum::<f64>() + GAMMA;
            assert!((gs - STAGE_GAMMA_SUM[i]).abs() < 1e-15);
        }
        let bh = WEIGHTS_EMBEDDED;
        assert!((bh.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let e2: f64 = (0..4).map(|i| bh[i] * bp[i]).sum();
        assert!((e2 - (0.5 - g)).abs() < 1e-15);
    }

    #[test]
    fn exponential_decay() {
        let opts = IntegratorOptions::default();
        let r = integrate(&Decay, &[1.0], (0.0, 1.0), &opts, None).unwrap();
        let y1 = r.final_state()[0];
        assert_eq!(r.final_time(), 1.0);
        assert!(((y1 - (-1.0f64).exp()) / (-1.0f64).exp()).abs() < 1e-6, "{y1}");
        assert_eq!(r.termination, Termination::EndOfSpan);
    }

    #[test]
    fn constant_solution_is_exact() {
        let y0 = [1.5, -2.0, 0.25];
        let r = integrate(&Still, &y0, (0.0, 10.0), &IntegratorOptions::default(), None).unwrap();
        for row in &r.states {
            assert_eq!(row.as_slice(), &y0);
        }
    }

    #[test]
    fn stiff_linear_tracks_particular_solution() {
        let opts = IntegratorOptions::default();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let r = integrate(&StiffCos, &[0.0], (0.0, 2.0), &opts, Some(&grid)).unwrap();
        assert_eq!(r.times.len(), grid.len());
        for (t, y) in r.times.iter().zip(&r.states) {
            if *t < 0.02 {
                continue;
            }
            let exact = stiff_cos_exact(*t);
            assert!((y[0] - exact).abs() <= 10.0 * opts.rtol * exact.abs().max(1.0), "t={t}");
        }
    }

    #[test]
    fn tighter_tolerances_do_not_hurt() {
        let mut prev = f64::INFINITY;
        for k in 0..4 {
            let tol = 1e-4 / 2f64.powi(k);
            let opts = IntegratorOptions { rtol: tol, atol: tol * 1e-2, ..Default::default() };
            let r = integrate(&StiffCos, &[0.0], (0.0, 2.0), &opts, None).unwrap();
            let e = (r.final_state()[0] - stiff_cos_exact(2.0)).abs();
            assert!(e <= prev * 1.0001 + 1e-14, "k={k} e={e} prev={prev}");
            prev = e;
        }
    }

    #[test]
    fn event_is_bracketed() {
        let opts = IntegratorOptions::default();
        let r = integrate(&Ramp, &[0.0], (0.0, 10.0), &opts, None).unwrap();
        match r.termination {
            Termination::Event { time } => assert!((time - 4.0).abs() <= opts.event_time_tol),
            _ => panic!("event not detected"),
        }
        assert_eq!(r.final_time(), *r.times.last().unwrap());
        assert!(r.final_state()[0] >= 1.0 - 1e-6);
    }

    #[test]
    fn grid_sampling_includes_endpoints() {
        let grid = [0.25, 0.5, 0.75];
        let r = integrate(&Decay, &[1.0], (0.0, 1.0), &IntegratorOptions::default(), Some(&grid)).unwrap();
        assert_eq!(r.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        for (t, y) in r.times.iter().zip(&r.states) {
            assert!((y[0] - (-t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let o = IntegratorOptions::default();
        assert_eq!(integrate(&Decay, &[1.0, 2.0], (0.0, 1.0), &o, None).unwrap_err().kind, FailureKind::InvalidInput);
        assert_eq!(integrate(&Decay, &[1.0], (1.0, 0.0), &o, None).unwrap_err().kind, FailureKind::InvalidInput);
        let bad = IntegratorOptions { rtol: 0.0, ..o };
        assert_eq!(integrate(&Decay, &[1.0], (0.0, 1.0), &bad, None).unwrap_err().kind, FailureKind::InvalidInput);
    }

    #[test]
    fn max_steps_reports_time() {
        let o = IntegratorOptions { max_steps: 3, ..Default::default() };
        let e = integrate(&StiffCos, &[0.0], (0.0, 2.0), &o, None).unwrap_err();
        assert_eq!(e.kind, FailureKind::MaxStepsExceeded);
        assert!(e.time >= 0.0 && e.time < 2.0);
    }

    struct Blowup;
    impl OdeSystem<f64> for Blowup {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) {
            d[0] = if y[0] > 2.0 { f64::NAN } else { 1.0 / (2.0 - y[0]) };
        }
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let e = integrate(&Blowup, &[3.0], (0.0, 1.0), &IntegratorOptions::default(), None).unwrap_err();
        assert_eq!(e.kind, FailureKind::NonFiniteRhs);
    }

    #[test]
    fn deterministic_bits() {
        let a = integrate(&StiffCos, &[0.0], (0.0, 2.0), &IntegratorOptions::default(), None).unwrap();
        let b = integrate(&StiffCos, &[0.0], (0.0, 2.0), &IntegratorOptions::default(), None).unwrap();
        assert_eq!(a, b);
    }

    struct Chain {
        n: usize,
    }
    impl OdeSystem<f64> for Chain {
        fn dimension(&self) -> usize {
            self.n
        }
        fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) {
            let n = self.n;
            for i in 0..n {
                let l = if i > 0 { y[i - 1] } else { 1.0 };
                let r = if i + 1 < n { y[i + 1] } else { 0.0 };
                d[i] = 400.0 * (l - 2.0 * y[i] + r);
            }
        }
        fn jacobian_structure(&self) -> JacobianStructure {
            JacobianStructure::Banded { lower: 1, upper: 1 }
        }
        fn is_autonomous(&self) -> bool {
            true
        }
    }

    struct ChainDense(Chain);
    impl OdeSystem<f64> for ChainDense {
        fn dimension(&self) -> usize {
            self.0.n
        }
        fn rhs(&self, t: f64, y: &[f64], d: &mut [f64]) {
            self.0.rhs(t, y, d)
        }
        fn is_autonomous(&self) -> bool {
            true
        }
    }

    #[test]
    fn banded_and_dense_jacobians_agree() {
        let y0 = vec![0.0; 15];
        let o = IntegratorOptions::default();
        let a = integrate(&Chain { n: 15 }, &y0, (0.0, 0.05), &o, None).unwrap();
        let b = integrate(&ChainDense(Chain { n: 15 }), &y0, (0.0, 0.05), &o, None).unwrap();
        for (p, q) in a.final_state().iter().zip(b.final_state()) {
            assert!((p - q).abs() < 1e-6);
        }
        assert!(a.stats.rhs_evals < b.stats.rhs_evals);
    }

    #[test]
    fn works_in_f32() {
        struct D32;
        impl OdeSystem<f32> for D32 {
            fn dimension(&self) -> usize {
                1
            }
            fn rhs(&self, _t: f32, y: &[f32], d: &mut [f32]) {
                d[0] = -y[0];
            }
        }
        let o = IntegratorOptions { rtol: 1e-4_f32, atol: 1e-6, ..Default::default() };
        let r = integrate(&D32, &[1.0_f32], (0.0, 1.0), &o, None).unwrap();
        assert!((r.final_state()[0] - (-1.0f32).exp()).abs() < 1e-3);
    }
}
