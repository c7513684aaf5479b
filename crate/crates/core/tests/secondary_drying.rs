use lyochaos::grid::{linspace, Completion};
use lyochaos::integrator::IntegratorOptions;
use lyochaos::physics::{desorption_rate_constant, ModelParameters, ProcessConditions};
use lyochaos::secondary::{secondary_drying_time, simulate_secondary, SecondaryTrajectory, DEFAULT_NODES, DEFAULT_TARGET};

const SPAN: f64 = 15.0 * 3600.0;

fn nominal() -> (ModelParameters<f64>, ProcessConditions<f64>) {
    (ModelParameters::default_set(), ProcessConditions::default_secondary())
}

fn run(p: &ModelParameters<f64>, c: &ProcessConditions<f64>, nodes: usize, rtol: f64, points: usize) -> SecondaryTrajectory<f64> {
    let grid = linspace(0.0, SPAN, points);
    let opts = IntegratorOptions { rtol, ..IntegratorOptions::default() };
    simulate_secondary(p, c, nodes, SPAN, Some(&grid), &opts).unwrap()
}

#[test]
fn bound_water_never_increases_and_stays_non_negative() {
    let (p, c) = nominal();
    let tr = run(&p, &c, DEFAULT_NODES, 1e-6, 301);
    for k in 1..tr.len() {
        for (a, b) in tr.concentrations[k - 1].iter().zip(&tr.concentrations[k]) {
            assert!(*b <= *a + 1e-12, "c_w rose from {a} to {b}");
            assert!(*b >= 0.0);
        }
    }
}

#[test]
fn desorbed_water_matches_integrated_rate() {
    let (p, c) = nominal();
    let tr = run(&p, &c, DEFAULT_NODES, 1e-6, 5401);
    let rate: Vec<f64> = (0..tr.len())
        .map(|k| {
            let local: Vec<f64> = tr.temperatures[k]
                .iter()
                .zip(&tr.concentrations[k])
                .map(|(&t, &cw)| desorption_rate_constant(t, p.f_a, p.e_a, p.r_gas).unwrap() * cw)
                .collect();
            lyochaos::grid::trapezoid_mean(&local)
        })
        .collect();
    let integral: f64 = tr.times.windows(2).zip(rate.windows(2)).map(|(t, r)| 0.5 * (t[1] - t[0]) * (r[0] + r[1])).sum();
    let removed = c.cw_0 - tr.average_concentration.last().unwrap();
    assert!((removed - integral).abs() / removed < 5e-3, "{removed} vs {integral}");
}

#[test]
fn temperatures_stay_between_initial_and_heat_sources() {
    let (p, c) = nominal();
    let tr = run(&p, &c, DEFAULT_NODES, 1e-6, 301);
    let hi = c.t_0.max(c.t_b).max(c.t_u).max(c.t_c) + 0.5;
    assert!(tr.temperatures.iter().flatten().all(|&t| t >= c.t_0 - 1e-9 && t <= hi));
}

#[test]
fn grid_and_tolerance_convergence() {
    let (p, c) = nominal();
    let end = |nodes, rtol| *run(&p, &c, nodes, rtol, 2).average_concentration.last().unwrap();
    let base = end(DEFAULT_NODES, 1e-6);
    for other in [end(2 * DEFAULT_NODES, 1e-6), end(DEFAULT_NODES, 1e-7)] {
        assert!((other - base).abs() / base < 1e-3, "{base} vs {other}");
    }
}

#[test]
fn faster_kinetics_shorten_drying() {
    let (mut p, c) = nominal();
    let slow = secondary_drying_time(&run(&p, &c, 20, 1e-6, 1001), DEFAULT_TARGET).time().unwrap();
    p.f_a *= 2.0;
    let fast = secondary_drying_time(&run(&p, &c, 20, 1e-6, 1001), DEFAULT_TARGET).time().unwrap();
    assert!(fast < slow, "{fast} vs {slow}");
}

#[test]
fn hotter_shelf_shortens_drying() {
    let (p, mut c) = nominal();
    let cool = secondary_drying_time(&run(&p, &c, 20, 1e-6, 1001), DEFAULT_TARGET).time().unwrap();
    c.t_b += 10.0;
    let warm = secondary_drying_time(&run(&p, &c, 20, 1e-6, 1001), DEFAULT_TARGET).time().unwrap();
    assert!(warm < cool);
}

#[test]
fn already_dry_product_completes_at_start() {
    let (p, mut c) = nominal();
    c.cw_0 = 0.005;
    let tr = run(&p, &c, 10, 1e-6, 11);
    assert_eq!(secondary_drying_time(&tr, DEFAULT_TARGET), Completion::Reached(0.0));
}
