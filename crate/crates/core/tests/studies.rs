use lyochaos::pce::Distribution;
use lyochaos::studies::{
    design_min_shelf_temperature, minimize_drying_time, one_at_a_time_study, run_uq_study, Method, StudyConfig,
};
use lyochaos::Error;

/// Coarse but representative settings so each study takes well under a second.
fn quick(mut cfg: StudyConfig<f64>) -> StudyConfig<f64> {
    cfg.space_nodes = 12;
    cfg.time_nodes = 21;
    cfg.mc_samples = 200;
    cfg.series_resamples = 2000;
    cfg.final_resamples = 5000;
    cfg.design.resamples = 2000;
    cfg.design.time_tolerance = 180.0;
    cfg.design.temperature_tolerance = 0.5;
    cfg
}

#[test]
fn uq_study_is_deterministic() {
    let mut cfg = quick(StudyConfig::case_a2());
    cfg.method = Method::Both;
    let s = cfg.default_scenario();
    let a = run_uq_study(&cfg, &s).unwrap();
    let b = run_uq_study(&cfg, &s).unwrap();
    let strip = |mut r: lyochaos::studies::UqResult<f64>| {
        for m in [r.pce.as_mut(), r.mc.as_mut()].into_iter().flatten() {
            m.wall_seconds = 0.0;
        }
        r
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn uq_bands_contain_the_mean_and_start_deterministic() {
    let cfg = quick(StudyConfig::case_a1());
    let r = run_uq_study(&cfg, &cfg.default_scenario()).unwrap();
    let pce = r.pce.unwrap();
    assert_eq!(pce.simulations, cfg.pce_samples);
    for band in &pce.bands {
        assert_eq!(band.mean.len(), cfg.time_nodes);
        for k in 0..band.mean.len() {
            assert!(band.lower[k] <= band.upper[k]);
        }
        // Every sample starts from the same initial state.
        assert!((band.upper[0] - band.lower[0]).abs() < 1e-9);
    }
    assert_eq!(r.active_inputs, vec!["h", "R0", "R1"]);
}

#[test]
fn one_at_a_time_pins_the_other_inputs() {
    let mut cfg = quick(StudyConfig::case_a2());
    cfg.method = Method::Mc;
    let r = one_at_a_time_study(&cfg, &cfg.default_scenario(), "f_a").unwrap();
    assert_eq!(r.active_inputs, vec!["f_a"]);
    let pinned: Vec<(&str, f64)> = r.pinned_inputs.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    assert_eq!(pinned, vec![("cw_0", 0.088), ("h", 15.0)]);
    assert!(one_at_a_time_study(&cfg, &cfg.default_scenario(), "E_a").is_err());
}

#[test]
fn all_pinned_inputs_give_a_single_deterministic_run() {
    let mut cfg = quick(StudyConfig::case_a2());
    cfg.method = Method::Both;
    for i in &mut cfg.inputs {
        let m = i.distribution.mean();
        i.distribution = Distribution::Uniform { a: m, b: m };
    }
    let r = run_uq_study(&cfg, &cfg.default_scenario()).unwrap();
    assert_eq!(r.pce.as_ref().unwrap().simulations, 1);
    assert_eq!(r.ks_final.unwrap(), vec![0.0, 0.0]);
}

#[test]
fn higher_probability_target_needs_a_hotter_shelf() {
    let mut cfg = quick(StudyConfig::case_b1());
    let s = cfg.default_scenario();
    cfg.design.probability = 0.8;
    let low = design_min_shelf_temperature(&cfg, &s).unwrap();
    cfg.design.probability = 0.95;
    let high = design_min_shelf_temperature(&cfg, &s).unwrap();
    assert!(high.shelf_temperature >= low.shelf_temperature);
    assert!(high.chance.probability >= 0.95);
}

#[test]
fn zero_probability_target_returns_the_lower_bound() {
    let mut cfg = quick(StudyConfig::case_b1());
    cfg.design.probability = 0.0;
    let r = design_min_shelf_temperature(&cfg, &cfg.default_scenario()).unwrap();
    assert_eq!(r.shelf_temperature, cfg.design.tb_lower);
}

#[test]
fn unreachable_target_is_reported_as_infeasible() {
    let mut cfg = quick(StudyConfig::case_b1());
    cfg.design.target_time = 600.0;
    match design_min_shelf_temperature(&cfg, &cfg.default_scenario()) {
        Err(Error::Infeasible(msg)) => assert!(msg.contains("295") && msg.contains("320"), "{msg}"),
        other => panic!("expected infeasible, got {other:?}"),
    }
    let mut cfg = quick(StudyConfig::case_b2());
    cfg.design.horizon = 1800.0;
    assert!(matches!(minimize_drying_time(&cfg, &cfg.default_scenario()), Err(Error::Infeasible(_))));
}

#[test]
fn design_rejects_unsuitable_configurations() {
    let mut cfg = quick(StudyConfig::case_b1());
    cfg.method = Method::Both;
    assert!(matches!(design_min_shelf_temperature(&cfg, &cfg.default_scenario()), Err(Error::Config(_))));
    let cfg = quick(StudyConfig::case_a1());
    assert!(matches!(minimize_drying_time(&cfg, &cfg.default_scenario()), Err(Error::Config(_))));
}

#[test]
fn drying_time_falls_with_the_shelf_bound() {
    let mut cfg = quick(StudyConfig::case_b2());
    let s = cfg.default_scenario();
    let mut last = f64::INFINITY;
    for upper in [280.0, 288.0, 295.0] {
        cfg.design.tb_upper = upper;
        let r = minimize_drying_time(&cfg, &s).unwrap();
        assert_eq!(r.shelf_temperature, upper);
        assert!(r.drying_time <= last);
        last = r.drying_time;
    }
}

#[test]
fn already_dry_product_needs_no_time() {
    let mut cfg = quick(StudyConfig::case_b2());
    cfg.inputs.retain(|i| i.name != "cw_0");
    let mut s = cfg.default_scenario();
    s.conditions.cw_0 = 0.005;
    let r = minimize_drying_time(&cfg, &s).unwrap();
    assert_eq!(r.drying_time, 0.0);
}

#[test]
fn single_precision_studies_run() {
    let cfg: StudyConfig<f32> = {
        let mut c = StudyConfig::<f32>::case_a2();
        c.space_nodes = 10;
        c.time_nodes = 11;
        c.rtol = 1e-4;
        c.atol = 1e-6;
        c.series_resamples = 2000;
        c.final_resamples = 2000;
        c
    };
    let r = run_uq_study(&cfg, &cfg.default_scenario()).unwrap();
    let mean = *r.pce.unwrap().bands[1].mean.last().unwrap();
    assert!(mean > 0.0 && mean < 0.088);
}
