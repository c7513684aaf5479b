//! One function per subcommand. Each writes its artifacts into `out` and
//! returns a one-line report for the terminal.

use std::collections::BTreeMap;
use std::time::Instant;

use lyochaos::grid::{linspace, Completion};
use lyochaos::primary::simulate_primary;
use lyochaos::secondary::{secondary_drying_time, simulate_secondary};
use lyochaos::studies::{
    benchmark_methods, design_min_shelf_temperature, minimize_drying_time, one_at_a_time_study, run_uq_study,
    BenchmarkCase, ChanceResult, MethodOutcome, ModelKind, UqResult,
};
use lyochaos::{Options, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::OutputDir;

fn integrator_options(cfg: &RunConfig) -> Options {
    Options { rtol: cfg.study.rtol, atol: cfg.study.atol, ..Options::default() }
}

fn timing(out: &OutputDir, entries: BTreeMap<&str, f64>) -> Result<()> {
    out.json("timing.json", &entries)
}

/// Elapsed time from `t0`, or null when the run did not get there.
fn completion_json(c: Completion<f64>, t0: f64) -> serde_json::Value {
    c.time().map_or(serde_json::Value::Null, |t| json!(t - t0))
}

pub fn simulate_primary_cmd(cfg: &RunConfig, out: &OutputDir) -> Result<String> {
    let start = Instant::now();
    let t0 = cfg.conditions.t_start;
    let t_end = t0 + cfg.simulation.t_end;
    let grid = linspace(t0, t_end, cfg.simulation.points);
    let tr = simulate_primary(
        &cfg.parameters,
        &cfg.conditions,
        cfg.study.space_nodes,
        t_end,
        Some(&grid),
        &integrator_options(cfg),
    )?;
    let wall = start.elapsed().as_secs_f64();
    out.csv(
        "trajectory.csv",
        &[
            "time_s",
            "front_position_m",
            "interface_temperature_K",
            "bottom_temperature_K",
            "product_temperature_K",
            "sublimation_flux_kg_m2_s",
        ],
        (0..tr.len()).map(|k| {
            vec![
                tr.times[k],
                tr.front[k],
                tr.interface_temperature[k],
                tr.bottom_temperature[k],
                tr.product_temperature[k],
                tr.flux[k],
            ]
        }),
    )?;
    let mut header = vec!["time_s".to_string()];
    header.extend((0..cfg.study.space_nodes).map(|i| format!("T{i}_K")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(
        "temperature_profiles.csv",
        &header,
        (0..tr.len()).map(|k| std::iter::once(tr.times[k]).chain(tr.temperatures[k].iter().copied()).collect()),
    )?;
    out.json(
        "summary.json",
        &json!({
            "config": cfg,
            "drying_time_s": completion_json(tr.end, t0),
            "final_front_position_m": tr.front.last(),
            "final_product_temperature_K": tr.product_temperature.last(),
        }),
    )?;
    timing(out, BTreeMap::from([("simulation_s", wall)]))?;
    Ok(match tr.end {
        Completion::Reached(t) => format!("primary drying finished after {:.3} h", (t - t0) / 3600.0),
        Completion::NotReached => format!("primary drying not finished; front at {:.6} m", tr.front.last().unwrap()),
    })
}

pub fn simulate_secondary_cmd(cfg: &RunConfig, out: &OutputDir) -> Result<String> {
    let start = Instant::now();
    let t0 = cfg.conditions.t_start;
    let t_end = t0 + cfg.simulation.t_end;
    let grid = linspace(t0, t_end, cfg.simulation.points);
    let tr = simulate_secondary(
        &cfg.parameters,
        &cfg.conditions,
        cfg.study.space_nodes,
        t_end,
        Some(&grid),
        &integrator_options(cfg),
    )?;
    let wall = start.elapsed().as_secs_f64();
    out.csv(
        "trajectory.csv",
        &[
            "time_s",
            "mean_bound_water_wt_wt",
            "product_temperature_K",
            "top_temperature_K",
            "bottom_temperature_K",
        ],
        (0..tr.len()).map(|k| {
            vec![
                tr.times[k],
                tr.average_concentration[k],
                tr.product_temperature[k],
                tr.top_temperature[k],
                tr.bottom_temperature[k],
            ]
        }),
    )?;
    let done = secondary_drying_time(&tr, cfg.simulation.target);
    out.json(
        "summary.json",
        &json!({
            "config": cfg,
            "target_wt_wt": cfg.simulation.target,
            "drying_time_s": completion_json(done, t0),
            "final_mean_bound_water_wt_wt": tr.average_concentration.last(),
            "final_product_temperature_K": tr.product_temperature.last(),
        }),
    )?;
    timing(out, BTreeMap::from([("simulation_s", wall)]))?;
    Ok(match done {
        Completion::Reached(t) => format!("bound water reached {} after {:.3} h", cfg.simulation.target, (t - t0) / 3600.0),
        Completion::NotReached => format!(
            "bound water did not reach {}; final mean {:.5}",
            cfg.simulation.target,
            tr.average_concentration.last().unwrap()
        ),
    })
}

fn units(model: ModelKind) -> [&'static str; 2] {
    match model {
        ModelKind::Primary => ["K", "m"],
        ModelKind::Secondary => ["K", "wt_wt"],
    }
}

#[derive(Serialize)]
struct OutputSummary {
    output: &'static str,
    unit: &'static str,
    mean: f64,
    variance: f64,
    lower: f64,
    upper: f64,
    min: f64,
    max: f64,
}

fn method_summary(r: &UqResult<f64>, m: &MethodOutcome<f64>, level: f64) -> Result<serde_json::Value> {
    let u = units(r.model);
    let finals = m
        .finals
        .iter()
        .enumerate()
        .map(|(o, d)| {
            let (lower, upper) = d.confidence_interval(level)?;
            Ok(OutputSummary {
                output: r.output_names[o],
                unit: u[o],
                mean: d.mean(),
                variance: d.variance(),
                lower,
                upper,
                min: d.min(),
                max: d.max(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "simulations": m.simulations,
        "failures": m.failures.iter().map(|f| json!({"index": f.index, "message": f.message})).collect::<Vec<_>>(),
        "final": finals,
        "surrogate_moments": m.surrogate.as_ref().map(|s| {
            let nodes = r.times.len();
            let moments = s.moments();
            (0..moments.len() / nodes)
                .map(|o| json!({"output": r.output_names[o], "final_mean": moments[o * nodes + nodes - 1].0,
                                "final_variance": moments[o * nodes + nodes - 1].1}))
                .collect::<Vec<_>>()
        }),
    }))
}

fn write_uq(cfg: &RunConfig, out: &OutputDir, r: &UqResult<f64>, extra: serde_json::Value) -> Result<()> {
    let u = units(r.model);
    let mut header = vec!["time_s".to_string()];
    for (o, name) in r.output_names.iter().enumerate() {
        for stat in ["mean", "lower", "upper"] {
            header.push(format!("{name}_{stat}_{}", u[o]));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut methods = serde_json::Map::new();
    let mut walls = BTreeMap::new();
    for (label, outcome) in [("pce", &r.pce), ("mc", &r.mc)] {
        let Some(m) = outcome else { continue };
        out.csv(
            &format!("{label}_bands.csv"),
            &header,
            (0..r.times.len()).map(|k| {
                let mut row = vec![r.times[k]];
                for b in &m.bands {
                    row.extend([b.mean[k], b.lower[k], b.upper[k]]);
                }
                row
            }),
        )?;
        for (o, d) in m.finals.iter().enumerate() {
            let stem = format!("{label}_final_{}", r.output_names[o]);
            out.distribution(&stem, u[o], d)?;
            if label == "mc" {
                out.csv(
                    &format!("{stem}_samples.csv"),
                    &[&format!("{}_{}", r.output_names[o], u[o])],
                    d.sorted_samples().iter().map(|&v| vec![v]),
                )?;
            }
        }
        if let Some(s) = &m.surrogate {
            std::fs::write(out.path("pce_surrogate.json"), s.to_json() + "\n")
                .map_err(|e| lyochaos::Error::Io(e.to_string()))?;
        }
        methods.insert(label.into(), method_summary(r, m, cfg.study.level)?);
        walls.insert(if label == "pce" { "pce_s" } else { "mc_s" }, m.wall_seconds);
    }
    out.json(
        "summary.json",
        &json!({
            "config": cfg,
            "study": extra,
            "active_inputs": r.active_inputs,
            "pinned_inputs": r.pinned_inputs,
            "methods": methods,
            "ks_final": r.ks_final.as_ref().map(|ks| {
                r.output_names.iter().zip(ks).map(|(n, k)| json!({"output": n, "ks_distance": k})).collect::<Vec<_>>()
            }),
        }),
    )?;
    timing(out, walls)
}

fn uq_report(r: &UqResult<f64>) -> String {
    let mut parts = Vec::new();
    for (label, outcome) in [("PCE", &r.pce), ("MC", &r.mc)] {
        if let Some(m) = outcome {
            let d = &m.finals[0];
            parts.push(format!("{label}: final {} mean {:.3} ({} runs)", r.output_names[0], d.mean(), m.simulations));
        }
    }
    if let Some(ks) = &r.ks_final {
        parts.push(format!("KS {:.4}/{:.4}", ks[0], ks[1]));
    }
    parts.join("; ")
}

pub fn uq_cmd(cfg: &RunConfig, out: &OutputDir) -> Result<String> {
    let r = run_uq_study(&cfg.study, &cfg.scenario())?;
    write_uq(cfg, out, &r, json!({"kind": "uq"}))?;
    Ok(uq_report(&r))
}

pub fn oat_cmd(cfg: &RunConfig, out: &OutputDir, input: &str) -> Result<String> {
    let r = one_at_a_time_study(&cfg.study, &cfg.scenario(), input)?;
    write_uq(cfg, out, &r, json!({"kind": "one-at-a-time", "varied_input": input}))?;
    Ok(format!("{input} only: {}", uq_report(&r)))
}

fn chance_json(c: &ChanceResult<f64>) -> serde_json::Value {
    json!({
        "probability": c.probability,
        "method": c.method,
        "shelf_temperature_K": c.shelf_temperature,
        "drying_time_s": c.drying_time,
        "mean_bound_water_wt_wt": c.distribution.mean(),
        "samples": c.distribution.len(),
    })
}

pub fn design_cmd(cfg: &RunConfig, out: &OutputDir) -> Result<String> {
    let r = design_min_shelf_temperature(&cfg.study, &cfg.scenario())?;
    out.csv(
        "scan.csv",
        &["shelf_temperature_K", "probability"],
        r.scan.iter().map(|p| vec![p.shelf_temperature, p.probability.unwrap_or(f64::NAN)]),
    )?;
    out.distribution("bound_water_at_target", "wt_wt", &r.chance.distribution)?;
    out.json(
        "summary.json",
        &json!({
            "config": cfg,
            "shelf_temperature_K": r.shelf_temperature,
            "chance": chance_json(&r.chance),
            "evaluations": r.evaluations,
            "simulations": r.simulations,
        }),
    )?;
    timing(out, BTreeMap::from([("design_s", r.wall_seconds)]))?;
    Ok(format!(
        "minimum shelf temperature {:.2} K (P = {:.4} at {:.2} h)",
        r.shelf_temperature,
        r.chance.probability,
        cfg.study.design.target_time / 3600.0
    ))
}

pub fn optimize_cmd(cfg: &RunConfig, out: &OutputDir) -> Result<String> {
    let r = minimize_drying_time(&cfg.study, &cfg.scenario())?;
    out.csv(
        "scan.csv",
        &["shelf_temperature_K", "drying_time_s"],
        r.scan.iter().map(|p| vec![p.shelf_temperature, p.drying_time.unwrap_or(f64::NAN)]),
    )?;
    out.csv(
        "probability_curve.csv",
        &["time_s", "probability"],
        r.probability_curve.iter().map(|&(t, p)| vec![t, p]),
    )?;
    out.distribution("bound_water_at_optimum", "wt_wt", &r.chance.distribution)?;
    out.json(
        "summary.json",
        &json!({
            "config": cfg,
            "drying_time_s": r.drying_time,
            "drying_time_h": r.drying_time / 3600.0,
            "shelf_temperature_K": r.shelf_temperature,
            "chance": chance_json(&r.chance),
            "simulations": r.simulations,
        }),
    )?;
    timing(out, BTreeMap::from([("optimize_s", r.wall_seconds)]))?;
    Ok(format!(
        "minimum drying time {:.3} h at T_b = {:.2} K (P = {:.4})",
        r.drying_time / 3600.0,
        r.shelf_temperature,
        r.chance.probability
    ))
}

pub fn benchmark_cmd(cfg: &RunConfig, out: &OutputDir, cases: &[BenchmarkCase], reps: usize) -> Result<String> {
    let mut rows = Vec::new();
    for &case in cases {
        let mut study = case.preset::<f64>();
        // Flags and file settings that are not case-specific carry over.
        study.seed = cfg.study.seed;
        study.pce_samples = cfg.study.pce_samples;
        study.mc_samples = cfg.study.mc_samples;
        study.order = cfg.study.order;
        study.space_nodes = cfg.study.space_nodes;
        let scenario = study.default_scenario();
        let scenario = lyochaos::Scenario::new(cfg.parameters, scenario.conditions);
        rows.extend(benchmark_methods(case, &study, &scenario, reps)?);
    }
    out.json(
        "summary.json",
        &json!({
            "config": cfg,
            "cases": cases,
            "repetitions": reps,
            "rows": rows.iter().map(|r| json!({"case": r.case, "method": r.method, "samples": r.samples, "runs": r.runs})).collect::<Vec<_>>(),
        }),
    )?;
    // The timing table is the benchmark's product, and it is kept out of the
    // deterministic files.
    out.csv(
        "timing.csv",
        &["case", "method_pce0_mc1", "samples", "runs", "mean_s", "sd_s"],
        rows.iter().enumerate().map(|(i, r)| {
            vec![(i / 2) as f64, (i % 2) as f64, r.samples as f64, r.runs as f64, r.mean_seconds, r.sd_seconds]
        }),
    )?;
    let table = rows
        .iter()
        .map(|r| serde_json::to_value(r).expect("plain data"))
        .collect::<Vec<_>>();
    out.json("timing.json", &table)?;
    let mut report = String::from("case  method  samples  mean_s  sd_s\n");
    for r in &rows {
        report.push_str(&format!(
            "{:<5} {:<7} {:>7}  {:.3}  {:.3}\n",
            r.case.to_string(),
            format!("{:?}", r.method).to_uppercase(),
            r.samples,
            r.mean_seconds,
            r.sd_seconds
        ));
    }
    Ok(report.trim_end().to_string())
}
