mod common;

use std::fs;

use common::{as_int, fig1, fig1_chart, suite};
use pms1::arcflow::{build_fff, build_fft};
use pms1::bench::{run_bench, BenchConfig, ModelKind};
use pms1::bounds::{horizon_ub, lb_better};
use pms1::instance::{GenParams, Instance};
use pms1::milp::{
    export_lp, export_mps, import_solution, read_and_solve_file, solve, write_solution, SolveOptions,
    SolveStatus,
};
use pms1::oracle::brute_force;
use pms1::schedule::{gantt_svg, validate};
use pms1::tivi::build_tivi;

#[test]
fn worked_example_all_formulations() {
    let inst = fig1();
    let report = horizon_ub(&inst);
    assert_eq!(report.ub, 15);
    for grouped in [false, true] {
        let fm = build_fff(&inst, 18, grouped).unwrap();
        let out = solve(&fm.model, &SolveOptions::default()).unwrap();
        assert_eq!(as_int(out.objective.unwrap()), 15);
    }
    let fft = build_fft(&inst, 18).unwrap();
    assert_eq!(as_int(solve(&fft.model, &SolveOptions::default()).unwrap().objective.unwrap()), 15);
    let tivi = build_tivi(&inst, 18).unwrap();
    assert_eq!(as_int(solve(&tivi.model, &SolveOptions::default()).unwrap().objective.unwrap()), 15);
    assert_eq!(brute_force(&inst, 8).unwrap().optimum, 15);
}

#[test]
fn decoded_worked_example_golden() {
    let inst = fig1();
    let fm = build_fff(&inst, 18, false).unwrap();
    let chart = fig1_chart(&inst);
    let values = fm.warm_start(&chart).unwrap();
    let decoded = fm.decode(&values, &inst).unwrap();
    // machine 1 carries job 1 over [0, 5) then job 3
    let m1: Vec<(u32, u32)> = decoded
        .assignments
        .iter()
        .filter(|a| a.machine == 1)
        .map(|a| (a.job, a.setup_start))
        .collect();
    assert_eq!(m1, [(1, 0), (3, 5)]);
    assert_eq!(decoded.makespan, 17);
    assert_eq!(decoded.server_order(), chart.server_order());
    assert_eq!(validate(&decoded, &inst), []);
}

#[test]
fn gantt_golden() {
    let inst = fig1();
    let svg = gantt_svg(&fig1_chart(&inst));
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/fig1_chart.svg");
    if std::env::var_os("PMS1_BLESS").is_some() {
        fs::write(path, &svg).unwrap();
    }
    assert_eq!(svg, fs::read_to_string(path).unwrap());
}

#[test]
fn single_job_gantt_has_two_rows_two_bars() {
    let inst = Instance::from_pairs(1, &[(4, 7)]).unwrap();
    let svg = gantt_svg(&horizon_ub(&inst).ub_witness);
    assert!(svg.contains(">M1</text>") && svg.contains(">Server</text>"));
    assert!(!svg.contains(">M2</text>"));
    assert_eq!(svg.matches("<rect class=\"setup\"").count(), 1);
    assert_eq!(svg.matches("<rect class=\"proc\"").count(), 1);
}

#[test]
fn exported_flow_model_reparses_with_same_shape() {
    let inst = fig1();
    let dir = tempfile::tempdir().unwrap();
    for (name, model) in [
        ("fff", build_fff(&inst, 18, false).unwrap().model),
        ("fft", build_fft(&inst, 18).unwrap().model),
        ("tivi", build_tivi(&inst, 18).unwrap().model),
    ] {
        let in_memory = solve(&model, &SolveOptions::default()).unwrap().objective.unwrap();
        for (ext, text) in [("lp", export_lp(&model).unwrap()), ("mps", export_mps(&model).unwrap())] {
            let path = dir.path().join(format!("{name}.{ext}"));
            fs::write(&path, text).unwrap();
            let file = read_and_solve_file(&path).unwrap();
            assert_eq!(file.num_cols, model.num_vars(), "{name}.{ext}");
            assert_eq!(file.num_rows, model.num_constraints(), "{name}.{ext}");
            assert!(file.optimal);
            assert!((file.objective - in_memory).abs() <= 1e-6 * in_memory.abs().max(1.0), "{name}.{ext}");
        }
    }
}

#[test]
fn solution_file_decodes_back_to_schedule() {
    let inst = fig1();
    let fm = build_fft(&inst, 18).unwrap();
    let out = solve(&fm.model, &SolveOptions::default()).unwrap();
    let text = write_solution(&fm.model, out.incumbent.as_ref().unwrap());
    let values = import_solution(&fm.model, &text).unwrap();
    let sched = fm.decode(&values, &inst).unwrap();
    assert_eq!(sched.makespan, 15);
    assert_eq!(validate(&sched, &inst), []);
}

#[test]
fn fft_tight_horizon_feasible_iff_optimum_is_horizon() {
    let inst = fig1();
    // lb_better = 15 = T: only z_15 free, optimum is 15
    assert_eq!(lb_better(&inst), 15);
    let out = solve(&build_fft(&inst, 15).unwrap().model, &SolveOptions::default()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    // two jobs that cannot finish before 12 on separate machines, horizon 11: no room
    let pair = Instance::from_pairs(2, &[(1, 10), (1, 10)]).unwrap();
    assert_eq!(lb_better(&pair), 12);
    let out = solve(&build_fft(&pair, 11).unwrap().model, &SolveOptions::default()).unwrap();
    assert_eq!(out.status, SolveStatus::Infeasible);
    let out = solve(&build_fft(&pair, 12).unwrap().model, &SolveOptions::default()).unwrap();
    assert_eq!(as_int(out.objective.unwrap()), 12);
}

#[test]
fn grouping_and_strengthening_preserve_optimum() {
    for (_, inst) in suite(&[6], &[2], 1, 17).into_iter().step_by(3) {
        let t = horizon_ub(&inst).ub;
        let opt = |m: &pms1::milp::MilpModel| as_int(solve(m, &SolveOptions::default()).unwrap().objective.unwrap());
        let plain = opt(&build_fff(&inst, t, false).unwrap().model);
        assert_eq!(plain, opt(&build_fff(&inst, t, true).unwrap().model));
        assert_eq!(plain, opt(&build_fft(&inst, t).unwrap().model));
        assert_eq!(plain, brute_force(&inst, 8).unwrap().optimum);
    }
}

#[test]
fn smoke_bench_flow_equals_time_indexed() {
    let grid = [GenParams { n: 10, m: 3, alpha: 0.1, rho: 0.5, seed: 1, replications: 2 }];
    let cfg = BenchConfig {
        models: vec![ModelKind::Fff, ModelKind::Tivi],
        time_limit: Some(120.0),
        ..BenchConfig::default()
    };
    let records = run_bench(&grid, &cfg).unwrap();
    assert_eq!(records.len(), 4);
    for pair in records.chunks(2) {
        assert!(pair.iter().all(|r| r.status == SolveStatus::Optimal), "{pair:?}");
        assert_eq!(pair[0].model, ModelKind::Fff);
        assert_eq!(pair[1].model, ModelKind::Tivi);
        assert_eq!(as_int(pair[0].objective.unwrap()), as_int(pair[1].objective.unwrap()));
        for r in pair {
            assert_eq!(r.validated, Some(true));
            let obj = as_int(r.objective.unwrap());
            assert!(r.lb_better <= obj && obj <= r.ub);
            assert!(r.dev_cr().unwrap() >= -1e-9);
        }
    }
}

#[test]
fn warmed_start_equals_horizon_witness() {
    let grid = [GenParams { n: 10, m: 3, alpha: 0.3, rho: 0.7, seed: 5, replications: 2 }];
    let cfg = BenchConfig {
        models: vec![ModelKind::Fft, ModelKind::FftWarmed],
        time_limit: Some(120.0),
        ..BenchConfig::default()
    };
    let records = run_bench(&grid, &cfg).unwrap();
    for r in &records {
        match r.model {
            ModelKind::FftWarmed => assert_eq!(r.warm_start_objective, Some(r.ub as f64)),
            _ => assert_eq!(r.warm_start_objective, None),
        }
    }
    for pair in records.chunks(2) {
        if pair.iter().all(|r| r.status == SolveStatus::Optimal) {
            assert_eq!(as_int(pair[0].objective.unwrap()), as_int(pair[1].objective.unwrap()));
        }
    }
}

#[test]
fn forced_timeout_sets_gap_only_with_incumbent() {
    let grid = [GenParams { n: 100, m: 5, alpha: 0.5, rho: 0.5, seed: 3, replications: 1 }];
    let cfg = BenchConfig {
        models: vec![ModelKind::Fff, ModelKind::Tivi],
        time_limit: Some(0.01),
        compute_lp: false,
        ..BenchConfig::default()
    };
    for r in run_bench(&grid, &cfg).unwrap() {
        assert!(
            matches!(
                r.status,
                SolveStatus::Feasible | SolveStatus::NoIntegerSolution | SolveStatus::TimeLimitNoSolution
            ),
            "{:?}",
            r.status
        );
        assert_eq!(r.gap_bb().is_some(), r.status == SolveStatus::Feasible && r.best_bound.is_some());
        assert_eq!(r.objective.is_some(), r.status.has_incumbent());
    }
}
