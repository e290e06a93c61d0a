//! Solves one generated instance with the flow model, its tuned variant, the
//! warmed tuned variant and the time-indexed baseline.
//!
//! cargo run --release --example compare_formulations -- [n] [m]

use pms1::bench::{solve_instance, ModelKind, SolveConfig};
use pms1::bounds::horizon_ub;
use pms1::instance::{generate, GenParams};
use pms1::schedule::validate;

fn main() -> pms1::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u32>().expect("integer argument"));
    let n = args.next().unwrap_or(10);
    let m = args.next().unwrap_or(3);
    let params = GenParams { n, m, alpha: 0.3, rho: 0.7, seed: 42, replications: 1 };
    let inst = &generate(&params)?[0];
    let bounds = horizon_ub(inst);
    println!("{} lb_better {} ub {}", params.instance_id(0), bounds.lb_better, bounds.ub);
    println!("{:<11} {:>7} {:>7} {:>9} {:>10} {:>8} {:>6}", "model", "vars", "rows", "lp", "status", "obj", "secs");
    let cfg = SolveConfig { time_limit: Some(300.0), shortcut_tight: false, ..SolveConfig::default() };
    for kind in ModelKind::ALL {
        let s = solve_instance(inst, &bounds, kind, &cfg)?;
        let valid = s.schedule.as_ref().map(|sch| validate(sch, inst).is_empty());
        println!(
            "{:<11} {:>7} {:>7} {:>9.3} {:>10} {:>8} {:>6.2}  valid={valid:?}",
            kind.to_string(),
            s.var_count,
            s.constraint_count,
            s.lp_bound.unwrap_or(f64::NAN),
            s.outcome.status.to_string(),
            s.outcome.objective.map(|v| format!("{v:.0}")).unwrap_or_default(),
            s.outcome.wall_time
        );
    }
    Ok(())
}
