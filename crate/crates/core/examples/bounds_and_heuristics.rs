//! Lower bounds and the twelve greedy schedules that set the horizon.
//!
//! cargo run --example bounds_and_heuristics

use pms1::bounds::{greedy_hs1, greedy_hs2, horizon_ub, order_jobs, PriorityRule};
use pms1::instance::Instance;

fn main() -> pms1::Result<()> {
    let inst = Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)])?;
    println!("{:<4} {:<16} {:>4} {:>4}", "rule", "order", "HS1", "HS2");
    for rule in PriorityRule::ALL {
        println!(
            "{:<4} {:<16} {:>4} {:>4}",
            rule.to_string(),
            format!("{:?}", order_jobs(&inst, rule)),
            greedy_hs1(&inst, rule).makespan,
            greedy_hs2(&inst, rule).makespan
        );
    }
    let report = horizon_ub(&inst);
    println!("\n{report}");
    println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    Ok(())
}
