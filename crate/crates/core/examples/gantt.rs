//! Writes the worked example chart and the optimal schedule as SVG.
//!
//! cargo run --example gantt -- [out_dir]

use std::path::PathBuf;

use pms1::instance::Instance;
use pms1::oracle::brute_force;
use pms1::schedule::{gantt_svg, Schedule};

fn main() -> pms1::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let inst = Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)])?;
    let chart = Schedule::from_starts(&inst, &[(1, 1, 0), (2, 2, 2), (3, 1, 5), (5, 3, 8), (4, 2, 10)])?;
    let best = brute_force(&inst, 8)?.witness;
    for (name, sched) in [("chart_17.svg", &chart), ("optimal_15.svg", &best)] {
        let path = dir.join(name);
        std::fs::write(&path, gantt_svg(sched))?;
        println!("{} (makespan {})", path.display(), sched.makespan);
    }
    println!("{}", best.to_json());
    Ok(())
}
