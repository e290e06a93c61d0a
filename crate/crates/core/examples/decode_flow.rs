//! Solves the worked example with the flow model and walks the machine flow
//! back into per-machine job sequences.
//!
//! cargo run --example decode_flow

use pms1::arcflow::build_fff;
use pms1::instance::Instance;
use pms1::milp::{solve, SolveOptions};

fn main() -> pms1::Result<()> {
    let inst = Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)])?;
    let fm = build_fff(&inst, 18, true)?;
    let out = solve(&fm.model, &SolveOptions::default())?;
    let values = out.incumbent.expect("optimal solve has an incumbent");
    let flow = fm.layout.audit(&values)?;
    println!("sink node {}", flow.sink);
    for (class, starts) in flow.classes.iter().zip(&flow.x) {
        let used: Vec<usize> = starts.iter().enumerate().filter(|(_, &v)| v > 0).map(|(t, _)| t).collect();
        println!("class (s={}, p={}) x{} starts at {used:?}", class.setup, class.processing, class.multiplicity);
    }
    let sched = fm.decode(&values, &inst)?;
    for k in 1..=inst.machines {
        let seq: Vec<String> = sched
            .assignments
            .iter()
            .filter(|a| a.machine == k)
            .map(|a| format!("job {} [{}, {})", a.job, a.setup_start, a.completion()))
            .collect();
        println!("M{k}: {}", seq.join(", "));
    }
    println!("makespan {}", sched.makespan);
    Ok(())
}
