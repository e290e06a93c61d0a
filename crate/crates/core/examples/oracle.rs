//! Brute-force optimum over server orders, next to the bounds.
//!
//! cargo run --example oracle

use pms1::bounds::horizon_ub;
use pms1::instance::{generate, GenParams};
use pms1::oracle::{brute_force, DEFAULT_CAP};

fn main() -> pms1::Result<()> {
    let params = GenParams { n: 7, m: 2, alpha: 0.5, rho: 1.0, seed: 3, replications: 5 };
    for (rep, inst) in generate(&params)?.iter().enumerate() {
        let b = horizon_ub(inst);
        let r = brute_force(inst, DEFAULT_CAP)?;
        println!(
            "{}: lb_better {} <= optimum {} <= ub {}  ({} complete orders, best {:?})",
            params.instance_id(rep as u32),
            b.lb_better,
            r.optimum,
            b.ub,
            r.permutations_explored,
            r.witness.server_order()
        );
    }
    Ok(())
}
