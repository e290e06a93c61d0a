//! Variable counts of the three models as the number of jobs grows, as CSV.
//!
//! cargo run --example variable_counts

use pms1::arcflow::count_variables;
use pms1::bounds::horizon_ub;
use pms1::instance::{generate, GenParams};

fn main() -> pms1::Result<()> {
    println!("n,m,alpha,T,fff,fff_grouped,tivi");
    for n in [10, 20, 50, 100] {
        for alpha in [0.1, 0.5] {
            let params = GenParams { n, m: 5, alpha, rho: 0.5, seed: 0, replications: 1 };
            let inst = &generate(&params)?[0];
            let t = horizon_ub(inst).ub;
            println!(
                "{n},5,{alpha},{t},{},{},{}",
                count_variables(inst, t, false),
                count_variables(inst, t, true),
                pms1::tivi::count_variables(inst, t)
            );
        }
    }
    Ok(())
}
