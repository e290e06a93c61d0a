//! Draws a few instances and prints the experimental grid sizes.
//!
//! cargo run --example generate_instances

use pms1::instance::{generate, group_identical, table3_grid, GenParams, Tier};

fn main() -> pms1::Result<()> {
    let params = GenParams { n: 10, m: 3, alpha: 0.1, rho: 0.5, seed: 1, replications: 2 };
    println!("processing range {:?}, setup range {:?}", params.processing_range(), params.setup_range());
    for (rep, inst) in generate(&params)?.iter().enumerate() {
        println!("# {} ({} distinct jobs)", params.instance_id(rep as u32), group_identical(inst).len());
        print!("{}", inst.render());
    }
    for tier in [Tier::Small, Tier::Medium, Tier::Large, Tier::All] {
        let grid = table3_grid(tier, 0);
        let instances: u32 = grid.iter().map(|p| p.replications).sum();
        println!("{tier:?}: {} combinations, {instances} instances", grid.len());
    }
    Ok(())
}
