//! A small benchmark: two replications of two combinations, all four models,
//! with the indicator table in markdown.
//!
//! cargo run --release --example bench_smoke

use pms1::bench::{indicators, render_report, run_bench, BenchConfig, ReportFormat};
use pms1::instance::GenParams;

fn main() -> pms1::Result<()> {
    let grid = [
        GenParams { n: 10, m: 3, alpha: 0.1, rho: 0.5, seed: 0, replications: 2 },
        GenParams { n: 10, m: 4, alpha: 0.5, rho: 1.0, seed: 0, replications: 2 },
    ];
    let cfg = BenchConfig { time_limit: Some(60.0), ..BenchConfig::default() };
    let records = run_bench(&grid, &cfg)?;
    for r in &records {
        println!(
            "{:<20} {:<10} {:<8} obj {:>6} lp {:>8.2} {:.2}s",
            r.instance_id,
            r.model.to_string(),
            r.status.to_string(),
            r.objective.map(|v| format!("{v:.0}")).unwrap_or_default(),
            r.lp_bound.unwrap_or(f64::NAN),
            r.wall_time
        );
    }
    println!();
    print!("{}", render_report(&indicators(&records), ReportFormat::Markdown));
    Ok(())
}
