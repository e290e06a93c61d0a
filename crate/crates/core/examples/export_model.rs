//! Exports the flow model in LP and MPS form with its variable manifest, then
//! reads the files back with the solver's own parser.
//!
//! cargo run --example export_model -- [out_dir]

use std::path::PathBuf;

use pms1::arcflow::build_fft;
use pms1::instance::Instance;
use pms1::milp::{export_lp, export_mps, read_and_solve_file};

fn main() -> pms1::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let inst = Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)])?;
    let fm = build_fft(&inst, 18)?;
    let lp = dir.join("fft.lp");
    let mps = dir.join("fft.mps");
    std::fs::write(&lp, export_lp(&fm.model)?)?;
    std::fs::write(&mps, export_mps(&fm.model)?)?;
    std::fs::write(dir.join("fft.manifest.json"), serde_json::to_string_pretty(&fm.layout.manifest())?)?;
    println!("built: {} columns, {} rows", fm.model.num_vars(), fm.model.num_constraints());
    for path in [lp, mps] {
        let f = read_and_solve_file(&path)?;
        println!("{}: {} columns, {} rows, objective {}", path.display(), f.num_cols, f.num_rows, f.objective);
    }
    Ok(())
}
