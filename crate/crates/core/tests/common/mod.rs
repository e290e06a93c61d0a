#![allow(dead_code)]

use pms1::instance::{generate, GenParams, Instance};
use pms1::schedule::Schedule;

pub fn fig1() -> Instance {
    Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap()
}

/// The chart of the worked example: setups at 0, 2, 5, 8, 10, makespan 17.
pub fn fig1_chart(inst: &Instance) -> Schedule {
    Schedule::from_starts(inst, &[(1, 1, 0), (2, 2, 2), (3, 1, 5), (5, 3, 8), (4, 2, 10)]).unwrap()
}

pub const ALPHAS: [f64; 3] = [0.1, 0.3, 0.5];
pub const RHOS: [f64; 3] = [0.5, 0.7, 1.0];

/// Instances over `ns` x `ms` x the alpha/rho grid, `reps` each.
pub fn suite(ns: &[u32], ms: &[u32], reps: u32, seed: u64) -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for &n in ns {
        for &m in ms {
            for alpha in ALPHAS {
                for rho in RHOS {
                    let params = GenParams { n, m, alpha, rho, seed, replications: reps };
                    for (rep, inst) in generate(&params).unwrap().into_iter().enumerate() {
                        out.push((params.instance_id(rep as u32), inst));
                    }
                }
            }
        }
    }
    out
}

pub fn as_int(v: f64) -> u32 {
    let r = v.round();
    assert!((v - r).abs() < 1e-6, "objective {v} is not integral");
    r as u32
}
