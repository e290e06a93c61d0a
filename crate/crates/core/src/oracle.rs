//! Exhaustive optimum over server orders for small instances.
//!
//! For a fixed order of setups on the server, starting every setup as early
//! as possible on the earliest-free machine is optimal: delaying a setup can
//! only delay the server and machine availability seen by every later job.
//! Enumerating all orders therefore covers every schedule that matters.

use crate::instance::{Instance, Job};
use crate::schedule::{Assignment, Schedule};
use crate::{Error, Result, Time};

pub const DEFAULT_CAP: usize = 8;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimum: Time,
    pub witness: Schedule,
    /// Complete server orders evaluated (pruned prefixes not counted).
    pub permutations_explored: u64,
}

struct Search<'a> {
    jobs: &'a [Job],
    used: Vec<bool>,
    order: Vec<usize>,
    best: Time,
    best_order: Vec<usize>,
    explored: u64,
}

impl Search<'_> {
    fn dfs(&mut self, server_free: Time, machine_free: &mut [Time], makespan: Time) {
        if self.order.len() == self.jobs.len() {
            self.explored += 1;
            if makespan < self.best {
                self.best = makespan;
                self.best_order = self.order.clone();
            }
            return;
        }
        let (rem_setup, min_p) = self
            .jobs
            .iter()
            .zip(&self.used)
            .filter(|(_, &u)| !u)
            .fold((0, Time::MAX), |(s, p), (j, _)| (s + j.setup, p.min(j.processing)));
        if makespan.max(server_free + rem_setup + min_p) >= self.best {
            return;
        }
        let mut tried: Vec<(Time, Time)> = Vec::new();
        for i in 0..self.jobs.len() {
            if self.used[i] {
                continue;
            }
            let job = self.jobs[i];
            if tried.contains(&(job.setup, job.processing)) {
                continue;
            }
            tried.push((job.setup, job.processing));

            let k = earliest(machine_free);
            let start = server_free.max(machine_free[k]);
            let saved = machine_free[k];
            machine_free[k] = start + job.span();
            self.used[i] = true;
            self.order.push(i);
            self.dfs(start + job.setup, machine_free, makespan.max(start + job.span()));
            self.order.pop();
            self.used[i] = false;
            machine_free[k] = saved;
        }
    }
}

fn earliest(machine_free: &[Time]) -> usize {
    (0..machine_free.len())
        .min_by_key(|&k| (machine_free[k], k))
        .expect("at least one machine")
}

/// Earliest-start dispatch of a fixed server order.
pub fn dispatch(inst: &Instance, order: &[u32]) -> Schedule {
    let mut machine_free = vec![0 as Time; inst.machines as usize];
    let mut server_free = 0;
    let mut assignments = Vec::with_capacity(order.len());
    for &id in order {
        let job = inst.job(id).expect("order references instance jobs");
        let k = earliest(&machine_free);
        let start = server_free.max(machine_free[k]);
        machine_free[k] = start + job.span();
        server_free = start + job.setup;
        assignments.push(Assignment {
            job: id,
            machine: k as u32 + 1,
            setup_start: start,
            setup: job.setup,
            processing: job.processing,
        });
    }
    Schedule::new(inst.machines, assignments)
}

/// Minimum makespan over all server orders.
pub fn brute_force(inst: &Instance, cap: usize) -> Result<OracleResult> {
    if inst.n() > cap {
        return Err(Error::OracleCap { n: inst.n(), cap });
    }
    let mut search = Search {
        jobs: &inst.jobs,
        used: vec![false; inst.n()],
        order: Vec::with_capacity(inst.n()),
        best: Time::MAX,
        best_order: Vec::new(),
        explored: 0,
    };
    let mut machine_free = vec![0; inst.machines as usize];
    search.dfs(0, &mut machine_free, 0);
    let order: Vec<u32> = search.best_order.iter().map(|&i| inst.jobs[i].id).collect();
    let witness = dispatch(inst, &order);
    debug_assert_eq!(witness.makespan, search.best);
    Ok(OracleResult {
        optimum: search.best,
        witness,
        permutations_explored: search.explored,
    })
}

/// Optimum when machines never bind (`m >= n`): the server chains setups and
/// each job finishes `p` after its own setup.
pub fn server_chain_optimum(inst: &Instance) -> Time {
    fn rec(jobs: &[Job], used: &mut [bool], clock: Time, worst: Time, best: &mut Time) {
        if used.iter().all(|&u| u) {
            *best = (*best).min(worst);
            return;
        }
        for i in 0..jobs.len() {
            if !used[i] {
                used[i] = true;
                let end = clock + jobs[i].setup;
                rec(jobs, used, end, worst.max(end + jobs[i].processing), best);
                used[i] = false;
            }
        }
    }
    let mut best = Time::MAX;
    rec(&inst.jobs, &mut vec![false; inst.n()], 0, 0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::validate;

    #[test]
    fn worked_example() {
        let inst = Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap();
        let r = brute_force(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(r.optimum, 15);
        assert_eq!(validate(&r.witness, &inst), []);
        assert_eq!(r.witness.makespan, 15);

        let hand = dispatch(&inst, &[2, 4, 3, 1, 5]);
        let setups: Vec<(Time, Time)> = hand
            .assignments
            .iter()
            .map(|a| (a.setup_start, a.setup_end()))
            .collect();
        assert_eq!(setups, [(0, 3), (3, 5), (5, 8), (8, 10), (10, 12)]);
        assert_eq!(hand.makespan, 15);
    }

    #[test]
    fn single_job() {
        let inst = Instance::from_pairs(2, &[(4, 7)]).unwrap();
        assert_eq!(brute_force(&inst, DEFAULT_CAP).unwrap().optimum, 11);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = Instance::from_pairs(2, &[(1, 1); 9]).unwrap();
        let err = brute_force(&inst, DEFAULT_CAP).unwrap_err();
        assert!(matches!(err, Error::OracleCap { n: 9, cap: 8 }));
    }

    #[test]
    fn chain_agrees_when_machines_are_plentiful() {
        let inst = Instance::from_pairs(4, &[(3, 2), (1, 9), (2, 2), (2, 7)]).unwrap();
        let chain = server_chain_optimum(&inst);
        assert_eq!(brute_force(&inst, DEFAULT_CAP).unwrap().optimum, chain);
        // setups 1,2,2,3 with longest tails first: 1+9, 3+7, 5+2, 8+2
        assert_eq!(chain, 10);
    }

    #[test]
    fn identical_jobs_collapse() {
        let inst = Instance::from_pairs(2, &[(1, 3); 8]).unwrap();
        let r = brute_force(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(r.permutations_explored, 1);
        // four spans of 4 per machine, the second machine trails by one setup
        assert_eq!(r.optimum, 17);
    }
}
