//! Makespan bounds and the list-scheduling heuristics that set the horizon.
//!
//! Both heuristics share one resource model: a job starts its setup at
//! `max(server free, machine free)` and holds its machine until completion.
//! `hs1` dispatches in rule order to the earliest-free machine, targeting
//! machine idle time. `hs2` looks a few jobs ahead and picks the one that
//! leaves the server the least waiting before the next setup can begin.
//! They are in the spirit of the published HS1/HS2 procedures, not verbatim
//! copies; any valid schedule is a valid upper bound.

use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Job};
use crate::schedule::{Assignment, Schedule};
use crate::Time;

/// Average machine load, `(1/m) * sum(s_j + p_j)`, exact.
pub fn lb_trivial(inst: &Instance) -> Ratio<i64> {
    Ratio::new(inst.total_work() as i64, inst.machines as i64)
}

/// Server-saturation bound: all setups back to back plus the shortest
/// processing time, or the average load plus the unavoidable server waits of
/// the first `m-1` setups (smallest first). Rounded up since data are integral.
pub fn lb_better(inst: &Instance) -> Time {
    let server = inst.total_setup() as i64
        + inst.jobs.iter().map(|j| j.processing).min().unwrap_or(0) as i64;
    let load = lb_better_load_term(inst);
    let best = load.max(Ratio::from_integer(server));
    best.ceil().to_integer() as Time
}

/// Second argument of the server-saturation bound, exact.
pub fn lb_better_load_term(inst: &Instance) -> Ratio<i64> {
    let m = inst.machines as i64;
    let mut setups: Vec<i64> = inst.jobs.iter().map(|j| j.setup as i64).collect();
    setups.sort_unstable();
    // For m = 1 the weighted sum is empty.
    let weighted: i64 = setups
        .iter()
        .take((m - 1).max(0) as usize)
        .enumerate()
        .map(|(k, &s)| (m - 1 - k as i64) * s)
        .sum();
    lb_trivial(inst) + Ratio::new(weighted, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PriorityRule {
    Spt,
    Lpt,
    Sst,
    Lst,
    Sct,
    Lct,
}

impl PriorityRule {
    pub const ALL: [PriorityRule; 6] = [
        PriorityRule::Spt,
        PriorityRule::Lpt,
        PriorityRule::Sst,
        PriorityRule::Lst,
        PriorityRule::Sct,
        PriorityRule::Lct,
    ];

    // Primary criterion, secondary criterion, then job id. Signed so that
    // "longest" rules can negate.
    fn key(self, j: &Job) -> (i64, i64, u32) {
        let s = j.setup as i64;
        let p = j.processing as i64;
        match self {
            PriorityRule::Spt => (p, s, j.id),
            PriorityRule::Lpt => (-p, -s, j.id),
            PriorityRule::Sst => (s, p, j.id),
            PriorityRule::Lst => (-s, -p, j.id),
            PriorityRule::Sct => (s + p, p, j.id),
            PriorityRule::Lct => (-(s + p), -p, j.id),
        }
    }
}

impl fmt::Display for PriorityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PriorityRule::Spt => "SPT",
            PriorityRule::Lpt => "LPT",
            PriorityRule::Sst => "SST",
            PriorityRule::Lst => "LST",
            PriorityRule::Sct => "SCT",
            PriorityRule::Lct => "LCT",
        };
        f.write_str(s)
    }
}

/// Job ids in rule order.
///
/// Tie-breakers: SPT then SST, LPT then LST, SST then SPT, LST then LPT,
/// SCT then SPT, LCT then LPT; finally ascending id.
pub fn order_jobs(inst: &Instance, rule: PriorityRule) -> Vec<u32> {
    let mut jobs: Vec<&Job> = inst.jobs.iter().collect();
    jobs.sort_by_key(|j| rule.key(j));
    jobs.into_iter().map(|j| j.id).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heuristic {
    Hs1,
    Hs2,
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heuristic::Hs1 => "HS1",
            Heuristic::Hs2 => "HS2",
        })
    }
}

struct Dispatcher {
    server_free: Time,
    machine_free: Vec<Time>,
    placed: Vec<Assignment>,
}

impl Dispatcher {
    fn new(m: u32) -> Self {
        Self {
            server_free: 0,
            machine_free: vec![0; m as usize],
            placed: Vec::new(),
        }
    }

    // Earliest-free machine, lowest index on ties.
    fn next_machine(&self) -> usize {
        let (k, _) = self
            .machine_free
            .iter()
            .enumerate()
            .min_by_key(|&(k, &t)| (t, k))
            .expect("at least one machine");
        k
    }

    fn start_time(&self) -> Time {
        self.server_free.max(self.machine_free[self.next_machine()])
    }

    // Server wait before the next setup could begin if `job` were placed now.
    fn server_wait_after(&self, job: &Job) -> Time {
        let k = self.next_machine();
        let start = self.start_time();
        let setup_end = start + job.setup;
        let next_free = self
            .machine_free
            .iter()
            .enumerate()
            .map(|(i, &t)| if i == k { start + job.span() } else { t })
            .min()
            .expect("at least one machine");
        next_free.saturating_sub(setup_end)
    }

    fn place(&mut self, job: &Job) {
        let k = self.next_machine();
        let start = self.start_time();
        self.server_free = start + job.setup;
        self.machine_free[k] = start + job.span();
        self.placed.push(Assignment {
            job: job.id,
            machine: k as u32 + 1,
            setup_start: start,
            setup: job.setup,
            processing: job.processing,
        });
    }

    fn finish(self, m: u32) -> Schedule {
        Schedule::new(m, self.placed)
    }
}

/// List scheduling in rule order; each job goes to the earliest-free machine
/// and starts as soon as both that machine and the server are free.
pub fn greedy_hs1(inst: &Instance, rule: PriorityRule) -> Schedule {
    let mut d = Dispatcher::new(inst.machines);
    for id in order_jobs(inst, rule) {
        d.place(inst.job(id).expect("ordered ids are valid"));
    }
    d.finish(inst.machines)
}

/// Lookahead window used by [`greedy_hs2`].
pub fn hs2_lookahead(n: usize) -> usize {
    n / 10 + 1
}

/// Among the next `n/10 + 1` jobs in rule order, dispatch the one with the
/// earliest achievable setup start, then the least server wait it induces,
/// then rule order.
pub fn greedy_hs2(inst: &Instance, rule: PriorityRule) -> Schedule {
    let q = hs2_lookahead(inst.n());
    let mut pending: Vec<&Job> = order_jobs(inst, rule)
        .into_iter()
        .map(|id| inst.job(id).expect("ordered ids are valid"))
        .collect();
    let mut d = Dispatcher::new(inst.machines);
    while !pending.is_empty() {
        let start = d.start_time();
        let (pick, _) = pending
            .iter()
            .take(q)
            .enumerate()
            .min_by_key(|&(pos, job)| (start, d.server_wait_after(job), pos))
            .expect("pending is non-empty");
        let job = pending.remove(pick);
        d.place(job);
    }
    d.finish(inst.machines)
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub lb_trivial_exact: Ratio<i64>,
    pub lb_trivial_int: Time,
    pub lb_better: Time,
    /// Best heuristic makespan; the horizon `T` for every model.
    pub ub: Time,
    pub ub_witness: Schedule,
    pub winning_heuristic: Heuristic,
    pub winning_rule: PriorityRule,
}

impl BoundReport {
    /// The heuristic already meets the lower bound.
    pub fn is_tight(&self) -> bool {
        self.ub == self.lb_better
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lb_trivial": {
                "numer": *self.lb_trivial_exact.numer(),
                "denom": *self.lb_trivial_exact.denom(),
                "value": self.lb_trivial_exact.to_f64(),
            },
            "lb_trivial_int": self.lb_trivial_int,
            "lb_better": self.lb_better,
            "ub": self.ub,
            "winning_heuristic": self.winning_heuristic.to_string(),
            "winning_rule": self.winning_rule.to_string(),
            "witness_server_order": self.ub_witness.server_order(),
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lb_trivial      {} ({:.4})", self.lb_trivial_exact, self.lb_trivial_exact.to_f64().unwrap_or(f64::NAN))?;
        writeln!(f, "lb_trivial_int  {}", self.lb_trivial_int)?;
        writeln!(f, "lb_better       {}", self.lb_better)?;
        writeln!(f, "ub              {}", self.ub)?;
        write!(f, "ub found by     {} / {}", self.winning_heuristic, self.winning_rule)
    }
}

/// Runs both heuristics under all six rules and keeps the best makespan.
/// Ties go to HS1 over HS2, then rule order SPT, LPT, SST, LST, SCT, LCT.
pub fn horizon_ub(inst: &Instance) -> BoundReport {
    let candidates = [Heuristic::Hs1, Heuristic::Hs2]
        .into_iter()
        .flat_map(|h| PriorityRule::ALL.into_iter().map(move |r| (h, r)))
        .map(|(h, r)| {
            let sched = match h {
                Heuristic::Hs1 => greedy_hs1(inst, r),
                Heuristic::Hs2 => greedy_hs2(inst, r),
            };
            (h, r, sched)
        });
    let (winning_heuristic, winning_rule, ub_witness) = candidates
        .enumerate()
        .min_by_key(|(i, (_, _, s))| (s.makespan, *i))
        .map(|(_, c)| c)
        .expect("twelve candidates");
    let lb_trivial_exact = lb_trivial(inst);
    BoundReport {
        lb_trivial_int: lb_trivial_exact.ceil().to_integer() as Time,
        lb_trivial_exact,
        lb_better: lb_better(inst),
        ub: ub_witness.makespan,
        ub_witness,
        winning_heuristic,
        winning_rule,
    }
}

/// LP relaxation value of a model next to the average-load bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationReport {
    pub lp: f64,
    pub lb_trivial: f64,
    /// `100 * (lp - lb_trivial) / lb_trivial`
    pub vs_trivial_pct: f64,
}

impl RelaxationReport {
    pub fn new(lp: f64, inst: &Instance) -> Self {
        let lb = lb_trivial(inst).to_f64().expect("finite");
        Self {
            lp,
            lb_trivial: lb,
            vs_trivial_pct: 100.0 * (lp - lb) / lb,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::validate;

    fn fig1() -> Instance {
        Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn trivial_bound_values() {
        assert_eq!(lb_trivial(&fig1()), Ratio::new(32, 3));
        let one = Instance::from_pairs(1, &[(4, 7)]).unwrap();
        assert_eq!(lb_trivial(&one), Ratio::from_integer(11));
        let two = Instance::from_pairs(2, &[(1, 1), (1, 1)]).unwrap();
        assert_eq!(lb_trivial(&two), Ratio::from_integer(2));
    }

    #[test]
    fn better_bound_values() {
        let inst = fig1();
        // 32/3 + (2*2 + 1*2)/3 = 38/3
        assert_eq!(lb_better_load_term(&inst), Ratio::new(38, 3));
        assert_eq!(lb_better(&inst), 15);
        let one = Instance::from_pairs(1, &[(4, 7)]).unwrap();
        assert_eq!(lb_better(&one), 11);
    }

    // Direct loop over the definition with plain floats, kept apart from the
    // rational implementation.
    fn lb_better_loop(inst: &Instance) -> f64 {
        let m = inst.machines as usize;
        let n = inst.n();
        let mut sum_s = 0.0;
        let mut min_p = f64::INFINITY;
        let mut work = 0.0;
        for j in &inst.jobs {
            sum_s += j.setup as f64;
            min_p = min_p.min(j.processing as f64);
            work += (j.setup + j.processing) as f64;
        }
        let mut s: Vec<f64> = inst.jobs.iter().map(|j| j.setup as f64).collect();
        s.sort_by(f64::total_cmp);
        let mut weighted = 0.0;
        for j in 1..m {
            if j <= n {
                weighted += (m - j) as f64 * s[j - 1];
            }
        }
        let second = work / m as f64 + weighted / m as f64;
        (sum_s + min_p).max(second)
    }

    #[test]
    fn better_bound_closed_form_for_square_instances() {
        for n in 1..=9u32 {
            let inst = Instance::from_pairs(n, &vec![(1, 10); n as usize]).unwrap();
            let expected = ((n + 10) as f64).max((11 * n + (1..n).map(|j| n - j).sum::<u32>()) as f64 / n as f64);
            assert_eq!(lb_better(&inst), expected.ceil() as Time, "n={n}");
            assert_eq!(lb_better(&inst), (lb_better_loop(&inst) - 1e-9).ceil() as Time);
        }
    }

    #[test]
    fn equal_setups_load_term() {
        for m in 1..=6u32 {
            let inst = Instance::from_pairs(m, &[(3, 7), (3, 2), (3, 9), (3, 4), (3, 1), (3, 8)]).unwrap();
            let tri: i64 = (1..m as i64).map(|j| m as i64 - j).sum();
            assert_eq!(lb_better_load_term(&inst), lb_trivial(&inst) + Ratio::new(3 * tri, m as i64));
        }
    }

    #[test]
    fn orders_follow_tie_breakers() {
        let inst = fig1();
        assert_eq!(order_jobs(&inst, PriorityRule::Lpt), [2, 4, 3, 1, 5]);
        // spans 5,8,7,7,5: jobs 3 (p=4) and 4 (p=5) tie at 7, SPT puts 3 first
        assert_eq!(order_jobs(&inst, PriorityRule::Sct), [1, 5, 3, 4, 2]);
        assert_eq!(order_jobs(&inst, PriorityRule::Spt), [1, 5, 3, 4, 2]);
        assert_eq!(order_jobs(&inst, PriorityRule::Sst), [1, 5, 4, 3, 2]);
        assert_eq!(order_jobs(&inst, PriorityRule::Lst), [2, 3, 4, 1, 5]);
        assert_eq!(order_jobs(&inst, PriorityRule::Lct), [2, 4, 3, 1, 5]);
        let same = Instance::from_pairs(2, &[(2, 2); 5]).unwrap();
        for rule in PriorityRule::ALL {
            assert_eq!(order_jobs(&same, rule), [1, 2, 3, 4, 5]);
        }
    }

    #[test]
    fn single_machine_chains_jobs() {
        let inst = Instance::from_pairs(1, &[(2, 3), (1, 4), (5, 1)]).unwrap();
        for rule in PriorityRule::ALL {
            assert_eq!(greedy_hs1(&inst, rule).makespan, 16);
            assert_eq!(greedy_hs2(&inst, rule).makespan, 16);
        }
        let one = Instance::from_pairs(3, &[(4, 7)]).unwrap();
        assert_eq!(greedy_hs1(&one, PriorityRule::Spt).makespan, 11);
        assert_eq!(greedy_hs2(&one, PriorityRule::Spt).makespan, 11);
    }

    #[test]
    fn two_equal_jobs_chain_setups() {
        let inst = Instance::from_pairs(2, &[(1, 10), (1, 10)]).unwrap();
        let s = greedy_hs2(&inst, PriorityRule::Spt);
        let starts: Vec<_> = s.assignments.iter().map(|a| a.setup_start).collect();
        assert_eq!(starts, [0, 1]);
        assert_eq!(s.makespan, 12);
    }

    #[test]
    fn heuristics_on_worked_example() {
        let inst = fig1();
        for rule in PriorityRule::ALL {
            for s in [greedy_hs1(&inst, rule), greedy_hs2(&inst, rule)] {
                assert_eq!(validate(&s, &inst), []);
                assert!((15..=32).contains(&s.makespan), "{rule}: {}", s.makespan);
            }
        }
        let report = horizon_ub(&inst);
        assert_eq!(report.lb_trivial_int, 11);
        assert_eq!(report.lb_better, 15);
        // LPT order (2,4,3,1,5) chains setups over [0,12] and finishes at 15
        assert_eq!(report.ub, 15);
        assert_eq!(report.ub_witness.makespan, 15);
        assert!(report.is_tight());
    }

    #[test]
    fn single_job_report() {
        let inst = Instance::from_pairs(2, &[(4, 7)]).unwrap();
        let r = horizon_ub(&inst);
        assert_eq!((r.lb_better, r.ub), (11, 11));
    }
}
