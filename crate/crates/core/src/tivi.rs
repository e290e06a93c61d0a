//! The classical time-indexed baseline with a min-max objective.
//!
//! `x_{j}_{t} = 1` when job `j` starts its setup at `t`. Starts are declared
//! over the whole `0..=T`, including those that would overrun the horizon;
//! the makespan variable `Cmax` prices them.

use crate::bounds::RelaxationReport;
use crate::instance::Instance;
use crate::milp::{solve_relaxation, MilpModel, RowSense, VarId, VarKind, INT_TOL};
use crate::schedule::{Assignment, Schedule};
use crate::{Error, Result, Time};

#[derive(Debug, Clone)]
pub struct TiviLayout {
    pub horizon: Time,
    pub machines: u32,
    /// `x[job - 1][t]` for `t` in `0..=T`.
    pub x: Vec<Vec<VarId>>,
    pub cmax: VarId,
}

#[derive(Debug, Clone)]
pub struct TiviModel {
    pub model: MilpModel,
    pub layout: TiviLayout,
}

impl TiviModel {
    pub fn decode(&self, values: &[f64], inst: &Instance) -> Result<Schedule> {
        self.layout.decode(values, inst)
    }
}

impl TiviLayout {
    /// Reads start times from an incumbent and assigns machines by interval
    /// colouring in start order.
    pub fn decode(&self, values: &[f64], inst: &Instance) -> Result<Schedule> {
        let mut starts = Vec::with_capacity(inst.n());
        for (j, row) in self.x.iter().enumerate() {
            let mut chosen = None;
            for (t, id) in row.iter().enumerate() {
                let v = values.get(id.0).copied().unwrap_or(0.0);
                if (v - v.round()).abs() > INT_TOL {
                    return Err(Error::Audit(format!("x_{}_{t} = {v} is fractional", j + 1)));
                }
                if v.round() >= 1.0 {
                    if chosen.is_some() {
                        return Err(Error::Audit(format!("job {} started twice", j + 1)));
                    }
                    chosen = Some(t as Time);
                }
            }
            let t = chosen.ok_or_else(|| Error::Audit(format!("job {} never started", j + 1)))?;
            starts.push((inst.jobs[j], t));
        }
        starts.sort_by_key(|&(job, t)| (t, job.id));

        let mut free_at = vec![0 as Time; inst.machines as usize];
        let mut assignments = Vec::with_capacity(starts.len());
        for (job, t) in starts {
            let k = free_at
                .iter()
                .position(|&f| f <= t)
                .ok_or_else(|| Error::Audit(format!("no machine free for job {} at {t}", job.id)))?;
            free_at[k] = t + job.span();
            assignments.push(Assignment {
                job: job.id,
                machine: k as u32 + 1,
                setup_start: t,
                setup: job.setup,
                processing: job.processing,
            });
        }
        Ok(Schedule::new(inst.machines, assignments))
    }
}

pub fn build_tivi(inst: &Instance, horizon: Time) -> Result<TiviModel> {
    let span = inst.max_span();
    if horizon < span {
        return Err(Error::HorizonTooShort { horizon, span });
    }
    let mut model = MilpModel::new("tivi");
    let x = inst
        .jobs
        .iter()
        .map(|j| {
            (0..=horizon)
                .map(|t| model.add_var(format!("x_{}_{t}", j.id), VarKind::Binary, 0.0, 1.0, 0.0))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cmax = model.add_var("Cmax", VarKind::Continuous, 0.0, f64::INFINITY, 1.0)?;

    for (job, row) in inst.jobs.iter().zip(&x) {
        model.add_constraint(
            format!("assign_{}", job.id),
            row.iter().map(|&v| (v, 1.0)).collect(),
            RowSense::Eq,
            1.0,
        )?;
    }

    let window = |row: &[VarId], t: Time, len: Time| -> Vec<(VarId, f64)> {
        let from = (t + 1).saturating_sub(len);
        (from..=t).map(|tau| (row[tau as usize], 1.0)).collect()
    };
    for t in 0..=horizon {
        let terms = inst
            .jobs
            .iter()
            .zip(&x)
            .flat_map(|(j, row)| window(row, t, j.span()))
            .collect();
        model.add_constraint(format!("mach_{t}"), terms, RowSense::Le, inst.machines as f64)?;
    }
    for t in 0..=horizon {
        let terms = inst
            .jobs
            .iter()
            .zip(&x)
            .flat_map(|(j, row)| window(row, t, j.setup))
            .collect();
        model.add_constraint(format!("srv_{t}"), terms, RowSense::Le, 1.0)?;
    }

    for (job, row) in inst.jobs.iter().zip(&x) {
        let mut terms: Vec<(VarId, f64)> = row
            .iter()
            .enumerate()
            .map(|(t, &v)| (v, (t as Time + job.span()) as f64))
            .collect();
        terms.push((cmax, -1.0));
        model.add_constraint(format!("cmax_{}", job.id), terms, RowSense::Le, 0.0)?;
    }

    Ok(TiviModel {
        model,
        layout: TiviLayout {
            horizon,
            machines: inst.machines,
            x,
            cmax,
        },
    })
}

/// `n (T + 1) + 1`.
pub fn count_variables(inst: &Instance, horizon: Time) -> usize {
    inst.n() * (horizon as usize + 1) + 1
}

/// `2n + 2 (T + 1)`.
pub fn count_constraints(inst: &Instance, horizon: Time) -> usize {
    2 * inst.n() + 2 * (horizon as usize + 1)
}

pub fn tivi_relaxation_report(inst: &Instance, horizon: Time) -> Result<RelaxationReport> {
    let tm = build_tivi(inst, horizon)?;
    let lp = solve_relaxation(&tm.model)?;
    Ok(RelaxationReport::new(lp, inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{solve, SolveOptions, SolveStatus};
    use crate::schedule::validate;

    fn fig1() -> Instance {
        Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn counts() {
        let inst = fig1();
        let tm = build_tivi(&inst, 18).unwrap();
        assert_eq!(tm.model.num_constraints(), 5 + 2 * 19 + 5);
        assert_eq!(tm.model.num_constraints(), count_constraints(&inst, 18));
        assert_eq!(tm.model.num_vars(), count_variables(&inst, 18));
        assert!(tm.model.var_id("x_5_18").is_some());
        assert!(tm.model.var_id("Cmax").is_some());
    }

    #[test]
    fn single_job() {
        let inst = Instance::from_pairs(1, &[(4, 7)]).unwrap();
        let tm = build_tivi(&inst, 11).unwrap();
        let out = solve(&tm.model, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective.unwrap() - 11.0).abs() < 1e-6);
    }

    #[test]
    fn worked_example() {
        let inst = fig1();
        let tm = build_tivi(&inst, 18).unwrap();
        let out = solve(&tm.model, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        let obj = out.objective.unwrap();
        assert!((obj - 15.0).abs() < 1e-6);
        let sched = tm.decode(out.incumbent.as_ref().unwrap(), &inst).unwrap();
        assert_eq!(validate(&sched, &inst), []);
        assert_eq!(sched.makespan, 15);
    }

    #[test]
    fn machine_window_uses_start_times() {
        // two jobs of span 3 on one machine: starts 0 and 2 must clash at t=2
        let inst = Instance::from_pairs(1, &[(1, 2), (1, 2)]).unwrap();
        let tm = build_tivi(&inst, 6).unwrap();
        let row = tm.model.constraints().iter().find(|c| c.name == "mach_2").unwrap();
        let names: Vec<&str> = row
            .terms
            .iter()
            .map(|&(v, _)| tm.model.var(v).name.as_str())
            .collect();
        assert_eq!(names, ["x_1_0", "x_1_1", "x_1_2", "x_2_0", "x_2_1", "x_2_2"]);
        let out = solve(&tm.model, &SolveOptions::default()).unwrap();
        assert!((out.objective.unwrap() - 6.0).abs() < 1e-6);
    }

    #[test]
    fn relaxation_report_is_finite() {
        let r = tivi_relaxation_report(&fig1(), 18).unwrap();
        assert!(r.vs_trivial_pct.is_finite());
        assert!(r.lp <= 15.0 + 1e-6);
    }
}
