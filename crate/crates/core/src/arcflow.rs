//! Flow-flow arc-flow models.
//!
//! Two multigraphs share the node set `{0, .., T}`. In the machines graph an
//! execution arc of class `j` starting at `t` spans `t -> t + s_j + p_j`; in the
//! server graph the same start spans `t -> t + s_j`. Both arcs are carried by
//! one variable `x_{j}_{t}`. Idle arcs `t -> t+1` carry `yM_{t}` (idle machines)
//! and `yS_{t}` (idle server). `m` units of machine flow and one unit of server
//! flow leave node 0 and all sink at the single node `t` with `z_{t} = 1`, which
//! is the makespan.

use serde::{Deserialize, Serialize};

use crate::bounds::lb_better;
use crate::instance::{group_identical, singleton_classes, Instance, JobClass};
use crate::milp::{BranchDirection, MilpModel, RowSense, VarId, VarKind, INT_TOL};
use crate::schedule::Schedule;
use crate::{Error, Result, Time};

/// Variable layout of a flow model.
#[derive(Debug, Clone)]
pub struct ArcFlowLayout {
    pub horizon: Time,
    pub machines: u32,
    pub grouped: bool,
    pub classes: Vec<JobClass>,
    /// `x[class][t]` for `t` in `0..=T - s - p`.
    pub x: Vec<Vec<VarId>>,
    /// `t` in `0..T`.
    pub y_machine: Vec<VarId>,
    /// `t` in `0..T`.
    pub y_server: Vec<VarId>,
    /// `z[t - 1]` for `t` in `1..=T`.
    pub z: Vec<VarId>,
}

impl ArcFlowLayout {
    pub fn z_var(&self, t: Time) -> Option<VarId> {
        t.checked_sub(1).and_then(|i| self.z.get(i as usize)).copied()
    }

    /// Name manifest: every variable with its role, class and time.
    pub fn manifest(&self) -> Manifest {
        let mut variables = Vec::new();
        for (c, starts) in self.x.iter().enumerate() {
            let rep = self.classes[c].representative;
            for t in 0..starts.len() {
                variables.push(ManifestEntry {
                    name: x_name(rep, t as Time),
                    role: VarRole::X,
                    class: Some(rep),
                    t: t as Time,
                });
            }
        }
        for t in 0..self.horizon {
            variables.push(ManifestEntry {
                name: format!("yM_{t}"),
                role: VarRole::YMachine,
                class: None,
                t,
            });
        }
        for t in 0..self.horizon {
            variables.push(ManifestEntry {
                name: format!("yS_{t}"),
                role: VarRole::YServer,
                class: None,
                t,
            });
        }
        for t in 1..=self.horizon {
            variables.push(ManifestEntry {
                name: format!("z_{t}"),
                role: VarRole::Z,
                class: None,
                t,
            });
        }
        Manifest {
            horizon: self.horizon,
            machines: self.machines,
            grouped: self.grouped,
            classes: self.classes.clone(),
            variables,
        }
    }

    /// Checks an assignment against every flow constraint and returns the
    /// integral flow. Works from raw values, independent of the solver.
    pub fn audit(&self, values: &[f64]) -> Result<FlowSolution> {
        let int = |id: VarId, what: &dyn Fn() -> String| -> Result<u32> {
            let v = *values
                .get(id.0)
                .ok_or_else(|| Error::Audit(format!("missing value for {}", what())))?;
            let r = v.round();
            if (v - r).abs() > INT_TOL || r < -INT_TOL {
                return Err(Error::Audit(format!("{} = {v} is not a nonnegative integer", what())));
            }
            Ok(r as u32)
        };

        let x: Vec<Vec<u32>> = self
            .x
            .iter()
            .enumerate()
            .map(|(c, starts)| {
                starts
                    .iter()
                    .enumerate()
                    .map(|(t, &id)| int(id, &|| x_name(self.classes[c].representative, t as Time)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let y_machine = self
            .y_machine
            .iter()
            .enumerate()
            .map(|(t, &id)| int(id, &|| format!("yM_{t}")))
            .collect::<Result<Vec<_>>>()?;
        let y_server = self
            .y_server
            .iter()
            .enumerate()
            .map(|(t, &id)| int(id, &|| format!("yS_{t}")))
            .collect::<Result<Vec<_>>>()?;
        let z = self
            .z
            .iter()
            .enumerate()
            .map(|(i, &id)| int(id, &|| format!("z_{}", i + 1)))
            .collect::<Result<Vec<_>>>()?;

        for (c, cls) in self.classes.iter().enumerate() {
            let total: u32 = x[c].iter().sum();
            if total != cls.multiplicity {
                return Err(Error::Audit(format!(
                    "class {} started {total} times, expected {}",
                    cls.representative, cls.multiplicity
                )));
            }
        }
        if y_server.iter().any(|&v| v > 1) {
            return Err(Error::Audit("server idle flow exceeds 1".into()));
        }
        let sinks: Vec<Time> = z
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(i, _)| i as Time + 1)
            .collect();
        let sink = match (sinks.as_slice(), z.iter().sum::<u32>()) {
            (&[t], 1) => t,
            _ => return Err(Error::Audit(format!("expected exactly one z_t = 1, found {sinks:?}"))),
        };

        let m = self.machines as i64;
        let t_max = self.horizon as usize;
        for (graph, idle, supply, span_of) in [
            ("machine", &y_machine, m, &(|c: &JobClass| c.span()) as &dyn Fn(&JobClass) -> Time),
            ("server", &y_server, 1, &|c: &JobClass| c.setup),
        ] {
            let mut inflow = vec![0i64; t_max + 1];
            let mut outflow = vec![0i64; t_max + 1];
            for (c, starts) in x.iter().enumerate() {
                let len = span_of(&self.classes[c]) as usize;
                for (t, &v) in starts.iter().enumerate() {
                    outflow[t] += v as i64;
                    inflow[t + len] += v as i64;
                }
            }
            for t in 0..=t_max {
                let idle_out = if t < t_max { idle[t] as i64 } else { 0 };
                let idle_in = if t > 0 { idle[t - 1] as i64 } else { 0 };
                let source = if t == 0 { supply } else { 0 };
                let sink_units = if t == sink as usize { supply } else { 0 };
                let residual = (outflow[t] + idle_out) - (inflow[t] + idle_in) - source + sink_units;
                if residual != 0 {
                    return Err(Error::Audit(format!(
                        "{graph} graph imbalance {residual} at node {t}"
                    )));
                }
            }
        }

        Ok(FlowSolution {
            horizon: self.horizon,
            classes: self.classes.clone(),
            x,
            y_machine,
            y_server,
            sink,
        })
    }

    /// Audits an incumbent and decodes it into a schedule.
    pub fn decode(&self, values: &[f64], inst: &Instance) -> Result<Schedule> {
        crate::schedule::decode_flow(&self.audit(values)?, inst)
    }

    /// Encodes a schedule as a full assignment of this layout's variables.
    /// The result is audited before it is returned.
    pub fn encode_schedule(&self, sched: &Schedule, num_vars: usize) -> Result<Vec<f64>> {
        if sched.makespan == 0 || sched.makespan > self.horizon {
            return Err(Error::Schedule(format!(
                "makespan {} outside horizon 1..={}",
                sched.makespan, self.horizon
            )));
        }
        let mut values = vec![0.0; num_vars];
        for a in &sched.assignments {
            let c = self
                .classes
                .iter()
                .position(|c| {
                    if self.grouped {
                        c.setup == a.setup && c.processing == a.processing
                    } else {
                        c.representative == a.job
                    }
                })
                .ok_or_else(|| Error::Schedule(format!("job {} matches no class", a.job)))?;
            let id = *self.x[c].get(a.setup_start as usize).ok_or_else(|| {
                Error::Schedule(format!("job {} starts too late at {}", a.job, a.setup_start))
            })?;
            values[id.0] += 1.0;
        }

        let sink = sched.makespan as usize;
        let t_max = self.horizon as usize;
        for (idle, supply, span_of) in [
            (&self.y_machine, self.machines as i64, &(|c: &JobClass| c.span()) as &dyn Fn(&JobClass) -> Time),
            (&self.y_server, 1, &|c: &JobClass| c.setup),
        ] {
            let mut inflow = vec![0i64; t_max + 1];
            let mut outflow = vec![0i64; t_max + 1];
            for (c, starts) in self.x.iter().enumerate() {
                let len = span_of(&self.classes[c]) as usize;
                for (t, id) in starts.iter().enumerate() {
                    let v = values[id.0] as i64;
                    outflow[t] += v;
                    inflow[t + len] += v;
                }
            }
            // idle_out(t) = inflow(t) + idle_in(t) + source(t) - outflow(t) - sink(t)
            let mut carried = 0i64;
            for t in 0..sink {
                let source = if t == 0 { supply } else { 0 };
                let out = inflow[t] + carried + source - outflow[t];
                if out < 0 {
                    return Err(Error::Schedule(format!("resource over-subscribed at {t}")));
                }
                values[idle[t].0] = out as f64;
                carried = out;
            }
        }
        let z = self.z_var(sched.makespan).expect("makespan within horizon");
        values[z.0] = 1.0;
        self.audit(&values)?;
        Ok(values)
    }
}

/// An audited integral flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    pub horizon: Time,
    pub classes: Vec<JobClass>,
    /// Units started per class and time.
    pub x: Vec<Vec<u32>>,
    pub y_machine: Vec<u32>,
    pub y_server: Vec<u32>,
    /// Node where all flow sinks; the makespan.
    pub sink: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarRole {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "yM")]
    YMachine,
    #[serde(rename = "yS")]
    YServer,
    #[serde(rename = "z")]
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub role: VarRole,
    /// Representative job id of the class, for `x` variables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<u32>,
    pub t: Time,
}

/// Decoding key for solutions read back from files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub horizon: Time,
    pub machines: u32,
    pub grouped: bool,
    pub classes: Vec<JobClass>,
    pub variables: Vec<ManifestEntry>,
}

/// A built flow model with its layout.
#[derive(Debug, Clone)]
pub struct FlowModel {
    pub model: MilpModel,
    pub layout: ArcFlowLayout,
}

impl FlowModel {
    /// Audits an incumbent and decodes it into a schedule.
    pub fn decode(&self, values: &[f64], inst: &Instance) -> Result<Schedule> {
        self.layout.decode(values, inst)
    }

    pub fn warm_start(&self, sched: &Schedule) -> Result<Vec<f64>> {
        self.layout.encode_schedule(sched, self.model.num_vars())
    }
}

pub fn x_name(class_rep: u32, t: Time) -> String {
    format!("x_{class_rep}_{t}")
}

/// Builds the flow-flow model on horizon `horizon`. With `grouped`, identical
/// jobs share one set of start variables and the assignment row asks for the
/// class multiplicity.
pub fn build_fff(inst: &Instance, horizon: Time, grouped: bool) -> Result<FlowModel> {
    let span = inst.max_span();
    if horizon < span {
        return Err(Error::HorizonTooShort { horizon, span });
    }
    let classes = if grouped {
        group_identical(inst)
    } else {
        singleton_classes(inst)
    };
    let t_max = horizon as usize;
    let m = inst.machines as f64;
    let mut model = MilpModel::new(if grouped { "fff_grouped" } else { "fff" });

    let mut x = Vec::with_capacity(classes.len());
    for cls in &classes {
        let last = horizon - cls.span();
        let upper = cls.multiplicity.min(inst.machines) as f64;
        let kind = if upper <= 1.0 { VarKind::Binary } else { VarKind::Integer };
        let starts = (0..=last)
            .map(|t| model.add_var(x_name(cls.representative, t), kind, 0.0, upper, 0.0))
            .collect::<Result<Vec<_>>>()?;
        x.push(starts);
    }
    let y_machine = (0..horizon)
        .map(|t| model.add_var(format!("yM_{t}"), VarKind::Integer, 0.0, m, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let y_server = (0..horizon)
        .map(|t| model.add_var(format!("yS_{t}"), VarKind::Binary, 0.0, 1.0, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let z = (1..=horizon)
        .map(|t| model.add_var(format!("z_{t}"), VarKind::Binary, 0.0, 1.0, t as f64))
        .collect::<Result<Vec<_>>>()?;

    for (cls, starts) in classes.iter().zip(&x) {
        model.add_constraint(
            format!("assign_{}", cls.representative),
            starts.iter().map(|&v| (v, 1.0)).collect(),
            RowSense::Eq,
            cls.multiplicity as f64,
        )?;
    }

    for (prefix, idle, supply, span_of) in [
        ("gm", &y_machine, m, &(|c: &JobClass| c.span()) as &dyn Fn(&JobClass) -> Time),
        ("gs", &y_server, 1.0, &|c: &JobClass| c.setup),
    ] {
        // incoming[t]: execution arcs ending at t
        let mut incoming: Vec<Vec<VarId>> = vec![Vec::new(); t_max + 1];
        for (cls, starts) in classes.iter().zip(&x) {
            let len = span_of(cls) as usize;
            for (t, &v) in starts.iter().enumerate() {
                incoming[t + len].push(v);
            }
        }
        for t in 0..=t_max {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for starts in &x {
                if let Some(&v) = starts.get(t) {
                    terms.push((v, 1.0));
                }
            }
            terms.extend(incoming[t].iter().map(|&v| (v, -1.0)));
            if t < t_max {
                terms.push((idle[t], 1.0));
            }
            if t > 0 {
                terms.push((idle[t - 1], -1.0));
                terms.push((z[t - 1], supply));
            }
            let rhs = if t == 0 { supply } else { 0.0 };
            model.add_constraint(format!("{prefix}_{t}"), terms, RowSense::Eq, rhs)?;
        }
    }

    Ok(FlowModel {
        model,
        layout: ArcFlowLayout {
            horizon,
            machines: inst.machines,
            grouped,
            classes,
            x,
            y_machine,
            y_server,
            z,
        },
    })
}

/// The tuned variant: grouped model, `z_t` fixed to zero below the
/// server-saturation bound, start variables prioritised earliest-first with
/// the up branch first, and aggressive incumbent search.
pub fn build_fft(inst: &Instance, horizon: Time) -> Result<FlowModel> {
    let mut fm = build_fff(inst, horizon, true)?;
    fm.model.name = "fft".into();
    let lb = lb_better(inst);
    let hints = &mut fm.model.hints;
    for t in 1..lb.min(horizon + 1) {
        hints.fixed_zero.insert(fm.layout.z[t as usize - 1]);
    }
    for starts in &fm.layout.x {
        for (t, &v) in starts.iter().enumerate() {
            hints.branch_priority.insert(v, (horizon as i32) - t as i32 + 1);
            hints.branch_direction.insert(v, BranchDirection::Up);
        }
    }
    hints.aggressive_incumbent_search = true;
    Ok(fm)
}

/// Closed-form variable count of [`build_fff`].
pub fn count_variables(inst: &Instance, horizon: Time, grouped: bool) -> usize {
    let classes = if grouped {
        group_identical(inst)
    } else {
        singleton_classes(inst)
    };
    let starts: usize = classes
        .iter()
        .map(|c| (horizon as usize + 1).saturating_sub(c.span() as usize))
        .sum();
    starts + 3 * horizon as usize
}

/// Closed-form constraint count of [`build_fff`]: one assignment row per
/// class plus one balance row per node in each graph.
pub fn count_constraints(inst: &Instance, horizon: Time, grouped: bool) -> usize {
    let classes = if grouped {
        group_identical(inst).len()
    } else {
        inst.n()
    };
    classes + 2 * (horizon as usize + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{export_lp, solve, solve_relaxation, SolveOptions, SolveStatus};
    use crate::schedule::validate;

    fn fig1() -> Instance {
        Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn counts_match_closed_form() {
        let inst = fig1();
        assert_eq!(count_variables(&inst, 18, false), 117);
        assert_eq!(count_variables(&inst, 18, true), 103);
        for grouped in [false, true] {
            let fm = build_fff(&inst, 18, grouped).unwrap();
            assert_eq!(fm.model.num_vars(), count_variables(&inst, 18, grouped));
            assert_eq!(fm.model.num_constraints(), count_constraints(&inst, 18, grouped));
            assert_eq!(fm.layout.manifest().variables.len(), fm.model.num_vars());
        }
        assert_eq!(build_fff(&inst, 18, false).unwrap().model.num_constraints(), 43);
        assert_eq!(build_fff(&inst, 18, true).unwrap().model.num_constraints(), 42);
        let one = Instance::from_pairs(1, &[(4, 7)]).unwrap();
        assert_eq!(count_variables(&one, 11, false), 1 + 3 * 11);
    }

    #[test]
    fn manifest_names_match_model() {
        let fm = build_fff(&fig1(), 18, true).unwrap();
        let manifest = fm.layout.manifest();
        for (entry, var) in manifest.variables.iter().zip(fm.model.variables()) {
            assert_eq!(entry.name, var.name);
        }
        let json = serde_json::to_string(&manifest).unwrap();
        assert!(json.contains("\"role\":\"yM\""));
        let back: Manifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, manifest);
    }

    #[test]
    fn rejects_short_horizon() {
        assert!(matches!(
            build_fff(&fig1(), 7, false),
            Err(Error::HorizonTooShort { horizon: 7, span: 8 })
        ));
    }

    #[test]
    fn single_job_model() {
        let inst = Instance::from_pairs(1, &[(4, 7)]).unwrap();
        let fm = build_fff(&inst, 11, false).unwrap();
        let out = solve(&fm.model, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective, Some(11.0));
        assert_eq!(out.value(&fm.model, "x_1_0"), Some(1.0));
        assert_eq!(out.value(&fm.model, "z_11"), Some(1.0));
    }

    #[test]
    fn worked_example_optimum() {
        let inst = fig1();
        for grouped in [false, true] {
            let fm = build_fff(&inst, 18, grouped).unwrap();
            let out = solve(&fm.model, &SolveOptions::default()).unwrap();
            assert_eq!(out.status, SolveStatus::Optimal);
            assert!((out.objective.unwrap() - 15.0).abs() < 1e-6);
            let sched = fm.decode(out.incumbent.as_ref().unwrap(), &inst).unwrap();
            assert_eq!(validate(&sched, &inst), []);
            assert_eq!(sched.makespan, 15);
        }
    }

    #[test]
    fn fft_fixes_z_below_lower_bound() {
        let inst = fig1();
        let fm = build_fft(&inst, 18).unwrap();
        let fixed: Vec<Time> = (1..=18)
            .filter(|&t| fm.model.hints.fixed_zero.contains(&fm.layout.z_var(t).unwrap()))
            .collect();
        assert_eq!(fixed, (1..=14).collect::<Vec<_>>());
        assert!(fm.model.hints.aggressive_incumbent_search);
        // priority strictly decreasing in t
        let p = |name: &str| fm.model.hints.branch_priority[&fm.model.var_id(name).unwrap()];
        assert!(p("x_1_0") > p("x_1_1") && p("x_1_1") > p("x_1_2"));
        assert_eq!(p("x_1_3"), p("x_2_3"));
        assert!(fm
            .model
            .hints
            .branch_direction
            .values()
            .all(|&d| d == BranchDirection::Up));
        let out = solve(&fm.model, &SolveOptions::default()).unwrap();
        assert!((out.objective.unwrap() - 15.0).abs() < 1e-6);
        assert!(export_lp(&fm.model).unwrap().contains(" z_14 = 0"));
    }

    #[test]
    fn fft_at_tight_horizon_keeps_only_last_z() {
        let inst = fig1();
        let fm = build_fft(&inst, 15).unwrap();
        let free: Vec<_> = fm
            .layout
            .z
            .iter()
            .filter(|v| !fm.model.hints.fixed_zero.contains(v))
            .collect();
        assert_eq!(free.len(), 1);
        let out = solve(&fm.model, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective.unwrap() - 15.0).abs() < 1e-6);
    }

    #[test]
    fn relaxation_dominates_trivial_bound() {
        let inst = fig1();
        let fm = build_fff(&inst, 18, true).unwrap();
        let lp = solve_relaxation(&fm.model).unwrap();
        assert!(lp >= 32.0 / 3.0 - 1e-6, "lp {lp}");
    }

    #[test]
    fn encode_worked_example_chart() {
        let inst = fig1();
        let chart = Schedule::from_starts(
            &inst,
            &[(1, 1, 0), (2, 2, 2), (3, 1, 5), (5, 3, 8), (4, 2, 10)],
        )
        .unwrap();
        for grouped in [false, true] {
            let fm = build_fff(&inst, 18, grouped).unwrap();
            let values = fm.warm_start(&chart).unwrap();
            assert!(fm.model.max_violation(&values) < 1e-9);
            assert_eq!(fm.model.objective_of(&values), 17.0);
            let flow = fm.layout.audit(&values).unwrap();
            assert_eq!(flow.sink, 17);
            // machines 2 and 3 idle on [0,1) and [1,2); one on [2,3)
            assert_eq!(&flow.y_machine[..3], &[2, 2, 1]);
            // all busy on (8, 10)
            assert_eq!(&flow.y_machine[8..10], &[0, 0]);
        }
    }

    #[test]
    fn audit_reports_imbalance_and_fractions() {
        let inst = fig1();
        let fm = build_fff(&inst, 18, false).unwrap();
        let chart = Schedule::from_starts(
            &inst,
            &[(1, 1, 0), (2, 2, 2), (3, 1, 5), (5, 3, 8), (4, 2, 10)],
        )
        .unwrap();
        let mut values = fm.warm_start(&chart).unwrap();
        let y = fm.model.var_id("yM_4").unwrap();
        values[y.0] += 1.0;
        let err = fm.layout.audit(&values).unwrap_err().to_string();
        assert!(err.contains("machine graph imbalance") && err.contains("node 4"), "{err}");
        values[y.0] -= 0.5;
        let err = fm.layout.audit(&values).unwrap_err().to_string();
        assert!(err.contains("not a nonnegative integer"), "{err}");
    }
}
