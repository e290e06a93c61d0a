//! Benchmark harness: per-instance solve records and the aggregated
//! indicators #O, #N, CPU, DEV_CR and GAP_BB.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcflow::{build_fff, build_fft};
use crate::bounds::{horizon_ub, BoundReport};
use crate::instance::{generate, GenParams, Instance};
use crate::milp::{solve, solve_relaxation, MilpModel, SolveOptions, SolveOutcome, SolveStatus};
use crate::schedule::{validate, Schedule};
use crate::tivi::build_tivi;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "FFF")]
    Fff,
    #[serde(rename = "FFT")]
    Fft,
    #[serde(rename = "FFT-Warmed")]
    FftWarmed,
    #[serde(rename = "TIVI")]
    Tivi,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Fff, ModelKind::Fft, ModelKind::FftWarmed, ModelKind::Tivi];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Fff => "FFF",
            ModelKind::Fft => "FFT",
            ModelKind::FftWarmed => "FFT-Warmed",
            ModelKind::Tivi => "TIVI",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fff" => Ok(ModelKind::Fff),
            "fft" => Ok(ModelKind::Fft),
            "fft-warm" | "fft-warmed" => Ok(ModelKind::FftWarmed),
            "tivi" => Ok(ModelKind::Tivi),
            other => Err(Error::InvalidParams(format!("unknown model {other:?}"))),
        }
    }
}

/// A built model of any kind, ready to solve and decode.
pub struct BuiltModel {
    pub kind: ModelKind,
    pub model: MilpModel,
    decoder: Box<dyn Fn(&[f64], &Instance) -> Result<Schedule> + Send + Sync>,
    /// Assignment encoding the horizon witness, for the warmed variant.
    pub warm_start: Option<Vec<f64>>,
}

impl BuiltModel {
    pub fn decode(&self, values: &[f64], inst: &Instance) -> Result<Schedule> {
        (self.decoder)(values, inst)
    }
}

/// Builds `kind` on horizon `bounds.ub`.
pub fn build_model(kind: ModelKind, inst: &Instance, bounds: &BoundReport) -> Result<BuiltModel> {
    let horizon = bounds.ub;
    Ok(match kind {
        ModelKind::Fff => {
            let fm = build_fff(inst, horizon, true)?;
            let layout = fm.layout.clone();
            BuiltModel {
                kind,
                model: fm.model,
                decoder: Box::new(move |v, i| layout.decode(v, i)),
                warm_start: None,
            }
        }
        ModelKind::Fft | ModelKind::FftWarmed => {
            let fm = build_fft(inst, horizon)?;
            let warm_start = match kind {
                ModelKind::FftWarmed => Some(fm.warm_start(&bounds.ub_witness)?),
                _ => None,
            };
            let layout = fm.layout.clone();
            BuiltModel {
                kind,
                model: fm.model,
                decoder: Box::new(move |v, i| layout.decode(v, i)),
                warm_start,
            }
        }
        ModelKind::Tivi => {
            let tm = build_tivi(inst, horizon)?;
            let layout = tm.layout.clone();
            BuiltModel {
                kind,
                model: tm.model,
                decoder: Box::new(move |v, i| layout.decode(v, i)),
                warm_start: None,
            }
        }
    })
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub time_limit: Option<f64>,
    /// Threads per backend solve.
    pub threads: Option<u32>,
    /// Return the horizon witness as optimal when it meets the lower bound.
    pub shortcut_tight: bool,
    pub compute_lp: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            threads: None,
            shortcut_tight: true,
            compute_lp: true,
        }
    }
}

/// Everything learned from one solve of one model.
#[derive(Debug, Clone)]
pub struct InstanceSolve {
    pub outcome: SolveOutcome,
    pub schedule: Option<Schedule>,
    pub lp_bound: Option<f64>,
    pub var_count: usize,
    pub constraint_count: usize,
    pub build_time: f64,
    pub warm_start_objective: Option<f64>,
}

/// Bounds, build, optional relaxation, solve, decode.
pub fn solve_instance(
    inst: &Instance,
    bounds: &BoundReport,
    kind: ModelKind,
    cfg: &SolveConfig,
) -> Result<InstanceSolve> {
    let started = Instant::now();
    let built = build_model(kind, inst, bounds)?;
    let build_time = started.elapsed().as_secs_f64();
    let lp_bound = if cfg.compute_lp {
        Some(solve_relaxation(&built.model)?)
    } else {
        None
    };
    let warm_start_objective = built.warm_start.as_ref().map(|v| built.model.objective_of(v));

    let outcome = if cfg.shortcut_tight && bounds.is_tight() {
        SolveOutcome {
            status: SolveStatus::Optimal,
            objective: Some(bounds.ub as f64),
            best_bound: Some(bounds.lb_better as f64),
            incumbent: None,
            wall_time: 0.0,
            node_count: Some(0),
            message: Some("horizon witness meets the lower bound".into()),
        }
    } else {
        let opts = SolveOptions {
            time_limit: cfg.time_limit,
            warm_start: built.warm_start.clone(),
            threads: cfg.threads,
            ..SolveOptions::default()
        };
        solve(&built.model, &opts)?
    };

    let schedule = match &outcome.incumbent {
        Some(values) => Some(built.decode(values, inst)?),
        None if outcome.status.has_incumbent() => Some(bounds.ub_witness.clone()),
        None => None,
    };
    Ok(InstanceSolve {
        outcome,
        schedule,
        lp_bound,
        var_count: built.model.num_vars(),
        constraint_count: built.model.num_constraints(),
        build_time,
        warm_start_objective,
    })
}

/// One instance × model outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub n: u32,
    pub m: u32,
    pub alpha: f64,
    pub rho: f64,
    pub replication: u32,
    pub model: ModelKind,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub lp_bound: Option<f64>,
    pub wall_time: f64,
    pub build_time: f64,
    pub var_count: usize,
    pub constraint_count: usize,
    pub lb_better: u32,
    pub ub: u32,
    pub warm_start_objective: Option<f64>,
    /// Decoded schedule passed validation with makespan equal to the objective.
    pub validated: Option<bool>,
    pub message: Option<String>,
}

impl BenchRecord {
    /// `100 * (objective - lp) / lp`, optimal records only.
    pub fn dev_cr(&self) -> Option<f64> {
        match (self.status, self.objective, self.lp_bound) {
            (SolveStatus::Optimal, Some(o), Some(lp)) if lp > 0.0 => Some(100.0 * (o - lp) / lp),
            _ => None,
        }
    }

    /// `100 * (objective - bound) / objective`, non-optimal records with an incumbent.
    pub fn gap_bb(&self) -> Option<f64> {
        match (self.status, self.objective, self.best_bound) {
            (SolveStatus::Feasible, Some(o), Some(b)) if o > 0.0 => Some(100.0 * (o - b) / o),
            _ => None,
        }
    }

    fn combination(&self) -> Combination {
        Combination {
            n: self.n,
            m: self.m,
            alpha: OrdF64(self.alpha),
            rho: OrdF64(self.rho),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub models: Vec<ModelKind>,
    pub time_limit: Option<f64>,
    /// Concurrent solves.
    pub jobs: usize,
    pub shortcut_tight: bool,
    pub compute_lp: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            models: ModelKind::ALL.to_vec(),
            time_limit: Some(3600.0),
            jobs: 1,
            shortcut_tight: false,
            compute_lp: true,
        }
    }
}

fn record_for(
    params: &GenParams,
    replication: u32,
    inst: &Instance,
    bounds: &BoundReport,
    kind: ModelKind,
    cfg: &BenchConfig,
) -> BenchRecord {
    let solve_cfg = SolveConfig {
        time_limit: cfg.time_limit,
        threads: Some(1),
        shortcut_tight: cfg.shortcut_tight,
        compute_lp: cfg.compute_lp,
    };
    let mut rec = BenchRecord {
        instance_id: params.instance_id(replication),
        n: params.n,
        m: params.m,
        alpha: params.alpha,
        rho: params.rho,
        replication,
        model: kind,
        status: SolveStatus::Error,
        objective: None,
        best_bound: None,
        lp_bound: None,
        wall_time: 0.0,
        build_time: 0.0,
        var_count: 0,
        constraint_count: 0,
        lb_better: bounds.lb_better,
        ub: bounds.ub,
        warm_start_objective: None,
        validated: None,
        message: None,
    };
    match solve_instance(inst, bounds, kind, &solve_cfg) {
        Ok(s) => {
            rec.validated = s.schedule.as_ref().map(|sched| {
                validate(sched, inst).is_empty()
                    && s.outcome
                        .objective
                        .is_some_and(|o| (o - sched.makespan as f64).abs() < 1e-6)
            });
            rec.status = s.outcome.status;
            rec.objective = s.outcome.objective;
            rec.best_bound = s.outcome.best_bound;
            rec.lp_bound = s.lp_bound;
            rec.wall_time = s.outcome.wall_time;
            rec.build_time = s.build_time;
            rec.var_count = s.var_count;
            rec.constraint_count = s.constraint_count;
            rec.warm_start_objective = s.warm_start_objective;
            rec.message = s.outcome.message;
        }
        Err(e) => rec.message = Some(e.to_string()),
    }
    rec
}

/// Generates every instance of `grid` and solves it with each model. Records
/// come back sorted by `(instance id, model)`.
pub fn run_bench(grid: &[GenParams], cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty grid".into()));
    }
    let mut tasks = Vec::new();
    for params in grid {
        for (rep, inst) in generate(params)?.into_iter().enumerate() {
            let bounds = horizon_ub(&inst);
            for &kind in &cfg.models {
                tasks.push((params, rep as u32, inst.clone(), bounds.clone(), kind));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Backend(e.to_string()))?;
    let mut records: Vec<BenchRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(params, rep, inst, bounds, kind)| {
                let rec = record_for(params, *rep, inst, bounds, *kind, cfg);
                log::info!("{} {} {} {:?}", rec.instance_id, rec.model, rec.status, rec.objective);
                rec
            })
            .collect()
    });
    records.sort_by(|a, b| (&a.instance_id, a.model).cmp(&(&b.instance_id, b.model)));
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Combination {
    n: u32,
    m: u32,
    alpha: OrdF64,
    rho: OrdF64,
}

/// Indicators of one model on one combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorCell {
    pub replications: usize,
    /// #O
    pub num_optimal: usize,
    /// #N: stopped without any integer solution.
    pub num_no_integer: usize,
    /// Mean wall time over optimal solves.
    pub cpu: Option<f64>,
    pub dev_cr: Option<f64>,
    pub gap_bb: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub n: u32,
    pub m: u32,
    pub alpha: f64,
    pub rho: f64,
    pub cells: BTreeMap<ModelKind, IndicatorCell>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn indicators(records: &[BenchRecord]) -> Vec<IndicatorRow> {
    let mut groups: BTreeMap<Combination, BTreeMap<ModelKind, Vec<&BenchRecord>>> = BTreeMap::new();
    for r in records {
        groups
            .entry(r.combination())
            .or_default()
            .entry(r.model)
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|(c, models)| IndicatorRow {
            n: c.n,
            m: c.m,
            alpha: c.alpha.0,
            rho: c.rho.0,
            cells: models
                .into_iter()
                .map(|(kind, recs)| {
                    let optimal = || recs.iter().filter(|r| r.status == SolveStatus::Optimal);
                    let cell = IndicatorCell {
                        replications: recs.len(),
                        num_optimal: optimal().count(),
                        num_no_integer: recs.iter().filter(|r| r.status.is_no_solution()).count(),
                        cpu: mean(optimal().map(|r| r.wall_time)),
                        dev_cr: mean(recs.iter().filter_map(|r| r.dev_cr())),
                        gap_bb: mean(recs.iter().filter_map(|r| r.gap_bb())),
                    };
                    (kind, cell)
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidParams(format!("unknown report format {other:?}"))),
        }
    }
}

const CELL_COLUMNS: [&str; 5] = ["#O", "#N", "CPU", "DEV_CR", "GAP_BB"];

fn cell_values(cell: Option<&IndicatorCell>) -> [String; 5] {
    let Some(c) = cell else {
        return Default::default();
    };
    let pct = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
    [
        c.num_optimal.to_string(),
        c.num_no_integer.to_string(),
        match c.cpu {
            Some(t) if c.num_optimal > 0 => format!("{t:.2}"),
            _ => "†".into(),
        },
        pct(c.dev_cr),
        pct(c.gap_bb),
    ]
}

/// Renders one row per combination and five columns per model present.
pub fn render_report(rows: &[IndicatorRow], format: ReportFormat) -> String {
    let models: Vec<ModelKind> = {
        let mut all: Vec<ModelKind> = rows.iter().flat_map(|r| r.cells.keys().copied()).collect();
        all.sort();
        all.dedup();
        all
    };
    let mut header: Vec<String> = ["n", "m", "alpha", "rho"].map(String::from).to_vec();
    for kind in &models {
        header.extend(CELL_COLUMNS.iter().map(|c| format!("{kind} {c}")));
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![r.n.to_string(), r.m.to_string(), r.alpha.to_string(), r.rho.to_string()];
            for kind in &models {
                line.extend(cell_values(r.cells.get(kind)));
            }
            line
        })
        .collect();

    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for line in &body {
                w.write_record(line).expect("in-memory write");
            }
            out = String::from_utf8(w.into_inner().expect("flush")).expect("utf8");
        }
        ReportFormat::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for line in &body {
                let _ = writeln!(out, "| {} |", line.join(" | "));
            }
        }
    }
    out
}

pub fn write_records_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_jsonl<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records_jsonl<R: BufRead>(input: R) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(model: ModelKind, status: SolveStatus, obj: Option<f64>, bound: Option<f64>, lp: f64, t: f64) -> BenchRecord {
        BenchRecord {
            instance_id: "n10_m3_a0.1_r0.5_0".into(),
            n: 10,
            m: 3,
            alpha: 0.1,
            rho: 0.5,
            replication: 0,
            model,
            status,
            objective: obj,
            best_bound: bound,
            lp_bound: Some(lp),
            wall_time: t,
            build_time: 0.0,
            var_count: 0,
            constraint_count: 0,
            lb_better: 0,
            ub: 0,
            warm_start_objective: None,
            validated: None,
            message: None,
        }
    }

    #[test]
    fn model_names() {
        for kind in ModelKind::ALL {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json.trim_matches('"'), kind.label());
        }
        assert_eq!("fft-warm".parse::<ModelKind>().unwrap(), ModelKind::FftWarmed);
        assert!("cplex".parse::<ModelKind>().is_err());
    }

    #[test]
    fn dev_cr_zero_when_objective_equals_lp() {
        let r = rec(ModelKind::Fff, SolveStatus::Optimal, Some(50.0), Some(50.0), 50.0, 0.1);
        assert_eq!(r.dev_cr(), Some(0.0));
        assert_eq!(r.gap_bb(), None);
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(render_report(&[], ReportFormat::Csv), "n,m,alpha,rho\n");
        let md = render_report(&[], ReportFormat::Markdown);
        assert_eq!(md.lines().count(), 2);
    }

    #[test]
    fn footnote_conventions() {
        let records = vec![
            rec(ModelKind::Fff, SolveStatus::Optimal, Some(100.0), Some(100.0), 80.0, 1.0),
            rec(ModelKind::Fff, SolveStatus::Optimal, Some(90.0), Some(90.0), 90.0, 3.0),
            rec(ModelKind::Tivi, SolveStatus::TimeLimitNoSolution, None, Some(40.0), 50.0, 9.0),
            rec(ModelKind::Tivi, SolveStatus::Feasible, Some(100.0), Some(75.0), 50.0, 9.0),
        ];
        let rows = indicators(&records);
        assert_eq!(rows.len(), 1);
        let csv = render_report(&rows, ReportFormat::Csv);
        assert_eq!(
            csv,
            "n,m,alpha,rho,FFF #O,FFF #N,FFF CPU,FFF DEV_CR,FFF GAP_BB,TIVI #O,TIVI #N,TIVI CPU,TIVI DEV_CR,TIVI GAP_BB\n\
             10,3,0.1,0.5,2,0,2.00,12.50,,0,1,†,,25.00\n"
        );
    }

    #[test]
    fn records_round_trip_jsonl() {
        let records = vec![
            rec(ModelKind::FftWarmed, SolveStatus::Feasible, Some(10.0), Some(9.0), 8.5, 1.0),
            rec(ModelKind::Tivi, SolveStatus::NoIntegerSolution, None, None, 8.0, 2.0),
        ];
        let mut buf = Vec::new();
        write_records_jsonl(&records, &mut buf).unwrap();
        let back = read_records_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, records);
        let mut csv = Vec::new();
        write_records_csv(&records, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("instance_id,n,m,alpha,rho,replication,model,status"));
        assert!(text.contains("FFT-Warmed,feasible"));
    }
}
